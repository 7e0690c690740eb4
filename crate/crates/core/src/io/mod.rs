//! Raster file IO: frames as `.npy` grids, labels and masks as 8-bit PNG.

mod npy;
mod png;

use thiserror::Error;

pub use npy::{read_npy_2d, write_npy_2d};
pub use png::{
    read_binary_png, read_front_png, read_gray_png, read_zone_png, write_binary_png,
    write_front_png, write_gray_png, write_rgb_png, write_zone_png,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{path}: not an npy file")]
    BadMagic { path: String },
    #[error("{path}: unsupported npy dtype {descr:?} (expected <f4 or <f8)")]
    BadDtype { path: String, descr: String },
    #[error("{path}: malformed npy header: {reason}")]
    BadHeader { path: String, reason: String },
    #[error("{path}: png decode: {reason}")]
    BadPng { path: String, reason: String },
    #[error("{path}: expected 8-bit grayscale png")]
    NotGray8 { path: String },
    #[error("{path}: binary raster holds value {value}, expected 0 or 1")]
    NotBinary { path: String, value: u8 },
    #[error("label raster: {0}")]
    Label(#[from] crate::datamodel::DataModelError),
    #[error("front raster: {0}")]
    Front(#[from] crate::frontops::FrontOpsError),
}
