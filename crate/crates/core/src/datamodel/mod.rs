//! Domain types, label encoding, dataset manifests, and few-shot labeling
//! rules (summer-window annotation sharing, temporally-nearest assignment,
//! metric restriction to label-matched outputs).

mod labeling;
mod manifest;
mod zones;

use std::sync::Arc;

use chrono::NaiveDate;
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontops::FrontMask;
use crate::scalar::Scalar;

pub use labeling::{
    assign_nearest_annotation, propagate_summer_label, summer_window, Assignment, SummerPairing,
};
pub use manifest::{load_manifest, save_manifest, DatasetManifest, ManifestRecord};
pub use zones::{Zone, ZoneMap};

#[derive(Debug, Error)]
pub enum DataModelError {
    #[error("empty intensity grid")]
    EmptyGrid,
    #[error("pixel spacing must be positive, got {0}")]
    BadSpacing(f64),
    #[error("non-finite intensity at ({row}, {col})")]
    NonFiniteIntensity { row: usize, col: usize },
    #[error("zone label value {value} out of range at ({row}, {col}); expected 0..=3")]
    BadZoneValue { value: u8, row: usize, col: usize },
    #[error("label grid is {got_h}x{got_w} but frame is {want_h}x{want_w}")]
    ShapeMismatch {
        got_h: usize,
        got_w: usize,
        want_h: usize,
        want_w: usize,
    },
    #[error("frame {path} ({glacier}, {date}) has no annotation for its glacier")]
    OrphanFrame {
        path: String,
        glacier: String,
        date: NaiveDate,
    },
    #[error("manifest parse error at record {index}: {message}")]
    ManifestParse { index: usize, message: String },
    #[error("manifest references missing file: {0}")]
    MissingFile(String),
    #[error("manifest io: {0}")]
    Io(#[from] std::io::Error),
    #[error("manifest json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Polarization of a SAR acquisition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    #[serde(rename = "HH")]
    Hh,
    #[serde(rename = "HV")]
    Hv,
    #[serde(rename = "VV")]
    Vv,
    #[serde(rename = "VH")]
    Vh,
}

/// Which side of the domain shift a frame belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainTag {
    Source,
    Target,
}

/// Dataset split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

/// Whether an annotation was drawn by hand or copied from a manual one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Manual,
    Propagated,
}

/// One single-channel intensity raster with acquisition metadata.
#[derive(Debug, Clone)]
pub struct SarFrame<S: Scalar = crate::Real> {
    pub intensity: Array2<S>,
    pub date: NaiveDate,
    pub polarization: Polarization,
    pub pixel_spacing_m: f64,
    pub glacier_id: String,
    pub domain: DomainTag,
}

impl<S: Scalar> SarFrame<S> {
    pub fn new(
        intensity: Array2<S>,
        date: NaiveDate,
        polarization: Polarization,
        pixel_spacing_m: f64,
        glacier_id: impl Into<String>,
        domain: DomainTag,
    ) -> Result<Self, DataModelError> {
        let (h, w) = intensity.dim();
        if h == 0 || w == 0 {
            return Err(DataModelError::EmptyGrid);
        }
        if !(pixel_spacing_m > 0.0) {
            return Err(DataModelError::BadSpacing(pixel_spacing_m));
        }
        for ((row, col), v) in intensity.indexed_iter() {
            if !v.is_finite() {
                return Err(DataModelError::NonFiniteIntensity { row, col });
            }
        }
        Ok(Self {
            intensity,
            date,
            polarization,
            pixel_spacing_m,
            glacier_id: glacier_id.into(),
            domain,
        })
    }

    pub fn height(&self) -> usize {
        self.intensity.dim().0
    }

    pub fn width(&self) -> usize {
        self.intensity.dim().1
    }
}

/// Frame metadata as referenced by manifests and the composer; the pixel
/// data stays on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRef {
    pub path: String,
    pub glacier_id: String,
    pub date: NaiveDate,
    pub polarization: Polarization,
    pub pixel_spacing_m: f64,
    pub domain: DomainTag,
}

/// A zone/front label pair for one glacier at one date.
///
/// Zone and front grids are shared behind `Arc` so that propagating one
/// manual annotation across a summer of frames stays cheap and provably
/// leaves the label content untouched.
#[derive(Debug, Clone)]
pub struct Annotation {
    pub glacier_id: String,
    pub date: NaiveDate,
    pub provenance: Provenance,
    pub zones: Arc<ZoneMap>,
    pub front: Arc<FrontMask>,
}

impl Annotation {
    pub fn manual(
        glacier_id: impl Into<String>,
        date: NaiveDate,
        zones: ZoneMap,
        front: FrontMask,
    ) -> Self {
        Self {
            glacier_id: glacier_id.into(),
            date,
            provenance: Provenance::Manual,
            zones: Arc::new(zones),
            front: Arc::new(front),
        }
    }
}
