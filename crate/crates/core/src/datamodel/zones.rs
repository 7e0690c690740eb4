//! Zone label encoding: 4 classes on a single-channel 8-bit grid.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::DataModelError;

/// Per-pixel zone class. The on-disk encoding is the discriminant value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum Zone {
    Na = 0,
    Rock = 1,
    Glacier = 2,
    Ocean = 3,
}

impl Zone {
    pub const ALL: [Zone; 4] = [Zone::Na, Zone::Rock, Zone::Glacier, Zone::Ocean];
    pub const COUNT: usize = 4;

    pub fn from_u8(value: u8) -> Option<Zone> {
        match value {
            0 => Some(Zone::Na),
            1 => Some(Zone::Rock),
            2 => Some(Zone::Glacier),
            3 => Some(Zone::Ocean),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Zone::Na => "NA",
            Zone::Rock => "Rock",
            Zone::Glacier => "Glacier",
            Zone::Ocean => "Ocean",
        }
    }
}

/// Per-pixel 4-class label grid aligned to a frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZoneMap {
    labels: Array2<Zone>,
}

impl ZoneMap {
    pub fn new(labels: Array2<Zone>) -> Self {
        Self { labels }
    }

    pub fn filled(height: usize, width: usize, zone: Zone) -> Self {
        Self {
            labels: Array2::from_elem((height, width), zone),
        }
    }

    /// Decodes an 8-bit grid, rejecting values outside the 4-class range.
    pub fn from_u8_grid(grid: &Array2<u8>) -> Result<Self, DataModelError> {
        let mut labels = Array2::from_elem(grid.dim(), Zone::Na);
        for ((row, col), &value) in grid.indexed_iter() {
            labels[(row, col)] = Zone::from_u8(value).ok_or(DataModelError::BadZoneValue {
                value,
                row,
                col,
            })?;
        }
        Ok(Self { labels })
    }

    pub fn to_u8_grid(&self) -> Array2<u8> {
        self.labels.mapv(|z| z as u8)
    }

    pub fn height(&self) -> usize {
        self.labels.dim().0
    }

    pub fn width(&self) -> usize {
        self.labels.dim().1
    }

    pub fn dim(&self) -> (usize, usize) {
        self.labels.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> Zone {
        self.labels[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, zone: Zone) {
        self.labels[(row, col)] = zone;
    }

    pub fn labels(&self) -> &Array2<Zone> {
        &self.labels
    }

    /// Pixel count per class, indexed by `Zone::index`.
    pub fn class_counts(&self) -> [usize; Zone::COUNT] {
        let mut counts = [0usize; Zone::COUNT];
        for &z in self.labels.iter() {
            counts[z.index()] += 1;
        }
        counts
    }

    /// Central crop used when scoring retained outputs; the window gets the
    /// extra pixel on the low-index side when the margin is odd.
    pub fn crop(&self, crop_h: usize, crop_w: usize) -> ZoneMap {
        let (h, w) = self.dim();
        assert!(crop_h <= h && crop_w <= w, "crop exceeds grid");
        let r0 = (h - crop_h) / 2;
        let c0 = (w - crop_w) / 2;
        ZoneMap::new(
            self.labels
                .slice(ndarray::s![r0..r0 + crop_h, c0..c0 + crop_w])
                .to_owned(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_labels() {
        let mut grid = Array2::<u8>::zeros((4, 4));
        grid[(2, 3)] = 5;
        let err = ZoneMap::from_u8_grid(&grid).unwrap_err();
        match err {
            DataModelError::BadZoneValue { value, row, col } => {
                assert_eq!((value, row, col), (5, 2, 3));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn u8_round_trip() {
        let mut grid = Array2::<u8>::zeros((3, 5));
        grid[(0, 1)] = 1;
        grid[(1, 2)] = 2;
        grid[(2, 4)] = 3;
        let zones = ZoneMap::from_u8_grid(&grid).unwrap();
        assert_eq!(zones.to_u8_grid(), grid);
        assert_eq!(zones.class_counts(), [12, 1, 1, 1]);
    }
}
