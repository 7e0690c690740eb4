//! Dataset manifest: one record per frame, naming the frame raster, the
//! assigned label rasters, and whether the label is an exact manual match.

use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{DataModelError, DomainTag, FrameRef, Polarization, Split};

/// One frame with its assigned annotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub frame_path: String,
    pub zone_path: String,
    pub front_path: String,
    pub glacier_id: String,
    pub date: NaiveDate,
    pub polarization: Polarization,
    pub pixel_spacing_m: f64,
    pub domain: DomainTag,
    pub split: Split,
    /// True iff the assigned annotation is manual and dated exactly like
    /// the frame; metric computation is restricted to these records.
    pub label_match: bool,
    /// Whether the ocean band next to the front is rendered as ice mélange.
    #[serde(default)]
    pub melange: bool,
}

impl ManifestRecord {
    pub fn frame_ref(&self) -> FrameRef {
        FrameRef {
            path: self.frame_path.clone(),
            glacier_id: self.glacier_id.clone(),
            date: self.date,
            polarization: self.polarization,
            pixel_spacing_m: self.pixel_spacing_m,
            domain: self.domain,
        }
    }
}

/// Ordered list of manifest records.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DatasetManifest {
    pub records: Vec<ManifestRecord>,
}

impl DatasetManifest {
    pub fn new(records: Vec<ManifestRecord>) -> Self {
        Self { records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn label_matched(&self) -> impl Iterator<Item = &ManifestRecord> {
        self.records.iter().filter(|r| r.label_match)
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &ManifestRecord> {
        self.records.iter().filter(move |r| r.split == split)
    }

    pub fn frame_refs(&self) -> Vec<FrameRef> {
        self.records.iter().map(|r| r.frame_ref()).collect()
    }

    /// Checks that every referenced file exists relative to `root`.
    pub fn validate_files(&self, root: &Path) -> Result<(), DataModelError> {
        for record in &self.records {
            for rel in [&record.frame_path, &record.zone_path, &record.front_path] {
                if !root.join(rel).is_file() {
                    return Err(DataModelError::MissingFile(rel.clone()));
                }
            }
        }
        Ok(())
    }
}

/// Writes a manifest as a JSON array of records.
pub fn save_manifest(manifest: &DatasetManifest, path: &Path) -> Result<(), DataModelError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let json = serde_json::to_string_pretty(manifest)?;
    fs::write(path, json)?;
    Ok(())
}

/// Loads a manifest and checks that every referenced file exists relative
/// to the manifest's own directory.
pub fn load_manifest(path: &Path) -> Result<DatasetManifest, DataModelError> {
    let raw = fs::read_to_string(path)?;
    let manifest: DatasetManifest = serde_json::from_str(&raw).map_err(|e| {
        DataModelError::ManifestParse {
            index: 0,
            message: format!("{path:?}: {e}"),
        }
    })?;
    let root = path.parent().unwrap_or_else(|| Path::new("."));
    manifest.validate_files(root)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(frame: &str) -> ManifestRecord {
        ManifestRecord {
            frame_path: frame.to_string(),
            zone_path: format!("{frame}.zone.png"),
            front_path: format!("{frame}.front.png"),
            glacier_id: "alpha".into(),
            date: NaiveDate::from_ymd_opt(2019, 7, 15).unwrap(),
            polarization: Polarization::Hh,
            pixel_spacing_m: 10.0,
            domain: DomainTag::Target,
            split: Split::Train,
            label_match: true,
            melange: false,
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = DatasetManifest::new(vec![record("f0.npy"), record("f1.npy")]);
        for r in &manifest.records {
            for p in [&r.frame_path, &r.zone_path, &r.front_path] {
                fs::write(dir.path().join(p), b"x").unwrap();
            }
        }
        let path = dir.path().join("manifest.json");
        save_manifest(&manifest, &path).unwrap();
        let loaded = load_manifest(&path).unwrap();
        assert_eq!(loaded, manifest);
    }

    #[test]
    fn load_rejects_missing_frame_file() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = DatasetManifest::new(vec![record("absent.npy")]);
        let path = dir.path().join("manifest.json");
        save_manifest(&manifest, &path).unwrap();
        let err = load_manifest(&path).unwrap_err();
        match err {
            DataModelError::MissingFile(p) => assert_eq!(p, "absent.npy"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn label_match_partition_is_exhaustive() {
        let mut a = record("a.npy");
        a.label_match = false;
        let manifest = DatasetManifest::new(vec![a, record("b.npy"), record("c.npy")]);
        let matched = manifest.label_matched().count();
        let unmatched = manifest.records.iter().filter(|r| !r.label_match).count();
        assert_eq!(matched + unmatched, manifest.len());
    }
}
