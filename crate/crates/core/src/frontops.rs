//! Front extraction and evaluation: calving fronts from zone maps, mean
//! distance error (MDE), per-class IoU, and missing-front bookkeeping.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datamodel::{DatasetManifest, Zone, ZoneMap};

#[derive(Debug, Error)]
pub enum FrontOpsError {
    #[error("front pixel ({row}, {col}) outside {height}x{width} grid")]
    PixelOutOfRange {
        row: usize,
        col: usize,
        height: usize,
        width: usize,
    },
    #[error("pixel spacing must be positive, got {0}")]
    BadSpacing(f64),
    #[error("pixel spacing mismatch: {0} vs {1}")]
    SpacingMismatch(f64, f64),
    #[error("grid shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("predicted front is empty (missing front)")]
    MissingPrediction,
    #[error("reference front is empty")]
    EmptyTruth,
    #[error("predictions do not match manifest; unmatched: {0:?}")]
    UnmatchedPredictions(Vec<String>),
    #[error("evaluation io: {0}")]
    Io(#[from] std::io::Error),
    #[error("evaluation label error: {0}")]
    Label(#[from] crate::datamodel::DataModelError),
    #[error("evaluation raster error: {0}")]
    Raster(#[from] crate::io::IoError),
}

/// Set of front pixels (glacier–ocean boundary) on one frame's grid.
/// May be empty: a "missing front".
#[derive(Debug, Clone, PartialEq)]
pub struct FrontMask {
    height: usize,
    width: usize,
    pixel_spacing_m: f64,
    pixels: Vec<(usize, usize)>,
}

impl FrontMask {
    pub fn new(
        height: usize,
        width: usize,
        pixel_spacing_m: f64,
        mut pixels: Vec<(usize, usize)>,
    ) -> Result<Self, FrontOpsError> {
        if !(pixel_spacing_m > 0.0) {
            return Err(FrontOpsError::BadSpacing(pixel_spacing_m));
        }
        for &(row, col) in &pixels {
            if row >= height || col >= width {
                return Err(FrontOpsError::PixelOutOfRange {
                    row,
                    col,
                    height,
                    width,
                });
            }
        }
        pixels.sort_unstable();
        pixels.dedup();
        Ok(Self {
            height,
            width,
            pixel_spacing_m,
            pixels,
        })
    }

    pub fn empty(height: usize, width: usize, pixel_spacing_m: f64) -> Self {
        Self {
            height,
            width,
            pixel_spacing_m,
            pixels: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn pixels(&self) -> &[(usize, usize)] {
        &self.pixels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixel_spacing_m(&self) -> f64 {
        self.pixel_spacing_m
    }

    /// Central crop with the same window rule as zone maps.
    pub fn crop(&self, crop_h: usize, crop_w: usize) -> FrontMask {
        let r0 = (self.height - crop_h) / 2;
        let c0 = (self.width - crop_w) / 2;
        let pixels = self
            .pixels
            .iter()
            .filter(|&&(r, c)| r >= r0 && r < r0 + crop_h && c >= c0 && c < c0 + crop_w)
            .map(|&(r, c)| (r - r0, c - c0))
            .collect();
        FrontMask {
            height: crop_h,
            width: crop_w,
            pixel_spacing_m: self.pixel_spacing_m,
            pixels,
        }
    }
}

const NEIGHBORS_8: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// Extracts the calving front from a zone map: glacier pixels 8-adjacent to
/// at least one ocean pixel, restricted to the largest 8-connected
/// component. Ties resolve to the component containing the smallest
/// (row, col) pixel. An empty result is a valid outcome (missing front).
pub fn extract_front(zones: &ZoneMap, pixel_spacing_m: f64) -> FrontMask {
    let (h, w) = zones.dim();
    let mut boundary = Vec::new();
    for r in 0..h {
        for c in 0..w {
            if zones.get(r, c) != Zone::Glacier {
                continue;
            }
            let touches_ocean = NEIGHBORS_8.iter().any(|&(dr, dc)| {
                let nr = r as isize + dr;
                let nc = c as isize + dc;
                nr >= 0
                    && nr < h as isize
                    && nc >= 0
                    && nc < w as isize
                    && zones.get(nr as usize, nc as usize) == Zone::Ocean
            });
            if touches_ocean {
                boundary.push((r, c));
            }
        }
    }
    if boundary.is_empty() {
        return FrontMask::empty(h, w, pixel_spacing_m);
    }

    // Union-find over the boundary pixel set (8-connectivity).
    let index: HashMap<(usize, usize), usize> = boundary
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i))
        .collect();
    let mut parent: Vec<usize> = (0..boundary.len()).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, &(r, c)) in boundary.iter().enumerate() {
        for &(dr, dc) in &NEIGHBORS_8 {
            let nr = r as isize + dr;
            let nc = c as isize + dc;
            if nr < 0 || nc < 0 {
                continue;
            }
            if let Some(&j) = index.get(&(nr as usize, nc as usize)) {
                let ri = find(&mut parent, i);
                let rj = find(&mut parent, j);
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut sizes: HashMap<usize, usize> = HashMap::new();
    for i in 0..boundary.len() {
        let root = find(&mut parent, i);
        *sizes.entry(root).or_insert(0) += 1;
    }
    // boundary is in row-major order, so the smallest root index is also the
    // component containing the lexicographically smallest pixel.
    let best_root = sizes
        .iter()
        .map(|(&root, &size)| (std::cmp::Reverse(size), root))
        .min()
        .map(|(_, root)| root)
        .expect("nonempty boundary");
    let pixels: Vec<(usize, usize)> = boundary
        .iter()
        .enumerate()
        .filter(|(i, _)| find(&mut parent, *i) == best_root)
        .map(|(_, &p)| p)
        .collect();
    FrontMask::new(h, w, pixel_spacing_m, pixels).expect("boundary pixels in range")
}

/// Exact squared Euclidean distance transform (lower-envelope method).
/// `seeds` marks cells at distance zero. Distances are in pixels².
fn distance_transform_sq(seeds: &[bool], h: usize, w: usize) -> Vec<f64> {
    const INF: f64 = f64::MAX / 4.0;
    let mut dist = vec![INF; h * w];
    for (i, &s) in seeds.iter().enumerate() {
        if s {
            dist[i] = 0.0;
        }
    }
    let mut f = vec![0.0f64; h.max(w)];
    let mut d = vec![0.0f64; h.max(w)];
    let mut v = vec![0usize; h.max(w)];
    let mut z = vec![0.0f64; h.max(w) + 1];

    // Columns, then rows.
    for c in 0..w {
        for r in 0..h {
            f[r] = dist[r * w + c];
        }
        envelope_1d(&f[..h], &mut d, &mut v, &mut z);
        for r in 0..h {
            dist[r * w + c] = d[r];
        }
    }
    for r in 0..h {
        for c in 0..w {
            f[c] = dist[r * w + c];
        }
        envelope_1d(&f[..w], &mut d, &mut v, &mut z);
        for c in 0..w {
            dist[r * w + c] = d[c];
        }
    }
    dist
}

/// 1-D squared-distance transform via the lower envelope of parabolas.
fn envelope_1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::MIN;
    z[1] = f64::MAX;
    for q in 1..n {
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64))
                / (2.0 * q as f64 - 2.0 * p as f64);
            if s <= z[k] {
                if k == 0 {
                    break;
                }
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::MAX;
                break;
            }
        }
    }
    k = 0;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        d[q] = dq * dq + f[p];
    }
}

/// Mean distance error in meters: the symmetric mean of nearest-neighbor
/// Euclidean pixel distances between the two fronts, scaled by the pixel
/// spacing. Implemented with an exact distance transform; the all-pairs
/// brute force serves as the independent oracle in tests.
pub fn mde(pred: &FrontMask, truth: &FrontMask) -> Result<f64, FrontOpsError> {
    if truth.is_empty() {
        return Err(FrontOpsError::EmptyTruth);
    }
    if pred.is_empty() {
        return Err(FrontOpsError::MissingPrediction);
    }
    if pred.pixel_spacing_m != truth.pixel_spacing_m {
        return Err(FrontOpsError::SpacingMismatch(
            pred.pixel_spacing_m,
            truth.pixel_spacing_m,
        ));
    }
    if pred.height != truth.height || pred.width != truth.width {
        return Err(FrontOpsError::ShapeMismatch(
            pred.height,
            pred.width,
            truth.height,
            truth.width,
        ));
    }
    let (h, w) = (pred.height, pred.width);
    let seed_grid = |mask: &FrontMask| {
        let mut seeds = vec![false; h * w];
        for &(r, c) in mask.pixels() {
            seeds[r * w + c] = true;
        }
        seeds
    };
    let dist_to_truth = distance_transform_sq(&seed_grid(truth), h, w);
    let dist_to_pred = distance_transform_sq(&seed_grid(pred), h, w);
    let mean_over = |mask: &FrontMask, dist: &[f64]| {
        mask.pixels()
            .iter()
            .map(|&(r, c)| dist[r * w + c].sqrt())
            .sum::<f64>()
            / mask.len() as f64
    };
    let forward = mean_over(pred, &dist_to_truth);
    let backward = mean_over(truth, &dist_to_pred);
    Ok(0.5 * (forward + backward) * pred.pixel_spacing_m)
}

/// Per-class and mean intersection-over-union. Classes absent from both
/// maps are undefined and excluded from the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IouReport {
    pub per_class: [Option<f64>; Zone::COUNT],
    pub mean: f64,
}

pub fn iou(pred: &ZoneMap, truth: &ZoneMap) -> Result<IouReport, FrontOpsError> {
    if pred.dim() != truth.dim() {
        let (ph, pw) = pred.dim();
        let (th, tw) = truth.dim();
        return Err(FrontOpsError::ShapeMismatch(ph, pw, th, tw));
    }
    let mut tallies = IouTallies::default();
    tallies.add(pred, truth)?;
    Ok(tallies.report())
}

/// Running intersection/union counts, usable per image or dataset-wide.
#[derive(Debug, Clone, Copy, Default)]
pub struct IouTallies {
    intersection: [u64; Zone::COUNT],
    union: [u64; Zone::COUNT],
}

impl IouTallies {
    pub fn add(&mut self, pred: &ZoneMap, truth: &ZoneMap) -> Result<(), FrontOpsError> {
        if pred.dim() != truth.dim() {
            let (ph, pw) = pred.dim();
            let (th, tw) = truth.dim();
            return Err(FrontOpsError::ShapeMismatch(ph, pw, th, tw));
        }
        for (p, t) in pred.labels().iter().zip(truth.labels().iter()) {
            if p == t {
                self.intersection[p.index()] += 1;
                self.union[p.index()] += 1;
            } else {
                self.union[p.index()] += 1;
                self.union[t.index()] += 1;
            }
        }
        Ok(())
    }

    pub fn report(&self) -> IouReport {
        let mut per_class = [None; Zone::COUNT];
        let mut sum = 0.0;
        let mut defined = 0usize;
        for k in 0..Zone::COUNT {
            if self.union[k] > 0 {
                let v = self.intersection[k] as f64 / self.union[k] as f64;
                per_class[k] = Some(v);
                sum += v;
                defined += 1;
            }
        }
        let mean = if defined > 0 { sum / defined as f64 } else { 0.0 };
        IouReport { per_class, mean }
    }
}

/// Outcome of front scoring for one image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "meters")]
pub enum FrontOutcome {
    Distance(f64),
    Missing,
}

/// Scoring input for one label-matched image.
#[derive(Debug, Clone)]
pub struct ScoreItem {
    pub id: String,
    pub pred: ZoneMap,
    pub truth_zones: ZoneMap,
    pub truth_front: FrontMask,
    pub pixel_spacing_m: f64,
}

/// Per-image evaluation record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImageEval {
    pub id: String,
    pub front: FrontOutcome,
    pub iou: IouReport,
}

/// Evaluation over one run: per-image records plus aggregates. MDE
/// aggregates cover only images where both fronts exist; missing-front and
/// evaluated counts always partition the label-matched set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_image: Vec<ImageEval>,
    pub label_matched: usize,
    pub evaluated: usize,
    pub missing_fronts: usize,
    pub mde_mean_m: Option<f64>,
    pub per_class_iou: [Option<f64>; Zone::COUNT],
    pub mean_iou: f64,
}

/// Scores label-matched images: front MDE (or missing) against the truth
/// front, plus dataset-level per-class IoU over all items.
pub fn score_images(items: &[ScoreItem]) -> Result<EvalReport, FrontOpsError> {
    let mut per_image = Vec::with_capacity(items.len());
    let mut tallies = IouTallies::default();
    let mut missing = 0usize;
    let mut mde_sum = 0.0;
    let mut mde_count = 0usize;
    for item in items {
        let pred_front = extract_front(&item.pred, item.pixel_spacing_m);
        let image_iou = iou(&item.pred, &item.truth_zones)?;
        tallies.add(&item.pred, &item.truth_zones)?;
        let front = if pred_front.is_empty() {
            missing += 1;
            FrontOutcome::Missing
        } else {
            let d = mde(&pred_front, &item.truth_front)?;
            mde_sum += d;
            mde_count += 1;
            FrontOutcome::Distance(d)
        };
        per_image.push(ImageEval {
            id: item.id.clone(),
            front,
            iou: image_iou,
        });
    }
    let aggregate = tallies.report();
    Ok(EvalReport {
        per_image,
        label_matched: items.len(),
        evaluated: mde_count,
        missing_fronts: missing,
        mde_mean_m: if mde_count > 0 {
            Some(mde_sum / mde_count as f64)
        } else {
            None
        },
        per_class_iou: aggregate.per_class,
        mean_iou: aggregate.mean,
    })
}

/// A prediction addressed by the frame path it belongs to.
#[derive(Debug, Clone)]
pub struct Prediction {
    pub frame_path: String,
    pub zones: ZoneMap,
}

/// Evaluates predictions against a manifest. Only label-matched records are
/// scored; every label-matched record must have a prediction and every
/// prediction must match a manifest record. Truth rasters are loaded from
/// `root` and cropped to the prediction shape when the outputs were
/// centrally retained.
pub fn evaluate(
    predictions: &[Prediction],
    manifest: &DatasetManifest,
    root: &Path,
) -> Result<EvalReport, FrontOpsError> {
    let by_path: HashMap<&str, &Prediction> = predictions
        .iter()
        .map(|p| (p.frame_path.as_str(), p))
        .collect();
    let known: std::collections::HashSet<&str> = manifest
        .records
        .iter()
        .map(|r| r.frame_path.as_str())
        .collect();
    let mut unmatched: Vec<String> = predictions
        .iter()
        .filter(|p| !known.contains(p.frame_path.as_str()))
        .map(|p| p.frame_path.clone())
        .collect();
    for record in manifest.label_matched() {
        if !by_path.contains_key(record.frame_path.as_str()) {
            unmatched.push(format!("(no prediction for) {}", record.frame_path));
        }
    }
    if !unmatched.is_empty() {
        unmatched.sort();
        return Err(FrontOpsError::UnmatchedPredictions(unmatched));
    }

    let mut items = Vec::new();
    for record in manifest.label_matched() {
        let pred = by_path[record.frame_path.as_str()];
        let truth_zones = crate::io::read_zone_png(&root.join(&record.zone_path))?;
        let truth_front =
            crate::io::read_front_png(&root.join(&record.front_path), record.pixel_spacing_m)?;
        let (ph, pw) = pred.zones.dim();
        let (truth_zones, truth_front) = if (ph, pw) != truth_zones.dim() {
            (truth_zones.crop(ph, pw), truth_front.crop(ph, pw))
        } else {
            (truth_zones, truth_front)
        };
        items.push(ScoreItem {
            id: record.frame_path.clone(),
            pred: pred.zones.clone(),
            truth_zones,
            truth_front,
            pixel_spacing_m: record.pixel_spacing_m,
        });
    }
    score_images(&items)
}

/// Mean ± population standard deviation over retrained runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn over(values: &[f64]) -> Option<MeanStd> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Some(MeanStd {
            mean,
            std: var.sqrt(),
        })
    }

    pub fn render(&self) -> String {
        format!("{:.1}±{:.1}", self.mean, self.std)
    }
}

/// Aggregate of one experiment over several retrained runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub runs: usize,
    pub mde_m: Option<MeanStd>,
    pub missing_fronts: MeanStd,
    pub mean_iou: MeanStd,
    pub per_class_iou: [Option<MeanStd>; Zone::COUNT],
}

/// Aggregates per-run reports into mean ± std cells.
pub fn summarize_runs(reports: &[EvalReport]) -> Option<RunSummary> {
    if reports.is_empty() {
        return None;
    }
    let mde: Vec<f64> = reports.iter().filter_map(|r| r.mde_mean_m).collect();
    let missing: Vec<f64> = reports.iter().map(|r| r.missing_fronts as f64).collect();
    let mean_iou: Vec<f64> = reports.iter().map(|r| r.mean_iou).collect();
    let mut per_class = [None; Zone::COUNT];
    for k in 0..Zone::COUNT {
        let vals: Vec<f64> = reports
            .iter()
            .filter_map(|r| r.per_class_iou[k])
            .collect();
        if vals.len() == reports.len() {
            per_class[k] = MeanStd::over(&vals);
        }
    }
    Some(RunSummary {
        runs: reports.len(),
        mde_m: MeanStd::over(&mde),
        missing_fronts: MeanStd::over(&missing).expect("nonempty"),
        mean_iou: MeanStd::over(&mean_iou).expect("nonempty"),
        per_class_iou: per_class,
    })
}

/// Renders one table row per summary: MDE and missing fronts, then mean and
/// per-class IoU as percentages.
pub fn render_table(rows: &[(String, RunSummary)]) -> String {
    let mut out = String::new();
    out.push_str(
        "Model | MDE (m) | Missing Fronts | All | NA | Rock | Glacier | Ocean\n",
    );
    for (name, s) in rows {
        let mde = s
            .mde_m
            .map(|m| m.render())
            .unwrap_or_else(|| "—".to_string());
        let pct = |m: &Option<MeanStd>| {
            m.map(|v| {
                MeanStd {
                    mean: 100.0 * v.mean,
                    std: 100.0 * v.std,
                }
                .render()
            })
            .unwrap_or_else(|| "—".to_string())
        };
        let iou_all = pct(&Some(s.mean_iou)).replace("±", "±");
        out.push_str(&format!(
            "{name} | {mde} | {} | {} | {} | {} | {} | {}\n",
            s.missing_fronts.render(),
            iou_all,
            pct(&s.per_class_iou[Zone::Na.index()]),
            pct(&s.per_class_iou[Zone::Rock.index()]),
            pct(&s.per_class_iou[Zone::Glacier.index()]),
            pct(&s.per_class_iou[Zone::Ocean.index()]),
        ));
    }
    out
}
