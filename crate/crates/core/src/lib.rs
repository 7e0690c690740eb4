//! Calving-front delineation on multi-temporal SAR-like imagery, desk scale.
//!
//! The pipeline stages are:
//!
//! 1. **synthgen** – reproducible synthetic glacier scenes with speckle,
//!    ice-mélange episodes, and a controllable source→target domain shift.
//! 2. **datamodel** – frames, zone labels, annotations, dataset manifests,
//!    and the few-shot labeling rules (summer-window propagation,
//!    temporally-nearest assignment).
//! 3. **composer** – input time-series construction: strictly consecutive
//!    windows or summer-reference composites.
//! 4. **rockmask** – static rock masks from vector polygons, rasterized as
//!    an extra input channel (exact rational-arithmetic geometry).
//! 5. **net** – multi-temporal encoder–decoder: bidirectional recurrent
//!    units after the deepest encoder stages, 1-D temporal convolutions in
//!    the decoder, per-time-step 4-class outputs, central-crop retention.
//! 6. **adapt** – training with joint source/target sampling and
//!    target-validation IoU early stopping; ensemble retraining.
//! 7. **ensemble** – mean-logit fusion plus class-wise logit-std
//!    uncertainty maps.
//! 8. **frontops** – front extraction from zone maps, mean distance error,
//!    per-class IoU, missing-front bookkeeping.
//! 9. **render** – zone panels, front overlays, uncertainty panels.

pub mod adapt;
pub mod composer;
pub mod datamodel;
pub mod ensemble;
pub mod frontops;
pub mod io;
pub mod net;
pub mod render;
pub mod rockmask;
pub mod scalar;
pub mod synthgen;

pub use scalar::Scalar;

/// Scalar used by the command-line pipeline for intensities and training.
pub type Real = f32;

/// Scalar used for gradient checks and metric accumulation.
pub type Precise = f64;
