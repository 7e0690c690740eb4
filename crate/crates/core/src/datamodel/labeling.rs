//! Few-shot labeling rules: share one manual annotation across its summer
//! window, and assign the temporally closest annotation to dense series.

use chrono::{Datelike, NaiveDate};

use super::{Annotation, DataModelError, FrameRef, Provenance};

/// Default propagation window: July 1 – August 31 of the annotation year.
pub fn summer_window(year: i32) -> (NaiveDate, NaiveDate) {
    (
        NaiveDate::from_ymd_opt(year, 7, 1).expect("valid date"),
        NaiveDate::from_ymd_opt(year, 8, 31).expect("valid date"),
    )
}

/// A frame paired with the annotation that labels it.
#[derive(Debug, Clone)]
pub struct SummerPairing {
    pub frame_index: usize,
    pub annotation: Annotation,
}

/// Pairs every in-window frame of the annotation's glacier with a copy of
/// the annotation. The frame dated exactly like the annotation keeps the
/// original provenance; all other copies are tagged `propagated`.
///
/// The label content is shared, never copied or altered.
pub fn propagate_summer_label(
    annotation: &Annotation,
    frames: &[FrameRef],
    window: Option<(NaiveDate, NaiveDate)>,
) -> Vec<SummerPairing> {
    let (start, end) = window.unwrap_or_else(|| summer_window(annotation.date.year()));
    let mut pairings = Vec::new();
    for (frame_index, frame) in frames.iter().enumerate() {
        if frame.glacier_id != annotation.glacier_id {
            continue;
        }
        if frame.date < start || frame.date > end {
            continue;
        }
        let provenance = if frame.date == annotation.date {
            annotation.provenance
        } else {
            Provenance::Propagated
        };
        pairings.push(SummerPairing {
            frame_index,
            annotation: Annotation {
                provenance,
                ..annotation.clone()
            },
        });
    }
    if pairings.is_empty() {
        log::warn!(
            "no frames of glacier {} fall in window {start}..{end}; annotation {} unused",
            annotation.glacier_id,
            annotation.date
        );
    }
    pairings
}

/// Frame-to-annotation assignment produced by nearest-date matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Assignment {
    pub frame_index: usize,
    pub annotation_index: usize,
    /// True iff the assigned annotation is manual and dated exactly like
    /// the frame.
    pub label_match: bool,
}

/// Assigns to every frame the same-glacier annotation minimizing the
/// absolute date distance; equidistant candidates resolve to the earlier
/// annotation. The result is independent of the input frame order.
pub fn assign_nearest_annotation(
    frames: &[FrameRef],
    annotations: &[Annotation],
) -> Result<Vec<Assignment>, DataModelError> {
    let mut assignments = Vec::with_capacity(frames.len());
    for (frame_index, frame) in frames.iter().enumerate() {
        let best = annotations
            .iter()
            .enumerate()
            .filter(|(_, a)| a.glacier_id == frame.glacier_id)
            .min_by_key(|(_, a)| {
                let gap = (frame.date - a.date).num_days().abs();
                (gap, a.date)
            });
        let (annotation_index, annotation) =
            best.ok_or_else(|| DataModelError::OrphanFrame {
                path: frame.path.clone(),
                glacier: frame.glacier_id.clone(),
                date: frame.date,
            })?;
        let label_match =
            annotation.provenance == Provenance::Manual && annotation.date == frame.date;
        assignments.push(Assignment {
            frame_index,
            annotation_index,
            label_match,
        });
    }
    Ok(assignments)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::datamodel::{DomainTag, Polarization, Zone, ZoneMap};
    use crate::frontops::FrontMask;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn frame(glacier: &str, d: NaiveDate) -> FrameRef {
        FrameRef {
            path: format!("{glacier}_{d}.npy"),
            glacier_id: glacier.into(),
            date: d,
            polarization: Polarization::Hh,
            pixel_spacing_m: 10.0,
            domain: DomainTag::Target,
        }
    }

    fn annotation(glacier: &str, d: NaiveDate) -> Annotation {
        Annotation {
            glacier_id: glacier.into(),
            date: d,
            provenance: Provenance::Manual,
            zones: Arc::new(ZoneMap::filled(4, 4, Zone::Glacier)),
            front: Arc::new(FrontMask::empty(4, 4, 10.0)),
        }
    }

    #[test]
    fn summer_window_includes_july_and_august_only() {
        let ann = annotation("alpha", date(2019, 7, 15));
        let frames = vec![
            frame("alpha", date(2019, 7, 3)),
            frame("alpha", date(2019, 8, 27)),
            frame("alpha", date(2019, 9, 2)),
        ];
        let pairs = propagate_summer_label(&ann, &frames, None);
        assert_eq!(
            pairs.iter().map(|p| p.frame_index).collect::<Vec<_>>(),
            vec![0, 1]
        );
        assert!(pairs
            .iter()
            .all(|p| p.annotation.provenance == Provenance::Propagated));
    }

    #[test]
    fn exact_date_frame_keeps_manual_provenance() {
        let ann = annotation("alpha", date(2019, 7, 15));
        let frames = vec![frame("alpha", date(2019, 7, 15))];
        let pairs = propagate_summer_label(&ann, &frames, None);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].annotation.provenance, Provenance::Manual);
    }

    #[test]
    fn empty_frame_list_gives_empty_result() {
        let ann = annotation("alpha", date(2019, 7, 15));
        assert!(propagate_summer_label(&ann, &[], None).is_empty());
    }

    #[test]
    fn propagation_shares_label_content() {
        let ann = annotation("alpha", date(2019, 7, 15));
        let frames = vec![frame("alpha", date(2019, 7, 20))];
        let pairs = propagate_summer_label(&ann, &frames, None);
        assert!(Arc::ptr_eq(&pairs[0].annotation.zones, &ann.zones));
        assert!(Arc::ptr_eq(&pairs[0].annotation.front, &ann.front));
    }

    #[test]
    fn nearest_annotation_by_day_distance() {
        let frames = vec![frame("alpha", date(2016, 5, 10))];
        let annotations = vec![
            annotation("alpha", date(2016, 5, 1)),
            annotation("alpha", date(2016, 6, 1)),
        ];
        let got = assign_nearest_annotation(&frames, &annotations).unwrap();
        assert_eq!(got[0].annotation_index, 0);
        assert!(!got[0].label_match);
    }

    #[test]
    fn equidistant_tie_breaks_to_earlier_annotation() {
        // 2016-05-11 is 10 days from both 2016-05-01 and 2016-05-21.
        let frames = vec![frame("alpha", date(2016, 5, 11))];
        let annotations = vec![
            annotation("alpha", date(2016, 5, 21)),
            annotation("alpha", date(2016, 5, 1)),
        ];
        let got = assign_nearest_annotation(&frames, &annotations).unwrap();
        assert_eq!(got[0].annotation_index, 1);
    }

    #[test]
    fn exact_date_match_sets_label_match() {
        let frames = vec![frame("alpha", date(2016, 5, 1))];
        let annotations = vec![annotation("alpha", date(2016, 5, 1))];
        let got = assign_nearest_annotation(&frames, &annotations).unwrap();
        assert!(got[0].label_match);
    }

    #[test]
    fn orphan_frame_is_reported() {
        let frames = vec![frame("bravo", date(2016, 5, 1))];
        let annotations = vec![annotation("alpha", date(2016, 5, 1))];
        let err = assign_nearest_annotation(&frames, &annotations).unwrap_err();
        match err {
            DataModelError::OrphanFrame { glacier, .. } => assert_eq!(glacier, "bravo"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn assignment_invariant_to_frame_order() {
        let mut frames = vec![
            frame("alpha", date(2016, 5, 10)),
            frame("alpha", date(2016, 5, 25)),
            frame("alpha", date(2016, 6, 3)),
        ];
        let annotations = vec![
            annotation("alpha", date(2016, 5, 1)),
            annotation("alpha", date(2016, 6, 1)),
        ];
        let forward = assign_nearest_annotation(&frames, &annotations).unwrap();
        frames.reverse();
        let reversed = assign_nearest_annotation(&frames, &annotations).unwrap();
        // Map assignments back to frame paths for comparison.
        let by_path = |frames: &[FrameRef], asg: &[Assignment]| {
            let mut v: Vec<(String, usize)> = asg
                .iter()
                .map(|a| (frames[a.frame_index].path.clone(), a.annotation_index))
                .collect();
            v.sort();
            v
        };
        assert_eq!(by_path(&frames, &reversed), {
            let mut f = frames.clone();
            f.reverse();
            by_path(&f, &forward)
        });
    }
}
