//! CLEAR-MOT evaluation.
//!
//! Correspondences persist frame to frame: a pair matched at f-1 is
//! kept at f whenever both boxes still overlap at or above the gate,
//! and only the leftovers go through minimum-cost assignment on
//! 1 - IoU. An identity switch is counted when a ground-truth track
//! matches a hypothesis id different from the last one it ever held,
//! so a track that reappears under a new id after a gap is charged
//! exactly once.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::assignment::{solve_assignment, CostMatrix};
use crate::bbox::{iou, BoundingBox};
use crate::detection::Detection;
use crate::error::{Error, Result};

/// IoU gate shared by evaluation and detection scoring.
pub const MATCH_IOU: f64 = 0.5;

/// Identified boxes indexed by frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrackSet {
    frames: BTreeMap<u32, Vec<(u32, BoundingBox)>>,
}

impl TrackSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, frame: u32, id: u32, bbox: BoundingBox) {
        self.frames.entry(frame).or_default().push((id, bbox));
    }

    pub fn at(&self, frame: u32) -> &[(u32, BoundingBox)] {
        self.frames.get(&frame).map_or(&[], |v| v.as_slice())
    }

    pub fn frames(&self) -> impl Iterator<Item = u32> + '_ {
        self.frames.keys().copied()
    }

    pub fn frame_range(&self) -> Option<(u32, u32)> {
        let first = self.frames.keys().next()?;
        let last = self.frames.keys().next_back()?;
        Some((*first, *last))
    }

    pub fn num_boxes(&self) -> usize {
        self.frames.values().map(Vec::len).sum()
    }

    pub fn ids(&self) -> BTreeSet<u32> {
        self.frames
            .values()
            .flat_map(|v| v.iter().map(|(id, _)| *id))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// (frame, id, box) triples in frame order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, &BoundingBox)> + '_ {
        self.frames
            .iter()
            .flat_map(|(f, v)| v.iter().map(move |(id, b)| (*f, *id, b)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotMetrics {
    pub mota: f64,
    /// Mean 1 - IoU over matched pairs; lower is better.
    pub motp: f64,
    pub matches: usize,
    pub false_negatives: usize,
    pub false_positives: usize,
    pub id_switches: usize,
    pub gt_total: usize,
    pub mostly_tracked: usize,
    pub partially_tracked: usize,
    pub mostly_lost: usize,
}

struct EvalState {
    matches: usize,
    false_negatives: usize,
    false_positives: usize,
    id_switches: usize,
    motp_sum: f64,
    matched_frames: HashMap<u32, usize>,
}

fn run_protocol(gt: &TrackSet, hyp: &TrackSet, iou_gate: f64) -> EvalState {
    let mut st = EvalState {
        matches: 0,
        false_negatives: 0,
        false_positives: 0,
        id_switches: 0,
        motp_sum: 0.0,
        matched_frames: HashMap::new(),
    };
    let mut last_partner: HashMap<u32, u32> = HashMap::new();
    let mut prev_pairs: Vec<(u32, u32)> = Vec::new();
    let mut prev_frame: Option<u32> = None;

    let frames: BTreeSet<u32> = gt.frames().chain(hyp.frames()).collect();
    for f in frames {
        let gts = gt.at(f);
        let hyps = hyp.at(f);
        let mut g_used = vec![false; gts.len()];
        let mut h_used = vec![false; hyps.len()];
        let mut pairs: Vec<(usize, usize)> = Vec::new();

        if prev_frame == Some(f.wrapping_sub(1)) && f > 0 {
            for &(gid, hid) in &prev_pairs {
                let gi = gts.iter().position(|(id, _)| *id == gid);
                let hi = hyps.iter().position(|(id, _)| *id == hid);
                if let (Some(gi), Some(hi)) = (gi, hi) {
                    if !g_used[gi]
                        && !h_used[hi]
                        && iou(&gts[gi].1, &hyps[hi].1) >= iou_gate
                    {
                        g_used[gi] = true;
                        h_used[hi] = true;
                        pairs.push((gi, hi));
                    }
                }
            }
        }

        let free_g: Vec<usize> = (0..gts.len()).filter(|&i| !g_used[i]).collect();
        let free_h: Vec<usize> = (0..hyps.len()).filter(|&i| !h_used[i]).collect();
        if !free_g.is_empty() && !free_h.is_empty() {
            let cost = CostMatrix::from_fn(free_g.len(), free_h.len(), |r, c| {
                1.0 - iou(&gts[free_g[r]].1, &hyps[free_h[c]].1)
            });
            let forbid = |r: usize, c: usize| {
                iou(&gts[free_g[r]].1, &hyps[free_h[c]].1) < iou_gate
            };
            for (r, c) in solve_assignment(&cost, Some(&forbid)).pairs {
                pairs.push((free_g[r], free_h[c]));
            }
        }

        prev_pairs.clear();
        for &(gi, hi) in &pairs {
            let gid = gts[gi].0;
            let hid = hyps[hi].0;
            st.matches += 1;
            st.motp_sum += 1.0 - iou(&gts[gi].1, &hyps[hi].1);
            *st.matched_frames.entry(gid).or_insert(0) += 1;
            match last_partner.get(&gid) {
                Some(&prev_hid) if prev_hid != hid => st.id_switches += 1,
                _ => {}
            }
            last_partner.insert(gid, hid);
            prev_pairs.push((gid, hid));
        }
        st.false_negatives += gts.len() - pairs.len();
        st.false_positives += hyps.len() - pairs.len();
        prev_frame = Some(f);
    }
    st
}

/// CLEAR-MOT scores for a hypothesis against ground truth.
pub fn evaluate(gt: &TrackSet, hyp: &TrackSet, iou_gate: f64) -> Result<MotMetrics> {
    let gt_total = gt.num_boxes();
    if gt_total == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    let st = run_protocol(gt, hyp, iou_gate);
    let (mt, pt, ml) = classify_from_counts(gt, &st.matched_frames);
    Ok(MotMetrics {
        mota: 1.0
            - (st.false_negatives + st.false_positives + st.id_switches) as f64
                / gt_total as f64,
        motp: if st.matches > 0 {
            st.motp_sum / st.matches as f64
        } else {
            0.0
        },
        matches: st.matches,
        false_negatives: st.false_negatives,
        false_positives: st.false_positives,
        id_switches: st.id_switches,
        gt_total,
        mostly_tracked: mt,
        partially_tracked: pt,
        mostly_lost: ml,
    })
}

fn classify_from_counts(gt: &TrackSet, matched: &HashMap<u32, usize>) -> (usize, usize, usize) {
    let mut visible: BTreeMap<u32, usize> = BTreeMap::new();
    for (_, id, _) in gt.iter() {
        *visible.entry(id).or_insert(0) += 1;
    }
    let (mut mt, mut pt, mut ml) = (0, 0, 0);
    for (id, vis) in visible {
        let cov = matched.get(&id).copied().unwrap_or(0) as f64 / vis as f64;
        if cov >= 0.8 {
            mt += 1;
        } else if cov < 0.2 {
            ml += 1;
        } else {
            pt += 1;
        }
    }
    (mt, pt, ml)
}

/// (mostly tracked, partially tracked, mostly lost) counts over
/// ground-truth tracks. Coverage is the matched fraction of the frames
/// in which the track is visible: MT at 0.8 and up, ML below 0.2.
pub fn classify_tracks(gt: &TrackSet, hyp: &TrackSet, iou_gate: f64) -> Result<(usize, usize, usize)> {
    if gt.num_boxes() == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    let st = run_protocol(gt, hyp, iou_gate);
    Ok(classify_from_counts(gt, &st.matched_frames))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrStats {
    pub tp: usize,
    pub fp: usize,
    pub false_negatives: usize,
    pub recall: f64,
    pub precision: f64,
}

/// Frame-by-frame detection recall and precision against ground truth,
/// gated and matched like the tracking metrics but with no memory
/// across frames.
pub fn detection_pr(gt: &TrackSet, dets: &[Detection], iou_gate: f64) -> Result<PrStats> {
    let gt_total = gt.num_boxes();
    if gt_total == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    let mut by_frame: BTreeMap<u32, Vec<&Detection>> = BTreeMap::new();
    for d in dets {
        by_frame.entry(d.frame).or_default().push(d);
    }
    let mut tp = 0usize;
    let mut fp = 0usize;
    let frames: BTreeSet<u32> = gt.frames().chain(by_frame.keys().copied()).collect();
    for f in frames {
        let gts = gt.at(f);
        let empty = Vec::new();
        let ds = by_frame.get(&f).unwrap_or(&empty);
        if gts.is_empty() || ds.is_empty() {
            fp += ds.len();
            continue;
        }
        let cost = CostMatrix::from_fn(gts.len(), ds.len(), |r, c| {
            1.0 - iou(&gts[r].1, &ds[c].bbox)
        });
        let forbid = |r: usize, c: usize| iou(&gts[r].1, &ds[c].bbox) < iou_gate;
        let matched = solve_assignment(&cost, Some(&forbid)).pairs.len();
        tp += matched;
        fp += ds.len() - matched;
    }
    let false_negatives = gt_total - tp;
    Ok(PrStats {
        tp,
        fp,
        false_negatives,
        recall: tp as f64 / gt_total as f64,
        precision: if tp + fp > 0 {
            tp as f64 / (tp + fp) as f64
        } else {
            1.0
        },
    })
}
