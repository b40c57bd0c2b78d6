//! Tracking by detection refinement.
//!
//! Tracks are boxes carried frame to frame. Each step, live boxes are
//! moved by camera compensation and a constant-velocity guess, snapped
//! onto the best overlapping detection, and decayed when nothing
//! overlaps. Tracks whose score falls below the activity threshold are
//! parked; a parked track can be revived by a new detection whose
//! appearance matches its stored embeddings, which is what keeps an
//! identity across an occlusion gap.
//!
//! Only refined or newly created boxes are emitted. A coasting track
//! survives internally but contributes nothing to the output, so a
//! spell of missed detections costs recall rather than precision.

use std::collections::VecDeque;

use crate::bbox::{iou, BoundingBox};
use crate::config::{EccConfig, TrackerConfig};
use crate::detection::{Detection, Embedding};
use crate::ecc::{ecc_align, GrayImage, WarpModel};
use crate::error::{Error, Result};
use crate::metrics::TrackSet;
use crate::motion::{cva_predict, Warp};

const EMBED_CAP: usize = 10;

#[derive(Debug, Clone)]
pub struct TrackState {
    pub id: u32,
    pub bbox: BoundingBox,
    /// Estimate from the previous frame, in current-frame coordinates
    /// once compensation has run.
    prev_bbox: Option<BoundingBox>,
    pub score: f64,
    pub(crate) embeddings: VecDeque<Embedding>,
    refined: bool,
}

#[derive(Debug, Clone)]
struct Parked {
    id: u32,
    embeddings: VecDeque<Embedding>,
    deactivated_frame: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Spawned,
    Deactivated,
    Suppressed,
    Revived,
    Dropped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrackEvent {
    pub frame: u32,
    pub id: u32,
    pub kind: EventKind,
}

/// Everything the tracker may consume for one frame. `warp_to_prev`
/// maps current-frame coordinates onto the previous frame and takes
/// precedence over backgrounds; backgrounds are aligned on demand and
/// scaled by `bg_scale` (image pixels per background pixel).
pub struct FrameInput<'a> {
    pub frame: u32,
    pub detections: &'a [Detection],
    pub background: Option<&'a GrayImage>,
    pub warp_to_prev: Option<Warp>,
    pub bg_scale: f64,
}

impl<'a> FrameInput<'a> {
    pub fn new(frame: u32, detections: &'a [Detection]) -> Self {
        FrameInput {
            frame,
            detections,
            background: None,
            warp_to_prev: None,
            bg_scale: 1.0,
        }
    }
}

#[derive(Debug)]
pub struct TrackerOutput {
    pub tracks: TrackSet,
    pub events: Vec<TrackEvent>,
}

pub struct Tracker {
    cfg: TrackerConfig,
    ecc: EccConfig,
    active: Vec<TrackState>,
    parked: Vec<Parked>,
    tracks: TrackSet,
    events: Vec<TrackEvent>,
    next_id: u32,
    last_frame: Option<u32>,
    prev_background: Option<GrayImage>,
}

impl Tracker {
    pub fn new(cfg: TrackerConfig, ecc: EccConfig) -> Self {
        Tracker {
            cfg,
            ecc,
            active: Vec::new(),
            parked: Vec::new(),
            tracks: TrackSet::new(),
            events: Vec::new(),
            next_id: 1,
            last_frame: None,
            prev_background: None,
        }
    }

    pub fn active_tracks(&self) -> &[TrackState] {
        &self.active
    }

    pub fn step(&mut self, input: FrameInput<'_>) -> Result<()> {
        let frame = input.frame;
        if let Some(last) = self.last_frame {
            if frame <= last {
                return Err(Error::NonMonotonicFrame { got: frame, last });
            }
        }

        self.compensate_camera(&input)?;
        self.predict();
        let claimed = self.refine(input.detections);
        self.kill_inactive(frame);
        self.suppress_overlaps(frame);
        self.spawn_or_revive(frame, input.detections, &claimed);
        self.prune_parked(frame);

        for t in &self.active {
            if t.refined {
                self.tracks.insert(frame, t.id, t.bbox);
            }
        }
        self.active.sort_by_key(|t| t.id);

        if input.background.is_some() {
            self.prev_background = input.background.cloned();
        }
        self.last_frame = Some(frame);
        Ok(())
    }

    pub fn finish(self) -> TrackerOutput {
        TrackerOutput {
            tracks: self.tracks,
            events: self.events,
        }
    }

    fn compensate_camera(&mut self, input: &FrameInput<'_>) -> Result<()> {
        if !self.cfg.motion.uses_cmc() {
            return Ok(());
        }
        if self.last_frame.is_none() {
            // Nothing to align against yet.
            return Ok(());
        }
        let warp = if let Some(w) = input.warp_to_prev {
            w
        } else {
            let (prev, cur) = match (&self.prev_background, input.background) {
                (Some(p), Some(c)) => (p, c),
                _ => return Err(Error::MotionInputsRequired),
            };
            let res = ecc_align(prev, cur, WarpModel::Translation, &self.ecc.params())?;
            res.warp.scale_translation(input.bg_scale)
        };
        // Bring last frame's estimates into current-frame coordinates.
        let to_cur = warp.inverse();
        for t in &mut self.active {
            t.bbox = crate::motion::cmc_apply(&to_cur, &t.bbox);
            if let Some(p) = t.prev_bbox.as_mut() {
                *p = crate::motion::cmc_apply(&to_cur, p);
            }
        }
        Ok(())
    }

    fn predict(&mut self) {
        let use_cva = self.cfg.motion.uses_cva();
        for t in &mut self.active {
            let prev = t.prev_bbox.replace(t.bbox);
            if use_cva {
                if let Some(p) = prev {
                    t.bbox = cva_predict(&[p, t.bbox]);
                }
            }
        }
    }

    /// Tracks grab free detections in order of overlap strength, best
    /// pair first; a track left without a grab above the refine
    /// threshold is a coast. Strongest-first matters when two tracks
    /// converge on one surviving box: the track actually sitting on it
    /// wins, and the other coasts out and stays recoverable.
    fn refine(&mut self, detections: &[Detection]) -> Vec<bool> {
        let mut claimed = vec![false; detections.len()];
        let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
        for (ti, t) in self.active.iter().enumerate() {
            for (j, d) in detections.iter().enumerate() {
                let ov = iou(&t.bbox, &d.bbox);
                if ov >= self.cfg.tau_refine {
                    pairs.push((ti, j, ov));
                }
            }
        }
        pairs.sort_by(|a, b| {
            b.2.partial_cmp(&a.2)
                .unwrap()
                .then(self.active[a.0].id.cmp(&self.active[b.0].id))
                .then(a.1.cmp(&b.1))
        });
        let mut refined = vec![false; self.active.len()];
        for (ti, j, _) in pairs {
            if refined[ti] || claimed[j] {
                continue;
            }
            refined[ti] = true;
            claimed[j] = true;
            let t = &mut self.active[ti];
            let d = &detections[j];
            t.bbox = d.bbox;
            t.score = d.confidence;
            t.refined = true;
            if let Some(e) = d.embedding {
                if t.embeddings.len() == EMBED_CAP {
                    t.embeddings.pop_front();
                }
                t.embeddings.push_back(e);
            }
        }
        for (ti, t) in self.active.iter_mut().enumerate() {
            if !refined[ti] {
                t.refined = false;
                t.score *= self.cfg.gamma_decay;
            }
        }
        claimed
    }

    fn kill_inactive(&mut self, frame: u32) {
        let threshold = self.cfg.sigma_active;
        let mut kept = Vec::with_capacity(self.active.len());
        for t in self.active.drain(..) {
            if t.score < threshold {
                self.events.push(TrackEvent {
                    frame,
                    id: t.id,
                    kind: EventKind::Deactivated,
                });
                self.parked.push(Parked {
                    id: t.id,
                    embeddings: t.embeddings,
                    deactivated_frame: frame,
                });
            } else {
                kept.push(t);
            }
        }
        self.active = kept;
    }

    /// Greedy overlap suppression, strongest first.
    fn suppress_overlaps(&mut self, frame: u32) {
        let mut order: Vec<usize> = (0..self.active.len()).collect();
        order.sort_by(|&a, &b| {
            self.active[b]
                .score
                .partial_cmp(&self.active[a].score)
                .unwrap()
                .then(self.active[a].id.cmp(&self.active[b].id))
        });
        let mut keep = vec![true; self.active.len()];
        for (rank, &i) in order.iter().enumerate() {
            if !keep[i] {
                continue;
            }
            for &j in &order[rank + 1..] {
                if keep[j] && iou(&self.active[i].bbox, &self.active[j].bbox) > self.cfg.lambda_nms
                {
                    keep[j] = false;
                }
            }
        }
        let mut kept = Vec::with_capacity(self.active.len());
        for (i, t) in self.active.drain(..).enumerate() {
            if keep[i] {
                kept.push(t);
            } else {
                self.events.push(TrackEvent {
                    frame,
                    id: t.id,
                    kind: EventKind::Suppressed,
                });
                self.parked.push(Parked {
                    id: t.id,
                    embeddings: t.embeddings,
                    deactivated_frame: frame,
                });
            }
        }
        self.active = kept;
    }

    fn spawn_or_revive(&mut self, frame: u32, detections: &[Detection], claimed: &[bool]) {
        for (j, d) in detections.iter().enumerate() {
            if claimed[j] || d.confidence < self.cfg.lambda_new {
                continue;
            }
            let overlaps = self
                .active
                .iter()
                .any(|t| iou(&t.bbox, &d.bbox) >= self.cfg.lambda_new_iou);
            if overlaps {
                continue;
            }

            let revived = if self.cfg.reid_enabled {
                self.match_parked(frame, d.embedding.as_ref())
            } else {
                None
            };
            let (id, embeddings, kind) = match revived {
                Some(idx) => {
                    let p = self.parked.remove(idx);
                    (p.id, p.embeddings, EventKind::Revived)
                }
                None => {
                    let id = self.next_id;
                    self.next_id += 1;
                    (id, VecDeque::new(), EventKind::Spawned)
                }
            };
            let mut t = TrackState {
                id,
                bbox: d.bbox,
                prev_bbox: None,
                score: d.confidence,
                embeddings,
                refined: true,
            };
            if let Some(e) = d.embedding {
                if t.embeddings.len() == EMBED_CAP {
                    t.embeddings.pop_front();
                }
                t.embeddings.push_back(e);
            }
            self.events.push(TrackEvent { frame, id, kind });
            self.active.push(t);
        }
    }

    /// Closest parked track by mean embedding distance, within the
    /// patience window and the revival threshold. Ties go to the
    /// lowest id.
    fn match_parked(&self, frame: u32, embedding: Option<&Embedding>) -> Option<usize> {
        let e = embedding?;
        let mut best: Option<(usize, f64, u32)> = None;
        for (idx, p) in self.parked.iter().enumerate() {
            if frame - p.deactivated_frame > self.cfg.reid_patience {
                continue;
            }
            let mean = match Embedding::mean(p.embeddings.iter()) {
                Ok(m) => m,
                Err(_) => continue,
            };
            let dist = mean.distance(e);
            if dist > self.cfg.tau_reid {
                continue;
            }
            let better = match best {
                None => true,
                Some((_, bd, bid)) => dist < bd || (dist == bd && p.id < bid),
            };
            if better {
                best = Some((idx, dist, p.id));
            }
        }
        best.map(|(idx, _, _)| idx)
    }

    fn prune_parked(&mut self, frame: u32) {
        let patience = self.cfg.reid_patience;
        let mut kept = Vec::with_capacity(self.parked.len());
        for p in self.parked.drain(..) {
            if frame - p.deactivated_frame > patience {
                self.events.push(TrackEvent {
                    frame,
                    id: p.id,
                    kind: EventKind::Dropped,
                });
            } else {
                kept.push(p);
            }
        }
        self.parked = kept;
    }
}

/// Runs the tracker over a full detection list, grouped by frame.
/// `warps` supplies per-frame camera motion when compensation is on;
/// frames 1..=n_frames are stepped even when empty so decay and
/// patience behave as in a live stream.
pub fn run_offline(
    cfg: &TrackerConfig,
    ecc: &EccConfig,
    detections: &[Detection],
    n_frames: u32,
    warps: Option<&std::collections::BTreeMap<u32, Warp>>,
) -> Result<TrackerOutput> {
    let mut by_frame: std::collections::BTreeMap<u32, Vec<Detection>> =
        std::collections::BTreeMap::new();
    for d in detections {
        by_frame.entry(d.frame).or_default().push(*d);
    }
    let empty = Vec::new();
    let mut tracker = Tracker::new(cfg.clone(), ecc.clone());
    for frame in 1..=n_frames {
        let dets = by_frame.get(&frame).unwrap_or(&empty);
        let mut input = FrameInput::new(frame, dets);
        if let Some(ws) = warps {
            input.warp_to_prev = ws.get(&frame).copied();
        }
        tracker.step(input)?;
    }
    Ok(tracker.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::MotionModel;
    use crate::detection::EMBED_DIM;

    fn base_cfg() -> TrackerConfig {
        TrackerConfig {
            motion: MotionModel::None,
            ..TrackerConfig::default()
        }
    }

    fn det(frame: u32, x: f64, y: f64, conf: f64) -> Detection {
        Detection {
            frame,
            bbox: BoundingBox::new(x, y, 10.0, 20.0),
            confidence: conf,
            embedding: None,
        }
    }

    fn unit_embedding(axis: usize) -> Embedding {
        let mut v = [0.0; EMBED_DIM];
        v[axis] = 1.0;
        Embedding::new(v).unwrap()
    }

    fn det_with_emb(frame: u32, x: f64, y: f64, conf: f64, axis: usize) -> Detection {
        Detection {
            embedding: Some(unit_embedding(axis)),
            ..det(frame, x, y, conf)
        }
    }

    #[test]
    fn stationary_objects_keep_their_ids() {
        let mut tr = Tracker::new(base_cfg(), EccConfig::default());
        for f in 1..=30 {
            let dets = vec![det(f, 0.0, 0.0, 0.9), det(f, 100.0, 0.0, 0.9)];
            tr.step(FrameInput::new(f, &dets)).unwrap();
        }
        let out = tr.finish();
        assert_eq!(out.tracks.ids().len(), 2);
        for f in 1..=30 {
            assert_eq!(out.tracks.at(f).len(), 2, "frame {f}");
        }
        let spawns = out
            .events
            .iter()
            .filter(|e| e.kind == EventKind::Spawned)
            .count();
        assert_eq!(spawns, 2);
        assert_eq!(out.events.len(), 2);
    }

    #[test]
    fn coasting_emits_nothing() {
        // Slow decay keeps the track alive through the gap; what is
        // under test is that it emits nothing while unrefined.
        let cfg = TrackerConfig {
            gamma_decay: 0.9,
            ..base_cfg()
        };
        let mut tr = Tracker::new(cfg, EccConfig::default());
        for f in 1..=10 {
            let dets = vec![det(f, 0.0, 0.0, 0.9)];
            tr.step(FrameInput::new(f, &dets)).unwrap();
        }
        for f in 11..=13 {
            tr.step(FrameInput::new(f, &[])).unwrap();
            assert!(!tr.active_tracks().is_empty(), "still alive at {f}");
        }
        let out = tr.finish();
        for f in 11..=13 {
            assert!(out.tracks.at(f).is_empty(), "coasted frame {f} was emitted");
        }
    }

    #[test]
    fn revival_keeps_the_id_across_a_gap() {
        let mut tr = Tracker::new(base_cfg(), EccConfig::default());
        for f in 1..=30 {
            let dets: Vec<Detection> = if (1..=10).contains(&f) || (18..=30).contains(&f) {
                vec![det_with_emb(f, 50.0, 50.0, 0.92, 3)]
            } else {
                Vec::new()
            };
            tr.step(FrameInput::new(f, &dets)).unwrap();
        }
        let out = tr.finish();
        assert_eq!(out.tracks.ids().len(), 1, "gap should not mint a new id");
        assert!(out
            .events
            .iter()
            .any(|e| e.kind == EventKind::Deactivated));
        assert!(out.events.iter().any(|e| e.kind == EventKind::Revived));
    }

    #[test]
    fn gap_without_reid_mints_a_new_id() {
        let cfg = TrackerConfig {
            reid_enabled: false,
            ..base_cfg()
        };
        let mut tr = Tracker::new(cfg, EccConfig::default());
        for f in 1..=30 {
            let dets: Vec<Detection> = if (1..=10).contains(&f) || (18..=30).contains(&f) {
                vec![det_with_emb(f, 50.0, 50.0, 0.92, 3)]
            } else {
                Vec::new()
            };
            tr.step(FrameInput::new(f, &dets)).unwrap();
        }
        let out = tr.finish();
        assert_eq!(out.tracks.ids().len(), 2);
        assert!(!out.events.iter().any(|e| e.kind == EventKind::Revived));
    }

    #[test]
    fn gap_beyond_patience_drops_the_track() {
        let cfg = TrackerConfig {
            reid_patience: 5,
            ..base_cfg()
        };
        let mut tr = Tracker::new(cfg, EccConfig::default());
        for f in 1..=50 {
            let dets: Vec<Detection> = if (1..=10).contains(&f) || (40..=50).contains(&f) {
                vec![det_with_emb(f, 50.0, 50.0, 0.92, 3)]
            } else {
                Vec::new()
            };
            tr.step(FrameInput::new(f, &dets)).unwrap();
        }
        let out = tr.finish();
        assert_eq!(out.tracks.ids().len(), 2);
        assert!(out.events.iter().any(|e| e.kind == EventKind::Dropped));
    }

    #[test]
    fn appearance_picks_the_right_parked_track() {
        // Two objects far apart, both lost; one detection returns
        // carrying the second object's appearance.
        let mut tr = Tracker::new(base_cfg(), EccConfig::default());
        let mut second_id = None;
        for f in 1..=40 {
            let dets: Vec<Detection> = if f <= 10 {
                vec![
                    det_with_emb(f, 0.0, 0.0, 0.9, 0),
                    det_with_emb(f, 300.0, 0.0, 0.9, 7),
                ]
            } else if f >= 20 && f <= 25 {
                vec![det_with_emb(f, 150.0, 80.0, 0.9, 7)]
            } else {
                Vec::new()
            };
            tr.step(FrameInput::new(f, &dets)).unwrap();
            if f == 20 {
                second_id = tr.active_tracks().first().map(|t| t.id);
            }
        }
        let out = tr.finish();
        // The revived segment reuses the id spawned at x=300.
        let revived = out
            .events
            .iter()
            .find(|e| e.kind == EventKind::Revived)
            .expect("a revival");
        assert_eq!(Some(revived.id), second_id);
        assert_eq!(revived.id, 2);
        assert_eq!(out.tracks.ids().len(), 2);
    }

    #[test]
    fn converging_duplicates_are_suppressed() {
        let mut tr = Tracker::new(base_cfg(), EccConfig::default());
        for f in 1..=25 {
            let bx = 200.0 - 99.0 * ((f - 1) as f64 / 24.0);
            let dets = vec![det(f, 100.0, 0.0, 0.95), det(f, bx, 0.0, 0.8)];
            tr.step(FrameInput::new(f, &dets)).unwrap();
        }
        let out = tr.finish();
        assert!(out
            .events
            .iter()
            .any(|e| e.kind == EventKind::Suppressed));
        // Only the stronger track survives at the end.
        let last = out.tracks.at(25);
        assert_eq!(last.len(), 1);
    }

    #[test]
    fn weak_detections_do_not_spawn() {
        let mut tr = Tracker::new(base_cfg(), EccConfig::default());
        for f in 1..=10 {
            let dets = vec![det(f, 0.0, 0.0, 0.4)];
            tr.step(FrameInput::new(f, &dets)).unwrap();
        }
        let out = tr.finish();
        assert!(out.tracks.is_empty());
        assert!(out.events.is_empty());
    }

    #[test]
    fn overlapping_detections_do_not_spawn_twins() {
        let mut tr = Tracker::new(base_cfg(), EccConfig::default());
        for f in 1..=10 {
            // Second box overlaps the first track heavily but loses
            // the refine claim to the closer first detection.
            let dets = vec![det(f, 0.0, 0.0, 0.95), det(f, 3.0, 0.0, 0.9)];
            tr.step(FrameInput::new(f, &dets)).unwrap();
        }
        let out = tr.finish();
        assert_eq!(out.tracks.ids().len(), 1);
    }

    #[test]
    fn frames_must_increase() {
        let mut tr = Tracker::new(base_cfg(), EccConfig::default());
        tr.step(FrameInput::new(5, &[])).unwrap();
        let err = tr.step(FrameInput::new(5, &[])).unwrap_err();
        assert_eq!(
            err.to_string(),
            "non-monotonic frame: got 5 after 5"
        );
    }

    #[test]
    fn camera_compensation_needs_inputs() {
        let cfg = TrackerConfig {
            motion: MotionModel::Cmc,
            ..base_cfg()
        };
        let mut tr = Tracker::new(cfg, EccConfig::default());
        tr.step(FrameInput::new(1, &[])).unwrap();
        let err = tr.step(FrameInput::new(2, &[])).unwrap_err();
        assert!(matches!(err, Error::MotionInputsRequired));
    }

    #[test]
    fn provided_warps_track_through_fast_pans() {
        // World-stationary object, camera panning 8 px per frame; the
        // box is 10 px wide so uncompensated overlap falls below the
        // refine threshold.
        let run = |motion: MotionModel, with_warp: bool| -> TrackerOutput {
            let cfg = TrackerConfig {
                motion,
                ..base_cfg()
            };
            let mut tr = Tracker::new(cfg, EccConfig::default());
            for f in 1..=20 {
                let x = 300.0 - 8.0 * (f - 1) as f64;
                let dets = vec![det(f, x, 0.0, 0.9)];
                let mut input = FrameInput::new(f, &dets);
                if with_warp && f > 1 {
                    input.warp_to_prev = Some(Warp::translation(8.0, 0.0));
                }
                tr.step(input).unwrap();
            }
            tr.finish()
        };
        let with = run(MotionModel::Cmc, true);
        assert_eq!(with.tracks.ids().len(), 1);
        assert_eq!(with.tracks.num_boxes(), 20);
        let without = run(MotionModel::None, false);
        assert!(without.tracks.ids().len() > 1, "pan should break naive overlap");
    }

    #[test]
    fn velocity_prediction_follows_accelerating_motion() {
        // Quadratic position: late steps near 10 px per frame, which
        // static overlap cannot bridge, while the constant-velocity
        // residual is only the 0.5 px acceleration term.
        let run = |motion: MotionModel| {
            let cfg = TrackerConfig {
                motion,
                ..base_cfg()
            };
            let mut tr = Tracker::new(cfg, EccConfig::default());
            for f in 1..=20 {
                let dets = vec![det(f, 0.25 * (f * f) as f64, 0.0, 0.9)];
                tr.step(FrameInput::new(f, &dets)).unwrap();
            }
            tr.finish()
        };
        let cva = run(MotionModel::Cva);
        assert_eq!(cva.tracks.ids().len(), 1);
        assert_eq!(cva.tracks.num_boxes(), 20);
        let none = run(MotionModel::None);
        assert!(none.tracks.ids().len() > 1);
    }

    #[test]
    fn backgrounds_drive_compensation_when_no_warp_is_given() {
        // Shared texture rendered under a camera shifting 6 px per
        // frame; detections ride the same shift.
        let bumps: Vec<(f64, f64, f64, f64)> = (0..24)
            .map(|i| {
                let k = i as f64;
                (
                    10.0 + 140.0 * (k * 0.37).fract(),
                    8.0 + 64.0 * (k * 0.61).fract(),
                    1.0 + (k * 0.13).fract(),
                    4.0 + 3.0 * (k * 0.29).fract(),
                )
            })
            .collect();
        let texture = |x: f64, y: f64| -> f64 {
            bumps
                .iter()
                .map(|&(bx, by, a, s)| {
                    let d2 = (x - bx).powi(2) + (y - by).powi(2);
                    a * (-d2 / (2.0 * s * s)).exp()
                })
                .sum()
        };
        let render = |origin: f64| {
            GrayImage::from_fn(160, 80, |x, y| texture(x as f64 + origin, y as f64))
        };

        let cfg = TrackerConfig {
            motion: MotionModel::Cmc,
            ..base_cfg()
        };
        let mut tr = Tracker::new(cfg, EccConfig::default());
        for f in 1..=15 {
            let origin = 6.0 * (f - 1) as f64;
            let bg = render(origin);
            let dets = vec![det(f, 300.0 - origin, 0.0, 0.9)];
            let input = FrameInput {
                frame: f,
                detections: &dets,
                background: Some(&bg),
                warp_to_prev: None,
                bg_scale: 1.0,
            };
            tr.step(input).unwrap();
        }
        let out = tr.finish();
        assert_eq!(out.tracks.ids().len(), 1);
        assert_eq!(out.tracks.num_boxes(), 15);
    }

    #[test]
    fn embedding_memory_is_bounded() {
        let mut tr = Tracker::new(base_cfg(), EccConfig::default());
        for f in 1..=30 {
            let dets = vec![det_with_emb(f, 0.0, 0.0, 0.9, (f % 16) as usize)];
            tr.step(FrameInput::new(f, &dets)).unwrap();
        }
        assert_eq!(tr.active_tracks().len(), 1);
        assert!(tr.active_tracks()[0].embeddings.len() <= EMBED_CAP);
    }

    #[test]
    fn offline_run_is_deterministic() {
        use crate::config::ScenarioConfig;
        use crate::simulate::profile::{default_profile, Dataset, Detector};
        use crate::simulate::generate_scenario;

        let cfg = ScenarioConfig {
            n_tracks: 12,
            n_frames: 80,
            ..ScenarioConfig::default()
        };
        let s = generate_scenario(&cfg, 21).unwrap();
        let p = default_profile(Detector::Normal, Dataset::Q50);
        let dets = crate::simulate::profile::degrade(&s, &p, 21);
        let tcfg = TrackerConfig::default();
        let a = run_offline(&tcfg, &EccConfig::default(), &dets, 80, None).unwrap();
        let b = run_offline(&tcfg, &EccConfig::default(), &dets, 80, None).unwrap();
        assert_eq!(a.tracks.num_boxes(), b.tracks.num_boxes());
        assert_eq!(a.events.len(), b.events.len());
        let rows_a: Vec<_> = a.tracks.iter().collect();
        let rows_b: Vec<_> = b.tracks.iter().collect();
        assert_eq!(rows_a, rows_b);
    }
}
