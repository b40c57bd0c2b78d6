//! The degradation grid.
//!
//! One run sweeps every (detector, dataset) quality cell crossed with
//! the re-identification variants, over a set of scenario seeds. Seeds
//! run in parallel; aggregation is keyed and ordered so the result is
//! identical however the threads interleave.

use std::collections::BTreeMap;
use std::time::Instant;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::config::{AppConfig, EccConfig, MotionModel, TrackerConfig};
use crate::detection::{Detection, Embedding, EMBED_DIM};
use crate::ecc::{ecc_align, WarpModel};
use crate::error::Result;
use crate::metrics::{classify_tracks, detection_pr, evaluate, MATCH_IOU};
use crate::motion::Warp;
use crate::seeding::sub_rng;
use crate::simulate::profile::{default_profile, degrade, grid_cells, Dataset, Detector};
use crate::simulate::{generate_scenario, Scenario, BG_PX_PER_METER};
use crate::tracker::{run_offline, EventKind};

/// Which appearance model feeds re-identification. Degraded variants
/// add observation noise on top of the cell's detections; `Without`
/// disables revival entirely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReidVariant {
    Without,
    Original,
    Normal,
    Q40,
    Q50,
}

impl ReidVariant {
    pub fn all() -> [ReidVariant; 5] {
        [
            ReidVariant::Without,
            ReidVariant::Original,
            ReidVariant::Normal,
            ReidVariant::Q40,
            ReidVariant::Q50,
        ]
    }

    pub fn enabled(self) -> bool {
        !matches!(self, ReidVariant::Without)
    }

    /// Extra embedding noise from the appearance model itself.
    pub fn extra_sigma(self) -> f64 {
        match self {
            ReidVariant::Without => 0.0,
            ReidVariant::Original => 0.02,
            ReidVariant::Normal => 0.0,
            ReidVariant::Q40 => 0.05,
            ReidVariant::Q50 => 0.10,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ReidVariant::Without => "without",
            ReidVariant::Original => "original",
            ReidVariant::Normal => "normal",
            ReidVariant::Q40 => "q40",
            ReidVariant::Q50 => "q50",
        }
    }

    pub fn apply(self, dets: &[Detection], seed: u64) -> Vec<Detection> {
        let sigma = self.extra_sigma();
        if sigma == 0.0 {
            return dets.to_vec();
        }
        let scale = sigma / (EMBED_DIM as f64).sqrt();
        dets.iter()
            .enumerate()
            .map(|(i, d)| {
                let mut d = *d;
                if let Some(e) = d.embedding {
                    let mut rng = sub_rng(seed, &format!("reid/{}/{i}", self.label()));
                    let mut raw = *e.as_array();
                    for r in &mut raw {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        *r += scale * z;
                    }
                    d.embedding = Embedding::new(raw).ok();
                }
                d
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub dataset: Dataset,
    pub detector: Detector,
    pub reid: ReidVariant,
}

/// Per-seed measurements for one cell; index matches `GridResult::seeds`.
#[derive(Debug, Clone, Default)]
pub struct CellStats {
    pub mota: Vec<f64>,
    pub motp: Vec<f64>,
    pub id_switches: Vec<f64>,
    pub false_negatives: Vec<f64>,
    pub false_positives: Vec<f64>,
    pub mostly_tracked: Vec<f64>,
    pub partially_tracked: Vec<f64>,
    pub mostly_lost: Vec<f64>,
    pub recall: Vec<f64>,
    pub precision: Vec<f64>,
    pub revivals: Vec<f64>,
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

#[derive(Debug)]
pub struct GridResult {
    pub cells: BTreeMap<CellKey, CellStats>,
    pub seeds: Vec<u64>,
    pub elapsed_secs: f64,
}

struct SeedRow {
    mota: f64,
    motp: f64,
    id_switches: f64,
    false_negatives: f64,
    false_positives: f64,
    mostly_tracked: f64,
    partially_tracked: f64,
    mostly_lost: f64,
    recall: f64,
    precision: f64,
    revivals: f64,
}

/// Camera warps recovered from rendered backgrounds, scaled up to
/// image pixels. Keyed by the later frame of each pair.
pub fn compute_warps(scenario: &Scenario, ecc: &EccConfig) -> Result<BTreeMap<u32, Warp>> {
    let scale = scenario.config.px_per_meter / BG_PX_PER_METER;
    let params = ecc.params();
    let mut warps = BTreeMap::new();
    let mut prev = scenario.background(1, BG_PX_PER_METER);
    for f in 2..=scenario.n_frames() {
        let cur = scenario.background(f, BG_PX_PER_METER);
        let res = ecc_align(&prev, &cur, WarpModel::Translation, &params)?;
        warps.insert(f, res.warp.scale_translation(scale));
        prev = cur;
    }
    Ok(warps)
}

fn run_seed(app: &AppConfig, motion: MotionModel, seed: u64) -> Result<BTreeMap<CellKey, SeedRow>> {
    let scenario = generate_scenario(&app.scenario, seed)?;
    let warps = if motion.uses_cmc() {
        Some(compute_warps(&scenario, &app.ecc)?)
    } else {
        None
    };

    let mut rows = BTreeMap::new();
    for (detector, dataset) in grid_cells() {
        let profile = default_profile(detector, dataset);
        let dets = degrade(&scenario, &profile, seed);
        let pr = detection_pr(&scenario.gt, &dets, MATCH_IOU)?;

        for reid in ReidVariant::all() {
            let vdets = reid.apply(&dets, seed);
            let tcfg = TrackerConfig {
                motion,
                reid_enabled: reid.enabled(),
                ..app.tracker
            };
            let out = run_offline(&tcfg, &app.ecc, &vdets, scenario.n_frames(), warps.as_ref())?;
            let m = evaluate(&scenario.gt, &out.tracks, MATCH_IOU)?;
            let (mt, pt, ml) = classify_tracks(&scenario.gt, &out.tracks, MATCH_IOU)?;
            let revivals = out
                .events
                .iter()
                .filter(|e| e.kind == EventKind::Revived)
                .count();
            rows.insert(
                CellKey {
                    dataset,
                    detector,
                    reid,
                },
                SeedRow {
                    mota: m.mota,
                    motp: m.motp,
                    id_switches: m.id_switches as f64,
                    false_negatives: m.false_negatives as f64,
                    false_positives: m.false_positives as f64,
                    mostly_tracked: mt as f64,
                    partially_tracked: pt as f64,
                    mostly_lost: ml as f64,
                    recall: pr.recall,
                    precision: pr.precision,
                    revivals: revivals as f64,
                },
            );
        }
    }
    Ok(rows)
}

/// Runs the full grid. The motion model is a run-level choice rather
/// than a cell axis; camera warps are recovered once per seed and
/// shared across every cell.
pub fn run_grid(app: &AppConfig, motion: MotionModel) -> Result<GridResult> {
    let start = Instant::now();
    let seeds: Vec<u64> = (0..app.grid.seeds)
        .map(|i| app.grid.base_seed + i as u64)
        .collect();
    let per_seed: Vec<Result<BTreeMap<CellKey, SeedRow>>> = seeds
        .par_iter()
        .map(|&seed| run_seed(app, motion, seed))
        .collect();

    let mut cells: BTreeMap<CellKey, CellStats> = BTreeMap::new();
    for result in per_seed {
        for (key, row) in result? {
            let c = cells.entry(key).or_default();
            c.mota.push(row.mota);
            c.motp.push(row.motp);
            c.id_switches.push(row.id_switches);
            c.false_negatives.push(row.false_negatives);
            c.false_positives.push(row.false_positives);
            c.mostly_tracked.push(row.mostly_tracked);
            c.partially_tracked.push(row.partially_tracked);
            c.mostly_lost.push(row.mostly_lost);
            c.recall.push(row.recall);
            c.precision.push(row.precision);
            c.revivals.push(row.revivals);
        }
    }
    Ok(GridResult {
        cells,
        seeds,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}
