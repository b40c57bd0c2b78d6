//! Plain-text and CSV rendering of grid results, plus the pass/fail
//! checks a finished grid is expected to satisfy.

use std::fmt::Write as _;

use crate::experiment::{mean, CellKey, GridResult, ReidVariant};
use crate::simulate::profile::{calibration_targets, Dataset, Detector};

fn cell<'a>(grid: &'a GridResult, det: Detector, ds: Dataset, reid: ReidVariant) -> &'a crate::experiment::CellStats {
    grid.cells
        .get(&CellKey {
            dataset: ds,
            detector: det,
            reid,
        })
        .expect("grid is complete")
}

/// Human-readable summary: detection calibration, then tracking
/// accuracy per dataset with one row per re-identification variant.
/// Depends only on the measurements, so equal grids render to equal
/// bytes; timing lives in `GridResult::elapsed_secs`, not here.
pub fn render_report(grid: &GridResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "grid over {} seed(s)", grid.seeds.len());
    let _ = writeln!(s);

    let _ = writeln!(s, "detection quality (mean over seeds, % vs target)");
    let _ = writeln!(
        s,
        "{:<9}{:<11}{:>8}{:>9}{:>10}{:>9}",
        "dataset", "detector", "recall", "target", "prcn", "target"
    );
    for ds in Dataset::all() {
        for det in Detector::all() {
            let st = cell(grid, det, ds, ReidVariant::Normal);
            let t = calibration_targets(det, ds);
            let _ = writeln!(
                s,
                "{:<9}{:<11}{:>8.1}{:>9.1}{:>10.1}{:>9.1}",
                ds.label(),
                det.label(),
                100.0 * mean(&st.recall),
                100.0 * t.recall,
                100.0 * mean(&st.precision),
                100.0 * t.precision
            );
        }
    }

    for ds in Dataset::all() {
        let _ = writeln!(s);
        let _ = writeln!(s, "tracking on dataset {} (mean over seeds)", ds.label());
        let _ = writeln!(
            s,
            "{:<10}{:<11}{:>8}{:>8}{:>7}{:>9}{:>9}{:>6}{:>6}{:>6}{:>8}",
            "reid", "detector", "mota%", "motp", "idsw", "fn", "fp", "mt", "pt", "ml", "revive"
        );
        for reid in ReidVariant::all() {
            for det in Detector::all() {
                let st = cell(grid, det, ds, reid);
                let _ = writeln!(
                    s,
                    "{:<10}{:<11}{:>8.1}{:>8.3}{:>7.1}{:>9.1}{:>9.1}{:>6.1}{:>6.1}{:>6.1}{:>8.1}",
                    reid.label(),
                    det.label(),
                    100.0 * mean(&st.mota),
                    mean(&st.motp),
                    mean(&st.id_switches),
                    mean(&st.false_negatives),
                    mean(&st.false_positives),
                    mean(&st.mostly_tracked),
                    mean(&st.partially_tracked),
                    mean(&st.mostly_lost),
                    mean(&st.revivals)
                );
            }
        }
    }
    s
}

/// One row per cell, means over seeds, stable order.
pub fn render_csv(grid: &GridResult) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "dataset,detector,reid,mota,motp,id_switches,false_negatives,false_positives,mostly_tracked,partially_tracked,mostly_lost,recall,precision,revivals"
    );
    for (key, st) in &grid.cells {
        let _ = writeln!(
            s,
            "{},{},{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}",
            key.dataset.label(),
            key.detector.label(),
            key.reid.label(),
            mean(&st.mota),
            mean(&st.motp),
            mean(&st.id_switches),
            mean(&st.false_negatives),
            mean(&st.false_positives),
            mean(&st.mostly_tracked),
            mean(&st.partially_tracked),
            mean(&st.mostly_lost),
            mean(&st.recall),
            mean(&st.precision),
            mean(&st.revivals)
        );
    }
    s
}

const CALIBRATION_TOLERANCE: f64 = 0.005;
const MOTA_MARGIN: f64 = 0.005;
const MOTP_SLACK: f64 = 5e-4;

/// Expectations a healthy grid satisfies: detection rates on target,
/// and degradation ordered the way the quality cells are ordered.
/// Returns one message per violation; empty means clean.
pub fn check_grid(grid: &GridResult) -> Vec<String> {
    let mut failures = Vec::new();

    for ds in Dataset::all() {
        for det in Detector::all() {
            let st = cell(grid, det, ds, ReidVariant::Normal);
            let t = calibration_targets(det, ds);
            let r = mean(&st.recall);
            let p = mean(&st.precision);
            if (r - t.recall).abs() > CALIBRATION_TOLERANCE {
                failures.push(format!(
                    "recall off target for {} on {}: {:.4} vs {:.4}",
                    det.label(),
                    ds.label(),
                    r,
                    t.recall
                ));
            }
            if (p - t.precision).abs() > CALIBRATION_TOLERANCE {
                failures.push(format!(
                    "precision off target for {} on {}: {:.4} vs {:.4}",
                    det.label(),
                    ds.label(),
                    p,
                    t.precision
                ));
            }
        }
    }

    // Degrading the footage must cost accuracy for every detector that
    // was trained on degraded data; the stock detector's detection
    // rates are not ordered, so it is exempt.
    let order = [Dataset::Normal, Dataset::Q40, Dataset::Q50];
    for det in Detector::trained() {
        for pair in order.windows(2) {
            let a = mean(&cell(grid, det, pair[0], ReidVariant::Normal).mota);
            let b = mean(&cell(grid, det, pair[1], ReidVariant::Normal).mota);
            if !(a - b > MOTA_MARGIN) {
                failures.push(format!(
                    "mota not decreasing for {}: {} {:.4} vs {} {:.4}",
                    det.label(),
                    pair[0].label(),
                    a,
                    pair[1].label(),
                    b
                ));
            }
            let ma = mean(&cell(grid, det, pair[0], ReidVariant::Normal).motp);
            let mb = mean(&cell(grid, det, pair[1], ReidVariant::Normal).motp);
            if mb + MOTP_SLACK < ma {
                failures.push(format!(
                    "motp not increasing for {}: {} {:.4} vs {} {:.4}",
                    det.label(),
                    pair[0].label(),
                    ma,
                    pair[1].label(),
                    mb
                ));
            }
        }
    }
    failures
}
