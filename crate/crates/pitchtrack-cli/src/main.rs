use std::fs::{self, File};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use pitchtrack::config::{AppConfig, MotionModel};
use pitchtrack::experiment::{compute_warps, run_grid};
use pitchtrack::metrics::{evaluate, MotMetrics, MATCH_IOU};
use pitchtrack::mot_io;
use pitchtrack::simulate::generate_scenario;
use pitchtrack::simulate::profile::{default_profile, degrade, Dataset, Detector};
use pitchtrack::table::{check_grid, render_csv, render_report};
use pitchtrack::tracker::run_offline;

#[derive(Parser)]
#[command(
    name = "pitchtrack",
    version,
    about = "Simulated soccer scenes, quality-degraded detections, tracking and scoring"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write ground truth plus degraded detections
    Generate {
        /// TOML settings file; built-in defaults apply when omitted
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Detector tier: original, normal, q40 or q50
        #[arg(long, default_value = "normal", value_parser = parse_detector)]
        detector: Detector,
        /// Footage tier: normal, q40 or q50
        #[arg(long, default_value = "normal", value_parser = parse_dataset)]
        dataset: Dataset,
        /// Directory for gt.txt, dets.txt and the embedding sidecar
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the tracker over a detection file
    Track {
        /// Detections in the ten-column text format; an .emb.csv sidecar
        /// next to the file is picked up automatically
        #[arg(long)]
        dets: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output track file
        #[arg(long)]
        out: PathBuf,
        /// Disable appearance-based revival
        #[arg(long)]
        no_reid: bool,
        /// Motion model: none, cva, cmc or cva+cmc
        #[arg(long, value_parser = parse_motion)]
        motion: Option<MotionModel>,
        /// Scenario seed, used to regenerate camera backgrounds; required
        /// by the cmc motion models
        #[arg(long)]
        seed: Option<u64>,
        /// Ground-truth file to score against after tracking
        #[arg(long)]
        gt: Option<PathBuf>,
    },
    /// Sweep the degradation grid and report per-cell tracking quality
    Grid {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Scenario seeds per cell
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long)]
        base_seed: Option<u64>,
        /// Motion model: none, cva, cmc or cva+cmc
        #[arg(long, value_parser = parse_motion)]
        motion: Option<MotionModel>,
        /// Directory for report.txt and results.csv
        #[arg(long)]
        out: Option<PathBuf>,
        /// Verify calibration and degradation ordering; failures exit 2
        #[arg(long)]
        check: bool,
    },
    /// Score a track file against ground truth
    Eval {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        hyp: PathBuf,
    },
}

fn parse_detector(s: &str) -> Result<Detector, String> {
    Detector::parse(s).map_err(|e| e.to_string())
}

fn parse_dataset(s: &str) -> Result<Dataset, String> {
    Dataset::parse(s).map_err(|e| e.to_string())
}

fn parse_motion(s: &str) -> Result<MotionModel, String> {
    MotionModel::parse(s).map_err(|e| e.to_string())
}

fn load_config(path: &Option<PathBuf>) -> Result<AppConfig> {
    match path {
        Some(p) => AppConfig::from_file(p).with_context(|| format!("reading {}", p.display())),
        None => Ok(AppConfig::default()),
    }
}

fn print_metrics(m: &MotMetrics) {
    let recall = m.matches as f64 / m.gt_total.max(1) as f64;
    let denom = (m.matches + m.false_positives).max(1) as f64;
    println!("mota {:.4}  motp {:.4}", m.mota, m.motp);
    println!(
        "id_switches {}  false_negatives {}  false_positives {}",
        m.id_switches, m.false_negatives, m.false_positives
    );
    println!(
        "matches {}  recall {:.4}  precision {:.4}",
        m.matches,
        recall,
        m.matches as f64 / denom
    );
    println!(
        "mostly_tracked {}  partially_tracked {}  mostly_lost {}",
        m.mostly_tracked, m.partially_tracked, m.mostly_lost
    );
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate {
            config,
            seed,
            detector,
            dataset,
            out,
        } => {
            let app = load_config(&config)?;
            let scenario = generate_scenario(&app.scenario, seed)?;
            let profile = default_profile(detector, dataset);
            let dets = degrade(&scenario, &profile, seed);
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let gt_path = out.join("gt.txt");
            let det_path = out.join("dets.txt");
            mot_io::write_tracks_file(&gt_path, &scenario.gt)?;
            mot_io::write_detections_file(&det_path, &dets)?;
            let emb_path = mot_io::embeddings_path(&det_path);
            mot_io::write_embeddings(File::create(&emb_path)?, &dets)?;
            println!(
                "wrote {} and {} ({} detections, {} on {})",
                gt_path.display(),
                det_path.display(),
                dets.len(),
                detector,
                dataset
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Track {
            dets,
            config,
            out,
            no_reid,
            motion,
            seed,
            gt,
        } => {
            let app = load_config(&config)?;
            let mut detections = mot_io::read_detections_file(&dets)
                .with_context(|| format!("reading {}", dets.display()))?;
            let emb_path = mot_io::embeddings_path(&dets);
            if emb_path.exists() {
                mot_io::read_embeddings(File::open(&emb_path)?, &mut detections)
                    .with_context(|| format!("reading {}", emb_path.display()))?;
            }
            let mut tcfg = app.tracker;
            if let Some(m) = motion {
                tcfg.motion = m;
            }
            if no_reid {
                tcfg.reid_enabled = false;
            }
            let warps = if tcfg.motion.uses_cmc() {
                let Some(seed) = seed else {
                    bail!("camera compensation needs --seed to regenerate backgrounds");
                };
                let scenario = generate_scenario(&app.scenario, seed)?;
                Some(compute_warps(&scenario, &app.ecc)?)
            } else {
                None
            };
            let n_frames = detections.iter().map(|d| d.frame).max().unwrap_or(0);
            let result = run_offline(&tcfg, &app.ecc, &detections, n_frames, warps.as_ref())?;
            mot_io::write_tracks_file(&out, &result.tracks)?;
            println!(
                "wrote {} ({} tracks, {} boxes)",
                out.display(),
                result.tracks.ids().len(),
                result.tracks.frames().map(|f| result.tracks.at(f).len()).sum::<usize>()
            );
            if let Some(gt_path) = gt {
                let gt = mot_io::read_tracks_file(&gt_path)
                    .with_context(|| format!("reading {}", gt_path.display()))?;
                let m = evaluate(&gt, &result.tracks, MATCH_IOU)?;
                print_metrics(&m);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Grid {
            config,
            seeds,
            base_seed,
            motion,
            out,
            check,
        } => {
            let mut app = load_config(&config)?;
            if let Some(n) = seeds {
                app.grid.seeds = n;
            }
            if let Some(b) = base_seed {
                app.grid.base_seed = b;
            }
            let motion = motion.unwrap_or(app.tracker.motion);
            let grid = run_grid(&app, motion)?;
            let report = render_report(&grid);
            print!("{report}");
            println!("finished in {:.1}s", grid.elapsed_secs);
            if let Some(dir) = &out {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                fs::write(dir.join("report.txt"), &report)?;
                fs::write(dir.join("results.csv"), render_csv(&grid))?;
                println!("wrote {} and {}", dir.join("report.txt").display(), dir.join("results.csv").display());
            }
            if check {
                let failures = check_grid(&grid);
                if failures.is_empty() {
                    println!("all checks passed");
                } else {
                    for f in &failures {
                        eprintln!("check failed: {f}");
                    }
                    return Ok(ExitCode::from(2));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval { gt, hyp } => {
            let gt = mot_io::read_tracks_file(&gt)?;
            let hyp = mot_io::read_tracks_file(&hyp)?;
            let m = evaluate(&gt, &hyp, MATCH_IOU)?;
            print_metrics(&m);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
