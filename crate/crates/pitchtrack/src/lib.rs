//! Multi-object tracking for soccer-style scenes, end to end in
//! simulation: scenario generation, calibrated detection degradation,
//! a detection-refinement tracker with camera compensation and
//! appearance-based revival, and CLEAR-style evaluation.
//!
//! The crate is built around one experiment shape: generate a scene,
//! corrupt its ground truth into detector output at a chosen quality
//! level, track, and score. `experiment::run_grid` sweeps the full
//! quality grid; the `simulate`, `tracker`, and `metrics` modules are
//! equally usable on their own, and `mot_io` speaks the usual
//! ten-column text format for interchange.

pub mod assignment;
pub mod bbox;
pub mod config;
pub mod detection;
pub mod ecc;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod mot_io;
pub mod motion;
pub mod seeding;
pub mod simulate;
pub mod table;
pub mod tracker;

pub use error::{Error, Result};
