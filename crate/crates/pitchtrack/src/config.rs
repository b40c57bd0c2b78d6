//! TOML run configuration. Every section and field is optional and
//! falls back to its default; unknown keys are rejected so a typo
//! cannot silently deactivate itself.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ecc::EccParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub n_tracks: usize,
    pub n_frames: u32,
    pub fps: f64,
    /// Pitch extent in meters.
    pub pitch_length: f64,
    pub pitch_width: f64,
    pub image_width: u32,
    pub image_height: u32,
    pub px_per_meter: f64,
    /// Player speed cap in meters per second.
    pub max_speed: f64,
    /// 0 freezes the camera; 1 follows the player centroid tightly.
    pub camera_gain: f64,
    /// Fraction of waypoint choices that deliberately target another
    /// player's position, producing close passes and overlaps.
    pub occlusion_bias: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_tracks: 32,
            n_frames: 462,
            fps: 30.0,
            pitch_length: 105.0,
            pitch_width: 68.0,
            image_width: 960,
            image_height: 540,
            // Wide tactical framing: the view covers the whole pitch, so
            // every player stays in frame and track coverage is governed
            // by detection quality rather than the crop.
            px_per_meter: 8.0,
            max_speed: 8.0,
            camera_gain: 0.8,
            occlusion_bias: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
pub enum MotionModel {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "cva")]
    Cva,
    #[serde(rename = "cmc")]
    Cmc,
    #[serde(rename = "cva+cmc")]
    CvaCmc,
}

impl MotionModel {
    pub fn uses_cva(self) -> bool {
        matches!(self, MotionModel::Cva | MotionModel::CvaCmc)
    }

    pub fn uses_cmc(self) -> bool {
        matches!(self, MotionModel::Cmc | MotionModel::CvaCmc)
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(MotionModel::None),
            "cva" => Ok(MotionModel::Cva),
            "cmc" => Ok(MotionModel::Cmc),
            "cva+cmc" => Ok(MotionModel::CvaCmc),
            other => Err(Error::Config(format!(
                "unknown motion model '{other}', expected none, cva, cmc or cva+cmc"
            ))),
        }
    }
}

impl fmt::Display for MotionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MotionModel::None => "none",
            MotionModel::Cva => "cva",
            MotionModel::Cmc => "cmc",
            MotionModel::CvaCmc => "cva+cmc",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackerConfig {
    /// Tracks whose refined score falls below this are deactivated.
    pub sigma_active: f64,
    /// Minimum detection confidence to start a new track.
    pub lambda_new: f64,
    /// A detection overlapping any active track above this cannot
    /// start a new track.
    pub lambda_new_iou: f64,
    /// Minimum IoU between the predicted box and a detection for the
    /// track to snap onto it.
    pub tau_refine: f64,
    /// Score multiplier per frame while a track coasts unrefined.
    pub gamma_decay: f64,
    /// Pairwise IoU above which the lower-scoring active track is
    /// suppressed.
    pub lambda_nms: f64,
    /// Frames a deactivated track remains eligible for revival.
    pub reid_patience: u32,
    /// Maximum embedding distance for revival.
    pub tau_reid: f64,
    pub reid_enabled: bool,
    pub motion: MotionModel,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            sigma_active: 0.5,
            lambda_new: 0.6,
            lambda_new_iou: 0.3,
            tau_refine: 0.3,
            // Fast enough that a track losing its detection parks within
            // a couple of frames instead of coasting into a twin spawn.
            gamma_decay: 0.5,
            lambda_nms: 0.6,
            reid_patience: 30,
            tau_reid: 0.7,
            reid_enabled: true,
            motion: MotionModel::Cva,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct EccConfig {
    pub max_iter: u32,
    pub tol: f64,
}

impl Default for EccConfig {
    fn default() -> Self {
        let p = EccParams::default();
        Self {
            max_iter: p.max_iter,
            tol: p.tol,
        }
    }
}

impl EccConfig {
    pub fn params(&self) -> EccParams {
        EccParams {
            max_iter: self.max_iter,
            tol: self.tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Seeds per grid cell; runs are paired across cells.
    pub seeds: u64,
    pub base_seed: u64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            seeds: 3,
            base_seed: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct AppConfig {
    pub scenario: ScenarioConfig,
    pub tracker: TrackerConfig,
    pub ecc: EccConfig,
    pub grid: GridConfig,
}

impl AppConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }
}
