//! Flat key-value configuration file (TOML syntax, no tables):
//!
//! ```toml
//! seed = 7
//! subjects = 32
//! sequences = 14
//! level_means = [26.5, 30.5, 33.5]
//! level_sds = [4.5, 4.0, 3.5]
//! ```
//!
//! Every key is optional; command-line flags take precedence.

use std::path::Path;

use jnd_core::stats::PostprocessConfig;
use jnd_core::Procedure;
use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    // Simulation.
    pub subjects: Option<usize>,
    pub sequences: Option<u32>,
    pub level_means: Option<Vec<f64>>,
    pub level_sds: Option<Vec<f64>>,
    pub lapse_rate: Option<f64>,
    pub consistency: Option<f64>,
    pub procedure: Option<Procedure>,
    // Post-processing and normality.
    pub screen_invalid_range: Option<bool>,
    pub r_max: Option<f64>,
    pub d_max: Option<f64>,
    pub grubbs_alpha: Option<f64>,
    pub normality_alpha: Option<f64>,
    // Partitioning.
    pub sets: Option<usize>,
    pub packages: Option<u32>,
    // SUR.
    pub target_p: Option<f64>,
    // Session service.
    pub clip_template: Option<String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn postprocess(&self) -> PostprocessConfig {
        let d = PostprocessConfig::default();
        PostprocessConfig {
            screen_invalid_range: self.screen_invalid_range.unwrap_or(d.screen_invalid_range),
            r_max: self.r_max.unwrap_or(d.r_max),
            d_max: self.d_max.unwrap_or(d.d_max),
            grubbs_alpha: self.grubbs_alpha.unwrap_or(d.grubbs_alpha),
        }
    }
}
