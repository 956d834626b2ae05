//! Gaussian JND models and satisfied-user-ratio (SUR) curves.
//!
//! The SUR at a QP is the fraction of viewers whose JND lies above that QP, i.e.
//! who cannot tell the coded clip from the anchor. Under a Gaussian JND model it
//! is the standard-normal Q-function of the standardized QP.

use alloc::vec::Vec;

use crate::dataset::SequenceId;
use crate::error::{Error, Result};
use crate::qp::Qp;
use crate::special::{q_function, q_inverse};
use crate::stats::{mean, sample_sd};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussianJnd {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
    pub sequence: Option<SequenceId>,
    pub jnd_index: Option<u8>,
}

impl GaussianJnd {
    pub fn new(mean: f64, sd: f64) -> Result<Self> {
        if !mean.is_finite() || !sd.is_finite() || sd < 0.0 {
            return Err(Error::param("sd", "model needs a finite mean and a finite SD >= 0"));
        }
        Ok(GaussianJnd {
            mean,
            sd,
            n: 0,
            sequence: None,
            jnd_index: None,
        })
    }

    /// Zero-SD models are step functions.
    pub fn is_degenerate(&self) -> bool {
        self.sd == 0.0
    }

    pub fn with_origin(self, sequence: SequenceId, jnd_index: u8) -> Self {
        GaussianJnd {
            sequence: Some(sequence),
            jnd_index: Some(jnd_index),
            ..self
        }
    }
}

/// Sample mean and unbiased SD of uncensored samples.
pub fn fit_gaussian(samples: &[Qp]) -> Result<GaussianJnd> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let xs: Vec<f64> = samples.iter().map(|q| q.as_f64()).collect();
    Ok(GaussianJnd {
        mean: mean(&xs),
        sd: sample_sd(&xs),
        n: xs.len(),
        sequence: None,
        jnd_index: None,
    })
}

/// `Q((qp - mean) / sd)`. A degenerate model gives 1 below the mean, 0 above and
/// 0.5 at the mean.
pub fn sur_at(model: &GaussianJnd, qp: f64) -> f64 {
    if model.is_degenerate() {
        return match qp.partial_cmp(&model.mean) {
            Some(core::cmp::Ordering::Less) => 1.0,
            Some(core::cmp::Ordering::Greater) => 0.0,
            _ => 0.5,
        };
    }
    q_function((qp - model.mean) / model.sd)
}

/// Fraction of samples strictly above `qp`. Censored samples count as above.
pub fn empirical_sur(observed: &[Qp], censored: usize, qp: f64) -> Result<f64> {
    let total = observed.len() + censored;
    if total == 0 {
        return Err(Error::EmptySamples);
    }
    let above = observed.iter().filter(|q| q.as_f64() > qp).count() + censored;
    Ok(above as f64 / total as f64)
}

/// Largest integer QP whose modeled SUR is at least `p`:
/// `floor(mean + sd * Q⁻¹(p))`, clamped to `[0, 51]`.
pub fn qp_for_target(model: &GaussianJnd, p: f64) -> Result<Qp> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param("p", "target ratio must lie in (0, 1)"));
    }
    let raw = if model.is_degenerate() {
        model.mean
    } else {
        model.mean + model.sd * q_inverse(p)
    };
    let qp = libm::floor(raw).clamp(0.0, 51.0);
    Qp::new(qp as i64)
}

/// A SUR curve backed by either a Gaussian model or the raw samples.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SurCurve {
    Gaussian(GaussianJnd),
    Empirical { observed: Vec<Qp>, censored: usize },
}

impl SurCurve {
    pub fn empirical(mut observed: Vec<Qp>, censored: usize) -> Result<Self> {
        if observed.is_empty() && censored == 0 {
            return Err(Error::EmptySamples);
        }
        observed.sort_unstable();
        Ok(SurCurve::Empirical { observed, censored })
    }

    pub fn evaluate(&self, qp: f64) -> f64 {
        match self {
            SurCurve::Gaussian(model) => sur_at(model, qp),
            SurCurve::Empirical { observed, censored } => {
                empirical_sur(observed, *censored, qp).expect("constructor rejects empty curves")
            }
        }
    }

    /// The curve at every integer QP `0..=51`.
    pub fn tabulate(&self) -> Vec<(Qp, f64)> {
        (0..=51u8)
            .map(|v| (Qp::from_raw(v), self.evaluate(f64::from(v))))
            .collect()
    }
}
