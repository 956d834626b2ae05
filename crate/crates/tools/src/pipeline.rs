//! The analysis steps behind the CLI, as functions over in-memory data.

use std::collections::BTreeMap;

use jnd_core::sim::{
    deterministic_comparison_counts, run_campaign, sample_population, CampaignResult, ComparisonCounts, LevelSpec,
    PopulationSpec, SequenceSpec,
};
use jnd_core::stats::{postprocess, OutlierReport, PostprocessConfig, RemovedSample, RemovedSubject};
use jnd_core::summary::{dataset_summary, SummaryReport};
use jnd_core::sur::{fit_gaussian, qp_for_target, sur_at, GaussianJnd};
use jnd_core::{Dataset, Procedure, Qp, Resolution, SearchConfig, SequenceId};
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::partition::synthetic_sets;

pub const DEFAULT_LEVEL_MEANS: [f64; 3] = [26.5, 30.5, 33.5];
pub const DEFAULT_LEVEL_SDS: [f64; 3] = [4.5, 4.0, 3.5];
pub const DEFAULT_CONSISTENCY: f64 = 0.9;
pub const DEFAULT_TARGET_P: f64 = 0.75;
pub const DEFAULT_NORMALITY_ALPHA: f64 = 0.05;

/// Population spec from config values, with defaults for anything unset.
pub fn population_spec(config: &Config, seed: u64) -> Result<PopulationSpec> {
    let means = config
        .level_means
        .clone()
        .unwrap_or_else(|| DEFAULT_LEVEL_MEANS.to_vec());
    let sds = config.level_sds.clone().unwrap_or_else(|| DEFAULT_LEVEL_SDS.to_vec());
    if means.len() != sds.len() || means.is_empty() {
        return Err(Error::Config(
            "level_means and level_sds need the same, non-zero length".into(),
        ));
    }
    let levels: Vec<LevelSpec> = means
        .iter()
        .zip(&sds)
        .map(|(&mean, &sd)| LevelSpec { mean, sd })
        .collect();
    let sequences = config.sequences.unwrap_or(14) as usize;
    let spec = PopulationSpec {
        subject_count: config.subjects.unwrap_or(32),
        sequences: synthetic_sets(sequences)
            .into_iter()
            .map(|id| SequenceSpec {
                id,
                levels: levels.clone(),
            })
            .collect(),
        lapse_rate: config.lapse_rate.unwrap_or(0.0),
        consistency: config.consistency.unwrap_or(DEFAULT_CONSISTENCY),
        master_seed: seed,
    };
    spec.validate()?;
    Ok(spec)
}

pub fn simulate(spec: &PopulationSpec, procedure: Procedure) -> Result<CampaignResult> {
    let population = sample_population(spec)?;
    let rounds = spec.sequences.first().map_or(0, |s| s.levels.len()) as u8;
    Ok(run_campaign(&population, procedure, rounds)?)
}

/// Outlier report of one JND level, without the retained matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelOutliers {
    pub jnd_index: u8,
    pub removed_subjects: Vec<RemovedSubject>,
    pub removed_samples: Vec<RemovedSample>,
    pub unanalyzable: Vec<SequenceId>,
}

impl LevelOutliers {
    fn new(jnd_index: u8, report: &OutlierReport) -> Self {
        LevelOutliers {
            jnd_index,
            removed_subjects: report.removed_subjects.clone(),
            removed_samples: report.removed_samples.clone(),
            unanalyzable: report.unanalyzable.clone(),
        }
    }
}

/// Runs the outlier pipeline on every level independently.
pub fn clean(dataset: &Dataset, config: &PostprocessConfig) -> Result<(Dataset, Vec<LevelOutliers>)> {
    let mut levels = BTreeMap::new();
    let mut reports = Vec::new();
    for (&k, matrix) in &dataset.levels {
        let report = postprocess(matrix, config)?;
        reports.push(LevelOutliers::new(k, &report));
        levels.insert(k, report.retained);
    }
    Ok((Dataset { levels }, reports))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub jnd_index: u8,
    pub content_id: u32,
    pub resolution: Resolution,
    pub n: usize,
    pub censored: usize,
    pub mean: f64,
    pub sd: f64,
}

impl FitRow {
    pub fn model(&self) -> Result<GaussianJnd> {
        Ok(GaussianJnd::new(self.mean, self.sd)?)
    }
}

/// Gaussian fit of every (level, sequence) with at least two observed samples.
pub fn fit(dataset: &Dataset) -> Vec<FitRow> {
    let mut rows = Vec::new();
    for (&k, matrix) in &dataset.levels {
        for (col, seq) in matrix.sequences().iter().enumerate() {
            let samples: Vec<Qp> = matrix.observed_in_column(col).into_iter().map(|(_, q)| q).collect();
            let Ok(model) = fit_gaussian(&samples) else {
                continue;
            };
            rows.push(FitRow {
                jnd_index: k,
                content_id: seq.content,
                resolution: seq.resolution,
                n: model.n,
                censored: matrix.censored_in_column(col),
                mean: model.mean,
                sd: model.sd,
            });
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurRow {
    pub jnd_index: u8,
    pub content_id: u32,
    pub resolution: Resolution,
    pub mean: f64,
    pub sd: f64,
    pub p: f64,
    pub qp: Qp,
}

pub fn sur_targets(fits: &[FitRow], p: f64) -> Result<Vec<SurRow>> {
    fits.iter()
        .map(|f| {
            Ok(SurRow {
                jnd_index: f.jnd_index,
                content_id: f.content_id,
                resolution: f.resolution,
                mean: f.mean,
                sd: f.sd,
                p,
                qp: qp_for_target(&f.model()?, p)?,
            })
        })
        .collect()
}

/// `(qp, SUR)` for every QP.
pub fn sur_table(model: &GaussianJnd) -> Vec<(Qp, f64)> {
    (0..=51)
        .map(|q| {
            let qp = Qp::new(q).expect("in range");
            (qp, sur_at(model, qp.as_f64()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub summary: SummaryReport,
    /// Noise-free comparison counts over all thresholds from `[0, 51]`.
    pub comparison_counts: Vec<ComparisonCounts>,
}

pub fn report(dataset: &Dataset, alpha: f64) -> Report {
    Report {
        summary: dataset_summary(dataset, alpha),
        comparison_counts: [Procedure::LegacyAggressive, Procedure::Robust]
            .into_iter()
            .map(|p| deterministic_comparison_counts(SearchConfig::full_range(p)))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let spec = population_spec(&Config::default(), 1).unwrap();
        assert_eq!(spec.subject_count, 32);
        assert_eq!(spec.sequences.len(), 14);
        assert_eq!(spec.sequences[0].levels.len(), 3);
    }

    #[test]
    fn mismatched_levels_rejected() {
        let config = Config {
            level_means: Some(vec![27.0, 31.0]),
            ..Config::default()
        };
        assert!(matches!(population_spec(&config, 1), Err(Error::Config(_))));
    }

    #[test]
    fn fit_covers_every_level() {
        let spec = population_spec(&Config::default(), 3).unwrap();
        let campaign = simulate(&spec, Procedure::Robust).unwrap();
        let fits = fit(&campaign.dataset);
        assert_eq!(fits.len(), 3 * 14);
        assert!(fits.iter().all(|f| f.n + f.censored == 32));
    }

    #[test]
    fn sur_table_is_monotone() {
        let t = sur_table(&GaussianJnd::new(30.5, 7.5).unwrap());
        assert_eq!(t.len(), 52);
        assert!(t.windows(2).all(|w| w[0].1 >= w[1].1));
    }
}
