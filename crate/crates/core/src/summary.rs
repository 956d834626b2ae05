//! Report tables over a post-processed dataset: per-sequence boxplot rows,
//! per-level histograms, mean/SD scatter pairs and normality pass rates.

use alloc::vec::Vec;

use crate::dataset::{Dataset, Resolution, SequenceId};
use crate::qp::Qp;
use crate::search::nearest_rank;
use crate::stats::{beta2_check, jarque_bera, mean, sample_sd};

/// Whiskers sit at this many SDs from the mean.
pub const WHISKER_SDS: f64 = 2.7;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoxplotRow {
    pub jnd_index: u8,
    pub sequence: SequenceId,
    pub n: usize,
    pub censored: usize,
    pub mean: f64,
    pub sd: f64,
    pub q1: Qp,
    pub median: Qp,
    pub q3: Qp,
    pub whisker_low: f64,
    pub whisker_high: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Histogram {
    pub jnd_index: u8,
    /// Count of observed samples at each QP `0..=51`.
    pub counts: Vec<u32>,
    pub censored: usize,
    /// Most frequent QP; ties go to the lower QP.
    pub mode: Option<Qp>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScatterPoint {
    pub resolution: Resolution,
    pub jnd_index: u8,
    pub sequence: SequenceId,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormalityRow {
    pub resolution: Resolution,
    pub jnd_index: u8,
    /// Sequences with enough samples for the test.
    pub tested: usize,
    pub jb_passed: usize,
    pub beta2_passed: usize,
    pub pass_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SummaryReport {
    pub boxplots: Vec<BoxplotRow>,
    pub histograms: Vec<Histogram>,
    pub scatter: Vec<ScatterPoint>,
    pub normality: Vec<NormalityRow>,
}

impl SummaryReport {
    /// Mean of all observed samples of one JND level.
    pub fn level_mean(&self, jnd_index: u8) -> Option<f64> {
        let h = self.histograms.iter().find(|h| h.jnd_index == jnd_index)?;
        let n: u32 = h.counts.iter().sum();
        if n == 0 {
            return None;
        }
        let total: f64 = h
            .counts
            .iter()
            .enumerate()
            .map(|(qp, &c)| qp as f64 * f64::from(c))
            .sum();
        Some(total / f64::from(n))
    }
}

pub fn dataset_summary(dataset: &Dataset, alpha: f64) -> SummaryReport {
    let mut report = SummaryReport::default();
    for (&jnd_index, m) in &dataset.levels {
        let mut counts = alloc::vec![0u32; 52];
        let mut censored_total = 0;
        let mut per_resolution: Vec<(Resolution, usize, usize, usize)> = Vec::new();
        for col in 0..m.sequence_count() {
            let sequence = m.sequences()[col];
            let mut qps: Vec<Qp> = m.observed_in_column(col).into_iter().map(|(_, qp)| qp).collect();
            let censored = m.censored_in_column(col);
            censored_total += censored;
            for qp in &qps {
                counts[usize::from(qp.get())] += 1;
            }
            if qps.is_empty() {
                continue;
            }
            qps.sort_unstable();
            let xs: Vec<f64> = qps.iter().map(|q| q.as_f64()).collect();
            let (mu, sd) = (mean(&xs), sample_sd(&xs));
            let rank = |p: f64| qps[nearest_rank(qps.len(), p) - 1];
            report.boxplots.push(BoxplotRow {
                jnd_index,
                sequence,
                n: qps.len(),
                censored,
                mean: mu,
                sd,
                q1: rank(0.25),
                median: rank(0.5),
                q3: rank(0.75),
                whisker_low: mu - WHISKER_SDS * sd,
                whisker_high: mu + WHISKER_SDS * sd,
            });
            report.scatter.push(ScatterPoint {
                resolution: sequence.resolution,
                jnd_index,
                sequence,
                mean: mu,
                sd,
            });
            let idx = match per_resolution.iter().position(|r| r.0 == sequence.resolution) {
                Some(i) => i,
                None => {
                    per_resolution.push((sequence.resolution, 0, 0, 0));
                    per_resolution.len() - 1
                }
            };
            if let Ok(jb) = jarque_bera(&xs, alpha) {
                let entry = &mut per_resolution[idx];
                entry.1 += 1;
                entry.2 += usize::from(jb.pass);
                entry.3 += usize::from(beta2_check(&xs).is_ok_and(|b| b.pass));
            } else if xs.len() >= 6 {
                // Zero variance: tested, and not normal.
                per_resolution[idx].1 += 1;
            }
        }
        let mode = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .fold(None::<(usize, u32)>, |best, (qp, &c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ => Some((qp, c)),
            })
            .map(|(qp, _)| Qp::from_raw(qp as u8));
        report.histograms.push(Histogram {
            jnd_index,
            counts,
            censored: censored_total,
            mode,
        });
        per_resolution.sort_by_key(|r| r.0);
        for (resolution, tested, jb_passed, beta2_passed) in per_resolution {
            report.normality.push(NormalityRow {
                resolution,
                jnd_index,
                tested,
                jb_passed,
                beta2_passed,
                pass_rate: if tested == 0 {
                    0.0
                } else {
                    jb_passed as f64 / tested as f64
                },
            });
        }
    }
    report
}
