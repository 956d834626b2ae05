use alloc::vec::Vec;

use super::subject::{LatentSubject, Population};
use crate::dataset::{Cell, Dataset, Record, SequenceId};
use crate::error::{Error, Result};
use crate::qp::Qp;
use crate::search::{anchor_from_samples, next_round_config, run_round, JndResult, Procedure, SearchConfig};

/// Per-round bookkeeping for one sequence and JND level.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoundSummary {
    pub sequence: SequenceId,
    pub jnd_index: u8,
    pub anchor: Qp,
    /// Comparison count of each subject, in subject-id order.
    pub comparisons: Vec<u32>,
    pub censored: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum HaltReason {
    /// Every sample of the previous level was censored; no anchor exists.
    AllCensored,
    /// The anchor reached QP 51.
    RangeExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HaltEntry {
    pub sequence: SequenceId,
    /// The level that could not be measured.
    pub jnd_index: u8,
    pub reason: HaltReason,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CampaignResult {
    pub dataset: Dataset,
    pub rounds: Vec<RoundSummary>,
    pub halted: Vec<HaltEntry>,
    /// Thresholds redrawn so that a subject's JND levels increase.
    pub monotonicity_redraws: usize,
}

impl CampaignResult {
    pub fn censored_count(&self) -> usize {
        self.rounds.iter().map(|r| r.censored).sum()
    }
}

/// Runs `jnd_rounds` JND levels for every sequence and subject.
///
/// Level 1 searches `[0, 51]`. Level `k + 1` searches `[anchor, 51]` where the
/// anchor is the first quartile of the group's uncensored level-`k` samples, and
/// is shared by all subjects. Before each later level, a subject's threshold is
/// redrawn if it does not lie above the subject's previous sample.
pub fn run_campaign(population: &Population, procedure: Procedure, jnd_rounds: u8) -> Result<CampaignResult> {
    if jnd_rounds == 0 {
        return Err(Error::param("jnd_rounds", "need at least one round"));
    }
    let spec = &population.spec;
    let mut subjects: Vec<LatentSubject> = population.subjects.clone();
    subjects.sort_by_key(LatentSubject::id);
    let mut records = Vec::new();
    let mut rounds = Vec::new();
    let mut halted = Vec::new();
    let mut redraws = 0;

    for seq in &spec.sequences {
        let mut config = SearchConfig::full_range(procedure);
        // Previous level's sample per subject: Some(qp) or None when censored.
        let mut previous: Vec<Option<Option<Qp>>> = alloc::vec![None; subjects.len()];
        for jnd_index in 1..=jnd_rounds {
            let level = spec.level(seq.id, jnd_index).ok_or(Error::MissingThreshold {
                sequence: seq.id,
                jnd_index,
            })?;
            let mut comparisons = Vec::with_capacity(subjects.len());
            let mut censored = 0;
            let mut found = Vec::with_capacity(subjects.len());
            for (subject, prev) in subjects.iter_mut().zip(previous.iter_mut()) {
                if let Some(prev) = *prev {
                    let floor = prev.map_or(f64::INFINITY, Qp::as_f64);
                    if subject.ensure_above(seq.id, jnd_index, floor, level, spec.consistency)? {
                        redraws += 1;
                    }
                }
                let mut failure = None;
                let outcome = run_round(config, |req| match subject.respond(seq.id, jnd_index, req) {
                    Ok(r) => r,
                    Err(e) => {
                        failure = Some(e);
                        crate::search::Response::Unnoticeable
                    }
                });
                if let Some(e) = failure {
                    return Err(e);
                }
                comparisons.push(outcome.comparisons);
                let cell = match outcome.result {
                    JndResult::Found(qp) => {
                        found.push(qp);
                        *prev = Some(Some(qp));
                        Cell::Observed(qp)
                    }
                    JndResult::NotFound => {
                        censored += 1;
                        *prev = Some(None);
                        Cell::Censored(config.end())
                    }
                };
                records.push(Record {
                    sequence: seq.id,
                    subject: subject.id(),
                    jnd_index,
                    cell,
                });
            }
            rounds.push(RoundSummary {
                sequence: seq.id,
                jnd_index,
                anchor: config.start(),
                comparisons,
                censored,
            });
            if jnd_index == jnd_rounds {
                break;
            }
            let next = jnd_index + 1;
            let Ok(anchor) = anchor_from_samples(&found, 0.25) else {
                halted.push(HaltEntry {
                    sequence: seq.id,
                    jnd_index: next,
                    reason: HaltReason::AllCensored,
                });
                break;
            };
            match next_round_config(anchor, procedure) {
                Ok(c) => config = c,
                Err(_) => {
                    halted.push(HaltEntry {
                        sequence: seq.id,
                        jnd_index: next,
                        reason: HaltReason::RangeExhausted,
                    });
                    break;
                }
            }
        }
    }

    Ok(CampaignResult {
        dataset: Dataset::from_records(records)?,
        rounds,
        halted,
        monotonicity_redraws: redraws,
    })
}

/// Mean and maximum comparison counts of one procedure.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonCounts {
    pub procedure: Procedure,
    pub rounds: usize,
    pub mean: f64,
    pub max: u32,
}

/// Comparison counts of a noise-free observer over every threshold
/// `t` in `[start + 1, end]`.
pub fn deterministic_comparison_counts(config: SearchConfig) -> ComparisonCounts {
    let (lo, hi) = (config.start().get() + 1, config.end().get());
    let counts: Vec<u32> = (lo..=hi)
        .map(|t| {
            run_round(config, |req| {
                if req.probe_qp.get() >= t {
                    crate::search::Response::Noticeable
                } else {
                    crate::search::Response::Unnoticeable
                }
            })
            .comparisons
        })
        .collect();
    ComparisonCounts {
        procedure: config.procedure(),
        rounds: counts.len(),
        mean: f64::from(counts.iter().sum::<u32>()) / counts.len() as f64,
        max: counts.iter().copied().max().unwrap_or(0),
    }
}

/// Recovery error and cost of one procedure at one lapse rate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RobustnessRow {
    pub lapse_rate: f64,
    pub procedure: Procedure,
    pub rounds: usize,
    /// Mean `|found - ceil(threshold)|`; a censored round counts as found at 51.
    pub mean_abs_error: f64,
    pub exact_rate: f64,
    pub mean_comparisons: f64,
    pub max_comparisons: u32,
}

/// Runs a first-JND round over `[0, 51]` for every subject and sequence, once per
/// lapse rate and procedure. Both procedures see identical response streams.
pub fn compare_procedures(population: &Population, noise_levels: &[f64]) -> Result<Vec<RobustnessRow>> {
    let mut rows = Vec::new();
    for &lapse in noise_levels {
        if !(0.0..0.5).contains(&lapse) {
            return Err(Error::param("noise_levels", "lapse rates must lie in [0, 0.5)"));
        }
        for procedure in [Procedure::Robust, Procedure::LegacyAggressive] {
            let config = SearchConfig::full_range(procedure);
            let (mut err_sum, mut exact, mut cmp_sum, mut cmp_max, mut n) = (0.0, 0usize, 0u64, 0u32, 0usize);
            for pristine in &population.subjects {
                let mut subject = pristine.clone();
                subject.set_lapse_rate(lapse)?;
                for seq in &population.spec.sequences {
                    let threshold = subject.threshold(seq.id, 1).ok_or(Error::MissingThreshold {
                        sequence: seq.id,
                        jnd_index: 1,
                    })?;
                    let truth = libm::ceil(threshold).min(51.0);
                    let outcome = run_round(config, |req| {
                        subject.respond(seq.id, 1, req).expect("threshold checked above")
                    });
                    let found = outcome.found().map_or(51.0, Qp::as_f64);
                    let err = (found - truth).abs();
                    err_sum += err;
                    exact += usize::from(err == 0.0);
                    cmp_sum += u64::from(outcome.comparisons);
                    cmp_max = cmp_max.max(outcome.comparisons);
                    n += 1;
                }
            }
            rows.push(RobustnessRow {
                lapse_rate: lapse,
                procedure,
                rounds: n,
                mean_abs_error: err_sum / n as f64,
                exact_rate: exact as f64 / n as f64,
                mean_comparisons: cmp_sum as f64 / n as f64,
                max_comparisons: cmp_max,
            });
        }
    }
    Ok(rows)
}
