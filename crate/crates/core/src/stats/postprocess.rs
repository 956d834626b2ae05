use alloc::vec::Vec;

use super::grubbs::grubbs_filter;
use super::screening::{flag_unreliable, invalid_range_subjects};
use crate::dataset::{Cell, SampleMatrix, SequenceId};
use crate::error::Result;
use crate::qp::Qp;

/// Thresholds for the outlier pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PostprocessConfig {
    pub screen_invalid_range: bool,
    /// Subjects need a z-score range above this to be screened.
    pub r_max: f64,
    /// ...and a z-score SD above this to be removed outright.
    pub d_max: f64,
    /// Grubbs significance level; 0 disables the test.
    pub grubbs_alpha: f64,
}

impl Default for PostprocessConfig {
    fn default() -> Self {
        PostprocessConfig {
            screen_invalid_range: true,
            r_max: 3.5,
            d_max: 0.75,
            grubbs_alpha: 0.05,
        }
    }
}

impl PostprocessConfig {
    /// A configuration that removes nothing.
    pub fn disabled() -> Self {
        PostprocessConfig {
            screen_invalid_range: false,
            r_max: f64::INFINITY,
            d_max: f64::INFINITY,
            grubbs_alpha: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SubjectReason {
    InvalidRange,
    HighDispersion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SampleReason {
    SingleSampleRescue,
    Grubbs,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RemovedSubject {
    pub subject: u32,
    pub reason: SubjectReason,
    /// z-score range and SD at removal time; `None` for invalid-range removals.
    pub dispersion: Option<(f64, f64)>,
    pub samples: Vec<(SequenceId, Cell)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RemovedSample {
    pub subject: u32,
    pub sequence: SequenceId,
    pub qp: Qp,
    pub reason: SampleReason,
    /// `|z|` for a rescue, the Grubbs statistic `G` otherwise.
    pub statistic: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OutlierReport {
    pub removed_subjects: Vec<RemovedSubject>,
    pub removed_samples: Vec<RemovedSample>,
    /// Sequences left with fewer than three observed samples; Grubbs was skipped.
    pub unanalyzable: Vec<SequenceId>,
    pub retained: SampleMatrix,
}

fn strip_subject(m: &mut SampleMatrix, subject: u32) -> Vec<(SequenceId, Cell)> {
    let row = m.subject_index(subject).expect("subject comes from this matrix");
    let mut samples = Vec::new();
    for col in 0..m.sequence_count() {
        let cell = m.get(row, col);
        if cell.is_present() {
            samples.push((m.sequences()[col], cell));
            m.set(row, col, Cell::Missing);
        }
    }
    samples
}

/// Runs, in order: invalid-range subject removal, z-score screening with single
/// sample rescue, then per-sequence iterative Grubbs filtering.
pub fn postprocess(samples: &SampleMatrix, config: &PostprocessConfig) -> Result<OutlierReport> {
    let mut m = samples.clone();
    let mut removed_subjects = Vec::new();
    let mut removed_samples = Vec::new();

    if config.screen_invalid_range {
        for subject in invalid_range_subjects(&m) {
            let samples = strip_subject(&mut m, subject);
            removed_subjects.push(RemovedSubject {
                subject,
                reason: SubjectReason::InvalidRange,
                dispersion: None,
                samples,
            });
        }
    }

    let screening = flag_unreliable(&m, config.r_max, config.d_max);
    for &(subject, r, d) in &screening.removed {
        // Censored cells are not part of the z-scores but leave with the subject.
        let samples = strip_subject(&mut m, subject);
        removed_subjects.push(RemovedSubject {
            subject,
            reason: SubjectReason::HighDispersion,
            dispersion: Some((r, d)),
            samples,
        });
    }
    for &(subject, sequence, qp, z) in &screening.rescued {
        let row = m.subject_index(subject).expect("subject comes from this matrix");
        let col = m.sequence_index(sequence).expect("sequence comes from this matrix");
        m.set(row, col, Cell::Missing);
        removed_samples.push(RemovedSample {
            subject,
            sequence,
            qp,
            reason: SampleReason::SingleSampleRescue,
            statistic: z,
        });
    }

    let mut unanalyzable = Vec::new();
    for col in 0..m.sequence_count() {
        let observed = m.observed_in_column(col);
        if observed.len() < 3 {
            unanalyzable.push(m.sequences()[col]);
            continue;
        }
        let values: Vec<f64> = observed.iter().map(|(_, qp)| qp.as_f64()).collect();
        let outcome = grubbs_filter(&values, config.grubbs_alpha)?;
        // Statistic of each removal wave, recomputed on the shrinking set.
        let mut remaining = values.clone();
        let mut remaining_idx: Vec<usize> = (0..values.len()).collect();
        for idx in outcome.removed {
            let (g, _) = super::grubbs::grubbs_statistic(&remaining).expect("filter removed a sample");
            let pos = remaining_idx
                .iter()
                .position(|&i| i == idx)
                .expect("index still present");
            remaining.remove(pos);
            remaining_idx.remove(pos);
            let (row, qp) = observed[idx];
            m.set(row, col, Cell::Missing);
            removed_samples.push(RemovedSample {
                subject: m.subjects()[row],
                sequence: m.sequences()[col],
                qp,
                reason: SampleReason::Grubbs,
                statistic: g,
            });
        }
    }

    Ok(OutlierReport {
        removed_subjects,
        removed_samples,
        unanalyzable,
        retained: m,
    })
}
