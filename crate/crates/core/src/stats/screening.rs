//! Subject screening: the invalid-range rule and z-score consistency.

use alloc::vec::Vec;

use super::{mean, sample_sd};
use crate::dataset::{Cell, SampleMatrix, SequenceId};
use crate::qp::Qp;

/// QPs whose clips are the lossless source; a JND there is impossible.
const INVALID_JND: core::ops::RangeInclusive<u8> = 1..=7;

/// Subjects that reported an uncensored JND inside the lossless range `[1, 7]`.
pub fn invalid_range_subjects(samples: &SampleMatrix) -> Vec<u32> {
    (0..samples.subject_count())
        .filter(|&row| {
            samples
                .row(row)
                .iter()
                .any(|c| c.observed().is_some_and(|qp| INVALID_JND.contains(&qp.get())))
        })
        .map(|row| samples.subjects()[row])
        .collect()
}

/// Per-sequence mean and SD, the z-score matrix and per-subject dispersion.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ZScoreReport {
    pub subjects: Vec<u32>,
    pub sequences: Vec<SequenceId>,
    /// `NaN` for a sequence without observed samples.
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    /// Sequences with zero (or undefined) SD; their z-scores are all zero.
    pub degenerate: Vec<bool>,
    /// Row-major subject × sequence; `None` where no sample was observed.
    pub z: Vec<Option<f64>>,
    /// `max(z) - min(z)` over each subject's observed z-scores.
    pub range: Vec<f64>,
    /// Sample SD of each subject's observed z-scores.
    pub dispersion: Vec<f64>,
}

impl ZScoreReport {
    pub fn z(&self, row: usize, col: usize) -> Option<f64> {
        self.z[row * self.sequences.len() + col]
    }

    pub fn subject_z(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let n = self.sequences.len();
        self.z[row * n..(row + 1) * n]
            .iter()
            .enumerate()
            .filter_map(|(col, z)| z.map(|z| (col, z)))
    }
}

/// Range and sample SD of one subject's z-score vector. Both zero when empty.
pub fn dispersion(zs: &[f64]) -> (f64, f64) {
    if zs.is_empty() {
        return (0.0, 0.0);
    }
    let (lo, hi) = zs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &z| {
        (lo.min(z), hi.max(z))
    });
    (hi - lo, sample_sd(zs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Keep,
    /// Range and SD both above their limits.
    Remove,
    /// Range above its limit, SD within: drop the most extreme sample only.
    Rescue,
}

pub fn classify(range: f64, dispersion: f64, r_max: f64, d_max: f64) -> Verdict {
    match (range > r_max, dispersion > d_max) {
        (true, true) => Verdict::Remove,
        (true, false) => Verdict::Rescue,
        _ => Verdict::Keep,
    }
}

pub fn zscore_report(samples: &SampleMatrix) -> ZScoreReport {
    let (rows, cols) = (samples.subject_count(), samples.sequence_count());
    let mut mu = Vec::with_capacity(cols);
    let mut sd = Vec::with_capacity(cols);
    let mut degenerate = Vec::with_capacity(cols);
    for col in 0..cols {
        let xs: Vec<f64> = samples
            .observed_in_column(col)
            .iter()
            .map(|(_, qp)| qp.as_f64())
            .collect();
        let m = if xs.is_empty() { f64::NAN } else { mean(&xs) };
        let s = sample_sd(&xs);
        mu.push(m);
        sd.push(s);
        degenerate.push(s.is_nan() || s <= 0.0);
    }
    let mut z = Vec::with_capacity(rows * cols);
    for row in 0..rows {
        for col in 0..cols {
            z.push(samples.get(row, col).observed().map(|qp| {
                if degenerate[col] {
                    0.0
                } else {
                    (qp.as_f64() - mu[col]) / sd[col]
                }
            }));
        }
    }
    let mut report = ZScoreReport {
        subjects: samples.subjects().to_vec(),
        sequences: samples.sequences().to_vec(),
        mean: mu,
        sd,
        degenerate,
        z,
        range: Vec::with_capacity(rows),
        dispersion: Vec::with_capacity(rows),
    };
    for row in 0..rows {
        let zs: Vec<f64> = report.subject_z(row).map(|(_, z)| z).collect();
        let (r, d) = dispersion(&zs);
        report.range.push(r);
        report.dispersion.push(d);
    }
    report
}

/// Outcome of z-score consistency screening.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreeningOutcome {
    /// Subjects with both a large range and a large SD, with `(R, D)` at removal time.
    pub removed: Vec<(u32, f64, f64)>,
    /// Single samples dropped from subjects whose range was large but SD small,
    /// with the absolute z-score at removal time.
    pub rescued: Vec<(u32, SequenceId, Qp, f64)>,
    pub retained: SampleMatrix,
}

/// Removes subjects whose z-score range exceeds `r_max` and whose z-score SD exceeds
/// `d_max`. A subject with a large range but small SD instead loses its single
/// most extreme sample (at most once). After the first wave the z-scores are
/// recomputed and the rule is applied one more time.
pub fn flag_unreliable(samples: &SampleMatrix, r_max: f64, d_max: f64) -> ScreeningOutcome {
    let mut retained = samples.clone();
    let mut removed = Vec::new();
    let mut rescued: Vec<(u32, SequenceId, Qp, f64)> = Vec::new();
    for _wave in 0..2 {
        let report = zscore_report(&retained);
        let mut drop_rows = Vec::new();
        let mut drop_cells = Vec::new();
        for row in 0..retained.subject_count() {
            let subject = retained.subjects()[row];
            let (r, d) = (report.range[row], report.dispersion[row]);
            if removed.iter().any(|&(s, _, _)| s == subject) {
                continue;
            }
            let verdict = classify(r, d, r_max, d_max);
            if verdict == Verdict::Remove {
                removed.push((subject, r, d));
                drop_rows.push(row);
            } else if verdict == Verdict::Rescue && !rescued.iter().any(|&(s, ..)| s == subject) {
                // Largest |z|; ties go to the larger QP.
                let pick = report
                    .subject_z(row)
                    .map(|(col, z)| {
                        (
                            col,
                            z.abs(),
                            retained.get(row, col).observed().expect("z implies observed"),
                        )
                    })
                    .fold(None::<(usize, f64, Qp)>, |best, cand| match best {
                        Some(b) if b.1 > cand.1 || (b.1 == cand.1 && b.2 >= cand.2) => Some(b),
                        _ => Some(cand),
                    });
                if let Some((col, z, qp)) = pick {
                    rescued.push((subject, retained.sequences()[col], qp, z));
                    drop_cells.push((row, col));
                }
            }
        }
        if drop_rows.is_empty() && drop_cells.is_empty() {
            break;
        }
        for row in drop_rows {
            for col in 0..retained.sequence_count() {
                retained.set(row, col, Cell::Missing);
            }
        }
        for (row, col) in drop_cells {
            retained.set(row, col, Cell::Missing);
        }
    }
    ScreeningOutcome {
        removed,
        rescued,
        retained,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Resolution;

    fn matrix(rows: &[&[i64]]) -> SampleMatrix {
        let seqs = (0..rows[0].len() as u32)
            .map(|c| SequenceId::new(c, Resolution::P1080))
            .collect();
        let mut m = SampleMatrix::new((1..=rows.len() as u32).collect(), seqs);
        for (r, vals) in rows.iter().enumerate() {
            for (c, &v) in vals.iter().enumerate() {
                m.set(r, c, Cell::Observed(Qp::new(v).unwrap()));
            }
        }
        m
    }

    #[test]
    fn invalid_range_examples() {
        let m = matrix(&[&[30, 31, 29], &[5, 30, 31], &[1, 28, 27], &[8, 47, 30]]);
        assert_eq!(invalid_range_subjects(&m), [2, 3]);
        let clean = matrix(&[&[8, 47], &[20, 30]]);
        assert!(invalid_range_subjects(&clean).is_empty());
    }

    #[test]
    fn middle_sample_has_zero_z() {
        let report = zscore_report(&matrix(&[&[25], &[27], &[29]]));
        assert_eq!(report.z(1, 0), Some(0.0));
        assert_eq!(report.mean[0], 27.0);
        assert_eq!(report.sd[0], 2.0);
        assert_eq!(report.z(0, 0), Some(-1.0));
    }

    #[test]
    fn constant_column_is_degenerate() {
        let report = zscore_report(&matrix(&[&[30, 20], &[30, 25], &[30, 24]]));
        assert!(report.degenerate[0] && !report.degenerate[1]);
        assert!((0..3).all(|r| report.z(r, 0) == Some(0.0)));
    }

    #[test]
    fn dispersion_examples() {
        let (r, d) = dispersion(&[0.5, -0.5]);
        assert_eq!(r, 1.0);
        assert!((d - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(classify(4.2, 1.1, 3.5, 0.75), Verdict::Remove);
        assert_eq!(classify(0.8, 0.2, 3.5, 0.75), Verdict::Keep);
        assert_eq!(classify(3.8, 0.4, 3.5, 0.75), Verdict::Rescue);
    }

    #[test]
    fn dispersion_from_matrix() {
        let m = matrix(&[&[31, 29], &[29, 31], &[30, 30], &[30, 30]]);
        let report = zscore_report(&m);
        // sd of each column = sqrt(2/3); z for subject 1 = (1/sqrt(2/3), -1/sqrt(2/3)).
        let zs: Vec<f64> = report.subject_z(0).map(|(_, z)| z).collect();
        let expect_r = zs[0] - zs[1];
        assert!((report.range[0] - expect_r).abs() < 1e-12);
        assert!((report.dispersion[0] - expect_r / libm::sqrt(2.0)).abs() < 1e-12);
    }

    #[test]
    fn columns_are_standardized() {
        let m = matrix(&[
            &[20, 30, 41],
            &[25, 33, 40],
            &[22, 38, 44],
            &[31, 29, 39],
            &[28, 35, 47],
        ]);
        let report = zscore_report(&m);
        for col in 0..3 {
            let zs: Vec<f64> = (0..5).filter_map(|r| report.z(r, col)).collect();
            assert!(mean(&zs).abs() < 1e-9);
            assert!((sample_sd(&zs) - 1.0).abs() < 1e-9);
        }
    }
}
