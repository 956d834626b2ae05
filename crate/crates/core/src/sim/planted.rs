//! Planting known outliers into a clean sample matrix, for calibrating and
//! testing the screening pipeline.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::{Cell, SampleMatrix, SequenceId};
use crate::error::{Error, Result};
use crate::qp::Qp;
use crate::stats::{classify, mean, sample_sd, zscore_report, Verdict};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlantSpec {
    /// Subjects given one JND inside the lossless range `[1, 7]`.
    pub invalid_range: usize,
    /// Subjects whose samples get independent Gaussian noise of
    /// `dispersion_noise` column SDs.
    pub high_dispersion: usize,
    /// Subjects keeping their samples except one, moved so that z-score
    /// screening at `(r_max, d_max)` drops that sample and keeps the subject.
    pub rescue: usize,
    pub dispersion_noise: f64,
    pub r_max: f64,
    pub d_max: f64,
    pub seed: u64,
}

impl Default for PlantSpec {
    fn default() -> Self {
        PlantSpec {
            invalid_range: 3,
            high_dispersion: 3,
            rescue: 1,
            dispersion_noise: 2.0,
            r_max: 3.5,
            d_max: 0.75,
            seed: 0,
        }
    }
}

/// Which subjects were planted, and where.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlantedTruth {
    pub invalid_range: Vec<u32>,
    pub high_dispersion: Vec<u32>,
    pub rescue: Vec<(u32, SequenceId)>,
}

fn to_qp(x: f64, lo: u8) -> Qp {
    let v = libm::round(x).clamp(f64::from(lo), 51.0);
    Qp::new(v as i64).expect("clamped into range")
}

/// The `(column, QP)` for `row` that puts the subject in the rescue zone with
/// the widest margin, measured as screening sees the matrix: invalid-range
/// subjects already gone. The moved sample must carry the largest `|z|`.
fn rescue_sample(samples: &SampleMatrix, row: usize, invalid_rows: &[usize], spec: &PlantSpec) -> Option<(usize, Qp)> {
    let mut view = samples.clone();
    for &r in invalid_rows {
        for col in 0..view.sequence_count() {
            view.set(r, col, Cell::Missing);
        }
    }
    let mut best: Option<(f64, usize, Qp)> = None;
    for col in 0..view.sequence_count() {
        let original = view.get(row, col);
        for v in Qp::LOWEST_CODED.get()..=Qp::MAX.get() {
            let qp = Qp::new(v.into()).expect("in range");
            view.set(row, col, Cell::Observed(qp));
            let report = zscore_report(&view);
            let (range, dispersion) = (report.range[row], report.dispersion[row]);
            if classify(range, dispersion, spec.r_max, spec.d_max) != Verdict::Rescue {
                continue;
            }
            let extreme = report
                .subject_z(row)
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .map(|(c, _)| c);
            if extreme != Some(col) {
                continue;
            }
            let margin = (range - spec.r_max).min(spec.d_max - dispersion);
            if best.is_none_or(|(m, _, _)| margin > m) {
                best = Some((margin, col, qp));
            }
        }
        view.set(row, col, original);
    }
    best.map(|(_, col, qp)| (col, qp))
}

/// Overwrites rows of `samples` with planted outliers. Subjects are chosen by a
/// seeded shuffle; every chosen subject is distinct.
pub fn plant_outliers(samples: &mut SampleMatrix, spec: &PlantSpec) -> Result<PlantedTruth> {
    let needed = spec.invalid_range + spec.high_dispersion + spec.rescue;
    if needed > samples.subject_count() {
        return Err(Error::param("plant", "more planted subjects than rows"));
    }
    let cols = samples.sequence_count();
    let stats: Vec<(f64, f64)> = (0..cols)
        .map(|col| {
            let xs: Vec<f64> = samples
                .observed_in_column(col)
                .iter()
                .map(|(_, q)| q.as_f64())
                .collect();
            (mean(&xs), sample_sd(&xs))
        })
        .collect();
    if stats.iter().any(|(m, _)| !m.is_finite()) {
        return Err(Error::param("plant", "every sequence needs observed samples"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rows: Vec<usize> = (0..samples.subject_count()).collect();
    // Fisher-Yates.
    for i in (1..rows.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        rows.swap(i, j);
    }
    let mut chosen = rows.into_iter();
    let mut truth = PlantedTruth::default();

    let mut invalid_rows = Vec::new();
    for row in chosen.by_ref().take(spec.invalid_range) {
        invalid_rows.push(row);
        let col = (rng.next_u64() % cols as u64) as usize;
        let qp = Qp::new(1 + (rng.next_u64() % 7) as i64).expect("1..=7");
        samples.set(row, col, Cell::Observed(qp));
        truth.invalid_range.push(samples.subjects()[row]);
    }
    for row in chosen.by_ref().take(spec.high_dispersion) {
        for (col, &(mu, sd)) in stats.iter().enumerate() {
            let base = samples.get(row, col).observed().map_or(mu, Qp::as_f64);
            let e: f64 = StandardNormal.sample(&mut rng);
            samples.set(
                row,
                col,
                Cell::Observed(to_qp(base + spec.dispersion_noise * sd * e, 8)),
            );
        }
        truth.high_dispersion.push(samples.subjects()[row]);
    }
    // Rescue subjects are the next rows in shuffled order that admit a rescue.
    for _ in 0..spec.rescue {
        let (row, col, qp) = chosen
            .by_ref()
            .find_map(|row| rescue_sample(samples, row, &invalid_rows, spec).map(|(c, q)| (row, c, q)))
            .ok_or(Error::param(
                "rescue",
                "no remaining subject admits a single-sample rescue",
            ))?;
        samples.set(row, col, Cell::Observed(qp));
        truth.rescue.push((samples.subjects()[row], samples.sequences()[col]));
    }
    Ok(truth)
}
