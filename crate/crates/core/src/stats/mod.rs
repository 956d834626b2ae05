//! Post-processing of raw JND samples.

mod grubbs;
mod jb_table;
mod normality;
mod postprocess;
mod screening;

pub use grubbs::{grubbs_critical, grubbs_filter, grubbs_statistic, GrubbsOutcome};
pub use normality::{beta2_check, jarque_bera, jb_critical, jb_statistic, Beta2Result, NormalityResult};
pub use postprocess::{
    postprocess, OutlierReport, PostprocessConfig, RemovedSample, RemovedSubject, SampleReason, SubjectReason,
};
pub use screening::{
    classify, dispersion, flag_unreliable, invalid_range_subjects, zscore_report, ScreeningOutcome, Verdict,
    ZScoreReport,
};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation with the `n - 1` denominator. Zero for fewer than two values.
pub fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    libm::sqrt(ss / (xs.len() - 1) as f64)
}

/// Biased (`1/n`) central moments `(m2, m3, m4)`.
pub fn central_moments(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let m = mean(xs);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

/// Sample skewness and (non-excess) kurtosis from biased moments, or `None` for
/// zero variance.
pub fn skewness_kurtosis(xs: &[f64]) -> Option<(f64, f64)> {
    let (m2, m3, m4) = central_moments(xs);
    if m2 <= 0.0 || !m2.is_finite() {
        return None;
    }
    Some((m3 / libm::pow(m2, 1.5), m4 / (m2 * m2)))
}
