use super::jb_table::{JB_CRITICAL, JB_TABLE_ALPHAS, JB_TABLE_MAX_N, JB_TABLE_MIN_N};
use super::skewness_kurtosis;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormalityResult {
    pub jb: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub n: usize,
    pub alpha: f64,
    pub critical: f64,
    pub pass: bool,
}

/// Critical value of the Jarque-Bera statistic for sample size `n`.
///
/// Sizes up to 100 use a Monte-Carlo table at alpha 0.01, 0.05 or 0.10; larger
/// samples use the chi-square(2) quantile `-2 ln(alpha)` for any alpha.
pub fn jb_critical(n: usize, alpha: f64) -> Result<f64> {
    if n < JB_TABLE_MIN_N {
        return Err(Error::InsufficientSamples {
            needed: JB_TABLE_MIN_N,
            got: n,
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha", "must lie in (0, 1)"));
    }
    if n > JB_TABLE_MAX_N {
        return Ok(-2.0 * libm::log(alpha));
    }
    let col = JB_TABLE_ALPHAS
        .iter()
        .position(|&a| (a - alpha).abs() < 1e-12)
        .ok_or(Error::UnsupportedAlpha(alpha))?;
    Ok(JB_CRITICAL[n - JB_TABLE_MIN_N][col])
}

/// `JB = n/6 * (s² + (k-3)²/4)` with skewness and kurtosis from biased moments.
pub fn jb_statistic(xs: &[f64]) -> Option<(f64, f64, f64)> {
    let (s, k) = skewness_kurtosis(xs)?;
    let n = xs.len() as f64;
    Some((n / 6.0 * (s * s + (k - 3.0) * (k - 3.0) / 4.0), s, k))
}

/// Jarque-Bera test of normality. Zero-variance samples are a [`Error::DegenerateSample`].
pub fn jarque_bera(xs: &[f64], alpha: f64) -> Result<NormalityResult> {
    let critical = jb_critical(xs.len(), alpha)?;
    let (jb, skewness, kurtosis) = jb_statistic(xs).ok_or(Error::DegenerateSample)?;
    Ok(NormalityResult {
        jb,
        skewness,
        kurtosis,
        n: xs.len(),
        alpha,
        critical,
        pass: jb <= critical,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Beta2Result {
    /// `None` for a zero-variance sample.
    pub kurtosis: Option<f64>,
    pub degenerate: bool,
    pub pass: bool,
}

/// Kurtosis-range check: passes when `2 < k < 4`.
pub fn beta2_check(xs: &[f64]) -> Result<Beta2Result> {
    if xs.len() < 4 {
        return Err(Error::InsufficientSamples {
            needed: 4,
            got: xs.len(),
        });
    }
    Ok(match skewness_kurtosis(xs) {
        Some((_, k)) => Beta2Result {
            kurtosis: Some(k),
            degenerate: false,
            pass: k > 2.0 && k < 4.0,
        },
        None => Beta2Result {
            kurtosis: None,
            degenerate: true,
            pass: false,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jb_of_three_point_set() {
        let (jb, s, k) = jb_statistic(&[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(s, 0.0);
        assert!((k - 1.5).abs() < 1e-15);
        assert_eq!(jb, 0.28125);
    }

    #[test]
    fn jb_needs_six_samples() {
        assert!(matches!(
            jarque_bera(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.05),
            Err(Error::InsufficientSamples { needed: 6, got: 5 })
        ));
        assert_eq!(jarque_bera(&[3.0; 8], 0.05), Err(Error::DegenerateSample));
    }

    #[test]
    fn asymptotic_critical_above_table() {
        let c = jb_critical(500, 0.05).unwrap();
        assert!((c - 5.991_464_547_107_979).abs() < 1e-12);
        assert!(matches!(jb_critical(30, 0.2), Err(Error::UnsupportedAlpha(_))));
    }

    #[test]
    fn table_is_monotone_in_alpha() {
        for n in JB_TABLE_MIN_N..=JB_TABLE_MAX_N {
            let row = [0.01, 0.05, 0.10].map(|a| jb_critical(n, a).unwrap());
            assert!(row[0] > row[1] && row[1] > row[2], "n={n}: {row:?}");
        }
    }

    #[test]
    fn beta2_examples() {
        assert!(!beta2_check(&[-1.0, 0.0, 1.0, 0.0]).unwrap().pass);
        let degenerate = beta2_check(&[4.0; 6]).unwrap();
        assert!(degenerate.degenerate && !degenerate.pass);
        // Kurtosis exactly 3: {-a, 0 x4, a} has k = n/2 = 3 for n = 6.
        let r = beta2_check(&[-1.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((r.kurtosis.unwrap() - 3.0).abs() < 1e-12);
        assert!(r.pass);
        let mut heavy = [0.0, 1.0, -1.0, 0.5, -0.5, 0.2, -0.2, 0.1, -0.1, 0.0, 12.0];
        heavy.sort_by(f64::total_cmp);
        assert!(!beta2_check(&heavy).unwrap().pass);
    }
}
