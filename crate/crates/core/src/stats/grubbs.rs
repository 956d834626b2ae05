use alloc::vec::Vec;

use super::{mean, sample_sd};
use crate::error::{Error, Result};
use crate::special::student_t_upper_quantile;

/// Two-sided Grubbs critical value in SD units for `n` samples at level `alpha`:
/// `(n-1)/sqrt(n) * sqrt(t² / (n-2+t²))` with `t` the upper `alpha/(2n)` quantile
/// of Student's t at `n-2` degrees of freedom.
pub fn grubbs_critical(n: usize, alpha: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: n });
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::param("alpha", "must lie in [0, 1)"));
    }
    let nf = n as f64;
    if alpha == 0.0 {
        return Ok(f64::INFINITY);
    }
    let dof = nf - 2.0;
    let t = student_t_upper_quantile(alpha / (2.0 * nf), dof);
    if t.is_infinite() {
        return Ok((nf - 1.0) / libm::sqrt(nf));
    }
    let t2 = t * t;
    Ok((nf - 1.0) / libm::sqrt(nf) * libm::sqrt(t2 / (dof + t2)))
}

/// `max |x - mean| / sd` and the index attaining it. Ties go to the larger value.
/// `None` when the standard deviation is zero.
pub fn grubbs_statistic(xs: &[f64]) -> Option<(f64, usize)> {
    let sd = sample_sd(xs);
    if sd.is_nan() || sd <= 0.0 {
        return None;
    }
    let m = mean(xs);
    let mut best: Option<(f64, usize)> = None;
    for (i, &x) in xs.iter().enumerate() {
        let dev = (x - m).abs();
        best = match best {
            Some((d, j)) if d > dev || (d == dev && xs[j] >= x) => Some((d, j)),
            _ => Some((dev, i)),
        };
    }
    best.map(|(d, i)| (d / sd, i))
}

/// Result of iterative Grubbs filtering, as indices into the input.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GrubbsOutcome {
    pub kept: Vec<usize>,
    /// In removal order.
    pub removed: Vec<usize>,
}

/// Removes the most extreme sample while the Grubbs statistic exceeds the critical
/// value for the current sample size, then repeats.
pub fn grubbs_filter(xs: &[f64], alpha: f64) -> Result<GrubbsOutcome> {
    if xs.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: xs.len(),
        });
    }
    let mut kept: Vec<usize> = (0..xs.len()).collect();
    let mut removed = Vec::new();
    let mut values: Vec<f64> = xs.to_vec();
    while values.len() >= 3 {
        let Some((g, at)) = grubbs_statistic(&values) else {
            break;
        };
        if g <= grubbs_critical(values.len(), alpha)? {
            break;
        }
        removed.push(kept.remove(at));
        values.remove(at);
    }
    Ok(GrubbsOutcome { kept, removed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_values_match_tables() {
        assert!((grubbs_critical(30, 0.05).unwrap() - 2.9085).abs() < 5e-4);
        assert!((grubbs_critical(3, 0.05).unwrap() - 1.1543).abs() < 1e-3);
        assert!(grubbs_critical(2, 0.05).is_err());
    }

    #[test]
    fn critical_value_increases_with_n() {
        let mut prev = 0.0;
        for n in 3..200 {
            let g = grubbs_critical(n, 0.05).unwrap();
            assert!(g > prev, "n={n}");
            prev = g;
        }
    }

    #[test]
    fn planted_value_is_removed() {
        let xs = [10.0, 10.0, 11.0, 9.0, 10.0, 35.0];
        let out = grubbs_filter(&xs, 0.05).unwrap();
        assert_eq!(out.removed, [5]);
        assert_eq!(out.kept, [0, 1, 2, 3, 4]);
    }

    #[test]
    fn constant_set_is_untouched() {
        let out = grubbs_filter(&[7.0; 10], 0.05).unwrap();
        assert!(out.removed.is_empty());
        assert_eq!(out.kept.len(), 10);
    }

    #[test]
    fn tie_removes_larger_value() {
        let (_, at) = grubbs_statistic(&[0.0, 5.0, 5.0, 5.0, 10.0]).unwrap();
        assert_eq!(at, 4);
    }
}
