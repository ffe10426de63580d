//! Small least-squares fits and bootstrap intervals.

use braidflow::mc::Seed;
use rand::Rng;
use serde::Serialize;

/// Coefficients of a polynomial fit and their covariance.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyFit {
    pub coefficients: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
}

impl PolyFit {
    pub fn std_error(&self, i: usize) -> f64 {
        self.covariance[i][i].max(0.0).sqrt()
    }
}

/// Weighted least squares for `y = sum_k c_k x^k`, `k <= degree`.
///
/// With `sigma` given, the covariance is `(X^T W X)^-1` for weights
/// `1 / sigma^2`; otherwise observations are unweighted and the covariance is
/// scaled by the residual variance.
pub fn poly_fit(x: &[f64], y: &[f64], sigma: Option<&[f64]>, degree: usize) -> Option<PolyFit> {
    let m = degree + 1;
    if x.len() != y.len() || x.len() < m {
        return None;
    }
    let w: Vec<f64> = match sigma {
        Some(s) => s.iter().map(|s| 1.0 / (s * s).max(1e-300)).collect(),
        None => vec![1.0; x.len()],
    };
    let mut a = vec![vec![0.0; m]; m];
    let mut rhs = vec![0.0; m];
    for ((xi, yi), wi) in x.iter().zip(y).zip(&w) {
        let pw: Vec<f64> = (0..m).map(|k| xi.powi(k as i32)).collect();
        for r in 0..m {
            rhs[r] += wi * pw[r] * yi;
            for c in 0..m {
                a[r][c] += wi * pw[r] * pw[c];
            }
        }
    }
    let inv = invert(a)?;
    let coefficients: Vec<f64> = (0..m).map(|r| (0..m).map(|c| inv[r][c] * rhs[c]).sum()).collect();
    let mut covariance = inv;
    if sigma.is_none() {
        let dof = x.len().saturating_sub(m).max(1) as f64;
        let rss: f64 = x
            .iter()
            .zip(y)
            .map(|(xi, yi)| {
                let f: f64 = coefficients.iter().enumerate().map(|(k, c)| c * xi.powi(k as i32)).sum();
                (yi - f).powi(2)
            })
            .sum();
        let s2 = rss / dof;
        for row in covariance.iter_mut() {
            for v in row.iter_mut() {
                *v *= s2;
            }
        }
    }
    Some(PolyFit { coefficients, covariance })
}

// Gauss-Jordan with partial pivoting
fn invert(mut a: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let m = a.len();
    let mut inv: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for k in 0..m {
            a[col][k] /= d;
            inv[col][k] /= d;
        }
        for r in 0..m {
            if r != col {
                let f = a[r][col];
                for k in 0..m {
                    a[r][k] -= f * a[col][k];
                    inv[r][k] -= f * inv[col][k];
                }
            }
        }
    }
    Some(inv)
}

/// A fitted constant with a 95% percentile bootstrap interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fitted {
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Percentile intervals for a vector-valued statistic of several groups of
/// observations, each group resampled with replacement independently.
pub fn bootstrap<F>(groups: &[Vec<f64>], resamples: usize, seed: Seed, stat: F) -> Vec<(f64, f64)>
where
    F: Fn(&[Vec<f64>]) -> Vec<f64>,
{
    let mut rng = seed.rng();
    let mut draws: Vec<Vec<f64>> = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let resampled: Vec<Vec<f64>> = groups
            .iter()
            .map(|g| (0..g.len()).map(|_| g[rng.gen_range(0..g.len())]).collect())
            .collect();
        draws.push(stat(&resampled));
    }
    let dims = draws.first().map_or(0, |d| d.len());
    (0..dims)
        .map(|k| {
            let mut v: Vec<f64> = draws.iter().map(|d| d[k]).filter(|x| x.is_finite()).collect();
            v.sort_by(f64::total_cmp);
            (quantile(&v, 0.025), quantile(&v, 0.975))
        })
        .collect()
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let pos = q * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_polynomials() {
        let x: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|x| 1.5 - 2.0 * x + 0.25 * x * x).collect();
        let f = poly_fit(&x, &y, None, 2).unwrap();
        for (c, e) in f.coefficients.iter().zip([1.5, -2.0, 0.25]) {
            assert!((c - e).abs() < 1e-9);
        }
        assert!(f.std_error(2) < 1e-9);
        let s = vec![0.1; 8];
        let f = poly_fit(&x, &y, Some(&s), 1).unwrap();
        assert!(f.std_error(1) > 0.0);
    }

    #[test]
    fn bootstrap_interval_covers_the_mean() {
        let g = vec![(0..200).map(|i| (i % 7) as f64).collect::<Vec<_>>()];
        let ci = bootstrap(&g, 200, Seed(1), |gs| vec![mean(&gs[0])]);
        let m = mean(&g[0]);
        assert!(ci[0].0 < m && m < ci[0].1);
    }

    #[test]
    fn quantiles() {
        assert_eq!(quantile(&[1.0, 2.0, 3.0], 0.5), 2.0);
        assert_eq!(quantile(&[1.0, 3.0], 0.25), 1.5);
        assert!(quantile(&[], 0.5).is_nan());
    }

    proptest::proptest! {
        #[test]
        fn weighted_line_fit_is_exact_on_lines(
            a in -10.0f64..10.0,
            b in -10.0f64..10.0,
            sig in proptest::collection::vec(0.01f64..5.0, 3..12),
        ) {
            let x: Vec<f64> = (0..sig.len()).map(|i| i as f64 * 0.7 - 1.0).collect();
            let y: Vec<f64> = x.iter().map(|x| a + b * x).collect();
            let f = poly_fit(&x, &y, Some(&sig), 1).unwrap();
            proptest::prop_assert!((f.coefficients[0] - a).abs() < 1e-8 * (1.0 + a.abs()));
            proptest::prop_assert!((f.coefficients[1] - b).abs() < 1e-8 * (1.0 + b.abs()));
        }

        #[test]
        fn quantiles_are_monotone_and_bounded(
            mut v in proptest::collection::vec(-1e3f64..1e3, 1..40),
            p in 0.0f64..1.0,
            q in 0.0f64..1.0,
        ) {
            v.sort_by(f64::total_cmp);
            let (lo, hi) = (p.min(q), p.max(q));
            proptest::prop_assert!(quantile(&v, lo) <= quantile(&v, hi));
            proptest::prop_assert!(v[0] <= quantile(&v, lo) && quantile(&v, hi) <= v[v.len() - 1]);
        }
    }
}
