//! Sample statistics used by the Monte Carlo reports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

/// Pairwise (fixed-order) summation.
pub fn sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    sum(&xs[..mid]) + sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    sum(xs) / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    sum(&sq) / (xs.len() - 1) as f64
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

/// Effective sample size from batch means with `batches` equal batches.
pub fn batch_means_ess(xs: &[f64], batches: usize) -> f64 {
    let n = xs.len();
    let b = batches.max(2);
    let size = n / b;
    if size < 2 {
        return n as f64;
    }
    let means: Vec<f64> = (0..b).map(|k| mean(&xs[k * size..(k + 1) * size])).collect();
    let var_batch = variance(&means);
    let var = variance(&xs[..b * size]);
    if var_batch <= 0.0 || !var_batch.is_finite() {
        return (b * size) as f64;
    }
    // asymptotic variance ≈ size · var(batch means)
    let tau = size as f64 * var_batch / var;
    ((b * size) as f64 / tau.max(1.0)).min((b * size) as f64)
}

/// Percentile bootstrap confidence interval for a statistic.
pub fn bootstrap_ci<F: Fn(&[f64]) -> f64>(
    xs: &[f64],
    stat: F,
    resamples: usize,
    level: f64,
    seed: u64,
) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = vec![0.0; xs.len()];
    let mut values: Vec<f64> = (0..resamples)
        .map(|_| {
            for b in buf.iter_mut() {
                *b = xs[rng.random_range(0..xs.len())];
            }
            stat(&buf)
        })
        .collect();
    values.sort_by(f64::total_cmp);
    let lo = ((1.0 - level) / 2.0 * resamples as f64).floor() as usize;
    let hi = (((1.0 + level) / 2.0 * resamples as f64).ceil() as usize).min(resamples) - 1;
    (values[lo.min(resamples - 1)], values[hi])
}

/// Kolmogorov–Smirnov distance between the empirical law of `xs` and `N(0,1)`.
pub fn ks_normal(xs: &[f64]) -> f64 {
    let normal = Normal::standard();
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Empirical 1-d Wasserstein distance between two equal-size samples
/// (mean absolute difference of sorted values).
pub fn wasserstein_two_sample(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "two-sample Wasserstein needs equal sizes");
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let d: Vec<f64> = x.iter().zip(&y).map(|(p, q)| (p - q).abs()).collect();
    mean(&d)
}

/// Wasserstein distance between the empirical law of `xs` and `N(0, v^2)`:
/// `∫ |F_n(t) - Φ(t/v)| dt`, computed exactly between sample points.
pub fn wasserstein_to_normal(xs: &[f64], v: f64) -> f64 {
    let normal = Normal::new(0.0, v).expect("positive scale");
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    // E|X - Y| type integral: split at sample points; on each interval F_n is constant
    let partial = |a: f64, b: f64, level: f64| -> f64 { integral_abs_cdf_minus(&normal, v, a, b, level) };
    let mut total = partial(f64::NEG_INFINITY, s[0], 0.0);
    for i in 0..s.len() - 1 {
        total += partial(s[i], s[i + 1], (i + 1) as f64 / n);
    }
    total + partial(s[s.len() - 1], f64::INFINITY, 1.0)
}

/// `∫_a^b |Φ(t) - c| dt` for a normal CDF `Φ`, via `∫Φ = tΦ(t) + σ^2 φ(t)`.
fn integral_abs_cdf_minus(normal: &Normal, sigma: f64, a: f64, b: f64, c: f64) -> f64 {
    use statrs::distribution::Continuous;
    let anti = |t: f64| -> f64 {
        if t == f64::NEG_INFINITY {
            return 0.0;
        }
        t * normal.cdf(t) + sigma * sigma * normal.pdf(t)
    };
    // G(t) = ∫_{-∞}^t (Φ - c) but the constant part diverges; work on finite pieces
    let seg = |lo: f64, hi: f64| -> f64 {
        // ∫_lo^hi (Φ(t) - c) dt for finite lo, hi, or c = 0 / c = 1 with infinite ends
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => anti(hi) - anti(lo) - c * (hi - lo),
            (false, true) => anti(hi), // c = 0
            (true, false) => {
                // c = 1: ∫_lo^∞ (Φ - 1) = -(σ^2 φ(lo) - lo (1 - Φ(lo)))
                -(sigma * sigma * normal.pdf(lo) - lo * (1.0 - normal.cdf(lo)))
            }
            (false, false) => 0.0,
        }
    };
    // crossing point where Φ(t) = c
    if c <= 0.0 || c >= 1.0 {
        return seg(a, b).abs();
    }
    let t0 = normal.inverse_cdf(c);
    if t0 <= a || t0 >= b {
        seg(a, b).abs()
    } else {
        seg(a, t0).abs() + seg(t0, b).abs()
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// `bins` equal-width bins spanning the sample range.
    pub fn new(xs: &[f64], bins: usize) -> Histogram {
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if lo < hi { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|k| lo + k as f64 * width).collect();
        let mut counts = vec![0u64; bins];
        for &x in xs {
            let k = (((x - lo) / width) as usize).min(bins - 1);
            counts[k] += 1;
        }
        Histogram { edges, counts }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_left,bin_right,count\n");
        for (k, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", self.edges[k], self.edges[k + 1], c));
        }
        out
    }
}

/// Empirical survival function `P(|X| ≥ t)` at the given levels.
pub fn survival(abs_values: &[f64], levels: &[f64]) -> Vec<f64> {
    let mut s = abs_values.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    levels
        .iter()
        .map(|&t| {
            let below = s.partition_point(|&x| x < t);
            (s.len() - below) as f64 / n
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((variance(&xs) - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ks_and_wasserstein_for_normal_samples() {
        let xs = normals(100_000, 1);
        assert!(ks_normal(&xs) < 0.01);
        assert!(wasserstein_to_normal(&xs, 1.0) < 0.02);
        assert!(wasserstein_to_normal(&xs, 2.0) > 0.5);
        assert_eq!(wasserstein_two_sample(&xs, &xs), 0.0);
    }

    #[test]
    fn wasserstein_point_mass() {
        // W(δ_0, N(0,1)) = E|Z| = sqrt(2/π)
        let w = wasserstein_to_normal(&[0.0], 1.0);
        assert!((w - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ess_of_iid_and_correlated() {
        let xs = normals(100_000, 2);
        let ess = batch_means_ess(&xs, 100);
        assert!(ess > 50_000.0, "{ess}");
        let mut ar = vec![0.0; 100_000];
        for i in 1..ar.len() {
            ar[i] = 0.95 * ar[i - 1] + xs[i];
        }
        let ess = batch_means_ess(&ar, 100);
        // integrated autocorrelation time (1 + ρ)/(1 - ρ) = 39
        assert!(ess > 1_500.0 && ess < 4_500.0, "{ess}");
    }

    #[test]
    fn histogram_counts() {
        let h = Histogram::new(&[0.0, 0.1, 0.9, 1.0], 2);
        assert_eq!(h.counts, vec![2, 2]);
        assert!(h.to_csv().starts_with("bin_left,bin_right,count\n"));
    }

    #[test]
    fn survival_levels() {
        assert_eq!(survival(&[1.0, 2.0, 3.0, 4.0], &[0.0, 2.5, 5.0]), vec![1.0, 0.5, 0.0]);
    }
}
