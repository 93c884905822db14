//! Vertex-weighted exponential random graph model on `{0,1}^n`.
//!
//! The sums over `i ≠ j` and `i ≠ j ≠ k` run over ordered tuples of distinct
//! indices, so `H` depends on `S = Σ σ_i` only:
//! `H = β_1 S(S-1)/n + β_2 S(S-1)(S-2)/n^2 + log(p/(1-p)) S`.

use serde::Serialize;

use super::ergm::sigmoid;
use crate::error::{Error, Result};
use crate::spin::SpinSystem;
use crate::weakdep::AnalyticJ;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VwErgmParams {
    pub n: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub p: f64,
}

impl VwErgmParams {
    pub fn new(n: usize, beta1: f64, beta2: f64, p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParams(format!("p = {p} not in (0,1)")));
        }
        if n < 1 || !beta1.is_finite() || !beta2.is_finite() {
            return Err(Error::InvalidParams("need n >= 1 and finite betas".into()));
        }
        Ok(VwErgmParams { n, beta1, beta2, p })
    }

    pub fn logit(&self) -> f64 {
        (self.p / (1.0 - self.p)).ln()
    }

    /// `H` as a function of the number of occupied sites.
    pub fn hamiltonian_of_sum(&self, s: usize) -> f64 {
        let n = self.n as f64;
        let s = s as f64;
        self.beta1 * s * (s - 1.0) / n + self.beta2 * s * (s - 1.0) * (s - 2.0) / (n * n) + self.logit() * s
    }

    /// `∂_e H` when the other sites hold `s` ones:
    /// `2β_1 s/n + 3β_2 s(s-1)/n^2 + log(p/(1-p))`.
    pub fn local_field(&self, s: usize) -> f64 {
        let n = self.n as f64;
        let s = s as f64;
        2.0 * self.beta1 * s / n + 3.0 * self.beta2 * s * (s - 1.0) / (n * n) + self.logit()
    }

    /// `h(x) = β_1 x + β_2 x^2 + log(p/(1-p))`.
    pub fn h(&self, x: f64) -> f64 {
        self.beta1 * x + self.beta2 * x * x + self.logit()
    }

    /// `φ_β(x) = e^{h(x)} / (1 + e^{h(x)})`.
    pub fn phi(&self, x: f64) -> f64 {
        sigmoid(self.h(x))
    }

    pub fn phi_derivative(&self, x: f64) -> f64 {
        let s = self.phi(x);
        s * (1.0 - s) * (self.beta1 + 2.0 * self.beta2 * x)
    }

    /// `sup_{x∈(0,1)} |φ'_β(x)|` and whether it is below 1.
    pub fn condition(&self) -> (f64, bool) {
        let sup = sup_abs(|x| self.phi_derivative(x), 0.0, 1.0);
        (sup, sup < 1.0)
    }

    /// Derivative of `σ ∘ g_n` where `g_n(λ) = local_field(nλ)` extended to reals.
    fn finite_n_derivative(&self, lambda: f64) -> f64 {
        let n = self.n as f64;
        let g = 2.0 * self.beta1 * lambda + 3.0 * self.beta2 * lambda * lambda
            - 3.0 * self.beta2 * lambda / n
            + self.logit();
        let dg = 2.0 * self.beta1 + 6.0 * self.beta2 * lambda - 3.0 * self.beta2 / n;
        let s = sigmoid(g);
        s * (1.0 - s) * dg
    }

    /// Dense interdependence bound `J_{fe} = n^{-1} sup_{[0,1]} |(σ ∘ g_n)'|`.
    pub fn analytic_interdependence(&self) -> AnalyticJ {
        let sup = sup_abs(|x| self.finite_n_derivative(x), 0.0, 1.0);
        AnalyticJ::Dense {
            size: self.n,
            value: sup / self.n as f64,
        }
    }

    /// Exact interdependence entry, `max_s |σ(∂H(s+1)) - σ(∂H(s))|` over
    /// the number `s` of ones among the remaining `n-2` sites.
    pub fn exact_interdependence_entry(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (0..=self.n - 2)
            .map(|s| (sigmoid(self.local_field(s + 1)) - sigmoid(self.local_field(s))).abs())
            .fold(0.0, f64::max)
    }

    /// `α_1 = 1/(1 + e^{max_s |∂H(s)|})`.
    pub fn analytic_alpha1(&self) -> f64 {
        let b = (0..self.n)
            .map(|s| self.local_field(s).abs())
            .fold(0.0, f64::max);
        sigmoid(-b)
    }

    /// Law of `S`, computed in `O(n)` from the order-parameter form.
    pub fn sum_distribution(&self) -> Vec<f64> {
        let logs: Vec<f64> = (0..=self.n)
            .map(|s| log_binomial(self.n, s) + self.hamiltonian_of_sum(s))
            .collect();
        crate::spin::normalize_log_weights(&logs).expect("finite weights")
    }

    pub fn system(&self) -> SpinSystem {
        let params = self.clone();
        SpinSystem::new(
            format!("vw-ergm(n={}, b1={}, b2={}, p={})", self.n, self.beta1, self.beta2, self.p),
            self.n,
            2,
            move |x| params.hamiltonian_of_sum(x.iter().filter(|&&s| s != 0).count()),
        )
    }
}

fn log_binomial(n: usize, k: usize) -> f64 {
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// `sup_{[a,b]} |f|` by a `10^5`-point grid followed by golden-section
/// refinement around the best grid points (tolerance `1e-9`).
pub fn sup_abs<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    const GRID: usize = 100_000;
    let step = (b - a) / GRID as f64;
    let vals: Vec<f64> = (0..=GRID).map(|k| f(a + k as f64 * step).abs()).collect();
    let mut best = vals.iter().copied().fold(0.0, f64::max);
    // refine at every local maximum of the grid
    for k in 0..=GRID {
        let left = if k > 0 { vals[k - 1] } else { f64::NEG_INFINITY };
        let right = if k < GRID { vals[k + 1] } else { f64::NEG_INFINITY };
        if vals[k] >= left && vals[k] >= right && vals[k] > 0.0 {
            let lo = (a + (k as f64 - 1.0) * step).max(a);
            let hi = (a + (k as f64 + 1.0) * step).min(b);
            best = best.max(golden_max(|x| f(x).abs(), lo, hi, 1e-9));
        }
    }
    best
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2).max(f(lo)).max(f(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::models::ergm::ErgmParams;

    #[test]
    fn zero_interaction_holds() {
        let m = VwErgmParams::new(10, 0.0, 0.0, 0.3).unwrap();
        let (sup, holds) = m.condition();
        assert_eq!(sup, 0.0);
        assert!(holds);
    }

    #[test]
    fn strong_interaction_fails() {
        let m = VwErgmParams::new(10, 10.0, 0.0, 0.5).unwrap();
        let (sup, holds) = m.condition();
        assert!((sup - 2.5).abs() < 1e-8, "{sup}");
        assert!(!holds);
    }

    #[test]
    fn matches_edge_two_star_triangle_ergm() {
        let m = VwErgmParams::new(10, 0.8, -0.6, 0.3).unwrap();
        let ergm = ErgmParams::new(
            10,
            vec![m.logit() / 2.0, m.beta1 / 4.0, m.beta2 / 6.0],
            vec![Graph::complete(2), Graph::star(2), Graph::complete(3)],
        )
        .unwrap();
        for k in 0..=1000 {
            let x = k as f64 / 1000.0;
            assert!((m.phi(x) - ergm.phi(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn local_field_is_hamiltonian_difference() {
        let m = VwErgmParams::new(7, 0.9, -1.3, 0.4).unwrap();
        for s in 0..7 {
            let d = m.hamiltonian_of_sum(s + 1) - m.hamiltonian_of_sum(s);
            assert!((d - m.local_field(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_entry_dominates_exact() {
        for &(b1, b2) in &[(0.5, 0.3), (-1.0, 0.8), (2.0, -1.5), (0.0, 3.0)] {
            for n in [2, 3, 5, 10, 40] {
                let m = VwErgmParams::new(n, b1, b2, 0.35).unwrap();
                let AnalyticJ::Dense { value, .. } = m.analytic_interdependence() else {
                    panic!()
                };
                assert!(m.exact_interdependence_entry() <= value + 1e-12);
            }
        }
    }

    #[test]
    fn sum_distribution_matches_enumeration() {
        let m = VwErgmParams::new(6, 0.7, -0.4, 0.6).unwrap();
        let e = m.system().enumerate().unwrap();
        let mut by_sum = [0.0; 7];
        for (x, p) in e.support_list() {
            by_sum[x.as_slice().iter().filter(|&&s| s == 1).count()] += p;
        }
        for (a, b) in by_sum.iter().zip(m.sum_distribution()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
