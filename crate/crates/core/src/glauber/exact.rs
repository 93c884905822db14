//! Exact analysis of Glauber dynamics on enumerable systems: the transition
//! matrix `P`, the continuous-time semigroup `P_t = e^{t(P - I)}`, entropy and
//! Dirichlet form, mLSI and entropy-decay checks, and mixing times.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::expm;
use crate::spin::{Enumeration, Spin, SpinSystem};
use crate::weakdep::{entropy, tv, WeakDependenceCertificate};

/// Support sizes up to this use the symmetric eigendecomposition.
pub const EIGEN_CAP: usize = 4096;
/// Largest support handled at all (dense matrices).
pub const DENSE_CAP: usize = 6000;

/// Default mixing threshold `e^{-1}`.
pub fn default_threshold() -> f64 {
    (-1.0f64).exp()
}

pub struct ExactChain {
    enumeration: Enumeration,
    p: DMatrix<f64>,
    mu: Vec<f64>,
    sqrt_mu: Vec<f64>,
    eigen: Option<SymmetricEigen<f64, nalgebra::Dyn>>,
}

impl ExactChain {
    pub fn from_system(system: &SpinSystem) -> Result<Self> {
        ExactChain::new(system.enumerate()?)
    }

    pub fn new(enumeration: Enumeration) -> Result<Self> {
        let n = enumeration.len();
        if n > DENSE_CAP {
            return Err(Error::CapExceeded {
                states: n as f64,
                cap: DENSE_CAP as u64,
            });
        }
        let m = enumeration.num_sites();
        let q = enumeration.num_spins();
        let mut p = DMatrix::<f64>::zeros(n, n);
        for (a, &code) in enumeration.codes().iter().enumerate() {
            if m == 0 {
                p[(a, a)] = 1.0;
                continue;
            }
            for i in 0..m {
                let cond = enumeration
                    .conditional_at_code(code, i)
                    .expect("supported state has a defined conditional");
                for (s, &w) in cond.iter().enumerate().take(q) {
                    if w > 0.0 {
                        let target = enumeration.with_spin(code, i, s as Spin);
                        let b = enumeration
                            .support_index(target)
                            .expect("positive conditional implies support");
                        p[(a, b)] += w / m as f64;
                    }
                }
            }
        }
        let mu = enumeration.probabilities().to_vec();
        let sqrt_mu: Vec<f64> = mu.iter().map(|x| x.sqrt()).collect();
        let eigen = if n <= EIGEN_CAP {
            let mut s = DMatrix::<f64>::zeros(n, n);
            for a in 0..n {
                for b in 0..n {
                    s[(a, b)] = sqrt_mu[a] / sqrt_mu[b] * p[(a, b)];
                }
            }
            // symmetrize round-off
            let s = (&s + s.transpose()) * 0.5;
            Some(SymmetricEigen::new(s))
        } else {
            None
        };
        Ok(ExactChain {
            enumeration,
            p,
            mu,
            sqrt_mu,
            eigen,
        })
    }

    pub fn enumeration(&self) -> &Enumeration {
        &self.enumeration
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn stationary(&self) -> &[f64] {
        &self.mu
    }

    pub fn transition(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// `L = P - I`.
    pub fn generator(&self) -> DMatrix<f64> {
        &self.p - DMatrix::<f64>::identity(self.len(), self.len())
    }

    /// Largest deviation of a row sum from 1.
    pub fn stochasticity_error(&self) -> f64 {
        self.p
            .row_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `max |μ(x)P(x,y) - μ(y)P(y,x)|`.
    pub fn reversibility_error(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..a {
                worst = worst.max((self.mu[a] * self.p[(a, b)] - self.mu[b] * self.p[(b, a)]).abs());
            }
        }
        worst
    }

    /// Eigenvalues of `P` in decreasing order (requires the eigen path).
    pub fn eigenvalues(&self) -> Option<Vec<f64>> {
        self.eigen.as_ref().map(|e| {
            let mut v: Vec<f64> = e.eigenvalues.iter().copied().collect();
            v.sort_by(|a, b| b.total_cmp(a));
            v
        })
    }

    /// `1 - λ_2(P)`, the spectral gap of the generator.
    pub fn spectral_gap(&self) -> Option<f64> {
        self.eigenvalues()
            .map(|v| if v.len() > 1 { 1.0 - v[1] } else { 1.0 })
    }

    /// `P_t = e^{tL}` as a dense matrix.
    pub fn semigroup_matrix(&self, t: f64) -> Result<DMatrix<f64>> {
        check_time(t)?;
        match &self.eigen {
            Some(e) => {
                let n = self.len();
                let decay: Vec<f64> = e.eigenvalues.iter().map(|l| (t * (l - 1.0)).exp()).collect();
                let mut scaled = e.eigenvectors.clone();
                for (k, d) in decay.iter().enumerate() {
                    scaled.column_mut(k).scale_mut(*d);
                }
                let mut m = &scaled * e.eigenvectors.transpose();
                for a in 0..n {
                    for b in 0..n {
                        m[(a, b)] *= self.sqrt_mu[b] / self.sqrt_mu[a];
                    }
                }
                Ok(m)
            }
            None => self.semigroup_matrix_pade(t),
        }
    }

    /// `e^{tL}` by Padé scaling and squaring, independent of the eigen path.
    pub fn semigroup_matrix_pade(&self, t: f64) -> Result<DMatrix<f64>> {
        check_time(t)?;
        expm(&(self.generator() * t))
    }

    /// `P_t f`.
    pub fn semigroup_apply(&self, t: f64, f: &[f64]) -> Result<Vec<f64>> {
        check_time(t)?;
        if f.len() != self.len() {
            return Err(Error::InvalidParams("function length differs from support size".into()));
        }
        match &self.eigen {
            Some(e) => {
                let g = DVector::from_iterator(self.len(), f.iter().zip(&self.sqrt_mu).map(|(a, b)| a * b));
                let mut coef = e.eigenvectors.transpose() * g;
                for (k, l) in e.eigenvalues.iter().enumerate() {
                    coef[k] *= (t * (l - 1.0)).exp();
                }
                let out = &e.eigenvectors * coef;
                Ok(out.iter().zip(&self.sqrt_mu).map(|(a, b)| a / b).collect())
            }
            None => {
                let m = self.semigroup_matrix_pade(t)?;
                Ok((m * DVector::from_column_slice(f)).iter().copied().collect())
            }
        }
    }

    pub fn expectation(&self, f: &[f64]) -> f64 {
        self.mu.iter().zip(f).map(|(a, b)| a * b).sum()
    }

    pub fn entropy(&self, f: &[f64]) -> Result<f64> {
        entropy(&self.mu, f)
    }

    pub fn variance(&self, f: &[f64]) -> f64 {
        let m = self.expectation(f);
        self.mu.iter().zip(f).map(|(a, b)| a * (b - m).powi(2)).sum()
    }

    /// `E(f, g) = E_μ f (-L g)`.
    pub fn dirichlet(&self, f: &[f64], g: &[f64]) -> f64 {
        let pg = &self.p * DVector::from_column_slice(g);
        (0..self.len())
            .map(|a| self.mu[a] * f[a] * (g[a] - pg[a]))
            .sum()
    }

    /// Checks `Ent_μ(f) ≤ (ρ_0/2) E(f, log f)` for `f = e^g`, `g` uniform on `[-3, 3]`.
    pub fn verify_mlsi(&self, rho0: f64, trials: usize, seed: u64) -> Result<MlsiReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = MlsiReport {
            rho0,
            trials,
            violations: Vec::new(),
            max_ratio: 0.0,
        };
        for trial in 0..trials {
            let g: Vec<f64> = (0..self.len()).map(|_| rng.random_range(-3.0..3.0)).collect();
            let f: Vec<f64> = g.iter().map(|x| x.exp()).collect();
            let ent = self.entropy(&f)?;
            let dir = self.dirichlet(&f, &g);
            if dir > 0.0 {
                report.max_ratio = report.max_ratio.max(ent / (0.5 * dir));
            }
            if ent > 0.5 * rho0 * dir + 1e-12 {
                report.violations.push(trial);
            }
        }
        Ok(report)
    }

    /// Checks `Ent_μ(P_t f) ≤ e^{-2t/ρ_0} Ent_μ(f)` on a time grid for a density `f`.
    pub fn entropy_decay_check(&self, rho0: f64, f: &[f64], times: &[f64]) -> Result<DecayReport> {
        let mean = self.expectation(f);
        if (mean - 1.0).abs() > 1e-9 || f.iter().any(|&x| x < 0.0) {
            return Err(Error::Domain("f must be a probability density w.r.t. mu".into()));
        }
        let ent0 = self.entropy(f)?;
        let mut entropies = Vec::with_capacity(times.len());
        let mut bounds = Vec::with_capacity(times.len());
        let mut violations = Vec::new();
        for (k, &t) in times.iter().enumerate() {
            let ptf = self.semigroup_apply(t, f)?;
            let ent = self.entropy(&ptf.iter().map(|x| x.max(0.0)).collect::<Vec<_>>())?;
            let bound = (-2.0 * t / rho0).exp() * ent0;
            if ent > bound + 1e-12 {
                violations.push(k);
            }
            entropies.push(ent);
            bounds.push(bound);
        }
        let monotone = entropies.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let last = times.len().saturating_sub(1);
        let empirical_rate = if last > 0 && entropies[last] > 0.0 && entropies[0] > 0.0 {
            -(entropies[last] / entropies[0]).ln() / (times[last] - times[0])
        } else {
            f64::INFINITY
        };
        Ok(DecayReport {
            rho0,
            times: times.to_vec(),
            entropies,
            bounds,
            violations,
            monotone,
            empirical_rate,
        })
    }

    /// `max_y d_TV(P_t(y, ·), μ)`.
    pub fn worst_tv(&self, t: f64) -> Result<f64> {
        let m = self.semigroup_matrix(t)?;
        Ok(m.row_iter()
            .map(|r| {
                let row: Vec<f64> = r.iter().copied().collect();
                tv(&row, &self.mu)
            })
            .fold(0.0, f64::max))
    }

    /// Continuous-time mixing time `inf{t : max_y d_TV(P_t(y,·), μ) ≤ threshold}`,
    /// by bisection to `tol`.
    pub fn exact_mixing_time(&self, threshold: f64, tol: f64) -> Result<f64> {
        if self.worst_tv(0.0)? <= threshold {
            return Ok(0.0);
        }
        let mut hi = 1.0;
        let mut guard = 0;
        while self.worst_tv(hi)? > threshold {
            hi *= 2.0;
            guard += 1;
            if guard > 60 {
                return Err(Error::NumericFailure("mixing time beyond 2^60".into()));
            }
        }
        let mut lo = if guard == 0 { 0.0 } else { hi / 2.0 };
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.worst_tv(mid)? > threshold {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Row `start` of the discrete-time kernel `P^steps`.
    pub fn discrete_row(&self, start: usize, steps: usize) -> Vec<f64> {
        let mut row = DVector::<f64>::zeros(self.len());
        row[start] = 1.0;
        let pt = self.p.transpose();
        for _ in 0..steps {
            row = &pt * row;
        }
        row.iter().copied().collect()
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time {t} must be finite and nonnegative")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MlsiReport {
    pub rho0: f64,
    pub trials: usize,
    pub violations: Vec<usize>,
    /// `max Ent/(½E)`, an empirical lower bound on the optimal constant.
    pub max_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub rho0: f64,
    pub times: Vec<f64>,
    pub entropies: Vec<f64>,
    pub bounds: Vec<f64>,
    pub violations: Vec<usize>,
    pub monotone: bool,
    pub empirical_rate: f64,
}

/// `ρ_0 (log 2 + 2 + log log(1/μ*))`. The inner double logarithm is used as
/// is (it is negative for `μ* > e^{-1}`); a single-state system (`μ* = 1`)
/// gets bound 0.
pub fn mixing_bound(cert: &WeakDependenceCertificate, mu_star: f64) -> f64 {
    if mu_star >= 1.0 {
        return 0.0;
    }
    let b = cert.rho0 * (std::f64::consts::LN_2 + 2.0 + (1.0 / mu_star).ln().ln());
    b.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weakdep::CertificateSource;

    fn bit() -> ExactChain {
        ExactChain::from_system(&SpinSystem::uniform(1, 2)).unwrap()
    }

    #[test]
    fn single_site_resamples_from_mu() {
        let c = bit();
        for a in 0..2 {
            for b in 0..2 {
                assert!((c.transition()[(a, b)] - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn two_bits_kernel_entries() {
        let c = ExactChain::from_system(&SpinSystem::uniform(2, 2)).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let v = c.transition()[(a, b)];
                assert!([0.0, 0.25, 0.5].iter().any(|x| (x - v).abs() < 1e-15));
            }
        }
        assert!(c.stochasticity_error() < 1e-12);
    }

    #[test]
    fn semigroup_closed_form_bit() {
        let c = bit();
        for t in [0.0, 0.1, 1.0, 3.0] {
            let out = c.semigroup_apply(t, &[0.0, 1.0]).unwrap();
            let d = 0.5 * (-t).exp();
            assert!((out[0] - (0.5 - d)).abs() < 1e-14);
            assert!((out[1] - (0.5 + d)).abs() < 1e-14);
        }
        let tmix = c.exact_mixing_time(default_threshold(), 1e-9).unwrap();
        assert!((tmix - (1.0 - 2f64.ln())).abs() < 1e-8);
    }

    #[test]
    fn dirichlet_example() {
        let c = bit();
        let e = std::f64::consts::E;
        let d = c.dirichlet(&[1.0, e], &[0.0, 1.0]);
        assert!((d - (e - 1.0) / 4.0).abs() < 1e-15);
        assert_eq!(c.dirichlet(&[2.0, 2.0], &[1.0, 5.0]), 0.0);
    }

    #[test]
    fn mixing_bound_single_bit() {
        let cert = WeakDependenceCertificate::from_constants(1, 0.5, 1.0, 0.0, 0.0, CertificateSource::Exact).unwrap();
        let b = mixing_bound(&cert, 0.5);
        assert!((b - 9.31).abs() < 5e-3, "{b}");
    }

    #[test]
    fn eigen_and_pade_agree() {
        let sys = SpinSystem::new("w", 3, 2, |x| 0.8 * (x[0] * x[1]) as f64 - 0.4 * x[2] as f64 + 0.3 * (x[1] * x[2]) as f64);
        let c = ExactChain::from_system(&sys).unwrap();
        for t in [0.0, 0.7, 4.0] {
            let a = c.semigroup_matrix(t).unwrap();
            let b = c.semigroup_matrix_pade(t).unwrap();
            assert!((a - b).abs().max() < 1e-12);
        }
        assert!(c.reversibility_error() < 1e-15);
    }

    #[test]
    fn decay_report_for_bit() {
        let c = bit();
        let times: Vec<f64> = (0..=10).map(|k| 0.5 * k as f64).collect();
        let r = c.entropy_decay_check(4.0, &[0.5, 1.5], &times).unwrap();
        assert!(r.violations.is_empty());
        assert!(r.monotone);
        let r = c.entropy_decay_check(4.0, &[1.0, 1.0], &times).unwrap();
        assert!(r.entropies.iter().all(|&e| e == 0.0));
    }
}
