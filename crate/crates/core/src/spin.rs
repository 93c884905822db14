//! Finite spin systems on product spaces `X^I`, exact enumeration of their
//! Gibbs measures, and single-site conditional distributions.
//!
//! A system is described by its log-weight `H(σ)`; hard constraints are
//! encoded as `H(σ) = -∞`, so constrained and unconstrained models share one
//! code path. Configurations are indexed by a mixed-radix code with site 0 as
//! the least significant digit.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Spin = u8;

/// Default limit on `|X|^|I|` for exact enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

/// Tolerance on the normalization of conditional laws.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// An assignment of a spin to every site.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration(Vec<Spin>);

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl Configuration {
    pub fn new(values: Vec<Spin>) -> Self {
        Configuration(values)
    }

    pub fn zeros(sites: usize) -> Self {
        Configuration(vec![0; sites])
    }

    /// Decodes a mixed-radix code (site 0 least significant).
    pub fn from_code(mut code: usize, sites: usize, spins: usize) -> Self {
        let mut v = vec![0; sites];
        for s in v.iter_mut() {
            *s = (code % spins) as Spin;
            code /= spins;
        }
        Configuration(v)
    }

    pub fn code(&self, spins: usize) -> usize {
        self.0
            .iter()
            .rev()
            .fold(0usize, |acc, &s| acc * spins + s as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, site: usize) -> Spin {
        self.0[site]
    }

    pub fn set(&mut self, site: usize, spin: Spin) {
        self.0[site] = spin;
    }

    pub fn with(&self, site: usize, spin: Spin) -> Self {
        let mut c = self.clone();
        c.0[site] = spin;
        c
    }

    pub fn as_slice(&self) -> &[Spin] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Spin> {
        self.0
    }

    /// Packs a two-spin configuration into 64-bit words, site `i` at bit `i % 64`
    /// of word `i / 64`. Any nonzero spin is stored as 1.
    pub fn pack_bits(&self) -> Vec<u64> {
        let mut words = vec![0u64; self.0.len().div_ceil(64)];
        for (i, &s) in self.0.iter().enumerate() {
            if s != 0 {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        words
    }

    pub fn unpack_bits(words: &[u64], sites: usize) -> Self {
        Configuration(
            (0..sites)
                .map(|i| (words[i / 64] >> (i % 64) & 1) as Spin)
                .collect(),
        )
    }
}

type LogWeightFn = dyn Fn(&[Spin]) -> f64 + Send + Sync;

/// A finite spin system: `sites` sites, spins `0..spins`, and an
/// unnormalized log-weight (`-∞` marks excluded configurations).
#[derive(Clone)]
pub struct SpinSystem {
    name: String,
    sites: usize,
    spins: usize,
    log_weight: Arc<LogWeightFn>,
}

impl fmt::Debug for SpinSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpinSystem")
            .field("name", &self.name)
            .field("sites", &self.sites)
            .field("spins", &self.spins)
            .finish()
    }
}

impl SpinSystem {
    pub fn new<F>(name: impl Into<String>, sites: usize, spins: usize, log_weight: F) -> Self
    where
        F: Fn(&[Spin]) -> f64 + Send + Sync + 'static,
    {
        assert!(spins >= 1 && spins <= Spin::MAX as usize + 1);
        SpinSystem {
            name: name.into(),
            sites,
            spins,
            log_weight: Arc::new(log_weight),
        }
    }

    /// Independent uniform spins on `sites` sites.
    pub fn uniform(sites: usize, spins: usize) -> Self {
        SpinSystem::new(format!("uniform-{spins}^{sites}"), sites, spins, |_| 0.0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_sites(&self) -> usize {
        self.sites
    }

    pub fn num_spins(&self) -> usize {
        self.spins
    }

    pub fn log_weight(&self, x: &[Spin]) -> f64 {
        (self.log_weight)(x)
    }

    /// `|X|^|I|` as a float (never overflows).
    pub fn state_space_size(&self) -> f64 {
        (self.spins as f64).powi(self.sites as i32)
    }

    /// Conditional law of the spin at `site` given the other coordinates of `x`.
    pub fn conditional(&self, x: &Configuration, site: usize) -> Result<ConditionalDistribution> {
        let mut scratch = x.clone();
        let logs: Vec<f64> = (0..self.spins)
            .map(|s| {
                scratch.set(site, s as Spin);
                self.log_weight(scratch.as_slice())
            })
            .collect();
        let probabilities = normalize_log_weights(&logs).ok_or(Error::InvalidContext { site })?;
        Ok(ConditionalDistribution {
            site,
            context: x.clone(),
            probabilities,
        })
    }

    pub fn enumerate(&self) -> Result<Enumeration> {
        self.enumerate_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    /// Evaluates the log-weight on the whole product space and normalizes.
    pub fn enumerate_with_cap(&self, cap: u64) -> Result<Enumeration> {
        let total = self.state_space_size();
        if total > cap as f64 {
            return Err(Error::CapExceeded { states: total, cap });
        }
        let total = total as usize;
        let (sites, spins) = (self.sites, self.spins);
        let log_weights: Vec<f64> = (0..total)
            .into_par_iter()
            .map_init(
                || vec![0 as Spin; sites],
                |buf, code| {
                    let mut c = code;
                    for s in buf.iter_mut() {
                        *s = (c % spins) as Spin;
                        c /= spins;
                    }
                    self.log_weight(buf)
                },
            )
            .collect();
        Enumeration::from_log_weights(self.clone(), log_weights)
    }
}

/// Normalizes log-weights with log-sum-exp; `None` if every entry is `-∞`.
pub fn normalize_log_weights(logs: &[f64]) -> Option<Vec<f64>> {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return None;
    }
    let w: Vec<f64> = logs.iter().map(|&l| (l - max).exp()).collect();
    let z: f64 = w.iter().sum();
    Some(w.into_iter().map(|x| x / z).collect())
}

/// `μ(· | x̄_i)` as a probability vector over the spin alphabet.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionalDistribution {
    pub site: usize,
    pub context: Configuration,
    pub probabilities: Vec<f64>,
}

impl ConditionalDistribution {
    pub fn is_normalized(&self) -> bool {
        let sum: f64 = self.probabilities.iter().sum();
        (sum - 1.0).abs() <= PROBABILITY_TOLERANCE && self.probabilities.iter().all(|&p| p >= 0.0)
    }
}

/// Exact Gibbs measure of an enumerable spin system.
#[derive(Clone, Debug)]
pub struct Enumeration {
    system: SpinSystem,
    log_weights: Vec<f64>,
    log_partition: f64,
    support: Vec<usize>,
    probs: Vec<f64>,
    index: Vec<u32>,
    strides: Vec<usize>,
}

const NOT_SUPPORTED: u32 = u32::MAX;

impl Enumeration {
    fn from_log_weights(system: SpinSystem, log_weights: Vec<f64>) -> Result<Self> {
        let support: Vec<usize> = (0..log_weights.len())
            .filter(|&c| log_weights[c] > f64::NEG_INFINITY)
            .collect();
        if support.is_empty() {
            return Err(Error::EmptySupport);
        }
        if let Some(&bad) = support.iter().find(|&&c| !log_weights[c].is_finite()) {
            return Err(Error::NumericFailure(format!(
                "log-weight of configuration {bad} is not finite"
            )));
        }
        let max = support
            .iter()
            .map(|&c| log_weights[c])
            .fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = support.iter().map(|&c| (log_weights[c] - max).exp()).sum();
        let log_partition = max + z.ln();
        let probs: Vec<f64> = support
            .iter()
            .map(|&c| (log_weights[c] - log_partition).exp())
            .collect();
        let mut index = vec![NOT_SUPPORTED; log_weights.len()];
        for (k, &c) in support.iter().enumerate() {
            index[c] = k as u32;
        }
        let mut strides = Vec::with_capacity(system.sites);
        let mut s = 1usize;
        for _ in 0..system.sites {
            strides.push(s);
            s *= system.spins;
        }
        Ok(Enumeration {
            system,
            log_weights,
            log_partition,
            support,
            probs,
            index,
            strides,
        })
    }

    pub fn system(&self) -> &SpinSystem {
        &self.system
    }

    pub fn num_sites(&self) -> usize {
        self.system.sites
    }

    pub fn num_spins(&self) -> usize {
        self.system.spins
    }

    /// Number of configurations with positive probability.
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn state_space_size(&self) -> usize {
        self.log_weights.len()
    }

    pub fn is_full_support(&self) -> bool {
        self.support.len() == self.log_weights.len()
    }

    pub fn log_partition(&self) -> f64 {
        self.log_partition
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn probability(&self, idx: usize) -> f64 {
        self.probs[idx]
    }

    pub fn code(&self, idx: usize) -> usize {
        self.support[idx]
    }

    pub fn codes(&self) -> &[usize] {
        &self.support
    }

    pub fn config(&self, idx: usize) -> Configuration {
        Configuration::from_code(self.support[idx], self.system.sites, self.system.spins)
    }

    pub fn support_index(&self, code: usize) -> Option<usize> {
        match self.index.get(code) {
            Some(&k) if k != NOT_SUPPORTED => Some(k as usize),
            _ => None,
        }
    }

    pub fn index_of(&self, x: &Configuration) -> Option<usize> {
        self.support_index(x.code(self.system.spins))
    }

    #[inline]
    pub fn spin_at(&self, code: usize, site: usize) -> Spin {
        (code / self.strides[site] % self.system.spins) as Spin
    }

    /// Code of the configuration equal to `code` except spin `spin` at `site`.
    #[inline]
    pub fn with_spin(&self, code: usize, site: usize, spin: Spin) -> usize {
        let cur = self.spin_at(code, site) as usize;
        code - cur * self.strides[site] + spin as usize * self.strides[site]
    }

    pub fn log_weight_of_code(&self, code: usize) -> f64 {
        self.log_weights[code]
    }

    /// Conditional law at `site` given the other coordinates of `code`;
    /// `None` if the context admits no spin.
    pub fn conditional_at_code(&self, code: usize, site: usize) -> Option<Vec<f64>> {
        let logs: Vec<f64> = (0..self.system.spins)
            .map(|s| self.log_weights[self.with_spin(code, site, s as Spin)])
            .collect();
        normalize_log_weights(&logs)
    }

    /// All supported configurations with their probabilities, in code order.
    pub fn support_list(&self) -> Vec<(Configuration, f64)> {
        (0..self.len()).map(|k| (self.config(k), self.probs[k])).collect()
    }

    /// `μ* = min_{y ∈ supp μ} μ(y)`.
    pub fn minimal_probability(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn expectation(&self, f: &[f64]) -> f64 {
        self.probs.iter().zip(f).map(|(p, v)| p * v).sum()
    }

    /// Evaluates `g` on every supported configuration.
    pub fn tabulate<F: Fn(&Configuration) -> f64>(&self, g: F) -> Vec<f64> {
        (0..self.len()).map(|k| g(&self.config(k))).collect()
    }

    /// Minimal single-site conditional probability over supported points,
    /// `I(μ) = min_i min_y μ(y_i | ȳ_i)`.
    pub fn min_conditional(&self) -> f64 {
        let mut best = f64::INFINITY;
        for &code in &self.support {
            for site in 0..self.system.sites {
                if let Some(cond) = self.conditional_at_code(code, site) {
                    let p = cond[self.spin_at(code, site) as usize];
                    best = best.min(p);
                }
            }
        }
        best
    }

    /// Lower bound on conditional marginals over admissible partial
    /// configurations. For systems with full support this equals the minimal
    /// single-site conditional probability; otherwise the exhaustive scan over
    /// all `S ⊊ I` is used.
    pub fn beta_tilde(&self) -> Result<f64> {
        if self.is_full_support() {
            return Ok(self.min_conditional());
        }
        self.beta_tilde_exhaustive()
    }

    /// Exhaustive evaluation of `inf_{S ⊊ I} inf_{i ∉ S} inf μ((y_{S^c})_i | x_S)`.
    pub fn beta_tilde_exhaustive(&self) -> Result<f64> {
        let m = self.system.sites;
        let q = self.system.spins;
        if m > 24 {
            return Err(Error::CapExceeded {
                states: 2f64.powi(m as i32),
                cap: 1 << 24,
            });
        }
        let full: u32 = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
        let mut best = f64::INFINITY;
        let mut restricted = vec![0usize; self.support.len()];
        for mask in 0..full {
            let in_s: Vec<usize> = (0..m).filter(|&j| mask >> j & 1 == 1).collect();
            let groups = q.pow(in_s.len() as u32);
            for (k, &code) in self.support.iter().enumerate() {
                restricted[k] = in_s
                    .iter()
                    .rev()
                    .fold(0, |acc, &j| acc * q + self.spin_at(code, j) as usize);
            }
            let mut mass = vec![0.0; groups * q];
            for i in (0..m).filter(|&i| mask >> i & 1 == 0) {
                mass.iter_mut().for_each(|v| *v = 0.0);
                for (k, &code) in self.support.iter().enumerate() {
                    mass[restricted[k] * q + self.spin_at(code, i) as usize] += self.probs[k];
                }
                for g in 0..groups {
                    let row = &mass[g * q..(g + 1) * q];
                    let total: f64 = row.iter().sum();
                    if total <= 0.0 {
                        continue;
                    }
                    for &v in row.iter().filter(|&&v| v > 0.0) {
                        best = best.min(v / total);
                    }
                }
            }
        }
        Ok(best)
    }
}
