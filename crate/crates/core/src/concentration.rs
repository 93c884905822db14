//! Difference operators, the centered polynomial family `f_{d,A}` and
//! multilevel tail bounds.
//!
//! Functions on an [`Enumeration`] are passed as tables indexed by support
//! position (the layout produced by [`Enumeration::tabulate`]).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spin::{Configuration, Enumeration, Spin};
use crate::stats;

/// Largest tensor (or `|I|^k · |supp μ|` table) materialized.
pub const TENSOR_CAP: usize = 1 << 26;

/// Largest degree handled by the partition expansion.
pub const MAX_PARTITION_DEGREE: usize = 4;

fn positive_conditional(e: &Enumeration, code: usize, site: usize) -> Option<Vec<(usize, f64)>> {
    let cond = e.conditional_at_code(code, site)?;
    Some(
        cond.iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(s, &p)| {
                let c = e.with_spin(code, site, s as Spin);
                (e.support_index(c).expect("positive conditional implies support"), p)
            })
            .collect(),
    )
}

/// `∂_i f(x)`: square root of the conditional variance of `f` in coordinate
/// `i`, zero when the context `x̄_i` has no mass.
pub fn partial_diff(e: &Enumeration, f: &[f64], x: &Configuration, site: usize) -> f64 {
    let code = x.code(e.num_spins());
    let Some(points) = positive_conditional(e, code, site) else {
        return 0.0;
    };
    let m: f64 = points.iter().map(|&(k, p)| p * f[k]).sum();
    let var: f64 = points.iter().map(|&(k, p)| p * (f[k] - m).powi(2)).sum();
    var.max(0.0).sqrt()
}

/// `𝔥_i f(x)`: largest change of `f` between two spins at `i` that both have
/// positive conditional probability given `x̄_i`.
pub fn h_diff(e: &Enumeration, f: &[f64], x: &Configuration, site: usize) -> f64 {
    h_diff_code(e, f, x.code(e.num_spins()), site)
}

fn h_diff_code(e: &Enumeration, f: &[f64], code: usize, site: usize) -> f64 {
    let Some(points) = positive_conditional(e, code, site) else {
        return 0.0;
    };
    let lo = points.iter().map(|&(k, _)| f[k]).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|&(k, _)| f[k]).fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

/// `𝔥_i f` tabulated on the support.
pub fn h_diff_table(e: &Enumeration, f: &[f64], site: usize) -> Vec<f64> {
    (0..e.len()).map(|k| h_diff_code(e, f, e.code(k), site)).collect()
}

/// `(∂_i f)^2` tabulated on the support.
pub fn partial_diff_sq_table(e: &Enumeration, f: &[f64], site: usize) -> Vec<f64> {
    (0..e.len())
        .map(|k| partial_diff(e, f, &e.config(k), site).powi(2))
        .collect()
}

/// Norms of the higher-order difference tensors `𝔥^{(k)} f`, `k = 1..=d`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct HigherDifferences {
    /// `‖𝔥^{(k)} f‖_2` for `k = 1..=d` (entry `k - 1`).
    pub l2: Vec<f64>,
    /// `‖𝔥^{(k)} f‖_∞` for `k = 1..=d`.
    pub sup: Vec<f64>,
}

impl HigherDifferences {
    pub fn degree(&self) -> usize {
        self.l2.len()
    }

    /// Constants `C_k` of the multilevel bound: `‖𝔥^{(k)}f‖_2^{2/k}` for
    /// `k < d` and `‖𝔥^{(d)}f‖_∞^{2/d}` at the top level.
    pub fn tail_profile(&self) -> TailProfile {
        let d = self.degree();
        let levels = (1..=d)
            .map(|k| {
                let norm = if k == d { self.sup[k - 1] } else { self.l2[k - 1] };
                (k, norm.powf(2.0 / k as f64))
            })
            .collect();
        TailProfile { levels }
    }
}

/// Computes `𝔥^{(k)} f` for `k = 1..=d` by the recursion
/// `𝔥_{i1…ik} f = 𝔥_{i1}(𝔥_{i2…ik} f)` and returns their norms.
pub fn h_tensor(e: &Enumeration, f: &[f64], d: usize) -> Result<HigherDifferences> {
    let m = e.num_sites();
    let len = e.len();
    let cells = (m as f64).powi(d as i32) * len as f64;
    if cells > TENSOR_CAP as f64 {
        return Err(Error::CapExceeded {
            states: cells,
            cap: TENSOR_CAP as u64,
        });
    }
    let probs = e.probabilities();
    let mut level: Vec<Vec<f64>> = vec![f.to_vec()];
    let mut l2 = Vec::with_capacity(d);
    let mut sup = Vec::with_capacity(d);
    for _ in 0..d {
        // new index i1 is the slowest coordinate: entry i1 * m^{k-1} + rest
        let next: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .flat_map_iter(|i| level.iter().map(move |g| h_diff_table(e, g, i)).collect::<Vec<_>>())
            .collect();
        let mut sq = vec![0.0; len];
        for g in &next {
            for (s, v) in sq.iter_mut().zip(g) {
                *s += v * v;
            }
        }
        l2.push(sq.iter().zip(probs).map(|(s, p)| s * p).sum::<f64>().sqrt());
        sup.push(sq.iter().copied().fold(0.0, f64::max).sqrt());
        level = next;
    }
    Ok(HigherDifferences { l2, sup })
}

/// Tail profile `η(t) = min_k t^{2/k} / C_k` (a zero `C_k` drops out).
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TailProfile {
    pub levels: Vec<(usize, f64)>,
}

impl TailProfile {
    pub fn new(levels: Vec<(usize, f64)>) -> Result<Self> {
        if levels.iter().any(|&(k, c)| k == 0 || !(c >= 0.0) || !c.is_finite()) {
            return Err(Error::InvalidParams("tail levels need k >= 1 and finite C_k >= 0".into()));
        }
        if !levels.iter().any(|&(_, c)| c > 0.0) {
            return Err(Error::InvalidParams("at least one C_k must be positive".into()));
        }
        Ok(TailProfile { levels })
    }

    pub fn eta(&self, t: f64) -> f64 {
        self.levels
            .iter()
            .filter(|&&(_, c)| c > 0.0)
            .map(|&(k, c)| t.powf(2.0 / k as f64) / c)
            .fold(f64::INFINITY, f64::min)
    }

    /// `N`, the number of levels with positive constant.
    pub fn active_levels(&self) -> usize {
        self.levels.iter().filter(|&&(_, c)| c > 0.0).count()
    }

    /// `r`, the smallest level with positive constant.
    pub fn first_active_level(&self) -> usize {
        self.levels
            .iter()
            .filter(|&&(_, c)| c > 0.0)
            .map(|&(k, _)| k)
            .min()
            .unwrap_or(1)
    }
}

/// `C = log(2) σ² (d e)² / 2`.
pub fn com_constant(sigma2: f64, d: usize) -> f64 {
    let de = d as f64 * std::f64::consts::E;
    std::f64::consts::LN_2 * sigma2 * de * de / 2.0
}

/// `2 exp(-η(t) / C)`.
pub fn multilevel_tail(profile: &TailProfile, t: f64, constant: f64) -> f64 {
    2.0 * (-profile.eta(t) / constant).exp()
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TailRow {
    pub t: f64,
    pub empirical_sf: f64,
    pub bound: f64,
    /// Two binomial standard errors of the empirical survival at this level.
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TailReport {
    pub samples: usize,
    pub constant: f64,
    pub rows: Vec<TailRow>,
    /// Levels where the empirical survival exceeds the bound by more than
    /// the sampling tolerance.
    pub violations: Vec<f64>,
}

impl TailReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,empirical_sf,bound\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.t, r.empirical_sf, r.bound));
        }
        out
    }
}

/// `count` equally spaced levels in `(0, max |x|]`.
pub fn tail_levels(abs_values: &[f64], count: usize) -> Vec<f64> {
    let max = abs_values.iter().copied().fold(0.0, f64::max);
    (1..=count).map(|k| max * k as f64 / count as f64).collect()
}

/// Compares the empirical survival of `|X|` with a tail-bound curve.
pub fn tail_check_with<B: Fn(f64) -> f64>(abs_values: &[f64], levels: &[f64], constant: f64, bound: B) -> TailReport {
    let n = abs_values.len() as f64;
    let sf = stats::survival(abs_values, levels);
    let mut rows = Vec::with_capacity(levels.len());
    let mut violations = Vec::new();
    for (&t, &s) in levels.iter().zip(&sf) {
        let b = bound(t);
        let q = b.clamp(0.0, 1.0);
        let tolerance = 2.0 * (q * (1.0 - q) / n).sqrt();
        if s > b + tolerance {
            violations.push(t);
        }
        rows.push(TailRow {
            t,
            empirical_sf: s,
            bound: b,
            tolerance,
        });
    }
    TailReport {
        samples: abs_values.len(),
        constant,
        rows,
        violations,
    }
}

/// [`tail_check_with`] against `2 exp(-η(t)/C)`.
pub fn tail_check(abs_values: &[f64], levels: &[f64], profile: &TailProfile, constant: f64) -> TailReport {
    tail_check_with(abs_values, levels, constant, |t| multilevel_tail(profile, t, constant))
}

/// Coefficient tensor and spin function defining `f_{d,A}`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PolynomialSpec {
    degree: usize,
    sites: usize,
    /// Dense row-major tensor over `I^d` (first index slowest).
    tensor: Vec<f64>,
    spin_values: Vec<f64>,
    oscillation: f64,
}

impl PolynomialSpec {
    /// Validates the vanishing diagonal; the oscillation `c` defaults to
    /// `max f - min f`.
    pub fn new(degree: usize, sites: usize, tensor: Vec<f64>, spin_values: Vec<f64>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidParams("degree must be at least 1".into()));
        }
        let cells = (sites as f64).powi(degree as i32);
        if cells > TENSOR_CAP as f64 {
            return Err(Error::CapExceeded {
                states: cells,
                cap: TENSOR_CAP as u64,
            });
        }
        if tensor.len() != sites.pow(degree as u32) {
            return Err(Error::InvalidParams(format!(
                "tensor has {} entries, expected {}",
                tensor.len(),
                sites.pow(degree as u32)
            )));
        }
        if spin_values.is_empty() || spin_values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("spin function needs finite values".into()));
        }
        let spec = PolynomialSpec {
            degree,
            sites,
            tensor,
            spin_values,
            oscillation: 0.0,
        };
        for (flat, &a) in spec.tensor.iter().enumerate() {
            if a != 0.0 {
                let index = spec.unflatten(flat);
                if !all_distinct(&index) {
                    return Err(Error::DiagonalNonzero { index });
                }
            }
        }
        let osc = spec.spin_oscillation();
        Ok(PolynomialSpec {
            oscillation: osc,
            ..spec
        })
    }

    /// Builds from a sparse coordinate list `(i_1 … i_d, value)`; repeated
    /// coordinates are summed.
    pub fn from_coordinates(
        degree: usize,
        sites: usize,
        entries: &[(Vec<usize>, f64)],
        spin_values: Vec<f64>,
    ) -> Result<Self> {
        let mut tensor = vec![0.0; sites.checked_pow(degree as u32).unwrap_or(usize::MAX).min(TENSOR_CAP + 1)];
        for (index, value) in entries {
            if index.len() != degree || index.iter().any(|&i| i >= sites) {
                return Err(Error::InvalidParams(format!("bad tensor coordinate {index:?}")));
            }
            if !all_distinct(index) && *value != 0.0 {
                return Err(Error::DiagonalNonzero { index: index.clone() });
            }
            let flat = index.iter().fold(0, |acc, &i| acc * sites + i);
            tensor[flat] += value;
        }
        PolynomialSpec::new(degree, sites, tensor, spin_values)
    }

    /// Parses whitespace-separated lines `i_1 … i_d value`; `#` starts a comment.
    pub fn parse_coordinates(text: &str, degree: usize) -> Result<Vec<(Vec<usize>, f64)>> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != degree + 1 {
                return Err(Error::Config(format!(
                    "line {}: expected {} indices and a value",
                    lineno + 1,
                    degree
                )));
            }
            let index = fields[..degree]
                .iter()
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
            let value: f64 = fields[degree]
                .parse()
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
            entries.push((index, value));
        }
        Ok(entries)
    }

    /// Random tensor with independent uniform `[-1, 1]` entries off the diagonal.
    pub fn random(degree: usize, sites: usize, spin_values: Vec<f64>, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = sites.pow(degree as u32);
        let mut tensor = vec![0.0; len];
        for (flat, a) in tensor.iter_mut().enumerate() {
            let index = unflatten(flat, sites, degree);
            if all_distinct(&index) {
                *a = rng.random_range(-1.0..=1.0);
            }
        }
        PolynomialSpec::new(degree, sites, tensor, spin_values)
    }

    /// Overrides the oscillation constant; it must dominate the spin function's range.
    pub fn with_oscillation(mut self, c: f64) -> Result<Self> {
        let osc = self.spin_oscillation();
        if !(c >= osc) {
            return Err(Error::InvalidParams(format!(
                "oscillation bound {c} is below the spin function range {osc}"
            )));
        }
        self.oscillation = c;
        Ok(self)
    }

    fn spin_oscillation(&self) -> f64 {
        let lo = self.spin_values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.spin_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn tensor(&self) -> &[f64] {
        &self.tensor
    }

    pub fn spin_values(&self) -> &[f64] {
        &self.spin_values
    }

    pub fn oscillation(&self) -> f64 {
        self.oscillation
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.tensor[index.iter().fold(0, |acc, &i| acc * self.sites + i)]
    }

    fn unflatten(&self, flat: usize) -> Vec<usize> {
        unflatten(flat, self.sites, self.degree)
    }

    /// Nonzero entries with their index tuples.
    pub fn entries(&self) -> Vec<(Vec<usize>, f64)> {
        self.tensor
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0.0)
            .map(|(flat, &a)| (self.unflatten(flat), a))
            .collect()
    }

    /// Hilbert–Schmidt norm `‖A‖_2`.
    pub fn norm2(&self) -> f64 {
        self.tensor.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> PolynomialSpec {
        PolynomialSpec {
            tensor: self.tensor.iter().map(|a| a * factor).collect(),
            ..self.clone()
        }
    }

    /// `Σ_k A^{k=l}`: the `(d-1)`-tensor obtained by pinning each slot to `l`
    /// in turn and summing. `None` for `d = 1`, where it is the scalar `A_l`.
    pub fn pinned_sum(&self, l: usize) -> Option<PolynomialSpec> {
        if self.degree == 1 {
            return None;
        }
        let d = self.degree - 1;
        let mut tensor = vec![0.0; self.sites.pow(d as u32)];
        for (flat, t) in tensor.iter_mut().enumerate() {
            let rest = unflatten(flat, self.sites, d);
            for k in 0..self.degree {
                let mut full = rest.clone();
                full.insert(k, l);
                *t += self.get(&full);
            }
        }
        Some(PolynomialSpec {
            degree: d,
            sites: self.sites,
            tensor,
            spin_values: self.spin_values.clone(),
            oscillation: self.oscillation,
        })
    }
}

fn unflatten(mut flat: usize, sites: usize, degree: usize) -> Vec<usize> {
    let mut index = vec![0; degree];
    for slot in (0..degree).rev() {
        index[slot] = flat % sites;
        flat /= sites;
    }
    index
}

fn all_distinct(index: &[usize]) -> bool {
    index.iter().enumerate().all(|(a, i)| index[..a].iter().all(|j| j != i))
}

/// `(‖A‖_2^{2/d} σ² c² p)^{d/2}`.
pub fn moment_bound(spec: &PolynomialSpec, sigma2: f64, p: f64) -> f64 {
    let d = spec.degree as f64;
    let c = spec.oscillation;
    (sigma2 * c * c * spec.norm2().powf(2.0 / d) * p).powf(d / 2.0)
}

/// Tail bound `2 exp(-(ln 2 t / (2e σ^d c^d ‖A‖))^{2/d})` for `f_{d,A}`.
pub fn fda_tail_bound(spec: &PolynomialSpec, sigma2: f64, t: f64) -> f64 {
    let d = spec.degree as f64;
    let scale = 2.0 * std::f64::consts::E * (sigma2.sqrt() * spec.oscillation).powf(d) * spec.norm2();
    let z = std::f64::consts::LN_2 * t / scale;
    (2.0 * (-z.powf(2.0 / d)).exp()).min(1.0)
}

/// Set partitions of `{0, …, d-1}` as restricted-growth strings, with the
/// coefficient `(-1)^M M!` where `M` counts blocks of size > 1.
fn partitions(d: usize) -> Vec<(Vec<Vec<usize>>, f64)> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; d];
    loop {
        let blocks = rgs.iter().copied().max().map_or(0, |b| b + 1);
        let mut parts = vec![Vec::new(); blocks];
        for (pos, &b) in rgs.iter().enumerate() {
            parts[b].push(pos);
        }
        let m = parts.iter().filter(|b| b.len() > 1).count();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let fact: f64 = (1..=m).map(|k| k as f64).product();
        out.push((parts, sign * fact));
        // next restricted-growth string
        let mut pos = d;
        loop {
            if pos <= 1 {
                return out;
            }
            pos -= 1;
            let prefix_max = rgs[..pos].iter().copied().max().unwrap_or(0);
            if rgs[pos] <= prefix_max {
                rgs[pos] += 1;
                for r in rgs.iter_mut().skip(pos + 1) {
                    *r = 0;
                }
                break;
            }
        }
    }
}

/// How the centering moments `E f(y_i)` and `μ̃_J` were obtained.
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub enum Centering {
    Exact,
    Sampled { samples: usize },
}

/// An evaluable `f_{d,A}` with its centering moments.
#[derive(Clone, Debug)]
pub struct FdaPolynomial {
    spec: PolynomialSpec,
    means: Vec<f64>,
    mu_tilde: BTreeMap<Vec<usize>, f64>,
    entries: Vec<(Vec<usize>, f64)>,
    centering: Centering,
}

impl FdaPolynomial {
    /// Centering moments computed exactly by enumeration.
    pub fn exact(spec: PolynomialSpec, e: &Enumeration) -> Result<Self> {
        check_compatible(&spec, e.num_sites(), e.num_spins())?;
        let probs = e.probabilities();
        let configs: Vec<Configuration> = (0..e.len()).map(|k| e.config(k)).collect();
        let weighted = |g: &dyn Fn(&[Spin]) -> f64| -> f64 {
            configs.iter().zip(probs).map(|(x, p)| p * g(x.as_slice())).sum()
        };
        let values = spec.spin_values.clone();
        let means: Vec<f64> = (0..spec.sites)
            .map(|i| weighted(&|x: &[Spin]| values[x[i] as usize]))
            .collect();
        let subsets = needed_subsets(&spec);
        let mu_tilde = subsets
            .into_iter()
            .map(|j| {
                let v = weighted(&|x: &[Spin]| {
                    j.iter().map(|&i| values[x[i] as usize] - means[i]).product()
                });
                (j, v)
            })
            .collect();
        Ok(FdaPolynomial::assemble(spec, means, mu_tilde, Centering::Exact))
    }

    /// Centering moments estimated from samples (equally weighted).
    pub fn from_samples(spec: PolynomialSpec, samples: &[Vec<Spin>]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParams("no samples for centering".into()));
        }
        if samples.iter().any(|x| x.len() != spec.sites) {
            return Err(Error::InvalidParams("sample length differs from tensor size".into()));
        }
        let n = samples.len() as f64;
        let values = &spec.spin_values;
        let means: Vec<f64> = (0..spec.sites)
            .map(|i| {
                let col: Vec<f64> = samples.iter().map(|x| values[x[i] as usize]).collect();
                stats::sum(&col) / n
            })
            .collect();
        let subsets = needed_subsets(&spec);
        let mu_tilde = subsets
            .into_par_iter()
            .map(|j| {
                let col: Vec<f64> = samples
                    .iter()
                    .map(|x| j.iter().map(|&i| values[x[i] as usize] - means[i]).product())
                    .collect();
                (j, stats::sum(&col) / n)
            })
            .collect();
        Ok(FdaPolynomial::assemble(
            spec,
            means,
            mu_tilde,
            Centering::Sampled {
                samples: samples.len(),
            },
        ))
    }

    fn assemble(
        spec: PolynomialSpec,
        means: Vec<f64>,
        mu_tilde: BTreeMap<Vec<usize>, f64>,
        centering: Centering,
    ) -> Self {
        let entries = spec.entries();
        FdaPolynomial {
            spec,
            means,
            mu_tilde,
            entries,
            centering,
        }
    }

    pub fn spec(&self) -> &PolynomialSpec {
        &self.spec
    }

    pub fn centering(&self) -> Centering {
        self.centering
    }

    /// `E f(y_i)`.
    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// `μ̃_J` for a set of distinct sites.
    pub fn mu_tilde(&self, set: &[usize]) -> f64 {
        let mut key = set.to_vec();
        key.sort_unstable();
        self.mu_tilde.get(&key).copied().unwrap_or(0.0)
    }

    fn centered(&self, x: &[Spin]) -> Vec<f64> {
        x.iter()
            .zip(&self.means)
            .map(|(&s, m)| self.spec.spin_values[s as usize] - m)
            .collect()
    }

    fn mt2(&self, a: usize, b: usize) -> f64 {
        self.mu_tilde(&[a, b])
    }

    /// Evaluates `f_{d,A}(x)`: explicit expansions for `d ≤ 3`, the partition
    /// sum for `d = 4`.
    pub fn evaluate(&self, x: &[Spin]) -> Result<f64> {
        let ft = self.centered(x);
        let value = match self.spec.degree {
            1 => self.entries.iter().map(|(i, a)| a * ft[i[0]]).sum(),
            2 => self
                .entries
                .iter()
                .map(|(idx, a)| {
                    let (i, j) = (idx[0], idx[1]);
                    a * (ft[i] * ft[j] - self.mt2(i, j))
                })
                .sum(),
            3 => self
                .entries
                .iter()
                .map(|(idx, a)| {
                    let (i, j, k) = (idx[0], idx[1], idx[2]);
                    a * (ft[i] * ft[j] * ft[k]
                        - self.mu_tilde(&[i, j, k])
                        - ft[i] * self.mt2(j, k)
                        - ft[j] * self.mt2(i, k)
                        - ft[k] * self.mt2(i, j))
                })
                .sum(),
            _ => return self.evaluate_partition(x),
        };
        Ok(value)
    }

    /// Evaluates `f_{d,A}(x)` through the general partition expansion (`d ≤ 4`).
    pub fn evaluate_partition(&self, x: &[Spin]) -> Result<f64> {
        let d = self.spec.degree;
        if d > MAX_PARTITION_DEGREE {
            return Err(Error::Domain(format!(
                "partition expansion supports degree up to {MAX_PARTITION_DEGREE}, got {d}"
            )));
        }
        let ft = self.centered(x);
        let parts = partitions(d);
        let mut total = 0.0;
        let mut block = Vec::with_capacity(d);
        for (index, a) in &self.entries {
            let mut inner = 0.0;
            for (blocks, coef) in &parts {
                let mut g = *coef;
                for b in blocks {
                    if b.len() == 1 {
                        g *= ft[index[b[0]]];
                    } else {
                        block.clear();
                        block.extend(b.iter().map(|&pos| index[pos]));
                        g *= self.mu_tilde(&block);
                    }
                }
                inner += g;
            }
            total += a * inner;
        }
        Ok(total)
    }

    /// Tabulates `f_{d,A}` on the support of an enumeration.
    pub fn tabulate(&self, e: &Enumeration) -> Result<Vec<f64>> {
        (0..e.len())
            .into_par_iter()
            .map(|k| self.evaluate(e.config(k).as_slice()))
            .collect()
    }

    /// Evaluates on a batch of samples, preserving order.
    pub fn evaluate_many(&self, samples: &[Vec<Spin>]) -> Result<Vec<f64>> {
        samples.par_iter().map(|x| self.evaluate(x)).collect()
    }
}

fn check_compatible(spec: &PolynomialSpec, sites: usize, spins: usize) -> Result<()> {
    if spec.sites != sites {
        return Err(Error::InvalidParams(format!(
            "tensor is over {} sites, system has {sites}",
            spec.sites
        )));
    }
    if spec.spin_values.len() < spins {
        return Err(Error::InvalidParams(format!(
            "spin function defined on {} spins, system has {spins}",
            spec.spin_values.len()
        )));
    }
    Ok(())
}

/// All sets of two or more sites that occur as a block of some nonzero index tuple.
fn needed_subsets(spec: &PolynomialSpec) -> Vec<Vec<usize>> {
    let mut sets = std::collections::BTreeSet::new();
    for (index, _) in spec.entries() {
        let d = index.len();
        for mask in 1u32..(1 << d) {
            if mask.count_ones() < 2 {
                continue;
            }
            let mut set: Vec<usize> = (0..d).filter(|&b| mask >> b & 1 == 1).map(|b| index[b]).collect();
            set.sort_unstable();
            sets.insert(set);
        }
    }
    sets.into_iter().collect()
}

/// `‖f‖_{L^p(μ)}` computed exactly.
pub fn exact_lp(e: &Enumeration, f: &[f64], p: f64) -> f64 {
    let m: f64 = e.probabilities().iter().zip(f).map(|(q, v)| q * v.abs().powf(p)).sum();
    m.powf(1.0 / p)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LpEstimate {
    pub p: f64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
}

/// Monte Carlo `L^p` norm with a percentile bootstrap interval.
pub fn mc_lp(values: &[f64], p: f64, resamples: usize, level: f64, seed: u64) -> LpEstimate {
    let stat = |xs: &[f64]| -> f64 {
        let pw: Vec<f64> = xs.iter().map(|v| v.abs().powf(p)).collect();
        stats::mean(&pw).powf(1.0 / p)
    };
    let estimate = stat(values);
    let (ci_low, ci_high) = stats::bootstrap_ci(values, stat, resamples, level, seed);
    LpEstimate {
        p,
        estimate,
        ci_low,
        ci_high,
        samples: values.len(),
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MomentCheck {
    pub p: f64,
    pub measured: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Exact `‖f_{d,A}‖_p` against the moment bound for each `p`.
pub fn moment_check(poly: &FdaPolynomial, e: &Enumeration, sigma2: f64, ps: &[f64]) -> Result<Vec<MomentCheck>> {
    let table = poly.tabulate(e)?;
    Ok(ps
        .iter()
        .map(|&p| {
            let measured = exact_lp(e, &table, p);
            let bound = moment_bound(poly.spec(), sigma2, p);
            MomentCheck {
                p,
                measured,
                bound,
                holds: measured <= bound,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::SpinSystem;

    fn bits(m: usize) -> Enumeration {
        SpinSystem::uniform(m, 2).enumerate().unwrap()
    }

    #[test]
    fn bell_numbers_and_coefficients() {
        let counts: Vec<usize> = (1..=4).map(|d| partitions(d).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 15]);
        // the two pairings-type partitions of 4 carry +2
        let p4 = partitions(4);
        let pairs = p4.iter().filter(|(b, _)| b.len() == 2 && b.iter().all(|x| x.len() == 2)).count();
        assert_eq!(pairs, 3);
        assert!(p4.iter().filter(|(b, _)| b.len() == 2 && b.iter().all(|x| x.len() == 2)).all(|(_, c)| *c == 2.0));
    }

    #[test]
    fn coordinate_function_differences() {
        let e = bits(3);
        let f = e.tabulate(|x| x.get(1) as f64);
        let x = Configuration::new(vec![0, 1, 0]);
        assert_eq!(h_diff(&e, &f, &x, 1), 1.0);
        assert_eq!(h_diff(&e, &f, &x, 0), 0.0);
        assert!((partial_diff(&e, &f, &x, 1).powi(2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn constant_has_no_differences() {
        let e = bits(3);
        let f = vec![2.5; e.len()];
        let h = h_tensor(&e, &f, 3).unwrap();
        assert!(h.l2.iter().chain(&h.sup).all(|&v| v == 0.0));
    }

    #[test]
    fn diagonal_rejected() {
        let mut t = vec![0.0; 9];
        t[4] = 1.0;
        assert!(matches!(
            PolynomialSpec::new(2, 3, t, vec![0.0, 1.0]),
            Err(Error::DiagonalNonzero { .. })
        ));
    }

    #[test]
    fn degree_one_is_centered_sum() {
        let e = bits(3);
        let spec = PolynomialSpec::new(1, 3, vec![1.0; 3], vec![0.0, 1.0]).unwrap();
        let poly = FdaPolynomial::exact(spec, &e).unwrap();
        let x = [1, 0, 1];
        assert!((poly.evaluate(&x).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn eta_arithmetic() {
        let prof = TailProfile::new(vec![(1, 1.0), (2, 1.0)]).unwrap();
        assert_eq!(prof.eta(4.0), 4.0);
        assert!(multilevel_tail(&prof, 1e-9, 1.0) >= 1.0);
    }

    #[test]
    fn parse_sparse_tensor() {
        let text = "# pairs\n0 1 0.5\n1 0 0.5\n";
        let entries = PolynomialSpec::parse_coordinates(text, 2).unwrap();
        let spec = PolynomialSpec::from_coordinates(2, 2, &entries, vec![0.0, 1.0]).unwrap();
        assert_eq!(spec.get(&[0, 1]), 0.5);
        assert!(PolynomialSpec::parse_coordinates("0 1", 2).is_err());
    }
}
