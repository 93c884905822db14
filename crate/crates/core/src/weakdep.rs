//! Interdependence matrices, operator norms, and `(α_1, α_2)` weak-dependence
//! certificates with the derived constants `ρ_0` (mLSI) and `σ^2` (LSI).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::spectral_norm;
use crate::models::ergm::edge_list;
use crate::models::Model;
use crate::spin::{Enumeration, Spin};

/// Largest table (sites × states × spins) built for exact interdependence.
pub const INTERDEPENDENCE_CAP: usize = 1 << 26;

/// A square nonnegative matrix with zero diagonal, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterdependenceMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl InterdependenceMatrix {
    pub fn zeros(size: usize) -> Self {
        InterdependenceMatrix {
            size,
            entries: vec![0.0; size * size],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        let mut m = InterdependenceMatrix::zeros(size);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != size {
                return Err(Error::InvalidParams("interdependence matrix is not square".into()));
            }
            for (j, &x) in r.iter().enumerate() {
                if !(x >= 0.0) {
                    return Err(Error::InvalidParams(format!("negative entry at ({i},{j})")));
                }
                if i != j {
                    m.entries[i * size + j] = x;
                }
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        if i != j {
            self.entries[i * self.size + j] = value;
        }
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.size.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.size).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// Maximal absolute column sum.
    pub fn norm_1to1(&self) -> f64 {
        (0..self.size)
            .map(|j| (0..self.size).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn norm_2to2(&self) -> Result<f64> {
        let n = self.size;
        spectral_norm(
            n,
            |v| (0..n).map(|i| (0..n).map(|j| self.get(i, j) * v[j]).sum()).collect(),
            |v| (0..n).map(|j| (0..n).map(|i| self.get(i, j) * v[i]).sum()).collect(),
        )
    }

    /// Whether every entry is at most the corresponding entry of `other` (plus `tol`).
    pub fn dominated_by(&self, other: &InterdependenceMatrix, tol: f64) -> bool {
        self.size == other.size
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| *a <= b + tol)
    }
}

/// Total variation distance between two probability vectors.
pub fn tv(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// The minimal interdependence matrix: `J_{ij}` is the largest total variation
/// between conditionals at `i` over context pairs differing only at `j`.
/// Contexts admitting no spin at `i` are skipped.
pub fn exact_interdependence(e: &Enumeration) -> Result<InterdependenceMatrix> {
    let m = e.num_sites();
    let q = e.num_spins();
    let states = e.state_space_size();
    if m.saturating_mul(states).saturating_mul(q) > INTERDEPENDENCE_CAP {
        return Err(Error::CapExceeded {
            states: (m * states) as f64,
            cap: INTERDEPENDENCE_CAP as u64,
        });
    }
    let rows: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            // conditionals at site i, indexed by codes with spin 0 at i
            let cond: Vec<Option<Vec<f64>>> = (0..states)
                .map(|code| {
                    if e.spin_at(code, i) == 0 {
                        e.conditional_at_code(code, i)
                    } else {
                        None
                    }
                })
                .collect();
            let mut row = vec![0.0; m];
            for (j, slot) in row.iter_mut().enumerate() {
                if j == i {
                    continue;
                }
                let mut best: f64 = 0.0;
                for code in 0..states {
                    if e.spin_at(code, i) != 0 || e.spin_at(code, j) != 0 {
                        continue;
                    }
                    let variants: Vec<&Vec<f64>> = (0..q)
                        .filter_map(|s| cond[e.with_spin(code, j, s as Spin)].as_ref())
                        .collect();
                    for a in 0..variants.len() {
                        for b in a + 1..variants.len() {
                            best = best.max(tv(variants[a], variants[b]));
                        }
                    }
                }
                *slot = best;
            }
            row
        })
        .collect();
    InterdependenceMatrix::from_rows(&rows)
}

/// Structured analytic interdependence bounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticJ {
    /// `J = weight · adjacency(graph)` on the vertex set.
    Graph { graph: Graph, weight: f64 },
    /// Sites are the edges of `K_n`; entries depend on whether two edges share a vertex.
    EdgePairs { n: usize, adjacent: f64, disjoint: f64 },
    /// All off-diagonal entries equal `value`.
    Dense { size: usize, value: f64 },
}

impl AnalyticJ {
    pub fn size(&self) -> usize {
        match self {
            AnalyticJ::Graph { graph, .. } => graph.num_vertices(),
            AnalyticJ::EdgePairs { n, .. } => n * n.saturating_sub(1) / 2,
            AnalyticJ::Dense { size, .. } => *size,
        }
    }

    pub fn norm_1to1(&self) -> f64 {
        match self {
            AnalyticJ::Graph { graph, weight } => weight * graph.max_degree() as f64,
            AnalyticJ::EdgePairs {
                n,
                adjacent,
                disjoint,
            } => {
                let n = *n as f64;
                if n < 2.0 {
                    return 0.0;
                }
                adjacent * 2.0 * (n - 2.0) + disjoint * (n - 2.0) * (n - 3.0) / 2.0
            }
            AnalyticJ::Dense { size, value } => value * size.saturating_sub(1) as f64,
        }
    }

    /// Spectral norm. The edge-pair and dense matrices are symmetric,
    /// nonnegative and have constant row sums, so it equals the row sum.
    pub fn norm_2to2(&self) -> Result<f64> {
        match self {
            AnalyticJ::Graph { graph, weight } => {
                let apply = |v: &[f64]| -> Vec<f64> {
                    (0..graph.num_vertices())
                        .map(|i| graph.neighbors(i).iter().map(|&j| weight * v[j]).sum())
                        .collect()
                };
                spectral_norm(graph.num_vertices(), apply, apply)
            }
            _ => Ok(self.norm_1to1()),
        }
    }

    pub fn to_matrix(&self) -> Result<InterdependenceMatrix> {
        let size = self.size();
        if size > 8192 {
            return Err(Error::CapExceeded {
                states: (size * size) as f64,
                cap: 8192 * 8192,
            });
        }
        let mut m = InterdependenceMatrix::zeros(size);
        match self {
            AnalyticJ::Graph { graph, weight } => {
                for &(u, v) in graph.edges() {
                    m.set(u, v, *weight);
                    m.set(v, u, *weight);
                }
            }
            AnalyticJ::EdgePairs {
                n,
                adjacent,
                disjoint,
            } => {
                let edges = edge_list(*n);
                for (a, &(u, v)) in edges.iter().enumerate() {
                    for (b, &(x, y)) in edges.iter().enumerate() {
                        if a != b {
                            let share = u == x || u == y || v == x || v == y;
                            m.set(a, b, if share { *adjacent } else { *disjoint });
                        }
                    }
                }
            }
            AnalyticJ::Dense { value, .. } => {
                for i in 0..size {
                    for j in 0..size {
                        m.set(i, j, *value);
                    }
                }
            }
        }
        Ok(m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateSource {
    Exact,
    Analytic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakDependenceCertificate {
    pub sites: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub rho0: f64,
    pub sigma2: f64,
    pub norm_1to1: f64,
    pub norm_2to2: f64,
    pub source: CertificateSource,
}

impl WeakDependenceCertificate {
    /// `ρ_0 = 2|I|/(α_1 α_2^2)` and `σ^2 = log(1/α_1)/(log 2 · α_1 α_2^2)`.
    pub fn from_constants(
        sites: usize,
        alpha1: f64,
        alpha2: f64,
        norm_1to1: f64,
        norm_2to2: f64,
        source: CertificateSource,
    ) -> Result<Self> {
        if !(alpha1 > 0.0 && alpha1 <= 1.0) {
            return Err(Error::ConditionViolated(format!("alpha1 = {alpha1} not in (0,1]")));
        }
        if !(alpha2 > 0.0 && alpha2 <= 1.0) {
            return Err(Error::ConditionViolated(format!(
                "alpha2 = 1 - ||J||_2 = {alpha2} not in (0,1]"
            )));
        }
        let a = alpha1 * alpha2 * alpha2;
        Ok(WeakDependenceCertificate {
            sites,
            alpha1,
            alpha2,
            rho0: 2.0 * sites as f64 / a,
            sigma2: (1.0 / alpha1).ln() / (std::f64::consts::LN_2 * a),
            norm_1to1,
            norm_2to2,
            source,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificate serializes")
    }
}

/// Certificate from exact enumeration: `α_1 = β̃`, `α_2 = 1 - ‖J‖_{2→2}` with the minimal `J`.
pub fn certify_exact(e: &Enumeration) -> Result<(WeakDependenceCertificate, InterdependenceMatrix)> {
    let j = exact_interdependence(e)?;
    let n1 = j.norm_1to1();
    let n2 = j.norm_2to2()?;
    let alpha1 = e.beta_tilde()?;
    let cert = WeakDependenceCertificate::from_constants(
        e.num_sites(),
        alpha1.min(1.0),
        1.0 - n2,
        n1,
        n2,
        CertificateSource::Exact,
    )?;
    Ok((cert, j))
}

/// Certificate from the model's analytic bounds; requires its condition to hold.
pub fn certify_analytic(model: &Model) -> Result<WeakDependenceCertificate> {
    let cond = model.condition();
    if !cond.holds {
        return Err(Error::ConditionViolated(cond.inequality));
    }
    let j = model.analytic_interdependence();
    let n2 = j.norm_2to2()?;
    WeakDependenceCertificate::from_constants(
        model.num_sites(),
        model.analytic_alpha1(),
        1.0 - n2,
        j.norm_1to1(),
        n2,
        CertificateSource::Analytic,
    )
}

/// `Ent_ν(f) = E f log f - E f log E f` with `0 log 0 = 0`.
pub fn entropy(p: &[f64], f: &[f64]) -> Result<f64> {
    if let Some(x) = f.iter().find(|&&x| x < 0.0 || x.is_nan()) {
        return Err(Error::Domain(format!("entropy of negative value {x}")));
    }
    let xlogx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    let mean: f64 = p.iter().zip(f).map(|(a, b)| a * b).sum();
    let first: f64 = p.iter().zip(f).map(|(a, &b)| a * xlogx(b)).sum();
    Ok((first - xlogx(mean)).max(0.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct TensorizationReport {
    pub trials: usize,
    pub violations: usize,
    pub max_ratio: f64,
}

/// Checks `Ent_μ(f) ≤ (α_1 α_2^2)^{-1} Σ_i ∫ Ent_{μ(·|x̄_i)}(f) dμ` for random
/// positive `f = e^g`, `g` uniform on `[-3, 3]`.
pub fn tensorization_check(
    e: &Enumeration,
    cert: &WeakDependenceCertificate,
    trials: usize,
    seed: u64,
) -> Result<TensorizationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = 1.0 / (cert.alpha1 * cert.alpha2 * cert.alpha2);
    let probs = e.probabilities();
    let q = e.num_spins();
    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    for _ in 0..trials {
        let f: Vec<f64> = (0..e.len()).map(|_| rng.random_range(-3.0..3.0f64).exp()).collect();
        let lhs = entropy(probs, &f)?;
        let mut rhs = 0.0;
        for (idx, &code) in e.codes().iter().enumerate() {
            for i in 0..e.num_sites() {
                let cond = e.conditional_at_code(code, i).expect("supported context");
                let vals: Vec<f64> = (0..q)
                    .map(|s| {
                        e.support_index(e.with_spin(code, i, s as Spin))
                            .map_or(0.0, |t| f[t])
                    })
                    .collect();
                rhs += probs[idx] * entropy(&cond, &vals)?;
            }
        }
        if rhs > 0.0 {
            max_ratio = max_ratio.max(lhs / rhs);
        }
        if lhs > k * rhs + 1e-12 {
            violations += 1;
        }
    }
    Ok(TensorizationReport {
        trials,
        violations,
        max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ColoringParams, HardCoreParams};
    use crate::spin::SpinSystem;

    #[test]
    fn product_measure_has_zero_j() {
        let e = SpinSystem::uniform(3, 2).enumerate().unwrap();
        let (cert, j) = certify_exact(&e).unwrap();
        assert_eq!(j.norm_1to1(), 0.0);
        assert_eq!(j.norm_2to2().unwrap(), 0.0);
        assert!((cert.alpha1 - 0.5).abs() < 1e-12);
        assert_eq!(cert.alpha2, 1.0);
        assert!((cert.rho0 - 12.0).abs() < 1e-12);
        assert!((cert.sigma2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hard_core_k2() {
        let m = HardCoreParams::new(Graph::complete(2), 1.0).unwrap();
        let e = m.system().enumerate().unwrap();
        let j = exact_interdependence(&e).unwrap();
        assert!((j.get(0, 1) - 0.5).abs() < 1e-15);
        assert!((j.get(1, 0) - 0.5).abs() < 1e-15);
        assert_eq!(j.norm_1to1(), 0.5);
        assert!((j.norm_2to2().unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn coloring_edge_j() {
        let m = ColoringParams::new(Graph::complete(2), 3).unwrap();
        let e = m.system().enumerate().unwrap();
        let j = exact_interdependence(&e).unwrap();
        assert!(j.get(0, 1) <= 0.5 + 1e-15);
        assert!((j.get(0, 1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn analytic_coloring_certificate() {
        let m = Model::Coloring(ColoringParams::new(Graph::cycle(5).unwrap(), 5).unwrap());
        let c = certify_analytic(&m).unwrap();
        assert!(c.alpha2 >= 1.0 / 3.0 - 1e-9);
        assert!((c.alpha1 - (3.0f64 / 4.0).powi(2) / 5.0).abs() < 1e-15);
        let bad = Model::Coloring(ColoringParams::new(Graph::cycle(5).unwrap(), 4).unwrap());
        assert!(matches!(certify_analytic(&bad), Err(Error::ConditionViolated(_))));
    }

    #[test]
    fn analytic_norms_match_dense_matrices() {
        let cases = [
            AnalyticJ::Graph {
                graph: Graph::grid(3, 3),
                weight: 0.2,
            },
            AnalyticJ::EdgePairs {
                n: 6,
                adjacent: 0.01,
                disjoint: 0.002,
            },
            AnalyticJ::Dense { size: 7, value: 0.05 },
        ];
        for j in cases {
            let m = j.to_matrix().unwrap();
            assert!((m.norm_1to1() - j.norm_1to1()).abs() < 1e-12);
            assert!((m.norm_2to2().unwrap() - j.norm_2to2().unwrap()).abs() < 1e-8);
            assert!(m.is_symmetric(0.0));
        }
    }

    #[test]
    fn entropy_values() {
        let p = [0.5, 0.5];
        let e = std::f64::consts::E;
        let ent = entropy(&p, &[1.0, e]).unwrap();
        let expect = e / 2.0 - (1.0 + e) / 2.0 * ((1.0 + e) / 2.0).ln();
        assert!((ent - expect).abs() < 1e-15);
        assert!((ent - 0.20626).abs() < 1e-5);
        assert_eq!(entropy(&p, &[3.0, 3.0]).unwrap(), 0.0);
        assert!(entropy(&p, &[-1.0, 1.0]).is_err());
    }
}
