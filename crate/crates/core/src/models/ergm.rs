//! Exponential random graph models on `{0,1}^{I_n}`, with
//! `H(x) = n^2 Σ_i β_i N_{G_i}(x) / n^{|V_i|}`.
//!
//! Homomorphism counts use ordered injective vertex maps throughout. With
//! this convention the single-edge model has edge probability
//! `e^{2β_1} / (1 + e^{2β_1})`.

use serde::Serialize;

use super::homs::{
    binomial, count_homs_using_edge, count_injective_homs, falling, kn_count_using_edge,
    kn_count_using_edges,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spin::{Spin, SpinSystem};
use crate::weakdep::AnalyticJ;

/// Pattern shapes with dedicated local counting.
#[derive(Clone, Debug, PartialEq)]
pub enum PatternKind {
    Edge,
    TwoStar,
    Triangle,
    General(Graph),
}

impl PatternKind {
    pub fn classify(g: &Graph) -> PatternKind {
        match (g.num_vertices(), g.num_edges()) {
            (2, 1) => PatternKind::Edge,
            (3, 2) => PatternKind::TwoStar,
            (3, 3) => PatternKind::Triangle,
            _ => PatternKind::General(g.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErgmParams {
    pub n: usize,
    pub betas: Vec<f64>,
    pub patterns: Vec<Graph>,
}

/// Index of edge `{u, v}` in the lexicographic order of `I_n`.
pub fn edge_index(n: usize, u: usize, v: usize) -> usize {
    let (u, v) = if u < v { (u, v) } else { (v, u) };
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

/// All edges of `K_n` in lexicographic order.
pub fn edge_list(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            out.push((u, v));
        }
    }
    out
}

/// The graph whose edges are the sites set to 1.
pub fn config_to_graph(n: usize, x: &[Spin]) -> Graph {
    let edges: Vec<(usize, usize)> = edge_list(n)
        .into_iter()
        .zip(x)
        .filter(|(_, &s)| s != 0)
        .map(|(e, _)| e)
        .collect();
    Graph::from_edges(n, &edges).expect("edge list of K_n is simple")
}

pub fn graph_to_config(g: &Graph) -> Vec<Spin> {
    let n = g.num_vertices();
    let mut x = vec![0; n * n.saturating_sub(1) / 2];
    for &(u, v) in g.edges() {
        x[edge_index(n, u, v)] = 1;
    }
    x
}

impl ErgmParams {
    pub fn new(n: usize, betas: Vec<f64>, patterns: Vec<Graph>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams("ERGM needs n >= 2".into()));
        }
        if betas.is_empty() || betas.len() != patterns.len() {
            return Err(Error::InvalidParams(format!(
                "{} betas for {} patterns",
                betas.len(),
                patterns.len()
            )));
        }
        if PatternKind::classify(&patterns[0]) != PatternKind::Edge {
            return Err(Error::InvalidParams("the first pattern must be a single edge".into()));
        }
        for (i, g) in patterns.iter().enumerate() {
            if g.num_edges() == 0 || !g.is_connected() {
                return Err(Error::InvalidParams(format!("pattern {i} is not connected")));
            }
        }
        if betas.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParams("betas must be finite".into()));
        }
        Ok(ErgmParams { n, betas, patterns })
    }

    /// Edge + triangle model with parameters `(β_1, β_2)`.
    pub fn edge_triangle(n: usize, beta1: f64, beta2: f64) -> Self {
        ErgmParams::new(n, vec![beta1, beta2], vec![Graph::complete(2), Graph::complete(3)])
            .expect("valid edge-triangle parameters")
    }

    /// Erdős–Rényi graph with edge probability `p`, as `β_1 = logit(p) / 2`.
    pub fn erdos_renyi(n: usize, p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParams(format!("edge probability {p} not in (0,1)")));
        }
        ErgmParams::new(n, vec![0.5 * (p / (1.0 - p)).ln()], vec![Graph::complete(2)])
    }

    pub fn num_sites(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    pub fn kinds(&self) -> Vec<PatternKind> {
        self.patterns.iter().map(PatternKind::classify).collect()
    }

    /// Edge probability of the `s = 1` model.
    pub fn edge_probability(&self) -> f64 {
        sigmoid(2.0 * self.betas[0])
    }

    /// Scale `n^{2 - |V_i|}` of pattern `i` in the Hamiltonian.
    pub fn scale(&self, i: usize) -> f64 {
        (self.n as f64).powi(2 - self.patterns[i].num_vertices() as i32)
    }

    /// `H(x)` from scratch.
    pub fn hamiltonian(&self, x: &[Spin]) -> f64 {
        let host = config_to_graph(self.n, x);
        self.hamiltonian_of_graph(&host)
    }

    pub fn hamiltonian_of_graph(&self, host: &Graph) -> f64 {
        self.patterns
            .iter()
            .zip(&self.betas)
            .enumerate()
            .map(|(i, (g, b))| b * self.scale(i) * count_injective_homs(g, host) as f64)
            .sum()
    }

    /// `∂_e H(x) = H(x_{e+}) - H(x_{e-})` evaluated from scratch.
    pub fn discrete_derivative_bruteforce(&self, x: &[Spin], e: usize) -> f64 {
        let mut y = x.to_vec();
        y[e] = 1;
        let plus = self.hamiltonian(&y);
        y[e] = 0;
        plus - self.hamiltonian(&y)
    }

    /// `∂_e H(x) = Σ_i β_i n^{2-|V_i|} N_{G_i}(x_{e+}, e)` via pinned counting.
    pub fn discrete_derivative(&self, x: &[Spin], e: usize) -> f64 {
        let (u, v) = edge_list(self.n)[e];
        let mut y = x.to_vec();
        y[e] = 1;
        let host = config_to_graph(self.n, &y);
        self.patterns
            .iter()
            .zip(&self.betas)
            .enumerate()
            .map(|(i, (g, b))| b * self.scale(i) * count_homs_using_edge(g, &host, (u, v)) as f64)
            .sum()
    }

    /// `Φ_β(x) = Σ_i β_i |E_i| x^{|E_i| - 1}`.
    pub fn big_phi(&self, x: f64) -> f64 {
        self.patterns
            .iter()
            .zip(&self.betas)
            .map(|(g, b)| b * g.num_edges() as f64 * x.powi(g.num_edges() as i32 - 1))
            .sum()
    }

    /// `φ_β(x) = e^{2Φ(x)} / (1 + e^{2Φ(x)})`.
    pub fn phi(&self, x: f64) -> f64 {
        sigmoid(2.0 * self.big_phi(x))
    }

    /// `½ Φ'_{|β|}(1) = ½ Σ_{i≥2} |β_i| |E_i| (|E_i| - 1)`.
    pub fn condition_value(&self) -> f64 {
        0.5 * self
            .patterns
            .iter()
            .zip(&self.betas)
            .skip(1)
            .map(|(g, b)| {
                let e = g.num_edges() as f64;
                b.abs() * e * (e - 1.0)
            })
            .sum::<f64>()
    }

    /// `B = 2|β_1| + Σ_{i≥2} |β_i| n^{2-|V_i|} N_{G_i}(K_n, e)`, a bound on `|∂_e H|`.
    pub fn derivative_bound(&self) -> f64 {
        2.0 * self.betas[0].abs()
            + (1..self.patterns.len())
                .map(|i| {
                    self.betas[i].abs() * self.scale(i) * kn_count_using_edge(&self.patterns[i], self.n)
                })
                .sum::<f64>()
    }

    /// `α_1 = 1 / (1 + e^B)`, the smallest conditional probability allowed by `|∂_e H| ≤ B`.
    pub fn analytic_alpha1(&self) -> f64 {
        sigmoid(-self.derivative_bound())
    }

    /// `J_{fe} = (n^2/4) Σ_{i≥2} |β_i| N_{G_i}(K_n, f, e) / n^{|V_i|}`.
    pub fn analytic_interdependence(&self) -> AnalyticJ {
        let mut adjacent = 0.0;
        let mut disjoint = 0.0;
        for i in 1..self.patterns.len() {
            let (a, d) = kn_count_using_edges(&self.patterns[i], self.n);
            let w = 0.25 * self.betas[i].abs() * self.scale(i);
            adjacent += w * a;
            disjoint += w * d;
        }
        AnalyticJ::EdgePairs {
            n: self.n,
            adjacent,
            disjoint,
        }
    }

    /// Column sum of the analytic matrix,
    /// `½ Σ_{i≥2} |β_i| |E_i|(|E_i|-1) (n-2)_{|V_i|-2} / n^{|V_i|-2}`.
    pub fn analytic_column_sum(&self) -> f64 {
        0.5 * (1..self.patterns.len())
            .map(|i| {
                let g = &self.patterns[i];
                let e = g.num_edges() as f64;
                let v = g.num_vertices();
                self.betas[i].abs() * e * (e - 1.0) * falling(self.n - 2, v - 2) * self.scale(i)
            })
            .sum::<f64>()
    }

    pub fn system(&self) -> SpinSystem {
        let params = self.clone();
        let name = format!("ergm(n={}, beta={:?})", self.n, self.betas);
        SpinSystem::new(name, self.num_sites(), 2, move |x| params.hamiltonian(x))
    }

    /// Expected triangle count in the `s = 1` model, `C(n,3) p^3`.
    pub fn er_triangle_mean(&self) -> f64 {
        binomial(self.n, 3) * self.edge_probability().powi(3)
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Bitset adjacency with running edge, two-path and triangle counts; the
/// per-step state of ERGM Glauber dynamics.
#[derive(Clone, Debug, PartialEq)]
pub struct ErgmState {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    degree: Vec<u32>,
    edges: u64,
    cherries: u64,
    triangles: u64,
}

impl ErgmState {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        ErgmState {
            n,
            words,
            rows: vec![0; n * words],
            degree: vec![0; n],
            edges: 0,
            cherries: 0,
            triangles: 0,
        }
    }

    pub fn from_config(n: usize, x: &[Spin]) -> Self {
        let mut s = ErgmState::empty(n);
        for (idx, (u, v)) in edge_list(n).into_iter().enumerate() {
            if x[idx] != 0 {
                s.set(u, v, true);
            }
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    pub fn codegree(&self, u: usize, v: usize) -> u32 {
        let a = &self.rows[u * self.words..(u + 1) * self.words];
        let b = &self.rows[v * self.words..(v + 1) * self.words];
        a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
    }

    #[inline]
    pub fn degree(&self, v: usize) -> u32 {
        self.degree[v]
    }

    pub fn edge_count(&self) -> u64 {
        self.edges
    }

    /// `Σ_v C(deg v, 2)`: unordered pairs of edges sharing a vertex.
    pub fn cherry_count(&self) -> u64 {
        self.cherries
    }

    pub fn triangle_count(&self) -> u64 {
        self.triangles
    }

    /// Sets edge `{u,v}`; returns whether it changed.
    #[inline]
    pub fn set(&mut self, u: usize, v: usize, present: bool) -> bool {
        if self.has_edge(u, v) == present {
            return false;
        }
        let c = self.codegree(u, v) as u64;
        let w = self.words;
        if present {
            self.cherries += (self.degree[u] + self.degree[v]) as u64;
            self.triangles += c;
            self.edges += 1;
            self.degree[u] += 1;
            self.degree[v] += 1;
            self.rows[u * w + v / 64] |= 1 << (v % 64);
            self.rows[v * w + u / 64] |= 1 << (u % 64);
        } else {
            self.rows[u * w + v / 64] &= !(1 << (v % 64));
            self.rows[v * w + u / 64] &= !(1 << (u % 64));
            self.degree[u] -= 1;
            self.degree[v] -= 1;
            self.edges -= 1;
            self.triangles -= c;
            self.cherries -= (self.degree[u] + self.degree[v]) as u64;
        }
        true
    }

    pub fn to_config(&self) -> Vec<Spin> {
        edge_list(self.n)
            .into_iter()
            .map(|(u, v)| self.has_edge(u, v) as Spin)
            .collect()
    }

    pub fn to_graph(&self) -> Graph {
        config_to_graph(self.n, &self.to_config())
    }

    /// `N_G(x_{e+}, e)` for the specialized shapes, general patterns by backtracking.
    pub fn pinned_count(&self, kind: &PatternKind, u: usize, v: usize) -> f64 {
        let present = self.has_edge(u, v) as u32;
        match kind {
            PatternKind::Edge => 2.0,
            PatternKind::Triangle => 6.0 * self.codegree(u, v) as f64,
            PatternKind::TwoStar => {
                // degrees in x_{e+}, minus the edge e itself
                let du = self.degree[u] - present;
                let dv = self.degree[v] - present;
                2.0 * (du + dv) as f64
            }
            PatternKind::General(g) => {
                let mut host = self.to_graph();
                if present == 0 {
                    host.add_edge(u, v).expect("edge absent");
                }
                count_homs_using_edge(g, &host, (u, v)) as f64
            }
        }
    }
}

/// `∂_e H` on an incremental state.
pub fn local_derivative(params: &ErgmParams, kinds: &[PatternKind], state: &ErgmState, u: usize, v: usize) -> f64 {
    kinds
        .iter()
        .enumerate()
        .map(|(i, k)| params.betas[i] * params.scale(i) * state.pinned_count(k, u, v))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn edge_indexing_is_lexicographic() {
        let n = 6;
        for (k, (u, v)) in edge_list(n).into_iter().enumerate() {
            assert_eq!(edge_index(n, u, v), k);
            assert_eq!(edge_index(n, v, u), k);
        }
    }

    #[test]
    fn single_edge_derivative_is_constant() {
        let m = ErgmParams::new(4, vec![0.3], vec![Graph::complete(2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x: Vec<u8> = (0..6).map(|_| rng.random_range(0..2)).collect();
            for e in 0..6 {
                assert!((m.discrete_derivative(&x, e) - 0.6).abs() < 1e-12);
            }
        }
        let sys = m.system();
        let c = sys
            .conditional(&crate::spin::Configuration::zeros(6), 2)
            .unwrap();
        let p = (0.6f64).exp() / (1.0 + (0.6f64).exp());
        assert!((c.probabilities[1] - p).abs() < 1e-12);
    }

    #[test]
    fn triangle_derivative_on_k3() {
        let m = ErgmParams::edge_triangle(3, 0.0, 1.0);
        let x = vec![1, 1, 1];
        for e in 0..3 {
            assert!((m.discrete_derivative(&x, e) - 2.0).abs() < 1e-12);
            assert!((m.discrete_derivative_bruteforce(&x, e) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn incremental_matches_bruteforce() {
        let n = 8;
        let m = ErgmParams::new(
            n,
            vec![-0.2, 0.7, -0.4, 0.3],
            vec![
                Graph::complete(2),
                Graph::complete(3),
                Graph::star(2),
                Graph::path(4),
            ],
        )
        .unwrap();
        let kinds = m.kinds();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sites = m.num_sites();
        for _ in 0..200 {
            let x: Vec<u8> = (0..sites).map(|_| rng.random_bool(0.4) as u8).collect();
            let e = rng.random_range(0..sites);
            let (u, v) = edge_list(n)[e];
            let state = ErgmState::from_config(n, &x);
            let fast = local_derivative(&m, &kinds, &state, u, v);
            let slow = m.discrete_derivative_bruteforce(&x, e);
            assert!((fast - slow).abs() < 1e-9 * (1.0 + slow.abs()), "{fast} vs {slow}");
        }
    }

    #[test]
    fn state_counts_track_flips() {
        let n = 8;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut s = ErgmState::empty(n);
        let edges = edge_list(n);
        for _ in 0..10_000 {
            let (u, v) = edges[rng.random_range(0..edges.len())];
            s.set(u, v, rng.random_bool(0.5));
        }
        let g = s.to_graph();
        assert_eq!(s.edge_count() as usize, g.num_edges());
        assert_eq!(s.triangle_count(), count_injective_homs(&Graph::complete(3), &g) / 6);
        assert_eq!(s.cherry_count(), count_injective_homs(&Graph::star(2), &g) / 2);
    }

    #[test]
    fn condition_values() {
        let m = ErgmParams::edge_triangle(100, -0.1, 0.05);
        assert!((m.condition_value() - 0.15).abs() < 1e-15);
        let er = ErgmParams::erdos_renyi(10, 0.3).unwrap();
        assert_eq!(er.condition_value(), 0.0);
        assert!((er.edge_probability() - 0.3).abs() < 1e-12);
        // |β2| < 1 / C(e2, 2)
        let k4 = ErgmParams::new(10, vec![0.0, 0.066], vec![Graph::complete(2), Graph::complete(4)]).unwrap();
        assert!(k4.condition_value() < 1.0);
        let k4 = ErgmParams::new(10, vec![0.0, 0.067], vec![Graph::complete(2), Graph::complete(4)]).unwrap();
        assert!(k4.condition_value() > 1.0);
    }

    #[test]
    fn analytic_column_sum_matches_condition_bound() {
        for n in [5, 20, 100] {
            let m = ErgmParams::edge_triangle(n, -0.1, 0.05);
            let j = m.analytic_interdependence();
            assert!((j.norm_1to1() - m.analytic_column_sum()).abs() < 1e-12);
            assert!(m.analytic_column_sum() <= m.condition_value() + 1e-15);
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ErgmParams::new(4, vec![0.1], vec![Graph::complete(3)]).is_err());
        assert!(ErgmParams::new(4, vec![0.1, 0.2], vec![Graph::complete(2)]).is_err());
        assert!(ErgmParams::erdos_renyi(4, 1.0).is_err());
    }
}
