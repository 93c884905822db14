//! Subgraph counts in `G(n, p)`: pattern densities, the Hoeffding
//! decomposition `T_G = Σ_k T_k` and CLT diagnostics.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ergm_stats::{iid_samples, sample_er};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::models::ergm::{edge_index, edge_list, ErgmState};
use crate::models::homs::{binomial, count_injective_homs, falling};
use crate::models::PatternKind;
use crate::spin::Spin;
use crate::stats;

/// Largest pattern analyzed exhaustively.
pub const PATTERN_VERTEX_CAP: usize = 8;

/// Largest number of injective maps `(n)_{|V|}` enumerated for exact terms.
pub const INJECTION_CAP: f64 = 2e7;

/// Structural constants of a pattern graph.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SubgraphPattern {
    pub graph: Graph,
    pub vertices: usize,
    pub edges: usize,
    pub aut_count: u64,
    /// `max_H |E(H)| / |V(H)|`.
    pub density: f64,
    /// `max_{|E(H)| ≥ 2} (2|E(H)| - 1) / (|V(H)| - 2)`; `None` with fewer than two edges.
    pub modified_density: Option<f64>,
    /// `α_k`, the fewest vertices spanned by `k` edges, for `k = 1..=|E|`.
    pub alpha: Vec<usize>,
}

/// Automorphisms, densities and `α_k`. Densities are maximized over vertex
/// subsets; for a fixed vertex set the induced subgraph has the most edges.
pub fn pattern_analyze(g: &Graph) -> Result<SubgraphPattern> {
    let v = g.num_vertices();
    if v > PATTERN_VERTEX_CAP {
        return Err(Error::PatternTooLarge {
            vertices: v,
            cap: PATTERN_VERTEX_CAP,
        });
    }
    if g.num_edges() == 0 || !g.is_connected() {
        return Err(Error::Graph("pattern must be connected with at least one edge".into()));
    }
    let e = g.num_edges();
    let aut_count = count_injective_homs(g, g);
    let mut density: f64 = 0.0;
    let mut modified: Option<f64> = None;
    let mut alpha = vec![usize::MAX; e];
    for mask in 1u64..(1 << v) {
        let size = mask.count_ones() as usize;
        let edges = g.induced_edge_count(mask);
        density = density.max(edges as f64 / size as f64);
        if edges >= 2 {
            let d = (2.0 * edges as f64 - 1.0) / (size as f64 - 2.0);
            modified = Some(modified.map_or(d, |m: f64| m.max(d)));
        }
        for a in alpha.iter_mut().take(edges) {
            *a = (*a).min(size);
        }
    }
    Ok(SubgraphPattern {
        graph: g.clone(),
        vertices: v,
        edges: e,
        aut_count,
        density,
        modified_density: modified,
        alpha,
    })
}

impl SubgraphPattern {
    /// `a = 1 / |Aut(G)|`.
    pub fn a(&self) -> f64 {
        1.0 / self.aut_count as f64
    }

    /// `E T_G = (n)_{|V|} p^{|E|} / |Aut(G)|`.
    pub fn mean(&self, n: usize, p: f64) -> f64 {
        falling(n, self.vertices) * p.powi(self.edges as i32) * self.a()
    }

    /// First-order coefficient `2|E| (n-2)_{|V|-2} p^{|E|-1} / |Aut(G)|`.
    pub fn first_order_coefficient(&self, n: usize, p: f64) -> f64 {
        2.0 * self.edges as f64 * falling(n - 2, self.vertices - 2) * p.powi(self.edges as i32 - 1) * self.a()
    }

    /// The CLT normalization: first-order coefficient times `√(C(n,2) p (1-p))`.
    pub fn normalization(&self, n: usize, p: f64) -> f64 {
        self.first_order_coefficient(n, p) * (binomial(n, 2) * p * (1.0 - p)).sqrt()
    }

    /// `c(n,p) = |E| (n-2)_{|V|-2} p^{|E|-1} √(C(n,2) p (1-p))`.
    pub fn c_np(&self, n: usize, p: f64) -> f64 {
        self.edges as f64
            * falling(n - 2, self.vertices - 2)
            * p.powi(self.edges as i32 - 1)
            * (binomial(n, 2) * p * (1.0 - p)).sqrt()
    }

    /// `n p^{d'(G)} / log^{|E|}(1/p)`; `None` when `d'` is undefined.
    pub fn condition_value(&self, n: usize, p: f64) -> Option<f64> {
        self.modified_density
            .map(|d| n as f64 * p.powf(d) / (1.0 / p).ln().powi(self.edges as i32))
    }
}

/// `T_G(x)` with specialized counts for edges, two-stars and triangles.
pub fn subgraph_count(pattern: &SubgraphPattern, n: usize, x: &[Spin]) -> f64 {
    let state = ErgmState::from_config(n, x);
    subgraph_count_state(pattern, &state)
}

pub fn subgraph_count_state(pattern: &SubgraphPattern, state: &ErgmState) -> f64 {
    match PatternKind::classify(&pattern.graph) {
        PatternKind::Edge => state.edge_count() as f64,
        PatternKind::TwoStar => state.cherry_count() as f64,
        PatternKind::Triangle => state.triangle_count() as f64,
        PatternKind::General(_) => {
            count_injective_homs(&pattern.graph, &state.to_graph()) as f64 / pattern.aut_count as f64
        }
    }
}

/// Edge set of `K_n` as a bit mask (needs `C(n,2) ≤ 64`).
type EdgeMask = u64;

fn spanned_vertices(n: usize, mask: EdgeMask) -> usize {
    let mut seen: u64 = 0;
    for (k, (u, v)) in edge_list(n).into_iter().enumerate() {
        if mask >> k & 1 == 1 {
            seen |= 1 << u | 1 << v;
        }
    }
    seen.count_ones() as usize
}

/// `N_G(F)` for every nonempty set `F` of host edges used by some embedding.
fn embedding_counts(pattern: &SubgraphPattern, n: usize) -> Result<BTreeMap<EdgeMask, u64>> {
    if binomial(n, 2) > 64.0 {
        return Err(Error::CapExceeded {
            states: binomial(n, 2),
            cap: 64,
        });
    }
    let maps = falling(n, pattern.vertices);
    if maps > INJECTION_CAP {
        return Err(Error::CapExceeded {
            states: maps,
            cap: INJECTION_CAP as u64,
        });
    }
    let mut counts = BTreeMap::new();
    let v = pattern.vertices;
    let mut assign = vec![0usize; v];
    let mut used = vec![false; n];
    fn rec(
        depth: usize,
        n: usize,
        pattern: &Graph,
        assign: &mut [usize],
        used: &mut [bool],
        counts: &mut BTreeMap<EdgeMask, u64>,
    ) {
        if depth == assign.len() {
            let image: Vec<usize> = pattern
                .edges()
                .iter()
                .map(|&(a, b)| edge_index(n, assign[a].min(assign[b]), assign[a].max(assign[b])))
                .collect();
            let e = image.len();
            for sub in 1u32..(1 << e) {
                let mask = (0..e)
                    .filter(|&j| sub >> j & 1 == 1)
                    .fold(0u64, |m, j| m | 1 << image[j]);
                *counts.entry(mask).or_insert(0) += 1;
            }
            return;
        }
        for t in 0..n {
            if !used[t] {
                used[t] = true;
                assign[depth] = t;
                rec(depth + 1, n, pattern, assign, used, counts);
                used[t] = false;
            }
        }
    }
    rec(0, n, &pattern.graph, &mut assign, &mut used, &mut counts);
    Ok(counts)
}

/// One coefficient `a p^{|E|-k} N_G(F)` of the order-`k` term.
#[derive(Clone, Debug, PartialEq)]
pub struct HoeffdingEntry {
    pub edges: EdgeMask,
    pub order: usize,
    /// Vertices spanned by `F`.
    pub span: usize,
    /// `a N_G(F)`.
    pub weight: f64,
}

/// The full Hoeffding decomposition of `T_G` on `K_n` for small `n`.
#[derive(Clone, Debug)]
pub struct HoeffdingExpansion {
    pub pattern: SubgraphPattern,
    pub n: usize,
    pub p: f64,
    pub entries: Vec<HoeffdingEntry>,
}

impl HoeffdingExpansion {
    pub fn new(pattern: &SubgraphPattern, n: usize, p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("edge probability {p} not in (0,1)")));
        }
        let counts = embedding_counts(pattern, n)?;
        let a = pattern.a();
        let entries = counts
            .into_iter()
            .map(|(mask, c)| HoeffdingEntry {
                edges: mask,
                order: mask.count_ones() as usize,
                span: spanned_vertices(n, mask),
                weight: a * c as f64,
            })
            .collect();
        Ok(HoeffdingExpansion {
            pattern: pattern.clone(),
            n,
            p,
            entries,
        })
    }

    fn centered_product(&self, mask: EdgeMask, x: &[Spin]) -> f64 {
        let mut prod = 1.0;
        let mut m = mask;
        while m != 0 {
            let k = m.trailing_zeros() as usize;
            prod *= x[k] as f64 - self.p;
            m &= m - 1;
        }
        prod
    }

    /// `T_k(x) = a p^{|E|-k} Σ_{|F|=k} N_G(F) Π_{e∈F} (x_e - p)`, optionally
    /// restricted to sets spanning `α` vertices.
    pub fn term(&self, k: usize, alpha: Option<usize>, x: &[Spin]) -> f64 {
        let scale = self.p.powi(self.pattern.edges as i32 - k as i32);
        scale
            * self
                .entries
                .iter()
                .filter(|e| e.order == k && alpha.is_none_or(|a| e.span == a))
                .map(|e| e.weight * self.centered_product(e.edges, x))
                .sum::<f64>()
    }

    /// `T_0 = E T_G`.
    pub fn mean(&self) -> f64 {
        self.pattern.mean(self.n, self.p)
    }

    /// `‖A^{(k,α)}‖_2` for the symmetric `k`-tensor with entries `a N_G(F) / k!`.
    pub fn tensor_norm(&self, k: usize, alpha: usize) -> f64 {
        let fact: f64 = (1..=k).map(|j| j as f64).product();
        let sq: f64 = self
            .entries
            .iter()
            .filter(|e| e.order == k && e.span == alpha)
            .map(|e| e.weight * e.weight)
            .sum();
        (sq / fact).sqrt()
    }

    /// `(k, α)` pairs that occur.
    pub fn orders(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self.entries.iter().map(|e| (e.order, e.span)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `h_{n,k,α} = c(n,p) / (p^{|E|-k} ‖A^{(k,α)}‖_2)`.
    pub fn h(&self, k: usize, alpha: usize) -> f64 {
        self.pattern.c_np(self.n, self.p)
            / (self.p.powi(self.pattern.edges as i32 - k as i32) * self.tensor_norm(k, alpha))
    }
}

/// Orthonormal basis function `f_S = (p(1-p))^{-|S|/2} Π_{s∈S} (x_s - p)`.
pub fn basis_function(mask: EdgeMask, p: f64, x: &[Spin]) -> f64 {
    let mut prod = 1.0;
    for (k, &s) in x.iter().enumerate() {
        if mask >> k & 1 == 1 {
            prod *= (s as f64 - p) / (p * (1.0 - p)).sqrt();
        }
    }
    prod
}

/// `⟨T_G, f_S⟩` for every `S`, by summing over all `2^{C(n,2)}` graphs (`n ≤ 5`).
pub fn exact_coefficients(pattern: &SubgraphPattern, n: usize, p: f64) -> Result<Vec<f64>> {
    let m = binomial(n, 2) as usize;
    if m > 10 {
        return Err(Error::CapExceeded {
            states: 2f64.powi(m as i32),
            cap: 1 << 10,
        });
    }
    let graphs: Vec<(Vec<Spin>, f64, f64)> = (0..1usize << m)
        .map(|code| {
            let x: Vec<Spin> = (0..m).map(|k| (code >> k & 1) as Spin).collect();
            let ones = code.count_ones() as i32;
            let prob = p.powi(ones) * (1.0 - p).powi(m as i32 - ones);
            let t = subgraph_count(pattern, n, &x);
            (x, prob, t)
        })
        .collect();
    Ok((0..1u64 << m)
        .map(|s| graphs.iter().map(|(x, q, t)| q * t * basis_function(s, p, x)).sum())
        .collect())
}

/// `T_k` from exact basis coefficients.
pub fn exact_term(coefficients: &[f64], k: usize, p: f64, x: &[Spin]) -> f64 {
    coefficients
        .iter()
        .enumerate()
        .filter(|(s, _)| (*s as u64).count_ones() as usize == k)
        .map(|(s, c)| c * basis_function(s as u64, p, x))
        .sum()
}

/// `σ²(p) = (log(1-p) - log p)/(1 - 2p)`, equal to `2 atanh(u)/u` with
/// `u = 1 - 2p`; the value at `p = 1/2` is the limit 2.
pub fn lsi_constant_er(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("edge probability {p} not in (0,1)")));
    }
    let u = 1.0 - 2.0 * p;
    if u.abs() < 1e-6 {
        return Ok(2.0 + 2.0 * u * u / 3.0);
    }
    Ok(2.0 * u.atanh() / u)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CltReport {
    pub pattern: String,
    pub n: usize,
    pub p: f64,
    pub samples: usize,
    pub ks: f64,
    pub condition_value: Option<f64>,
    /// Sample mean and standard deviation of `Σ_{k≥2} T_k / normalization`.
    pub remainder_ratio: f64,
    pub remainder_ratio_std: f64,
    pub normalization: f64,
}

/// Standardized `T_G` and remainder ratio per i.i.d. `G(n,p)` draw.
pub fn clt_samples(pattern: &SubgraphPattern, n: usize, p: f64, samples: usize, seed: u64) -> Vec<(f64, f64)> {
    let mean = pattern.mean(n, p);
    let coef = pattern.first_order_coefficient(n, p);
    let norm = pattern.normalization(n, p);
    let edges = binomial(n, 2);
    iid_samples(samples, seed, |rng| {
        let s = sample_er(n, p, rng);
        let t = subgraph_count_state(pattern, &s);
        let t1 = coef * (s.edge_count() as f64 - edges * p);
        ((t - mean) / norm, (t - mean - t1) / norm)
    })
}

pub fn clt_experiment(
    name: &str,
    pattern: &SubgraphPattern,
    n: usize,
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<CltReport> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("edge probability {p} not in (0,1)")));
    }
    if n < pattern.vertices {
        return Err(Error::InvalidParams("pattern larger than the host graph".into()));
    }
    let pairs = clt_samples(pattern, n, p, samples, seed);
    let (z, r): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(CltReport {
        pattern: name.to_string(),
        n,
        p,
        samples,
        ks: stats::ks_normal(&z),
        condition_value: pattern.condition_value(n, p),
        remainder_ratio: stats::mean(&r),
        remainder_ratio_std: stats::std_dev(&r),
        normalization: pattern.normalization(n, p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn analyze(name: &str) -> SubgraphPattern {
        pattern_analyze(&Graph::pattern(name).unwrap()).unwrap()
    }

    #[test]
    fn triangle_constants() {
        let k3 = analyze("triangle");
        assert_eq!(k3.aut_count, 6);
        assert_eq!(k3.density, 1.0);
        assert_eq!(k3.modified_density, Some(5.0));
        assert_eq!(k3.alpha, vec![2, 3, 3]);
    }

    #[test]
    fn edge_and_path_constants() {
        let k2 = analyze("edge");
        assert_eq!(k2.aut_count, 2);
        assert_eq!(k2.density, 0.5);
        assert_eq!(k2.modified_density, None);
        assert_eq!(analyze("path3").aut_count, 2);
    }

    #[test]
    fn counts_on_small_hosts() {
        let k3 = analyze("triangle");
        assert_eq!(subgraph_count(&k3, 4, &[1; 6]), 4.0);
        let p3 = analyze("2star");
        assert_eq!(subgraph_count(&p3, 3, &[1; 3]), 3.0);
    }

    #[test]
    fn first_order_weight() {
        let k3 = analyze("triangle");
        // (n-2) p^2 with n = 4, p = 1/2
        assert!((k3.first_order_coefficient(4, 0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lsi_constant_values() {
        assert_eq!(lsi_constant_er(0.5).unwrap(), 2.0);
        let p = 0.2;
        let direct = ((1.0f64 - p).ln() - p.ln()) / (1.0 - 2.0 * p);
        assert!((lsi_constant_er(p).unwrap() - direct).abs() < 1e-14);
        assert!((lsi_constant_er(p).unwrap() - lsi_constant_er(1.0 - p).unwrap()).abs() < 1e-14);
        assert!(lsi_constant_er(0.0).is_err());
    }
}
