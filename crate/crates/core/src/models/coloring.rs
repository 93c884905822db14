//! Uniform distribution on proper `k`-colorings of a graph.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spin::{Spin, SpinSystem};
use crate::weakdep::AnalyticJ;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColoringParams {
    pub graph: Graph,
    pub k: usize,
}

impl ColoringParams {
    pub fn new(graph: Graph, k: usize) -> Result<Self> {
        if k == 0 || k > Spin::MAX as usize + 1 {
            return Err(Error::InvalidParams(format!("color count {k} out of range")));
        }
        Ok(ColoringParams { graph, k })
    }

    pub fn max_degree(&self) -> usize {
        self.graph.max_degree()
    }

    pub fn is_proper(&self, x: &[Spin]) -> bool {
        self.graph.edges().iter().all(|&(u, v)| x[u] != x[v])
    }

    /// `k ≥ 2Δ + 1`.
    pub fn condition(&self) -> (f64, bool) {
        let need = 2 * self.max_degree() + 1;
        (need as f64, self.k >= need)
    }

    /// `c(Δ)/k` with `c(Δ) = ((Δ+1)/(Δ+2))^Δ`.
    pub fn analytic_alpha1(&self) -> f64 {
        let d = self.max_degree() as f64;
        ((d + 1.0) / (d + 2.0)).powf(d) / self.k as f64
    }

    /// `J_{vw} = 1{v ~ w} / (Δ + 1)`.
    pub fn analytic_interdependence(&self) -> AnalyticJ {
        AnalyticJ::Graph {
            graph: self.graph.clone(),
            weight: 1.0 / (self.max_degree() as f64 + 1.0),
        }
    }

    /// Greedy proper coloring, available when `k > Δ`.
    pub fn greedy_coloring(&self) -> Result<Vec<Spin>> {
        let n = self.graph.num_vertices();
        let mut x: Vec<Option<Spin>> = vec![None; n];
        for v in 0..n {
            let c = (0..self.k as Spin)
                .find(|c| self.graph.neighbors(v).iter().all(|&w| x[w] != Some(*c)))
                .ok_or(Error::EmptySupport)?;
            x[v] = Some(c);
        }
        Ok(x.into_iter().map(|c| c.expect("assigned")).collect())
    }

    pub fn system(&self) -> SpinSystem {
        let me = self.clone();
        SpinSystem::new(
            format!("coloring(k={}, {:?})", self.k, self.graph),
            self.graph.num_vertices(),
            self.k,
            move |x| if me.is_proper(x) { 0.0 } else { f64::NEG_INFINITY },
        )
    }
}
