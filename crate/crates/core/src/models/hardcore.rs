//! Hard-core model: independent sets weighted by `λ^{#occupied}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spin::{Spin, SpinSystem};
use crate::weakdep::AnalyticJ;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardCoreParams {
    pub graph: Graph,
    pub lambda: f64,
}

impl HardCoreParams {
    pub fn new(graph: Graph, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParams(format!("fugacity {lambda} must be positive")));
        }
        Ok(HardCoreParams { graph, lambda })
    }

    pub fn max_degree(&self) -> usize {
        self.graph.max_degree()
    }

    pub fn is_admissible(&self, x: &[Spin]) -> bool {
        self.graph.edges().iter().all(|&(u, v)| x[u] == 0 || x[v] == 0)
    }

    /// `λ < 1/(Δ-1)`; always true for `Δ ≤ 1`. Returns the threshold.
    pub fn condition(&self) -> (f64, bool) {
        let d = self.max_degree();
        if d <= 1 {
            return (f64::INFINITY, true);
        }
        let t = 1.0 / (d as f64 - 1.0);
        (t, self.lambda < t)
    }

    /// `λ/(1+λ)^{Δ+1}`: an occupied site needs its own update (`λ/(1+λ)`) and
    /// every neighbour empty (each at least `1/(1+λ)`). For `λ ≤ 1` this is at
    /// least `λ/2^{Δ+1}`. Empty sites have conditional probability at least
    /// `1/(1+λ)`, which is larger.
    pub fn analytic_alpha1(&self) -> f64 {
        self.lambda / (1.0 + self.lambda).powi(self.max_degree() as i32 + 1)
    }

    /// `J_{vw} = 1{v ~ w} λ/(1+λ)`.
    pub fn analytic_interdependence(&self) -> AnalyticJ {
        AnalyticJ::Graph {
            graph: self.graph.clone(),
            weight: self.lambda / (1.0 + self.lambda),
        }
    }

    pub fn system(&self) -> SpinSystem {
        let me = self.clone();
        let log_lambda = self.lambda.ln();
        SpinSystem::new(
            format!("hard-core(lambda={}, {:?})", self.lambda, self.graph),
            self.graph.num_vertices(),
            2,
            move |x| {
                if me.is_admissible(x) {
                    log_lambda * x.iter().filter(|&&s| s != 0).count() as f64
                } else {
                    f64::NEG_INFINITY
                }
            },
        )
    }
}
