//! The four concrete spin systems and their analytic weak-dependence data.

pub mod coloring;
pub mod ergm;
pub mod hardcore;
pub mod homs;
pub mod vw_ergm;

use serde::Serialize;

pub use coloring::ColoringParams;
pub use ergm::{ErgmParams, ErgmState, PatternKind};
pub use hardcore::HardCoreParams;
pub use vw_ergm::VwErgmParams;

use crate::spin::{Spin, SpinSystem};
use crate::weakdep::AnalyticJ;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Model {
    Ergm(ErgmParams),
    VwErgm(VwErgmParams),
    Coloring(ColoringParams),
    HardCore(HardCoreParams),
}

/// Outcome of a model's sufficient condition for weak dependence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub value: f64,
    pub holds: bool,
    pub inequality: String,
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Ergm(_) => "ergm",
            Model::VwErgm(_) => "vw_ergm",
            Model::Coloring(_) => "coloring",
            Model::HardCore(_) => "hardcore",
        }
    }

    pub fn system(&self) -> SpinSystem {
        match self {
            Model::Ergm(m) => m.system(),
            Model::VwErgm(m) => m.system(),
            Model::Coloring(m) => m.system(),
            Model::HardCore(m) => m.system(),
        }
    }

    pub fn num_sites(&self) -> usize {
        match self {
            Model::Ergm(m) => m.num_sites(),
            Model::VwErgm(m) => m.n,
            Model::Coloring(m) => m.graph.num_vertices(),
            Model::HardCore(m) => m.graph.num_vertices(),
        }
    }

    pub fn num_spins(&self) -> usize {
        match self {
            Model::Coloring(m) => m.k,
            _ => 2,
        }
    }

    pub fn condition(&self) -> ConditionReport {
        match self {
            Model::Ergm(m) => {
                let v = m.condition_value();
                ConditionReport {
                    value: v,
                    holds: v < 1.0,
                    inequality: format!("1/2 Phi'_|beta|(1) = {v} < 1"),
                }
            }
            Model::VwErgm(m) => {
                let (v, holds) = m.condition();
                ConditionReport {
                    value: v,
                    holds,
                    inequality: format!("sup |phi'_beta| = {v} < 1"),
                }
            }
            Model::Coloring(m) => {
                let (need, holds) = m.condition();
                ConditionReport {
                    value: m.k as f64,
                    holds,
                    inequality: format!("k = {} >= 2*Delta+1 = {need}", m.k),
                }
            }
            Model::HardCore(m) => {
                let (t, holds) = m.condition();
                ConditionReport {
                    value: m.lambda,
                    holds,
                    inequality: format!("lambda = {} < 1/(Delta-1) = {t}", m.lambda),
                }
            }
        }
    }

    pub fn analytic_alpha1(&self) -> f64 {
        match self {
            Model::Ergm(m) => m.analytic_alpha1(),
            Model::VwErgm(m) => m.analytic_alpha1(),
            Model::Coloring(m) => m.analytic_alpha1(),
            Model::HardCore(m) => m.analytic_alpha1(),
        }
    }

    pub fn analytic_interdependence(&self) -> AnalyticJ {
        match self {
            Model::Ergm(m) => m.analytic_interdependence(),
            Model::VwErgm(m) => m.analytic_interdependence(),
            Model::Coloring(m) => m.analytic_interdependence(),
            Model::HardCore(m) => m.analytic_interdependence(),
        }
    }

    /// A supported starting configuration for Glauber dynamics.
    pub fn initial_configuration(&self) -> crate::Result<Vec<Spin>> {
        match self {
            Model::Coloring(m) => m.greedy_coloring(),
            _ => Ok(vec![0; self.num_sites()]),
        }
    }
}
