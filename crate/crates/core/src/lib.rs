//! Simulation and verification tools for finite spin systems: exact Gibbs
//! measures, Glauber dynamics, weak-dependence certificates, concentration
//! of polynomial statistics, and subgraph-count statistics of random graphs.

pub mod concentration;
pub mod ergm_stats;
pub mod error;
pub mod experiment;
pub mod glauber;
pub mod graph;
pub mod hoeffding;
pub mod linalg;
pub mod models;
pub mod spin;
pub mod stats;
pub mod weakdep;

pub use error::{Error, Result};
pub use graph::Graph;
pub use models::Model;
pub use spin::{Configuration, ConditionalDistribution, Enumeration, Spin, SpinSystem};
pub use weakdep::{AnalyticJ, InterdependenceMatrix, WeakDependenceCertificate};
