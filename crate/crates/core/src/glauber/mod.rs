//! Glauber dynamics: samplers for large systems and exact semigroup analysis
//! for small ones.

pub mod engine;
pub mod exact;

pub use engine::{
    ColoringDynamics, ErgmDynamics, GlauberEngine, HardCoreDynamics, LocalDynamics, ModelDynamics,
    SystemDynamics, VwErgmDynamics,
};
pub use exact::{default_threshold, mixing_bound, DecayReport, ExactChain, MlsiReport};
