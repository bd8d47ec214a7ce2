//! Simulation and exact analysis of single-machine scheduling mechanisms
//! with a common deadline and uncertain job lengths.

pub mod analysis;
pub mod cdf;
pub mod engine;
pub mod instances;
pub mod metrics;
pub mod model;
pub mod protocol;
pub mod random;
pub mod rational;
pub mod schedulers;

pub use cdf::{point_mass, sample_length, validate_cdf, LengthCdf, Realization};
pub use engine::{exact_evaluate, monte_carlo, run_once, EngineError, Estimate, EvalResult, Trace};
pub use model::{Instance, Player, Report};
pub use rational::Prob;
pub use schedulers::{SchedulerKind, SchedulerSpec};
