//! Chemical synthesis planning as QUBO/Ising optimization.
//!
//! A reaction network with bounded integer multiplicities is encoded into a
//! QUBO whose minimum is the least-cost mass-balanced pathway, sampled with
//! simulated annealing, repaired by local post-processing, and tuned over the
//! penalty strengths.

pub mod anneal;
pub mod bench;
pub mod crn;
pub mod encoding;
pub mod error;
pub mod postprocess;
pub mod problem;
pub mod qubo;
pub mod rational;
pub mod solve;
pub mod tune;

pub use crn::{Pathway, Reaction, ReactionKind, ReactionNetwork, Species, SpeciesRole};
pub use encoding::{EncodedVariable, EncodingScheme};
pub use error::{Error, Result};
pub use problem::{CostBreakdown, PenaltyBound, SynthesisProblem};
pub use qubo::{IsingModel, PenaltyAssignment, QuboModel};
pub use rational::Rational;
pub use anneal::{AnnealSchedule, SampleSet};
pub use postprocess::SolveReport;
pub use solve::SolverConfig;
pub use tune::{GroupingMethod, ParameterGroups, TuningTrial};
