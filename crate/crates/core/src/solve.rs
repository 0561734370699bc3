//! Annealing followed by the repair pipeline, as one configurable step.

use serde::{Deserialize, Serialize};

use crate::anneal::{default_beta_range, simulated_anneal, AnnealSchedule, SampleSet, ScheduleKind, DEFAULT_SWEEPS};
use crate::error::{Error, Result};
use crate::postprocess::{repair_pipeline, SolveReport};
use crate::problem::SynthesisProblem;
use crate::qubo::{to_ising, IsingModel, QuboModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub sweeps: usize,
    pub reads: usize,
    pub schedule: ScheduleKind,
    pub beta_hot: Option<f64>,
    pub beta_cold: Option<f64>,
    pub delta_scale: Option<f64>,
    pub postprocess: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            sweeps: DEFAULT_SWEEPS,
            reads: 200,
            schedule: ScheduleKind::Geometric,
            beta_hot: None,
            beta_cold: None,
            delta_scale: None,
            postprocess: true,
        }
    }
}

impl SolverConfig {
    pub fn with_sweeps(mut self, sweeps: usize) -> Self {
        self.sweeps = sweeps;
        self
    }

    pub fn with_reads(mut self, reads: usize) -> Self {
        self.reads = reads;
        self
    }

    /// Schedule for `m`; unset betas come from [`default_beta_range`].
    pub fn schedule_for(&self, m: &IsingModel) -> Result<AnnealSchedule> {
        match self.schedule {
            ScheduleKind::Geometric => {
                let (hot, cold) = default_beta_range(m);
                let hot = self.beta_hot.unwrap_or(hot);
                let cold = self.beta_cold.unwrap_or(cold).max(hot);
                AnnealSchedule::geometric(self.sweeps, hot, cold)
            }
            ScheduleKind::InverseLog => {
                let delta = self
                    .delta_scale
                    .ok_or_else(|| Error::InvalidArgument("the inverse-log schedule needs a delta".into()))?;
                AnnealSchedule::inverse_log(self.sweeps, delta)
            }
        }
    }
}

/// Anneal the Ising form of `qubo` and repair every read.
pub fn solve(qubo: &QuboModel, prob: &SynthesisProblem, config: &SolverConfig, seed: u64) -> Result<(SampleSet, SolveReport)> {
    let ising = to_ising(qubo)?;
    let schedule = config.schedule_for(&ising)?;
    let samples = simulated_anneal(&ising, &schedule, config.reads, seed)?;
    let report = repair_pipeline(qubo, prob, &samples, config.postprocess)?;
    Ok((samples, report))
}

/// Anneal a QUBO without a problem attached; only energies and decoded
/// pathways are available.
pub fn sample_qubo(qubo: &QuboModel, config: &SolverConfig, seed: u64) -> Result<SampleSet> {
    let ising = to_ising(qubo)?;
    let schedule = config.schedule_for(&ising)?;
    simulated_anneal(&ising, &schedule, config.reads, seed)
}
