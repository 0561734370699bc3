//! Time-to-solution: `TTS = tau_algo * ceil(log eps / log(1 - p_s))`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::anneal::simulated_anneal;
use crate::error::{Error, Result};
use crate::postprocess::Repairer;
use crate::problem::SynthesisProblem;
use crate::qubo::{to_ising, IsingModel, QuboModel};
use crate::rational::Rational;
use crate::solve::SolverConfig;

/// Repetitions needed to succeed at least once with probability `1 - eps`.
/// `None` when `p = 0`. Ratios within 1e-9 of an integer are snapped to it.
pub fn tts_repeats(p_success: f64, epsilon: f64) -> Option<u64> {
    if p_success <= 0.0 {
        return None;
    }
    if p_success >= 1.0 {
        return Some(1);
    }
    let ratio = epsilon.ln() / (1.0 - p_success).ln();
    let nearest = ratio.round();
    let r = if (ratio - nearest).abs() < 1e-9 { nearest } else { ratio.ceil() };
    Some((r as u64).max(1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TtsMeasurement {
    pub rho: f64,
    pub epsilon: f64,
    pub tau: usize,
    /// Mean seconds per run.
    pub tau_algo: f64,
    pub p_success: f64,
    pub repeats: Option<u64>,
    pub tts_seconds: Option<f64>,
}

impl TtsMeasurement {
    pub fn new(rho: f64, epsilon: f64, tau: usize, tau_algo: f64, p_success: f64) -> Self {
        let repeats = tts_repeats(p_success, epsilon);
        TtsMeasurement { rho, epsilon, tau, tau_algo, p_success, repeats, tts_seconds: repeats.map(|r| r as f64 * tau_algo) }
    }
}

/// One solver run yields the final pathway's cost when it is feasible.
pub trait TtsRunner {
    fn run(&mut self, tau: usize, seed: u64) -> Result<Option<Rational>>;
}

/// A single anneal of `tau` sweeps followed by the repair pipeline.
pub struct AnnealRunner<'a> {
    qubo: &'a QuboModel,
    prob: &'a SynthesisProblem,
    ising: IsingModel,
    repairer: Repairer<'a>,
    config: SolverConfig,
}

impl<'a> AnnealRunner<'a> {
    pub fn new(qubo: &'a QuboModel, prob: &'a SynthesisProblem, config: SolverConfig) -> Result<Self> {
        Ok(AnnealRunner { qubo, prob, ising: to_ising(qubo)?, repairer: Repairer::new(qubo, prob)?, config })
    }

    pub fn qubo(&self) -> &QuboModel {
        self.qubo
    }

    pub fn problem(&self) -> &SynthesisProblem {
        self.prob
    }
}

impl TtsRunner for AnnealRunner<'_> {
    fn run(&mut self, tau: usize, seed: u64) -> Result<Option<Rational>> {
        let config = SolverConfig { sweeps: tau, ..self.config.clone() };
        let schedule = config.schedule_for(&self.ising)?;
        let set = simulated_anneal(&self.ising, &schedule, 1, seed)?;
        let s = self.repairer.repair(0, &set.samples[0].spins, config.postprocess)?;
        Ok(s.feasible.then_some(s.cost))
    }
}

/// For each sweep count, estimate the success probability over `runs` runs
/// and the mean run time (an extra warm-up run is not timed), then the TTS.
pub fn measure_tts(
    runner: &mut dyn TtsRunner,
    min_cost: Rational,
    rho: f64,
    epsilon: f64,
    tau_grid: &[usize],
    runs: usize,
    seed: u64,
) -> Result<Vec<TtsMeasurement>> {
    if runs == 0 || !(epsilon > 0.0 && epsilon < 1.0) || rho < 1.0 {
        return Err(Error::InvalidArgument("need runs >= 1, 0 < epsilon < 1 and rho >= 1".into()));
    }
    let threshold = crate::rational::from_f64_micro(rho) * min_cost;
    let mut out = Vec::with_capacity(tau_grid.len());
    for (g, &tau) in tau_grid.iter().enumerate() {
        let base = seed.wrapping_add((g as u64) << 32);
        runner.run(tau, base.wrapping_add(runs as u64))?;
        let mut successes = 0usize;
        let mut seconds = 0.0;
        for k in 0..runs {
            let start = Instant::now();
            let cost = runner.run(tau, base.wrapping_add(k as u64))?;
            seconds += start.elapsed().as_secs_f64();
            if cost.is_some_and(|c| c <= threshold) {
                successes += 1;
            }
        }
        out.push(TtsMeasurement::new(rho, epsilon, tau, seconds / runs as f64, successes as f64 / runs as f64));
    }
    Ok(out)
}

/// Smallest TTS over the grid.
pub fn min_tts(measurements: &[TtsMeasurement]) -> Option<&TtsMeasurement> {
    measurements
        .iter()
        .filter(|m| m.tts_seconds.is_some())
        .min_by(|a, b| a.tts_seconds.unwrap().total_cmp(&b.tts_seconds.unwrap()))
}
