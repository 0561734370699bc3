//! Benchmarking: exact oracle, problem generator, time-to-solution and the
//! penalty-to-cost diagnostics.

mod generate;
mod oracle;
mod tts;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::qubo::PenaltyAssignment;
use crate::rational::Rational;

pub use generate::{generate_benchmark, GeneratedProblem, SizeProfile, HUB_DEGREE, MAX_COST, MIN_COST};
pub use oracle::{exhaustive_oracle, find_feasible, search_space_size, OracleResult, DEFAULT_ORACLE_LIMIT};
pub use tts::{measure_tts, min_tts, tts_repeats, AnnealRunner, TtsMeasurement, TtsRunner};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyDiagnostics {
    #[serde(with = "crate::rational::serde_decimal")]
    pub m_max: Rational,
    #[serde(default, with = "crate::postprocess::opt_decimal", skip_serializing_if = "Option::is_none")]
    pub delta: Option<Rational>,
    /// `delta` came from sampled solutions and only bounds the true gap from above.
    pub delta_is_estimate: bool,
    #[serde(default, with = "crate::postprocess::opt_decimal", skip_serializing_if = "Option::is_none")]
    pub ratio_delta: Option<Rational>,
    #[serde(default, with = "crate::postprocess::opt_decimal", skip_serializing_if = "Option::is_none")]
    pub ratio_min_cost: Option<Rational>,
}

/// `M_max / delta` and `M_max / C_min`. Without an exact second-best cost,
/// `delta` is estimated from the cheapest sampled feasible cost above `C_min`.
pub fn penalty_cost_diagnostics(
    penalties: &PenaltyAssignment,
    oracle: &OracleResult,
    sampled_feasible_costs: &[Rational],
) -> PenaltyDiagnostics {
    let m_max = penalties.max_strength();
    let (delta, delta_is_estimate) = match oracle.delta() {
        Some(d) => (Some(d), false),
        None => {
            let next = sampled_feasible_costs.iter().filter(|&&c| c > oracle.min_cost).min();
            (next.map(|c| c - oracle.min_cost), next.is_some())
        }
    };
    let ratio = |d: Rational| (!d.is_zero()).then(|| m_max / d);
    PenaltyDiagnostics {
        m_max,
        delta,
        delta_is_estimate,
        ratio_delta: delta.and_then(ratio),
        ratio_min_cost: ratio(oracle.min_cost),
    }
}
