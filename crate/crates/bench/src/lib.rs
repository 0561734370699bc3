//! Inputs shared by the benchmarks.

use isingpath::bench::{generate_benchmark, SizeProfile};
use isingpath::qubo::build_qubo;
use isingpath::{EncodingScheme, PenaltyAssignment, QuboModel, SynthesisProblem};

/// Generated problem with its QUBO at the cost-bound penalty.
pub struct Case {
    pub name: String,
    pub problem: SynthesisProblem,
    pub qubo: QuboModel,
}

pub fn case(profile: &str, seed: u64, kind: EncodingScheme) -> Case {
    let profile = SizeProfile::by_name(profile).expect("known profile");
    let problem = generate_benchmark(seed, &profile).expect("generation succeeds").problem;
    let penalties = PenaltyAssignment::uniform(problem.network(), kind, problem.penalty_bound().value).unwrap();
    let qubo = build_qubo(&problem, kind, &penalties).unwrap();
    Case { name: format!("{}-{seed}-{kind}", profile.name), problem, qubo }
}

/// One case per size profile.
pub fn standard_cases(kind: EncodingScheme) -> Vec<Case> {
    vec![case("tiny", 1, kind), case("small", 2, kind), case("medium", 0, kind)]
}
