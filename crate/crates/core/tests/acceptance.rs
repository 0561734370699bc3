//! Acceptance suite. Each criterion runs under its time budget and prints one
//! PASS/FAIL line; the process exits non-zero if any criterion fails.
//!
//! `cargo test -p isingpath --test acceptance [AC7 ...]` runs a subset.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_traits::Zero;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use isingpath::anneal::steepest_descent;
use isingpath::bench::{exhaustive_oracle, find_feasible, generate_benchmark, tts_repeats, SizeProfile};
use isingpath::crn::{species_degree, species_depths, NetworkFile};
use isingpath::encoding::encode;
use isingpath::postprocess::adjust_ioflow_report;
use isingpath::qubo::{build_qubo, to_ising};
use isingpath::rational::from_int;
use isingpath::solve::solve;
use isingpath::tune::{make_groups, resolve_penalties, tune, SamplerKind, TuneOptions};
use isingpath::{
    EncodingScheme, GroupingMethod, IsingModel, Pathway, PenaltyAssignment, QuboModel, Rational, Reaction,
    ReactionKind, ReactionNetwork, Species, SolverConfig, SynthesisProblem,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

// ---------------------------------------------------------------------------
// Oracles written independently of the library.

/// `sum_r nu_sr m_r` per species, straight from the stoichiometry maps.
fn residuals(net: &ReactionNetwork, m: &[u64]) -> BTreeMap<String, i64> {
    let mut out: BTreeMap<String, i64> = net.species().iter().map(|s| (s.id.clone(), 0)).collect();
    for (r, &x) in net.reactions().iter().zip(m) {
        for (s, nu) in &r.stoichiometry {
            *out.get_mut(s).unwrap() += nu * x as i64;
        }
    }
    out
}

fn feasible(net: &ReactionNetwork, m: &[u64]) -> bool {
    net.reactions().iter().zip(m).all(|(r, &x)| r.lower_bound <= x && x <= r.upper_bound)
        && residuals(net, m).values().all(|&v| v == 0)
}

fn pathway_cost(net: &ReactionNetwork, m: &[u64]) -> Rational {
    net.reactions()
        .iter()
        .zip(m)
        .map(|(r, &x)| r.unit_cost * Rational::from_integer(x as i128) + if x > 0 { r.fixed_cost } else { Rational::zero() })
        .sum()
}

fn qubo_energy(q: &QuboModel, bits: &[bool]) -> Rational {
    let mut e = q.offset();
    for (&(i, j), c) in q.terms() {
        if bits[i] && bits[j] {
            e += c;
        }
    }
    e
}

/// `H = -sum J s_i s_j - sum h s_i + offset`.
fn ising_energy(m: &IsingModel, s: &[i8]) -> Rational {
    let mut e = m.offset;
    for (&(i, j), c) in &m.couplings {
        e -= c * Rational::from_integer((s[i] * s[j]) as i128);
    }
    for (h, &x) in m.fields.iter().zip(s) {
        e -= h * Rational::from_integer(x as i128);
    }
    e
}

fn bits_of(pattern: u64, n: usize) -> Vec<bool> {
    (0..n).map(|k| pattern >> k & 1 == 1).collect()
}

fn is_partition(groups: &[BTreeSet<String>], all: &BTreeSet<String>) -> bool {
    let mut seen = BTreeSet::new();
    for g in groups {
        for s in g {
            if !seen.insert(s.clone()) {
                return false;
            }
        }
    }
    &seen == all
}

/// Breadth-first search over the species/reaction bipartite graph.
fn connected(net: &ReactionNetwork) -> bool {
    let chem: Vec<&Reaction> = net.reactions().iter().filter(|r| r.kind == ReactionKind::Chemical).collect();
    let Some(first) = chem.first() else { return false };
    let mut seen_r = vec![false; chem.len()];
    let mut seen_s: BTreeSet<&str> = BTreeSet::new();
    let mut queue: VecDeque<&str> = first.stoichiometry.keys().map(String::as_str).collect();
    seen_r[0] = true;
    while let Some(s) = queue.pop_front() {
        if !seen_s.insert(s) {
            continue;
        }
        for (k, r) in chem.iter().enumerate() {
            if !seen_r[k] && r.stoichiometry.contains_key(s) {
                seen_r[k] = true;
                queue.extend(r.stoichiometry.keys().map(String::as_str));
            }
        }
    }
    seen_r.iter().all(|&b| b) && net.species().iter().all(|s| seen_s.contains(s.id.as_str()))
}

fn generated(seed: u64, profile: &SizeProfile) -> Result<SynthesisProblem, String> {
    generate_benchmark(seed, profile).map(|g| g.problem).map_err(err)
}

fn uniform_qubo(prob: &SynthesisProblem, kind: EncodingScheme) -> Result<QuboModel, String> {
    let p = PenaltyAssignment::uniform(prob.network(), kind, prob.penalty_bound().value).map_err(err)?;
    build_qubo(prob, kind, &p).map_err(err)
}

// ---------------------------------------------------------------------------

fn ac1_solvay_fixture() -> Outcome {
    let file = NetworkFile::from_json(&std::fs::read_to_string(fixture("solvay.json")).map_err(err)?).map_err(err)?;
    let prob = SynthesisProblem::from_file(&file).map_err(err)?;
    let net = prob.network();
    let p = file.pathway.clone().ok_or("fixture has no pathway")?;
    let expected = Pathway::from_pairs([
        ("r1", 2),
        ("r2", 1),
        ("r3", 1),
        ("r4", 1),
        ("r5", 1),
        ("in_NaCl", 2),
        ("in_CaCO3", 1),
        ("out_Na2CO3", 1),
        ("out_CaCl2", 1),
    ]);
    ensure!(p == expected, "fixture pathway {p:?}");
    let m = net.dense(&p).map_err(err)?;
    let res = residuals(net, &m);
    ensure!(res.len() == 11, "{} mass-balance equations", res.len());
    ensure!(res.values().all(|&v| v == 0), "residuals {res:?}");
    ensure!(feasible(net, &m), "fixture pathway out of bounds");
    ensure!(isingpath::crn::is_feasible(net, &p).map_err(err)?, "library disagrees on feasibility");
    let mut perturbations = 0;
    for (j, r) in net.reactions().iter().enumerate() {
        if r.kind != ReactionKind::Chemical {
            continue;
        }
        for step in [-1i64, 1] {
            let x = m[j] as i64 + step;
            if x < 0 {
                continue;
            }
            let mut q = m.clone();
            q[j] = x as u64;
            ensure!(residuals(net, &q).values().any(|&v| v != 0), "perturbing {} by {step} keeps balance", r.id);
            ensure!(!isingpath::crn::is_feasible(net, &net.pathway_from_dense(&q)).map_err(err)?, "library feasible");
            perturbations += 1;
        }
    }
    Ok(format!("11 balances hold, {perturbations} perturbations all break one"))
}

/// Small random network: precursors A..C, target T, one or two chemical
/// reactions, inflows and a forced target outflow.
fn random_small_problem(rng: &mut ChaCha8Rng) -> Option<SynthesisProblem> {
    let pre = ["A", "B", "C"];
    let n_pre = rng.gen_range(2..=3);
    let pre = &pre[..n_pre];
    let mut reactions = Vec::new();
    for k in 0..rng.gen_range(1..=2) {
        let n_in = rng.gen_range(1..=n_pre.min(2));
        let reactants: Vec<&str> = pre.choose_multiple(rng, n_in).copied().collect();
        let product = if k == 0 || rng.gen_bool(0.5) {
            "T"
        } else {
            match pre.iter().find(|s| !reactants.contains(s)) {
                Some(s) => s,
                None => "T",
            }
        };
        let mut st: Vec<(&str, i64)> = reactants.iter().map(|&s| (s, -rng.gen_range(1..=2))).collect();
        st.push((product, rng.gen_range(1..=2)));
        reactions.push(
            Reaction::chemical(format!("r{k}"), &st)
                .with_bounds(0, rng.gen_range(1..=2))
                .with_costs(from_int(rng.gen_range(0..=3)), from_int(rng.gen_range(0..=5))),
        );
    }
    for s in pre {
        if rng.gen_bool(0.85) {
            reactions.push(
                Reaction::inflow(format!("in_{s}"), s)
                    .with_bounds(0, rng.gen_range(1..=3))
                    .with_costs(from_int(rng.gen_range(1..=5)), from_int(0)),
            );
        }
    }
    if rng.gen_bool(0.3) {
        let s = pre[rng.gen_range(0..n_pre)];
        reactions.push(Reaction::outflow(format!("out_{s}"), s).with_bounds(0, 1));
    }
    reactions.push(Reaction::outflow("out_T", "T").with_bounds(1, 1));
    let used: BTreeSet<&str> = reactions.iter().flat_map(|r| r.stoichiometry.keys().map(String::as_str)).collect();
    let species = used.iter().map(|&s| Species::new(s)).collect();
    let net = ReactionNetwork::new(species, reactions).ok()?;
    SynthesisProblem::new(net).ok()
}

fn ac2_translation_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut problems = Vec::new();
    while problems.len() < 50 {
        let Some(prob) = random_small_problem(&mut rng) else { continue };
        let Ok(oracle) = exhaustive_oracle(&prob, 1 << 20) else { continue };
        let qubos: Vec<QuboModel> =
            EncodingScheme::ALL.iter().map(|&k| uniform_qubo(&prob, k)).collect::<Result<_, _>>()?;
        if qubos.iter().all(|q| q.num_bits() <= 14) {
            problems.push((prob, oracle, qubos));
        }
    }
    let mut checked = 0;
    for (n, (prob, oracle, qubos)) in problems.iter().enumerate() {
        let net = prob.network();
        for (kind, q) in EncodingScheme::ALL.iter().zip(qubos) {
            let (emin, argmins) = q.exhaustive_minimum(14).map_err(err)?;
            ensure!(emin == oracle.min_cost, "problem {n} {kind}: QUBO minimum {emin} vs C_min {}", oracle.min_cost);
            for bits in &argmins {
                ensure!(qubo_energy(q, bits) == emin, "problem {n} {kind}: energy mismatch");
                ensure!(q.encoding_penalty(bits).map_err(err)? == 0, "problem {n} {kind}: encoding penalty at optimum");
                let m = q.decode_dense(bits).map_err(err)?;
                ensure!(feasible(net, &m), "problem {n} {kind}: optimum decodes to infeasible {m:?}");
                ensure!(pathway_cost(net, &m) == oracle.min_cost, "problem {n} {kind}: decoded cost differs");
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} problem/encoding pairs reach C_min exactly"))
}

fn ac3_encoding_coverage() -> Outcome {
    let mut patterns = 0u64;
    for d in 0..=12u64 {
        for l in [0u64, 3] {
            for kind in EncodingScheme::ALL {
                let ev = encode(l, l + d, kind).map_err(err)?;
                let n = match (kind, d) {
                    (_, 0) => 0,
                    (EncodingScheme::Unary | EncodingScheme::Order, _) => d as usize,
                    (EncodingScheme::Log, _) => (64 - d.leading_zeros()) as usize,
                    (EncodingScheme::OneHot, _) => d as usize + 1,
                };
                ensure!(ev.bit_count == n, "{kind} d={d}: {} bits, expected {n}", ev.bit_count);
                let mut image = BTreeSet::new();
                for pat in 0..1u64 << n {
                    let bits = bits_of(pat, n);
                    let pen = ev.penalty_value(&bits).map_err(err)?;
                    ensure!(pen >= 0, "{kind} d={d}: negative penalty");
                    let ones = bits.iter().filter(|&&b| b).count();
                    let staircase = (1..n).all(|k| !bits[k] || bits[k - 1]);
                    let valid = match kind {
                        EncodingScheme::Order => staircase,
                        EncodingScheme::OneHot => ones == 1 || n == 0,
                        _ => true,
                    };
                    ensure!((pen == 0) == valid, "{kind} d={d} bits {bits:?}: penalty {pen}");
                    if valid {
                        let raw = ev.decode_raw(&bits).map_err(err)?;
                        ensure!(raw >= l as i64 && raw <= (l + d) as i64, "{kind} d={d}: raw {raw} out of range");
                        image.insert(ev.decode(&bits).map_err(err)?);
                    }
                    patterns += 1;
                }
                let want: BTreeSet<u64> = (l..=l + d).collect();
                ensure!(image == want, "{kind} l={l} d={d}: image {image:?}");
            }
        }
    }
    Ok(format!("{patterns} bit patterns enumerated"))
}

fn random_rational(rng: &mut ChaCha8Rng, max: i128) -> Rational {
    Rational::new(rng.gen_range(-max..=max), rng.gen_range(1..=6))
}

fn ac4_qubo_ising_equality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut points = 0u64;
    for k in 0..20 {
        let n = 12 - k % 6;
        let mut terms = BTreeMap::new();
        for i in 0..n {
            for j in i..n {
                if rng.gen_bool(0.4) {
                    terms.insert((i, j), random_rational(&mut rng, 30));
                }
            }
        }
        let q = QuboModel::from_parts(n, terms, random_rational(&mut rng, 10), Vec::new()).map_err(err)?;
        let ising = to_ising(&q).map_err(err)?;
        for pat in 0..1u64 << n {
            let bits = bits_of(pat, n);
            let spins: Vec<i8> = bits.iter().map(|&b| 1 - 2 * b as i8).collect();
            let (eq, es) = (qubo_energy(&q, &bits), ising_energy(&ising, &spins));
            ensure!(eq == es, "model {k} bits {pat:#b}: QUBO {eq} vs Ising {es}");
            points += 1;
        }
    }
    Ok(format!("{points} points equal"))
}

fn random_ising(rng: &mut ChaCha8Rng, n: usize) -> IsingModel {
    let mut couplings = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.5) {
                couplings.insert((i, j), random_rational(rng, 5));
            }
        }
    }
    let fields = (0..n).map(|_| random_rational(rng, 5)).collect();
    IsingModel { num_spins: n, couplings, fields, offset: Rational::zero() }
}

fn ac5_steepest_descent() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..100 {
        let m = random_ising(&mut rng, 10);
        let start: Vec<i8> = (0..10).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
        let out = steepest_descent(&m, &start).map_err(err)?;
        let e = ising_energy(&m, &out);
        ensure!(e <= ising_energy(&m, &start), "model {k}: energy increased");
        for i in 0..10 {
            let mut f = out.clone();
            f[i] = -f[i];
            ensure!(ising_energy(&m, &f) >= e, "model {k}: flipping spin {i} lowers the energy");
        }
        ensure!(steepest_descent(&m, &out).map_err(err)? == out, "model {k}: not idempotent");
    }
    Ok("100 models locally minimal and idempotent".into())
}

fn solvay_network() -> Result<ReactionNetwork, String> {
    let file = NetworkFile::from_json(&std::fs::read_to_string(fixture("solvay.json")).map_err(err)?).map_err(err)?;
    file.to_network().map_err(err)
}

/// Checks one adjustment against the definition: dummies reset to their
/// lower bounds, then each imbalance closed by its species' dummy when the
/// bounds and coefficient allow it.
fn check_adjustment(net: &ReactionNetwork, m: &[u64]) -> Result<(), String> {
    let adj = adjust_ioflow_report(net, &net.pathway_from_dense(m)).map_err(err)?;
    let out = net.dense(&adj.pathway).map_err(err)?;
    let rs = net.reactions();
    let mut reset = m.to_vec();
    for (j, r) in rs.iter().enumerate() {
        if r.kind == ReactionKind::Chemical {
            ensure!(out[j] == m[j], "chemical {} changed", r.id);
        } else {
            reset[j] = r.lower_bound;
        }
        ensure!(out[j] >= r.lower_bound && out[j] <= r.upper_bound, "{} out of bounds", r.id);
    }
    let before = residuals(net, &reset);
    let after = residuals(net, &out);
    let mut stuck = BTreeSet::new();
    for (s, &delta) in &before {
        if delta == 0 {
            ensure!(after[s] == 0, "{s} was balanced");
            continue;
        }
        let want = if delta > 0 { ReactionKind::Outflow } else { ReactionKind::Inflow };
        let dummy = rs.iter().position(|r| r.kind == want && r.stoichiometry.contains_key(s));
        let adjustable = dummy.is_some_and(|j| {
            let nu = rs[j].stoichiometry[s].unsigned_abs();
            delta.unsigned_abs() % nu == 0 && rs[j].lower_bound + delta.unsigned_abs() / nu <= rs[j].upper_bound
        });
        if adjustable {
            ensure!(after[s] == 0, "adjustable imbalance of {s} ({delta}) left at {}", after[s]);
        } else {
            ensure!(after[s] != 0, "unadjustable imbalance of {s} vanished");
            stuck.insert(s.clone());
        }
    }
    let reported: BTreeSet<String> = adj.unbalanced.into_iter().collect();
    ensure!(reported == stuck, "reported {reported:?}, expected {stuck:?}");
    Ok(())
}

fn ac6_ioflow_adjustment() -> Outcome {
    let net = solvay_network()?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut cases = 0;
    for _ in 0..300 {
        let m: Vec<u64> = net.reactions().iter().map(|r| rng.gen_range(r.lower_bound..=r.upper_bound)).collect();
        check_adjustment(&net, &m)?;
        cases += 1;
    }
    // Dummy-only damage on the optimal pathway is repaired completely.
    let mut m = net.dense(&solvay_network_pathway()).map_err(err)?;
    let (i_nacl, i_out) = (net.reaction_index("in_NaCl").unwrap(), net.reaction_index("out_CaCl2").unwrap());
    m[i_nacl] = 5;
    m[i_out] = 0;
    let adj = adjust_ioflow_report(&net, &net.pathway_from_dense(&m)).map_err(err)?;
    ensure!(adj.pathway == solvay_network_pathway(), "dummy damage not repaired: {:?}", adj.pathway);
    // x = 0: the target outflow is forced to 1 and nothing produces Na2CO3.
    let zero: Vec<u64> = net.reactions().iter().map(|r| r.lower_bound).collect();
    check_adjustment(&net, &zero)?;
    let adj = adjust_ioflow_report(&net, &net.pathway_from_dense(&zero)).map_err(err)?;
    let out = net.dense(&adj.pathway).map_err(err)?;
    ensure!(!feasible(&net, &out), "zero pathway became feasible");
    ensure!(adj.unbalanced == vec!["Na2CO3".to_string()], "unbalanced {:?}", adj.unbalanced);
    Ok(format!("{cases} random pathways checked; target deficit stays infeasible"))
}

fn solvay_network_pathway() -> Pathway {
    Pathway::from_pairs([
        ("r1", 2),
        ("r2", 1),
        ("r3", 1),
        ("r4", 1),
        ("r5", 1),
        ("in_NaCl", 2),
        ("in_CaCO3", 1),
        ("out_Na2CO3", 1),
        ("out_CaCl2", 1),
    ])
}

fn ac7_sa_quality() -> Outcome {
    let profile = SizeProfile::tiny();
    let mut solved = 0;
    let mut misses = Vec::new();
    for seed in 0..20u64 {
        let prob = generated(seed, &profile)?;
        ensure!(prob.num_variables() <= 12, "seed {seed}: {} variables", prob.num_variables());
        let oracle = exhaustive_oracle(&prob, 6u128.pow(12)).map_err(err)?;
        let kind = EncodingScheme::Order;
        let groups = make_groups(prob.network(), prob.targets(), GroupingMethod::Unified, kind).map_err(err)?;
        let options = TuneOptions {
            budget: 20,
            n_samples: 50,
            seed,
            solver: SolverConfig::default().with_sweeps(1000),
            ..TuneOptions::default()
        };
        let tuned = tune(&prob, kind, &groups, &options).map_err(err)?;
        let penalties = resolve_penalties(&groups, &tuned.best.lambda).map_err(err)?;
        let q = build_qubo(&prob, kind, &penalties).map_err(err)?;
        let config = SolverConfig::default().with_sweeps(10_000).with_reads(200);
        let (_, report) = solve(&q, &prob, &config, seed).map_err(err)?;
        let limit = oracle.min_cost * from_int(2);
        let hit = report.samples.iter().any(|s| {
            let m = prob.network().dense(&s.pathway).unwrap();
            feasible(prob.network(), &m) && pathway_cost(prob.network(), &m) <= limit
        });
        if hit {
            solved += 1;
        } else {
            let cbar = prob.penalty_bound().value;
            misses.push(format!("{seed} (C_min {}, C_bar {cbar}, lambda {:.3})", oracle.min_cost, tuned.best.lambda[0]));
        }
    }
    ensure!(solved >= 19, "rho = 2 reached on {solved}/20 problems; missed seeds {}", misses.join(", "));
    Ok(format!("rho = 2 reached on {solved}/20 problems"))
}

fn ac8_tts_arithmetic() -> Outcome {
    // Reference values from 60-digit arithmetic on the decimal inputs.
    let vectors: [(f64, f64, u64); 20] = [
        (0.5, 0.01, 7),
        (0.5, 0.25, 2),
        (0.5, 0.125, 3),
        (0.9, 0.01, 2),
        (0.99, 0.01, 1),
        (0.1, 0.01, 44),
        (0.01, 0.01, 459),
        (0.001, 0.001, 6905),
        (0.3, 0.05, 9),
        (0.75, 0.0625, 2),
        (0.2, 0.001, 31),
        (0.999, 0.000001, 2),
        (0.05, 0.1, 45),
        (0.6, 0.01, 6),
        (0.37, 0.0001, 20),
        (0.8, 0.04, 2),
        (0.123456, 0.001, 53),
        (0.999999, 0.01, 1),
        (0.0001, 0.5, 6932),
        (0.42, 0.3, 3),
    ];
    for (p, eps, want) in vectors {
        let got = tts_repeats(p, eps);
        ensure!(got == Some(want), "p={p} eps={eps}: {got:?}, expected {want}");
    }
    let m = isingpath::bench::TtsMeasurement::new(1.0, 0.01, 100, 1.0, 0.5);
    ensure!(m.tts_seconds == Some(7.0), "TTS {:?}", m.tts_seconds);
    Ok("20 vectors exact; (0.5, 0.01) gives 7".into())
}

/// First small-profile problem with at least 20 integer variables.
fn mid_size_problem() -> Result<(u64, SynthesisProblem), String> {
    for seed in 0..200 {
        let prob = generated(seed, &SizeProfile::small())?;
        if prob.num_variables() >= 20 {
            return Ok((seed, prob));
        }
    }
    Err("no mid-size problem in 200 seeds".into())
}

fn ac9_tuning_effectiveness() -> Outcome {
    let (pseed, prob) = mid_size_problem()?;
    let kind = EncodingScheme::Unary;
    let groups = make_groups(prob.network(), prob.targets(), GroupingMethod::Category, kind).map_err(err)?;
    let mut wins = 0;
    for seed in 0..20u64 {
        let run = |sampler| {
            let options = TuneOptions {
                budget: 100,
                sampler,
                n_samples: 20,
                seed,
                solver: SolverConfig::default().with_sweeps(200),
                ..TuneOptions::default()
            };
            tune(&prob, kind, &groups, &options).map(|r| r.best.mean_score).map_err(err)
        };
        let (tpe, random) = (run(SamplerKind::Tpe)?, run(SamplerKind::Random)?);
        if tpe <= random {
            wins += 1;
        }
    }
    ensure!(wins >= 12, "TPE at least as good in {wins}/20 pairs");
    Ok(format!(
        "TPE at least as good in {wins}/20 pairs (problem seed {pseed}, {} variables, {} groups)",
        prob.num_variables(),
        groups.dimension()
    ))
}

fn ac10_grouping_structure() -> Outcome {
    let config = Config { cases: 100, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let profile = SizeProfile::small();
    runner
        .run(&(0u64..1_000_000), |seed| {
            let prob = generate_benchmark(seed, &profile).unwrap().problem;
            let net = prob.network();
            let all: BTreeSet<String> = net.species().iter().map(|s| s.id.clone()).collect();
            let groups = |m| make_groups(net, prob.targets(), m, EncodingScheme::Unary).unwrap();
            let members = |g: &isingpath::ParameterGroups| -> Vec<BTreeSet<String>> {
                g.mass_balance.iter().map(|x| x.members.clone()).collect()
            };

            let unified = groups(GroupingMethod::Unified);
            proptest::prop_assert_eq!(members(&unified), vec![all.clone()]);

            let category = groups(GroupingMethod::Category);
            proptest::prop_assert!(category.mass_balance.len() <= 5);
            proptest::prop_assert!(is_partition(&members(&category), &all));

            let depths = species_depths(net, prob.targets()).unwrap();
            let depth = groups(GroupingMethod::Depth);
            proptest::prop_assert!(is_partition(&members(&depth), &all));
            for g in &depth.mass_balance {
                let want = match g.label.as_str() {
                    "targets" => Some(0),
                    "byproducts" => None,
                    l => Some(l.strip_prefix("depth_").unwrap().parse::<u32>().unwrap()),
                };
                for s in &g.members {
                    proptest::prop_assert_eq!(depths[s], want, "{} in {}", s, g.label);
                }
            }

            let degree = groups(GroupingMethod::Degree);
            proptest::prop_assert!(is_partition(&members(&degree), &all));
            for g in &degree.mass_balance {
                for s in &g.members {
                    let d = species_degree(net, s).unwrap();
                    let label = if d >= 8 { "degree_8+".to_string() } else { format!("degree_{d}") };
                    proptest::prop_assert_eq!(&label, &g.label);
                }
            }
            Ok(())
        })
        .map_err(err)?;
    Ok("100 generated problems".into())
}

fn ac11_generator_conformance() -> Outcome {
    let profile = SizeProfile::small();
    let mut target_counts = BTreeSet::new();
    for seed in 0..100u64 {
        let prob = generated(seed, &profile)?;
        let net = prob.network();
        let targets = prob.targets();
        ensure!((1..=10).contains(&targets.len()), "seed {seed}: {} targets", targets.len());
        target_counts.insert(targets.len());
        for r in net.reactions() {
            let target_out = r.kind == ReactionKind::Outflow && r.stoichiometry.keys().any(|s| targets.contains(s));
            let bounds = if target_out { (1, 1) } else { (0, 5) };
            ensure!((r.lower_bound, r.upper_bound) == bounds, "seed {seed}: {} bounds", r.id);
            let drawn = match r.kind {
                ReactionKind::Chemical => Some(r.fixed_cost),
                ReactionKind::Inflow => Some(r.unit_cost),
                ReactionKind::Outflow => None,
            };
            if let Some(c) = drawn {
                ensure!(c.is_integer() && c >= from_int(1) && c <= from_int(10), "seed {seed}: {} cost {c}", r.id);
            }
        }
        ensure!(connected(net), "seed {seed}: disconnected");
        let upper: Vec<u64> = net.reactions().iter().map(|r| r.upper_bound).collect();
        ensure!(!feasible(net, &upper), "seed {seed}: all-upper pathway is feasible");
        let witness = find_feasible(net, 50_000_000).map_err(|_| format!("seed {seed}: undetermined"))?;
        ensure!(witness.is_some_and(|m| feasible(net, &m)), "seed {seed}: no feasible pathway");
    }
    Ok(format!("100 problems conform; target counts seen {target_counts:?}"))
}

/// Every species gets one inflow and one outflow wide enough to close any
/// imbalance the chemical reactions can cause.
fn fully_adjustable(prob: &SynthesisProblem) -> Result<SynthesisProblem, String> {
    let net = prob.network();
    let chem: Vec<Reaction> = net.reactions().iter().filter(|r| r.kind == ReactionKind::Chemical).cloned().collect();
    let mut reactions = chem.clone();
    for s in net.species() {
        let reach: u64 =
            chem.iter().filter_map(|r| r.stoichiometry.get(&s.id).map(|nu| nu.unsigned_abs() * r.upper_bound)).sum();
        let lower = u64::from(prob.targets().contains(&s.id));
        reactions.push(Reaction::inflow(format!("in_{}", s.id), &s.id).with_bounds(0, reach + 1).with_costs(from_int(3), from_int(0)));
        reactions.push(Reaction::outflow(format!("out_{}", s.id), &s.id).with_bounds(lower, reach + 1));
    }
    let net = ReactionNetwork::new(net.species().to_vec(), reactions).map_err(err)?;
    SynthesisProblem::with_targets(net, prob.targets().clone()).map_err(err)
}

fn ac12_postprocessing_ablation() -> Outcome {
    let kind = EncodingScheme::Unary;
    let config = SolverConfig::default().with_sweeps(500).with_reads(100);
    let mut lines = Vec::new();
    let mut runs = 0;
    for seed in 0..10u64 {
        let prob = generated(seed, &SizeProfile::small())?;
        let constructed = fully_adjustable(&prob)?;
        for (label, p) in [("generated", &prob), ("adjustable", &constructed)] {
            let q = uniform_qubo(p, kind)?;
            let (_, report) = solve(&q, p, &config, seed).map_err(err)?;
            let s = &report.mean_scores;
            let (a, sd, ioa) = (s.annealed, s.steepest_descent.unwrap(), s.ioflow.unwrap());
            ensure!(sd <= a, "seed {seed} {label}: <E>_SD {sd} > <E>_A {a}");
            if label == "adjustable" {
                ensure!(ioa <= sd, "seed {seed} {label}: <E>_IOA {ioa} > <E>_SD {sd}");
            }
            runs += 1;
            if seed < 3 {
                lines.push(format!(
                    "{label} {seed}: A {:.2} SD {:.2} IOA {:.2}",
                    isingpath::rational::to_f64(&a),
                    isingpath::rational::to_f64(&sd),
                    isingpath::rational::to_f64(&ioa)
                ));
            }
        }
    }
    Ok(format!("{runs} runs; {}", lines.join("; ")))
}

// ---------------------------------------------------------------------------

struct Criterion {
    id: &'static str,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

const fn criterion(id: &'static str, name: &'static str, budget_ms: u64, run: fn() -> Outcome) -> Criterion {
    Criterion { id, name, budget: Duration::from_millis(budget_ms), run }
}

fn main() {
    let criteria = [
        criterion("AC1", "Solvay fixture balance", 1, ac1_solvay_fixture),
        criterion("AC2", "translation equivalence", 120_000, ac2_translation_equivalence),
        criterion("AC3", "encoding coverage", 10_000, ac3_encoding_coverage),
        criterion("AC4", "QUBO/Ising energy equality", 10_000, ac4_qubo_ising_equality),
        criterion("AC5", "steepest descent", 5_000, ac5_steepest_descent),
        criterion("AC6", "inflow/outflow adjustment", 1_000, ac6_ioflow_adjustment),
        criterion("AC7", "SA solution quality", 300_000, ac7_sa_quality),
        criterion("AC8", "TTS arithmetic", 1_000, ac8_tts_arithmetic),
        criterion("AC9", "tuning effectiveness", 1_800_000, ac9_tuning_effectiveness),
        criterion("AC10", "grouping structure", 30_000, ac10_grouping_structure),
        criterion("AC11", "generator conformance", 120_000, ac11_generator_conformance),
        criterion("AC12", "postprocessing ablation", 120_000, ac12_postprocessing_ablation),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for c in &criteria {
        if !filters.is_empty() && !filters.iter().any(|f| f == c.id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {:?} budget", c.budget)),
            Err(e) => (false, e),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} {:<4} {:<28} {:>10.3?}  {}",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed,
            detail
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
