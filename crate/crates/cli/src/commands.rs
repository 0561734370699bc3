use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use isingpath::bench::{
    exhaustive_oracle, generate_benchmark, measure_tts, min_tts, penalty_cost_diagnostics, AnnealRunner, SizeProfile,
    TtsRunner,
};
use isingpath::crn::{mass_balance_residuals, NetworkFile, PathwayFile};
use isingpath::postprocess::adjust_ioflow_report;
use isingpath::problem::{cost, score};
use isingpath::qubo::{build_qubo, spins_to_bits};
use isingpath::rational::{format_decimal, parse_decimal, serde_decimal, to_f64};
use isingpath::solve::{sample_qubo, solve};
use isingpath::tune::{make_groups, resolve_penalties, tune, SamplerKind, TuneOptions};
use isingpath::{
    EncodingScheme, Pathway, PenaltyAssignment, QuboModel, Rational, SampleSet, SolveReport, SolverConfig,
    SynthesisProblem,
};

use crate::{
    AdjustArgs, AnnealArgs, BenchArgs, CheckArgs, Cli, Command, GenerateArgs, OracleArgs, PenaltyArgs, Sampler,
    SolveArgs, TranslateArgs, TuneArgs,
};

pub fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate(a) => generate(cli, a),
        Command::Check(a) => check(cli, a),
        Command::Translate(a) => translate(cli, a),
        Command::Solve(a) => solve_cmd(cli, a),
        Command::Tune(a) => tune_cmd(cli, a),
        Command::Adjust(a) => adjust(cli, a),
        Command::Oracle(a) => oracle(cli, a),
        Command::Bench(a) => bench(cli, a),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn emit_json<T: Serialize>(cli: &Cli, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(cli, &text)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_network(path: &Path) -> Result<(NetworkFile, SynthesisProblem)> {
    let file = NetworkFile::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let prob = SynthesisProblem::from_file(&file)?;
    Ok((file, prob))
}

/// A pathway file holds `{"multiplicities": {...}}` or the bare map.
fn load_pathway(path: Option<&Path>, file: &NetworkFile) -> Result<Pathway> {
    match path {
        Some(p) => {
            let text = read(p)?;
            if let Ok(f) = serde_json::from_str::<PathwayFile>(&text) {
                return Ok(f.multiplicities);
            }
            serde_json::from_str::<Pathway>(&text).with_context(|| format!("parsing {}", p.display()))
        }
        None => file.pathway.clone().context("no --pathway given and the network file embeds none"),
    }
}

fn generate(cli: &Cli, a: &GenerateArgs) -> Result<()> {
    let profile = SizeProfile::by_name(&a.profile)?;
    let g = generate_benchmark(cli.seed, &profile)?;
    eprintln!(
        "generated {} species, {} reactions, {} targets, {} variables after {} attempts",
        g.problem.network().species().len(),
        g.problem.network().reactions().len(),
        g.problem.targets().len(),
        g.problem.num_variables(),
        g.attempts
    );
    let mut text = g.to_file().to_json()?;
    text.push('\n');
    emit(cli, &text)
}

#[derive(Serialize)]
struct CheckReport {
    feasible: bool,
    within_bounds: bool,
    residuals: BTreeMap<String, i64>,
    unbalanced: Vec<String>,
    cost: isingpath::CostBreakdown,
    #[serde(with = "serde_decimal")]
    score: Rational,
}

fn check(cli: &Cli, a: &CheckArgs) -> Result<()> {
    let (file, prob) = load_network(&a.network)?;
    let p = load_pathway(a.pathway.as_deref(), &file)?;
    let net = prob.network();
    let residuals = mass_balance_residuals(net, &p)?;
    let unbalanced: Vec<String> = residuals.iter().filter(|(_, &v)| v != 0).map(|(k, _)| k.clone()).collect();
    let within_bounds = net.within_bounds_dense(&net.dense(&p)?);
    let report = CheckReport {
        feasible: unbalanced.is_empty() && within_bounds,
        within_bounds,
        residuals,
        unbalanced,
        cost: cost(&prob, &p)?,
        score: score(&prob, &p)?,
    };
    eprintln!(
        "pathway is {} (cost {})",
        if report.feasible { "feasible" } else { "infeasible" },
        format_decimal(&report.cost.total)
    );
    emit_json(cli, &report)
}

/// Written by `tune`, read back by `translate --lambda`.
#[derive(Debug, Serialize, Deserialize)]
struct TunedPenalties {
    grouping: String,
    encoding: EncodingScheme,
    labels: Vec<String>,
    lambda: Vec<f64>,
    mean_score: f64,
    sample_count: usize,
    feasible_count: usize,
    upper: f64,
    widened: bool,
    penalties: PenaltyAssignment,
}

fn penalties_for(prob: &SynthesisProblem, kind: EncodingScheme, a: &PenaltyArgs) -> Result<PenaltyAssignment> {
    if let Some(path) = &a.lambda {
        let t: TunedPenalties =
            serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
        if t.encoding != kind {
            bail!("penalties were tuned for the {} encoding, not {}", t.encoding, kind);
        }
        return Ok(t.penalties);
    }
    let value = match &a.penalty {
        Some(s) => parse_decimal(s)?,
        None => prob.penalty_bound().value,
    };
    Ok(PenaltyAssignment::uniform(prob.network(), kind, value)?)
}

fn translate(cli: &Cli, a: &TranslateArgs) -> Result<()> {
    let (_, prob) = load_network(&a.network)?;
    let kind = EncodingScheme::from(a.encoding);
    let penalties = penalties_for(&prob, kind, &a.penalties)?;
    let qubo = build_qubo(&prob, kind, &penalties)?;
    eprintln!("{} encoding: {} bits, {} terms", kind, qubo.num_bits(), qubo.terms().len());
    let mut text = qubo.to_json()?;
    text.push('\n');
    emit(cli, &text)
}

fn solver_config(a: &AnnealArgs, postprocess: bool) -> SolverConfig {
    SolverConfig {
        sweeps: a.sweeps,
        reads: a.reads,
        schedule: a.schedule.into(),
        beta_hot: a.beta_hot,
        beta_cold: a.beta_cold,
        delta_scale: a.delta,
        postprocess,
    }
}

#[derive(Serialize)]
struct DecodedRead {
    read: usize,
    #[serde(with = "serde_decimal")]
    energy: Rational,
    pathway: Pathway,
}

#[derive(Serialize)]
struct SolveOutput {
    config: SolverConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<SolveReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reads: Option<Vec<DecodedRead>>,
    samples: SampleSet,
}

fn solve_cmd(cli: &Cli, a: &SolveArgs) -> Result<()> {
    let qubo = QuboModel::from_json(&read(&a.qubo)?).with_context(|| format!("parsing {}", a.qubo.display()))?;
    let config = solver_config(&a.anneal, !a.no_postprocess);
    let mut out = match &a.network {
        Some(path) => {
            let (_, prob) = load_network(path)?;
            let (samples, report) = solve(&qubo, &prob, &config, cli.seed)?;
            match report.best_feasible_cost() {
                Some(c) => eprintln!("{} of {} reads feasible, best cost {}", report.feasible_reads, report.num_reads, format_decimal(&c)),
                None => eprintln!("no feasible read among {}", report.num_reads),
            }
            SolveOutput { config: config.clone(), report: Some(report), reads: None, samples }
        }
        None => {
            let samples = sample_qubo(&qubo, &config, cli.seed)?;
            let reads = samples
                .reads()
                .enumerate()
                .map(|(read, r)| {
                    Ok(DecodedRead { read, energy: r.energy, pathway: qubo.decode_sample(&spins_to_bits(&r.spins))? })
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(low) = samples.lowest() {
                eprintln!("{} reads, lowest energy {}", samples.num_reads(), format_decimal(&low.energy));
            }
            SolveOutput { config: config.clone(), report: None, reads: Some(reads), samples }
        }
    };
    if cli.no_timing {
        out.samples.read_seconds.clear();
    }
    emit_json(cli, &out)
}

fn tune_cmd(cli: &Cli, a: &TuneArgs) -> Result<()> {
    let (_, prob) = load_network(&a.network)?;
    let kind = EncodingScheme::from(a.encoding);
    let groups = make_groups(prob.network(), prob.targets(), a.grouping.into(), kind)?;
    let options = TuneOptions {
        budget: a.budget,
        sampler: match a.sampler {
            Sampler::Tpe => SamplerKind::Tpe,
            Sampler::Random => SamplerKind::Random,
        },
        n_samples: a.samples_per_trial,
        seed: cli.seed,
        solver: SolverConfig::default().with_sweeps(a.sweeps),
        ..TuneOptions::default()
    };
    let result = tune(&prob, kind, &groups, &options)?;
    if let Some(path) = &a.history {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        let mut header = vec!["trial".to_string(), "mean_score".into(), "samples".into(), "feasible".into()];
        header.extend(result.labels.iter().map(|l| format!("lambda_{l}")));
        w.write_record(&header)?;
        for t in &result.history {
            let mut row = vec![t.index.to_string(), t.mean_score.to_string(), t.sample_count.to_string(), t.feasible_count.to_string()];
            row.extend(t.lambda.iter().map(|x| x.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
    }
    eprintln!("best mean score {} at trial {}", result.best.mean_score, result.best.index);
    let best = TunedPenalties {
        grouping: a.grouping_name(),
        encoding: kind,
        labels: result.labels.clone(),
        lambda: result.best.lambda.clone(),
        mean_score: result.best.mean_score,
        sample_count: result.best.sample_count,
        feasible_count: result.best.feasible_count,
        upper: result.upper,
        widened: result.widened,
        penalties: resolve_penalties(&groups, &result.best.lambda)?,
    };
    emit_json(cli, &best)
}

impl TuneArgs {
    fn grouping_name(&self) -> String {
        isingpath::GroupingMethod::from(self.grouping).as_str().to_string()
    }
}

#[derive(Serialize)]
struct AdjustOutput {
    pathway: Pathway,
    unbalanced: Vec<String>,
    feasible: bool,
}

fn adjust(cli: &Cli, a: &AdjustArgs) -> Result<()> {
    let (file, prob) = load_network(&a.network)?;
    let p = load_pathway(a.pathway.as_deref(), &file)?;
    let adj = adjust_ioflow_report(prob.network(), &p)?;
    let feasible = isingpath::crn::is_feasible(prob.network(), &adj.pathway)?;
    if !adj.unbalanced.is_empty() {
        eprintln!("could not balance: {}", adj.unbalanced.join(", "));
    }
    emit_json(cli, &AdjustOutput { pathway: adj.pathway, unbalanced: adj.unbalanced, feasible })
}

fn oracle(cli: &Cli, a: &OracleArgs) -> Result<()> {
    let (_, prob) = load_network(&a.network)?;
    let r = exhaustive_oracle(&prob, a.limit)?;
    eprintln!("minimum cost {} ({} optima)", format_decimal(&r.min_cost), r.optimal_pathways.len());
    emit_json(cli, &r)
}

/// Keeps every feasible cost the wrapped runner produces.
struct Recording<'a> {
    inner: AnnealRunner<'a>,
    costs: Vec<Rational>,
}

impl TtsRunner for Recording<'_> {
    fn run(&mut self, tau: usize, seed: u64) -> isingpath::Result<Option<Rational>> {
        let c = self.inner.run(tau, seed)?;
        self.costs.extend(c);
        Ok(c)
    }
}

fn opt_decimal(v: Option<Rational>) -> String {
    v.map(|x| format_decimal(&x)).unwrap_or_default()
}

fn bench(cli: &Cli, a: &BenchArgs) -> Result<()> {
    if a.tau.is_empty() || a.rho.is_empty() {
        bail!("--tau and --rho need at least one value");
    }
    let kind = EncodingScheme::from(a.encoding);
    let mut problems = Vec::new();
    if a.networks.is_empty() {
        let profile = SizeProfile::by_name(&a.profile)?;
        for k in 0..a.count {
            let seed = cli.seed.wrapping_add(k);
            problems.push((format!("{}-{seed}", profile.name), generate_benchmark(seed, &profile)?.problem));
        }
    } else {
        for path in &a.networks {
            problems.push((path.display().to_string(), load_network(path)?.1));
        }
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = [
        "problem", "n_x", "n_species", "n_qubits", "c_min", "delta", "delta_is_estimate", "m_max", "m_max_over_delta",
        "m_max_over_c_min",
    ]
    .map(String::from)
    .to_vec();
    for rho in &a.rho {
        header.extend([format!("p_success_rho{rho}"), format!("repeats_rho{rho}"), format!("tau_rho{rho}")]);
        if !cli.no_timing {
            header.push(format!("tts_seconds_rho{rho}"));
        }
    }
    w.write_record(&header)?;

    for (name, prob) in &problems {
        let oracle = match exhaustive_oracle(prob, a.limit) {
            Ok(o) => o,
            Err(e) => {
                eprintln!("{name}: skipped ({e})");
                continue;
            }
        };
        let penalties = if a.tune_budget > 0 {
            let groups = make_groups(prob.network(), prob.targets(), isingpath::GroupingMethod::Unified, kind)?;
            let options = TuneOptions {
                budget: a.tune_budget,
                n_samples: a.samples_per_trial,
                seed: cli.seed,
                ..TuneOptions::default()
            };
            resolve_penalties(&groups, &tune(prob, kind, &groups, &options)?.best.lambda)?
        } else {
            PenaltyAssignment::uniform(prob.network(), kind, prob.penalty_bound().value)?
        };
        let qubo = build_qubo(prob, kind, &penalties)?;
        let mut runner = Recording { inner: AnnealRunner::new(&qubo, prob, SolverConfig::default())?, costs: Vec::new() };
        let mut row = vec![
            name.clone(),
            prob.num_variables().to_string(),
            prob.network().species().len().to_string(),
            qubo.num_bits().to_string(),
            format_decimal(&oracle.min_cost),
        ];
        let mut per_rho = Vec::new();
        for &rho in &a.rho {
            let ms = measure_tts(&mut runner, oracle.min_cost, rho, a.epsilon, &a.tau, a.runs, cli.seed)?;
            // Without timing, pick the sweep count with the fewest total sweeps.
            let best = if cli.no_timing {
                ms.iter()
                    .filter(|m| m.repeats.is_some())
                    .min_by_key(|m| m.repeats.unwrap().saturating_mul(m.tau as u64))
            } else {
                min_tts(&ms)
            };
            per_rho.push(match best {
                Some(m) => vec![
                    m.p_success.to_string(),
                    m.repeats.unwrap().to_string(),
                    m.tau.to_string(),
                    m.tts_seconds.unwrap().to_string(),
                ],
                None => vec![ms.iter().map(|m| m.p_success).fold(0.0, f64::max).to_string(), String::new(), String::new(), String::new()],
            });
        }
        let diag = penalty_cost_diagnostics(&penalties, &oracle, &runner.costs);
        row.extend([
            opt_decimal(diag.delta),
            diag.delta_is_estimate.to_string(),
            format_decimal(&diag.m_max),
            diag.ratio_delta.map(|r| to_f64(&r).to_string()).unwrap_or_default(),
            diag.ratio_min_cost.map(|r| to_f64(&r).to_string()).unwrap_or_default(),
        ]);
        for mut cells in per_rho {
            if cli.no_timing {
                cells.pop();
            }
            row.extend(cells);
        }
        w.write_record(&row)?;
        eprintln!("{name}: C_min {}", format_decimal(&oracle.min_cost));
    }
    let text = String::from_utf8(w.into_inner()?)?;
    emit(cli, &text)
}
