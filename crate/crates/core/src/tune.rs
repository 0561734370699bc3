//! Penalty-strength tuning: parameter groups, the mean-score objective, and
//! random-search and TPE samplers over `[0, bound]^N`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::crn::species::{categories_dense, depths_dense};
use crate::crn::{ReactionNetwork, SpeciesCategory};
use crate::encoding::{encode, EncodingScheme};
use crate::error::{Error, Result};
use crate::problem::SynthesisProblem;
use crate::qubo::{build_qubo, PenaltyAssignment};
use crate::rational::{self, from_f64_micro, Rational};
use crate::solve::{solve, SolverConfig};

/// Species of degree at least this share one group.
pub const DEGREE_OVERFLOW: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupingMethod {
    Unified,
    Degree,
    Depth,
    Category,
}

impl GroupingMethod {
    pub const ALL: [GroupingMethod; 4] =
        [GroupingMethod::Unified, GroupingMethod::Degree, GroupingMethod::Depth, GroupingMethod::Category];

    pub fn as_str(self) -> &'static str {
        match self {
            GroupingMethod::Unified => "unified",
            GroupingMethod::Degree => "degree",
            GroupingMethod::Depth => "depth",
            GroupingMethod::Category => "category",
        }
    }
}

impl fmt::Display for GroupingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroupingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GroupingMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown grouping method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterGroup {
    pub label: String,
    pub members: BTreeSet<String>,
}

/// Mass-balance groups partition the species; the optional encoding group
/// holds the reactions whose encoding carries a penalty. Parameter `k` of a
/// tuning vector is group `k`, the encoding group last.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterGroups {
    pub method: GroupingMethod,
    pub mass_balance: Vec<ParameterGroup>,
    pub encoding: Option<ParameterGroup>,
}

impl ParameterGroups {
    pub fn dimension(&self) -> usize {
        self.mass_balance.len() + usize::from(self.encoding.is_some())
    }

    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = self.mass_balance.iter().map(|g| g.label.clone()).collect();
        if let Some(g) = &self.encoding {
            out.push(g.label.clone());
        }
        out
    }

    pub fn group_of(&self, species: &str) -> Option<usize> {
        self.mass_balance.iter().position(|g| g.members.contains(species))
    }
}

fn bucketed<K: Ord>(net: &ReactionNetwork, key: impl Fn(usize) -> K, label: impl Fn(&K) -> String) -> Vec<ParameterGroup> {
    let mut buckets: BTreeMap<K, BTreeSet<String>> = BTreeMap::new();
    for (i, s) in net.species().iter().enumerate() {
        buckets.entry(key(i)).or_default().insert(s.id.clone());
    }
    buckets.into_iter().map(|(k, members)| ParameterGroup { label: label(&k), members }).collect()
}

pub fn make_groups(
    net: &ReactionNetwork,
    targets: &BTreeSet<String>,
    method: GroupingMethod,
    kind: EncodingScheme,
) -> Result<ParameterGroups> {
    let t: Vec<usize> = targets
        .iter()
        .map(|id| net.species_index(id).ok_or_else(|| Error::UnknownSpecies(id.clone())))
        .collect::<Result<_>>()?;
    let mass_balance = match method {
        GroupingMethod::Unified => {
            vec![ParameterGroup { label: "all".into(), members: net.species().iter().map(|s| s.id.clone()).collect() }]
        }
        GroupingMethod::Degree => bucketed(
            net,
            |i| net.incident(i).len().min(DEGREE_OVERFLOW),
            |&d| if d == DEGREE_OVERFLOW { format!("degree_{d}+") } else { format!("degree_{d}") },
        ),
        GroupingMethod::Depth => {
            let depth = depths_dense(net, &t);
            // `None` sorts after every depth, so byproducts come last.
            bucketed(
                net,
                |i| depth[i].map_or(u32::MAX, |d| d),
                |&d| match d {
                    0 => "targets".to_string(),
                    u32::MAX => "byproducts".to_string(),
                    d => format!("depth_{d}"),
                },
            )
        }
        GroupingMethod::Category => {
            let cats = categories_dense(net, &t);
            let order = |c: SpeciesCategory| SpeciesCategory::ALL.iter().position(|&x| x == c).unwrap();
            bucketed(net, |i| order(cats[i]), |&k| SpeciesCategory::ALL[k].label().to_string())
        }
    };
    let mut penalized = BTreeSet::new();
    for r in net.reactions() {
        if encode(r.lower_bound, r.upper_bound, kind)?.has_penalty() {
            penalized.insert(r.id.clone());
        }
    }
    let encoding = (!penalized.is_empty()).then(|| ParameterGroup { label: "encoding".into(), members: penalized });
    Ok(ParameterGroups { method, mass_balance, encoding })
}

/// Spread a tuning vector over species and reactions. Values are rounded to
/// a 1e-6 grid.
pub fn resolve_penalties(groups: &ParameterGroups, lambda: &[f64]) -> Result<PenaltyAssignment> {
    if lambda.len() != groups.dimension() {
        return Err(Error::LengthMismatch { expected: groups.dimension(), actual: lambda.len() });
    }
    if let Some(v) = lambda.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::NegativePenalty(format!("tuning value {v}")));
    }
    let mut out = PenaltyAssignment::default();
    for (g, &v) in groups.mass_balance.iter().zip(lambda) {
        let v = from_f64_micro(v);
        for s in &g.members {
            out.mass_balance.insert(s.clone(), v);
        }
    }
    if let Some(g) = &groups.encoding {
        let v = from_f64_micro(lambda[groups.mass_balance.len()]);
        for r in &g.members {
            out.encoding.insert(r.clone(), v);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningTrial {
    pub index: usize,
    pub lambda: Vec<f64>,
    pub mean_score: f64,
    pub sample_count: usize,
    pub feasible_count: usize,
    pub seed: u64,
}

/// Mean final E-score of `n_samples` repaired reads at `lambda`.
pub fn evaluate_lambda(
    prob: &SynthesisProblem,
    kind: EncodingScheme,
    groups: &ParameterGroups,
    lambda: &[f64],
    config: &SolverConfig,
    n_samples: usize,
    seed: u64,
) -> Result<TuningTrial> {
    let penalties = resolve_penalties(groups, lambda)?;
    let qubo = build_qubo(prob, kind, &penalties)?;
    let config = SolverConfig { reads: n_samples, ..config.clone() };
    let (_, report) = solve(&qubo, prob, &config, seed)?;
    Ok(TuningTrial {
        index: 0,
        lambda: lambda.to_vec(),
        mean_score: rational::to_f64(&report.mean_final_score()),
        sample_count: report.num_reads,
        feasible_count: report.feasible_reads,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    Random,
    Tpe,
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(SamplerKind::Random),
            "tpe" => Ok(SamplerKind::Tpe),
            _ => Err(Error::InvalidArgument(format!("unknown sampler {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TpeConfig {
    pub n_startup: usize,
    pub gamma: f64,
    pub n_candidates: usize,
}

impl Default for TpeConfig {
    fn default() -> Self {
        TpeConfig { n_startup: 10, gamma: 0.25, n_candidates: 24 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneOptions {
    pub budget: usize,
    pub sampler: SamplerKind,
    pub n_samples: usize,
    pub seed: u64,
    pub solver: SolverConfig,
    pub tpe: TpeConfig,
}

impl Default for TuneOptions {
    fn default() -> Self {
        TuneOptions {
            budget: 300,
            sampler: SamplerKind::Tpe,
            n_samples: 200,
            seed: 0,
            solver: SolverConfig::default(),
            tpe: TpeConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub labels: Vec<String>,
    pub upper: f64,
    /// The domain was widened past the cost bound.
    pub widened: bool,
    pub best: TuningTrial,
    pub history: Vec<TuningTrial>,
}

fn mix(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Tune penalty strengths over `[0, bound]^N`. Every trial is evaluated with
/// the same annealer seed, so the objective is a fixed function of `lambda`.
pub fn tune(
    prob: &SynthesisProblem,
    kind: EncodingScheme,
    groups: &ParameterGroups,
    options: &TuneOptions,
) -> Result<TuneResult> {
    let bound = prob.penalty_bound();
    let upper = rational::to_f64(&bound.value);
    let eval_seed = mix(options.seed);
    let history = optimize(
        |lambda| {
            evaluate_lambda(prob, kind, groups, lambda, &options.solver, options.n_samples, eval_seed)
                .map(|t| (t.mean_score, t.sample_count, t.feasible_count))
        },
        groups.dimension(),
        upper,
        options,
    )?
    .into_iter()
    .map(|mut t| {
        t.seed = eval_seed;
        t
    })
    .collect::<Vec<_>>();
    let best = best_trial(&history).clone();
    Ok(TuneResult { labels: groups.labels(), upper, widened: bound.widened, best, history })
}

/// Lowest mean score; ties go to the earliest trial.
pub fn best_trial(history: &[TuningTrial]) -> &TuningTrial {
    let mut best = &history[0];
    for t in &history[1..] {
        if t.mean_score < best.mean_score {
            best = t;
        }
    }
    best
}

/// Sampler loop shared by both search strategies. `objective` returns the
/// mean score with sample and feasible counts.
pub fn optimize(
    mut objective: impl FnMut(&[f64]) -> Result<(f64, usize, usize)>,
    dimension: usize,
    upper: f64,
    options: &TuneOptions,
) -> Result<Vec<TuningTrial>> {
    if options.budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    if !(upper.is_finite() && upper > 0.0) {
        return Err(Error::InvalidArgument(format!("bad domain upper bound {upper}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    rng.set_stream(1);
    let mut history: Vec<TuningTrial> = Vec::with_capacity(options.budget);
    for t in 0..options.budget {
        let unit = match options.sampler {
            SamplerKind::Tpe if t >= options.tpe.n_startup.max(1) => {
                let observed: Vec<(Vec<f64>, f64)> =
                    history.iter().map(|h| (h.lambda.iter().map(|v| v / upper).collect(), h.mean_score)).collect();
                tpe_propose(&observed, dimension, &options.tpe, &mut rng)
            }
            _ => (0..dimension).map(|_| rng.gen::<f64>()).collect(),
        };
        let lambda: Vec<f64> = unit.iter().map(|u| (u.clamp(0.0, 1.0) * upper).min(upper)).collect();
        let (mean_score, sample_count, feasible_count) = objective(&lambda)?;
        history.push(TuningTrial { index: t, lambda, mean_score, sample_count, feasible_count, seed: 0 });
    }
    Ok(history)
}

/// Mixture of Gaussians at `points` plus one uniform component on [0, 1].
struct Parzen {
    points: Vec<f64>,
    bandwidth: f64,
}

impl Parzen {
    fn new(points: Vec<f64>) -> Parzen {
        let n = points.len();
        let sigma = if n > 1 {
            let mean = points.iter().sum::<f64>() / n as f64;
            (points.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / n as f64).sqrt()
        } else {
            0.0
        };
        // Scott's rule, floored at 1/min(100, n + 1) so that small or
        // collapsed sets keep exploring.
        let floor = 1.0 / (n as f64 + 1.0).min(100.0);
        let bandwidth = (sigma * (n.max(1) as f64).powf(-0.2)).max(floor);
        Parzen { points, bandwidth }
    }

    fn pdf(&self, x: f64) -> f64 {
        let norm = 1.0 / (self.bandwidth * (2.0 * std::f64::consts::PI).sqrt());
        let kernels: f64 = self.points.iter().map(|p| norm * (-0.5 * ((x - p) / self.bandwidth).powi(2)).exp()).sum();
        (1.0 + kernels) / (self.points.len() + 1) as f64
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let k = rng.gen_range(0..=self.points.len());
        if k == self.points.len() {
            return rng.gen::<f64>();
        }
        // Truncated to [0, 1] by rejection; clamping would pile mass on the edges.
        let normal = Normal::new(self.points[k], self.bandwidth).expect("positive bandwidth");
        for _ in 0..64 {
            let x = normal.sample(rng);
            if (0.0..=1.0).contains(&x) {
                return x;
            }
        }
        self.points[k].clamp(0.0, 1.0)
    }
}

/// One TPE proposal in unit coordinates.
fn tpe_propose(observed: &[(Vec<f64>, f64)], dimension: usize, cfg: &TpeConfig, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut order: Vec<usize> = (0..observed.len()).collect();
    order.sort_by(|&a, &b| observed[a].1.total_cmp(&observed[b].1).then(a.cmp(&b)));
    let n_good = ((cfg.gamma * observed.len() as f64).ceil() as usize).clamp(1, observed.len());
    let (good, bad) = order.split_at(n_good);
    let models: Vec<(Parzen, Parzen)> = (0..dimension)
        .map(|d| {
            let pick = |set: &[usize]| Parzen::new(set.iter().map(|&k| observed[k].0[d]).collect());
            (pick(good), pick(bad))
        })
        .collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..cfg.n_candidates.max(1) {
        let x: Vec<f64> = models.iter().map(|(g, _)| g.sample(rng)).collect();
        let score: f64 = models.iter().zip(&x).map(|((g, b), &v)| g.pdf(v).ln() - b.pdf(v).ln()).sum();
        if best.as_ref().map_or(true, |(s, _)| score > *s) {
            best = Some((score, x));
        }
    }
    best.unwrap().1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingEntry {
    pub name: String,
    pub num_variables: usize,
    pub strengths: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub points: usize,
    pub slope: f64,
    pub intercept: f64,
    /// Absent when the strengths do not vary.
    pub r_squared: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingEntry>,
    pub fits: BTreeMap<String, LinearFit>,
}

/// Least-squares fit of each group's tuned strength against the number of
/// integer variables. Groups seen at fewer than two distinct sizes get no fit.
pub fn penalty_scaling_report(rows: Vec<ScalingEntry>) -> ScalingReport {
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in &rows {
        for (label, &v) in &r.strengths {
            series.entry(label.clone()).or_default().push((r.num_variables as f64, v));
        }
    }
    let mut fits = BTreeMap::new();
    for (label, pts) in series {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if pts.len() < 2 || sxx == 0.0 {
            continue;
        }
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
        let slope = sxy / sxx;
        let r_squared = (syy > 0.0).then(|| sxy * sxy / (sxx * syy));
        fits.insert(label, LinearFit { points: pts.len(), slope, intercept: my - slope * mx, r_squared });
    }
    ScalingReport { rows, fits }
}

/// Tune each problem and collect the per-group strengths.
pub fn tune_for_scaling(
    problems: &[(String, SynthesisProblem)],
    kind: EncodingScheme,
    method: GroupingMethod,
    options: &TuneOptions,
) -> Result<ScalingReport> {
    let mut rows = Vec::new();
    for (name, prob) in problems {
        let groups = make_groups(prob.network(), prob.targets(), method, kind)?;
        let result = tune(prob, kind, &groups, options)?;
        rows.push(ScalingEntry {
            name: name.clone(),
            num_variables: prob.num_variables(),
            strengths: result.labels.iter().cloned().zip(result.best.lambda.iter().copied()).collect(),
        });
    }
    Ok(penalty_scaling_report(rows))
}

/// Convenience for callers holding exact strengths.
pub fn uniform_lambda(groups: &ParameterGroups, value: Rational) -> Vec<f64> {
    vec![rational::to_f64(&value); groups.dimension()]
}
