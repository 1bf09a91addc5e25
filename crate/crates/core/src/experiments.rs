//! Supernode-removal robustness, degree-ranked influence spread and the
//! link-privacy attack coverage estimate, runnable on any graph.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{ModelKind, ModelSpec};
use crate::error::{Error, Result};
use crate::fit::{fit, GridConfig};
use crate::graph::{
    configuration_model, degree_ranking, degrees, largest_component_fraction, pure_sample_degrees, remove_top_fraction,
    ConfigModelReport, Graph,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphLabel {
    Real,
    SyntheticPln,
    #[serde(rename = "synthetic_powerlaw")]
    SyntheticPowerLaw,
}

impl GraphLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            GraphLabel::Real => "real",
            GraphLabel::SyntheticPln => "synthetic_pln",
            GraphLabel::SyntheticPowerLaw => "synthetic_powerlaw",
        }
    }
}

impl std::fmt::Display for GraphLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub label: GraphLabel,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Standard error of each y (0 for deterministic curves).
    pub stderr: Vec<f64>,
}

// ---------------------------------------------------------------------------
// Robustness
// ---------------------------------------------------------------------------

/// Largest-component fraction (of the original node count) after removing
/// the top fraction of nodes by degree, for each fraction.
pub fn robustness_curve(g: &Graph, fractions: &[f64], label: GraphLabel) -> Result<ExperimentResult> {
    if fractions.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::domain("fractions must be sorted ascending"));
    }
    let y = fractions
        .iter()
        .map(|&f| largest_component_fraction(&remove_top_fraction(g, f)?.graph, g.n()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult {
        label,
        x: fractions.to_vec(),
        stderr: vec![0.0; y.len()],
        y,
    })
}

// ---------------------------------------------------------------------------
// Influence
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CascadeModel {
    IndependentCascade { p: f64 },
    WeightedCascade,
    LinearThreshold,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeConfig {
    pub model: CascadeModel,
    pub trials: usize,
    pub seed: u64,
    pub seed_counts: Vec<usize>,
}

impl CascadeConfig {
    fn validate(&self, n: usize) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials", 0.0, "at least one trial is required"));
        }
        if let CascadeModel::IndependentCascade { p } = self.model {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::invalid("p", p, "must lie in (0, 1]"));
            }
        }
        if let Some(&s) = self.seed_counts.iter().find(|&&s| s > n) {
            return Err(Error::domain(format!("seed count {s} exceeds the {n} nodes")));
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic uniform in [0, 1) for (stream, a, b).
fn hashed_unit(stream: u64, a: u64, b: u64) -> f64 {
    let h = splitmix64(splitmix64(stream ^ splitmix64(a)) ^ b);
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn trial_stream(seed: u64, trial: usize) -> u64 {
    splitmix64(seed ^ splitmix64(trial as u64 ^ 0x1c_a5ca_de00))
}

/// Final active-set sizes for the increasing prefixes `counts` of `seeds`
/// in one trial whose randomness is fixed by `stream`. Every model here is
/// a closure under fixed randomness, so prefixes are processed
/// incrementally and the sizes are nondecreasing.
fn cascade_trial(
    g: &Graph,
    model: CascadeModel,
    seeds: &[u32],
    counts: &[usize],
    stream: u64,
    thresholds: Option<&[f64]>,
) -> Vec<usize> {
    let n = g.n();
    let mut active = vec![false; n];
    let mut hits = vec![0u32; if model == CascadeModel::LinearThreshold { n } else { 0 }];
    let mut queue = VecDeque::new();
    let mut total = 0;
    let mut next_seed = 0;
    let mut out = Vec::with_capacity(counts.len());
    let threshold = |v: usize| match thresholds {
        Some(t) => t[v],
        None => hashed_unit(stream, v as u64, 0x7e5e),
    };
    for &c in counts {
        while next_seed < c {
            let s = seeds[next_seed] as usize;
            next_seed += 1;
            if !active[s] {
                active[s] = true;
                total += 1;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                let v = v as usize;
                if active[v] {
                    continue;
                }
                let fire = match model {
                    CascadeModel::IndependentCascade { p } => {
                        let (a, b) = if u < v { (u, v) } else { (v, u) };
                        hashed_unit(stream, a as u64, b as u64) < p
                    }
                    CascadeModel::WeightedCascade => {
                        hashed_unit(stream, u as u64, (v as u64) | (1 << 63)) < 1.0 / g.degree(v) as f64
                    }
                    CascadeModel::LinearThreshold => {
                        hits[v] += 1;
                        hits[v] as f64 / g.degree(v) as f64 >= threshold(v)
                    }
                };
                if fire {
                    active[v] = true;
                    total += 1;
                    queue.push_back(v);
                }
            }
        }
        out.push(total);
    }
    out
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    // Kahan summation; the order is fixed so the result is reproducible.
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let mean = sum / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean final active-set size over trials, seeding the top-`s` nodes by
/// degree for each `s` in the configured seed counts.
pub fn influence_curve(g: &Graph, cfg: &CascadeConfig, label: GraphLabel) -> Result<ExperimentResult> {
    cfg.validate(g.n())?;
    let ranking = degree_ranking(g);
    let mut order: Vec<usize> = (0..cfg.seed_counts.len()).collect();
    order.sort_by_key(|&i| cfg.seed_counts[i]);
    let sorted_counts: Vec<usize> = order.iter().map(|&i| cfg.seed_counts[i]).collect();
    let per_trial: Vec<Vec<usize>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| cascade_trial(g, cfg.model, &ranking, &sorted_counts, trial_stream(cfg.seed, t), None))
        .collect();
    let mut y = vec![0.0; order.len()];
    let mut stderr = vec![0.0; order.len()];
    for (j, &i) in order.iter().enumerate() {
        let col: Vec<f64> = per_trial.iter().map(|r| r[j] as f64).collect();
        (y[i], stderr[i]) = mean_and_stderr(&col);
    }
    Ok(ExperimentResult {
        label,
        x: cfg.seed_counts.iter().map(|&s| s as f64).collect(),
        y,
        stderr,
    })
}

/// One cascade from an explicit seed set; `trial` selects the randomness.
pub fn cascade_once(g: &Graph, model: CascadeModel, seeds: &[u32], seed: u64, trial: usize) -> usize {
    cascade_trial(g, model, seeds, &[seeds.len()], trial_stream(seed, trial), None)[0]
}

/// Linear-threshold cascade with caller-supplied node thresholds.
pub fn linear_threshold_with(g: &Graph, seeds: &[u32], thresholds: &[f64]) -> Result<usize> {
    if thresholds.len() != g.n() {
        return Err(Error::domain("one threshold per node is required"));
    }
    Ok(cascade_trial(g, CascadeModel::LinearThreshold, seeds, &[seeds.len()], 0, Some(thresholds))[0])
}

// ---------------------------------------------------------------------------
// Privacy attack
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackStrategy {
    Highest,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackConfig {
    /// Largest number of attacking nodes; the sweep covers 0..=k.
    pub k: usize,
    pub strategy: AttackStrategy,
    /// If set, the smallest k reaching ε ≤ target is reported.
    pub epsilon0_target: Option<f64>,
}

/// The degree data the coverage formula needs, bound explicitly:
/// `two_m` is the degree sum (twice the edge count).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackInputs {
    pub n: u64,
    pub two_m: f64,
    /// (degree, probability), probabilities summing to 1.
    pub pmf: Vec<(f64, f64)>,
    /// Attacker degrees in decreasing order.
    pub attacker_degrees: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrivacyReport {
    /// x = k, y = disclosed nodes N(1 − ε), an asymptotic estimate.
    pub result: ExperimentResult,
    pub epsilon: Vec<f64>,
    pub two_m: f64,
    pub k_for_target: Option<usize>,
}

/// ε = Σ_x e^(−x·D/2m) f(x).
pub fn attack_epsilon(pmf: &[(f64, f64)], attacker_degree_sum: f64, two_m: f64) -> f64 {
    if attacker_degree_sum == 0.0 {
        return 1.0;
    }
    pmf.iter().map(|&(x, f)| (-x * attacker_degree_sum / two_m).exp() * f).sum()
}

/// Empirical inputs: all nodes' degree pmf, 2m = Σ degree, attackers are
/// the highest-degree nodes.
pub fn attack_inputs_from_graph(g: &Graph) -> Result<AttackInputs> {
    let n = g.n();
    if n == 0 || g.m_edges() == 0 {
        return Err(Error::domain("attack needs a graph with at least one edge"));
    }
    let mut degs: Vec<u64> = g.degree_sequence();
    degs.sort_unstable_by(|a, b| b.cmp(a));
    let mut pmf: Vec<(f64, f64)> = Vec::new();
    for &d in degs.iter().rev() {
        match pmf.last_mut() {
            Some((x, c)) if *x == d as f64 => *c += 1.0,
            _ => pmf.push((d as f64, 1.0)),
        }
    }
    for p in &mut pmf {
        p.1 /= n as f64;
    }
    Ok(AttackInputs {
        n: n as u64,
        two_m: 2.0 * g.m_edges() as f64,
        pmf,
        attacker_degrees: degs.iter().map(|&d| d as f64).collect(),
    })
}

/// Model inputs: f is the model density renormalized over the integers
/// [d0, k_max]; attacker degrees are the top model quantiles
/// Q(1 − i/(n+1)) capped at k_max; 2m = 2·m_edges.
pub fn attack_inputs_from_model(
    model: &ModelSpec,
    n: u64,
    d0: u64,
    m_edges: u64,
    k_max: u64,
    attackers: usize,
) -> Result<AttackInputs> {
    model.validate()?;
    if d0 == 0 || k_max < d0 {
        return Err(Error::domain(format!("need 1 <= d0 <= k_max, got d0 = {d0}, k_max = {k_max}")));
    }
    if m_edges == 0 || n == 0 {
        return Err(Error::domain("attack needs n > 0 and at least one edge"));
    }
    if attackers as u64 > n {
        return Err(Error::domain(format!("{attackers} attackers exceed the {n} nodes")));
    }
    let mut pmf: Vec<(f64, f64)> = (d0..=k_max)
        .map(|x| (x as f64, model.ln_pdf_unchecked(x as f64).exp()))
        .collect();
    let total: f64 = pmf.iter().map(|p| p.1).sum();
    if !(total > 0.0) {
        return Err(Error::domain("model density vanishes on [d0, k_max]"));
    }
    for p in &mut pmf {
        p.1 /= total;
    }
    let attacker_degrees = (1..=attackers)
        .map(|i| Ok(model.quantile(1.0 - i as f64 / (n + 1) as f64)?.min(k_max as f64)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(AttackInputs {
        n,
        two_m: 2.0 * m_edges as f64,
        pmf,
        attacker_degrees,
    })
}

/// Coverage sweep for k = 0..=cfg.k attackers.
pub fn privacy_attack(inputs: &AttackInputs, cfg: &AttackConfig, label: GraphLabel) -> Result<PrivacyReport> {
    if cfg.k > inputs.attacker_degrees.len() {
        return Err(Error::domain(format!(
            "k = {} exceeds the {} available attackers",
            cfg.k,
            inputs.attacker_degrees.len()
        )));
    }
    let mut d = 0.0;
    let mut x = Vec::with_capacity(cfg.k + 1);
    let mut y = Vec::with_capacity(cfg.k + 1);
    let mut epsilon = Vec::with_capacity(cfg.k + 1);
    for k in 0..=cfg.k {
        if k > 0 {
            d += inputs.attacker_degrees[k - 1];
        }
        let eps = attack_epsilon(&inputs.pmf, d, inputs.two_m);
        x.push(k as f64);
        y.push(inputs.n as f64 * (1.0 - eps));
        epsilon.push(eps);
    }
    let k_for_target = cfg
        .epsilon0_target
        .and_then(|t| epsilon.iter().position(|&e| e <= t));
    Ok(PrivacyReport {
        result: ExperimentResult {
            label,
            stderr: vec![0.0; x.len()],
            x,
            y,
        },
        epsilon,
        two_m: inputs.two_m,
        k_for_target,
    })
}

// ---------------------------------------------------------------------------
// Model comparison
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Robustness { fractions: Vec<f64> },
    Influence(CascadeConfig),
    Privacy(AttackConfig),
}

/// A fitted model and the configuration-model graph built from a pure
/// sample of it.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub label: GraphLabel,
    pub model: ModelSpec,
    pub graph: Graph,
    pub report: ConfigModelReport,
}

/// Derives an independent seed for a named sub-task.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag))
}

/// Fits PowerLaw and PLN to the real graph's degrees and builds a
/// same-size synthetic graph from each.
pub fn synthesize_pair(real: &Graph, seed: u64, grid: &GridConfig) -> Result<[Synthetic; 2]> {
    let (sample, _) = degrees(real)?;
    let n = real.n();
    let build = |kind: ModelKind, label: GraphLabel, tag: u64| -> Result<Synthetic> {
        let model = fit(&sample, kind, grid)?.model;
        let (seq, _) = pure_sample_degrees(&model, n, derive_seed(seed, tag))?;
        let (graph, report) = configuration_model(&seq, derive_seed(seed, tag + 100))?;
        Ok(Synthetic {
            label,
            model,
            graph,
            report,
        })
    };
    Ok([
        build(ModelKind::Pln, GraphLabel::SyntheticPln, 1)?,
        build(ModelKind::PowerLaw, GraphLabel::SyntheticPowerLaw, 2)?,
    ])
}

/// Runs one experiment on a graph.
pub fn run_experiment(g: &Graph, experiment: &Experiment, label: GraphLabel) -> Result<ExperimentResult> {
    match experiment {
        Experiment::Robustness { fractions } => robustness_curve(g, fractions, label),
        Experiment::Influence(cfg) => influence_curve(g, cfg, label),
        Experiment::Privacy(cfg) => {
            Ok(privacy_attack(&attack_inputs_from_graph(g)?, cfg, label)?.result)
        }
    }
}

/// The experiment on the real graph and on its PLN and PowerLaw synthetic
/// counterparts, in that order.
pub fn compare_models(real: &Graph, experiment: &Experiment, seed: u64, grid: &GridConfig) -> Result<Vec<ExperimentResult>> {
    let pair = synthesize_pair(real, seed, grid)?;
    let mut out = vec![run_experiment(real, experiment, GraphLabel::Real)?];
    for s in &pair {
        out.push(run_experiment(&s.graph, experiment, s.label)?);
    }
    Ok(out)
}
