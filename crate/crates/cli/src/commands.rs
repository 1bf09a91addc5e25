use std::path::Path;

use degdist::experiments::{
    attack_inputs_from_graph, attack_inputs_from_model, derive_seed, influence_curve, privacy_attack,
    robustness_curve, synthesize_pair, AttackConfig, AttackStrategy, CascadeConfig, CascadeModel, ExperimentResult,
    GraphLabel, PrivacyReport,
};
use degdist::fit::{fit, fit_all, fit_elementary, qq_points};
use degdist::graph::{
    configuration_model, degrees, load_edge_list, pure_sample_degrees, read_degrees, two_phase_generate,
    write_edge_list, Graph, TwoPhaseConfig,
};
use degdist::tail::tail_report_terms;
use degdist::{DegreeSample, FitReport, GridConfig, ModelKind, ModelSpec};
use serde::Serialize;
use serde_json::json;

use crate::args::{Cascade, ExperimentArgs, ExperimentKind, FitArgs, Format, GenArgs, GenMode, InputArgs, PrivacyMode, TailArgs};
use crate::output::{num, read_input, CliError, CliResult, Outputs, RunManifest};

fn load_sample(input: &InputArgs, manifest: &mut RunManifest) -> CliResult<DegreeSample> {
    let bytes = read_input(&input.input)?;
    manifest.input("input", &bytes);
    manifest.param("format", format!("{:?}", input.format).to_lowercase());
    Ok(match input.format {
        Format::Edges => degrees(&load_edge_list(bytes.as_slice())?.0)?.0,
        Format::Degrees => DegreeSample::from_degrees(&read_degrees(bytes.as_slice())?)?,
    })
}

fn load_graph(path: &Path, role: &str, manifest: &mut RunManifest) -> CliResult<Graph> {
    let bytes = read_input(path)?;
    manifest.input(role, &bytes);
    let (g, stats) = load_edge_list(bytes.as_slice())?;
    if stats.duplicates_dropped + stats.self_loops_dropped > 0 {
        log::warn!(
            "{}: dropped {} duplicate edges and {} self-loops",
            path.display(),
            stats.duplicates_dropped,
            stats.self_loops_dropped
        );
    }
    Ok(g)
}

fn params_text(m: &ModelSpec) -> String {
    m.params().iter().map(|(k, v)| format!("{k}={}", num(*v))).collect::<Vec<_>>().join(";")
}

pub fn cmd_fit(args: &FitArgs) -> CliResult<(Outputs, RunManifest)> {
    let mut manifest = RunManifest::new("fit", None);
    let kinds = if args.models.is_empty() { ModelKind::ALL.to_vec() } else { args.models.clone() };
    manifest
        .param("models", kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(","))
        .param("qq_points", args.qq_points);
    let sample = load_sample(&args.input, &mut manifest)?;
    let reports = fit_all(&sample, &kinds, &GridConfig::default())?;

    let best = |key: fn(&FitReport) -> f64| reports.iter().map(key).fold(f64::INFINITY, f64::min);
    let (b_rll, b_aic, b_rss) = (best(|r| r.reverse_log_likelihood), best(|r| r.aic), best(|r| r.rss));
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                r.kind().name().to_string(),
                params_text(&r.model),
                num(r.reverse_log_likelihood),
                num(r.aic),
                num(r.rss),
                r.k.to_string(),
                r.degenerate.to_string(),
                (r.reverse_log_likelihood == b_rll).to_string(),
                (r.aic == b_aic).to_string(),
                (r.rss == b_rss).to_string(),
            ]
        })
        .collect();
    let mut out = Outputs::default();
    out.add_csv(
        "fit.csv",
        &["model", "params", "reverse_log_likelihood", "aic", "rss", "k", "degenerate", "best_log_likelihood", "best_aic", "best_rss"],
        rows,
    )?;

    let mut header = vec!["degree", "empirical"];
    header.extend(reports.iter().map(|r| r.kind().name()));
    let rows = sample
        .empirical_ccdf()
        .into_iter()
        .map(|(x, p)| {
            let mut row = vec![num(x), num(p)];
            row.extend(reports.iter().map(|r| num(r.model.ccdf(x).unwrap_or(f64::NAN))));
            row
        })
        .collect();
    out.add_csv("ccdf.csv", &header, rows)?;

    let mut rows = Vec::new();
    for r in &reports {
        for (i, (model_q, emp)) in qq_points(&r.model, &sample, args.qq_points)?.into_iter().enumerate() {
            let level = (i + 1) as f64 / (args.qq_points + 1) as f64;
            rows.push(vec![r.kind().name().to_string(), num(level), num(model_q), num(emp)]);
        }
    }
    out.add_csv("qq.csv", &["model", "level", "model_quantile", "empirical"], rows)?;
    out.add_json("fit.json", &json!({ "n": sample.n(), "d0": sample.d0(), "fits": reports }))?;
    Ok((out, manifest))
}

pub fn cmd_tail(args: &TailArgs) -> CliResult<(Outputs, RunManifest)> {
    let mut manifest = RunManifest::new("tail", None);
    manifest.param("gamma", num(args.gamma)).param("n_terms", args.n_terms);
    let sample = load_sample(&args.input, &mut manifest)?;
    let pl = fit_elementary(&sample, ModelKind::PowerLaw)?;
    let pln = fit(&sample, ModelKind::Pln, &GridConfig::default())?;
    let r = tail_report_terms(&sample, &pl, &pln, args.gamma, args.n_terms as usize)?;
    let mut out = Outputs::default();
    out.add_csv(
        "tail.csv",
        &[
            "gamma",
            "xi_powerlaw",
            "xi_pln",
            "xi_empirical",
            "count_powerlaw",
            "count_pln",
            "count_empirical",
            "count_powerlaw_at_empirical",
            "count_pln_at_empirical",
            "ratio_theorem1",
            "ratio_direct",
            "nu",
            "mu_nu_gap",
        ],
        vec![vec![
            num(r.gamma),
            num(r.xi_powerlaw),
            r.xi_pln.map(num).unwrap_or_default(),
            num(r.xi_empirical),
            num(r.count_powerlaw),
            r.count_pln.map(num).unwrap_or_default(),
            r.count_empirical.to_string(),
            num(r.count_powerlaw_at_empirical),
            r.count_pln_at_empirical.map(num).unwrap_or_default(),
            num(r.ratio_theorem1),
            r.ratio_direct.map(num).unwrap_or_default(),
            num(r.nu),
            num(r.mu_nu_gap),
        ]],
    )?;
    out.add_json("tail.json", &json!({ "report": r, "powerlaw": pl, "pln": pln }))?;
    Ok((out, manifest))
}

fn parse_params(text: &str) -> CliResult<Vec<(String, f64)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("parameter `{kv}` is not of the form name=value")))?;
            let v: f64 = v.trim().parse().map_err(|_| CliError::Usage(format!("parameter `{kv}` has no numeric value")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn model_from_file(path: &Path, kind: ModelKind, manifest: &mut RunManifest) -> CliResult<ModelSpec> {
    let bytes = read_input(path)?;
    manifest.input("model_file", &bytes);
    let doc: serde_json::Value = serde_json::from_slice(&bytes)?;
    let fits = doc["fits"].as_array().ok_or_else(|| CliError::Usage(format!("{}: no `fits` array", path.display())))?;
    for f in fits {
        let m: ModelSpec = serde_json::from_value(f["model"].clone())?;
        if m.kind() == kind {
            return Ok(m.validated()?);
        }
    }
    Err(CliError::Usage(format!("{}: no {} fit", path.display(), kind.name())))
}

#[derive(Serialize)]
struct GenReport {
    mode: &'static str,
    model: Option<ModelSpec>,
    n: usize,
    m_edges: usize,
    parity_adjustment: Option<degdist::graph::ParityAdjustment>,
    configuration: Option<degdist::graph::ConfigModelReport>,
}

pub fn cmd_gen(args: &GenArgs) -> CliResult<(Outputs, RunManifest)> {
    let mut manifest = RunManifest::new("gen", Some(args.seed));
    manifest.param("n", args.n);
    let mut out = Outputs::default();
    let (graph, report) = match args.mode {
        GenMode::TwoPhase => {
            let p = args.p.ok_or_else(|| CliError::Usage("two-phase mode needs --p".into()))?;
            manifest
                .param("mode", "two-phase")
                .param("p", num(p))
                .param("m_new", args.m_new)
                .param("growth_rate", num(args.growth_rate))
                .param("sigma", num(args.sigma));
            let cfg = TwoPhaseConfig {
                n_target: args.n,
                p,
                m_new: args.m_new,
                growth_rate: args.growth_rate,
                sigma: args.sigma,
            };
            let g = two_phase_generate(&cfg, args.seed)?;
            let report = GenReport {
                mode: "two-phase",
                model: None,
                n: g.n(),
                m_edges: g.m_edges(),
                parity_adjustment: None,
                configuration: None,
            };
            (g, report)
        }
        GenMode::ConfigModel => {
            let kind = args.model.unwrap_or(ModelKind::Pln);
            let model = match (&args.params, &args.model_file) {
                (Some(text), None) => {
                    let params = parse_params(text)?;
                    let refs: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
                    ModelSpec::from_params(kind, &refs)?
                }
                (None, Some(path)) => model_from_file(path, kind, &mut manifest)?,
                _ => return Err(CliError::Usage("config-model mode needs --params or --model-file".into())),
            };
            manifest.param("mode", "config-model").param("model", params_text(&model)).param("kind", kind.name());
            let (seq, parity) = pure_sample_degrees(&model, args.n, derive_seed(args.seed, 1))?;
            let (g, cfg_report) = configuration_model(&seq, derive_seed(args.seed, 2))?;
            out.add("target_degrees.txt", seq.iter().map(|d| format!("{d}\n")).collect::<String>().into_bytes());
            let report = GenReport {
                mode: "config-model",
                model: Some(model),
                n: g.n(),
                m_edges: g.m_edges(),
                parity_adjustment: parity,
                configuration: Some(cfg_report),
            };
            (g, report)
        }
    };
    let mut edges = Vec::new();
    write_edge_list(&graph, &mut edges)?;
    out.add("graph.edges", edges);
    out.add_json("gen.json", &report)?;
    Ok((out, manifest))
}

fn curve_csv(out: &mut Outputs, name: &str, r: &ExperimentResult) -> CliResult<()> {
    let rows = (0..r.x.len())
        .map(|i| vec![num(r.x[i]), num(r.y[i]), num(r.stderr[i]), r.label.to_string()])
        .collect();
    out.add_csv(&format!("{name}_{}.csv", r.label), &["x", "y", "stderr", "label"], rows)
}

pub fn cmd_experiment(args: &ExperimentArgs) -> CliResult<(Outputs, RunManifest)> {
    let kind_name = format!("{:?}", args.kind).to_lowercase();
    let mut manifest = RunManifest::new("experiment", Some(args.seed));
    manifest.param("kind", &kind_name).param("auto_synthetic", args.auto_synthetic);
    let cascade = match args.kind {
        ExperimentKind::Influence => {
            let model = match args.cascade {
                Cascade::Ic => CascadeModel::IndependentCascade {
                    p: args.p.ok_or_else(|| CliError::Usage("the independent cascade needs --p".into()))?,
                },
                Cascade::Wc => CascadeModel::WeightedCascade,
                Cascade::Lt => CascadeModel::LinearThreshold,
            };
            manifest
                .param("cascade", format!("{:?}", args.cascade).to_lowercase())
                .param("trials", args.trials)
                .param("seed_counts", args.seed_counts.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","));
            if let Some(p) = args.p {
                manifest.param("p", num(p));
            }
            Some(CascadeConfig {
                model,
                trials: args.trials as usize,
                seed: args.seed,
                seed_counts: args.seed_counts.clone(),
            })
        }
        ExperimentKind::Robustness => {
            if args.fraction_grid.iter().any(|f| !(0.0..1.0).contains(f)) || args.fraction_grid.windows(2).any(|w| w[0] > w[1]) {
                return Err(CliError::Usage("--fraction-grid must be ascending values in [0, 1)".into()));
            }
            manifest.param("fraction_grid", args.fraction_grid.iter().map(|f| num(*f)).collect::<Vec<_>>().join(","));
            None
        }
        ExperimentKind::Privacy => {
            manifest
                .param("k", args.k)
                .param("privacy_mode", format!("{:?}", args.privacy_mode).to_lowercase());
            if let Some(t) = args.epsilon_target {
                manifest.param("epsilon_target", num(t));
            }
            None
        }
    };

    let real = load_graph(&args.input, "input", &mut manifest)?;
    let grid = GridConfig::default();
    let mut graphs: Vec<(GraphLabel, Graph)> = vec![];
    let mut extras = serde_json::Map::new();
    let mut out = Outputs::default();
    if args.auto_synthetic {
        let pair = synthesize_pair(&real, args.seed, &grid)?;
        let mut synth = Vec::new();
        for s in pair {
            synth.push(json!({ "label": s.label, "model": s.model, "configuration": s.report, "m_edges": s.graph.m_edges() }));
            if args.save_graphs {
                let mut bytes = Vec::new();
                write_edge_list(&s.graph, &mut bytes)?;
                out.add(&format!("{}.edges", s.label), bytes);
            }
            graphs.push((s.label, s.graph));
        }
        extras.insert("synthetic".into(), synth.into());
    } else {
        if let Some(p) = &args.synthetic_pln {
            graphs.push((GraphLabel::SyntheticPln, load_graph(p, "synthetic_pln", &mut manifest)?));
        }
        if let Some(p) = &args.synthetic_powerlaw {
            graphs.push((GraphLabel::SyntheticPowerLaw, load_graph(p, "synthetic_powerlaw", &mut manifest)?));
        }
    }
    graphs.insert(0, (GraphLabel::Real, real));

    let mut results = Vec::new();
    match args.kind {
        ExperimentKind::Robustness => {
            for (label, g) in &graphs {
                results.push(robustness_curve(g, &args.fraction_grid, *label)?);
            }
        }
        ExperimentKind::Influence => {
            let cfg = cascade.expect("set above");
            for (label, g) in &graphs {
                results.push(influence_curve(g, &cfg, *label)?);
            }
        }
        ExperimentKind::Privacy => {
            let cfg = AttackConfig {
                k: args.k as usize,
                strategy: AttackStrategy::Highest,
                epsilon0_target: args.epsilon_target,
            };
            let mut reports: Vec<PrivacyReport> = Vec::new();
            match args.privacy_mode {
                PrivacyMode::Graph => {
                    for (label, g) in &graphs {
                        reports.push(privacy_attack(&attack_inputs_from_graph(g)?, &cfg, *label)?);
                    }
                }
                PrivacyMode::Model => {
                    let real = &graphs[0].1;
                    reports.push(privacy_attack(&attack_inputs_from_graph(real)?, &cfg, GraphLabel::Real)?);
                    let (sample, _) = degrees(real)?;
                    let n = real.n() as u64;
                    let (d0, k_max) = (sample.d0() as u64, sample.d_max() as u64);
                    let mut models = Vec::new();
                    for (kind, label) in [(ModelKind::Pln, GraphLabel::SyntheticPln), (ModelKind::PowerLaw, GraphLabel::SyntheticPowerLaw)] {
                        let model = fit(&sample, kind, &grid)?.model;
                        let inputs = attack_inputs_from_model(&model, n, d0, real.m_edges() as u64, k_max, cfg.k)?;
                        reports.push(privacy_attack(&inputs, &cfg, label)?);
                        models.push(json!({ "label": label, "model": model, "d0": d0, "k_max": k_max }));
                    }
                    extras.insert("models".into(), models.into());
                }
            }
            extras.insert("estimate".into(), "asymptotic".into());
            extras.insert(
                "attack".into(),
                reports
                    .iter()
                    .map(|r| json!({ "label": r.result.label, "epsilon": r.epsilon, "two_m": r.two_m, "k_for_target": r.k_for_target }))
                    .collect::<Vec<_>>()
                    .into(),
            );
            results = reports.into_iter().map(|r| r.result).collect();
        }
    }
    for r in &results {
        curve_csv(&mut out, &kind_name, r)?;
    }
    extras.insert("results".into(), serde_json::to_value(&results)?);
    out.add_json(&format!("{kind_name}.json"), &extras)?;
    Ok((out, manifest))
}
