use degdist::dist::sample_values;
use degdist::fit::{fit, fit_elementary};
use degdist::graph::{
    ceil_degree, configuration_model, degrees, pure_sample_degrees, two_phase_generate, TwoPhaseConfig,
};
use degdist::{DegreeSample, GridConfig, ModelKind, ModelSpec};

/// Largest gap between the empirical cdfs of two integer sequences.
fn ks(a: &[u64], b: &[u64]) -> f64 {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_unstable();
    b.sort_unstable();
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

fn ceiled_sample(model: &ModelSpec, n: usize, seed: u64) -> DegreeSample {
    let v: Vec<u64> = sample_values(model, n, seed).unwrap().iter().map(|&x| ceil_degree(x, n as u64 - 1)).collect();
    DegreeSample::from_degrees(&v).unwrap()
}

#[test]
fn configuration_model_keeps_the_degree_distribution() {
    let source = ceiled_sample(&ModelSpec::pln(2.0, 2.0, 1.0).unwrap(), 20_000, 4);
    let fitted = fit(&source, ModelKind::Pln, &GridConfig::default()).unwrap().model;
    let (target, _) = pure_sample_degrees(&fitted, 100_000, 6).unwrap();
    let (g, report) = configuration_model(&target, 7).unwrap();
    g.validate().unwrap();
    assert!(report.deficit_fraction() < 0.01, "deficit {}", report.deficit_fraction());
    let d = ks(&g.degree_sequence(), &target);
    assert!(d < 0.02, "ks {d}");
}

#[test]
fn power_law_overproduces_high_degree_nodes() {
    let source = ceiled_sample(&ModelSpec::pln(2.0, 2.0, 1.0).unwrap(), 80_000, 12);
    let pl = fit_elementary(&source, ModelKind::PowerLaw).unwrap().model;
    let pln = fit(&source, ModelKind::Pln, &GridConfig::default()).unwrap().model;
    let count = |m: &ModelSpec| pure_sample_degrees(m, 80_000, 13).unwrap().0.iter().filter(|&&d| d > 2000).count();
    let (a, b) = (count(&pl), count(&pln));
    assert!(a >= 100 * b.max(1), "power law {a}, PLN {b}");
}

#[test]
fn two_phase_without_growth_steps_is_a_tree() {
    let cfg = TwoPhaseConfig { n_target: 500, p: 1.0, m_new: 1, growth_rate: 1.0, sigma: 1.0 };
    let g = two_phase_generate(&cfg, 3).unwrap();
    g.validate().unwrap();
    assert_eq!(g.n(), 500);
    assert_eq!(g.m_edges(), 499);
    assert_eq!(degdist::graph::largest_component_fraction(&g, 500).unwrap(), 1.0);
    assert_eq!(g, two_phase_generate(&cfg, 3).unwrap());
}

#[test]
fn two_phase_degrees_prefer_pln_over_power_law() {
    let cfg = TwoPhaseConfig { n_target: 27_140, p: 0.3, m_new: 1, growth_rate: 4.0, sigma: 1.0 };
    let g = two_phase_generate(&cfg, 7).unwrap();
    g.validate().unwrap();
    let (s, isolated) = degrees(&g).unwrap();
    assert_eq!(isolated, 0);
    let grid = GridConfig::default();
    let pl = fit(&s, ModelKind::PowerLaw, &grid).unwrap();
    let pln = fit(&s, ModelKind::Pln, &grid).unwrap();
    assert!(pln.rss < pl.rss, "PLN {} vs power law {}", pln.rss, pl.rss);
}
