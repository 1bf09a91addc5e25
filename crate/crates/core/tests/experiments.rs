use degdist::experiments::{
    compare_models, influence_curve, CascadeConfig, CascadeModel, Experiment, GraphLabel,
};
use degdist::graph::{configuration_model, pure_sample_degrees, Graph};
use degdist::{GridConfig, ModelSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Expected IC spread by summing over every live/blocked edge pattern.
fn exact_ic_spread(g: &Graph, seeds: &[u32], p: f64) -> f64 {
    let edges: Vec<(u32, u32)> = g.edges().collect();
    let m = edges.len();
    let mut total = 0.0;
    for mask in 0u32..(1 << m) {
        let live = mask.count_ones() as i32;
        let prob = p.powi(live) * (1.0 - p).powi(m as i32 - live);
        let mut parent: Vec<usize> = (0..g.n()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (i, &(u, v)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                let (a, b) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
                parent[a] = b;
            }
        }
        let mut roots: Vec<usize> = seeds.iter().map(|&s| find(&mut parent, s as usize)).collect();
        roots.sort_unstable();
        roots.dedup();
        let reached = (0..g.n()).filter(|&x| roots.binary_search(&find(&mut parent, x)).is_ok()).count();
        total += prob * reached as f64;
    }
    total
}

fn random_small_graph(rng: &mut ChaCha8Rng) -> Graph {
    let n = rng.random_range(3..=10);
    let target = rng.random_range(2..=14usize);
    let mut e = Vec::new();
    while e.len() < target * 3 {
        e.push((rng.random_range(0..n) as u32, rng.random_range(0..n) as u32));
    }
    let g = Graph::from_edges(n, &e);
    let kept: Vec<(u32, u32)> = g.edges().take(target).collect();
    Graph::from_edges(n, &kept)
}

#[test]
fn ic_monte_carlo_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..8 {
        let g = random_small_graph(&mut rng);
        let p = rng.random_range(0.1..0.9);
        let cfg = CascadeConfig { model: CascadeModel::IndependentCascade { p }, trials: 20_000, seed: i, seed_counts: vec![1, 2] };
        let r = influence_curve(&g, &cfg, GraphLabel::Real).unwrap();
        let ranking = degdist::graph::degree_ranking(&g);
        for (j, &s) in cfg.seed_counts.iter().enumerate() {
            let exact = exact_ic_spread(&g, &ranking[..s], p);
            let se = r.stderr[j].max(1e-12);
            assert!((r.y[j] - exact).abs() <= 4.0 * se + 1e-9, "graph {i} s {s}: {} vs {exact} (se {se})", r.y[j]);
        }
    }
}

#[test]
fn compare_models_returns_three_aligned_deterministic_curves() {
    let (seq, _) = pure_sample_degrees(&ModelSpec::pln(2.0, 1.5, 0.8).unwrap(), 3_000, 1).unwrap();
    let (real, _) = configuration_model(&seq, 2).unwrap();
    let exp = Experiment::Robustness { fractions: vec![0.0, 0.01, 0.05, 0.1] };
    let a = compare_models(&real, &exp, 5, &GridConfig::default()).unwrap();
    let labels: Vec<GraphLabel> = a.iter().map(|r| r.label).collect();
    assert_eq!(labels, [GraphLabel::Real, GraphLabel::SyntheticPln, GraphLabel::SyntheticPowerLaw]);
    for r in &a {
        assert_eq!(r.x, vec![0.0, 0.01, 0.05, 0.1]);
        assert_eq!(r.y.len(), r.x.len());
        assert!(r.y.windows(2).all(|w| w[1] <= w[0]));
    }
    let b = compare_models(&real, &exp, 5, &GridConfig::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn influence_is_reproducible() {
    let (seq, _) = pure_sample_degrees(&ModelSpec::pln(2.0, 1.5, 0.8).unwrap(), 2_000, 3).unwrap();
    let (g, _) = configuration_model(&seq, 4).unwrap();
    for model in [CascadeModel::IndependentCascade { p: 0.1 }, CascadeModel::WeightedCascade, CascadeModel::LinearThreshold] {
        let cfg = CascadeConfig { model, trials: 30, seed: 9, seed_counts: vec![1, 10, 50] };
        let a = influence_curve(&g, &cfg, GraphLabel::Real).unwrap();
        assert_eq!(a, influence_curve(&g, &cfg, GraphLabel::Real).unwrap());
        assert!(a.y.windows(2).all(|w| w[0] <= w[1]));
    }
}
