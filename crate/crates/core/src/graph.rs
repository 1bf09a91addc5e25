//! Undirected simple graphs: ingestion, degree extraction, synthesis and
//! connectivity.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::dist::{sample_values, ModelSpec};
use crate::error::{Error, Result};
use crate::sample::DegreeSample;

/// Compressed sparse rows with sorted neighbor lists over ids `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

fn edge_key(u: u32, v: u32) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    (u64::from(a) << 32) | u64::from(b)
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
        }
    }

    /// Builds a simple graph, dropping self-loops and repeated edges.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        Self::from_edges_counted(n, edges).0
    }

    /// Like [`Graph::from_edges`], also returning (duplicates, self-loops)
    /// dropped.
    pub fn from_edges_counted(n: usize, edges: &[(u32, u32)]) -> (Self, usize, usize) {
        let mut deg = vec![0usize; n];
        let mut self_loops = 0;
        for &(u, v) in edges {
            if u == v {
                self_loops += 1;
            } else {
                deg[u as usize] += 1;
                deg[v as usize] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; offsets[n]];
        for &(u, v) in edges {
            if u != v {
                neighbors[fill[u as usize]] = v;
                fill[u as usize] += 1;
                neighbors[fill[v as usize]] = u;
                fill[v as usize] += 1;
            }
        }
        // Sort and deduplicate each row, compacting in place.
        let mut write = 0;
        let mut new_offsets = Vec::with_capacity(n + 1);
        new_offsets.push(0);
        let mut duplicate_slots = 0;
        for u in 0..n {
            let (s, e) = (offsets[u], offsets[u + 1]);
            neighbors[s..e].sort_unstable();
            let mut last = None;
            for i in s..e {
                let v = neighbors[i];
                if Some(v) == last {
                    duplicate_slots += 1;
                    continue;
                }
                last = Some(v);
                neighbors[write] = v;
                write += 1;
            }
            new_offsets.push(write);
        }
        neighbors.truncate(write);
        neighbors.shrink_to_fit();
        (
            Graph {
                offsets: new_offsets,
                neighbors,
            },
            duplicate_slots / 2,
            self_loops,
        )
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree_sequence(&self) -> Vec<u64> {
        (0..self.n()).map(|u| self.degree(u) as u64).collect()
    }

    /// Each undirected edge once, as (u, v) with u < v, in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u as u32, v))
        })
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Checks simplicity, symmetry, sortedness and the handshake identity.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        let mut total = 0;
        for u in 0..n {
            let row = self.neighbors(u);
            total += row.len();
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::domain(format!("node {u}: neighbor list unsorted or repeated")));
                }
            }
            for &v in row {
                let v = v as usize;
                if v >= n {
                    return Err(Error::domain(format!("node {u}: neighbor {v} out of range")));
                }
                if v == u {
                    return Err(Error::domain(format!("node {u}: self-loop")));
                }
                if !self.has_edge(v, u) {
                    return Err(Error::domain(format!("edge {u}-{v} is not symmetric")));
                }
            }
        }
        if total != 2 * self.m_edges() {
            return Err(Error::domain("degree sum differs from twice the edge count"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LoadStats {
    pub lines: usize,
    pub edges_read: usize,
    pub duplicates_dropped: usize,
    pub self_loops_dropped: usize,
}

/// Reads whitespace-separated integer pairs, one edge per line. Blank lines
/// and lines starting with `#` are skipped. Ids are remapped to `0..n` in
/// order of first appearance.
pub fn load_edge_list<R: BufRead>(mut reader: R) -> Result<(Graph, LoadStats)> {
    let mut ids: FxHashMap<u64, u32> = FxHashMap::default();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut stats = LoadStats::default();
    let mut line = String::new();
    let intern = |raw: u64, ids: &mut FxHashMap<u64, u32>| -> u32 {
        let next = ids.len() as u32;
        *ids.entry(raw).or_insert(next)
    };
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        stats.lines += 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let mut parts = text.split_ascii_whitespace();
        let parse = |tok: Option<&str>| -> Result<u64> {
            let tok = tok.ok_or_else(|| Error::Parse {
                line: stats.lines,
                message: "expected two node ids".into(),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: stats.lines,
                message: format!("invalid node id {tok:?}"),
            })
        };
        let a = parse(parts.next())?;
        let b = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(Error::Parse {
                line: stats.lines,
                message: "expected exactly two node ids".into(),
            });
        }
        let u = intern(a, &mut ids);
        let v = intern(b, &mut ids);
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    stats.edges_read = edges.len();
    let (g, dups, loops) = Graph::from_edges_counted(ids.len(), &edges);
    stats.duplicates_dropped = dups;
    stats.self_loops_dropped = loops;
    if dups + loops > 0 {
        log::warn!("dropped {dups} duplicate edges and {loops} self-loops");
    }
    Ok((g, stats))
}

/// Writes "u v" lines with u < v in increasing order.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads one positive integer degree per line (`#` comments allowed).
pub fn read_degrees<R: BufRead>(reader: R) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let d = text.parse::<u64>().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("invalid degree {text:?}"),
        })?;
        out.push(d);
    }
    if out.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(out)
}

/// The multiset of node degrees, excluding isolated nodes; the second value
/// is the number of isolated nodes left out.
pub fn degrees(g: &Graph) -> Result<(DegreeSample, usize)> {
    let all = g.degree_sequence();
    let positive: Vec<u64> = all.iter().copied().filter(|&d| d > 0).collect();
    let isolated = all.len() - positive.len();
    if isolated > 0 {
        log::warn!("{isolated} isolated nodes excluded from the degree sample");
    }
    Ok((DegreeSample::from_degrees(&positive)?, isolated))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConfigModelReport {
    pub target_degree_sum: u64,
    pub realized_degree_sum: u64,
    /// Stubs discarded after the last matching round.
    pub deficit: u64,
    pub rounds: usize,
}

impl ConfigModelReport {
    pub fn deficit_fraction(&self) -> f64 {
        if self.target_degree_sum == 0 {
            0.0
        } else {
            self.deficit as f64 / self.target_degree_sum as f64
        }
    }
}

/// Stub-matching rounds before leftover stubs are discarded.
pub const CONFIG_MODEL_ROUNDS: usize = 100;

/// Random simple graph with (approximately) the given degrees: stubs are
/// shuffled and paired, pairs forming self-loops or repeated edges go back
/// to the pool, and the pool is re-matched for up to
/// [`CONFIG_MODEL_ROUNDS`] rounds.
pub fn configuration_model(seq: &[u64], seed: u64) -> Result<(Graph, ConfigModelReport)> {
    let sum: u64 = seq.iter().sum();
    if sum % 2 == 1 {
        return Err(Error::OddDegreeSum { sum });
    }
    if seq.contains(&0) {
        return Err(Error::domain("degree sequence entries must be at least 1"));
    }
    let n = seq.len();
    if n > u32::MAX as usize {
        return Err(Error::domain("too many nodes for 32-bit ids"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<u32> = Vec::with_capacity(sum as usize);
    for (u, &d) in seq.iter().enumerate() {
        pool.extend(std::iter::repeat_n(u as u32, d as usize));
    }
    let mut seen: FxHashSet<u64> = FxHashSet::default();
    seen.reserve(pool.len() / 2);
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(pool.len() / 2);
    let mut rounds = 0;
    while pool.len() >= 2 && rounds < CONFIG_MODEL_ROUNDS {
        rounds += 1;
        pool.shuffle(&mut rng);
        let mut rest = Vec::new();
        for pair in pool.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u != v && seen.insert(edge_key(u, v)) {
                edges.push((u, v));
            } else {
                rest.extend_from_slice(pair);
            }
        }
        // Only one node's stubs left: nothing can ever pair.
        let stuck = rest.iter().all(|&x| x == rest[0]);
        pool = rest;
        if stuck {
            break;
        }
    }
    let g = Graph::from_edges(n, &edges);
    let realized = 2 * g.m_edges() as u64;
    Ok((
        g,
        ConfigModelReport {
            target_degree_sum: sum,
            realized_degree_sum: realized,
            deficit: sum - realized,
            rounds,
        },
    ))
}

/// Whether the parity fix-up changed an entry, and which.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParityAdjustment {
    pub index: usize,
    pub from: u64,
    pub to: u64,
}

/// `n` degrees drawn from a PowerLaw or PLN model, rounded up to integers,
/// kept within `[1, n−1]`, with the sum made even by moving one uniformly
/// chosen entry by one.
pub fn pure_sample_degrees(model: &ModelSpec, n: usize, seed: u64) -> Result<(Vec<u64>, Option<ParityAdjustment>)> {
    if !matches!(model, ModelSpec::PowerLaw { .. } | ModelSpec::Pln { .. }) {
        return Err(Error::domain(format!("pure samples are defined for power_law and pln, not {}", model.kind())));
    }
    if n < 2 {
        return Err(Error::invalid("n", n as f64, "a graph needs at least two nodes"));
    }
    let cap = (n - 1) as u64;
    let mut seq: Vec<u64> = sample_values(model, n, seed)?
        .into_iter()
        .map(|x| ceil_degree(x, cap))
        .collect();
    let adj = make_even(&mut seq, cap, seed);
    Ok((seq, adj))
}

/// ⌈x⌉ clamped to `[1, cap]`. Values within 1e-12 relative of an integer
/// round to it, so e^(ln 3) gives 3.
pub fn ceil_degree(x: f64, cap: u64) -> u64 {
    if !(x < cap as f64) {
        return cap;
    }
    ((x * (1.0 - 1e-12)).ceil() as u64).clamp(1, cap)
}

/// Moves one uniformly chosen entry by one if the sum is odd.
pub fn make_even(seq: &mut [u64], cap: u64, seed: u64) -> Option<ParityAdjustment> {
    if seq.iter().sum::<u64>() % 2 == 0 || seq.is_empty() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0dd5_u64);
    let index = rng.random_range(0..seq.len());
    let from = seq[index];
    let to = if from < cap { from + 1 } else { from - 1 };
    // With cap = 1 every entry is 1 and an odd sum cannot be repaired by
    // staying within [1, cap]; exceed the cap instead.
    let to = if to == 0 { 2 } else { to };
    seq[index] = to;
    log::info!("degree sum was odd: entry {index} changed from {from} to {to}");
    Some(ParityAdjustment { index, from, to })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPhaseConfig {
    pub n_target: usize,
    /// Probability that a step adds a new node.
    pub p: f64,
    /// Edges brought by each arriving node.
    pub m_new: usize,
    /// Mean number of edges a growth step adds.
    pub growth_rate: f64,
    /// Spread of the multiplicative lognormal noise on growth steps.
    pub sigma: f64,
}

/// Growth by preferential arrivals (probability `p`) interleaved with
/// degree-independent growth steps: a uniformly chosen node gains
/// ⌈growth_rate·e^(σZ − σ²/2)⌉ edges to preferentially chosen targets.
/// Experimental.
pub fn two_phase_generate(cfg: &TwoPhaseConfig, seed: u64) -> Result<Graph> {
    let TwoPhaseConfig {
        n_target,
        p,
        m_new,
        growth_rate,
        sigma,
    } = *cfg;
    if m_new == 0 {
        return Err(Error::invalid("m_new", 0.0, "arrivals need at least one edge"));
    }
    if n_target < m_new + 1 {
        return Err(Error::invalid("n_target", n_target as f64, "must be at least m_new + 1"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid("p", p, "must lie in (0, 1]"));
    }
    if !(growth_rate > 0.0) || !(sigma >= 0.0) {
        return Err(Error::invalid("growth_rate", growth_rate, "growth rate must be positive, sigma nonnegative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut seen: FxHashSet<u64> = FxHashSet::default();
    // Each edge contributes both endpoints, so a uniform pick is ∝ degree.
    let mut ends: Vec<u32> = Vec::new();
    let add = |u: u32, v: u32, edges: &mut Vec<(u32, u32)>, seen: &mut FxHashSet<u64>, ends: &mut Vec<u32>| -> bool {
        if u == v || !seen.insert(edge_key(u, v)) {
            return false;
        }
        edges.push((u, v));
        ends.push(u);
        ends.push(v);
        true
    };
    // Seed clique on m_new + 1 nodes.
    let core = m_new + 1;
    for u in 0..core {
        for v in u + 1..core {
            add(u as u32, v as u32, &mut edges, &mut seen, &mut ends);
        }
    }
    let mut n = core;
    while n < n_target {
        if rng.random::<f64>() < p {
            let u = n as u32;
            n += 1;
            let mut added = 0;
            let mut tries = 0;
            while added < m_new && tries < 100 * m_new {
                tries += 1;
                let t = ends[rng.random_range(0..ends.len())];
                if add(u, t, &mut edges, &mut seen, &mut ends) {
                    added += 1;
                }
            }
        } else {
            let u = rng.random_range(0..n) as u32;
            let z: f64 = StandardNormal.sample(&mut rng);
            let k = (growth_rate * (sigma * z - 0.5 * sigma * sigma).exp()).ceil() as usize;
            let k = k.min(n - 1);
            let mut added = 0;
            let mut tries = 0;
            while added < k && tries < 10 * k {
                tries += 1;
                let t = ends[rng.random_range(0..ends.len())];
                if add(u, t, &mut edges, &mut seen, &mut ends) {
                    added += 1;
                }
            }
        }
    }
    Ok(Graph::from_edges(n, &edges))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Removal {
    pub graph: Graph,
    /// `kept[new_id] = old_id`.
    pub kept: Vec<u32>,
    pub removed: usize,
}

/// Nodes removed for a fraction: ⌈fraction·n⌉ (with a 1e-9 guard against
/// representation error, so 0.3·10 removes 3).
pub fn removal_count(n: usize, fraction: f64) -> usize {
    ((fraction * n as f64 - 1e-9).ceil().max(0.0) as usize).min(n)
}

/// Removes the ⌈fraction·n⌉ highest-degree nodes (ties: lower id first) and
/// their edges. Surviving nodes keep their relative order.
/// Nodes by degree descending, ties by lower id.
pub fn degree_ranking(g: &Graph) -> Vec<u32> {
    let mut order: Vec<u32> = (0..g.n() as u32).collect();
    order.sort_by(|&a, &b| g.degree(b as usize).cmp(&g.degree(a as usize)).then(a.cmp(&b)));
    order
}

pub fn remove_top_fraction(g: &Graph, fraction: f64) -> Result<Removal> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::invalid("fraction", fraction, "must lie in [0, 1)"));
    }
    let n = g.n();
    let k = removal_count(n, fraction);
    let mut gone = vec![false; n];
    for &u in &degree_ranking(g)[..k] {
        gone[u as usize] = true;
    }
    Ok(remove_nodes(g, &gone))
}

/// Induced subgraph on the nodes with `gone[u] == false`.
pub fn remove_nodes(g: &Graph, gone: &[bool]) -> Removal {
    let n = g.n();
    let mut new_id = vec![u32::MAX; n];
    let mut kept = Vec::new();
    for u in 0..n {
        if !gone[u] {
            new_id[u] = kept.len() as u32;
            kept.push(u as u32);
        }
    }
    let mut offsets = Vec::with_capacity(kept.len() + 1);
    offsets.push(0);
    let mut neighbors = Vec::new();
    for &u in &kept {
        for &v in g.neighbors(u as usize) {
            if !gone[v as usize] {
                neighbors.push(new_id[v as usize]);
            }
        }
        offsets.push(neighbors.len());
    }
    Removal {
        graph: Graph { offsets, neighbors },
        removed: n - kept.len(),
        kept,
    }
}

/// Component label per node (labels in order of smallest member) and the
/// component sizes.
pub fn connected_components(g: &Graph) -> (Vec<u32>, Vec<usize>) {
    let n = g.n();
    let mut label = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n {
        if label[s] != u32::MAX {
            continue;
        }
        let c = sizes.len() as u32;
        label[s] = c;
        queue.push_back(s);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in g.neighbors(u) {
                if label[v as usize] == u32::MAX {
                    label[v as usize] = c;
                    queue.push_back(v as usize);
                }
            }
        }
        sizes.push(size);
    }
    (label, sizes)
}

/// |largest connected component| / n_original.
pub fn largest_component_fraction(g: &Graph, n_original: usize) -> Result<f64> {
    if n_original < g.n() {
        return Err(Error::invalid("n_original", n_original as f64, "must be at least the current node count"));
    }
    if g.n() == 0 || n_original == 0 {
        return Ok(0.0);
    }
    let (_, sizes) = connected_components(g);
    Ok(*sizes.iter().max().unwrap() as f64 / n_original as f64)
}
