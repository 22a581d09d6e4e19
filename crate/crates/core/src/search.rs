//! Seeded heuristic search for large complete proper colorings.
//!
//! Search results are lower-bound certificates only: every reported coloring
//! is re-verified before it leaves this module.
//!
//! Randomness comes from SplitMix64. Restart `r` of a run with seed `s` is
//! seeded with the `r`-th output of a SplitMix64 stream seeded with `s`, so a
//! `(graph, config)` pair always produces the same outcome and trace,
//! whatever the number of worker threads.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bitset::BitSet;
use crate::colorings::{canonical_order, Coloring};
use crate::graph::Graph;
use crate::oracle::CompleteSearch;
use crate::verify::{self, completeness_upper_bounds, CertificateError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Random merges of edge-free class pairs, best of all restarts.
    GreedyMerge,
    /// Fixed-`k` exhaustive search with randomized orders and a node budget.
    RandomizedBacktrack,
    /// Grow `k` one class at a time: split a class, then repair with tabu search.
    HillClimb,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy-merge" => Ok(Strategy::GreedyMerge),
            "randomized-backtrack" => Ok(Strategy::RandomizedBacktrack),
            "hill-climb" => Ok(Strategy::HillClimb),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::GreedyMerge => "greedy-merge",
            Strategy::RandomizedBacktrack => "randomized-backtrack",
            Strategy::HillClimb => "hill-climb",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub seed: u64,
    /// Independent restarts.
    pub restarts: usize,
    /// Per-restart budget: tabu iterations for hill-climb, search nodes for
    /// randomized-backtrack (ignored by greedy-merge).
    pub iterations: u64,
    pub target_k: Option<usize>,
    pub strategy: Strategy,
}

impl SearchConfig {
    pub const DEFAULT_SEED: u64 = 42;
    pub const DEFAULT_RESTARTS: usize = 8;
    pub const DEFAULT_ITERATIONS: u64 = 50_000;
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed: Self::DEFAULT_SEED,
            restarts: Self::DEFAULT_RESTARTS,
            iterations: Self::DEFAULT_ITERATIONS,
            target_k: None,
            strategy: Strategy::HillClimb,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRow {
    pub restart: usize,
    /// Best `k` over restarts `0..=restart`.
    pub k: usize,
    pub iterations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub best_coloring: Coloring,
    pub k: usize,
    pub verified: bool,
    /// `Some(false)` when a target was set and not reached.
    pub reached_target: Option<bool>,
    pub trace: Vec<TraceRow>,
}

impl SearchOutcome {
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("restart,k,iterations\n");
        for r in &self.trace {
            out.push_str(&format!("{},{},{}\n", r.restart, r.k, r.iterations));
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("search needs at least one restart")]
    NoRestarts,
    #[error("starting coloring rejected: {0}")]
    InvalidStart(#[from] CertificateError),
    #[error("search produced an invalid coloring: {0}")]
    Internal(CertificateError),
}

/// One restart's result.
struct RestartResult {
    classes: Vec<Vec<usize>>,
    iterations: u64,
}

pub(crate) fn greedy_merge_classes<R: Rng>(g: &Graph, rng: &mut R) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut classes: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut reach: Vec<BitSet> = (0..n).map(|v| g.row(v).clone()).collect();
    let mut sets: Vec<BitSet> = (0..n).map(|v| BitSet::from_iter_with_len(n, [v])).collect();
    loop {
        let mut free_pairs = Vec::new();
        for a in 0..classes.len() {
            for b in a + 1..classes.len() {
                if !reach[a].intersects(&sets[b]) {
                    free_pairs.push((a, b));
                }
            }
        }
        let Some(&(a, b)) = free_pairs.choose(rng) else {
            break;
        };
        let moved = classes.swap_remove(b);
        let moved_reach = reach.swap_remove(b);
        let moved_set = sets.swap_remove(b);
        classes[a].extend(moved);
        reach[a].union_with(&moved_reach);
        sets[a].union_with(&moved_set);
    }
    classes
}

/// Tabu search over assignments of `n` vertices to exactly `k` classes,
/// minimizing monochromatic edges plus class pairs with no edge between them.
struct FixedKTabu<'a> {
    adj: &'a [Vec<usize>],
    n: usize,
    k: usize,
    color: Vec<usize>,
    /// `nb[v * k + c]`: neighbours of `v` in class `c`.
    nb: Vec<u32>,
    /// `pe[a * k + b]`: edges between classes `a` and `b`; the diagonal counts
    /// monochromatic edges.
    pe: Vec<u32>,
    mono: usize,
    uncovered: usize,
    tabu: Vec<u64>,
}

impl<'a> FixedKTabu<'a> {
    fn new(adj: &'a [Vec<usize>], k: usize, color: Vec<usize>) -> Self {
        let n = adj.len();
        let mut s = FixedKTabu {
            adj,
            n,
            k,
            color,
            nb: vec![0; n * k],
            pe: vec![0; k * k],
            mono: 0,
            uncovered: 0,
            tabu: vec![0; n * k],
        };
        for v in 0..n {
            for &u in &adj[v] {
                s.nb[v * k + s.color[u]] += 1;
                if u > v {
                    let (a, b) = (s.color[v], s.color[u]);
                    s.pe[a * k + b] += 1;
                    if a != b {
                        s.pe[b * k + a] += 1;
                    }
                }
            }
        }
        s.mono = (0..k).map(|a| s.pe[a * k + a] as usize).sum();
        s.uncovered = (0..k)
            .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
            .filter(|&(a, b)| s.pe[a * k + b] == 0)
            .count();
        s
    }

    fn cost(&self) -> usize {
        self.mono + self.uncovered
    }

    fn delta(&self, v: usize, c: usize, nx: &[usize], loss_a: i64) -> i64 {
        let k = self.k;
        let a = self.color[v];
        let w = |x: usize| self.nb[v * k + x];
        let mut d = w(c) as i64 - w(a) as i64;
        let mut loss = loss_a;
        let mut gain = 0i64;
        for &x in nx {
            if x == a {
                continue;
            }
            if x == c {
                if self.pe[a * k + c] == w(c) {
                    loss -= 1;
                }
                continue;
            }
            if self.pe[c * k + x] == 0 {
                gain += 1;
            }
        }
        let old_ac = self.pe[a * k + c];
        let new_ac = old_ac + w(a) - w(c);
        let ac = match (old_ac == 0, new_ac == 0) {
            (false, true) => 1,
            (true, false) => -1,
            _ => 0,
        };
        d += loss - gain + ac;
        d
    }

    fn bump(&mut self, x: usize, y: usize, up: bool) {
        let k = self.k;
        if x == y {
            if up {
                self.pe[x * k + x] += 1;
                self.mono += 1;
            } else {
                self.pe[x * k + x] -= 1;
                self.mono -= 1;
            }
            return;
        }
        let before = self.pe[x * k + y];
        let after = if up { before + 1 } else { before - 1 };
        self.pe[x * k + y] = after;
        self.pe[y * k + x] = after;
        if before == 0 {
            self.uncovered -= 1;
        } else if after == 0 {
            self.uncovered += 1;
        }
    }

    fn apply(&mut self, v: usize, c: usize) {
        let k = self.k;
        let a = self.color[v];
        for &u in self.adj[v].iter() {
            let x = self.color[u];
            self.bump(a, x, false);
            self.bump(c, x, true);
            self.nb[u * k + a] -= 1;
            self.nb[u * k + c] += 1;
        }
        self.color[v] = c;
    }

    /// Runs until cost 0 or `max_iter` moves; returns moves used and success.
    fn run<R: Rng>(&mut self, max_iter: u64, rng: &mut R) -> (u64, bool) {
        let (n, k) = (self.n, self.k);
        let mut best_cost = self.cost();
        let mut nx: Vec<usize> = Vec::with_capacity(k);
        let mut seen = vec![false; k];
        let mut moves: Vec<(usize, usize)> = Vec::new();
        for it in 1..=max_iter {
            if self.cost() == 0 {
                return (it - 1, true);
            }
            let mut best_delta = i64::MAX;
            moves.clear();
            for v in 0..n {
                let a = self.color[v];
                nx.clear();
                for &u in &self.adj[v] {
                    let x = self.color[u];
                    if !seen[x] {
                        seen[x] = true;
                        nx.push(x);
                    }
                }
                for &x in &nx {
                    seen[x] = false;
                }
                let loss_a: i64 = nx
                    .iter()
                    .filter(|&&x| x != a && self.pe[a * k + x] == self.nb[v * k + x])
                    .count() as i64;
                for c in 0..k {
                    if c == a {
                        continue;
                    }
                    let d = self.delta(v, c, &nx, loss_a);
                    let tabu = self.tabu[v * k + c] >= it;
                    if tabu && (self.cost() as i64 + d) >= best_cost as i64 {
                        continue;
                    }
                    if d < best_delta {
                        best_delta = d;
                        moves.clear();
                    }
                    if d == best_delta {
                        moves.push((v, c));
                    }
                }
            }
            let Some(&(v, c)) = moves.choose(rng) else {
                continue;
            };
            let a = self.color[v];
            self.apply(v, c);
            let tenure = rng.gen_range(0..10) + (self.cost() as u64 * 6) / 10;
            self.tabu[v * k + a] = it + tenure;
            best_cost = best_cost.min(self.cost());
        }
        (max_iter, self.cost() == 0)
    }
}

fn adjacency_lists(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.n()).map(|v| g.row(v).iter().collect()).collect()
}

fn to_classes(color: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut classes = vec![Vec::new(); k];
    for (v, &c) in color.iter().enumerate() {
        classes[c].push(v);
    }
    classes
}

fn hill_climb<R: Rng>(
    g: &Graph,
    adj: &[Vec<usize>],
    start: Vec<Vec<usize>>,
    budget: u64,
    stop_at: usize,
    rng: &mut R,
) -> RestartResult {
    let n = g.n();
    let mut best = start;
    let mut used = 0u64;
    while used < budget && best.len() < stop_at {
        let k = best.len() + 1;
        let splittable: Vec<usize> = (0..best.len()).filter(|&c| best[c].len() >= 2).collect();
        let Some(&from) = splittable.choose(rng) else {
            break;
        };
        let mut color = vec![0; n];
        for (c, class) in best.iter().enumerate() {
            for &v in class {
                color[v] = c;
            }
        }
        let v = *best[from].choose(rng).unwrap();
        color[v] = k - 1;
        let mut tabu = FixedKTabu::new(adj, k, color);
        let (spent, ok) = tabu.run(budget - used, rng);
        used += spent;
        if !ok {
            break;
        }
        best = to_classes(&tabu.color, k);
    }
    RestartResult {
        classes: best,
        iterations: used,
    }
}

fn backtrack_restart<R: Rng>(
    g: &Graph,
    start: Vec<Vec<usize>>,
    budget: u64,
    stop_at: usize,
    rng: &mut R,
) -> RestartResult {
    let mut best = start;
    let mut used = 0u64;
    while used < budget && best.len() < stop_at && best.len() < crate::oracle::MAX_CLASSES {
        let mut s = CompleteSearch::new(g, best.len() + 1, true, budget - used, Some(rng.next_u64()));
        let found = s.run();
        used += s.nodes;
        match found {
            Some(assign) => best = to_classes(&assign, best.len() + 1),
            None => break,
        }
    }
    RestartResult {
        classes: best,
        iterations: used,
    }
}

fn restart_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut master = SplitMix64::seed_from_u64(seed);
    (0..count).map(|_| master.next_u64()).collect()
}

fn run_restarts(
    g: &Graph,
    graph_id: &str,
    start: Option<&[Vec<usize>]>,
    cfg: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    if cfg.restarts == 0 {
        return Err(SearchError::NoRestarts);
    }
    let upper = completeness_upper_bounds(g).binomial_bound_k;
    let stop_at = cfg.target_k.unwrap_or(usize::MAX).min(upper);
    let adj = adjacency_lists(g);
    let seeds = restart_seeds(cfg.seed, cfg.restarts);
    let one = |r: usize| -> RestartResult {
        let mut rng = SplitMix64::seed_from_u64(seeds[r]);
        let initial = match start {
            Some(c) => c.to_vec(),
            None => greedy_merge_classes(g, &mut rng),
        };
        match cfg.strategy {
            Strategy::GreedyMerge => RestartResult {
                classes: initial,
                iterations: 0,
            },
            Strategy::HillClimb => hill_climb(g, &adj, initial, cfg.iterations, stop_at, &mut rng),
            Strategy::RandomizedBacktrack => {
                backtrack_restart(g, initial, cfg.iterations, stop_at, &mut rng)
            }
        }
    };

    let batch = rayon::current_num_threads().max(1);
    let mut trace = Vec::new();
    let mut best: Option<Vec<Vec<usize>>> = None;
    let mut done = false;
    let mut r0 = 0;
    while r0 < cfg.restarts && !done {
        let r1 = (r0 + batch).min(cfg.restarts);
        let results: Vec<RestartResult> = (r0..r1).into_par_iter().map(one).collect();
        for (offset, res) in results.into_iter().enumerate() {
            let r = r0 + offset;
            // ties keep the earlier restart
            if best.as_ref().map_or(true, |b| res.classes.len() > b.len()) {
                best = Some(res.classes);
            }
            let k = best.as_ref().unwrap().len();
            trace.push(TraceRow {
                restart: r,
                k,
                iterations: res.iterations,
            });
            if cfg.target_k.is_some_and(|t| k >= t) {
                done = true;
                break;
            }
        }
        r0 = r1;
    }

    let classes = canonical_order(best.expect("at least one restart"));
    let coloring = Coloring::from_classes(graph_id, classes);
    let k = verify::check_achromatic(g, &coloring).map_err(SearchError::Internal)?;
    Ok(SearchOutcome {
        k,
        verified: true,
        reached_target: cfg.target_k.map(|t| k >= t),
        best_coloring: coloring,
        trace,
    })
}

/// Best complete proper coloring found from scratch.
pub fn achromatic_search(
    g: &Graph,
    graph_id: &str,
    cfg: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    run_restarts(g, graph_id, None, cfg)
}

/// Local search warm-started from a verified complete proper coloring; the
/// result never has fewer classes than `start`.
pub fn seed_from_construction(
    g: &Graph,
    start: &Coloring,
    cfg: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    verify::check_achromatic(g, start)?;
    let classes: Vec<Vec<usize>> = start.classes.iter().map(|c| c.vertices.clone()).collect();
    let mut out = run_restarts(g, &start.graph, Some(&classes), cfg)?;
    if out.k == start.k() {
        // keep the caller's labels when nothing improved
        out.best_coloring = start.clone();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorings::{bipartition_coloring, theorem2_coloring};
    use crate::graph::build_graph;
    use crate::ring::RingSpec;

    fn g(d: &str) -> Graph {
        build_graph(&d.parse::<RingSpec>().unwrap()).unwrap().graph().clone()
    }

    #[test]
    fn greedy_merge_is_complete_and_proper() {
        let graph = g("zn:35");
        for seed in 0..5 {
            let mut rng = SplitMix64::seed_from_u64(seed);
            let c = Coloring::from_classes("t", greedy_merge_classes(&graph, &mut rng));
            assert!(verify::check_achromatic(&graph, &c).is_ok());
        }
    }

    #[test]
    fn tabu_delta_matches_recount() {
        let graph = g("zn:21");
        let adj = adjacency_lists(&graph);
        let mut rng = SplitMix64::seed_from_u64(7);
        let k = 9;
        let color: Vec<usize> = (0..21).map(|_| rng.gen_range(0..k)).collect();
        let mut t = FixedKTabu::new(&adj, k, color);
        for _ in 0..200 {
            let v = rng.gen_range(0..21);
            let c = rng.gen_range(0..k);
            if c == t.color[v] {
                continue;
            }
            let a = t.color[v];
            let mut nx: Vec<usize> = adj[v].iter().map(|&u| t.color[u]).collect();
            nx.sort_unstable();
            nx.dedup();
            let loss_a = nx
                .iter()
                .filter(|&&x| x != a && t.pe[a * k + x] == t.nb[v * k + x])
                .count() as i64;
            let predicted = t.cost() as i64 + t.delta(v, c, &nx, loss_a);
            t.apply(v, c);
            let fresh = FixedKTabu::new(&adj, k, t.color.clone());
            assert_eq!(fresh.cost() as i64, predicted);
            assert_eq!(fresh.pe, t.pe);
            assert_eq!(fresh.nb, t.nb);
        }
    }

    #[test]
    fn z15_target_8() {
        let graph = g("zn:15");
        let cfg = SearchConfig {
            target_k: Some(8),
            ..SearchConfig::default()
        };
        let out = achromatic_search(&graph, "zn:15", &cfg).unwrap();
        assert!(out.verified);
        assert_eq!(out.k, 8);
        assert_eq!(out.reached_target, Some(true));
    }

    #[test]
    fn deterministic_outcomes() {
        let graph = g("zn:21");
        let cfg = SearchConfig {
            restarts: 5,
            iterations: 20_000,
            ..SearchConfig::default()
        };
        let a = achromatic_search(&graph, "zn:21", &cfg).unwrap();
        let b = achromatic_search(&graph, "zn:21", &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trace.len(), 5);
        assert!(a.trace.windows(2).all(|w| w[0].k <= w[1].k));
        assert!(a.k <= completeness_upper_bounds(&graph).binomial_bound_k);
    }

    #[test]
    fn warm_start_never_loses() {
        let ring: RingSpec = "zn:10".parse().unwrap();
        let graph = build_graph(&ring).unwrap().graph().clone();
        let start = bipartition_coloring(10).unwrap();
        let cfg = SearchConfig {
            iterations: 0,
            restarts: 1,
            ..SearchConfig::default()
        };
        let out = seed_from_construction(&graph, &start, &cfg).unwrap();
        assert_eq!(out.k, 2);
        assert_eq!(out.best_coloring, start);
        let out = seed_from_construction(&graph, &start, &SearchConfig::default()).unwrap();
        assert_eq!(out.k, 5);
    }

    #[test]
    fn warm_start_from_theorem2() {
        let prod: RingSpec = "prod:5,7".parse().unwrap();
        let zn: RingSpec = "zn:35".parse().unwrap();
        let graph = build_graph(&zn).unwrap().graph().clone();
        let start = theorem2_coloring(5, 7).unwrap().transport(&prod, &zn).unwrap();
        let cfg = SearchConfig {
            restarts: 2,
            iterations: 5_000,
            ..SearchConfig::default()
        };
        let out = seed_from_construction(&graph, &start, &cfg).unwrap();
        assert!(out.k >= 18);
    }

    #[test]
    fn rejects_bad_start() {
        let graph = g("zn:15");
        let one = Coloring::from_classes("zn:15", vec![(0..15).collect()]);
        assert!(matches!(
            seed_from_construction(&graph, &one, &SearchConfig::default()),
            Err(SearchError::InvalidStart(_))
        ));
        let cfg = SearchConfig {
            restarts: 0,
            ..SearchConfig::default()
        };
        assert!(matches!(achromatic_search(&graph, "zn:15", &cfg), Err(SearchError::NoRestarts)));
    }

    #[test]
    fn other_strategies() {
        let graph = g("zn:15");
        for strategy in [Strategy::GreedyMerge, Strategy::RandomizedBacktrack] {
            let cfg = SearchConfig {
                strategy,
                restarts: 4,
                iterations: 200_000,
                target_k: Some(8),
                ..SearchConfig::default()
            };
            let out = achromatic_search(&graph, "zn:15", &cfg).unwrap();
            assert!(out.verified && out.k <= 8);
        }
        assert_eq!("hill-climb".parse::<Strategy>().unwrap(), Strategy::HillClimb);
    }
}
