//! Exact desk-scale solvers for ω, χ, α, χ_a and ψ.
//!
//! All solvers count search nodes against a [`Budget`]; running out yields a
//! result with `exact == false` and a `[lower, upper]` bracket instead of an
//! error. Every certificate is re-checked by [`crate::verify`] before it is
//! returned.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use serde::Serialize;
use thiserror::Error;

use crate::bitset::BitSet;
use crate::colorings::{canonical_order, Coloring};
use crate::graph::Graph;
use crate::verify::{self, completeness_upper_bounds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Omega,
    Chi,
    Alpha,
    ChiA,
    Psi,
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parameter::Omega => "omega",
            Parameter::Chi => "chi",
            Parameter::Alpha => "alpha",
            Parameter::ChiA => "chi_a",
            Parameter::Psi => "psi",
        })
    }
}

impl FromStr for Parameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "omega" => Ok(Parameter::Omega),
            "chi" => Ok(Parameter::Chi),
            "alpha" => Ok(Parameter::Alpha),
            "chi_a" => Ok(Parameter::ChiA),
            "psi" => Ok(Parameter::Psi),
            other => Err(format!("unknown parameter {other:?}")),
        }
    }
}

/// Node budget shared by one solver invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub nodes: u64,
}

impl Budget {
    pub const DEFAULT: Budget = Budget { nodes: 100_000_000 };

    pub fn nodes(nodes: u64) -> Self {
        Budget { nodes }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Clique(Vec<usize>),
    IndependentSet(Vec<usize>),
    Coloring(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactResult {
    pub parameter: Parameter,
    /// Best certified value (the upper end for χ, the lower end otherwise).
    pub value: usize,
    pub exact: bool,
    pub lower: usize,
    pub upper: usize,
    pub certificate: Option<Certificate>,
    pub nodes_explored: u64,
    #[serde(serialize_with = "ser_secs")]
    pub elapsed: Duration,
}

fn ser_secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("solver produced an invalid {0} certificate: {1}")]
    BadCertificate(Parameter, String),
}

// ---------------------------------------------------------------------------
// maximum clique

struct CliqueSearch<'a> {
    g: &'a Graph,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

impl CliqueSearch<'_> {
    /// Greedy colouring of `cand`; returns vertices with their colour numbers
    /// in non-decreasing colour order.
    fn color_sort(&self, cand: &BitSet) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(cand.count());
        let mut uncolored = cand.clone();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut q = uncolored.clone();
            while let Some(v) = q.first() {
                q.remove(v);
                q.difference_with(self.g.row(v));
                uncolored.remove(v);
                out.push((v, color));
            }
        }
        out
    }

    fn expand(&mut self, current: &mut Vec<usize>, mut cand: BitSet) {
        let ordered = self.color_sort(&cand);
        for &(v, color) in ordered.iter().rev() {
            if current.len() + color <= self.best.len() {
                return;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                self.aborted = true;
                return;
            }
            current.push(v);
            let mut next = cand.clone();
            next.intersect_with(self.g.row(v));
            if next.is_empty() {
                if current.len() > self.best.len() {
                    self.best = current.clone();
                }
            } else {
                self.expand(current, next);
            }
            current.pop();
            if self.aborted {
                return;
            }
            cand.remove(v);
        }
    }
}

fn max_clique(g: &Graph, budget: Budget) -> (Vec<usize>, bool, u64) {
    let n = g.n();
    let mut s = CliqueSearch {
        g,
        best: Vec::new(),
        nodes: 0,
        budget: budget.nodes,
        aborted: false,
    };
    if n > 0 {
        s.best = vec![0];
        s.expand(&mut Vec::new(), BitSet::full(n));
    }
    let mut best = s.best;
    best.sort_unstable();
    (best, !s.aborted, s.nodes)
}

pub fn clique_number_exact(g: &Graph, budget: Budget) -> Result<ExactResult, OracleError> {
    let start = Instant::now();
    let (clique, exact, nodes) = max_clique(g, budget);
    if let Some(w) = verify::is_clique(g, &clique).witness {
        return Err(OracleError::BadCertificate(Parameter::Omega, format!("{w:?}")));
    }
    Ok(ExactResult {
        parameter: Parameter::Omega,
        value: clique.len(),
        exact,
        lower: clique.len(),
        upper: if exact { clique.len() } else { g.n() },
        certificate: Some(Certificate::Clique(clique)),
        nodes_explored: nodes,
        elapsed: start.elapsed(),
    })
}

pub fn independence_number_exact(g: &Graph, budget: Budget) -> Result<ExactResult, OracleError> {
    let start = Instant::now();
    let (set, exact, nodes) = max_clique(&g.complement(), budget);
    if let Some(w) = verify::is_independent(g, &set).witness {
        return Err(OracleError::BadCertificate(Parameter::Alpha, format!("{w:?}")));
    }
    Ok(ExactResult {
        parameter: Parameter::Alpha,
        value: set.len(),
        exact,
        lower: set.len(),
        upper: if exact { set.len() } else { g.n() },
        certificate: Some(Certificate::IndependentSet(set)),
        nodes_explored: nodes,
        elapsed: start.elapsed(),
    })
}

// ---------------------------------------------------------------------------
// chromatic number (DSATUR branch and bound)

struct Dsatur<'a> {
    g: &'a Graph,
    n: usize,
    color: Vec<usize>,
    /// `nbr_colors[v * n + c]`: neighbours of `v` with colour `c`.
    nbr_colors: Vec<u16>,
    saturation: Vec<usize>,
    degree: Vec<usize>,
    best_k: usize,
    best: Vec<usize>,
    lower: usize,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

const UNCOLORED: usize = usize::MAX;

impl Dsatur<'_> {
    fn set_color(&mut self, v: usize, c: usize) {
        self.color[v] = c;
        for u in self.g.row(v).iter() {
            let slot = &mut self.nbr_colors[u * self.n + c];
            if *slot == 0 {
                self.saturation[u] += 1;
            }
            *slot += 1;
        }
    }

    fn unset_color(&mut self, v: usize) {
        let c = self.color[v];
        self.color[v] = UNCOLORED;
        for u in self.g.row(v).iter() {
            let slot = &mut self.nbr_colors[u * self.n + c];
            *slot -= 1;
            if *slot == 0 {
                self.saturation[u] -= 1;
            }
        }
    }

    fn pick(&self) -> Option<usize> {
        (0..self.n)
            .filter(|&v| self.color[v] == UNCOLORED)
            .max_by_key(|&v| (self.saturation[v], self.degree[v], std::cmp::Reverse(v)))
    }

    fn search(&mut self, used: usize) {
        if self.aborted || self.best_k <= self.lower {
            return;
        }
        let Some(v) = self.pick() else {
            if used < self.best_k {
                self.best_k = used;
                self.best = self.color.clone();
            }
            return;
        };
        let limit = (used + 1).min(self.best_k - 1);
        for c in 0..limit {
            if self.nbr_colors[v * self.n + c] != 0 {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                self.aborted = true;
                return;
            }
            self.set_color(v, c);
            self.search(used.max(c + 1));
            self.unset_color(v);
            if self.aborted || self.best_k <= self.lower {
                return;
            }
        }
    }
}

pub fn chromatic_number_exact(g: &Graph, budget: Budget) -> Result<ExactResult, OracleError> {
    let start = Instant::now();
    let n = g.n();
    let (clique, _, clique_nodes) = max_clique(g, budget);
    let mut s = Dsatur {
        g,
        n,
        color: vec![UNCOLORED; n],
        nbr_colors: vec![0; n * n.max(1)],
        saturation: vec![0; n],
        degree: (0..n).map(|v| g.degree(v)).collect(),
        best_k: n + 1,
        best: (0..n).collect(),
        lower: clique.len(),
        nodes: clique_nodes,
        budget: budget.nodes,
        aborted: false,
    };
    if n == 0 {
        s.best_k = 0;
    } else {
        s.search(0);
    }
    if s.best_k > n {
        // budget ran out before the first complete descent
        s.best_k = n;
        s.best = (0..n).collect();
    }
    let mut classes = vec![Vec::new(); s.best_k];
    for (v, &c) in s.best.iter().enumerate() {
        classes[c].push(v);
    }
    let classes = canonical_order(classes);
    let coloring = Coloring::from_classes("oracle", classes.clone());
    if let Some(viol) = verify::is_proper(g, &coloring)
        .map_err(|e| OracleError::BadCertificate(Parameter::Chi, e.to_string()))?
        .violation
    {
        return Err(OracleError::BadCertificate(Parameter::Chi, format!("{viol:?}")));
    }
    let exact = !s.aborted || s.best_k <= s.lower;
    Ok(ExactResult {
        parameter: Parameter::Chi,
        value: s.best_k,
        exact,
        lower: if exact { s.best_k } else { s.lower },
        upper: s.best_k,
        certificate: Some(Certificate::Coloring(classes)),
        nodes_explored: s.nodes,
        elapsed: start.elapsed(),
    })
}

// ---------------------------------------------------------------------------
// complete colorings with exactly k classes

/// Exhaustive search for a complete coloring with exactly `k` classes,
/// optionally also proper. Vertices are placed in a fixed order; a new
/// class may only be opened as the next unused index, which removes the
/// `k!` relabelling symmetry and pins the first vertex to class 0.
pub(crate) struct CompleteSearch<'a> {
    g: &'a Graph,
    k: usize,
    proper: bool,
    order: Vec<usize>,
    assign: Vec<usize>,
    members: Vec<BitSet>,
    reach: Vec<BitSet>,
    /// Bitmask over classes already joined by an edge, per class.
    conn: Vec<u128>,
    connected_pairs: usize,
    used: usize,
    unassigned: BitSet,
    future_edges: usize,
    pub nodes: u64,
    budget: u64,
    pub aborted: bool,
    rng: Option<SplitMix64>,
}

pub(crate) const MAX_CLASSES: usize = 128;

#[derive(Clone, Copy)]
struct Undo {
    class: usize,
    added: u128,
    opened: bool,
    fixed_edges: usize,
}

impl<'a> CompleteSearch<'a> {
    pub(crate) fn new(
        g: &'a Graph,
        k: usize,
        proper: bool,
        budget: u64,
        shuffle_seed: Option<u64>,
    ) -> Self {
        assert!(k <= MAX_CLASSES, "at most {MAX_CLASSES} classes supported");
        let n = g.n();
        let mut rng = shuffle_seed.map(SplitMix64::seed_from_u64);
        let mut order: Vec<usize> = (0..n).collect();
        // high degree first: those vertices settle the most class pairs
        order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
        if let Some(r) = rng.as_mut() {
            order.shuffle(r);
            order.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
        }
        CompleteSearch {
            g,
            k,
            proper,
            order,
            assign: vec![UNCOLORED; n],
            members: vec![BitSet::new(n); k],
            reach: vec![BitSet::new(n); k],
            conn: vec![0; k],
            connected_pairs: 0,
            used: 0,
            unassigned: BitSet::full(n),
            future_edges: g.edge_count(),
            nodes: 0,
            budget,
            aborted: false,
            rng,
        }
    }

    fn place(&mut self, v: usize, c: usize) -> Undo {
        let mut nbr_classes: u128 = 0;
        let mut fixed_edges = 0;
        for u in self.g.row(v).iter() {
            let cu = self.assign[u];
            if cu != UNCOLORED {
                nbr_classes |= 1 << cu;
                fixed_edges += 1;
            }
        }
        let added = nbr_classes & !self.conn[c] & !(1u128 << c);
        self.conn[c] |= added;
        let mut rest = added;
        while rest != 0 {
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            self.conn[b] |= 1 << c;
        }
        self.connected_pairs += added.count_ones() as usize;
        let opened = c == self.used;
        if opened {
            self.used += 1;
        }
        self.assign[v] = c;
        self.members[c].insert(v);
        self.reach[c].union_with(self.g.row(v));
        self.unassigned.remove(v);
        self.future_edges -= fixed_edges;
        Undo {
            class: c,
            added,
            opened,
            fixed_edges,
        }
    }

    fn unplace(&mut self, v: usize, undo: Undo) {
        let c = undo.class;
        self.future_edges += undo.fixed_edges;
        self.unassigned.insert(v);
        self.members[c].remove(v);
        self.reach[c] = BitSet::new(self.g.n());
        for u in self.members[c].iter() {
            self.reach[c].union_with(self.g.row(u));
        }
        self.assign[v] = UNCOLORED;
        if undo.opened {
            self.used -= 1;
        }
        self.conn[c] &= !undo.added;
        let mut rest = undo.added;
        while rest != 0 {
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            self.conn[b] &= !(1 << c);
        }
        self.connected_pairs -= undo.added.count_ones() as usize;
    }

    fn feasible(&self, remaining: usize) -> bool {
        let k = self.k;
        if self.used + remaining < k {
            return false;
        }
        if self.future_edges + self.connected_pairs < k * (k - 1) / 2 {
            return false;
        }
        if self.proper {
            // a class whose reach covers every unassigned vertex can gain no
            // members; its missing partners must come from distinct
            // unassigned vertices (or it is dead if a partner is also closed)
            let mut closed: u128 = 0;
            for c in 0..self.used {
                let mut open = self.unassigned.clone();
                open.difference_with(&self.reach[c]);
                if open.is_empty() {
                    closed |= 1 << c;
                }
            }
            let all: u128 = if k == 128 { u128::MAX } else { (1u128 << k) - 1 };
            let mut rest = closed;
            while rest != 0 {
                let c = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let missing = all & !self.conn[c] & !(1 << c);
                if missing & closed != 0 {
                    return false;
                }
                if (missing.count_ones() as usize) > remaining {
                    return false;
                }
            }
        }
        true
    }

    fn dfs(&mut self, pos: usize) -> bool {
        let n = self.order.len();
        if pos == n {
            return self.used == self.k && self.connected_pairs == self.k * (self.k - 1) / 2;
        }
        let v = self.order[pos];
        let mut choices: Vec<usize> = (0..self.used)
            .filter(|&c| !self.proper || !self.reach[c].contains(v))
            .collect();
        if let Some(r) = self.rng.as_mut() {
            choices.shuffle(r);
        }
        if self.used < self.k {
            choices.push(self.used);
        }
        for c in choices {
            self.nodes += 1;
            if self.nodes > self.budget {
                self.aborted = true;
                return false;
            }
            let undo = self.place(v, c);
            if self.feasible(n - pos - 1) && self.dfs(pos + 1) {
                return true;
            }
            self.unplace(v, undo);
            if self.aborted {
                return false;
            }
        }
        false
    }

    /// Runs the search; on success returns the class index of every vertex.
    pub(crate) fn run(&mut self) -> Option<Vec<usize>> {
        if self.k == 0 {
            return (self.g.n() == 0).then(Vec::new);
        }
        if self.dfs(0) {
            Some(self.assign.clone())
        } else {
            None
        }
    }
}

/// Whether `U` has a complete (and, if `proper`, proper) coloring with exactly
/// `k` classes. `None` when the budget ran out.
pub fn complete_coloring_with_k(
    g: &Graph,
    k: usize,
    proper: bool,
    budget: Budget,
) -> (Option<Option<Coloring>>, u64) {
    let mut s = CompleteSearch::new(g, k, proper, budget.nodes, None);
    let found = s.run();
    let nodes = s.nodes;
    if s.aborted {
        return (None, nodes);
    }
    (
        Some(found.map(|a| Coloring::from_assignment("oracle", &a))),
        nodes,
    )
}

/// Quick complete proper coloring: repeatedly merge two classes with no
/// edge between them, starting from singletons. The result is always
/// proper (the union of two independent sets with no crossing edge is
/// independent) and complete once no such pair is left.
pub fn greedy_merge(g: &Graph, seed: u64) -> Coloring {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let classes = crate::search::greedy_merge_classes(g, &mut rng);
    Coloring::from_classes("oracle", canonical_order(classes))
}

fn complete_number(
    g: &Graph,
    proper: bool,
    budget: Budget,
) -> Result<ExactResult, OracleError> {
    let start = Instant::now();
    let parameter = if proper { Parameter::ChiA } else { Parameter::Psi };
    let n = g.n();
    if n == 0 {
        return Ok(ExactResult {
            parameter,
            value: 0,
            exact: true,
            lower: 0,
            upper: 0,
            certificate: Some(Certificate::Coloring(Vec::new())),
            nodes_explored: 0,
            elapsed: start.elapsed(),
        });
    }
    // singleton classes are pairwise adjacent, all other classes have >= 2
    // members: 2k - n <= ω
    let (clique, clique_exact, mut nodes) = max_clique(g, budget);
    let omega_upper = if clique_exact { clique.len() } else { n };
    let mut upper = completeness_upper_bounds(g)
        .binomial_bound_k
        .min((n + omega_upper) / 2)
        .min(n)
        .max(1);

    let mut best = greedy_merge(g, 0);
    for seed in 1..8 {
        let c = greedy_merge(g, seed);
        if c.k() > best.k() {
            best = c;
        }
    }
    let mut exact = true;
    let mut k = upper;
    while k > best.k() {
        let remaining = Budget::nodes(budget.nodes.saturating_sub(nodes));
        let (found, used) = complete_coloring_with_k(g, k, proper, remaining);
        nodes += used;
        match found {
            None => {
                exact = false;
                break;
            }
            Some(Some(c)) => {
                best = c;
                break;
            }
            Some(None) => {
                upper = k - 1;
                k -= 1;
            }
        }
    }
    let check = if proper {
        verify::check_achromatic(g, &best)
    } else {
        verify::check_complete_certificate(g, &best)
    };
    check.map_err(|e| OracleError::BadCertificate(parameter, e.to_string()))?;
    if exact {
        upper = best.k();
    }
    let classes = best.classes.iter().map(|c| c.vertices.clone()).collect();
    Ok(ExactResult {
        parameter,
        value: best.k(),
        exact,
        lower: best.k(),
        upper,
        certificate: Some(Certificate::Coloring(classes)),
        nodes_explored: nodes,
        elapsed: start.elapsed(),
    })
}

/// χ_a by deciding each `k` from an upper bound downwards; the first
/// feasible `k` is the answer.
pub fn achromatic_number_exact(g: &Graph, budget: Budget) -> Result<ExactResult, OracleError> {
    complete_number(g, true, budget)
}

/// ψ: as [`achromatic_number_exact`] without the properness constraint.
pub fn pseudo_achromatic_exact(g: &Graph, budget: Budget) -> Result<ExactResult, OracleError> {
    complete_number(g, false, budget)
}

pub fn solve(g: &Graph, param: Parameter, budget: Budget) -> Result<ExactResult, OracleError> {
    match param {
        Parameter::Omega => clique_number_exact(g, budget),
        Parameter::Chi => chromatic_number_exact(g, budget),
        Parameter::Alpha => independence_number_exact(g, budget),
        Parameter::ChiA => achromatic_number_exact(g, budget),
        Parameter::Psi => pseudo_achromatic_exact(g, budget),
    }
}
