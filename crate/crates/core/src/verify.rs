//! Independent checkers for colorings, cliques and the counting bounds.
//!
//! Every check returns the first offending witness in a fixed order (class
//! position, then lexicographic vertex pair) so failures reproduce exactly.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::bitset::BitSet;
use crate::colorings::Coloring;
use crate::graph::Graph;

/// The coloring is not a partition of the vertex set. Reported separately
/// from colour violations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("vertex {vertex} in class {label} is outside 0..{n}")]
    OutOfRange { vertex: usize, label: String, n: usize },
    #[error("vertex {vertex} appears in both {first} and {second}")]
    Overlap {
        vertex: usize,
        first: String,
        second: String,
    },
    #[error("vertex {0} is not in any class")]
    Missing(usize),
    #[error("class {0} is empty")]
    EmptyClass(String),
    #[error("label {0} is used by more than one class")]
    DuplicateLabel(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProperReport {
    pub ok: bool,
    /// Monochromatic edge `(u, v, label)` with `u < v`.
    pub violation: Option<(usize, usize, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompleteReport {
    pub ok: bool,
    pub missing_pair: Option<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetReport {
    pub ok: bool,
    pub witness: Option<(usize, usize)>,
}

pub fn check_partition(n: usize, c: &Coloring) -> Result<(), PartitionError> {
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut labels = BTreeSet::new();
    for (ci, class) in c.classes.iter().enumerate() {
        if !labels.insert(class.label.as_str()) {
            return Err(PartitionError::DuplicateLabel(class.label.clone()));
        }
        if class.vertices.is_empty() {
            return Err(PartitionError::EmptyClass(class.label.clone()));
        }
        for &v in &class.vertices {
            if v >= n {
                return Err(PartitionError::OutOfRange {
                    vertex: v,
                    label: class.label.clone(),
                    n,
                });
            }
            if let Some(prev) = owner[v] {
                return Err(PartitionError::Overlap {
                    vertex: v,
                    first: c.classes[prev].label.clone(),
                    second: class.label.clone(),
                });
            }
            owner[v] = Some(ci);
        }
    }
    match owner.iter().position(Option::is_none) {
        Some(v) => Err(PartitionError::Missing(v)),
        None => Ok(()),
    }
}

fn class_sets(g: &Graph, c: &Coloring) -> Vec<BitSet> {
    c.classes
        .iter()
        .map(|cl| BitSet::from_iter_with_len(g.n(), cl.vertices.iter().copied()))
        .collect()
}

pub fn is_proper(g: &Graph, c: &Coloring) -> Result<ProperReport, PartitionError> {
    check_partition(g.n(), c)?;
    for class in &c.classes {
        let mut members = class.vertices.clone();
        members.sort_unstable();
        if let Some((u, v)) = first_pair(g, &members, true) {
            return Ok(ProperReport {
                ok: false,
                violation: Some((u, v, class.label.clone())),
            });
        }
    }
    Ok(ProperReport {
        ok: true,
        violation: None,
    })
}

pub fn is_complete(g: &Graph, c: &Coloring) -> Result<CompleteReport, PartitionError> {
    check_partition(g.n(), c)?;
    let sets = class_sets(g, c);
    let reach: Vec<BitSet> = c
        .classes
        .iter()
        .map(|cl| {
            let mut acc = BitSet::new(g.n());
            for &v in &cl.vertices {
                acc.union_with(g.row(v));
            }
            acc
        })
        .collect();
    for a in 0..sets.len() {
        for b in a + 1..sets.len() {
            if !reach[a].intersects(&sets[b]) {
                return Ok(CompleteReport {
                    ok: false,
                    missing_pair: Some((c.classes[a].label.clone(), c.classes[b].label.clone())),
                });
            }
        }
    }
    Ok(CompleteReport {
        ok: true,
        missing_pair: None,
    })
}

/// First pair (lexicographic over sorted members) that is adjacent when
/// `want_adjacent`, non-adjacent otherwise.
fn first_pair(g: &Graph, members: &[usize], want_adjacent: bool) -> Option<(usize, usize)> {
    for (i, &u) in members.iter().enumerate() {
        for &v in &members[i + 1..] {
            if u != v && g.adjacent(u, v) == want_adjacent {
                return Some((u, v));
            }
        }
    }
    None
}

fn sorted_unique(s: &[usize]) -> Vec<usize> {
    let mut v = s.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn is_clique(g: &Graph, s: &[usize]) -> SetReport {
    let w = first_pair(g, &sorted_unique(s), false);
    SetReport {
        ok: w.is_none(),
        witness: w,
    }
}

pub fn is_independent(g: &Graph, s: &[usize]) -> SetReport {
    let w = first_pair(g, &sorted_unique(s), true);
    SetReport {
        ok: w.is_none(),
        witness: w,
    }
}

/// Vertices outside `s` adjacent to no member of `s`.
///
/// A class `C'` contained in this set has no edge to `s`. Members of `s`
/// itself are left out.
pub fn non_common_neighbors(g: &Graph, s: &[usize]) -> BTreeSet<usize> {
    let mut covered = BitSet::new(g.n());
    for &v in s {
        covered.union_with(g.row(v));
        covered.insert(v);
    }
    (0..g.n()).filter(|&v| !covered.contains(v)).collect()
}

/// Upper bounds on the number of classes of any complete coloring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperBounds {
    /// Largest `k` with `k(k−1)/2 ≤ e`.
    pub binomial_bound_k: usize,
    /// `√(2e + 1/4) + 1/2`.
    pub sqrt_bound: f64,
}

pub fn completeness_upper_bounds(g: &Graph) -> UpperBounds {
    bounds_for_edge_count(g.edge_count() as u64)
}

pub fn bounds_for_edge_count(e: u64) -> UpperBounds {
    let mut k: u64 = 1;
    while (k + 1) * k / 2 <= e {
        k += 1;
    }
    let sqrt_bound = (2.0 * e as f64 + 0.25).sqrt() + 0.5;
    assert_eq!(k, sqrt_bound.floor() as u64, "binomial and sqrt bounds disagree for e = {e}");
    UpperBounds {
        binomial_bound_k: k as usize,
        sqrt_bound,
    }
}

/// Members of singleton classes.
pub fn special_vertices(c: &Coloring) -> Vec<usize> {
    c.classes
        .iter()
        .filter(|cl| cl.vertices.len() == 1)
        .map(|cl| cl.vertices[0])
        .collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("edge ({0}, {1}) is monochromatic in class {2}")]
    NotProper(usize, usize, String),
    #[error("no edge between classes {0} and {1}")]
    NotComplete(String, String),
    #[error("special vertices {0} and {1} are not adjacent")]
    SpecialNotClique(usize, usize),
    #[error("{k} classes exceed the counting bound {bound}")]
    AboveCountingBound { k: usize, bound: usize },
}

/// Full check of an achromatic (complete proper) coloring; returns its size.
pub fn check_achromatic(g: &Graph, c: &Coloring) -> Result<usize, CertificateError> {
    if let Some((u, v, l)) = is_proper(g, c)?.violation {
        return Err(CertificateError::NotProper(u, v, l));
    }
    check_complete_certificate(g, c)
}

/// Check of a complete (not necessarily proper) coloring; returns its size.
pub fn check_complete_certificate(g: &Graph, c: &Coloring) -> Result<usize, CertificateError> {
    if let Some((a, b)) = is_complete(g, c)?.missing_pair {
        return Err(CertificateError::NotComplete(a, b));
    }
    let special = special_vertices(c);
    if let Some((u, v)) = is_clique(g, &special).witness {
        return Err(CertificateError::SpecialNotClique(u, v));
    }
    let bound = completeness_upper_bounds(g).binomial_bound_k;
    // a single class is complete vacuously, even on an edgeless graph
    if c.k() > bound.max(1) {
        return Err(CertificateError::AboveCountingBound { k: c.k(), bound });
    }
    Ok(c.k())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("graph {graph}: certified lower bound {lower} exceeds known upper bound {upper}")]
pub struct LedgerContradiction {
    pub graph: String,
    pub lower: usize,
    pub upper: usize,
}

/// Best certified achromatic lower bound per graph. Bounds only grow, and a
/// lower bound above a recorded upper bound is an error.
#[derive(Debug, Default, Clone)]
pub struct LowerBoundLedger {
    entries: BTreeMap<String, (usize, usize)>,
}

impl LowerBoundLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Verifies `c` on `g` and raises the lower bound for `graph_id` if larger.
    pub fn record(
        &mut self,
        graph_id: &str,
        g: &Graph,
        c: &Coloring,
    ) -> Result<usize, LedgerRecordError> {
        let k = check_achromatic(g, c)?;
        let upper = completeness_upper_bounds(g).binomial_bound_k;
        let entry = self.entries.entry(graph_id.to_string()).or_insert((0, upper));
        entry.0 = entry.0.max(k);
        if entry.0 > entry.1 {
            return Err(LedgerContradiction {
                graph: graph_id.into(),
                lower: entry.0,
                upper: entry.1,
            }
            .into());
        }
        Ok(entry.0)
    }

    /// Tightens the upper bound (e.g. from an exact solver).
    pub fn record_upper(&mut self, graph_id: &str, upper: usize) -> Result<(), LedgerContradiction> {
        let entry = self
            .entries
            .entry(graph_id.to_string())
            .or_insert((0, usize::MAX));
        entry.1 = entry.1.min(upper);
        if entry.0 > entry.1 {
            return Err(LedgerContradiction {
                graph: graph_id.into(),
                lower: entry.0,
                upper: entry.1,
            });
        }
        Ok(())
    }

    pub fn lower(&self, graph_id: &str) -> Option<usize> {
        self.entries.get(graph_id).map(|e| e.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LedgerRecordError {
    #[error(transparent)]
    Certificate(#[from] CertificateError),
    #[error(transparent)]
    Contradiction(#[from] LedgerContradiction),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorings::{bipartition_coloring, theorem1_clique, theorem1_coloring, theorem2_coloring, ColorClass};
    use crate::graph::build_graph;
    use crate::ring::RingSpec;
    use proptest::prelude::*;

    fn g(d: &str) -> Graph {
        build_graph(&d.parse::<RingSpec>().unwrap()).unwrap().graph().clone()
    }

    fn singletons(n: usize) -> Coloring {
        Coloring::from_classes("t", (0..n).map(|v| vec![v]).collect())
    }

    #[test]
    fn proper_examples() {
        let c = theorem2_coloring(3, 5).unwrap();
        assert!(is_proper(&g("prod:3,5"), &c).unwrap().ok);
        let one = Coloring::from_classes("zn:5", vec![(0..5).collect()]);
        let r = is_proper(&g("zn:5"), &one).unwrap();
        assert_eq!(r.violation, Some((0, 1, "c_0".into())));
        assert!(is_proper(&g("zn:5"), &singletons(5)).unwrap().ok);
    }

    #[test]
    fn complete_examples() {
        let c = theorem2_coloring(3, 7).unwrap();
        assert!(is_complete(&g("prod:3,7"), &c).unwrap().ok);
        let r = is_complete(&g("zn:9"), &singletons(9)).unwrap();
        assert_eq!(r.missing_pair, Some(("c_0".into(), "c_3".into())));
        assert!(is_complete(&g("zn:6"), &bipartition_coloring(6).unwrap()).unwrap().ok);
    }

    #[test]
    fn partition_errors_are_distinct() {
        let graph = g("zn:5");
        let overlap = Coloring::from_classes("x", vec![vec![0, 1], vec![1, 2, 3, 4]]);
        assert!(matches!(is_proper(&graph, &overlap), Err(PartitionError::Overlap { vertex: 1, .. })));
        let missing = Coloring::from_classes("x", vec![vec![0, 1, 2, 3]]);
        assert_eq!(is_complete(&graph, &missing), Err(PartitionError::Missing(4)));
        let range = Coloring::from_classes("x", vec![vec![0, 1, 2, 3, 4, 9]]);
        assert!(matches!(is_proper(&graph, &range), Err(PartitionError::OutOfRange { .. })));
        let dup = Coloring::new(
            "x",
            vec![
                ColorClass { label: "a".into(), vertices: vec![0, 1] },
                ColorClass { label: "a".into(), vertices: vec![2, 3, 4] },
            ],
        );
        assert!(matches!(is_proper(&graph, &dup), Err(PartitionError::DuplicateLabel(_))));
    }

    #[test]
    fn clique_and_independence_examples() {
        let r: RingSpec = "zn:15".parse().unwrap();
        let graph = g("zn:15");
        assert!(is_clique(&graph, &theorem1_clique(&r).unwrap().vertices).ok);
        let a1 = theorem1_coloring(&r).unwrap().class("A_1").unwrap().vertices.clone();
        assert!(is_independent(&graph, &a1).ok);
        assert!(is_clique(&g("zn:5"), &[0, 1, 2]).ok);
        assert_eq!(is_clique(&g("zn:5"), &[1, 4]).witness, Some((1, 4)));
    }

    #[test]
    fn non_common_neighbor_examples() {
        let graph = g("prod:3,5");
        let at = |x: usize, y: usize| x * 5 + y;
        assert_eq!(
            non_common_neighbors(&graph, &[at(0, 1), at(2, 4)]),
            BTreeSet::from([at(1, 4)])
        );
        assert_eq!(
            non_common_neighbors(&graph, &[at(1, 1), at(0, 4)]),
            BTreeSet::from([at(2, 1)])
        );
        assert!(non_common_neighbors(&graph, &(0..15).collect::<Vec<_>>()).is_empty());
    }

    #[test]
    fn counting_bounds() {
        assert_eq!(completeness_upper_bounds(&g("zn:35")).binomial_bound_k, 29);
        let b = completeness_upper_bounds(&g("zn:15"));
        assert_eq!(b.binomial_bound_k, 11);
        assert!((b.sqrt_bound - (112.25f64).sqrt() - 0.5).abs() < 1e-12);
        assert_eq!(completeness_upper_bounds(&Graph::empty(4)).binomial_bound_k, 1);
        for e in 0..2000 {
            let b = bounds_for_edge_count(e);
            let k = b.binomial_bound_k as u64;
            assert!(k * (k - 1) / 2 <= e && (k + 1) * k / 2 > e);
        }
    }

    #[test]
    fn ledger_is_monotone() {
        let graph = g("prod:3,5");
        let mut ledger = LowerBoundLedger::new();
        let t2 = theorem2_coloring(3, 5).unwrap();
        assert_eq!(ledger.record("u15", &graph, &t2).unwrap(), 8);
        let two = theorem1_coloring(&"prod:3,5".parse().unwrap()).unwrap();
        assert_eq!(ledger.record("u15", &graph, &two).unwrap(), 8);
        assert!(ledger.record_upper("u15", 7).is_err());
        assert!(ledger.record("u15", &graph, &singletons(15)).is_err());
    }

    fn naive_complete(g: &Graph, c: &Coloring) -> bool {
        for (a, ca) in c.classes.iter().enumerate() {
            for cb in &c.classes[a + 1..] {
                if !ca.vertices.iter().any(|&u| cb.vertices.iter().any(|&v| g.adjacent(u, v))) {
                    return false;
                }
            }
        }
        true
    }

    proptest! {
        #[test]
        fn complete_matches_naive(
            n in 1usize..50,
            edges in proptest::collection::vec((0usize..50, 0usize..50), 0..300),
            colors in proptest::collection::vec(0usize..12, 50),
        ) {
            let edges: Vec<_> = edges.into_iter().filter(|&(a, b)| a < n && b < n && a != b).collect();
            let graph = Graph::from_edges(n, &edges).unwrap();
            let c = Coloring::from_assignment("r", &colors[..n]);
            let fast = is_complete(&graph, &c).unwrap().ok;
            prop_assert_eq!(fast, naive_complete(&graph, &c));
            if fast && is_proper(&graph, &c).unwrap().ok {
                // singleton classes of a complete coloring are pairwise adjacent
                prop_assert!(is_clique(&graph, &special_vertices(&c)).ok);
                prop_assert!(c.k() <= completeness_upper_bounds(&graph).binomial_bound_k.max(1));
            }
        }
    }
}
