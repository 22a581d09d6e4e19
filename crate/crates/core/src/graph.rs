//! The unitary addition Cayley graph `U(R)` and a plain adjacency-matrix
//! [`Graph`] that the verifiers and solvers operate on.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;
use crate::ring::{RingElement, RingSpec};

pub const DEFAULT_VERTEX_CAP: usize = 5000;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("ring has {n} elements, above the vertex cap of {cap}")]
    CapExceeded { n: u64, cap: usize },
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    VertexRange(usize, usize, usize),
    #[error("self-loop at vertex {0}")]
    Loop(usize),
    #[error("malformed graph JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed DOT input on line {line}: {msg}")]
    Dot { line: usize, msg: String },
}

/// Simple undirected graph stored as packed adjacency rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    rows: Vec<BitSet>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            rows: vec![BitSet::new(n); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n);
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(GraphError::VertexRange(i, j, n));
            }
            if i == j {
                return Err(GraphError::Loop(i));
            }
            g.add_edge(i, j);
        }
        Ok(g)
    }

    pub(crate) fn add_edge(&mut self, i: usize, j: usize) {
        self.rows[i].insert(j);
        self.rows[j].insert(i);
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    /// Adjacency row of `v`.
    pub fn row(&self, v: usize) -> &BitSet {
        &self.rows[v]
    }

    pub fn neighbors(&self, v: usize) -> BTreeSet<usize> {
        self.rows[v].iter().collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(BitSet::count).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, lexicographic.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().filter(move |&j| j > i).map(move |j| (i, j)))
    }

    pub fn complement(&self) -> Graph {
        let n = self.n();
        let mut g = Graph::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                if !self.adjacent(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn stats(&self) -> GraphStats {
        let degree_sequence: Vec<usize> = (0..self.n()).map(|v| self.degree(v)).collect();
        let min_degree = degree_sequence.iter().copied().min().unwrap_or(0);
        let max_degree = degree_sequence.iter().copied().max().unwrap_or(0);
        GraphStats {
            edge_count: degree_sequence.iter().sum::<usize>() / 2,
            is_regular: min_degree == max_degree,
            min_degree,
            max_degree,
            degree_sequence,
        }
    }

    /// Two-colours the graph by BFS; `None` if an odd cycle exists.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let n = self.n();
        let mut side = vec![u8::MAX; n];
        for s in 0..n {
            if side[s] != u8::MAX {
                continue;
            }
            side[s] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for u in self.rows[v].iter() {
                    if side[u] == u8::MAX {
                        side[u] = 1 - side[v];
                        queue.push_back(u);
                    } else if side[u] == side[v] {
                        return None;
                    }
                }
            }
        }
        Some(side)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub edge_count: usize,
    pub degree_sequence: Vec<usize>,
    pub is_regular: bool,
    pub min_degree: usize,
    pub max_degree: usize,
}

/// `U(R)`: vertices are ring elements, `x ~ y` iff `x ≠ y` and `x + y ∈ R^*`.
#[derive(Clone, Debug)]
pub struct UnitaryGraph {
    ring: RingSpec,
    vertices: Vec<RingElement>,
    graph: Graph,
}

impl UnitaryGraph {
    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn vertices(&self) -> &[RingElement] {
        &self.vertices
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn neighbors(&self, v: usize) -> BTreeSet<usize> {
        self.graph.neighbors(v)
    }

    pub fn stats(&self) -> GraphStats {
        self.graph.stats()
    }

    pub fn index_of(&self, x: &RingElement) -> Option<usize> {
        self.ring.index_of(x).ok()
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            ring: self.ring.descriptor(),
            n: self.n(),
            vertices: self.vertices.iter().map(|v| v.coords().to_vec()).collect(),
            edges: self.graph.edges().map(|(i, j)| [i, j]).collect(),
        }
    }

    pub fn export_json(&self) -> String {
        self.to_document().to_json()
    }

    pub fn export_dot(&self) -> String {
        let labels: Vec<String> = self.vertices.iter().map(ToString::to_string).collect();
        export_dot(&self.graph, Some(&labels))
    }
}

pub fn build_graph(ring: &RingSpec) -> Result<UnitaryGraph, GraphError> {
    build_graph_with_cap(ring, DEFAULT_VERTEX_CAP)
}

pub fn build_graph_with_cap(ring: &RingSpec, cap: usize) -> Result<UnitaryGraph, GraphError> {
    if ring.order() > cap as u64 {
        return Err(GraphError::CapExceeded {
            n: ring.order(),
            cap,
        });
    }
    let n = ring.order() as usize;
    let m = ring.m();
    let vertices: Vec<RingElement> = ring.elements().collect();
    let flat: Vec<u32> = vertices.iter().flat_map(|v| v.coords().iter().copied()).collect();
    let factors = ring.factors();
    let mut graph = Graph::empty(n);
    for i in 0..n {
        let xi = &flat[i * m..(i + 1) * m];
        for j in i + 1..n {
            let xj = &flat[j * m..(j + 1) * m];
            if factors
                .iter()
                .zip(xi.iter().zip(xj))
                .all(|(f, (&a, &b))| f.sum_is_unit(a, b))
            {
                graph.add_edge(i, j);
            }
        }
    }
    Ok(UnitaryGraph {
        ring: ring.clone(),
        vertices,
        graph,
    })
}

/// Serialize any value with lexicographically sorted object keys.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json's Value map is a BTreeMap unless `preserve_order` is enabled
    let v = serde_json::to_value(value).expect("serializable");
    serde_json::to_string_pretty(&v).expect("serializable")
}

/// Graph interchange file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub ring: String,
    pub n: usize,
    pub vertices: Vec<Vec<u32>>,
    pub edges: Vec<[usize; 2]>,
}

impl GraphDocument {
    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_graph(&self) -> Result<Graph, GraphError> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_edges(self.n, &edges)
    }

    /// Document for a graph that did not come from a ring.
    pub fn from_graph(ring: &str, g: &Graph) -> Self {
        GraphDocument {
            ring: ring.to_string(),
            n: g.n(),
            vertices: (0..g.n()).map(|i| vec![i as u32]).collect(),
            edges: g.edges().map(|(i, j)| [i, j]).collect(),
        }
    }
}

pub fn export_dot(g: &Graph, labels: Option<&[String]>) -> String {
    let mut out = String::from("graph U {\n");
    for v in 0..g.n() {
        match labels {
            Some(l) => writeln!(out, "  {v} [label=\"{}\"];", l[v]).unwrap(),
            None => writeln!(out, "  {v};").unwrap(),
        }
    }
    for (i, j) in g.edges() {
        writeln!(out, "  {i} -- {j};").unwrap();
    }
    out.push_str("}\n");
    out
}

/// Parses the DOT dialect written by [`export_dot`]: numeric node ids,
/// optional attribute lists, `i -- j;` edges.
pub fn parse_dot(text: &str) -> Result<Graph, GraphError> {
    let mut nodes = BTreeSet::new();
    let mut edges = Vec::new();
    let mut seen_header = false;
    for (lineno, raw) in text.lines().enumerate() {
        let err = |msg: &str| GraphError::Dot {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        let line = raw.trim();
        if line.is_empty() || line == "}" || line.starts_with("//") {
            continue;
        }
        if !seen_header {
            if !(line.starts_with("graph") && line.ends_with('{')) {
                return Err(err("expected `graph <name> {`"));
            }
            seen_header = true;
            continue;
        }
        let stmt = line.trim_end_matches(';');
        let stmt = stmt.split('[').next().unwrap_or("").trim();
        let id = |s: &str| s.trim().parse::<usize>().map_err(|_| err("node ids must be integers"));
        if let Some((a, b)) = stmt.split_once("--") {
            edges.push((id(a)?, id(b)?));
        } else {
            nodes.insert(id(stmt)?);
        }
    }
    let n = nodes
        .iter()
        .copied()
        .chain(edges.iter().flat_map(|&(a, b)| [a, b]))
        .max()
        .map_or(0, |m| m + 1);
    Graph::from_edges(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::euler_phi;

    fn zn(n: u64) -> UnitaryGraph {
        build_graph(&RingSpec::integers_mod(n).unwrap()).unwrap()
    }

    #[test]
    fn z5_degrees() {
        let g = zn(5);
        assert_eq!(g.n(), 5);
        assert_eq!(g.graph().degree(0), 4);
        assert_eq!(g.graph().degree(1), 3);
        assert_eq!(g.neighbors(0), BTreeSet::from([1, 2, 3, 4]));
    }

    #[test]
    fn z4_bipartite_regular() {
        let g = zn(4);
        let s = g.stats();
        assert!(s.is_regular);
        assert_eq!(s.min_degree, 2);
        assert!(g.graph().bipartition().is_some());
    }

    #[test]
    fn z3_times_z3_degrees() {
        let r: RingSpec = "prod:3,3".parse().unwrap();
        let g = build_graph(&r).unwrap();
        for (i, v) in g.vertices().iter().enumerate() {
            let expected = if r.is_unit(v) { 3 } else { 4 };
            assert_eq!(g.graph().degree(i), expected, "{v}");
        }
    }

    #[test]
    fn edge_count_examples() {
        assert_eq!(zn(15).stats().edge_count, 56);
        assert_eq!(zn(21).stats().edge_count, 120);
        let d = zn(9).stats().degree_sequence;
        assert_eq!(d.iter().filter(|&&x| x == 5).count(), 6);
        assert_eq!(d.iter().filter(|&&x| x == 6).count(), 3);
    }

    #[test]
    fn z3_json() {
        let doc = zn(3).to_document();
        assert_eq!(doc.n, 3);
        assert_eq!(doc.edges, vec![[0, 1], [0, 2]]);
        let back = GraphDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_graph().unwrap(), *zn(3).graph());
    }

    #[test]
    fn dot_roundtrip() {
        let g = zn(15);
        let parsed = parse_dot(&g.export_dot()).unwrap();
        assert_eq!(&parsed, g.graph());
        assert!(parse_dot("digraph {").is_err());
    }

    #[test]
    fn crt_graph_matches_integer_graph() {
        for n in [9u64, 15, 21, 45, 63, 105] {
            let g = zn(n);
            let n = n as usize;
            for x in 0..n {
                for y in 0..n {
                    let direct = x != y && num_integer::gcd(x + y, n) == 1;
                    assert_eq!(g.graph().adjacent(x, y), direct, "n={n} {x} {y}");
                }
            }
        }
    }

    #[test]
    fn cap_enforced() {
        let r = RingSpec::zn(5001).unwrap();
        assert!(matches!(build_graph(&r), Err(GraphError::CapExceeded { .. })));
        assert!(build_graph_with_cap(&RingSpec::zn(15).unwrap(), 10).is_err());
    }

    #[test]
    fn degree_law_for_product_rings() {
        for d in ["prod:3,3", "prod:3,3^2", "prod:gf(3,2)", "prod:5,gf(3,2)", "prod:gf(5,2)"] {
            let r: RingSpec = d.parse().unwrap();
            let g = build_graph(&r).unwrap();
            let u = r.unit_count() as usize;
            for (i, v) in g.vertices().iter().enumerate() {
                assert_eq!(g.graph().degree(i), u - r.is_unit(v) as usize, "{d} {v}");
            }
        }
        let g = zn(99);
        assert_eq!(g.stats().edge_count as u64, euler_phi(99) * 98 / 2);
    }
}
