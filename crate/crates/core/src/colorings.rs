//! Explicit colorings and cliques of `U(R)`.
//!
//! * [`theorem1_coloring`] / [`theorem1_clique`]: an optimal proper coloring
//!   and a clique of the same size `m + |R^*|/2^m` for any odd-order ring.
//! * [`theorem2_coloring`]: a complete proper coloring of `U(Z_p × Z_q)` with
//!   `(pq+1)/2` classes.
//! * [`bipartition_coloring`]: the parity 2-coloring of `U(Z_n)`, `n` even.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{build_graph, to_canonical_json, GraphError};
use crate::ring::{is_prime, RingElement, RingError, RingSpec};
use crate::verify;

#[derive(Debug, Error)]
pub enum ColoringError {
    #[error("construction needs a ring of odd order, got {0}")]
    EvenOrder(String),
    #[error("construction needs an even n, got {0}")]
    OddN(u64),
    #[error("theorem-2 coloring needs primes 3 <= p < q, got p = {p}, q = {q}")]
    BadPrimes { p: u64, q: u64 },
    #[error("cannot move a coloring between {from} and {to}: factor structure differs")]
    Transport { from: String, to: String },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("internal construction check failed: {0}")]
    SelfCheck(String),
    #[error("malformed coloring JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorClass {
    pub label: String,
    pub vertices: Vec<usize>,
}

/// A partition of the vertices of a graph into labelled classes.
///
/// Nothing is validated on construction so that tampered or hand-written
/// files can still be loaded and rejected by [`crate::verify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    pub graph: String,
    pub classes: Vec<ColorClass>,
}

#[derive(Serialize, Deserialize)]
struct ColoringDocument {
    graph: String,
    k: usize,
    classes: Vec<ColorClass>,
}

impl Coloring {
    pub fn new(graph: impl Into<String>, classes: Vec<ColorClass>) -> Self {
        Coloring {
            graph: graph.into(),
            classes,
        }
    }

    /// Classes labelled `c_0, c_1, …` from raw vertex lists; each list is sorted.
    pub fn from_classes(graph: impl Into<String>, classes: Vec<Vec<usize>>) -> Self {
        Coloring {
            graph: graph.into(),
            classes: classes
                .into_iter()
                .enumerate()
                .map(|(i, mut vertices)| {
                    vertices.sort_unstable();
                    ColorClass {
                        label: format!("c_{i}"),
                        vertices,
                    }
                })
                .collect(),
        }
    }

    /// Builds a coloring from a per-vertex class index (`0..k`).
    pub fn from_assignment(graph: impl Into<String>, assignment: &[usize]) -> Self {
        let k = assignment.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut classes = vec![Vec::new(); k];
        for (v, &c) in assignment.iter().enumerate() {
            classes[c].push(v);
        }
        classes.retain(|c| !c.is_empty());
        Self::from_classes(graph, canonical_order(classes))
    }

    pub fn k(&self) -> usize {
        self.classes.len()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.classes.iter().map(|c| c.label.as_str()).collect()
    }

    pub fn class(&self, label: &str) -> Option<&ColorClass> {
        self.classes.iter().find(|c| c.label == label)
    }

    /// Class index per vertex; `None` for uncovered vertices.
    pub fn assignment(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for (ci, class) in self.classes.iter().enumerate() {
            for &v in &class.vertices {
                if v < n {
                    out[v] = Some(ci);
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(&ColoringDocument {
            graph: self.graph.clone(),
            k: self.k(),
            classes: self.classes.clone(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ColoringError> {
        let doc: ColoringDocument = serde_json::from_str(text)?;
        Ok(Coloring {
            graph: doc.graph,
            classes: doc.classes,
        })
    }

    /// Re-indexes the vertices from `from`'s enumeration to `to`'s. Both rings
    /// must have the same factor list (e.g. `prod:3,5` and `zn:15`).
    pub fn transport(&self, from: &RingSpec, to: &RingSpec) -> Result<Coloring, ColoringError> {
        if from.factors() != to.factors() {
            return Err(ColoringError::Transport {
                from: from.descriptor(),
                to: to.descriptor(),
            });
        }
        let classes = self
            .classes
            .iter()
            .map(|c| {
                let mut vertices = c
                    .vertices
                    .iter()
                    .map(|&v| to.index_of(&from.element(v)))
                    .collect::<Result<Vec<_>, _>>()?;
                vertices.sort_unstable();
                Ok(ColorClass {
                    label: c.label.clone(),
                    vertices,
                })
            })
            .collect::<Result<Vec<_>, RingError>>()?;
        Ok(Coloring {
            graph: to.descriptor(),
            classes,
        })
    }
}

/// Sorts classes by their minimum member.
pub fn canonical_order(mut classes: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for c in &mut classes {
        c.sort_unstable();
    }
    classes.sort_by_key(|c| c.first().copied().unwrap_or(usize::MAX));
    classes
}

/// A clique together with how each member arose in the construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliqueWitness {
    pub graph: String,
    pub vertices: Vec<usize>,
    /// `"T_i"` for the `i`-th member of `T`, `"S"` for members of `S_1 × … × S_m`.
    pub labels: Vec<String>,
}

impl CliqueWitness {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

fn require_odd(r: &RingSpec) -> Result<(), ColoringError> {
    if r.is_odd_order() {
        Ok(())
    } else {
        Err(ColoringError::EvenOrder(r.descriptor()))
    }
}

/// `m + |R^*| / 2^m`.
pub fn theorem1_value(r: &RingSpec) -> Result<u64, ColoringError> {
    require_odd(r)?;
    Ok(r.m() as u64 + r.unit_count() / (1u64 << r.m()))
}

/// Optimal proper coloring: the non-units split into `A_1 … A_m` by the first
/// coordinate lying in a maximal ideal, the units into the classes `B_j` of
/// the relation "equal up to per-coordinate sign".
pub fn theorem1_coloring(r: &RingSpec) -> Result<Coloring, ColoringError> {
    require_odd(r)?;
    let m = r.m();
    let factors = r.factors();
    let mut a_classes = vec![Vec::new(); m];
    let mut b_classes: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
    for (v, x) in r.elements().enumerate() {
        match factors.iter().zip(x.coords()).position(|(f, &c)| !f.is_unit(c)) {
            Some(i) => a_classes[i].push(v),
            None => {
                let key: Vec<u32> = factors
                    .iter()
                    .zip(x.coords())
                    .map(|(f, &c)| c.min(f.neg(c)))
                    .collect();
                b_classes.entry(key).or_default().push(v);
            }
        }
    }
    let mut classes: Vec<ColorClass> = a_classes
        .into_iter()
        .enumerate()
        .map(|(i, vertices)| ColorClass {
            label: format!("A_{}", i + 1),
            vertices,
        })
        .collect();
    let b_sorted = canonical_order(b_classes.into_values().collect());
    let block = 1usize << m;
    for (j, vertices) in b_sorted.into_iter().enumerate() {
        if vertices.len() != block {
            return Err(ColoringError::SelfCheck(format!(
                "B_{} has {} elements, expected {block}",
                j + 1,
                vertices.len()
            )));
        }
        classes.push(ColorClass {
            label: format!("B_{}", j + 1),
            vertices,
        });
    }
    let expected = theorem1_value(r)? as usize;
    if classes.len() != expected {
        return Err(ColoringError::SelfCheck(format!(
            "{} classes, expected {expected}",
            classes.len()
        )));
    }
    Ok(Coloring::new(r.descriptor(), classes))
}

/// Half of the nonzero residue field elements, one from each pair `{x, −x}`,
/// never containing `−1`: the earlier element in the factor's fixed
/// enumeration order is kept.
pub fn half_residue_set(factor: &crate::ring::LocalFactor) -> Result<Vec<u32>, ColoringError> {
    let order = factor.residue_field_units_ordered()?;
    let q = factor.residue_field_size()?;
    // the residue field of Z_{p^k} is Z_p, whose negation is p - x
    let neg = |x: u32| match factor.kind() {
        crate::ring::FactorKind::GaloisField => factor.neg(x),
        _ => (q - x) % q,
    };
    let mut chosen: Vec<u32> = Vec::new();
    let mut seen = BTreeSet::new();
    for x in order {
        if seen.contains(&x) {
            continue;
        }
        seen.insert(x);
        seen.insert(neg(x));
        chosen.push(x);
    }
    let minus_one = neg(1);
    if chosen.len() as u32 != (q - 1) / 2 || chosen.contains(&minus_one) {
        return Err(ColoringError::SelfCheck(format!(
            "half residue set {chosen:?} violates its defining conditions"
        )));
    }
    Ok(chosen)
}

/// Clique `T ∪ (S_1 × … × S_m)` of size `m + ∏ (|R_i| − |M_i|)/2`, where
/// `S_i` is the preimage of [`half_residue_set`] and `T` holds the `m`
/// vectors with a single zero coordinate and ones elsewhere.
pub fn theorem1_clique(r: &RingSpec) -> Result<CliqueWitness, ColoringError> {
    require_odd(r)?;
    let factors = r.factors();
    let mut s_sets: Vec<Vec<u32>> = Vec::with_capacity(r.m());
    for f in factors {
        let hat: BTreeSet<u32> = half_residue_set(f)?.into_iter().collect();
        let s: Vec<u32> = (0..f.size())
            .filter(|&x| f.quotient_residue(x).map(|res| hat.contains(&res)).unwrap_or(false))
            .collect();
        s_sets.push(s);
    }

    let mut members: Vec<(RingElement, String)> = Vec::new();
    for i in 0..r.m() {
        let coords = factors
            .iter()
            .enumerate()
            .map(|(j, f)| if j == i { f.zero() } else { f.one() })
            .collect();
        members.push((RingElement::new(coords), format!("T_{}", i + 1)));
    }
    let mut stack = vec![Vec::new()];
    for s in &s_sets {
        stack = stack
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                s.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    members.extend(stack.into_iter().map(|c| (RingElement::new(c), "S".to_string())));

    for (a, (x, _)) in members.iter().enumerate() {
        for (y, _) in &members[a + 1..] {
            if x == y || !r.is_unit(&r.add(x, y)?) {
                return Err(ColoringError::SelfCheck(format!("{x} and {y} are not adjacent")));
            }
        }
    }
    let expected = theorem1_value(r)? as usize;
    if members.len() != expected {
        return Err(ColoringError::SelfCheck(format!(
            "clique has {} members, expected {expected}",
            members.len()
        )));
    }
    let mut indexed: Vec<(usize, String)> = members
        .into_iter()
        .map(|(x, l)| Ok((r.index_of(&x)?, l)))
        .collect::<Result<_, RingError>>()?;
    indexed.sort();
    let (vertices, labels) = indexed.into_iter().unzip();
    Ok(CliqueWitness {
        graph: r.descriptor(),
        vertices,
        labels,
    })
}

/// Complete proper coloring of `U(Z_p × Z_q)` with `(pq+1)/2` classes, on the
/// ring `prod:p,q` (vertex `(x, y)` has index `x·q + y`). Properness and
/// completeness are checked before returning.
pub fn theorem2_coloring(p: u64, q: u64) -> Result<Coloring, ColoringError> {
    if !(is_prime(p) && is_prime(q) && 3 <= p && p < q) {
        return Err(ColoringError::BadPrimes { p, q });
    }
    let ring: RingSpec = format!("prod:{p},{q}").parse()?;
    let (pi, qi) = (p as i64, q as i64);
    let half = (qi - 1) / 2;
    let idx = |x: i64, y: i64| -> usize { (x.rem_euclid(pi) * qi + y.rem_euclid(qi)) as usize };

    let mut raw: Vec<(String, Vec<usize>)> = Vec::new();
    let mut push = |label: String, pts: &[(i64, i64)]| {
        let mut v: Vec<usize> = pts.iter().map(|&(x, y)| idx(x, y)).collect();
        v.sort_unstable();
        v.dedup();
        raw.push((label, v));
    };

    push("C_s".into(), &[(0, half)]);
    push("E_1".into(), &[(0, 0), (pi - 1, 0)]);
    push("E_2".into(), &[(1, 0), (pi - 1, (qi + 1) / 2)]);
    push("E_3".into(), &[(0, 1), (pi - 1, qi - 1)]);
    push("E_4".into(), &[(1, 1), (0, qi - 1)]);
    push("E_5".into(), &[(2, 1), (1, qi - 1)]);
    push("E_6".into(), &[(pi - 1, 1), (pi - 2, qi - 1)]);
    for z in 1..=(pi - 5) / 2 {
        push(format!("M_{z}"), &[(z + 2, 1), ((pi - 1) / 2 + z, qi - 1)]);
    }
    for t in 1..=(pi - 3) / 2 {
        // index shifted by one against the printed {(p−t, 0), (t, q−1)},
        // which collides with E_1 and E_5 and leaves two vertices uncovered
        push(format!("D_{t}"), &[(pi - t - 1, 0), (t + 1, qi - 1)]);
        push(format!("D_{t}'"), &[(t + 1, 0), (pi - t - 1, 1)]);
    }
    for i in 1..pi {
        push(format!("C_{{{i},{half}}}"), &[(i, half), (i - 1, (qi + 1) / 2)]);
    }
    for i in 0..pi {
        for j in 2..=(qi - 3) / 2 {
            push(format!("C_{{{i},{j}}}"), &[(i, j), (i - 1, qi - j)]);
        }
    }

    // p = 3 makes E_6 coincide with E_5
    let mut classes: Vec<ColorClass> = Vec::with_capacity(raw.len());
    for (label, vertices) in raw {
        if let Some(prev) = classes.iter_mut().find(|c| c.vertices == vertices) {
            prev.label = format!("{} (={label})", prev.label);
            continue;
        }
        classes.push(ColorClass { label, vertices });
    }
    let coloring = Coloring::new(ring.descriptor(), classes);

    let expected = ((p * q + 1) / 2) as usize;
    if coloring.k() != expected {
        return Err(ColoringError::SelfCheck(format!(
            "{} classes, expected {expected}",
            coloring.k()
        )));
    }
    let g = build_graph(&ring)?;
    let proper = verify::is_proper(g.graph(), &coloring)
        .map_err(|e| ColoringError::SelfCheck(e.to_string()))?;
    if let Some(v) = proper.violation {
        return Err(ColoringError::SelfCheck(format!("monochromatic edge {v:?}")));
    }
    let complete = verify::is_complete(g.graph(), &coloring)
        .map_err(|e| ColoringError::SelfCheck(e.to_string()))?;
    if let Some(pair) = complete.missing_pair {
        return Err(ColoringError::SelfCheck(format!("no edge between {pair:?}")));
    }
    Ok(coloring)
}

/// Parity classes of `U(Z_n)` for even `n`.
pub fn bipartition_coloring(n: u64) -> Result<Coloring, ColoringError> {
    if n % 2 == 1 {
        return Err(ColoringError::OddN(n));
    }
    let ring = RingSpec::zn_even(n)?;
    let n = n as usize;
    Ok(Coloring::new(
        ring.descriptor(),
        vec![
            ColorClass {
                label: "even".into(),
                vertices: (0..n).step_by(2).collect(),
            },
            ColorClass {
                label: "odd".into(),
                vertices: (1..n).step_by(2).collect(),
            },
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{is_clique, is_complete, is_independent, is_proper, non_common_neighbors};

    fn ring(d: &str) -> RingSpec {
        d.parse().unwrap()
    }

    #[test]
    fn theorem1_class_counts() {
        assert_eq!(theorem1_coloring(&ring("zn:9")).unwrap().k(), 4);
        assert_eq!(theorem1_coloring(&ring("zn:15")).unwrap().k(), 4);
        assert_eq!(theorem1_coloring(&ring("prod:3,3")).unwrap().k(), 3);
        assert!(matches!(
            theorem1_coloring(&ring("zn:10")),
            Err(ColoringError::EvenOrder(_))
        ));
    }

    #[test]
    fn theorem1_classes_are_independent_and_sized() {
        for d in ["zn:15", "zn:45", "zn:105", "prod:3,3^2", "prod:5,gf(3,2)", "prod:gf(7,2)"] {
            let r = ring(d);
            let g = build_graph(&r).unwrap();
            let c = theorem1_coloring(&r).unwrap();
            assert!(is_proper(g.graph(), &c).unwrap().ok, "{d}");
            for class in &c.classes {
                assert!(is_independent(g.graph(), &class.vertices).ok);
                if class.label.starts_with('B') {
                    assert_eq!(class.vertices.len(), 1 << r.m());
                }
            }
        }
    }

    #[test]
    fn theorem1_clique_sizes() {
        assert_eq!(theorem1_clique(&ring("zn:15")).unwrap().len(), 4);
        assert_eq!(theorem1_clique(&ring("zn:105")).unwrap().len(), 9);
        let gf9 = ring("prod:gf(3,2)");
        let w = theorem1_clique(&gf9).unwrap();
        assert_eq!(w.len(), 5);
        let g = build_graph(&gf9).unwrap();
        assert!(is_clique(g.graph(), &w.vertices).ok);
        assert_eq!(w.labels.iter().filter(|l| l.starts_with('T')).count(), 1);
    }

    #[test]
    fn half_residue_sets() {
        let r = ring("zn:45");
        assert_eq!(half_residue_set(&r.factors()[0]).unwrap(), vec![1]);
        assert_eq!(half_residue_set(&r.factors()[1]).unwrap(), vec![1, 2]);
        let gf = ring("prod:gf(5,2)");
        let s = half_residue_set(&gf.factors()[0]).unwrap();
        assert_eq!(s.len(), 12);
        assert_eq!(s[0], 1);
    }

    #[test]
    fn theorem2_counts() {
        assert_eq!(theorem2_coloring(3, 5).unwrap().k(), 8);
        assert_eq!(theorem2_coloring(5, 7).unwrap().k(), 18);
        assert_eq!(theorem2_coloring(3, 7).unwrap().k(), 11);
        let c = theorem2_coloring(3, 5).unwrap();
        assert!(c.labels().contains(&"E_5 (=E_6)"));
        assert!(!c.labels().iter().any(|l| l.starts_with('M') || l.starts_with('D')));
    }

    #[test]
    fn theorem2_rejections() {
        assert!(theorem2_coloring(5, 3).is_err());
        assert!(theorem2_coloring(5, 5).is_err());
        assert!(theorem2_coloring(3, 9).is_err());
        assert!(theorem2_coloring(2, 5).is_err());
    }

    #[test]
    fn theorem2_non_common_neighborhoods() {
        for (p, q) in [(3u64, 5u64), (3, 7), (5, 7), (7, 11)] {
            let r = ring(&format!("prod:{p},{q}"));
            let g = build_graph(&r).unwrap();
            let c = theorem2_coloring(p, q).unwrap();
            let at = |x: u64, y: u64| (x * q + y) as usize;
            let nc = |label: &str| {
                let class = c.classes.iter().find(|cl| cl.label.starts_with(label)).unwrap();
                non_common_neighbors(g.graph(), &class.vertices)
            };
            assert_eq!(nc("E_2"), BTreeSet::from([at(p - 1, (q - 1) / 2)]));
            assert_eq!(nc("E_3"), BTreeSet::from([at(1, q - 1)]));
            assert_eq!(nc("E_4"), BTreeSet::from([at(p - 1, 1)]));
        }
    }

    #[test]
    fn theorem2_transports_to_zn() {
        let c = theorem2_coloring(3, 5).unwrap();
        let zn = ring("zn:15");
        let moved = c.transport(&ring("prod:3,5"), &zn).unwrap();
        assert_eq!(moved.graph, "zn:15");
        let g = build_graph(&zn).unwrap();
        assert!(is_proper(g.graph(), &moved).unwrap().ok);
        assert!(is_complete(g.graph(), &moved).unwrap().ok);
        assert!(c.transport(&ring("prod:3,5"), &ring("zn:21")).is_err());
    }

    #[test]
    fn bipartition_examples() {
        let c = bipartition_coloring(4).unwrap();
        assert_eq!(c.classes[0].vertices, vec![0, 2]);
        assert_eq!(c.classes[1].vertices, vec![1, 3]);
        for n in [6u64, 10] {
            let c = bipartition_coloring(n).unwrap();
            let g = build_graph(&RingSpec::zn_even(n).unwrap()).unwrap();
            assert!(is_proper(g.graph(), &c).unwrap().ok);
            assert!(is_complete(g.graph(), &c).unwrap().ok);
        }
        assert!(bipartition_coloring(9).is_err());
    }

    #[test]
    fn json_roundtrip_and_determinism() {
        let c = theorem2_coloring(5, 7).unwrap();
        assert_eq!(Coloring::from_json(&c.to_json()).unwrap(), c);
        assert_eq!(theorem2_coloring(5, 7).unwrap(), c);
        assert_eq!(theorem1_coloring(&ring("zn:63")).unwrap(), theorem1_coloring(&ring("zn:63")).unwrap());
    }
}
