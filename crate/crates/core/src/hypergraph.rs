//! 3-uniform hypergraph storage and elementary queries: degrees, codegrees,
//! the beta-filtered subgraph, and exact tight path/cycle validation.
//!
//! Vertices are dense integer ids `0..n`. A hypergraph additionally carries
//! an `active` set so that vertex deletions (`induced`) keep the id space
//! stable; paths and cycles always speak in original ids.

use crate::bits::VertexSet;
use crate::error::{Error, Result};
use crate::graph::Graph2;

pub type Triple = [u32; 3];

#[inline]
pub fn canonical(mut t: Triple) -> Triple {
    t.sort_unstable();
    t
}

/// Rank of the unordered pair {u, v} (u != v) in 0..n(n-1)/2.
#[inline]
pub fn pair_rank(u: u32, v: u32) -> usize {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    (b as usize * (b as usize - 1)) / 2 + a as usize
}

#[derive(Clone)]
pub struct Hypergraph3 {
    n: usize,
    active: VertexSet,
    edges: Vec<Triple>,
    /// Indexed by `pair_rank`; `pairs[r]` is N(u,v), the completions of the pair.
    pairs: Vec<VertexSet>,
    degrees: Vec<u32>,
}

impl Hypergraph3 {
    /// Builds a hypergraph from (possibly duplicated) triples. Triples are
    /// deduplicated as unordered sets; vertices must be distinct and in range.
    pub fn build_from_triples<I>(n: usize, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = Triple>,
    {
        let mut edges: Vec<Triple> = Vec::new();
        for t in triples {
            for &v in &t {
                if v as usize >= n {
                    return Err(Error::VertexOutOfRange { v, n });
                }
            }
            let c = canonical(t);
            if c[0] == c[1] || c[1] == c[2] {
                return Err(Error::RepeatedVertex(t));
            }
            edges.push(c);
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Self::from_canonical_edges(n, VertexSet::full(n), edges))
    }

    /// `edges` must be sorted, deduplicated, canonical and within `active`.
    pub(crate) fn from_canonical_edges(n: usize, active: VertexSet, edges: Vec<Triple>) -> Self {
        let mut pairs = vec![VertexSet::new(); n * n.saturating_sub(1) / 2];
        let mut degrees = vec![0u32; n];
        for &[a, b, c] in &edges {
            pairs[pair_rank(a, b)].insert(c);
            pairs[pair_rank(a, c)].insert(b);
            pairs[pair_rank(b, c)].insert(a);
            degrees[a as usize] += 1;
            degrees[b as usize] += 1;
            degrees[c as usize] += 1;
        }
        Self { n, active, edges, pairs, degrees }
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for c in 2..n as u32 {
            for b in 1..c {
                for a in 0..b {
                    edges.push([a, b, c]);
                }
            }
        }
        edges.sort_unstable();
        Self::from_canonical_edges(n, VertexSet::full(n), edges)
    }

    pub fn empty(n: usize) -> Self {
        Self::from_canonical_edges(n, VertexSet::full(n), Vec::new())
    }

    /// Size of the id space (vertices are 0..n_ids, not all necessarily active).
    pub fn n_ids(&self) -> usize {
        self.n
    }

    /// Number of active vertices; the `n` of every statement about this graph.
    pub fn vertex_count(&self) -> usize {
        self.active.len()
    }

    pub fn active(&self) -> &VertexSet {
        &self.active
    }

    pub fn is_active(&self, v: u32) -> bool {
        self.active.contains(v)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical sorted edge list, lexicographically ordered.
    pub fn edges(&self) -> &[Triple] {
        &self.edges
    }

    pub fn has_edge(&self, a: u32, b: u32, c: u32) -> bool {
        if a == b || b == c || a == c {
            return false;
        }
        self.pairs[pair_rank(a, b)].contains(c)
    }

    /// N(u, v): vertices completing the pair {u, v} into an edge.
    pub fn coneighbors(&self, u: u32, v: u32) -> &VertexSet {
        &self.pairs[pair_rank(u, v)]
    }

    pub fn codegree(&self, u: u32, v: u32) -> usize {
        self.coneighbors(u, v).len()
    }

    pub fn degree(&self, v: u32) -> usize {
        self.degrees[v as usize] as usize
    }

    /// Induced subgraph on `keep` (intersected with the current active set).
    /// The id space is preserved; dropped vertices become isolated/inactive.
    pub fn induced(&self, keep: &VertexSet) -> Self {
        let active = self.active.intersection(keep);
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&[a, b, c]| active.contains(a) && active.contains(b) && active.contains(c))
            .collect();
        Self::from_canonical_edges(self.n, active, edges)
    }

    /// Deletes a vertex set (masked view materialised on the same id space).
    pub fn without(&self, removed: &VertexSet) -> Self {
        self.induced(&self.active.difference(removed))
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let verts = self.active.to_vec();
        let mut delta1 = usize::MAX;
        for &v in &verts {
            delta1 = delta1.min(self.degree(v));
        }
        if verts.is_empty() {
            delta1 = 0;
        }
        let mut delta2 = usize::MAX;
        let mut delta2_star: Option<usize> = None;
        let mut covered = Vec::new();
        for (i, &u) in verts.iter().enumerate() {
            for &v in &verts[i + 1..] {
                let d = self.codegree(u, v);
                delta2 = delta2.min(d);
                if d > 0 {
                    covered.push((u, v, d as u32));
                    delta2_star = Some(delta2_star.map_or(d, |m: usize| m.min(d)));
                }
            }
        }
        if delta2 == usize::MAX {
            delta2 = 0;
        }
        DegreeStats {
            delta1,
            delta2,
            delta2_star,
            vertex_degrees: self.degrees.clone(),
            covered_pair_degrees: covered,
        }
    }

    /// Removes every edge containing a pair of codegree < `threshold`
    /// (strict: a codegree equal to the threshold is not low).
    pub fn filter_beta_abs(&self, threshold: f64) -> BetaFiltered {
        let verts = self.active.to_vec();
        let mut low = Vec::new();
        for (i, &u) in verts.iter().enumerate() {
            for &v in &verts[i + 1..] {
                if (self.codegree(u, v) as f64) < threshold {
                    low.push((u, v));
                }
            }
        }
        let is_low = |u: u32, v: u32| (self.codegree(u, v) as f64) < threshold;
        let kept: Vec<Triple> = self
            .edges
            .iter()
            .copied()
            .filter(|&[a, b, c]| !is_low(a, b) && !is_low(a, c) && !is_low(b, c))
            .collect();
        let graph = Self::from_canonical_edges(self.n, self.active.clone(), kept);
        let mut relevant: Vec<(u32, u32)> = graph
            .edges
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (a, c), (b, c)])
            .collect();
        relevant.sort_unstable();
        relevant.dedup();
        BetaFiltered { graph, low_pairs: low, relevant }
    }

    /// `filter_beta(H, beta)`: threshold is `beta * |V(H)|`.
    pub fn filter_beta(&self, beta: f64) -> BetaFiltered {
        self.filter_beta_abs(beta * self.vertex_count() as f64)
    }

    /// The link graph of `v`: xy is an edge iff {x, y, v} is an edge of H
    /// (of H_beta when `filtered` is given).
    pub fn link_graph(&self, v: u32, filtered: Option<f64>) -> Graph2 {
        match filtered {
            None => self.link_graph_in(v),
            Some(beta) => self.filter_beta(beta).graph.link_graph_in(v),
        }
    }

    fn link_graph_in(&self, v: u32) -> Graph2 {
        let mut g = Graph2::new(self.n);
        for &[a, b, c] in &self.edges {
            if a == v {
                g.add_edge(b, c);
            } else if b == v {
                g.add_edge(a, c);
            } else if c == v {
                g.add_edge(a, b);
            }
        }
        g
    }

    /// Exact tight-path / tight-cycle validation. Checks vertex distinctness
    /// and every window of 3 consecutive vertices (cyclically for cycles);
    /// with `hamilton`, the sequence must also span the active vertex set.
    pub fn validate_tight(&self, seq: &[u32], mode: SeqMode, hamilton: bool) -> TightVerdict {
        if seq.len() < 3 {
            return TightVerdict::fail(0, ViolationKind::TooShort);
        }
        let mut seen = VertexSet::new();
        for (i, &v) in seq.iter().enumerate() {
            if v as usize >= self.n || !self.active.contains(v) {
                return TightVerdict::fail(i, ViolationKind::InactiveVertex);
            }
            if !seen.insert(v) {
                return TightVerdict::fail(i, ViolationKind::RepeatedVertex);
            }
        }
        let windows = match mode {
            SeqMode::Path => seq.len() - 2,
            SeqMode::Cycle => seq.len(),
        };
        for i in 0..windows {
            let a = seq[i];
            let b = seq[(i + 1) % seq.len()];
            let c = seq[(i + 2) % seq.len()];
            if !self.has_edge(a, b, c) {
                return TightVerdict::fail(i, ViolationKind::MissingEdge);
            }
        }
        if hamilton && seq.len() != self.vertex_count() {
            return TightVerdict::fail(seq.len(), ViolationKind::NotSpanning);
        }
        TightVerdict { ok: true, violation: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeqMode {
    Path,
    Cycle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    TooShort,
    RepeatedVertex,
    InactiveVertex,
    MissingEdge,
    NotSpanning,
}

#[derive(Clone, Copy, Debug)]
pub struct TightVerdict {
    pub ok: bool,
    pub violation: Option<(usize, ViolationKind)>,
}

impl TightVerdict {
    fn fail(index: usize, kind: ViolationKind) -> Self {
        Self { ok: false, violation: Some((index, kind)) }
    }
}

/// An ordered vertex sequence forming a tight path (validity is relative to a
/// hypergraph and is checked by `validate_tight`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TightPath(pub Vec<u32>);

impl TightPath {
    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// End-pair {v1, v2}.
    pub fn front_pair(&self) -> (u32, u32) {
        (self.0[0], self.0[1])
    }

    /// End-pair {v_{k-1}, v_k}.
    pub fn rear_pair(&self) -> (u32, u32) {
        (self.0[self.0.len() - 2], self.0[self.0.len() - 1])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TightCycle(pub Vec<u32>);

impl TightCycle {
    pub fn vertices(&self) -> &[u32] {
        &self.0
    }
}

/// Minimum degrees of a hypergraph. `delta2` runs over all active pairs;
/// `delta2_star` only over pairs covered by at least one edge and is absent
/// (never zero) when there are no edges.
#[derive(Clone, Debug)]
pub struct DegreeStats {
    pub delta1: usize,
    pub delta2: usize,
    pub delta2_star: Option<usize>,
    pub vertex_degrees: Vec<u32>,
    pub covered_pair_degrees: Vec<(u32, u32, u32)>,
}

/// Result of beta-filtering: the subgraph H_beta, the low-codegree pairs
/// B_beta, and the beta-relevant pairs (those covered by an edge of H_beta).
pub struct BetaFiltered {
    pub graph: Hypergraph3,
    pub low_pairs: Vec<(u32, u32)>,
    pub relevant: Vec<(u32, u32)>,
}

impl BetaFiltered {
    pub fn is_relevant(&self, u: u32, v: u32) -> bool {
        !self.graph.coneighbors(u, v).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted_cycle(n: usize) -> Hypergraph3 {
        let triples: Vec<Triple> = (0..n as u32)
            .map(|i| [i, (i + 1) % n as u32, (i + 2) % n as u32])
            .collect();
        Hypergraph3::build_from_triples(n, triples).unwrap()
    }

    #[test]
    fn build_k4_and_dedup() {
        let h =
            Hypergraph3::build_from_triples(4, vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
                .unwrap();
        assert_eq!(h.edge_count(), 4);
        let h2 = Hypergraph3::build_from_triples(4, vec![[0, 1, 2], [0, 1, 2], [0, 2, 1]]).unwrap();
        assert_eq!(h2.edge_count(), 1);
        let empty = Hypergraph3::build_from_triples(5, vec![]).unwrap();
        assert_eq!(empty.edge_count(), 0);
        assert_eq!(empty.degree_stats().delta1, 0);
    }

    #[test]
    fn build_errors() {
        assert!(matches!(
            Hypergraph3::build_from_triples(4, vec![[0, 1, 4]]),
            Err(Error::VertexOutOfRange { v: 4, n: 4 })
        ));
        assert!(matches!(
            Hypergraph3::build_from_triples(4, vec![[0, 1, 1]]),
            Err(Error::RepeatedVertex(_))
        ));
    }

    #[test]
    fn pair_index_consistency() {
        let h = Hypergraph3::complete(6);
        let mut sum = 0usize;
        for u in 0..6u32 {
            for v in u + 1..6 {
                let cn = h.coneighbors(u, v);
                for w in cn.iter() {
                    assert!(h.has_edge(u, v, w));
                }
                sum += cn.len();
            }
        }
        assert_eq!(sum, 3 * h.edge_count());
    }

    #[test]
    fn degree_stats_examples() {
        let k5 = Hypergraph3::complete(5);
        let s = k5.degree_stats();
        assert_eq!(s.delta1, 6);
        assert_eq!(s.delta2, 3);
        assert_eq!(s.delta2_star, Some(3));

        let empty = Hypergraph3::empty(5);
        let s = empty.degree_stats();
        assert_eq!((s.delta1, s.delta2, s.delta2_star), (0, 0, None));

        let pc = planted_cycle(7);
        for v in 0..7u32 {
            assert_eq!(pc.degree(v), 3);
        }
    }

    #[test]
    fn filter_beta_examples() {
        let k5 = Hypergraph3::complete(5);
        let f = k5.filter_beta(0.5);
        assert_eq!(f.graph.edge_count(), k5.edge_count());
        assert!(f.low_pairs.is_empty());

        let f = k5.filter_beta(0.9);
        assert_eq!(f.graph.edge_count(), 0);
        assert!(f.relevant.is_empty());

        let h = Hypergraph3::build_from_triples(10, vec![[0, 1, 2]]).unwrap();
        let f = h.filter_beta(0.05);
        assert_eq!(f.graph.edge_count(), 1);
        assert_eq!(f.relevant, vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn filter_beta_monotone() {
        let h = crate::gen::gen_random(16, 0.4, 11);
        let f1 = h.filter_beta(0.1);
        let f2 = h.filter_beta(0.25);
        for e in f2.graph.edges() {
            assert!(f1.graph.edges().binary_search(e).is_ok());
        }
        for e in f1.graph.edges() {
            assert!(h.edges().binary_search(e).is_ok());
        }
    }

    #[test]
    fn link_graph_examples() {
        let k4 = Hypergraph3::complete(4);
        let l0 = k4.link_graph(0, None);
        assert_eq!(l0.edge_count(), 3);
        assert!(l0.has_edge(1, 2) && l0.has_edge(1, 3) && l0.has_edge(2, 3));

        let empty = Hypergraph3::empty(5);
        assert_eq!(empty.link_graph(2, None).edge_count(), 0);

        let pc = planted_cycle(6);
        let l0 = pc.link_graph(0, None);
        assert_eq!(l0.edge_count(), 3);
        assert!(l0.has_edge(5, 1) && l0.has_edge(1, 2) && l0.has_edge(4, 5));
    }

    #[test]
    fn validate_tight_examples() {
        let k4 = Hypergraph3::complete(4);
        assert!(k4.validate_tight(&[0, 1, 2, 3], SeqMode::Cycle, true).ok);

        let h3 = Hypergraph3::build_from_triples(
            4,
            vec![[0, 1, 2], [0, 1, 3], [0, 2, 3]], // K4 minus {1,2,3}
        )
        .unwrap();
        let v = h3.validate_tight(&[0, 1, 2, 3], SeqMode::Cycle, true);
        assert!(!v.ok);
        assert_eq!(v.violation, Some((1, ViolationKind::MissingEdge)));

        let pc = planted_cycle(9);
        let order: Vec<u32> = (0..9).collect();
        assert!(pc.validate_tight(&order, SeqMode::Cycle, true).ok);
        assert!(pc.validate_tight(&order[..5], SeqMode::Path, false).ok);
        assert!(!pc.validate_tight(&[0, 1], SeqMode::Path, false).ok);
        assert!(!pc.validate_tight(&[0, 1, 1], SeqMode::Path, false).ok);
    }

    #[test]
    fn induced_preserves_ids() {
        let k6 = Hypergraph3::complete(6);
        let keep: VertexSet = [0u32, 2, 3, 5].into_iter().collect();
        let h = k6.induced(&keep);
        assert_eq!(h.vertex_count(), 4);
        assert_eq!(h.edge_count(), 4);
        assert!(h.has_edge(0, 2, 5));
        assert!(!h.has_edge(0, 1, 2));
        assert!(h.validate_tight(&[0, 2, 3, 5], SeqMode::Cycle, true).ok);
    }

    #[test]
    fn delta2_star_of_beta_filter_on_dense_random() {
        // On dense random instances the filtered graph keeps the codegree floor.
        for seed in 0..5 {
            let h = crate::gen::gen_random(14, 0.6, seed);
            let beta = 0.2;
            let f = h.filter_beta(beta);
            if f.graph.edge_count() > 0 {
                let s = f.graph.degree_stats();
                assert!(s.delta2_star.unwrap() as f64 >= beta * h.vertex_count() as f64);
            }
        }
    }
}
