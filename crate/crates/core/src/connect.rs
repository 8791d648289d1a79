//! Cascades and the connecting procedure: given two disjoint relevant pairs,
//! produce a 10-vertex tight path joining them while avoiding a forbidden
//! vertex set.
//!
//! A cascade around {x, y} is a layered coneighbourhood structure
//! (N1, N2, N3, G1, G2, G3) built inside the beta-filtered graph; a link is
//! a quadruple (z, u, v, w) joining two cascades. A link extends to a
//! 10-path by picking one more connector vertex on each side; the search
//! below re-checks connector availability explicitly, so the degree
//! thresholds can be run far below their asymptotic values.

use crate::bits::VertexSet;
use crate::error::{Error, Result};
use crate::graph::Graph2;
use crate::hypergraph::{Hypergraph3, TightPath};
use serde::Serialize;

#[derive(Clone, Copy, Debug)]
pub struct CascadeParams {
    /// Minimum degree into N1 required to keep a vertex of N2.
    pub omega: usize,
    /// Minimum B_w-degree required for a G3 edge.
    pub t_deg: usize,
    /// Upper bound on (z, w) probes per connect call; bounds worst-case work
    /// on instances where no connection exists.
    pub probe_budget: u64,
}

impl CascadeParams {
    /// Slow-growing omega and the reference t_deg = 20.
    pub fn for_order(n: usize) -> Self {
        let omega = (usize::BITS - n.max(2).leading_zeros()) as usize;
        Self { omega: omega.max(1), t_deg: 20, probe_budget: 1_000_000 }
    }

    /// Thresholds of 1; correctness is carried by the explicit re-checks.
    pub fn minimal() -> Self {
        Self { omega: 1, t_deg: 1, probe_budget: 1_000_000 }
    }
}

#[derive(Clone, Debug)]
pub struct Cascade {
    pub x: u32,
    pub y: u32,
    pub n1: VertexSet,
    pub n2: VertexSet,
    pub n3: VertexSet,
    pub g1: Graph2,
    pub g2: Graph2,
    pub g3: Graph2,
    /// For w in N2, the vertices u with deg_{B_w}(u) >= t_deg.
    g3_from_n2: Vec<VertexSet>,
    pub omega: usize,
    pub t_deg: usize,
    /// Vertex count of the host graph at build time.
    pub n_eff: usize,
}

/// Builds the {x, y}-cascade inside `hb` (an already beta-filtered graph).
/// Fails if the pair is not covered by an edge of `hb`.
pub fn build_cascade(hb: &Hypergraph3, x: u32, y: u32, params: &CascadeParams) -> Result<Cascade> {
    if x == y || !hb.is_active(x) || !hb.is_active(y) {
        return Err(Error::Precondition(format!("bad cascade anchors ({x}, {y})")));
    }
    let n1 = hb.coneighbors(x, y).clone();
    if n1.is_empty() {
        return Err(Error::Precondition(format!("pair ({x}, {y}) is not covered")));
    }
    let n = hb.n_ids();
    let mut g1 = Graph2::new(n);
    for z in n1.iter() {
        g1.add_edge(y, z);
    }

    let mut n2p = VertexSet::new();
    for z in n1.iter() {
        n2p.union_with(hb.coneighbors(y, z));
    }
    // degree of w in the unpruned G2': all coneighbours of {y, w} when w is
    // itself in N1, otherwise only those inside N1
    let g2p_degree = |w: u32| -> usize {
        if n1.contains(w) {
            hb.codegree(y, w)
        } else {
            hb.coneighbors(y, w).intersection_len(&n1)
        }
    };
    let n2: VertexSet = n2p.iter().filter(|&w| g2p_degree(w) >= params.omega).collect();

    let keep = {
        let mut s = n1.clone();
        s.union_with(&n2);
        s
    };
    let mut g2 = Graph2::new(n);
    for z in n1.iter() {
        for zp in hb.coneighbors(y, z).intersection(&keep).iter() {
            g2.add_edge(z, zp);
        }
    }

    let mut n3 = VertexSet::new();
    let mut g3 = Graph2::new(n);
    let mut g3_from_n2 = vec![VertexSet::new(); n];
    let mut counts = vec![0u32; n];
    for w in n2.iter() {
        let zs = g2.neighbors(w).intersection(&n1);
        let mut touched = Vec::new();
        for z in zs.iter() {
            for u in hb.coneighbors(z, w).iter() {
                if counts[u as usize] == 0 {
                    touched.push(u);
                }
                counts[u as usize] += 1;
            }
        }
        let mut us = VertexSet::new();
        for &u in &touched {
            if counts[u as usize] as usize >= params.t_deg {
                us.insert(u);
                g3.add_edge(u, w);
            }
            counts[u as usize] = 0;
        }
        n3.union_with(&us);
        g3_from_n2[w as usize] = us;
    }

    Ok(Cascade {
        x,
        y,
        n1,
        n2,
        n3,
        g1,
        g2,
        g3,
        g3_from_n2,
        omega: params.omega,
        t_deg: params.t_deg,
        n_eff: hb.vertex_count(),
    })
}

impl Cascade {
    /// Re-derives every layer from `hb` and checks the construction
    /// invariants hold for the stored sets and graphs.
    pub fn validate(&self, hb: &Hypergraph3) -> bool {
        if &self.n1 != hb.coneighbors(self.x, self.y) {
            return false;
        }
        for (a, b) in self.g2.edges() {
            let role_ok = self.n1.contains(a) || self.n1.contains(b);
            if !role_ok || !hb.has_edge(self.y, a, b) {
                return false;
            }
        }
        for w in self.n2.iter() {
            let deg = if self.n1.contains(w) {
                hb.codegree(self.y, w)
            } else {
                hb.coneighbors(self.y, w).intersection_len(&self.n1)
            };
            if deg < self.omega {
                return false;
            }
        }
        let mut n3_check = VertexSet::new();
        for w in self.n2.iter() {
            let zs = self.g2.neighbors(w).intersection(&self.n1);
            for u in self.g3_from_n2[w as usize].iter() {
                let bd: usize =
                    zs.iter().filter(|&z| hb.coneighbors(z, w).contains(u)).count();
                if bd < self.t_deg {
                    return false;
                }
                n3_check.insert(u);
            }
        }
        n3_check == self.n3
    }
}

/// Bound booleans for a cascade built under codegree floor beta * n.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CascadeBounds {
    pub n1_size: usize,
    pub n2_size: usize,
    pub n3_size: usize,
    pub g2_edges: usize,
    pub g3_edges: usize,
    pub n1_ok: bool,
    pub n2_ok: bool,
    pub g2_ok: bool,
    pub g3_deg_ok: bool,
    pub g3_ok: bool,
}

pub fn cascade_bounds(c: &Cascade, beta: f64) -> CascadeBounds {
    let n = c.n_eff as f64;
    let g3_deg_ok = c.n2.iter().all(|w| c.g3.degree(w) as f64 >= beta * n / 2.0);
    CascadeBounds {
        n1_size: c.n1.len(),
        n2_size: c.n2.len(),
        n3_size: c.n3.len(),
        g2_edges: c.g2.edge_count(),
        g3_edges: c.g3.edge_count(),
        n1_ok: c.n1.len() as f64 >= beta * n,
        n2_ok: c.n2.len() as f64 >= beta * beta * n / 4.0,
        g2_ok: c.g2.edge_count() as f64 >= beta * beta * n * n / 4.0,
        g3_deg_ok,
        g3_ok: c.n3.len() as f64 >= beta * n / 2.0
            && c.g3.edge_count() as f64 >= beta * beta * n * n / 8.0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Link {
    pub z: u32,
    pub u: u32,
    pub v: u32,
    pub w: u32,
}

/// Min-degree peeling: the survivors have degree above the original edges
/// per vertex ratio. Returns the support unchanged when there are no edges.
fn peel_dense_subgraph(g: &Graph2) -> VertexSet {
    let support = g.support();
    let e0 = g.edge_count();
    let v0 = support.len();
    if e0 == 0 || v0 == 0 {
        return support;
    }
    let mut alive = support;
    let mut deg: Vec<usize> = (0..g.n() as u32).map(|v| g.degree(v)).collect();
    loop {
        let mut min_v = None;
        for v in alive.iter() {
            if min_v.map_or(true, |m: u32| deg[v as usize] < deg[m as usize]) {
                min_v = Some(v);
            }
        }
        let Some(v) = min_v else { break };
        if deg[v as usize] * v0 > e0 {
            break;
        }
        alive.remove(v);
        for u in g.neighbors(v).intersection(&alive).iter() {
            deg[u as usize] -= 1;
        }
        if alive.is_empty() {
            break;
        }
    }
    alive
}

struct LinkSearch<'a> {
    h: &'a Hypergraph3,
    c1: &'a Cascade,
    c2: &'a Cascade,
    blocked: VertexSet,
    f1: VertexSet,
    f2: VertexSet,
}

impl<'a> LinkSearch<'a> {
    fn new(h: &'a Hypergraph3, c1: &'a Cascade, c2: &'a Cascade, forbidden: &VertexSet) -> Self {
        let mut blocked = forbidden.clone();
        for a in [c1.x, c1.y, c2.x, c2.y] {
            blocked.insert(a);
        }
        let mut f1 = peel_dense_subgraph(&c1.g3);
        if f1.is_empty() {
            f1 = c1.g3.support();
        }
        let mut f2 = peel_dense_subgraph(&c2.g3);
        if f2.is_empty() {
            f2 = c2.g3.support();
        }
        Self { h, c1, c2, blocked, f1, f2 }
    }

    fn u_candidates(&self) -> VertexSet {
        let mut s = self.f1.intersection(&self.c1.n3);
        s.remove_all(&self.blocked);
        s
    }

    fn v_candidates(&self) -> VertexSet {
        let mut s = self.f2.intersection(&self.c2.n3);
        s.remove_all(&self.blocked);
        s
    }

    /// z candidates for a fixed (u, v): G3-partners of u inside N2 that
    /// complete {z, u, v} into an edge of H.
    fn z_candidates(&self, u: u32, v: u32) -> VertexSet {
        let mut s = self.c1.g3.neighbors(u).intersection(&self.f1);
        s.intersect_with(&self.c1.n2);
        s.intersect_with(self.h.coneighbors(u, v));
        s.remove_all(&self.blocked);
        s
    }

    fn w_candidates(&self, u: u32, v: u32) -> VertexSet {
        let mut s = self.c2.g3.neighbors(v).intersection(&self.f2);
        s.intersect_with(&self.c2.n2);
        s.intersect_with(self.h.coneighbors(u, v));
        s.remove_all(&self.blocked);
        s
    }
}

/// First link between the two cascades avoiding `forbidden`, by ascending
/// (u, v, z, w) scan over the peeled dense subgraphs of both G3 layers.
pub fn find_link(
    h: &Hypergraph3,
    c1: &Cascade,
    c2: &Cascade,
    forbidden: &VertexSet,
) -> Option<Link> {
    let s = LinkSearch::new(h, c1, c2, forbidden);
    for u in s.u_candidates().iter() {
        for v in s.v_candidates().iter() {
            if u == v {
                continue;
            }
            let zs = s.z_candidates(u, v);
            if zs.is_empty() {
                continue;
            }
            let mut ws = s.w_candidates(u, v);
            ws.remove(u);
            for z in zs.iter() {
                let mut wsz = ws.clone();
                wsz.remove(z);
                if let Some(w) = wsz.first() {
                    return Some(Link { z, u, v, w });
                }
            }
        }
    }
    None
}

/// Independent re-check of the link conditions against `h` and the cascades.
pub fn link_satisfies(h: &Hypergraph3, c1: &Cascade, c2: &Cascade, link: &Link) -> bool {
    let Link { z, u, v, w } = *link;
    let mut all = vec![c1.x, c1.y, z, u, v, w, c2.y, c2.x];
    all.sort_unstable();
    all.dedup();
    if all.len() != 8 {
        return false;
    }
    c1.n2.contains(z)
        && c1.n3.contains(u)
        && c2.n3.contains(v)
        && c2.n2.contains(w)
        && h.has_edge(z, u, v)
        && h.has_edge(u, v, w)
        && c1.g3.has_edge(z, u)
        && c2.g3.has_edge(v, w)
}

/// Connects the ordered pair `from` to the ordered pair `to` by a 10-vertex
/// tight path in `h` avoiding `forbidden`: the result starts with exactly
/// (from.0, from.1) and ends with exactly (to.0, to.1), and its 8 interior
/// triples are edges of `h` with all internal vertices outside `forbidden`.
///
/// Cascades are built in the beta-filtered restriction of `h` to the
/// available vertices; returns None when the pairs are not both relevant
/// there or no link extends to a full path within the probe budget.
pub fn connect(
    h: &Hypergraph3,
    beta: f64,
    from: (u32, u32),
    to: (u32, u32),
    forbidden: &VertexSet,
    params: &CascadeParams,
) -> Result<Option<TightPath>> {
    let anchors = [from.0, from.1, to.0, to.1];
    let mut uniq = anchors.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    if uniq.len() != 4 {
        return Err(Error::Precondition("end pairs must be disjoint".into()));
    }
    for &a in &anchors {
        if !h.is_active(a) {
            return Err(Error::Precondition(format!("anchor {a} not in the graph")));
        }
        if forbidden.contains(a) {
            return Err(Error::Precondition(format!("anchor {a} is forbidden")));
        }
    }
    let avail = h.active().difference(forbidden);
    let h_avail = h.induced(&avail);
    let hb = h_avail.filter_beta(beta).graph;

    let c1 = match build_cascade(&hb, from.0, from.1, params) {
        Ok(c) => c,
        Err(Error::Precondition(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let c2 = match build_cascade(&hb, to.1, to.0, params) {
        Ok(c) => c,
        Err(Error::Precondition(_)) => return Ok(None),
        Err(e) => return Err(e),
    };

    let s = LinkSearch::new(&h_avail, &c1, &c2, &VertexSet::new());
    let mut budget = params.probe_budget;
    for u in s.u_candidates().iter() {
        for v in s.v_candidates().iter() {
            if u == v {
                continue;
            }
            let zs = s.z_candidates(u, v);
            if zs.is_empty() {
                continue;
            }
            let ws = s.w_candidates(u, v);
            if ws.is_empty() {
                continue;
            }
            for z in zs.iter() {
                for w in ws.iter() {
                    if w == z || w == u {
                        continue;
                    }
                    if budget == 0 {
                        return Ok(None);
                    }
                    budget -= 1;
                    let link = Link { z, u, v, w };
                    if let Some(path) = extend_link(&h_avail, &c1, &c2, &link) {
                        return Ok(Some(path));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Chooses the two connector vertices completing a link into a 10-path:
/// z' on the `from` side, z'' on the `to` side, each certified by the
/// cascade layers and re-checked against the host graph.
fn extend_link(
    h_avail: &Hypergraph3,
    c1: &Cascade,
    c2: &Cascade,
    link: &Link,
) -> Option<TightPath> {
    let Link { z, u, v, w } = *link;
    let mut named: VertexSet = [c1.x, c1.y, c2.x, c2.y, z, u, v, w].into_iter().collect();
    let mut zp_cands = c1.g2.neighbors(z).intersection(&c1.n1);
    zp_cands.intersect_with(h_avail.coneighbors(z, u));
    zp_cands.remove_all(&named);
    let mut zpp_cands = c2.g2.neighbors(w).intersection(&c2.n1);
    zpp_cands.intersect_with(h_avail.coneighbors(w, v));
    zpp_cands.remove_all(&named);
    for zp in zp_cands.iter() {
        named.insert(zp);
        let mut cs = zpp_cands.clone();
        cs.remove(zp);
        if let Some(zpp) = cs.first() {
            let path = vec![c1.x, c1.y, zp, z, u, v, w, zpp, c2.y, c2.x];
            return Some(TightPath(path));
        }
        named.remove(zp);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::SeqMode;

    #[test]
    fn cascade_on_complete_graph() {
        let k20 = Hypergraph3::complete(20);
        let hb = k20.filter_beta(0.5).graph;
        let params = CascadeParams { omega: 1, t_deg: 1, probe_budget: 1_000_000 };
        let c = build_cascade(&hb, 0, 1, &params).unwrap();
        let rest: VertexSet = (2..20u32).collect();
        assert_eq!(c.n1, rest);
        assert!(rest.is_subset(&c.n2));
        assert!(rest.is_subset(&c.n3));
        assert!(c.validate(&hb));
        let b = cascade_bounds(&c, 0.5);
        assert!(b.n1_ok && b.n2_ok && b.g2_ok && b.g3_deg_ok && b.g3_ok);
    }

    #[test]
    fn cascade_degenerate_single_edge() {
        let h = Hypergraph3::build_from_triples(6, vec![[0, 1, 2]]).unwrap();
        let hb = h.filter_beta(0.01).graph;
        let params = CascadeParams { omega: 2, t_deg: 1, probe_budget: 1_000 };
        let c = build_cascade(&hb, 0, 1, &params).unwrap();
        assert_eq!(c.n1.to_vec(), vec![2]);
        assert!(c.n2.is_empty());
        let b = cascade_bounds(&c, 0.5);
        assert!(!b.n1_ok && !b.n2_ok);
        // uncovered pair
        assert!(build_cascade(&hb, 3, 4, &params).is_err());
    }

    #[test]
    fn cascade_monotone_in_thresholds() {
        let h = crate::gen::gen_random(30, 0.5, 2);
        let hb = h.filter_beta(0.2).graph;
        let loose = build_cascade(&hb, 0, 1, &CascadeParams::minimal()).unwrap();
        let tight = build_cascade(
            &hb,
            0,
            1,
            &CascadeParams { omega: 5, t_deg: 6, probe_budget: 1_000_000 },
        )
        .unwrap();
        assert!(tight.n2.is_subset(&loose.n2));
        assert!(tight.n3.is_subset(&loose.n3));
    }

    #[test]
    fn find_link_on_complete_graph() {
        let k12 = Hypergraph3::complete(12);
        let hb = k12.filter_beta(0.5).graph;
        let params = CascadeParams::minimal();
        let c1 = build_cascade(&hb, 0, 1, &params).unwrap();
        let c2 = build_cascade(&hb, 3, 2, &params).unwrap();
        let link = find_link(&k12, &c1, &c2, &VertexSet::new()).unwrap();
        assert!(link_satisfies(&k12, &c1, &c2, &link));
    }

    #[test]
    fn find_link_absent_cases() {
        let h = Hypergraph3::build_from_triples(8, vec![[0, 1, 2], [2, 3, 4]]).unwrap();
        let hb = h.filter_beta(0.01).graph;
        let params = CascadeParams::minimal();
        let c1 = build_cascade(&hb, 0, 1, &params).unwrap();
        let c2 = build_cascade(&hb, 4, 3, &params).unwrap();
        if !c1.g3.edge_count() == 0 {
            unreachable!();
        }
        assert!(find_link(&h, &c1, &c2, &VertexSet::new()).is_none());
    }

    #[test]
    fn connect_on_complete_graph() {
        let k20 = Hypergraph3::complete(20);
        let p = connect(
            &k20,
            0.5,
            (0, 1),
            (2, 3),
            &VertexSet::new(),
            &CascadeParams::minimal(),
        )
        .unwrap()
        .expect("complete graph always connects");
        assert_eq!(p.len(), 10);
        assert_eq!(&p.0[..2], &[0, 1]);
        assert_eq!(&p.0[8..], &[2, 3]);
        assert!(k20.validate_tight(p.vertices(), SeqMode::Path, false).ok);
    }

    #[test]
    fn connect_rejects_overlapping_pairs() {
        let k20 = Hypergraph3::complete(20);
        let r = connect(&k20, 0.5, (0, 1), (1, 3), &VertexSet::new(), &CascadeParams::minimal());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn connect_absent_when_no_room() {
        let k20 = Hypergraph3::complete(20);
        // forbid everything except the anchors and 3 extra vertices
        let allowed: VertexSet = [0u32, 1, 2, 3, 4, 5, 6].into_iter().collect();
        let forbidden = VertexSet::full(20).difference(&allowed);
        let r = connect(&k20, 0.5, (0, 1), (2, 3), &forbidden, &CascadeParams::minimal()).unwrap();
        assert!(r.is_none());
    }

    #[test]
    fn connect_avoids_forbidden_internals() {
        let k20 = Hypergraph3::complete(20);
        let forbidden: VertexSet = (10..20u32).collect();
        let p = connect(&k20, 0.4, (0, 1), (2, 3), &forbidden, &CascadeParams::minimal())
            .unwrap()
            .unwrap();
        for &v in &p.0[2..8] {
            assert!(!forbidden.contains(v));
        }
        assert!(k20.validate_tight(p.vertices(), SeqMode::Path, false).ok);
    }
}
