//! Absorbers: recognition, exact counting, randomized vertex-disjoint family
//! selection, stringing a family into one absorbing path, and greedy
//! absorption of leftover vertices into it.
//!
//! A quadruple (x, y, z, w) absorbs v when {x,y,z}, {y,z,w} survive the
//! beta filter and the three edges {v,x,y}, {v,y,z}, {v,z,w} are present:
//! the path segment x,y,z,w can then be rewritten to x,y,v,z,w without
//! moving its ends.

use crate::bits::VertexSet;
use crate::connect::{connect, CascadeParams};
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph3, TightPath};
use crate::rng::{self, substream};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Absorber {
    pub quad: [u32; 4],
    /// Vertices this quadruple absorbs.
    pub served: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct AbsorberFamily {
    pub members: Vec<Absorber>,
    /// For each vertex id, indices of members serving it.
    pub per_vertex: Vec<Vec<usize>>,
    pub used: Vec<bool>,
    /// min over active vertices of |per_vertex[v]| at construction time.
    pub min_coverage: usize,
}

impl AbsorberFamily {
    fn index(h: &Hypergraph3, members: Vec<Absorber>) -> Self {
        let mut per_vertex = vec![Vec::new(); h.n_ids()];
        for (i, m) in members.iter().enumerate() {
            for &v in &m.served {
                per_vertex[v as usize].push(i);
            }
        }
        let min_coverage =
            h.active().iter().map(|v| per_vertex[v as usize].len()).min().unwrap_or(0);
        let used = vec![false; members.len()];
        Self { members, per_vertex, used, min_coverage }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// All vertices captured by family members.
    pub fn vertex_set(&self) -> VertexSet {
        self.members.iter().flat_map(|m| m.quad).collect()
    }

    /// Keeps the first `r` members (sample order), reindexing.
    pub fn truncate(&mut self, h: &Hypergraph3, r: usize) {
        if self.members.len() > r {
            let members: Vec<Absorber> = self.members.drain(..r).collect();
            *self = Self::index(h, members);
        }
    }

    pub fn members_pairwise_disjoint(&self) -> bool {
        let mut seen = VertexSet::new();
        for m in &self.members {
            for &v in &m.quad {
                if !seen.insert(v) {
                    return false;
                }
            }
        }
        true
    }
}

fn quad_distinct(q: [u32; 4]) -> bool {
    let mut s = q;
    s.sort_unstable();
    s[0] != s[1] && s[1] != s[2] && s[2] != s[3]
}

/// Vertices absorbed by `quad`, or None when the quadruple is not a valid
/// frame (distinctness or the two filtered edges fail).
fn served_set(h: &Hypergraph3, hb: &Hypergraph3, quad: [u32; 4]) -> Option<VertexSet> {
    let [x, y, z, w] = quad;
    if !quad_distinct(quad) || !hb.has_edge(x, y, z) || !hb.has_edge(y, z, w) {
        return None;
    }
    let mut served = h.coneighbors(x, y).intersection(h.coneighbors(y, z));
    served.intersect_with(h.coneighbors(z, w));
    for v in quad {
        served.remove(v);
    }
    Some(served)
}

/// Checks distinctness and the absorber conditions for (quad, v).
pub fn absorber_check(h: &Hypergraph3, beta: f64, v: u32, quad: [u32; 4]) -> bool {
    let hb = h.filter_beta(beta).graph;
    absorber_check_in(h, &hb, v, quad)
}

pub fn absorber_check_in(h: &Hypergraph3, hb: &Hypergraph3, v: u32, quad: [u32; 4]) -> bool {
    served_set(h, hb, quad).map_or(false, |s| s.contains(v))
}

/// Exact count of ordered absorber quadruples for `v`, early-stopped at
/// `cap` when given (the result saturates there).
pub fn count_absorbers(h: &Hypergraph3, beta: f64, v: u32, cap: Option<u64>) -> u64 {
    let hb = h.filter_beta(beta).graph;
    count_absorbers_in(h, &hb, v, cap)
}

pub fn count_absorbers_in(h: &Hypergraph3, hb: &Hypergraph3, v: u32, cap: Option<u64>) -> u64 {
    let mut total = 0u64;
    let limit = cap.unwrap_or(u64::MAX);
    // only pairs {y, z} completing an edge with v can anchor an absorber,
    // and both filtered edges of the frame hang off that pair
    for y in h.active().iter() {
        if y == v {
            continue;
        }
        for z in h.coneighbors(v, y).iter() {
            // ordered (y, z): both orders visited by the outer loops
            let frame = hb.coneighbors(y, z);
            if frame.is_empty() {
                continue;
            }
            let xs = frame.intersection(h.coneighbors(v, y));
            let ws = frame.intersection(h.coneighbors(v, z));
            let xn = xs.len() as u64;
            let wn = ws.len() as u64;
            if xn == 0 || wn == 0 {
                continue;
            }
            let both = xs.intersection_len(&ws) as u64;
            total += xn * wn - both;
            if total >= limit {
                return limit;
            }
        }
    }
    total
}

/// Samples a vertex-disjoint absorber family. Family size is binomial with
/// mean `gamma_prob * n` (each quadruple of V^4 kept with probability
/// gamma_prob / n^3); quadruples serving no vertex are discarded, and of two
/// intersecting members the later one in sample order is dropped. Retries
/// with a fresh substream while the minimum per-vertex coverage is below
/// `min_coverage`.
pub fn sample_family(
    h: &Hypergraph3,
    beta: f64,
    gamma_prob: f64,
    seed: u64,
    max_retries: usize,
    min_coverage: usize,
) -> Result<AbsorberFamily> {
    let hb = h.filter_beta(beta).graph;
    sample_family_in(h, &hb, gamma_prob, seed, max_retries, min_coverage)
}

pub fn sample_family_in(
    h: &Hypergraph3,
    hb: &Hypergraph3,
    gamma_prob: f64,
    seed: u64,
    max_retries: usize,
    min_coverage: usize,
) -> Result<AbsorberFamily> {
    let verts = h.active().to_vec();
    let n = verts.len() as u64;
    if n < 5 {
        return Err(Error::Precondition("need at least 5 vertices".into()));
    }
    if !(gamma_prob >= 0.0) || gamma_prob * n as f64 > n as f64 {
        return Err(Error::Precondition(format!(
            "expected family size {} exceeds cap {n}",
            gamma_prob * n as f64
        )));
    }
    let total = n * n * n * n;
    let p = (gamma_prob / (n as f64 * n as f64 * n as f64)).clamp(0.0, 1.0);
    let mut last_cov = 0;
    for retry in 0..=max_retries {
        let mut rng = substream(seed, rng::DOMAIN_FAMILY, retry as u64);
        let k = Binomial::new(total, p).expect("valid binomial").sample(&mut rng);
        let mut picked = std::collections::HashSet::new();
        let mut members = Vec::new();
        let mut occupied = VertexSet::new();
        for _ in 0..k {
            let mut idx = rng.gen_range(0..total);
            while !picked.insert(idx) {
                idx = rng.gen_range(0..total);
            }
            let mut q = [0u32; 4];
            let mut rest = idx;
            for slot in (0..4).rev() {
                q[slot] = verts[(rest % n) as usize];
                rest /= n;
            }
            let Some(served) = served_set(h, hb, q) else { continue };
            if served.is_empty() {
                continue;
            }
            if q.iter().any(|&v| occupied.contains(v)) {
                continue; // keep the earlier member of an intersecting pair
            }
            occupied.extend(q);
            members.push(Absorber { quad: q, served: served.to_vec() });
        }
        let family = AbsorberFamily::index(h, members);
        last_cov = family.min_coverage;
        if family.min_coverage >= min_coverage {
            return Ok(family);
        }
    }
    Err(Error::RetriesExhausted(format!(
        "family coverage {last_cov} < {min_coverage} after {} draws",
        max_retries + 1
    )))
}

/// Builds a family directly from given quadruples (all must be valid
/// absorber frames serving at least one vertex, pairwise disjoint).
pub fn family_from_quads(
    h: &Hypergraph3,
    beta: f64,
    quads: &[[u32; 4]],
) -> Result<AbsorberFamily> {
    let hb = h.filter_beta(beta).graph;
    let mut members = Vec::new();
    for &q in quads {
        let served = served_set(h, &hb, q)
            .ok_or_else(|| Error::Precondition(format!("{q:?} is not an absorber frame")))?;
        members.push(Absorber { quad: q, served: served.to_vec() });
    }
    let family = AbsorberFamily::index(h, members);
    if !family.members_pairwise_disjoint() {
        return Err(Error::Precondition("family members overlap".into()));
    }
    Ok(family)
}

/// Strings the family members, in order, into one tight path: consecutive
/// members are joined by 10-vertex connecting paths found on the vertex set
/// that excludes everything already placed and all remaining family
/// vertices. Junction relevance runs at beta - kappa.
pub fn build_absorbing_path(
    h: &Hypergraph3,
    family: &AbsorberFamily,
    beta: f64,
    kappa: f64,
    params: &CascadeParams,
) -> Result<TightPath> {
    if family.is_empty() {
        return Err(Error::Precondition("empty absorber family".into()));
    }
    if !family.members_pairwise_disjoint() {
        return Err(Error::Precondition("family members overlap".into()));
    }
    let fam_vertices = family.vertex_set();
    let budget = kappa * h.vertex_count() as f64;
    if fam_vertices.len() as f64 > budget {
        return Err(Error::Precondition(format!(
            "family occupies {} vertices, over the {budget:.1} budget",
            fam_vertices.len()
        )));
    }
    let mut seq: Vec<u32> = family.members[0].quad.to_vec();
    for (i, m) in family.members.iter().enumerate().skip(1) {
        let (a, b) = (seq[seq.len() - 2], seq[seq.len() - 1]);
        let (c, d) = (m.quad[0], m.quad[1]);
        let mut forbidden: VertexSet = seq.iter().copied().collect();
        forbidden.union_with(&fam_vertices);
        for anchor in [a, b, c, d] {
            forbidden.remove(anchor);
        }
        let path = connect(h, beta - kappa, (a, b), (c, d), &forbidden, params)?;
        match path {
            Some(p) => {
                seq.extend_from_slice(&p.0[2..]);
                seq.push(m.quad[2]);
                seq.push(m.quad[3]);
            }
            None => {
                return Err(Error::Stage {
                    stage: "absorbing-path",
                    detail: format!("junction {i} failed"),
                })
            }
        }
    }
    Ok(TightPath(seq))
}

/// Inserts every vertex of `extra` (ascending) into the sequence through the
/// lowest-indexed unused member serving it; the member's segment x,y,z,w is
/// rewritten to x,y,v,z,w in place. Works for paths and cycle sequences
/// alike since the rewrite is local to the segment.
pub fn absorb_into(
    seq: &mut Vec<u32>,
    family: &mut AbsorberFamily,
    extra: &VertexSet,
) -> Result<()> {
    for v in extra.iter() {
        let idx = family.per_vertex[v as usize]
            .iter()
            .copied()
            .find(|&i| !family.used[i])
            .ok_or(Error::NoServer(v))?;
        let quad = family.members[idx].quad;
        let pos = seq
            .windows(4)
            .position(|w| w == quad)
            .ok_or_else(|| Error::Precondition(format!("member {quad:?} not on the path")))?;
        seq.insert(pos + 2, v);
        family.used[idx] = true;
    }
    Ok(())
}

/// Absorbs `extra` into the path, returning the rewritten path with the same
/// ends and vertex set V(A) + extra.
pub fn absorb(
    _h: &Hypergraph3,
    path: &TightPath,
    family: &mut AbsorberFamily,
    extra: &VertexSet,
) -> Result<TightPath> {
    let on_path: VertexSet = path.0.iter().copied().collect();
    if !on_path.is_disjoint(extra) {
        return Err(Error::Precondition("absorbed vertices must avoid the path".into()));
    }
    let mut seq = path.0.clone();
    absorb_into(&mut seq, family, extra)?;
    Ok(TightPath(seq))
}

/// Deterministic per-vertex substream helper shared by callers that need a
/// fresh gamma draw per pipeline attempt.
pub fn family_substream_seed(seed: u64, attempt: u64) -> u64 {
    rng::mix(seed ^ rng::mix(attempt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::SeqMode;

    #[test]
    fn check_examples() {
        let k6 = Hypergraph3::complete(6);
        assert!(absorber_check(&k6, 0.5, 0, [1, 2, 3, 4]));
        assert!(!absorber_check(&k6, 0.5, 0, [1, 2, 3, 1]));
        assert!(!absorber_check(&k6, 0.5, 3, [1, 2, 3, 4]));

        // drop {v, y, z} = {0, 2, 3}: (A.1) fails
        let edges: Vec<[u32; 3]> = Hypergraph3::complete(6)
            .edges()
            .iter()
            .copied()
            .filter(|&e| e != [0, 2, 3])
            .collect();
        let h = Hypergraph3::build_from_triples(6, edges).unwrap();
        assert!(!absorber_check(&h, 0.5, 0, [1, 2, 3, 4]));
    }

    #[test]
    fn count_examples() {
        let k6 = Hypergraph3::complete(6);
        assert_eq!(count_absorbers(&k6, 0.5, 0, None), 120);
        let empty = Hypergraph3::empty(6);
        assert_eq!(count_absorbers(&empty, 0.5, 0, None), 0);
        assert_eq!(count_absorbers(&k6, 0.5, 0, Some(50)), 50);
    }

    #[test]
    fn count_complete_closed_form() {
        for n in 6..=9usize {
            let h = Hypergraph3::complete(n);
            let m = (n - 1) as u64;
            assert_eq!(count_absorbers(&h, 0.5, 0, None), m * (m - 1) * (m - 2) * (m - 3));
        }
    }

    #[test]
    fn count_monotone_in_beta() {
        let h = crate::gen::gen_random(14, 0.6, 5);
        let lo = count_absorbers(&h, 0.1, 3, None);
        let hi = count_absorbers(&h, 0.4, 3, None);
        assert!(hi <= lo);
    }

    #[test]
    fn sample_family_validates() {
        let k30 = Hypergraph3::complete(30);
        let fam = sample_family(&k30, 0.5, 10.0 / 30.0, 1, 3, 0).unwrap();
        let hb = k30.filter_beta(0.5).graph;
        for m in &fam.members {
            for &v in &m.served {
                assert!(absorber_check_in(&k30, &hb, v, m.quad));
            }
            // in the complete graph every absorber serves everything else
            assert_eq!(m.served.len(), 26);
        }
        assert!(fam.members_pairwise_disjoint());
    }

    #[test]
    fn sample_family_empty_and_errors() {
        let k10 = Hypergraph3::complete(10);
        let fam = sample_family(&k10, 0.5, 0.0, 3, 2, 0).unwrap();
        assert!(fam.is_empty());
        assert!(matches!(
            sample_family(&k10, 0.5, 0.0, 3, 2, 1),
            Err(Error::RetriesExhausted(_))
        ));
    }

    #[test]
    fn sample_family_deterministic() {
        let h = crate::gen::gen_random(40, 0.6, 7);
        let a = sample_family(&h, 0.2, 0.2, 11, 3, 0).unwrap();
        let b = sample_family(&h, 0.2, 0.2, 11, 3, 0).unwrap();
        let qa: Vec<_> = a.members.iter().map(|m| m.quad).collect();
        let qb: Vec<_> = b.members.iter().map(|m| m.quad).collect();
        assert_eq!(qa, qb);
    }

    #[test]
    fn build_single_member_path() {
        let k10 = Hypergraph3::complete(10);
        let fam = family_from_quads(&k10, 0.5, &[[1, 2, 3, 4]]).unwrap();
        let a = build_absorbing_path(&k10, &fam, 0.5, 0.4, &CascadeParams::minimal()).unwrap();
        assert_eq!(a.0, vec![1, 2, 3, 4]);
        assert!(k10.validate_tight(a.vertices(), SeqMode::Path, false).ok);
    }

    #[test]
    fn build_three_member_path() {
        let k40 = Hypergraph3::complete(40);
        let fam =
            family_from_quads(&k40, 0.5, &[[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 10, 11]]).unwrap();
        let a = build_absorbing_path(&k40, &fam, 0.5, 0.4, &CascadeParams::minimal()).unwrap();
        assert_eq!(a.len(), 4 * 3 + 6 * 2);
        assert!(k40.validate_tight(a.vertices(), SeqMode::Path, false).ok);
        assert_eq!(&a.0[..2], &[0, 1]);
        assert_eq!(&a.0[a.len() - 2..], &[10, 11]);
    }

    #[test]
    fn build_rejects_overlap() {
        let k40 = Hypergraph3::complete(40);
        let fam = family_from_quads(&k40, 0.5, &[[0, 1, 2, 3], [3, 4, 5, 6]]);
        assert!(fam.is_err());
    }

    #[test]
    fn absorb_examples() {
        let k10 = Hypergraph3::complete(10);
        let mut fam = family_from_quads(&k10, 0.5, &[[1, 2, 3, 4]]).unwrap();
        let a = TightPath(vec![1, 2, 3, 4]);

        let same = absorb(&k10, &a, &mut fam.clone(), &VertexSet::new()).unwrap();
        assert_eq!(same, a);

        let u: VertexSet = [5u32].into_iter().collect();
        let au = absorb(&k10, &a, &mut fam, &u).unwrap();
        assert_eq!(au.0, vec![1, 2, 5, 3, 4]);
        assert!(k10.validate_tight(au.vertices(), SeqMode::Path, false).ok);

        // capacity exhausted: the single member is used
        let u2: VertexSet = [6u32].into_iter().collect();
        assert!(matches!(absorb(&k10, &au, &mut fam, &u2), Err(Error::NoServer(6))));
    }
}
