//! Path covers: a weak regularity partition with a reduced cluster graph,
//! greedy near-perfect matching, tight-path packing inside regular cluster
//! triples, and a pragmatic global greedy backend. The contract either way:
//! few vertex-disjoint tight paths covering almost everything.

use crate::audit::count_points;
use crate::bits::VertexSet;
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph3, Triple};
use crate::rng::{self, substream};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug)]
pub struct RegularityPartition {
    pub clusters: Vec<Vec<u32>>,
    pub epsilon: f64,
    /// Cluster-index triples that failed the sampled regularity test.
    pub irregular_triples: Vec<[usize; 3]>,
    /// Whether |irregular| <= epsilon * t^3 was reached within the cap.
    pub certified: bool,
}

impl RegularityPartition {
    pub fn t(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_equitable(&self) -> bool {
        let min = self.clusters.iter().map(Vec::len).min().unwrap_or(0);
        let max = self.clusters.iter().map(Vec::len).max().unwrap_or(0);
        max - min <= 1
    }
}

/// Equitable chop of an ordered vertex list into t clusters.
fn chop(order: &[u32], t: usize) -> Vec<Vec<u32>> {
    let n = order.len();
    let base = n / t;
    let extra = n % t;
    let mut out = Vec::with_capacity(t);
    let mut at = 0;
    for i in 0..t {
        let size = base + usize::from(i < extra);
        out.push(order[at..at + size].to_vec());
        at += size;
    }
    out
}

fn random_sub(cluster: &[u32], rng: &mut impl Rng) -> VertexSet {
    let size = rng.gen_range(0..=cluster.len());
    let mut ids = cluster.to_vec();
    ids.shuffle(rng);
    ids.truncate(size);
    ids.into_iter().collect()
}

/// Tests one cluster triple by sampled sub-triples: a witness violates when
/// its point count strays from the proportional value by more than
/// epsilon * m^3, where m is the order of the tripartite graph on the triple.
/// Returns the first violating witness, if any.
fn test_triple(
    h: &Hypergraph3,
    clusters: &[Vec<u32>],
    idx: [usize; 3],
    epsilon: f64,
    samples: usize,
    seed: u64,
    round: usize,
) -> Option<[VertexSet; 3]> {
    let [i, j, k] = idx;
    let (ci, cj, ck) = (&clusters[i], &clusters[j], &clusters[k]);
    let full: [VertexSet; 3] = [
        ci.iter().copied().collect(),
        cj.iter().copied().collect(),
        ck.iter().copied().collect(),
    ];
    let denom = (ci.len() * cj.len() * ck.len()) as f64;
    if denom == 0.0 {
        return None;
    }
    let density = count_points(h, &full[0], &full[1], &full[2]) as f64 / denom;
    let m = (ci.len() + cj.len() + ck.len()) as f64;
    let tol = epsilon * m * m * m;
    let widx = (round * clusters.len().pow(3) + (i * clusters.len() + j) * clusters.len() + k)
        as u64;
    for s in 0..samples {
        let mut rng = substream(seed, rng::DOMAIN_WITNESS, widx.wrapping_mul(1 << 20) + s as u64);
        let xs = random_sub(ci, &mut rng);
        let ys = random_sub(cj, &mut rng);
        let zs = random_sub(ck, &mut rng);
        let e = count_points(h, &xs, &ys, &zs) as f64;
        let expect = density * (xs.len() * ys.len() * zs.len()) as f64;
        if (e - expect).abs() > tol {
            return Some([xs, ys, zs]);
        }
    }
    None
}

/// Iterated refinement toward a partition whose cluster triples pass the
/// sampled regularity test. Clusters split along failing witnesses while the
/// cluster count can still grow; the best partition seen is returned, with
/// `certified` false when the irregular-triple budget was never met.
pub fn weak_regularity_partition(
    h: &Hypergraph3,
    epsilon: f64,
    t0: usize,
    t_cap: usize,
    seed: u64,
) -> Result<RegularityPartition> {
    if t0 > t_cap {
        return Err(Error::Precondition(format!("t0 = {t0} exceeds cap {t_cap}")));
    }
    if h.vertex_count() < t_cap {
        return Err(Error::Precondition(format!(
            "need at least {t_cap} vertices, have {}",
            h.vertex_count()
        )));
    }
    let samples = 200;
    let mut order = h.active().to_vec();
    order.shuffle(&mut substream(seed, rng::DOMAIN_PARTITION, 0));
    let mut clusters = chop(&order, t0);
    let mut best: Option<RegularityPartition> = None;
    let mut round = 0usize;
    loop {
        let t = clusters.len();
        let mut irregular = Vec::new();
        let mut witness_for_cluster: Vec<Option<VertexSet>> = vec![None; t];
        for i in 0..t {
            for j in i + 1..t {
                for k in j + 1..t {
                    if let Some(wit) =
                        test_triple(h, &clusters, [i, j, k], epsilon, samples, seed, round)
                    {
                        irregular.push([i, j, k]);
                        for (c, set) in [i, j, k].into_iter().zip(wit.into_iter()) {
                            if witness_for_cluster[c].is_none() {
                                witness_for_cluster[c] = Some(set);
                            }
                        }
                    }
                }
            }
        }
        let certified = (irregular.len() as f64) <= epsilon * (t as f64).powi(3);
        let part = RegularityPartition {
            clusters: clusters.clone(),
            epsilon,
            irregular_triples: irregular,
            certified,
        };
        let better = best
            .as_ref()
            .map_or(true, |b| part.irregular_triples.len() < b.irregular_triples.len());
        if better {
            best = Some(part.clone());
        }
        if certified || t >= t_cap {
            return Ok(best.expect("at least one partition recorded"));
        }
        // refine: order each cluster with its witness part first, then re-chop
        let mut new_order = Vec::with_capacity(order.len());
        for (c, cluster) in clusters.iter().enumerate() {
            match &witness_for_cluster[c] {
                Some(wit) => {
                    let (inside, outside): (Vec<u32>, Vec<u32>) =
                        cluster.iter().partition(|&&v| wit.contains(v));
                    new_order.extend(inside);
                    new_order.extend(outside);
                }
                None => new_order.extend(cluster.iter().copied()),
            }
        }
        order = new_order;
        clusters = chop(&order, (2 * t).min(t_cap));
        round += 1;
    }
}

#[derive(Clone, Debug)]
pub struct ReducedGraph {
    pub t: usize,
    /// Cluster triples that are regular with crossing density >= d_prime.
    pub edges: Vec<[usize; 3]>,
    pub d_prime: f64,
}

impl ReducedGraph {
    pub fn as_hypergraph(&self) -> Hypergraph3 {
        let triples: Vec<Triple> =
            self.edges.iter().map(|&[i, j, k]| [i as u32, j as u32, k as u32]).collect();
        Hypergraph3::build_from_triples(self.t, triples).expect("valid reduced triples")
    }
}

pub fn reduced_graph(
    h: &Hypergraph3,
    part: &RegularityPartition,
    d_prime: f64,
) -> ReducedGraph {
    let t = part.t();
    let mut edges = Vec::new();
    for i in 0..t {
        for j in i + 1..t {
            for k in j + 1..t {
                if part.irregular_triples.contains(&[i, j, k]) {
                    continue;
                }
                let xs: VertexSet = part.clusters[i].iter().copied().collect();
                let ys: VertexSet = part.clusters[j].iter().copied().collect();
                let zs: VertexSet = part.clusters[k].iter().copied().collect();
                let denom =
                    (part.clusters[i].len() * part.clusters[j].len() * part.clusters[k].len())
                        as f64;
                if denom > 0.0 && count_points(h, &xs, &ys, &zs) as f64 / denom >= d_prime {
                    edges.push([i, j, k]);
                }
            }
        }
    }
    ReducedGraph { t, edges, d_prime }
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchingReport {
    pub matching: Vec<Triple>,
    pub leftover: Vec<u32>,
    /// |leftover| <= max(2, zeta * t)
    pub leftover_ok: bool,
    /// e(leftover) counted in the host graph; zero by maximality.
    pub leftover_edges: u64,
}

/// Greedy maximal matching in ascending lexicographic edge order. The
/// leftover set spans no edge, mirroring maximality.
pub fn near_perfect_matching(r: &Hypergraph3, zeta: f64) -> MatchingReport {
    let mut covered = VertexSet::new();
    let mut matching = Vec::new();
    for &[a, b, c] in r.edges() {
        if !covered.contains(a) && !covered.contains(b) && !covered.contains(c) {
            covered.extend([a, b, c]);
            matching.push([a, b, c]);
        }
    }
    let leftover = r.active().difference(&covered);
    let leftover_edges = crate::audit::count_set(r, &leftover);
    let bound = f64::max(2.0, zeta * r.vertex_count() as f64);
    MatchingReport {
        leftover_ok: leftover.len() as f64 <= bound,
        leftover: leftover.to_vec(),
        matching,
        leftover_edges,
    }
}

/// Greedily packs tight paths into the tripartite graph on three clusters,
/// alternating parts cyclically so every consecutive triple is crossing.
/// Paths shorter than max(3, eps(d - eps) m / 3) are dissolved back into the
/// unused pool at the end.
pub fn pack_paths_regular_triple(
    h: &Hypergraph3,
    parts: [&[u32]; 3],
    epsilon: f64,
    d: f64,
) -> Vec<Vec<u32>> {
    let m: usize = parts.iter().map(|p| p.len()).sum();
    let min_len = f64::max(3.0, epsilon * (d - epsilon) * m as f64 / 3.0).ceil() as usize;
    let mut unused: [VertexSet; 3] = [
        parts[0].iter().copied().collect(),
        parts[1].iter().copied().collect(),
        parts[2].iter().copied().collect(),
    ];
    let mut paths: Vec<(Vec<u32>, Vec<usize>)> = Vec::new(); // (vertices, part pattern)
    loop {
        if unused.iter().any(|u| u.is_empty()) {
            break;
        }
        // lexicographically first crossing start edge among unused vertices
        let mut start = None;
        'outer: for a in unused[0].iter() {
            for b in unused[1].iter() {
                let cs = h.coneighbors(a, b).intersection(&unused[2]);
                if let Some(c) = cs.first() {
                    start = Some([a, b, c]);
                    break 'outer;
                }
            }
        }
        let Some([a, b, c]) = start else { break };
        let mut verts = vec![a, b, c];
        let mut pattern = vec![0usize, 1, 2];
        for (slot, v) in pattern.iter().zip(&verts) {
            unused[*slot].remove(*v);
        }
        // forward extension
        loop {
            let next_part = (pattern[pattern.len() - 1] + 1) % 3;
            let (p, q) = (verts[verts.len() - 2], verts[verts.len() - 1]);
            let cand = h.coneighbors(p, q).intersection(&unused[next_part]);
            match cand.first() {
                Some(v) => {
                    verts.push(v);
                    pattern.push(next_part);
                    unused[next_part].remove(v);
                }
                None => break,
            }
        }
        // backward extension
        loop {
            let prev_part = (pattern[0] + 2) % 3;
            let (p, q) = (verts[0], verts[1]);
            let cand = h.coneighbors(p, q).intersection(&unused[prev_part]);
            match cand.first() {
                Some(v) => {
                    verts.insert(0, v);
                    pattern.insert(0, prev_part);
                    unused[prev_part].remove(v);
                }
                None => break,
            }
        }
        paths.push((verts, pattern));
    }
    paths
        .into_iter()
        .filter(|(v, _)| v.len() >= min_len)
        .map(|(v, _)| v)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverBackend {
    Greedy,
    Regularity,
}

impl std::str::FromStr for CoverBackend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Self::Greedy),
            "regularity" => Ok(Self::Regularity),
            other => Err(Error::InvalidInput(format!("unknown backend {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoverParams {
    pub epsilon: f64,
    pub t0: usize,
    pub t_cap: usize,
    pub d_prime: f64,
    pub seed: u64,
}

impl Default for CoverParams {
    fn default() -> Self {
        Self { epsilon: 0.1, t0: 4, t_cap: 16, d_prime: 0.25, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub paths: Vec<Vec<u32>>,
    pub covered: usize,
    pub shortfall: usize,
    pub target_shortfall: usize,
    pub met: bool,
    pub backend: CoverBackend,
    /// Regularity backend only: whether the partition certified.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified: Option<bool>,
}

/// Covers all but (ideally) at most zeta * n vertices with vertex-disjoint
/// tight paths. The greedy backend grows paths from both ends, merges path
/// ends, then inserts stragglers mid-path; the regularity backend runs the
/// partition - reduced graph - matching - per-triple packing pipeline.
/// Shortfall above the target is reported, not hidden.
pub fn cover_with_paths(
    h: &Hypergraph3,
    d: f64,
    zeta: f64,
    backend: CoverBackend,
    params: &CoverParams,
) -> Result<CoverReport> {
    let n = h.vertex_count();
    let (paths, certified) = match backend {
        CoverBackend::Greedy => (greedy_cover(h), None),
        CoverBackend::Regularity => {
            let part = weak_regularity_partition(h, params.epsilon, params.t0, params.t_cap,
                params.seed)?;
            let red = reduced_graph(h, &part, params.d_prime);
            let matching = near_perfect_matching(&red.as_hypergraph(), zeta);
            let mut paths = Vec::new();
            for &[i, j, k] in &matching.matching {
                let packed = pack_paths_regular_triple(
                    h,
                    [
                        &part.clusters[i as usize],
                        &part.clusters[j as usize],
                        &part.clusters[k as usize],
                    ],
                    params.epsilon,
                    d,
                );
                paths.extend(packed);
            }
            (paths, Some(part.certified))
        }
    };
    let covered: usize = paths.iter().map(Vec::len).sum();
    let shortfall = n - covered;
    let target_shortfall = (zeta * n as f64).floor() as usize;
    Ok(CoverReport {
        paths,
        covered,
        shortfall,
        target_shortfall,
        met: shortfall <= target_shortfall,
        backend,
        certified,
    })
}

/// Grows maximal tight paths greedily (lowest-id extension at both ends),
/// then repeatedly merges paths whose ends chain together, then inserts any
/// remaining vertex into a path wherever the three rewritten windows are all
/// edges.
fn greedy_cover(h: &Hypergraph3) -> Vec<Vec<u32>> {
    let mut unused = h.active().clone();
    let mut paths: Vec<Vec<u32>> = Vec::new();
    let mut edge_ptr = 0;
    let edges = h.edges();
    loop {
        while edge_ptr < edges.len() {
            let [a, b, c] = edges[edge_ptr];
            if unused.contains(a) && unused.contains(b) && unused.contains(c) {
                break;
            }
            edge_ptr += 1;
        }
        if edge_ptr >= edges.len() {
            break;
        }
        let [a, b, c] = edges[edge_ptr];
        let mut path = vec![a, b, c];
        for v in [a, b, c] {
            unused.remove(v);
        }
        loop {
            let (p, q) = (path[path.len() - 2], path[path.len() - 1]);
            match h.coneighbors(p, q).intersection(&unused).first() {
                Some(v) => {
                    path.push(v);
                    unused.remove(v);
                }
                None => break,
            }
        }
        loop {
            let (p, q) = (path[0], path[1]);
            match h.coneighbors(p, q).intersection(&unused).first() {
                Some(v) => {
                    path.insert(0, v);
                    unused.remove(v);
                }
                None => break,
            }
        }
        paths.push(path);
    }
    merge_paths(h, &mut paths);
    insert_stragglers(h, &mut paths, &mut unused);
    paths
}

fn chainable(h: &Hypergraph3, p: &[u32], q: &[u32]) -> bool {
    let k = p.len();
    h.has_edge(p[k - 2], p[k - 1], q[0]) && h.has_edge(p[k - 1], q[0], q[1])
}

fn merge_paths(h: &Hypergraph3, paths: &mut Vec<Vec<u32>>) {
    'again: loop {
        for i in 0..paths.len() {
            for j in 0..paths.len() {
                if i == j {
                    continue;
                }
                for (ri, rj) in [(false, false), (false, true), (true, false), (true, true)] {
                    let mut p = paths[i].clone();
                    if ri {
                        p.reverse();
                    }
                    let mut q = paths[j].clone();
                    if rj {
                        q.reverse();
                    }
                    if chainable(h, &p, &q) {
                        p.extend_from_slice(&q);
                        paths[i] = p;
                        paths.remove(j);
                        continue 'again;
                    }
                }
            }
        }
        return;
    }
}

fn insert_stragglers(h: &Hypergraph3, paths: &mut [Vec<u32>], unused: &mut VertexSet) {
    let mut progress = true;
    while progress {
        progress = false;
        for v in unused.to_vec() {
            'place: for path in paths.iter_mut() {
                for pos in 0..=path.len() {
                    if insertion_fits(h, path, pos, v) {
                        path.insert(pos, v);
                        unused.remove(v);
                        progress = true;
                        break 'place;
                    }
                }
            }
        }
    }
}

/// Would inserting v at `pos` keep the path tight? Only the windows touching
/// the new position need checking.
fn insertion_fits(h: &Hypergraph3, path: &[u32], pos: usize, v: u32) -> bool {
    let k = path.len();
    let get = |i: isize| -> Option<u32> {
        if i < 0 {
            return None;
        }
        let i = i as usize;
        // index into the sequence as it would be after insertion
        if i < pos {
            path.get(i).copied()
        } else if i == pos {
            Some(v)
        } else {
            path.get(i - 1).copied()
        }
    };
    let new_len = k + 1;
    let lo = pos.saturating_sub(2);
    for start in lo..=pos {
        if start + 2 >= new_len {
            break;
        }
        let (a, b, c) = (
            get(start as isize).unwrap(),
            get(start as isize + 1).unwrap(),
            get(start as isize + 2).unwrap(),
        );
        if !h.has_edge(a, b, c) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::SeqMode;

    #[test]
    fn partition_complete_certifies_immediately() {
        let h = Hypergraph3::complete(24);
        let p = weak_regularity_partition(&h, 0.1, 3, 8, 1).unwrap();
        assert!(p.certified);
        assert_eq!(p.t(), 3);
        assert!(p.is_equitable());
        assert!(p.irregular_triples.is_empty());
    }

    #[test]
    fn partition_empty_certifies() {
        let h = Hypergraph3::empty(20);
        let p = weak_regularity_partition(&h, 0.1, 4, 8, 1).unwrap();
        assert!(p.certified);
    }

    #[test]
    fn reduced_graph_extremes() {
        let h = Hypergraph3::complete(24);
        let p = weak_regularity_partition(&h, 0.1, 4, 8, 1).unwrap();
        let r = reduced_graph(&h, &p, 0.5);
        assert_eq!(r.edges.len(), 4); // C(4,3)
        let e = Hypergraph3::empty(24);
        let pe = weak_regularity_partition(&e, 0.1, 4, 8, 1).unwrap();
        assert!(reduced_graph(&e, &pe, 0.5).edges.is_empty());
    }

    #[test]
    fn matching_examples() {
        let r = Hypergraph3::complete(9);
        let rep = near_perfect_matching(&r, 0.2);
        assert_eq!(rep.matching.len(), 3);
        assert!(rep.leftover.is_empty());
        assert_eq!(rep.leftover_edges, 0);

        let empty = Hypergraph3::empty(6);
        let rep = near_perfect_matching(&empty, 0.2);
        assert!(rep.matching.is_empty());
        assert_eq!(rep.leftover.len(), 6);
        assert_eq!(rep.leftover_edges, 0);
    }

    #[test]
    fn matching_leftover_spans_no_edge() {
        for seed in 0..10u64 {
            let r = crate::gen::gen_random(30, 0.3, seed);
            let rep = near_perfect_matching(&r, 0.2);
            assert_eq!(rep.leftover_edges, 0);
        }
    }

    #[test]
    fn pack_complete_tripartite() {
        // complete 3-graph restricted to crossing triples of three parts
        let n = 30;
        let h = Hypergraph3::complete(n);
        let parts: Vec<Vec<u32>> = vec![
            (0..10u32).collect(),
            (10..20u32).collect(),
            (20..30u32).collect(),
        ];
        let paths =
            pack_paths_regular_triple(&h, [&parts[0], &parts[1], &parts[2]], 0.1, 1.0);
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].len(), 30);
        assert!(h.validate_tight(&paths[0], SeqMode::Path, false).ok);
    }

    #[test]
    fn pack_empty_triple() {
        let h = Hypergraph3::empty(12);
        let parts: Vec<Vec<u32>> =
            vec![(0..4u32).collect(), (4..8u32).collect(), (8..12u32).collect()];
        let paths = pack_paths_regular_triple(&h, [&parts[0], &parts[1], &parts[2]], 0.1, 0.5);
        assert!(paths.is_empty());
    }

    #[test]
    fn greedy_cover_complete_single_path() {
        let h = Hypergraph3::complete(12);
        let r = cover_with_paths(&h, 1.0, 0.1, CoverBackend::Greedy, &CoverParams::default())
            .unwrap();
        assert_eq!(r.paths.len(), 1);
        assert_eq!(r.covered, 12);
        assert!(r.met);
    }

    #[test]
    fn greedy_cover_empty_reports_shortfall() {
        let h = Hypergraph3::empty(10);
        let r = cover_with_paths(&h, 0.5, 0.1, CoverBackend::Greedy, &CoverParams::default())
            .unwrap();
        assert_eq!(r.covered, 0);
        assert!(!r.met);
        assert_eq!(r.shortfall, 10);
    }

    #[test]
    fn greedy_cover_paths_valid_and_disjoint() {
        for seed in 0..5u64 {
            let h = crate::gen::gen_random(60, 0.5, seed);
            let r = cover_with_paths(&h, 0.5, 0.1, CoverBackend::Greedy, &CoverParams::default())
                .unwrap();
            let mut seen = VertexSet::new();
            for p in &r.paths {
                assert!(h.validate_tight(p, SeqMode::Path, false).ok);
                for &v in p {
                    assert!(seen.insert(v), "paths overlap at {v}");
                }
            }
            assert!(r.met, "seed {seed}: covered {} of 60", r.covered);
        }
    }

    #[test]
    fn regularity_backend_runs() {
        let h = crate::gen::gen_random(120, 0.5, 6);
        let mut params = CoverParams::default();
        params.seed = 6;
        let r = cover_with_paths(&h, 0.5, 0.3, CoverBackend::Regularity, &params).unwrap();
        let mut seen = VertexSet::new();
        for p in &r.paths {
            assert!(h.validate_tight(p, SeqMode::Path, false).ok);
            for &v in p {
                assert!(seen.insert(v));
            }
        }
        assert!(r.covered > 0);
    }
}
