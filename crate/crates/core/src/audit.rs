//! Exact pattern counting for the four density notions (points, edge,
//! cherry, set) and deviation audits: how far a given hypergraph is from
//! being (rho, d)-dense in each sense. Also the exact counting checks on
//! low-codegree pair sets used by the relevance machinery.
//!
//! Degenerate tuples follow the displayed definitions literally: the cherry
//! pattern space P2 counts tuples with repeated coordinates, but a repeated
//! coordinate can never lie in an edge, so such tuples contribute 0 to every
//! edge count.

use crate::bits::VertexSet;
use crate::error::{Error, Result};
use crate::graph::Graph2;
use crate::hypergraph::{pair_rank, Hypergraph3};
use crate::rng;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// A set of ordered pairs over vertex ids, indexed both ways.
#[derive(Clone, Debug, Default)]
pub struct PairSet {
    out: Vec<VertexSet>,
    inn: Vec<VertexSet>,
    len: u64,
}

impl PairSet {
    pub fn new(n: usize) -> Self {
        Self { out: vec![VertexSet::new(); n], inn: vec![VertexSet::new(); n], len: 0 }
    }

    pub fn insert(&mut self, u: u32, v: u32) -> bool {
        if self.out[u as usize].insert(v) {
            self.inn[v as usize].insert(u);
            self.len += 1;
            true
        } else {
            false
        }
    }

    pub fn contains(&self, u: u32, v: u32) -> bool {
        self.out.get(u as usize).map_or(false, |s| s.contains(v))
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn outgoing(&self, u: u32) -> &VertexSet {
        &self.out[u as usize]
    }

    pub fn incoming(&self, v: u32) -> &VertexSet {
        &self.inn[v as usize]
    }

    pub fn from_pairs<I: IntoIterator<Item = (u32, u32)>>(n: usize, pairs: I) -> Self {
        let mut s = Self::new(n);
        for (u, v) in pairs {
            s.insert(u, v);
        }
        s
    }

    /// All ordered pairs over `universe`, including (v, v).
    pub fn all_over(n: usize, universe: &VertexSet) -> Self {
        let mut s = Self::new(n);
        for u in universe.iter() {
            s.out[u as usize] = universe.clone();
            s.len += universe.len() as u64;
        }
        for v in universe.iter() {
            s.inn[v as usize] = universe.clone();
        }
        s
    }

    pub fn to_pairs(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for u in 0..self.out.len() as u32 {
            for v in self.out[u as usize].iter() {
                out.push((u, v));
            }
        }
        out
    }

    /// Independent coin flip per ordered pair over `universe`.
    pub fn random<R: Rng>(n: usize, universe: &VertexSet, rng: &mut R) -> Self {
        let mut s = Self::new(n);
        for u in universe.iter() {
            let row = universe.random_subset(rng);
            s.len += row.len() as u64;
            for v in row.iter() {
                s.inn[v as usize].insert(u);
            }
            s.out[u as usize] = row;
        }
        s
    }
}

/// e_H(X, Y, Z): ordered triples (x, y, z) in X x Y x Z forming an edge.
pub fn count_points(h: &Hypergraph3, x: &VertexSet, y: &VertexSet, z: &VertexSet) -> u64 {
    let x = x.intersection(h.active());
    let y = y.intersection(h.active());
    let z = z.intersection(h.active());
    let mut total = 0u64;
    for a in x.iter() {
        for b in y.iter() {
            if a != b {
                total += h.coneighbors(a, b).intersection_len(&z) as u64;
            }
        }
    }
    total
}

/// e_H(G1, G2) and |P2(G1, G2)| for ordered pair sets: tuples (x, y, z) with
/// (x, y) in G1 and (y, z) in G2. Returns (edge count, pattern count).
pub fn count_cherry(h: &Hypergraph3, g1: &PairSet, g2: &PairSet) -> (u64, u64) {
    let n = h.n_ids();
    let mut e = 0u64;
    let mut p2 = 0u64;
    for y in 0..n as u32 {
        let ins = g1.incoming(y);
        let outs = g2.outgoing(y);
        if ins.is_empty() || outs.is_empty() {
            continue;
        }
        p2 += ins.len() as u64 * outs.len() as u64;
        for x in ins.iter() {
            if x != y {
                e += h.coneighbors(x, y).intersection_len(outs) as u64;
            }
        }
    }
    (e, p2)
}

/// e_H(P, X) over P x X. Returns (edge count, |P| * |X|).
pub fn count_edge(h: &Hypergraph3, p: &PairSet, x: &VertexSet) -> (u64, u64) {
    let x = x.intersection(h.active());
    let mut e = 0u64;
    for (u, v) in p.to_pairs() {
        if u != v && h.is_active(u) && h.is_active(v) {
            e += h.coneighbors(u, v).intersection_len(&x) as u64;
        }
    }
    (e, p.len() * x.len() as u64)
}

/// e_H(X): edges induced by X.
pub fn count_set(h: &Hypergraph3, x: &VertexSet) -> u64 {
    let x = x.intersection(h.active());
    let verts = x.to_vec();
    let mut triple_sum = 0u64;
    for (i, &u) in verts.iter().enumerate() {
        for &v in &verts[i + 1..] {
            triple_sum += h.coneighbors(u, v).intersection_len(&x) as u64;
        }
    }
    // every induced edge is counted once per contained pair
    triple_sum / 3
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Notion {
    Points,
    Edge,
    Cherry,
    Set,
}

impl std::str::FromStr for Notion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "points" => Ok(Self::Points),
            "edge" => Ok(Self::Edge),
            "cherry" => Ok(Self::Cherry),
            "set" => Ok(Self::Set),
            other => Err(Error::InvalidInput(format!("unknown notion {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Strategy {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

/// Largest order for which exhaustive witness search is allowed, per notion.
#[derive(Clone, Copy, Debug)]
pub struct AuditCaps {
    pub points: usize,
    pub cherry: usize,
    pub edge: usize,
    pub set: usize,
}

impl Default for AuditCaps {
    fn default() -> Self {
        Self { points: 12, cherry: 12, edge: 16, set: 20 }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Witness {
    Points { x: Vec<u32>, y: Vec<u32>, z: Vec<u32> },
    Cherry { g1: Vec<(u32, u32)>, g2: Vec<(u32, u32)> },
    Edge { p: Vec<(u32, u32)>, x: Vec<u32> },
    Set { x: Vec<u32> },
}

#[derive(Clone, Debug, Serialize)]
pub struct StrategyReport {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Deviation report. Under the exhaustive strategy `rho_hat` is the exact
/// minimal rho for which H is (rho, d)-dense in the notion; under sampling it
/// is a lower bound. Never negative.
#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub notion: Notion,
    pub d: f64,
    pub rho_hat: f64,
    pub strategy: StrategyReport,
    pub worst_witness: Witness,
    /// 6 e(H) / (n (n-1) (n-2)), for picking a reference d.
    pub global_density: f64,
}

pub fn density_audit(
    h: &Hypergraph3,
    d: f64,
    notion: Notion,
    strategy: Strategy,
    caps: &AuditCaps,
) -> Result<DensityReport> {
    let n = h.vertex_count();
    let nf = n as f64;
    let n3 = nf * nf * nf;
    let (rho_hat, worst_witness) = match strategy {
        Strategy::Exhaustive => {
            let cap = match notion {
                Notion::Points => caps.points,
                Notion::Cherry => caps.cherry,
                Notion::Edge => caps.edge,
                Notion::Set => caps.set,
            };
            if n > cap {
                return Err(Error::ExhaustiveCap { n, cap });
            }
            exhaustive_audit(h, d, notion)
        }
        Strategy::Sampled { count, seed } => sampled_audit(h, d, notion, count, seed),
    };
    let e = h.edge_count() as f64;
    let global_density =
        if n >= 3 { 6.0 * e / (nf * (nf - 1.0) * (nf - 2.0)) } else { 0.0 };
    Ok(DensityReport {
        notion,
        d,
        rho_hat: (rho_hat / n3).max(0.0),
        strategy: match strategy {
            Strategy::Exhaustive => {
                StrategyReport { kind: "exhaustive".into(), samples: None, seed: None }
            }
            Strategy::Sampled { count, seed } => StrategyReport {
                kind: "sampled".into(),
                samples: Some(count),
                seed: Some(seed),
            },
        },
        worst_witness,
        global_density,
    })
}

fn mask_to_vec(mask: u32) -> Vec<u32> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Precomputed coneighborhoods as 32-bit masks; exhaustive search only runs
/// on small full-id-space graphs.
fn cone_masks(h: &Hypergraph3) -> Vec<u32> {
    let n = h.n_ids();
    assert!(n <= 32 && h.vertex_count() == n, "exhaustive audit needs a small, unmasked graph");
    let mut m = vec![0u32; n * (n - 1) / 2 + 1];
    for v in 1..n as u32 {
        for u in 0..v {
            let mut bits = 0u32;
            for w in h.coneighbors(u, v).iter() {
                bits |= 1 << w;
            }
            m[pair_rank(u, v)] = bits;
        }
    }
    m
}

fn exhaustive_audit(h: &Hypergraph3, d: f64, notion: Notion) -> (f64, Witness) {
    match notion {
        Notion::Set => exhaustive_set(h, d),
        Notion::Points => exhaustive_points(h, d),
        Notion::Edge => exhaustive_edge(h, d),
        Notion::Cherry => exhaustive_cherry(h, d),
    }
}

fn exhaustive_set(h: &Hypergraph3, d: f64) -> (f64, Witness) {
    let n = h.n_ids();
    assert!(n <= 32 && h.vertex_count() == n);
    // edge lists per vertex as masks of the other two vertices
    let mut per_vertex: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &[a, b, c] in h.edges() {
        per_vertex[a as usize].push(1 << b | 1 << c);
        per_vertex[b as usize].push(1 << a | 1 << c);
        per_vertex[c as usize].push(1 << a | 1 << b);
    }
    let choose3 = |k: u64| -> f64 {
        if k < 3 {
            0.0
        } else {
            (k * (k - 1) * (k - 2) / 6) as f64
        }
    };
    let mut best = (f64::NEG_INFINITY, 0u32);
    let mut xm = 0u32;
    let mut e = 0i64;
    let mut size = 0u64;
    let total = 1u64 << n;
    for i in 0..total {
        if i > 0 {
            let v = i.trailing_zeros() as usize;
            let others = xm & !(1 << v);
            let delta: i64 =
                per_vertex[v].iter().filter(|&&m| m & others == m).count() as i64;
            if xm >> v & 1 == 0 {
                xm |= 1 << v;
                size += 1;
                e += delta;
            } else {
                xm &= !(1 << v);
                size -= 1;
                e -= delta;
            }
        }
        let dev = d * choose3(size) - e as f64;
        if dev > best.0 {
            best = (dev, xm);
        }
    }
    (best.0, Witness::Set { x: mask_to_vec(best.1) })
}

fn exhaustive_points(h: &Hypergraph3, d: f64) -> (f64, Witness) {
    let n = h.n_ids();
    let cones = cone_masks(h);
    let mut best = (f64::NEG_INFINITY, 0u32, 0u32, 0u32);
    let total = 1u64 << n;
    for xm in 0..total as u32 {
        let xsz = xm.count_ones() as f64;
        // tbl[y][z] = |N(y,z) cap X|; zero when y == z
        let mut tbl = vec![0i32; n * n];
        for y in 0..n as u32 {
            for z in 0..n as u32 {
                if y != z {
                    tbl[y as usize * n + z as usize] =
                        (cones[pair_rank(y, z)] & xm).count_ones() as i32;
                }
            }
        }
        let mut s = vec![0i64; n];
        let mut ym = 0u32;
        for j in 0..total {
            if j > 0 {
                let y = j.trailing_zeros() as usize;
                if ym >> y & 1 == 0 {
                    ym |= 1 << y;
                    for z in 0..n {
                        s[z] += tbl[y * n + z] as i64;
                    }
                } else {
                    ym &= !(1 << y);
                    for z in 0..n {
                        s[z] -= tbl[y * n + z] as i64;
                    }
                }
            }
            let base = d * xsz * ym.count_ones() as f64;
            let mut dev = 0.0;
            let mut zm = 0u32;
            for (z, &sz) in s.iter().enumerate() {
                let c = base - sz as f64;
                if c > 0.0 {
                    dev += c;
                    zm |= 1 << z;
                }
            }
            if dev > best.0 {
                best = (dev, xm, ym, zm);
            }
        }
    }
    (
        best.0,
        Witness::Points { x: mask_to_vec(best.1), y: mask_to_vec(best.2), z: mask_to_vec(best.3) },
    )
}

fn exhaustive_edge(h: &Hypergraph3, d: f64) -> (f64, Witness) {
    let n = h.n_ids();
    let cones = cone_masks(h);
    let mut best: (f64, u32, Vec<(u32, u32)>) = (f64::NEG_INFINITY, 0, Vec::new());
    let total = 1u64 << n;
    for xm in 0..total as u32 {
        let base = d * xm.count_ones() as f64;
        let mut dev = 0.0;
        for u in 0..n as u32 {
            for v in 0..n as u32 {
                let cnt = if u == v { 0 } else { (cones[pair_rank(u, v)] & xm).count_ones() };
                let c = base - cnt as f64;
                if c > 0.0 {
                    dev += c;
                }
            }
        }
        if dev > best.0 {
            let mut p = Vec::new();
            for u in 0..n as u32 {
                for v in 0..n as u32 {
                    let cnt =
                        if u == v { 0 } else { (cones[pair_rank(u, v)] & xm).count_ones() };
                    if base - cnt as f64 > 0.0 {
                        p.push((u, v));
                    }
                }
            }
            best = (dev, xm, p);
        }
    }
    (best.0, Witness::Edge { p: best.2, x: mask_to_vec(best.1) })
}

fn exhaustive_cherry(h: &Hypergraph3, d: f64) -> (f64, Witness) {
    let n = h.n_ids();
    let cones = cone_masks(h);
    let total = 1u64 << n;
    // The objective separates over the middle coordinate y: choose an in-set
    // A_y and out-set B_y per y independently; B_y is greedy given A_y.
    let mut dev_total = 0.0;
    let mut g1 = Vec::new();
    let mut g2 = Vec::new();
    for y in 0..n as u32 {
        let mut cnt = vec![0i32; n];
        let mut am = 0u32;
        let mut best_y = (0.0f64, 0u32, 0u32); // (dev, A mask, B mask), empty allowed
        for j in 0..total {
            if j > 0 {
                let x = j.trailing_zeros() as u32;
                let row = if x == y { 0 } else { cones[pair_rank(x, y)] };
                if am >> x & 1 == 0 {
                    am |= 1 << x;
                    let mut r = row;
                    while r != 0 {
                        let z = r.trailing_zeros() as usize;
                        r &= r - 1;
                        cnt[z] += 1;
                    }
                } else {
                    am &= !(1 << x);
                    let mut r = row;
                    while r != 0 {
                        let z = r.trailing_zeros() as usize;
                        r &= r - 1;
                        cnt[z] -= 1;
                    }
                }
            }
            let base = d * am.count_ones() as f64;
            let mut dev = 0.0;
            let mut bm = 0u32;
            for (z, &cz) in cnt.iter().enumerate() {
                let c = base - cz as f64;
                if c > 0.0 {
                    dev += c;
                    bm |= 1 << z;
                }
            }
            if dev > best_y.0 {
                best_y = (dev, am, bm);
            }
        }
        dev_total += best_y.0;
        for x in mask_to_vec(best_y.1) {
            g1.push((x, y));
        }
        for z in mask_to_vec(best_y.2) {
            g2.push((y, z));
        }
    }
    (dev_total, Witness::Cherry { g1, g2 })
}

fn sampled_audit(
    h: &Hypergraph3,
    d: f64,
    notion: Notion,
    count: usize,
    seed: u64,
) -> (f64, Witness) {
    let evals: Vec<(f64, usize)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::substream(seed, rng::DOMAIN_WITNESS, i as u64);
            let dev = match notion {
                Notion::Points => {
                    let x = h.active().random_subset(&mut rng);
                    let y = h.active().random_subset(&mut rng);
                    let z = h.active().random_subset(&mut rng);
                    let e = count_points(h, &x, &y, &z);
                    d * (x.len() * y.len() * z.len()) as f64 - e as f64
                }
                Notion::Cherry => {
                    let g1 = PairSet::random(h.n_ids(), h.active(), &mut rng);
                    let g2 = PairSet::random(h.n_ids(), h.active(), &mut rng);
                    let (e, p2) = count_cherry(h, &g1, &g2);
                    d * p2 as f64 - e as f64
                }
                Notion::Edge => {
                    let p = PairSet::random(h.n_ids(), h.active(), &mut rng);
                    let x = h.active().random_subset(&mut rng);
                    let (e, pat) = count_edge(h, &p, &x);
                    d * pat as f64 - e as f64
                }
                Notion::Set => {
                    let x = h.active().random_subset(&mut rng);
                    let k = x.len() as u64;
                    let pat = if k < 3 { 0 } else { k * (k - 1) * (k - 2) / 6 };
                    d * pat as f64 - count_set(h, &x) as f64
                }
            };
            (dev, i)
        })
        .collect();
    // max deviation, lowest index on ties: deterministic under any schedule
    let (best_dev, best_idx) = evals
        .into_iter()
        .fold((f64::NEG_INFINITY, usize::MAX), |acc, (dev, i)| {
            if dev > acc.0 || (dev == acc.0 && i < acc.1) {
                (dev, i)
            } else {
                acc
            }
        });
    // regenerate the winning witness from its substream
    let mut rng = rng::substream(seed, rng::DOMAIN_WITNESS, best_idx as u64);
    let witness = match notion {
        Notion::Points => {
            let x = h.active().random_subset(&mut rng);
            let y = h.active().random_subset(&mut rng);
            let z = h.active().random_subset(&mut rng);
            Witness::Points { x: x.to_vec(), y: y.to_vec(), z: z.to_vec() }
        }
        Notion::Cherry => {
            let g1 = PairSet::random(h.n_ids(), h.active(), &mut rng);
            let g2 = PairSet::random(h.n_ids(), h.active(), &mut rng);
            Witness::Cherry { g1: g1.to_pairs(), g2: g2.to_pairs() }
        }
        Notion::Edge => {
            let p = PairSet::random(h.n_ids(), h.active(), &mut rng);
            let x = h.active().random_subset(&mut rng);
            Witness::Edge { p: p.to_pairs(), x: x.to_vec() }
        }
        Notion::Set => {
            let x = h.active().random_subset(&mut rng);
            Witness::Set { x: x.to_vec() }
        }
    };
    (best_dev, witness)
}

/// Low-degree ordered pair set counting check. Given a graph `g` with vertex
/// cover `cover` (every vertex of the cover having degree >= k), computes
/// B = {(y, z) in cover x V : y != z, deg_H(y, z, g) < delta} together with
/// the exact cherry counts through the orientation of `g` into the cover,
/// and evaluates the two inequalities e < 2|B|delta and 2 p2 >= k |B|.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma21Report {
    pub b_size: u64,
    pub e_count: u64,
    pub p2_count: u64,
    pub e_bound: u64,
    pub e_ok: bool,
    pub p2_ok: bool,
}

/// deg_H(u, v, G): vertices z adjacent to u in G with {z, u, v} an edge of H.
pub fn deg_in_graph(h: &Hypergraph3, u: u32, v: u32, g: &Graph2) -> usize {
    if u == v {
        return 0;
    }
    g.neighbors(u).intersection_len(h.coneighbors(u, v))
}

pub fn lemma21_check(
    h: &Hypergraph3,
    g: &Graph2,
    cover: &VertexSet,
    k: usize,
    delta: usize,
) -> Result<Lemma21Report> {
    for (u, v) in g.edges() {
        if !cover.contains(u) && !cover.contains(v) {
            return Err(Error::Precondition(format!("edge ({u},{v}) not covered")));
        }
    }
    for y in cover.iter() {
        if g.degree(y) < k {
            return Err(Error::Precondition(format!(
                "cover vertex {y} has degree {} < k = {k}",
                g.degree(y)
            )));
        }
    }
    let n = h.n_ids();
    let mut oriented = PairSet::new(n);
    for (u, v) in g.edges() {
        if cover.contains(v) {
            oriented.insert(u, v);
        }
        if cover.contains(u) {
            oriented.insert(v, u);
        }
    }
    let mut b = PairSet::new(n);
    for y in cover.iter() {
        for z in h.active().iter() {
            if y != z && deg_in_graph(h, y, z, g) < delta {
                b.insert(y, z);
            }
        }
    }
    let (e, p2) = count_cherry(h, &oriented, &b);
    let b_size = b.len();
    let e_bound = 2 * b_size * delta as u64;
    Ok(Lemma21Report {
        b_size,
        e_count: e,
        p2_count: p2,
        e_bound,
        e_ok: b_size == 0 || e < e_bound,
        p2_ok: 2 * p2 >= k as u64 * b_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hypergraph3;

    fn vs(ids: &[u32]) -> VertexSet {
        ids.iter().copied().collect()
    }

    #[test]
    fn count_points_examples() {
        let k6 = Hypergraph3::complete(6);
        let v = VertexSet::full(6);
        assert_eq!(count_points(&k6, &v, &v, &v), 6 * 5 * 4);
        assert_eq!(count_points(&k6, &VertexSet::new(), &v, &v), 0);

        let h = Hypergraph3::build_from_triples(3, vec![[0, 1, 2]]).unwrap();
        assert_eq!(count_points(&h, &vs(&[0]), &vs(&[1]), &vs(&[2])), 1);
        assert_eq!(count_points(&h, &vs(&[0]), &vs(&[0]), &VertexSet::full(3)), 0);
    }

    #[test]
    fn count_cherry_examples() {
        let n = 5;
        let kn = Hypergraph3::complete(n);
        let all = PairSet::all_over(n, &VertexSet::full(n));
        let (e, p2) = count_cherry(&kn, &all, &all);
        assert_eq!(p2, (n * n * n) as u64);
        assert_eq!(e, (n * (n - 1) * (n - 2)) as u64);

        let empty = PairSet::new(n);
        assert_eq!(count_cherry(&kn, &empty, &all), (0, 0));

        let h = Hypergraph3::build_from_triples(3, vec![[0, 1, 2]]).unwrap();
        let g1 = PairSet::from_pairs(3, [(0, 1)]);
        let g2 = PairSet::from_pairs(3, [(1, 2)]);
        assert_eq!(count_cherry(&h, &g1, &g2), (1, 1));
    }

    #[test]
    fn count_edge_examples() {
        let n = 5;
        let kn = Hypergraph3::complete(n);
        let mut p = PairSet::new(n);
        for u in 0..n as u32 {
            for v in 0..n as u32 {
                if u != v {
                    p.insert(u, v);
                }
            }
        }
        let (e, pat) = count_edge(&kn, &p, &VertexSet::full(n));
        assert_eq!(e, (n * (n - 1) * (n - 2)) as u64);
        assert_eq!(pat, (n * (n - 1) * n) as u64);

        assert_eq!(count_edge(&kn, &p, &VertexSet::new()), (0, 0));

        let h = Hypergraph3::build_from_triples(3, vec![[0, 1, 2]]).unwrap();
        let p = PairSet::from_pairs(3, [(0, 1)]);
        assert_eq!(count_edge(&h, &p, &vs(&[2, 0])), (1, 2));
    }

    #[test]
    fn count_set_examples() {
        let k6 = Hypergraph3::complete(6);
        assert_eq!(count_set(&k6, &vs(&[0, 2, 3, 5])), 4);
        assert_eq!(count_set(&k6, &vs(&[1, 4])), 0);
    }

    #[test]
    fn audit_complete_and_empty() {
        let k10 = Hypergraph3::complete(10);
        let r = density_audit(&k10, 1.0, Notion::Set, Strategy::Exhaustive, &AuditCaps::default())
            .unwrap();
        assert_eq!(r.rho_hat, 0.0);

        // empty graph on 9 vertices, d = 1/2: worst X is everything
        let h = Hypergraph3::empty(9);
        let r = density_audit(&h, 0.5, Notion::Set, Strategy::Exhaustive, &AuditCaps::default())
            .unwrap();
        let expect = 0.5 * 84.0 / 729.0;
        assert!((r.rho_hat - expect).abs() < 1e-12);
        match &r.worst_witness {
            Witness::Set { x } => assert_eq!(x.len(), 9),
            _ => panic!("wrong witness shape"),
        }
    }

    #[test]
    fn exhaustive_cap_enforced() {
        let h = Hypergraph3::complete(13);
        let err =
            density_audit(&h, 0.5, Notion::Points, Strategy::Exhaustive, &AuditCaps::default());
        assert!(matches!(err, Err(Error::ExhaustiveCap { .. })));
    }

    #[test]
    fn sampled_deterministic() {
        let h = crate::gen::gen_random(20, 0.5, 3);
        let s = Strategy::Sampled { count: 64, seed: 9 };
        let a = density_audit(&h, 0.5, Notion::Points, s, &AuditCaps::default()).unwrap();
        let b = density_audit(&h, 0.5, Notion::Points, s, &AuditCaps::default()).unwrap();
        assert_eq!(a.rho_hat, b.rho_hat);
        assert!(a.rho_hat >= 0.0);
    }

    #[test]
    fn lemma21_complete_example() {
        let h = Hypergraph3::complete(5);
        let mut g = Graph2::new(5);
        for u in 0..5u32 {
            for v in u + 1..5 {
                g.add_edge(u, v);
            }
        }
        let r = lemma21_check(&h, &g, &VertexSet::full(5), 4, 10).unwrap();
        assert_eq!(r.b_size, 20);
        assert_eq!(r.e_count, 60);
        assert_eq!(r.p2_count, 80);
        assert!(r.e_ok && r.p2_ok);
    }

    #[test]
    fn lemma21_delta_zero_vacuous() {
        let h = Hypergraph3::complete(5);
        let mut g = Graph2::new(5);
        g.add_edge(0, 1);
        let cover = vs(&[0]);
        let r = lemma21_check(&h, &g, &cover, 1, 0).unwrap();
        assert_eq!(r.b_size, 0);
        assert!(r.e_ok && r.p2_ok);
    }
}
