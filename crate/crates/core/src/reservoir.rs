//! Reservoir sampling: a uniform vertex set, disjoint from the absorbing
//! path, certified to retain a floor of every relevant pair's filtered
//! coneighbourhood. The probabilistic guarantee is replaced by exact
//! verification with resampling.

use crate::bits::VertexSet;
use crate::error::{Error, Result};
use crate::hypergraph::{BetaFiltered, Hypergraph3};
use crate::rng::{self, substream};
use rand::Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Reservoir {
    pub members: Vec<u32>,
    pub nu: f64,
    /// Exact min over relevant pairs of |N_beta(x, y) ∩ R|.
    pub certified_min: usize,
    pub retries_used: usize,
}

impl Reservoir {
    pub fn vertex_set(&self) -> VertexSet {
        self.members.iter().copied().collect()
    }
}

/// Partial Fisher-Yates: the first k entries after k steps form a uniform
/// k-subset, and a longer prefix under the same stream extends a shorter one.
fn sample_prefix<R: Rng>(pool: &mut [u32], k: usize, rng: &mut R) {
    for i in 0..k {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
    }
}

/// Draws R of size ceil(nu * n) from V \ excluded, uniformly, and verifies
/// |N_{H_beta}(x, y) ∩ R| >= beta * nu * n / 4 for every beta-relevant pair.
/// Resamples (fresh substream per retry) until certified.
pub fn sample_reservoir(
    h: &Hypergraph3,
    beta: f64,
    nu: f64,
    excluded: &VertexSet,
    seed: u64,
    max_retries: usize,
) -> Result<Reservoir> {
    let filtered = h.filter_beta(beta);
    sample_reservoir_in(h, &filtered, beta, nu, excluded, seed, max_retries)
}

pub fn sample_reservoir_in(
    h: &Hypergraph3,
    filtered: &BetaFiltered,
    beta: f64,
    nu: f64,
    excluded: &VertexSet,
    seed: u64,
    max_retries: usize,
) -> Result<Reservoir> {
    let n = h.vertex_count();
    let k = (nu * n as f64).ceil() as usize;
    let pool_base: Vec<u32> = h.active().difference(excluded).to_vec();
    if excluded.intersection_len(h.active()) * 4 >= n {
        return Err(Error::Precondition(format!(
            "excluded set has {} vertices, needs fewer than n/4 = {}",
            excluded.intersection_len(h.active()),
            n as f64 / 4.0
        )));
    }
    if k > pool_base.len() {
        return Err(Error::Precondition(format!(
            "reservoir of {k} cannot fit in {} available vertices",
            pool_base.len()
        )));
    }
    if filtered.relevant.is_empty() {
        return Err(Error::Precondition(
            "no relevant pairs: the filtered graph is trivial".into(),
        ));
    }
    let floor = beta * nu * n as f64 / 4.0;
    let mut worst: Option<((u32, u32), usize)> = None;
    for retry in 0..=max_retries {
        let mut pool = pool_base.clone();
        let mut rng = substream(seed, rng::DOMAIN_RESERVOIR, retry as u64);
        sample_prefix(&mut pool, k, &mut rng);
        let members: VertexSet = pool[..k].iter().copied().collect();
        let mut min_seen = usize::MAX;
        let mut min_pair = None;
        for &(x, y) in &filtered.relevant {
            let c = filtered.graph.coneighbors(x, y).intersection_len(&members);
            if c < min_seen {
                min_seen = c;
                min_pair = Some((x, y));
            }
        }
        if (min_seen as f64) >= floor {
            let mut sorted = pool[..k].to_vec();
            sorted.sort_unstable();
            return Ok(Reservoir {
                members: sorted,
                nu,
                certified_min: min_seen,
                retries_used: retry,
            });
        }
        worst = Some((min_pair.unwrap(), min_seen));
    }
    let ((x, y), got) = worst.unwrap();
    Err(Error::RetriesExhausted(format!(
        "reservoir floor {floor:.2} unmet: pair ({x}, {y}) keeps only {got}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_any_reservoir_works() {
        let h = Hypergraph3::complete(30);
        let r = sample_reservoir(&h, 0.5, 0.3, &VertexSet::new(), 1, 0).unwrap();
        assert_eq!(r.members.len(), 9);
        assert_eq!(r.retries_used, 0);
        // |N ∩ R| >= |R| - 2 >= floor = 0.5*0.3*30/4
        assert!(r.certified_min >= 7);
    }

    #[test]
    fn preconditions() {
        let h = Hypergraph3::complete(12);
        let too_big: VertexSet = (0..4u32).collect();
        assert!(sample_reservoir(&h, 0.5, 0.3, &too_big, 1, 0).is_err());
        assert!(sample_reservoir(&h, 0.5, 0.95, &(0..2u32).collect(), 1, 0).is_err());
        let empty = Hypergraph3::empty(12);
        assert!(sample_reservoir(&empty, 0.5, 0.3, &VertexSet::new(), 1, 0).is_err());
    }

    #[test]
    fn certified_min_recomputes_exactly() {
        let h = crate::gen::gen_random(50, 0.5, 11);
        let excluded: VertexSet = (0..5u32).collect();
        let beta = 0.2;
        let r = sample_reservoir(&h, beta, 0.25, &excluded, 11, 5).unwrap();
        let members = r.vertex_set();
        assert!(members.is_disjoint(&excluded));
        let filtered = h.filter_beta(beta);
        let recomputed = filtered
            .relevant
            .iter()
            .map(|&(x, y)| filtered.graph.coneighbors(x, y).intersection_len(&members))
            .min()
            .unwrap();
        assert_eq!(recomputed, r.certified_min);
    }

    #[test]
    fn determinism_and_prefix_monotonicity() {
        let h = crate::gen::gen_random(40, 0.5, 3);
        let a = sample_reservoir(&h, 0.1, 0.4, &VertexSet::new(), 9, 5).unwrap();
        let b = sample_reservoir(&h, 0.1, 0.4, &VertexSet::new(), 9, 5).unwrap();
        assert_eq!(a.members, b.members);
        // a larger nu under the same stream extends the smaller reservoir
        let big = sample_reservoir(&h, 0.1, 0.5, &VertexSet::new(), 9, 5).unwrap();
        if a.retries_used == 0 && big.retries_used == 0 {
            let small = a.vertex_set();
            assert!(small.is_subset(&big.vertex_set()));
        }
    }
}
