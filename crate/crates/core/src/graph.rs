//! Simple undirected 2-graphs with bitset adjacency. Used for link graphs,
//! the cascade layers, and the low-codegree-pair counting checks.

use crate::bits::VertexSet;
use rand::Rng;

#[derive(Clone, Debug)]
pub struct Graph2 {
    n: usize,
    adj: Vec<VertexSet>,
    m: usize,
}

impl Graph2 {
    pub fn new(n: usize) -> Self {
        Self { n, adj: vec![VertexSet::new(); n], m: 0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    /// Adds {u, v}; loops and duplicates are ignored.
    pub fn add_edge(&mut self, u: u32, v: u32) {
        if u == v {
            return;
        }
        if self.adj[u as usize].insert(v) {
            self.adj[v as usize].insert(u);
            self.m += 1;
        }
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        u != v && self.adj[u as usize].contains(v)
    }

    pub fn neighbors(&self, v: u32) -> &VertexSet {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    /// Edges as sorted (u, v) with u < v.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n as u32 {
            for v in self.adj[u as usize].iter() {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Vertices of nonzero degree.
    pub fn support(&self) -> VertexSet {
        (0..self.n as u32).filter(|&v| !self.adj[v as usize].is_empty()).collect()
    }

    /// G(n, p) with the given RNG; each pair independently.
    pub fn random<R: Rng>(n: usize, p: f64, rng: &mut R) -> Self {
        let mut g = Self::new(n);
        for v in 1..n as u32 {
            for u in 0..v {
                if rng.gen::<f64>() < p {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    /// Number of homomorphisms of the 4-vertex path into this graph,
    /// i.e. walks of length 3: 1' A^3 1.
    pub fn hom_count_p4(&self) -> u128 {
        let deg: Vec<u64> = (0..self.n).map(|v| self.adj[v].len() as u64).collect();
        let mut w2 = vec![0u128; self.n];
        for v in 0..self.n {
            w2[v] = self.adj[v].iter().map(|u| deg[u as usize] as u128).sum();
        }
        let mut total = 0u128;
        for v in 0..self.n {
            total += self.adj[v].iter().map(|u| w2[u as usize]).sum::<u128>();
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut g = Graph2::new(4);
        g.add_edge(0, 1);
        g.add_edge(1, 0);
        g.add_edge(1, 1);
        g.add_edge(2, 3);
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge(1, 0));
        assert_eq!(g.edges(), vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn hom_p4_on_small_graphs() {
        // Single edge: walks of length 3 = 2 (back and forth each way).
        let mut g = Graph2::new(2);
        g.add_edge(0, 1);
        assert_eq!(g.hom_count_p4(), 2);

        // Triangle: every step has 2 choices from any vertex: 3 * 2^3 = 24.
        let mut t = Graph2::new(3);
        t.add_edge(0, 1);
        t.add_edge(1, 2);
        t.add_edge(0, 2);
        assert_eq!(t.hom_count_p4(), 24);
    }
}
