//! Bit-indexed vertex sets. Codegree and pattern counting dominate the
//! runtime of everything downstream, so membership, intersection and
//! popcount all work a 64-bit block at a time.

use std::fmt;

/// A set of vertex ids backed by 64-bit blocks. Blocks past the end of the
/// vector are implicitly zero, so an empty `VertexSet` allocates nothing.
#[derive(Clone, Default, Eq)]
pub struct VertexSet {
    blocks: Vec<u64>,
}

impl VertexSet {
    pub fn new() -> Self {
        Self { blocks: Vec::new() }
    }

    /// The set {0, 1, ..., n-1}.
    pub fn full(n: usize) -> Self {
        let nb = (n + 63) / 64;
        let mut blocks = vec![!0u64; nb];
        if n % 64 != 0 {
            if let Some(last) = blocks.last_mut() {
                *last = (1u64 << (n % 64)) - 1;
            }
        }
        if n == 0 {
            blocks.clear();
        }
        Self { blocks }
    }

    #[inline]
    fn loc(v: u32) -> (usize, u64) {
        ((v / 64) as usize, 1u64 << (v % 64))
    }

    /// Inserts `v`; returns true if it was not already present.
    pub fn insert(&mut self, v: u32) -> bool {
        let (b, m) = Self::loc(v);
        if b >= self.blocks.len() {
            self.blocks.resize(b + 1, 0);
        }
        let had = self.blocks[b] & m != 0;
        self.blocks[b] |= m;
        !had
    }

    pub fn remove(&mut self, v: u32) -> bool {
        let (b, m) = Self::loc(v);
        if b >= self.blocks.len() {
            return false;
        }
        let had = self.blocks[b] & m != 0;
        self.blocks[b] &= !m;
        had
    }

    #[inline]
    pub fn contains(&self, v: u32) -> bool {
        let (b, m) = Self::loc(v);
        b < self.blocks.len() && self.blocks[b] & m != 0
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn clear(&mut self) {
        self.blocks.clear();
    }

    /// Smallest member, if any.
    pub fn first(&self) -> Option<u32> {
        for (i, &b) in self.blocks.iter().enumerate() {
            if b != 0 {
                return Some((i * 64) as u32 + b.trailing_zeros());
            }
        }
        None
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter { blocks: &self.blocks, idx: 0, cur: self.blocks.first().copied().unwrap_or(0) }
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let n = self.blocks.len().min(other.blocks.len());
        let blocks = (0..n).map(|i| self.blocks[i] & other.blocks[i]).collect();
        Self { blocks }
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        let n = self.blocks.len().min(other.blocks.len());
        (0..n).map(|i| (self.blocks[i] & other.blocks[i]).count_ones() as usize).sum()
    }

    /// self \ other.
    pub fn difference(&self, other: &Self) -> Self {
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, &b)| b & !other.blocks.get(i).copied().unwrap_or(0))
            .collect();
        Self { blocks }
    }

    pub fn union_with(&mut self, other: &Self) {
        if other.blocks.len() > self.blocks.len() {
            self.blocks.resize(other.blocks.len(), 0);
        }
        for (i, &b) in other.blocks.iter().enumerate() {
            self.blocks[i] |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &Self) {
        for (i, b) in self.blocks.iter_mut().enumerate() {
            *b &= other.blocks.get(i).copied().unwrap_or(0);
        }
    }

    pub fn remove_all(&mut self, other: &Self) {
        let n = self.blocks.len().min(other.blocks.len());
        for i in 0..n {
            self.blocks[i] &= !other.blocks[i];
        }
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        let n = self.blocks.len().min(other.blocks.len());
        (0..n).all(|i| self.blocks[i] & other.blocks[i] == 0)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.blocks
            .iter()
            .enumerate()
            .all(|(i, &b)| b & !other.blocks.get(i).copied().unwrap_or(0) == 0)
    }

    /// Keeps each member independently with probability 1/2, a block at a time.
    pub fn random_subset<R: rand::Rng>(&self, rng: &mut R) -> Self {
        let blocks = self.blocks.iter().map(|&b| b & rng.gen::<u64>()).collect();
        Self { blocks }
    }
}

impl PartialEq for VertexSet {
    fn eq(&self, other: &Self) -> bool {
        let n = self.blocks.len().max(other.blocks.len());
        (0..n).all(|i| {
            self.blocks.get(i).copied().unwrap_or(0) == other.blocks.get(i).copied().unwrap_or(0)
        })
    }
}

impl FromIterator<u32> for VertexSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        let mut s = Self::new();
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl Extend<u32> for VertexSet {
    fn extend<I: IntoIterator<Item = u32>>(&mut self, iter: I) {
        for v in iter {
            self.insert(v);
        }
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = u32;
    type IntoIter = Iter<'a>;
    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct Iter<'a> {
    blocks: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Iter<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        while self.cur == 0 {
            self.idx += 1;
            if self.idx >= self.blocks.len() {
                return None;
            }
            self.cur = self.blocks[self.idx];
        }
        let t = self.cur.trailing_zeros();
        self.cur &= self.cur - 1;
        Some((self.idx * 64) as u32 + t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_iter_roundtrip() {
        let mut s = VertexSet::new();
        for v in [5u32, 1, 63, 64, 200] {
            assert!(s.insert(v));
        }
        assert!(!s.insert(64));
        assert_eq!(s.to_vec(), vec![1, 5, 63, 64, 200]);
        assert_eq!(s.len(), 5);
        assert_eq!(s.first(), Some(1));
    }

    #[test]
    fn full_and_ops() {
        let a = VertexSet::full(70);
        assert_eq!(a.len(), 70);
        let b: VertexSet = [0u32, 69, 100].into_iter().collect();
        assert_eq!(a.intersection_len(&b), 2);
        assert_eq!(a.difference(&b).len(), 68);
        assert!(!a.is_disjoint(&b));
        let mut c = b.clone();
        c.remove_all(&a);
        assert_eq!(c.to_vec(), vec![100]);
    }

    #[test]
    fn eq_ignores_trailing_zero_blocks() {
        let mut a = VertexSet::new();
        a.insert(3);
        let mut b = VertexSet::new();
        b.insert(200);
        b.remove(200);
        b.insert(3);
        assert_eq!(a, b);
    }
}
