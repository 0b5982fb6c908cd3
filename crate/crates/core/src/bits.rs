//! Fixed-universe bitsets backing adjacency rows and all derived vertex
//! classes. Co-degree queries reduce to word-wise AND + popcount, which is
//! what the embedding inner loops spend their time on.

use std::fmt;

const WORD_BITS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    universe: usize,
    words: Vec<u64>,
}

#[inline]
fn word_count(universe: usize) -> usize {
    universe.div_ceil(WORD_BITS)
}

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        VertexSet {
            universe,
            words: vec![0; word_count(universe)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = VertexSet {
            universe,
            words: vec![!0u64; word_count(universe)],
        };
        s.mask_tail();
        s
    }

    pub fn singleton(universe: usize, v: usize) -> Self {
        let mut s = Self::empty(universe);
        s.insert(v);
        s
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(universe: usize, iter: I) -> Self {
        let mut s = Self::empty(universe);
        for v in iter {
            s.insert(v);
        }
        s
    }

    /// Zero out bits at positions >= universe in the last word.
    #[inline]
    fn mask_tail(&mut self) {
        let rem = self.universe % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        debug_assert!(v < self.universe);
        self.words[v / WORD_BITS] >> (v % WORD_BITS) & 1 == 1
    }

    /// Returns true if the vertex was newly inserted.
    pub fn insert(&mut self, v: usize) -> bool {
        assert!(
            v < self.universe,
            "vertex {v} outside universe {}",
            self.universe
        );
        let w = &mut self.words[v / WORD_BITS];
        let bit = 1u64 << (v % WORD_BITS);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    pub fn remove(&mut self, v: usize) -> bool {
        assert!(v < self.universe);
        let w = &mut self.words[v / WORD_BITS];
        let bit = 1u64 << (v % WORD_BITS);
        let present = *w & bit != 0;
        *w &= !bit;
        present
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Smallest member, if any.
    pub fn min(&self) -> Option<usize> {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(i * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn subtract(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.subtract(other);
        s
    }

    pub fn complement(&self) -> VertexSet {
        let mut s = VertexSet {
            universe: self.universe,
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.mask_tail();
        s
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        debug_assert_eq!(self.universe, other.universe);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl<'a> Iterator for Iter<'a> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.current == 0 {
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(self.word_idx * WORD_BITS + bit)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_contains_remove() {
        let mut s = VertexSet::empty(130);
        assert!(s.insert(0));
        assert!(s.insert(129));
        assert!(!s.insert(129));
        assert!(s.contains(0));
        assert!(s.contains(129));
        assert!(!s.contains(64));
        assert_eq!(s.len(), 2);
        assert!(s.remove(0));
        assert!(!s.remove(0));
        assert_eq!(s.to_vec(), vec![129]);
    }

    #[test]
    fn full_and_complement_mask_the_tail() {
        let s = VertexSet::full(70);
        assert_eq!(s.len(), 70);
        let c = s.complement();
        assert!(c.is_empty());
        let e = VertexSet::empty(70);
        assert_eq!(e.complement().len(), 70);
    }

    #[test]
    fn set_algebra() {
        let a = VertexSet::from_iter(10, [1, 3, 5, 7]);
        let b = VertexSet::from_iter(10, [3, 4, 5]);
        assert_eq!(a.intersection(&b).to_vec(), vec![3, 5]);
        assert_eq!(a.difference(&b).to_vec(), vec![1, 7]);
        assert_eq!(a.intersection_len(&b), 2);
        assert!(!a.is_disjoint(&b));
        assert!(VertexSet::from_iter(10, [3, 5]).is_subset(&a));
        assert_eq!(a.min(), Some(1));
        assert_eq!(VertexSet::empty(10).min(), None);
    }

    #[test]
    fn iter_crosses_word_boundaries() {
        let vals = vec![0, 63, 64, 65, 127, 128];
        let s = VertexSet::from_iter(200, vals.iter().copied());
        assert_eq!(s.to_vec(), vals);
    }
}
