//! Immutable simple undirected graphs with bitset adjacency rows.

use num_rational::Ratio;

use crate::bits::VertexSet;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<VertexSet>,
    m: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: (0..n).map(|_| VertexSet::empty(n)).collect(),
            m: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut adj = Vec::with_capacity(n);
        for v in 0..n {
            let mut row = VertexSet::full(n);
            row.remove(v);
            adj.push(row);
        }
        Graph {
            n,
            adj,
            m: n * n.saturating_sub(1) / 2,
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge_mut(u, v)?;
        }
        Ok(g)
    }

    /// Builder step; duplicate edges are idempotent.
    fn add_edge_mut(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        for w in [u, v] {
            if w >= self.n {
                return Err(Error::VertexOutOfRange {
                    vertex: w,
                    n: self.n,
                });
            }
        }
        if self.adj[u].insert(v) {
            self.adj[v].insert(u);
            self.m += 1;
        }
        Ok(())
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    /// Sorted edge list with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n {
            for v in self.adj[u].iter() {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// `d(G) = 2m/n` as an exact rational. The conjecture's hypothesis is a
    /// strict inequality at the extremal boundary, so no floating point here.
    pub fn average_degree(&self) -> Result<Ratio<u64>> {
        if self.n == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(Ratio::new(2 * self.m as u64, self.n as u64))
    }

    /// `d(G) > k - 1`, exactly: `2m > n(k-1)`.
    pub fn hypothesis_holds(&self, k: usize) -> bool {
        2 * self.m as u128 > self.n as u128 * k.saturating_sub(1) as u128
    }

    /// `N(u) ∩ N(v) ∩ restrict` for distinct `u`, `v`.
    pub fn common_neighbors(&self, u: usize, v: usize, restrict: &VertexSet) -> Result<VertexSet> {
        if u == v {
            return Err(Error::IdenticalVertices(u));
        }
        for w in [u, v] {
            if w >= self.n {
                return Err(Error::VertexOutOfRange {
                    vertex: w,
                    n: self.n,
                });
            }
        }
        let mut s = self.adj[u].clone();
        s.intersect_with(&self.adj[v]);
        s.intersect_with(restrict);
        Ok(s)
    }

    /// Degree of `v` counting only neighbours inside `mask`.
    pub fn degree_in(&self, v: usize, mask: &VertexSet) -> usize {
        self.adj[v].intersection_len(mask)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// Minimum degree of the subgraph induced by `mask`.
    pub fn min_degree_in(&self, mask: &VertexSet) -> usize {
        mask.iter()
            .map(|v| self.degree_in(v, mask))
            .min()
            .unwrap_or(0)
    }

    /// Materializes the induced subgraph on `mask`. Returns the subgraph and
    /// the list mapping new ids to original ids (ascending).
    pub fn induced(&self, mask: &VertexSet) -> (Graph, Vec<usize>) {
        let ids = mask.to_vec();
        let mut back = vec![usize::MAX; self.n];
        for (new, &old) in ids.iter().enumerate() {
            back[old] = new;
        }
        let mut g = Graph::empty(ids.len());
        for (new_u, &old_u) in ids.iter().enumerate() {
            for old_v in self.adj[old_u].intersection(mask).iter() {
                if old_v > old_u {
                    g.add_edge_mut(new_u, back[old_v]).expect("induced edge");
                }
            }
        }
        (g, ids)
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n, self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng as _, SeedableRng as _};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn average_degree_complete() {
        let g = Graph::complete(4);
        assert_eq!(g.average_degree().unwrap(), Ratio::from_integer(3));
    }

    #[test]
    fn average_degree_empty_edges() {
        let g = Graph::empty(5);
        assert_eq!(g.average_degree().unwrap(), Ratio::from_integer(0));
    }

    #[test]
    fn average_degree_rejects_empty_graph() {
        assert!(matches!(
            Graph::empty(0).average_degree(),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn two_disjoint_k5_sit_exactly_on_the_boundary() {
        // d(G) = 4 = k-1 for k = 5: hypothesis fails, strictly.
        let mut edges = Vec::new();
        for base in [0, 5] {
            for i in 0..5 {
                for j in (i + 1)..5 {
                    edges.push((base + i, base + j));
                }
            }
        }
        let g = Graph::from_edges(10, &edges).unwrap();
        assert_eq!(g.average_degree().unwrap(), Ratio::from_integer(4));
        assert!(!g.hypothesis_holds(5));
        assert!(g.hypothesis_holds(4));
    }

    #[test]
    fn common_neighbors_complete_and_cycle() {
        let k5 = Graph::complete(5);
        let all = VertexSet::full(5);
        assert_eq!(
            k5.common_neighbors(0, 1, &all).unwrap().to_vec(),
            vec![2, 3, 4]
        );
        let c5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let all = VertexSet::full(5);
        assert!(c5.common_neighbors(0, 1, &all).unwrap().is_empty());
        assert!(matches!(
            c5.common_neighbors(2, 2, &all),
            Err(Error::IdenticalVertices(2))
        ));
    }

    #[test]
    fn common_neighbors_matches_naive_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 12;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(0.9) {
                    edges.push((i, j));
                }
            }
        }
        let g = Graph::from_edges(n, &edges).unwrap();
        let restrict = VertexSet::from_iter(n, (0..n).filter(|v| v % 3 != 0));
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                let fast = g.common_neighbors(u, v, &restrict).unwrap().to_vec();
                let mut naive = Vec::new();
                for w in 0..n {
                    if w != u
                        && w != v
                        && restrict.contains(w)
                        && edges.iter().any(|&(a, b)| (a, b) == (u.min(w), u.max(w)))
                        && edges.iter().any(|&(a, b)| (a, b) == (v.min(w), v.max(w)))
                    {
                        naive.push(w);
                    }
                }
                assert_eq!(fast, naive, "u={u} v={v}");
            }
        }
    }

    #[test]
    fn induced_subgraph_keeps_edges() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let mask = VertexSet::from_iter(5, [0, 1, 2, 4]);
        let (sub, ids) = g.induced(&mask);
        assert_eq!(ids, vec![0, 1, 2, 4]);
        assert_eq!(sub.edge_count(), 3); // (0,1), (1,2), (0,4)
        assert!(sub.has_edge(0, 1));
        assert!(sub.has_edge(1, 2));
        assert!(sub.has_edge(0, 3)); // 4 became local 3
    }

    #[test]
    fn rejects_self_loops_and_range() {
        assert!(matches!(
            Graph::from_edges(3, &[(1, 1)]),
            Err(Error::SelfLoop(1))
        ));
        assert!(matches!(
            Graph::from_edges(3, &[(0, 3)]),
            Err(Error::VertexOutOfRange { vertex: 3, n: 3 })
        ));
    }

    proptest! {
        #[test]
        fn degree_sum_is_twice_edge_count(n in 1usize..24, seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i+1)..n {
                    if rng.gen_bool(0.4) {
                        edges.push((i, j));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let total: usize = (0..n).map(|v| g.degree(v)).sum();
            prop_assert_eq!(total, 2 * g.edge_count());
        }

        #[test]
        fn common_neighbors_symmetric_and_monotone(seed in 0u64..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 10;
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i+1)..n {
                    if rng.gen_bool(0.5) {
                        edges.push((i, j));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let small = VertexSet::from_iter(n, (0..n).filter(|_| rng.gen_bool(0.5)));
            let mut large = small.clone();
            large.union_with(&VertexSet::from_iter(n, (0..n).filter(|_| rng.gen_bool(0.5))));
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            prop_assume!(u != v);
            let ab = g.common_neighbors(u, v, &small).unwrap();
            let ba = g.common_neighbors(v, u, &small).unwrap();
            prop_assert_eq!(ab.to_vec(), ba.to_vec());
            let wider = g.common_neighbors(u, v, &large).unwrap();
            prop_assert!(ab.is_subset(&wider));
            // inclusion-exclusion lower bound
            let lower = (g.degree_in(u, &small) + g.degree_in(v, &small)).saturating_sub(small.len());
            prop_assert!(ab.len() >= lower);
        }
    }
}
