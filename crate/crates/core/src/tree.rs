//! Rooted guest trees: parent/children structure plus the degree, leaf, and
//! ordering queries the embedding phases are built on.

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct RootedTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    degree: Vec<usize>,
    root: usize,
}

impl RootedTree {
    /// Builds from a full parent table; exactly one entry must be `None`.
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::InvalidTree(
                "tree must have at least one vertex".into(),
            ));
        }
        let mut root = None;
        let mut children = vec![Vec::new(); n];
        for (v, &p) in parent.iter().enumerate() {
            match p {
                None => {
                    if root.replace(v).is_some() {
                        return Err(Error::InvalidTree("multiple roots".into()));
                    }
                }
                Some(p) => {
                    if p >= n {
                        return Err(Error::InvalidTree(format!(
                            "parent {p} of vertex {v} out of range"
                        )));
                    }
                    if p == v {
                        return Err(Error::InvalidTree(format!("vertex {v} is its own parent")));
                    }
                    children[p].push(v);
                }
            }
        }
        let root = root.ok_or_else(|| Error::InvalidTree("no root".into()))?;
        // Reachability from the root certifies acyclicity (n-1 parent edges).
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &c in &children[v] {
                if !seen[c] {
                    seen[c] = true;
                    count += 1;
                    stack.push(c);
                }
            }
        }
        if count != n {
            return Err(Error::InvalidTree("parent table contains a cycle".into()));
        }
        let degree = (0..n)
            .map(|v| children[v].len() + usize::from(parent[v].is_some()))
            .collect();
        Ok(RootedTree {
            parent,
            children,
            degree,
            root,
        })
    }

    /// Orients an undirected edge list away from `root`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], root: usize) -> Result<Self> {
        if n == 0 || root >= n {
            return Err(Error::InvalidTree("bad root".into()));
        }
        if edges.len() != n - 1 {
            return Err(Error::InvalidTree(format!(
                "tree on {n} vertices needs {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidTree(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidTree(format!("self-loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidTree("edge list is not connected".into()));
        }
        Self::from_parents(parent)
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    /// `k`: the number of edges.
    #[inline]
    pub fn edge_count(&self) -> usize {
        self.parent.len() - 1
    }

    #[inline]
    pub fn root(&self) -> usize {
        self.root
    }

    #[inline]
    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    #[inline]
    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Unrooted degree.
    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.degree[v]
    }

    /// Parent (if any) followed by children.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.parent[v]
            .into_iter()
            .chain(self.children[v].iter().copied())
    }

    /// Degree-1 vertices, root included.
    pub fn leaf_count(&self) -> usize {
        self.degree.iter().filter(|&&d| d == 1).count()
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertex_count()).filter(|&v| self.degree[v] == 1)
    }

    /// Vertices in BFS order from the root; parents precede children.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.vertex_count());
        let mut queue = std::collections::VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            queue.extend(self.children[v].iter().copied());
        }
        order
    }

    /// Undirected edges `(min, max)` sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = (0..self.vertex_count())
            .filter_map(|v| self.parent[v].map(|p| (p.min(v), p.max(v))))
            .collect();
        out.sort_unstable();
        out
    }

    /// Subtree sizes with respect to the current root.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let order = self.bfs_order();
        let mut size = vec![1usize; self.vertex_count()];
        for &v in order.iter().rev() {
            if let Some(p) = self.parent[v] {
                size[p] += size[v];
            }
        }
        size
    }

    /// A centroid: minimizes the largest component left by its removal.
    /// Ties broken by lowest id.
    pub fn centroid(&self) -> usize {
        let n = self.vertex_count();
        let size = self.subtree_sizes();
        let mut best = (usize::MAX, 0);
        for v in 0..n {
            let mut worst = n - size[v];
            for &c in &self.children[v] {
                worst = worst.max(size[c]);
            }
            if worst < best.0 {
                best = (worst, v);
            }
        }
        best.1
    }

    /// Same tree re-rooted at `new_root`.
    pub fn rerooted(&self, new_root: usize) -> RootedTree {
        RootedTree::from_edges(self.vertex_count(), &self.edges(), new_root)
            .expect("re-rooting a valid tree")
    }
}

impl std::fmt::Debug for RootedTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "RootedTree(n={}, root={})",
            self.vertex_count(),
            self.root
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(k: usize) -> RootedTree {
        RootedTree::from_parents((0..=k).map(|v| v.checked_sub(1)).collect()).unwrap()
    }

    #[test]
    fn path_structure() {
        let t = path(7);
        assert_eq!(t.vertex_count(), 8);
        assert_eq!(t.edge_count(), 7);
        assert_eq!(t.leaf_count(), 2);
        assert_eq!(t.degree(0), 1);
        assert_eq!(t.degree(3), 2);
        assert_eq!(t.centroid(), 3);
    }

    #[test]
    fn star_structure() {
        let t = RootedTree::from_parents(vec![None, Some(0), Some(0), Some(0)]).unwrap();
        assert_eq!(t.leaf_count(), 3);
        assert_eq!(t.degree(0), 3);
        assert_eq!(t.centroid(), 0);
        assert_eq!(t.bfs_order(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn degree_sum_is_twice_edges() {
        let t = path(9);
        let total: usize = (0..t.vertex_count()).map(|v| t.degree(v)).sum();
        assert_eq!(total, 2 * t.edge_count());
    }

    #[test]
    fn rejects_cycle_and_multiroot() {
        assert!(RootedTree::from_parents(vec![None, Some(2), Some(1)]).is_err());
        assert!(RootedTree::from_parents(vec![None, None, Some(0)]).is_err());
    }

    #[test]
    fn from_edges_roundtrip() {
        let edges = [(0, 1), (1, 2), (1, 3), (3, 4)];
        let t = RootedTree::from_edges(5, &edges, 3).unwrap();
        assert_eq!(t.root(), 3);
        assert_eq!(t.parent(1), Some(3));
        assert_eq!(t.edges(), vec![(0, 1), (1, 2), (1, 3), (3, 4)]);
        let r = t.rerooted(0);
        assert_eq!(r.edges(), t.edges());
        assert_eq!(r.root(), 0);
    }

    #[test]
    fn disconnected_edge_list_rejected() {
        assert!(RootedTree::from_edges(4, &[(0, 1), (0, 1), (2, 3)], 0).is_err());
    }
}
