//! Canonical enumeration of small graphs and trees, and the exhaustive
//! conjecture verifier built on top of the exact oracle.
//!
//! Graphs on up to 7 vertices are enumerated up to isomorphism by inductive
//! vertex augmentation with min-permutation canonical forms. Larger orders
//! (8..=10 are accepted, 8 is practical) fall back to raw upper-triangle
//! enumeration without isomorphism rejection. Trees come from Prüfer
//! sequences, deduplicated by a centroid-rooted canonical encoding.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::oracle::{contains_tree_exact, Containment};
use crate::params::ParameterSet;
use crate::tree::RootedTree;

const MAX_CANONICAL_N: usize = 7;

/// Upper-triangle bit position of pair (i, j), i < j, row-major.
#[inline]
fn pair_pos(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut items: Vec<u8> = (0..n as u8).collect();
    fn heap(k: usize, items: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if k <= 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k.is_multiple_of(2) {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut items, &mut out);
    out
}

fn perm_tables() -> &'static Vec<Vec<Vec<u8>>> {
    static TABLES: OnceLock<Vec<Vec<Vec<u8>>>> = OnceLock::new();
    TABLES.get_or_init(|| (0..=MAX_CANONICAL_N).map(permutations).collect())
}

/// Minimum edge-mask over all vertex relabelings.
fn canonical_mask(n: usize, mask: u64) -> u64 {
    if n < 2 {
        return mask;
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let edges: Vec<(usize, usize)> = pairs
        .iter()
        .copied()
        .filter(|&(i, j)| mask >> pair_pos(n, i, j) & 1 == 1)
        .collect();
    let mut best = u64::MAX;
    for perm in &perm_tables()[n] {
        let mut m = 0u64;
        for &(i, j) in &edges {
            let (a, b) = (perm[i] as usize, perm[j] as usize);
            m |= 1 << pair_pos(n, a.min(b), a.max(b));
        }
        if m < best {
            best = m;
        }
    }
    best
}

fn mask_to_graph(n: usize, mask: u64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if mask >> pair_pos(n, i, j) & 1 == 1 {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("mask describes a simple graph")
}

/// All canonical edge-masks on exactly `n ≤ 7` vertices, cached. Built by
/// vertex augmentation: every n-vertex graph arises from some (n-1)-vertex
/// canonical graph plus a neighbourhood for the new vertex.
pub fn canonical_masks(n: usize) -> Result<&'static [u64]> {
    if n == 0 || n > MAX_CANONICAL_N {
        return Err(Error::Infeasible {
            estimate: format!(
                "canonical enumeration supports 1..={MAX_CANONICAL_N} vertices, got {n}"
            ),
        });
    }
    static CACHE: OnceLock<Vec<Vec<u64>>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        let mut per_n: Vec<Vec<u64>> = vec![vec![], vec![0u64]];
        for n in 2..=MAX_CANONICAL_N {
            let prev = per_n[n - 1].clone();
            let mut seen = std::collections::HashSet::new();
            let mut list = Vec::new();
            for &old in &prev {
                for nbhd in 0u64..(1 << (n - 1)) {
                    // re-encode old pairs in the n-vertex layout, attach vertex n-1
                    let mut mask = 0u64;
                    for i in 0..(n - 1) {
                        for j in (i + 1)..(n - 1) {
                            if old >> pair_pos(n - 1, i, j) & 1 == 1 {
                                mask |= 1 << pair_pos(n, i, j);
                            }
                        }
                        if nbhd >> i & 1 == 1 {
                            mask |= 1 << pair_pos(n, i, n - 1);
                        }
                    }
                    let canon = canonical_mask(n, mask);
                    if seen.insert(canon) {
                        list.push(canon);
                    }
                }
            }
            list.sort_unstable();
            per_n.push(list);
        }
        per_n
    });
    Ok(&all[n])
}

/// Canonical graphs on exactly `n` vertices.
pub fn enumerate_graphs(n: usize) -> Result<Vec<Graph>> {
    Ok(canonical_masks(n)?
        .iter()
        .map(|&m| mask_to_graph(n, m))
        .collect())
}

/// Centroid-rooted AHU encoding; equal encodings iff isomorphic free trees.
fn tree_canonical_code(t: &RootedTree) -> Vec<u8> {
    fn encode(t: &RootedTree, v: usize) -> Vec<u8> {
        let mut kids: Vec<Vec<u8>> = t.children(v).iter().map(|&c| encode(t, c)).collect();
        kids.sort();
        let mut out = vec![b'('];
        for k in kids {
            out.extend(k);
        }
        out.push(b')');
        out
    }
    let n = t.vertex_count();
    let sizes_root = t.subtree_sizes();
    // all vertices minimizing the largest remaining component: 1 or 2 centroids
    let mut best_score = usize::MAX;
    let mut centroids = Vec::new();
    for v in 0..n {
        let mut worst = n - sizes_root[v];
        for &c in t.children(v) {
            worst = worst.max(sizes_root[c]);
        }
        match worst.cmp(&best_score) {
            std::cmp::Ordering::Less => {
                best_score = worst;
                centroids = vec![v];
            }
            std::cmp::Ordering::Equal => centroids.push(v),
            std::cmp::Ordering::Greater => {}
        }
    }
    centroids
        .into_iter()
        .map(|c| encode(&t.rerooted(c), c))
        .min()
        .expect("tree has a centroid")
}

/// All unlabeled trees with `k` edges, each rooted at 0, via Prüfer
/// enumeration with canonical dedup. Feasible for k ≤ 7.
pub fn enumerate_trees(k: usize) -> Result<Vec<RootedTree>> {
    if k > 7 {
        return Err(Error::Infeasible {
            estimate: format!(
                "tree enumeration over (k+1)^(k-1) = {} sequences",
                (k + 1).pow(k as u32 - 1)
            ),
        });
    }
    let n = k + 1;
    if n == 1 {
        return Ok(vec![RootedTree::from_parents(vec![None])?]);
    }
    if n == 2 {
        return Ok(vec![RootedTree::from_parents(vec![None, Some(0)])?]);
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut seq = vec![0usize; n - 2];
    loop {
        let t = tree_from_prufer(&seq)?;
        if seen.insert(tree_canonical_code(&t)) {
            out.push(t);
        }
        // odometer over sequences in 0..n
        let mut i = 0;
        loop {
            if i == seq.len() {
                return Ok(out);
            }
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

/// Standard Prüfer decode; the sequence has length n-2 over labels 0..n.
pub fn tree_from_prufer(seq: &[usize]) -> Result<RootedTree> {
    let n = seq.len() + 2;
    if seq.iter().any(|&x| x >= n) {
        return Err(Error::InvalidInstance("Prüfer label out of range".into()));
    }
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..n)
        .filter(|&v| degree[v] == 1)
        .map(std::cmp::Reverse)
        .collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let std::cmp::Reverse(leaf) = heap.pop().expect("leaf available");
        edges.push((leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
        if degree[x] == 1 {
            heap.push(std::cmp::Reverse(x));
        }
    }
    let std::cmp::Reverse(u) = heap.pop().expect("two leaves remain");
    let std::cmp::Reverse(v) = heap.pop().expect("two leaves remain");
    edges.push((u, v));
    RootedTree::from_edges(n, &edges, 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyMode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub graph6: String,
    pub tree: String,
    pub n: usize,
    pub k: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub k: usize,
    pub n_max: usize,
    pub mode: VerifyMode,
    pub graphs_checked: usize,
    pub trees_checked: usize,
    pub pairs_checked: usize,
    pub counterexamples: Vec<Counterexample>,
    /// Sub-report restricted to hosts with `n ≤ (1+δ)k`.
    pub regime_graphs: usize,
    pub regime_pairs: usize,
    pub regime_counterexamples: usize,
    pub oracle_nodes: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceResult {
    pub graph6: String,
    pub n: usize,
    pub m: usize,
    pub contains_all: bool,
    pub missing_tree: Option<String>,
    pub nodes: u64,
}

/// Checks every host with `n ≤ n_max` and `d(G) > k-1` against every tree
/// with `k` edges. Hypothesis hosts necessarily have `n ≥ k+1`. The observer
/// sees one line per host.
pub fn verify_conjecture(
    k: usize,
    n_max: usize,
    mode: VerifyMode,
    sample_budget: usize,
    seed: u64,
    params: &ParameterSet,
    mut on_instance: impl FnMut(&InstanceResult),
) -> Result<VerifyReport> {
    if k == 0 {
        return Err(Error::InvalidParameters("k must be at least 1".into()));
    }
    if n_max > 10 {
        return Err(Error::Infeasible {
            estimate: format!(
                "exhaustive verification needs n_max ≤ 10; n = {n_max} would mean 2^{} labeled graphs",
                n_max * (n_max - 1) / 2
            ),
        });
    }
    let trees = enumerate_trees(k)?;
    let mut report = VerifyReport {
        k,
        n_max,
        mode,
        graphs_checked: 0,
        trees_checked: trees.len(),
        pairs_checked: 0,
        counterexamples: Vec::new(),
        regime_graphs: 0,
        regime_pairs: 0,
        regime_counterexamples: 0,
        oracle_nodes: 0,
    };
    let mut check_host = |g: &Graph, report: &mut VerifyReport| -> Result<()> {
        report.graphs_checked += 1;
        let in_regime = params.n_within_regime(g.vertex_count(), k);
        if in_regime {
            report.regime_graphs += 1;
        }
        let mut missing = None;
        let mut nodes = 0;
        for t in &trees {
            report.pairs_checked += 1;
            if in_regime {
                report.regime_pairs += 1;
            }
            let (res, stats) = contains_tree_exact(g, t, None);
            nodes += stats.nodes_expanded;
            report.oracle_nodes += stats.nodes_expanded;
            if !matches!(res, Containment::Embedded(_)) {
                let ce = Counterexample {
                    graph6: crate::graph6::encode_graph6(g)?,
                    tree: crate::formats::format_tree(t).trim_end().to_string(),
                    n: g.vertex_count(),
                    k,
                };
                if in_regime {
                    report.regime_counterexamples += 1;
                }
                report.counterexamples.push(ce);
                if missing.is_none() {
                    missing = Some(crate::formats::format_tree(t).trim_end().to_string());
                }
            }
        }
        on_instance(&InstanceResult {
            graph6: crate::graph6::encode_graph6(g)?,
            n: g.vertex_count(),
            m: g.edge_count(),
            contains_all: missing.is_none(),
            missing_tree: missing,
            nodes,
        });
        Ok(())
    };

    match mode {
        VerifyMode::Exhaustive => {
            for n in (k + 1)..=n_max {
                if n <= MAX_CANONICAL_N {
                    for &mask in canonical_masks(n)? {
                        let g = mask_to_graph(n, mask);
                        if g.hypothesis_holds(k) {
                            check_host(&g, &mut report)?;
                        }
                    }
                } else {
                    // raw upper-triangle sweep, no isomorphism rejection
                    let bits = n * (n - 1) / 2;
                    if bits > 28 {
                        return Err(Error::Infeasible {
                            estimate: format!("raw enumeration at n={n} means 2^{bits} graphs"),
                        });
                    }
                    let min_edges = n * (k - 1) / 2 + 1; // smallest m with 2m > n(k-1)
                    for mask in 0u64..(1 << bits) {
                        if (mask.count_ones() as usize) < min_edges {
                            continue;
                        }
                        let g = mask_to_graph(n, mask);
                        debug_assert!(g.hypothesis_holds(k));
                        check_host(&g, &mut report)?;
                    }
                }
            }
        }
        VerifyMode::Sampled => {
            use rand::{Rng as _, SeedableRng as _};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut produced = 0;
            while produced < sample_budget {
                let n = rng.gen_range((k + 1)..=n_max.max(k + 1));
                let p = rng.gen_range(0.5..1.0);
                let mut edges = Vec::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        if rng.gen_bool(p) {
                            edges.push((i, j));
                        }
                    }
                }
                let g = Graph::from_edges(n, &edges)?;
                if !g.hypothesis_holds(k) {
                    continue;
                }
                check_host(&g, &mut report)?;
                produced += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_graph_counts_match_oeis() {
        // A000088: 1, 2, 4, 11, 34, 156, 1044
        let expected = [1usize, 2, 4, 11, 34, 156, 1044];
        for (i, &count) in expected.iter().enumerate() {
            assert_eq!(
                canonical_masks(i + 1).unwrap().len(),
                count,
                "n = {}",
                i + 1
            );
        }
    }

    #[test]
    fn unlabeled_tree_counts_match_oeis() {
        // A000055 shifted: trees with k edges (k+1 vertices): 1,1,1,2,3,6,11
        let expected = [(1, 1), (2, 1), (3, 2), (4, 3), (5, 6), (6, 11)];
        for (k, count) in expected {
            assert_eq!(enumerate_trees(k).unwrap().len(), count, "k = {k}");
        }
    }

    #[test]
    fn prufer_enumeration_is_uniform_over_labeled_trees() {
        // Cayley: 5^3 = 125 distinct labeled trees on 5 vertices.
        let mut seen = std::collections::HashSet::new();
        let mut seq = [0usize; 3];
        loop {
            let t = tree_from_prufer(&seq).unwrap();
            seen.insert(t.edges());
            let mut i = 0;
            loop {
                if i == 3 {
                    assert_eq!(seen.len(), 125);
                    return;
                }
                seq[i] += 1;
                if seq[i] < 5 {
                    break;
                }
                seq[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn verify_k3_exhaustive_has_no_counterexamples() {
        let report = verify_conjecture(
            3,
            6,
            VerifyMode::Exhaustive,
            0,
            0,
            &ParameterSet::default(),
            |_| {},
        )
        .unwrap();
        assert!(report.counterexamples.is_empty());
        assert!(report.graphs_checked > 0);
        assert_eq!(report.trees_checked, 2);
    }

    #[test]
    fn boundary_cliques_are_not_hypothesis_instances() {
        // t disjoint K_k have d = k-1 exactly and must never be enumerated
        // as hypothesis-satisfying.
        for k in [4usize, 5] {
            let mut edges = Vec::new();
            for copy in 0..2 {
                let base = copy * k;
                for i in 0..k {
                    for j in (i + 1)..k {
                        edges.push((base + i, base + j));
                    }
                }
            }
            let g = Graph::from_edges(2 * k, &edges).unwrap();
            assert!(!g.hypothesis_holds(k));
        }
    }

    #[test]
    fn infeasible_sizes_are_rejected_with_estimate() {
        let err = verify_conjecture(
            3,
            11,
            VerifyMode::Exhaustive,
            0,
            0,
            &ParameterSet::default(),
            |_| {},
        )
        .unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
        // n = 9 passes the n_max precondition but the raw sweep is too large
        let err = verify_conjecture(
            8,
            9,
            VerifyMode::Exhaustive,
            0,
            0,
            &ParameterSet::default(),
            |_| {},
        )
        .unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
        let err = enumerate_trees(9).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
    }

    /// n = 8 exceeds the canonical cache and exercises the raw
    /// upper-triangle sweep (no isomorphism rejection).
    #[test]
    fn raw_sweep_at_n8_finds_no_counterexamples() {
        let report = verify_conjecture(
            7,
            8,
            VerifyMode::Exhaustive,
            0,
            0,
            &ParameterSet::default(),
            |_| {},
        )
        .unwrap();
        assert!(report.counterexamples.is_empty());
        // hosts with 2m > 8·6: m ≥ 25 of 28 possible edges
        assert_eq!(report.graphs_checked, 3276 + 378 + 28 + 1);
        // 23 unlabeled trees on 8 vertices
        assert_eq!(report.trees_checked, 23);
    }

    #[test]
    fn sampled_mode_checks_the_requested_budget() {
        let report = verify_conjecture(
            4,
            7,
            VerifyMode::Sampled,
            25,
            99,
            &ParameterSet::default(),
            |_| {},
        )
        .unwrap();
        assert_eq!(report.graphs_checked, 25);
        assert!(report.counterexamples.is_empty());
    }
}
