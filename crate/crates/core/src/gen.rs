//! Seeded generators for guest trees and host graphs, including the
//! hypothesis-tight dense hosts and the extremal boundary instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::enumerate::tree_from_prufer;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::params::{ceil_mul, Rat};
use crate::tree::RootedTree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeFamily {
    Path,
    Star,
    /// `legs` paths of near-equal length glued at a center.
    Spider {
        legs: usize,
    },
    /// Spine of `spine` edges with the remaining edges as legs, round-robin.
    Caterpillar {
        spine: usize,
    },
    /// Path of `handle` edges ending in a star.
    Broom {
        handle: usize,
    },
    /// Uniform over labeled trees on k+1 vertices.
    PruferRandom,
}

pub fn gen_tree(family: &TreeFamily, k: usize, seed: u64) -> Result<RootedTree> {
    if k == 0 {
        return Err(Error::InvalidInstance("tree families need k ≥ 1".into()));
    }
    let parents: Vec<Option<usize>> = match *family {
        TreeFamily::Path => (0..=k).map(|v| v.checked_sub(1)).collect(),
        TreeFamily::Star => std::iter::once(None)
            .chain((1..=k).map(|_| Some(0)))
            .collect(),
        TreeFamily::Spider { legs } => {
            if legs == 0 || legs > k {
                return Err(Error::InvalidInstance(format!(
                    "spider needs 1 ≤ legs ≤ k, got legs={legs}, k={k}"
                )));
            }
            let mut parents = vec![None];
            let base = k / legs;
            let extra = k % legs;
            for leg in 0..legs {
                let len = base + usize::from(leg < extra);
                let mut prev = 0;
                for _ in 0..len {
                    parents.push(Some(prev));
                    prev = parents.len() - 1;
                }
            }
            parents
        }
        TreeFamily::Caterpillar { spine } => {
            if spine > k {
                return Err(Error::InvalidInstance(format!(
                    "caterpillar needs spine ≤ k, got spine={spine}, k={k}"
                )));
            }
            let mut parents: Vec<Option<usize>> = (0..=spine).map(|v| v.checked_sub(1)).collect();
            for leaf in 0..(k - spine) {
                parents.push(Some(leaf % (spine + 1)));
            }
            parents
        }
        TreeFamily::Broom { handle } => {
            if handle > k {
                return Err(Error::InvalidInstance(format!(
                    "broom needs handle ≤ k, got handle={handle}, k={k}"
                )));
            }
            let mut parents: Vec<Option<usize>> = (0..=handle).map(|v| v.checked_sub(1)).collect();
            for _ in 0..(k - handle) {
                parents.push(Some(handle));
            }
            parents
        }
        TreeFamily::PruferRandom => {
            let n = k + 1;
            if n == 2 {
                return RootedTree::from_parents(vec![None, Some(0)]);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
            return tree_from_prufer(&seq);
        }
    };
    RootedTree::from_parents(parents)
}

#[derive(Clone, Debug, PartialEq)]
pub enum HostFamily {
    Complete {
        n: usize,
    },
    /// K_n minus a maximum matching (⌊n/2⌋ disjoint edges).
    CompleteMinusMatching {
        n: usize,
    },
    /// G(n, p) with rational p.
    GnpDense {
        n: usize,
        p: Rat,
    },
    /// `copies` disjoint K_clique: the extremal d = clique-1 boundary.
    DisjointCliques {
        clique: usize,
        copies: usize,
    },
    /// Dense host with n = ⌈(1+δ)k⌉ and d(G) > k-1 guaranteed exactly:
    /// K_n minus a random edge set within half the hypothesis slack.
    PaperRegime {
        k: usize,
        delta: Rat,
    },
}

pub fn gen_host(family: &HostFamily, seed: u64) -> Result<Graph> {
    match family {
        HostFamily::Complete { n } => {
            if *n == 0 {
                return Err(Error::InvalidInstance("complete host needs n ≥ 1".into()));
            }
            Ok(Graph::complete(*n))
        }
        HostFamily::CompleteMinusMatching { n } => {
            if *n < 2 {
                return Err(Error::InvalidInstance(
                    "matching removal needs n ≥ 2".into(),
                ));
            }
            let mut edges = Vec::new();
            for i in 0..*n {
                for j in (i + 1)..*n {
                    let matched = j == i + 1 && i % 2 == 0;
                    if !matched {
                        edges.push((i, j));
                    }
                }
            }
            Graph::from_edges(*n, &edges)
        }
        HostFamily::GnpDense { n, p } => {
            if *p > Rat::from_integer(1) {
                return Err(Error::InvalidInstance("p must be ≤ 1".into()));
            }
            let num = *p.numer();
            let den = *p.denom();
            if num > u32::MAX as u64 || den > u32::MAX as u64 {
                return Err(Error::InvalidInstance(
                    "p precision limited to 32-bit num/den".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for i in 0..*n {
                for j in (i + 1)..*n {
                    if rng.gen_ratio(num as u32, den as u32) {
                        edges.push((i, j));
                    }
                }
            }
            Graph::from_edges(*n, &edges)
        }
        HostFamily::DisjointCliques { clique, copies } => {
            if *clique == 0 || *copies == 0 {
                return Err(Error::InvalidInstance(
                    "cliques need clique ≥ 1 and copies ≥ 1".into(),
                ));
            }
            let n = clique * copies;
            let mut edges = Vec::new();
            for c in 0..*copies {
                let base = c * clique;
                for i in 0..*clique {
                    for j in (i + 1)..*clique {
                        edges.push((base + i, base + j));
                    }
                }
            }
            Graph::from_edges(n, &edges)
        }
        HostFamily::PaperRegime { k, delta } => {
            let k = *k;
            if k == 0 {
                return Err(Error::InvalidInstance(
                    "paper-regime host needs k ≥ 1".into(),
                ));
            }
            let n = k + ceil_mul(*delta, k).max(1);
            // 2m > n(k-1) after deleting D edges of K_n means
            // 2D < n(n-1) - n(k-1) = n(n-k); keep half the budget as slack.
            let slack_budget = (n as u64 * (n - k) as u64).saturating_sub(2) / 4;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let delete_count = if slack_budget == 0 {
                0
            } else {
                rng.gen_range(0..=slack_budget) as usize
            };
            let mut pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .collect();
            // partial Fisher-Yates: first delete_count entries are the deletions
            for i in 0..delete_count.min(pairs.len()) {
                let j = rng.gen_range(i..pairs.len());
                pairs.swap(i, j);
            }
            let g = Graph::from_edges(n, &pairs[delete_count.min(pairs.len())..])?;
            debug_assert!(g.hypothesis_holds(k));
            debug_assert!(g.vertex_count() <= k + ceil_mul(*delta, k).max(1));
            Ok(g)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn degree_profile(t: &RootedTree) -> Vec<usize> {
        let mut d: Vec<usize> = (0..t.vertex_count()).map(|v| t.degree(v)).collect();
        d.sort_unstable();
        d
    }

    #[test]
    fn star_and_path_profiles() {
        let star = gen_tree(&TreeFamily::Star, 7, 0).unwrap();
        assert_eq!(degree_profile(&star), vec![1, 1, 1, 1, 1, 1, 1, 7]);
        let path = gen_tree(&TreeFamily::Path, 7, 0).unwrap();
        assert_eq!(degree_profile(&path), vec![1, 1, 2, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn spider_caterpillar_broom_shapes() {
        let spider = gen_tree(&TreeFamily::Spider { legs: 3 }, 6, 0).unwrap();
        assert_eq!(spider.degree(0), 3);
        assert_eq!(spider.leaf_count(), 3);
        assert_eq!(spider.edge_count(), 6);

        let cat = gen_tree(&TreeFamily::Caterpillar { spine: 4 }, 9, 0).unwrap();
        assert_eq!(cat.edge_count(), 9);
        // 5 legs land round-robin on the 5 spine vertices, so both spine ends
        // pick up a leg and the leaves are exactly the legs.
        assert_eq!(cat.leaf_count(), 5);

        let broom = gen_tree(&TreeFamily::Broom { handle: 3 }, 8, 0).unwrap();
        assert_eq!(broom.degree(3), 1 + 5);
        assert_eq!(broom.leaf_count(), 6);
    }

    #[test]
    fn prufer_random_is_seed_deterministic() {
        let a = gen_tree(&TreeFamily::PruferRandom, 40, 7).unwrap();
        let b = gen_tree(&TreeFamily::PruferRandom, 40, 7).unwrap();
        let c = gen_tree(&TreeFamily::PruferRandom, 40, 8).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_ne!(a.edges(), c.edges());
        assert_eq!(a.edge_count(), 40);
    }

    #[test]
    fn invalid_family_parameters() {
        assert!(gen_tree(&TreeFamily::Spider { legs: 9 }, 6, 0).is_err());
        assert!(gen_tree(&TreeFamily::Caterpillar { spine: 7 }, 6, 0).is_err());
        assert!(gen_tree(&TreeFamily::Path, 0, 0).is_err());
    }

    #[test]
    fn complete_minus_matching_degrees() {
        let g = gen_host(&HostFamily::CompleteMinusMatching { n: 6 }, 0).unwrap();
        assert!((0..6).all(|v| g.degree(v) == 4));
        assert_eq!(g.edge_count(), 12);
    }

    #[test]
    fn disjoint_cliques_sit_on_the_extremal_boundary() {
        for k in [4usize, 5, 6] {
            let g = gen_host(
                &HostFamily::DisjointCliques {
                    clique: k,
                    copies: 3,
                },
                0,
            )
            .unwrap();
            assert_eq!(
                g.average_degree().unwrap(),
                Ratio::from_integer(k as u64 - 1)
            );
            assert!(!g.hypothesis_holds(k));
        }
    }

    #[test]
    fn paper_regime_is_revalidated() {
        for seed in 0..30 {
            let k = 100;
            let delta = Rat::new(1, 20);
            let g = gen_host(&HostFamily::PaperRegime { k, delta }, seed).unwrap();
            assert!(g.vertex_count() <= 105);
            assert!(g.vertex_count() > k);
            assert!(g.hypothesis_holds(k), "seed {seed}");
            assert!(g.average_degree().unwrap() > Ratio::from_integer(99));
        }
    }

    #[test]
    fn generators_are_byte_deterministic() {
        let f = HostFamily::PaperRegime {
            k: 60,
            delta: Rat::new(1, 10),
        };
        let a = crate::formats::format_graph(&gen_host(&f, 42).unwrap());
        let b = crate::formats::format_graph(&gen_host(&f, 42).unwrap());
        assert_eq!(a, b);
        let g = HostFamily::GnpDense {
            n: 30,
            p: Rat::new(9, 10),
        };
        let a = crate::formats::format_graph(&gen_host(&g, 1).unwrap());
        let b = crate::formats::format_graph(&gen_host(&g, 1).unwrap());
        assert_eq!(a, b);
    }
}
