//! Cross-module invariants: whatever the greedy engine embeds, the exact
//! oracle must also find; phase counts always add up to the vertices placed;
//! and the validity report agrees with a brute-force homomorphism check on
//! small instances.

use proptest::prelude::*;
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;

use esos_core::embedding::{validate_embedding, PartialEmbedding};
use esos_core::gen::{gen_host, gen_tree, HostFamily, TreeFamily};
use esos_core::oracle::{contains_tree_exact, Containment};
use esos_core::params::{ParameterSet, Rat};
use esos_core::pipeline::{run_embed, RunConfig};
use esos_core::{Graph, RootedTree};

/// Engine success implies oracle containment (never the other way around:
/// the engine may fail outside the regime).
#[test]
fn engine_success_implies_oracle_containment() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0315);
    let mut agreed = 0usize;
    for round in 0..200u64 {
        let k = rng.gen_range(20..=60usize);
        let delta = Rat::new(rng.gen_range(20..=100u64), 1000);
        let g = gen_host(&HostFamily::PaperRegime { k, delta }, rng.gen()).unwrap();
        let t = gen_tree(&TreeFamily::PruferRandom, k, rng.gen()).unwrap();
        let cfg = RunConfig {
            params: ParameterSet::default().with_delta(delta),
            seed: round,
            ..RunConfig::default()
        };
        let report = run_embed(&g, &t, &cfg).unwrap();
        if report.outcome.is_embedded() {
            let (oracle, _) = contains_tree_exact(&g, &t, None);
            assert!(
                matches!(oracle, Containment::Embedded(_)),
                "engine embedded but oracle denies containment (round {round})"
            );
            agreed += 1;
        }
    }
    assert!(
        agreed > 50,
        "too few embedded runs to be meaningful ({agreed})"
    );
}

/// The per-phase counters cover every placed vertex exactly once.
#[test]
fn phase_counts_sum_to_tree_size() {
    for seed in 0..50u64 {
        let k = 40 + (seed as usize % 30);
        let g = gen_host(
            &HostFamily::PaperRegime {
                k,
                delta: Rat::new(1, 10),
            },
            seed,
        )
        .unwrap();
        let t = gen_tree(&TreeFamily::PruferRandom, k, seed).unwrap();
        let cfg = RunConfig {
            params: ParameterSet::default().with_delta(Rat::new(1, 10)),
            seed,
            ..RunConfig::default()
        };
        let report = run_embed(&g, &t, &cfg).unwrap();
        if report.outcome.is_embedded() {
            let placed: usize = report.phase_counts.values().sum();
            assert_eq!(placed, k + 1, "seed {seed}: {:?}", report.phase_counts);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// validate_embedding accepts exactly the injective homomorphisms,
    /// brute-forced over random total maps of small trees into small hosts.
    #[test]
    fn validation_agrees_with_brute_force(
        seed in 0u64..10_000,
        gn in 3usize..=8,
        tk in 1usize..=6,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..gn {
            for j in (i + 1)..gn {
                if rng.gen_bool(0.55) {
                    edges.push((i, j));
                }
            }
        }
        let g = Graph::from_edges(gn, &edges).unwrap();
        let parents = std::iter::once(None)
            .chain((1..=tk.min(gn - 1)).map(|v| Some(rng.gen_range(0..v))))
            .collect::<Vec<_>>();
        let t = RootedTree::from_parents(parents).unwrap();
        // a random total map, not necessarily injective
        let images: Vec<Option<usize>> =
            (0..t.vertex_count()).map(|_| Some(rng.gen_range(0..gn))).collect();
        let emb = PartialEmbedding::from_images(images.clone(), gn);
        let report = validate_embedding(&g, &t, &emb);

        let injective = {
            let mut seen = std::collections::HashSet::new();
            images.iter().all(|h| seen.insert(h.unwrap()))
        };
        let homomorphic = t.edges().iter().all(|&(u, v)| {
            g.has_edge(images[u].unwrap(), images[v].unwrap())
        });
        prop_assert_eq!(report.certifies_containment(), injective && homomorphic);
    }
}
