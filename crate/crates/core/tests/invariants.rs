mod common;

use common::*;
use navgraph::env::SimulatedSite;
use navgraph::explorer::{explore, ExplorationConfig};
use navgraph::fixtures;
use navgraph::graph::{
    deserialize_graph, entry_path, hash_element, normalize_url, serialize_graph, shortest_path,
    InteractionGraph, NodeId,
};
use navgraph::navigator::{select, CandidateView, KeywordSelector};
use navgraph::retrieval::{late_interaction_score, rank, IndexEntry, MultiVector, RetrievalIndex, Scorer};
use proptest::prelude::*;

fn explored(seed: u64, n: usize, links: usize, depth: u32, diff: bool) -> InteractionGraph {
    let spec = fixtures::random_site(seed, n, links);
    let site = SimulatedSite::new(spec).unwrap();
    let config = ExplorationConfig::new(site.spec().domain.clone(), site.start_url().unwrap())
        .with_depth(depth)
        .with_structural_diff(diff);
    explore(&mut site.session(), &config).unwrap().0
}

#[test]
fn md5_reference_vectors() {
    let vectors = [
        ("", "d41d8cd98f00b204e9800998ecf8427e"),
        ("a", "0cc175b9c0f1b6a831c399e269772661"),
        ("abc", "900150983cd24fb0d6963f7d28e17f72"),
        ("message digest", "f96b697d7cb7938d525a2f31aaf161d0"),
        ("abcdefghijklmnopqrstuvwxyz", "c3fcd3d76192e4007dfb496cca67e13b"),
        (
            "12345678901234567890123456789012345678901234567890123456789012345678901234567890",
            "57edf4a22be3c955ac49da2e2107b67a",
        ),
    ];
    for (input, want) in vectors {
        assert_eq!(md5_hex(input.as_bytes()), want, "oracle on {input:?}");
    }
    for (input, want) in vectors.iter().skip(1) {
        assert_eq!(hash_element(input).unwrap().as_str(), *want);
    }
}

#[test]
fn fixture_node_ids_match_independent_hashing() {
    for spec in [fixtures::menu_site(), fixtures::gitlab_like(2, 2), fixtures::dual_domain().unwrap().cms] {
        for state in &spec.states {
            let want = oracle_state_id(state);
            assert_eq!(fixtures::state_node_id(&spec, &state.id).unwrap().as_str(), want, "{}", state.id);
        }
    }
}

fn xpath() -> impl Strategy<Value = String> {
    prop::collection::vec("[a-z]{1,6}(\\[[1-9]\\])?", 1..6).prop_map(|parts| format!("/{}", parts.join("/")))
}

fn rows(max_t: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), 1..=max_t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn element_hash_is_md5_of_xpath(x in xpath()) {
        prop_assert_eq!(hash_element(&x).unwrap().as_str().to_owned(), md5_hex(x.as_bytes()));
    }

    #[test]
    fn url_normalization_matches_oracle(
        scheme in "(HTTP|http|Https)",
        host in "[A-Za-z]{1,8}\\.(Local|COM)",
        path in "(/[A-Za-z0-9]{0,5}){0,3}",
        query in "(\\?[a-zA-Z]=[A-Z0-9]{1,3})?",
        fragment in "(#[A-Za-z]{0,4})?",
    ) {
        let url = format!("{scheme}://{host}{path}{query}{fragment}");
        let once = normalize_url(&url);
        prop_assert_eq!(&once, &oracle_normalize(&url));
        prop_assert_eq!(normalize_url(&once), once);
    }

    #[test]
    fn graph_round_trips_through_serialization(seed in 0u64..500) {
        let graph = explored(seed, 25, 4, 4, true);
        let bytes = serialize_graph(&graph);
        let back = deserialize_graph(&bytes).unwrap();
        prop_assert_eq!(serialize_graph(&back), bytes);
        prop_assert_eq!(back.node_count(), graph.node_count());
        prop_assert_eq!(back.edge_count(), graph.edge_count());
    }

    #[test]
    fn exploration_finds_exactly_the_reachable_states(seed in 0u64..500, depth in 0u32..5) {
        let spec = fixtures::random_site(seed, 30, 4);
        let graph = explored(seed, 30, 4, depth, true);
        let got: std::collections::BTreeSet<String> = graph.node_ids().map(|n| n.to_string()).collect();
        prop_assert_eq!(got, oracle_reachable(&spec, depth, &default_roles(), &[]));
    }

    #[test]
    fn diffing_never_changes_the_graph(seed in 0u64..500) {
        let with = explored(seed, 30, 5, 4, true);
        let without = explored(seed, 30, 5, 4, false);
        prop_assert_eq!(serialize_graph(&with), serialize_graph(&without));
    }

    #[test]
    fn shortest_paths_are_optimal(seed in 0u64..500, a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let graph = explored(seed, 40, 4, 6, true);
        let ids: Vec<NodeId> = graph.node_ids().cloned().collect();
        let (from, to) = (a.get(&ids), b.get(&ids));
        let path = shortest_path(&graph, from, to).unwrap();
        prop_assert_eq!(Some(path.len()), oracle_distance(&graph, from, to));
        prop_assert_eq!(oracle_walk(&graph, from, &path.steps), Some(to.clone()));
        prop_assert_eq!(shortest_path(&graph, from, to).unwrap(), path);
    }

    #[test]
    fn entry_paths_open_with_a_goto(seed in 0u64..500, b in any::<prop::sample::Index>()) {
        let graph = explored(seed, 40, 4, 6, true);
        let ids: Vec<NodeId> = graph.node_ids().cloned().collect();
        let to = b.get(&ids);
        let path = entry_path(&graph, to).unwrap();
        prop_assert!(path.steps[0].is_goto());
        prop_assert!(path.steps[1..].iter().all(|s| !s.is_goto()));
        // one goto, then the best click route from any addressable page
        let best = graph
            .nodes()
            .filter(|n| n.url_addressable())
            .filter_map(|n| oracle_distance(&graph, n.id(), to))
            .min()
            .unwrap();
        prop_assert!(path.len() <= 1 + best);
        prop_assert_eq!(oracle_walk(&graph, graph.root(), &path.steps), Some(to.clone()));
    }

    #[test]
    fn late_interaction_matches_nested_loops(dim in 1usize..24, q in 1usize..8, v in 1usize..8, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |t: usize| -> Vec<Vec<f64>> {
            (0..t).map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
        };
        let (qr, vr) = (draw(q), draw(v));
        let got = late_interaction_score(
            &MultiVector::from_rows(qr.clone()).unwrap(),
            &MultiVector::from_rows(vr.clone()).unwrap(),
        ).unwrap();
        prop_assert!((got - oracle_maxsim(&qr, &vr)).abs() <= 1e-12);
    }

    #[test]
    fn topk_matches_full_sort(entries in prop::collection::vec(rows(4, 3), 1..40), q in rows(3, 3), k in 1usize..50) {
        let index = RetrievalIndex::from_entries(
            "p",
            "p",
            3,
            entries.iter().enumerate().map(|(i, r)| IndexEntry {
                node_id: NodeId::parse(&md5_hex(i.to_string().as_bytes())).unwrap(),
                rows: MultiVector::from_rows(r.clone()).unwrap(),
            }).collect(),
        ).unwrap();
        let scored: Vec<(f64, String)> = index
            .entries()
            .iter()
            .map(|e| (oracle_maxsim(&q, &e.rows.rows().map(<[f64]>::to_vec).collect::<Vec<_>>()), e.node_id.to_string()))
            .collect();
        let got: Vec<String> = rank(&index, &MultiVector::from_rows(q.clone()).unwrap(), k, Scorer::LateInteraction)
            .unwrap()
            .into_iter()
            .enumerate()
            .map(|(i, c)| { assert_eq!(c.rank, i + 1); c.node_id.to_string() })
            .collect();
        prop_assert_eq!(got, oracle_topk(&scored, k));
    }

    #[test]
    fn keyword_selection_is_deterministic(
        renderings in prop::collection::vec("[a-d]{1,3}( [a-d]{1,3}){0,4}", 1..12),
        query in "[a-d]{1,3}( [a-d]{1,3}){0,2}",
    ) {
        let candidates: Vec<_> = renderings
            .iter()
            .enumerate()
            .map(|(i, _)| navgraph::retrieval::Candidate {
                node_id: NodeId::parse(&md5_hex(i.to_string().as_bytes())).unwrap(),
                score: 1.0 / (i + 1) as f64,
                rank: i + 1,
            })
            .collect();
        let views: Vec<CandidateView<'_>> = candidates
            .iter()
            .zip(&renderings)
            .map(|(c, r)| CandidateView { candidate: c, rendering: r })
            .collect();
        let first = select("intent", &query, &views, &mut KeywordSelector).unwrap();
        let second = select("intent", &query, &views, &mut KeywordSelector).unwrap();
        prop_assert_eq!(&first, &second);
        if let Some(chosen) = &first.chosen {
            prop_assert!(candidates.iter().any(|c| &c.node_id == chosen));
        }
    }
}
