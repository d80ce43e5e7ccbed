mod common;

use common::*;
use lfid::shortest_paths::{
    dijkstra, dijkstra_excluding, is_reachable, neighbor_costs_excluding, shortest_path, yen_k_shortest,
    ReachabilityScratch,
};
use lfid::{Digraph, NodeId};
use proptest::prelude::*;

#[test]
fn abilene_seattle_to_new_york_is_five_hops() {
    let t = abilene();
    let se = t.node_by_label("SE").unwrap();
    let nyc = t.node_by_label("NYC").unwrap();
    assert_eq!(dijkstra(&t, se).get(nyc), Some(5000));
}

#[test]
fn excising_the_middle_of_a_path() {
    let t = path_graph(3);
    let tables = neighbor_costs_excluding(&t, id(1));
    assert_eq!(tables.len(), 2);
    let (n0, c0) = &tables[0];
    assert_eq!(*n0, id(0));
    assert_eq!(c0.as_slice(), &[Some(0), None, None]);
}

#[test]
fn excised_neighbors_that_loop_back() {
    // D=0, 1=1, X=2, 0'=3, 3'=4
    let t = lfid::Topology::from_links(
        5,
        [(0, 1, 1000), (1, 2, 1000), (2, 3, 1000), (2, 4, 1000), (3, 4, 1000)],
    )
    .unwrap();
    let tables = neighbor_costs_excluding(&t, id(2));
    for (n, table) in tables {
        match n.index() {
            1 => assert_eq!(table.get(id(0)), Some(1000)),
            3 | 4 => assert_eq!(table.get(id(0)), None),
            other => panic!("unexpected neighbor {other}"),
        }
    }
}

#[test]
fn ring_of_six_excised_long_way() {
    let t = ring(6);
    for x in 0..6 {
        for (n, table) in neighbor_costs_excluding(&t, id(x)) {
            for d in 0..6 {
                if d == x {
                    assert_eq!(table.get(id(d)), None);
                    continue;
                }
                // the remainder is a 5-node path; distance is index difference along it
                let pos = |v: usize| (v + 6 - x) % 6;
                let expect = (pos(n.index()) as i64 - pos(d) as i64).unsigned_abs() * 1000;
                assert_eq!(table.get(id(d)), Some(expect));
                assert!(expect <= 4000);
            }
        }
    }
}

#[test]
fn yen_examples() {
    let r5 = Digraph::from_topology(&ring(5));
    let paths = yen_k_shortest(&r5, id(0), id(1), 3);
    assert_eq!(paths.iter().map(|p| p.cost).collect::<Vec<_>>(), vec![1000, 4000]);
    let tri = Digraph::from_topology(&triangle());
    let paths = yen_k_shortest(&tri, id(0), id(2), 10);
    assert_eq!(paths.len(), 2);
    assert_eq!(paths[0].nodes, vec![id(0), id(2)]);
    assert_eq!(paths[0].cost, 1000);
    assert_eq!(paths[1].nodes, vec![id(0), id(1), id(2)]);
    assert_eq!(paths[1].cost, 2000);
}

#[test]
fn reachability_examples() {
    let g = Digraph::from_arcs(3, [(id(0), id(1), 1), (id(1), id(2), 1)]);
    assert!(is_reachable(&g, id(0), id(2)));
    assert!(!is_reachable(&g, id(2), id(0)));
}

#[test]
fn yen_matches_exhaustive_enumeration_on_fifty_graphs() {
    for seed in 0..50u64 {
        let n = 5 + (seed % 4) as usize;
        let t = random_graph(n, 3 + (seed % 3) as usize, 900 + seed);
        let g = Digraph::from_topology(&t);
        for s in 0..n {
            for d in 0..n {
                if s == d {
                    continue;
                }
                let all = all_simple_paths(&g, id(s), id(d));
                let got = yen_k_shortest(&g, id(s), id(d), 10);
                let want: Vec<_> = all.iter().take(10).cloned().collect();
                let got: Vec<_> = got.into_iter().map(|p| (p.cost, p.nodes)).collect();
                assert_eq!(got, want, "seed {seed}, {s} -> {d}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dijkstra_matches_bellman_ford(t in arb_topology(9)) {
        for s in t.nodes() {
            let got = dijkstra(&t, s);
            let want = bellman_ford(&t, s);
            prop_assert_eq!(got.as_slice(), want.as_slice());
            prop_assert_eq!(got.get(s), Some(0));
            for l in t.links() {
                if let (Some(a), Some(b)) = (got.get(l.a), got.get(l.b)) {
                    prop_assert!(a.abs_diff(b) <= l.weight);
                }
            }
        }
    }

    #[test]
    fn excluding_a_node_matches_bellman_ford_without_it(t in arb_topology(8), x in 0usize..8, s in 0usize..8) {
        let n = t.node_count();
        let (x, s) = (id(x % n), id(s % n));
        prop_assume!(x != s);
        let keep: Vec<_> = t.links().iter().filter(|l| l.a != x && l.b != x).map(|l| (l.a.index(), l.b.index(), l.weight)).collect();
        let reduced = lfid::Topology::from_links(n, keep).unwrap();
        let got = dijkstra_excluding(&t, s, x);
        let mut want = bellman_ford(&reduced, s);
        want[x.index()] = None;
        prop_assert_eq!(got.as_slice(), want.as_slice());
    }

    #[test]
    fn bidirectional_bfs_matches_plain_bfs(g in arb_digraph(10)) {
        let mut scratch = ReachabilityScratch::new();
        for a in 0..g.node_count() {
            prop_assert!(is_reachable(&g, id(a), id(a)));
            for b in 0..g.node_count() {
                let want = bfs_reachable(&g, id(a), id(b));
                prop_assert_eq!(is_reachable(&g, id(a), id(b)), want);
                prop_assert_eq!(scratch.is_reachable(&g, id(a), id(b)), want);
            }
        }
    }

    #[test]
    fn yen_on_digraphs_matches_enumeration(g in arb_digraph(7), k in 1usize..12) {
        let n = g.node_count();
        for s in 0..n {
            for d in 0..n {
                if s == d { continue; }
                let want: Vec<_> = all_simple_paths(&g, id(s), id(d)).into_iter().take(k).collect();
                let got: Vec<_> = yen_k_shortest(&g, id(s), id(d), k).into_iter().map(|p| (p.cost, p.nodes)).collect();
                prop_assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn yen_output_is_well_formed(t in arb_connected(3, 9), k in 1usize..8) {
        let g = Digraph::from_topology(&t);
        let n = t.node_count();
        let (s, d) = (id(0), id(n - 1));
        let paths = yen_k_shortest(&g, s, d, k);
        prop_assert!(!paths.is_empty() && paths.len() <= k);
        prop_assert_eq!(paths[0].cost, dijkstra(&t, s).get(d).unwrap());
        for w in paths.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
        for p in &paths {
            let mut seen = std::collections::HashSet::new();
            prop_assert!(p.nodes.iter().all(|v| seen.insert(*v)));
            let cost: u64 = p.arcs().map(|(a, b)| t.weight(a, b).unwrap()).sum();
            prop_assert_eq!(cost, p.cost);
        }
    }

    #[test]
    fn shortest_path_is_lexicographically_least(g in arb_digraph(7)) {
        let n = g.node_count();
        for s in 0..n {
            for d in 0..n {
                let all = all_simple_paths(&g, id(s), id(d));
                let got = shortest_path(&g, id(s), id(d)).map(|p| (p.cost, p.nodes));
                prop_assert_eq!(got, all.into_iter().next());
            }
        }
    }
}

#[test]
fn self_reachability_on_empty_graph() {
    let g = Digraph::new(3);
    for a in 0..3 {
        assert!(is_reachable(&g, NodeId::new(a), NodeId::new(a)));
    }
}
