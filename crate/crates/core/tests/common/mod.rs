//! Reference implementations and fixtures shared by the integration tests.
//!
//! The oracles are deliberately naive (Bellman-Ford, exhaustive DFS,
//! one-directional BFS) so they share no code with the library kernels.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use lfid::topology::{load_topology, random_connected_graph};
use lfid::{AllNodeFib, Digraph, Milli, NodeId, Topology, WeightMode};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn id(i: usize) -> NodeId {
    NodeId::new(i)
}

pub fn data(name: &str) -> String {
    let path = format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn abilene() -> Topology {
    load_topology(&data("abilene.txt"), WeightMode::HopCount).unwrap()
}

pub fn abilene_distance() -> Topology {
    load_topology(&data("abilene-distance.txt"), WeightMode::Explicit).unwrap()
}

pub fn ring(n: usize) -> Topology {
    Topology::from_links(n, (0..n).map(|i| (i, (i + 1) % n, 1000))).unwrap()
}

pub fn path_graph(n: usize) -> Topology {
    Topology::from_links(n, (0..n - 1).map(|i| (i, i + 1, 1000))).unwrap()
}

pub fn triangle() -> Topology {
    ring(3)
}

/// The 200-graph corpus: n in [4, 9], mean degree in [2, 5] (capped by the
/// complete graph), weights 1..=10 units.
pub fn corpus() -> Vec<Topology> {
    (0..200).map(corpus_graph).collect()
}

pub fn corpus_graph(i: u64) -> Topology {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0_FFEE + i);
    let n: usize = rng.gen_range(4..=9);
    let degree: f64 = rng.gen_range(2.0..=5.0);
    let max_links = n * (n - 1) / 2;
    let links = ((n as f64 * degree / 2.0).round() as usize).clamp(n - 1, max_links);
    random_connected_graph(n, links - (n - 1), (1, 10), i).unwrap()
}

/// Random graph with `n` nodes and mean degree close to `degree`.
pub fn random_graph(n: usize, degree: usize, seed: u64) -> Topology {
    let links = (n * degree / 2).clamp(n - 1, n * (n - 1) / 2);
    random_connected_graph(n, links - (n - 1), (1, 10), seed).unwrap()
}

/// Arbitrary simple graphs, possibly disconnected, with 1..=max_n nodes.
pub fn arb_topology(max_n: usize) -> impl Strategy<Value = Topology> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let m = pairs.len();
        (
            Just(n),
            proptest::collection::vec((any::<bool>(), 1u64..=10), m),
            Just(pairs),
        )
            .prop_map(|(n, picks, pairs)| {
                let links = pairs
                    .iter()
                    .zip(picks)
                    .filter(|(_, (keep, _))| *keep)
                    .map(|(&(a, b), (_, w))| (a, b, w * 1000));
                Topology::from_links(n, links).unwrap()
            })
    })
}

/// Connected random graphs from the library generator.
pub fn arb_connected(min_n: usize, max_n: usize) -> impl Strategy<Value = Topology> {
    (min_n..=max_n, 0.0f64..=1.0, any::<u64>()).prop_map(|(n, density, seed)| {
        let spare = n * (n - 1) / 2 - (n - 1);
        let extra = (spare as f64 * density * 0.6).round() as usize;
        random_connected_graph(n, extra, (1, 10), seed).unwrap()
    })
}

/// Arbitrary digraphs on `n <= max_n` nodes.
pub fn arb_digraph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n, 1u64..=10), 0..=3 * n).prop_map(move |arcs| {
            let arcs = arcs
                .into_iter()
                .filter(|(a, b, _)| a != b)
                .map(|(a, b, w)| (id(a), id(b), w * 1000));
            Digraph::from_arcs(n, arcs)
        })
    })
}

pub fn bellman_ford(t: &Topology, src: NodeId) -> Vec<Option<Milli>> {
    let n = t.node_count();
    let mut d: Vec<Option<Milli>> = vec![None; n];
    d[src.index()] = Some(0);
    for _ in 0..n {
        let mut changed = false;
        for l in t.links() {
            for (u, v) in [(l.a, l.b), (l.b, l.a)] {
                if let Some(du) = d[u.index()] {
                    let cand = du + l.weight;
                    if d[v.index()].is_none_or(|dv| cand < dv) {
                        d[v.index()] = Some(cand);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    d
}

/// Every simple path `src -> dst` in `g`, sorted by `(cost, nodes)`.
pub fn all_simple_paths(g: &Digraph, src: NodeId, dst: NodeId) -> Vec<(Milli, Vec<NodeId>)> {
    fn dfs(g: &Digraph, dst: NodeId, path: &mut Vec<NodeId>, cost: Milli, out: &mut Vec<(Milli, Vec<NodeId>)>) {
        let u = *path.last().unwrap();
        if u == dst {
            out.push((cost, path.clone()));
            return;
        }
        for &(v, w) in g.successors(u) {
            if !path.contains(&v) {
                path.push(v);
                dfs(g, dst, path, cost + w, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    dfs(g, dst, &mut vec![src], 0, &mut out);
    out.sort();
    out
}

pub fn bfs_reachable(g: &Digraph, from: NodeId, to: NodeId) -> bool {
    let mut seen = vec![false; g.node_count()];
    let mut q = VecDeque::from([from]);
    seen[from.index()] = true;
    while let Some(u) = q.pop_front() {
        if u == to {
            return true;
        }
        for &(v, _) in g.successors(u) {
            if !seen[v.index()] {
                seen[v.index()] = true;
                q.push_back(v);
            }
        }
    }
    false
}

/// Cheapest path `x -> n -> ... -> d` that never returns to `x`, by
/// exhaustive enumeration.
pub fn cheapest_via_avoiding(t: &Topology, x: NodeId, n: NodeId, d: NodeId) -> Option<Milli> {
    let w = t.weight(x, n)?;
    let g = Digraph::from_topology_filtered(t, |a, b| a != x && b != x);
    all_simple_paths(&g, n, d).first().map(|(c, _)| w + c)
}

/// Entry set `(node, dest, neighbor)` of a FIB.
pub fn entry_set(fib: &AllNodeFib) -> BTreeSet<(NodeId, NodeId, NodeId)> {
    fib.iter().map(|(x, d, e)| (x, d, e.neighbor)).collect()
}

/// Kahn's algorithm on one destination's FIB arcs.
pub fn is_acyclic(fib: &AllNodeFib, dst: NodeId) -> bool {
    let n = fib.node_count();
    let mut indeg = vec![0usize; n];
    for x in 0..n {
        for e in fib.entries(id(x), dst) {
            indeg[e.neighbor.index()] += 1;
        }
    }
    let mut q: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(u) = q.pop_front() {
        removed += 1;
        for e in fib.entries(id(u), dst) {
            let v = e.neighbor.index();
            indeg[v] -= 1;
            if indeg[v] == 0 {
                q.push_back(v);
            }
        }
    }
    removed == n
}

/// Loop check by breadth-first expansion of explicit walks: every walk
/// follows FIB entries, never takes the arc back to its previous node, and
/// is extended until it reaches a node with no choice left.
pub fn walks_loop_free(fib: &AllNodeFib, dst: NodeId) -> bool {
    let n = fib.node_count();
    let mut queue: VecDeque<Vec<NodeId>> = (0..n).filter(|&s| s != dst.index()).map(|s| vec![id(s)]).collect();
    while let Some(walk) = queue.pop_front() {
        let cur = *walk.last().unwrap();
        let prev = walk.len().checked_sub(2).map(|i| walk[i]);
        for e in fib.entries(cur, dst) {
            if Some(e.neighbor) == prev {
                continue;
            }
            if walk.contains(&e.neighbor) {
                return false;
            }
            let mut next = walk.clone();
            next.push(e.neighbor);
            queue.push_back(next);
        }
    }
    true
}
