//! Shortest-path kernels shared by every routing algorithm and experiment.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashSet};

use crate::topology::{NodeId, Topology};
use crate::weight::Weight;

/// Single-source shortest-path costs. `None` marks an unreachable node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostTable<W> {
    source: NodeId,
    cost: Vec<Option<W>>,
}

impl<W: Weight> CostTable<W> {
    pub fn source(&self) -> NodeId {
        self.source
    }

    #[inline]
    pub fn get(&self, v: NodeId) -> Option<W> {
        self.cost[v.index()]
    }

    pub fn as_slice(&self) -> &[Option<W>] {
        &self.cost
    }

    pub fn reachable(&self) -> impl Iterator<Item = (NodeId, W)> + '_ {
        self.cost
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|c| (NodeId::new(i), c)))
    }
}

/// A loop-free path and its total cost.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplePath<W> {
    pub cost: W,
    pub nodes: Vec<NodeId>,
}

impl<W: Weight> SimplePath<W> {
    pub fn hops(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn target(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Dijkstra over an implicit graph given by a successor function.
pub(crate) fn dijkstra_by<W, F, I>(n: usize, source: NodeId, mut successors: F) -> Vec<Option<W>>
where
    W: Weight,
    F: FnMut(NodeId) -> I,
    I: IntoIterator<Item = (NodeId, W)>,
{
    let mut dist: Vec<Option<W>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source.index()] = Some(W::zero());
    heap.push(Reverse((W::zero(), source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if done[u.index()] {
            continue;
        }
        done[u.index()] = true;
        for (v, w) in successors(u) {
            if done[v.index()] {
                continue;
            }
            let nd = d + w;
            if dist[v.index()].is_none_or(|old| nd < old) {
                dist[v.index()] = Some(nd);
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// Exact shortest-path costs from `source` to every node of its component.
pub fn dijkstra<W: Weight>(topology: &Topology<W>, source: NodeId) -> CostTable<W> {
    let cost = dijkstra_by(topology.node_count(), source, |u| topology.neighbors(u).iter().copied());
    CostTable { source, cost }
}

/// Dijkstra on the topology with node `excluded` and all its links removed.
pub fn dijkstra_excluding<W: Weight>(topology: &Topology<W>, source: NodeId, excluded: NodeId) -> CostTable<W> {
    assert_ne!(source, excluded, "cannot start from the excluded node");
    let cost = dijkstra_by(topology.node_count(), source, |u| {
        topology
            .neighbors(u)
            .iter()
            .copied()
            .filter(move |&(v, _)| v != excluded)
    });
    CostTable { source, cost }
}

/// For each neighbor of `x` (ascending id), its cost table in the topology
/// with `x` removed. Destinations reachable only through `x` are absent.
pub fn neighbor_costs_excluding<W: Weight>(topology: &Topology<W>, x: NodeId) -> Vec<(NodeId, CostTable<W>)> {
    topology
        .neighbors(x)
        .iter()
        .map(|&(n, _)| (n, dijkstra_excluding(topology, n, x)))
        .collect()
}

/// A weighted directed graph with forward and reverse adjacency.
///
/// Both lists stay sorted by node id. At most one arc per ordered pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph<W> {
    out: Vec<Vec<(NodeId, W)>>,
    inc: Vec<Vec<(NodeId, W)>>,
    arcs: usize,
}

impl<W: Weight> Digraph<W> {
    pub fn new(n: usize) -> Self {
        Digraph {
            out: vec![Vec::new(); n],
            inc: vec![Vec::new(); n],
            arcs: 0,
        }
    }

    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (NodeId, NodeId, W)>) -> Self {
        let mut g = Digraph::new(n);
        for (u, v, w) in arcs {
            g.insert_arc(u, v, w);
        }
        g
    }

    /// Both directions of every topology link.
    pub fn from_topology(topology: &Topology<W>) -> Self {
        Self::from_topology_filtered(topology, |_, _| true)
    }

    /// Both directions of every link for which `keep(a, b)` holds.
    pub fn from_topology_filtered(topology: &Topology<W>, mut keep: impl FnMut(NodeId, NodeId) -> bool) -> Self {
        let mut g = Digraph::new(topology.node_count());
        for l in topology.links() {
            if keep(l.a, l.b) {
                g.insert_arc(l.a, l.b, l.weight);
                g.insert_arc(l.b, l.a, l.weight);
            }
        }
        g
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs
    }

    #[inline]
    pub fn successors(&self, u: NodeId) -> &[(NodeId, W)] {
        &self.out[u.index()]
    }

    #[inline]
    pub fn predecessors(&self, v: NodeId) -> &[(NodeId, W)] {
        &self.inc[v.index()]
    }

    pub fn arc_weight(&self, u: NodeId, v: NodeId) -> Option<W> {
        let list = &self.out[u.index()];
        list.binary_search_by_key(&v, |&(x, _)| x).ok().map(|i| list[i].1)
    }

    pub fn has_arc(&self, u: NodeId, v: NodeId) -> bool {
        self.arc_weight(u, v).is_some()
    }

    /// Adds `u -> v`. Returns `false` if the arc already existed.
    pub fn insert_arc(&mut self, u: NodeId, v: NodeId, w: W) -> bool {
        let out = &mut self.out[u.index()];
        match out.binary_search_by_key(&v, |&(x, _)| x) {
            Ok(_) => false,
            Err(i) => {
                out.insert(i, (v, w));
                let inc = &mut self.inc[v.index()];
                let j = inc.binary_search_by_key(&u, |&(x, _)| x).unwrap_err();
                inc.insert(j, (u, w));
                self.arcs += 1;
                true
            }
        }
    }

    /// Removes `u -> v`, returning its weight if it was present.
    pub fn remove_arc(&mut self, u: NodeId, v: NodeId) -> Option<W> {
        let out = &mut self.out[u.index()];
        let i = out.binary_search_by_key(&v, |&(x, _)| x).ok()?;
        let (_, w) = out.remove(i);
        let inc = &mut self.inc[v.index()];
        let j = inc
            .binary_search_by_key(&u, |&(x, _)| x)
            .expect("reverse adjacency out of sync");
        inc.remove(j);
        self.arcs -= 1;
        Some(w)
    }

    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId, W)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().map(move |&(v, w)| (NodeId::new(u), v, w)))
    }
}

/// Reusable state for repeated bidirectional reachability queries.
///
/// Marks are epoch-stamped so a query never clears the whole array.
#[derive(Debug, Default)]
pub struct ReachabilityScratch {
    fwd: Vec<u32>,
    bwd: Vec<u32>,
    epoch: u32,
    fwd_frontier: Vec<NodeId>,
    bwd_frontier: Vec<NodeId>,
    next: Vec<NodeId>,
}

impl ReachabilityScratch {
    pub fn new() -> Self {
        Self::default()
    }

    fn begin(&mut self, n: usize) {
        if self.fwd.len() < n {
            self.fwd.resize(n, 0);
            self.bwd.resize(n, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.fwd.iter_mut().for_each(|m| *m = 0);
            self.bwd.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        self.fwd_frontier.clear();
        self.bwd_frontier.clear();
    }

    /// Bidirectional BFS: forward from `from`, backward from `to`, always
    /// expanding the smaller frontier by one level.
    pub fn is_reachable<W: Weight>(&mut self, g: &Digraph<W>, from: NodeId, to: NodeId) -> bool {
        if from == to {
            return true;
        }
        self.begin(g.node_count());
        let epoch = self.epoch;
        self.fwd[from.index()] = epoch;
        self.bwd[to.index()] = epoch;
        self.fwd_frontier.push(from);
        self.bwd_frontier.push(to);

        while !self.fwd_frontier.is_empty() && !self.bwd_frontier.is_empty() {
            let forward = self.fwd_frontier.len() <= self.bwd_frontier.len();
            self.next.clear();
            if forward {
                for &u in &self.fwd_frontier {
                    for &(v, _) in g.successors(u) {
                        if self.bwd[v.index()] == epoch {
                            return true;
                        }
                        if self.fwd[v.index()] != epoch {
                            self.fwd[v.index()] = epoch;
                            self.next.push(v);
                        }
                    }
                }
                std::mem::swap(&mut self.fwd_frontier, &mut self.next);
            } else {
                for &u in &self.bwd_frontier {
                    for &(v, _) in g.predecessors(u) {
                        if self.fwd[v.index()] == epoch {
                            return true;
                        }
                        if self.bwd[v.index()] != epoch {
                            self.bwd[v.index()] = epoch;
                            self.next.push(v);
                        }
                    }
                }
                std::mem::swap(&mut self.bwd_frontier, &mut self.next);
            }
        }
        false
    }
}

/// True iff a directed path `from -> to` exists (the empty path counts).
pub fn is_reachable<W: Weight>(g: &Digraph<W>, from: NodeId, to: NodeId) -> bool {
    ReachabilityScratch::new().is_reachable(g, from, to)
}

/// Arcs and nodes a path search must avoid.
#[derive(Debug, Default)]
struct Bans {
    nodes: Vec<bool>,
    arcs: HashSet<(NodeId, NodeId)>,
}

impl Bans {
    fn none(n: usize) -> Self {
        Bans {
            nodes: vec![false; n],
            arcs: HashSet::new(),
        }
    }

    #[inline]
    fn allows(&self, u: NodeId, v: NodeId) -> bool {
        !self.nodes[v.index()] && !self.arcs.contains(&(u, v))
    }
}

/// Cheapest path `src -> dst`; among equally cheap paths the
/// lexicographically smallest node sequence.
fn lex_min_shortest_path<W: Weight>(g: &Digraph<W>, src: NodeId, dst: NodeId, bans: &Bans) -> Option<SimplePath<W>> {
    if bans.nodes[src.index()] || bans.nodes[dst.index()] {
        return None;
    }
    // costs to dst over reversed arcs
    let to_dst = dijkstra_by(g.node_count(), dst, |v| {
        g.predecessors(v)
            .iter()
            .copied()
            .filter(move |&(u, _)| bans.allows(u, v))
    });
    let total = to_dst[src.index()]?;
    let mut nodes = vec![src];
    let mut u = src;
    while u != dst {
        let here = to_dst[u.index()].expect("walk stays on reachable nodes");
        let &(v, _) = g
            .successors(u)
            .iter()
            .find(|&&(v, w)| bans.allows(u, v) && to_dst[v.index()].is_some_and(|d| w + d == here))
            .expect("a shortest-path successor exists");
        nodes.push(v);
        u = v;
    }
    Some(SimplePath { cost: total, nodes })
}

/// Cheapest path in `g` from `src` to `dst`, ties broken by smallest node
/// sequence.
pub fn shortest_path<W: Weight>(g: &Digraph<W>, src: NodeId, dst: NodeId) -> Option<SimplePath<W>> {
    lex_min_shortest_path(g, src, dst, &Bans::none(g.node_count()))
}

/// The `k` cheapest simple paths `src -> dst` in ascending order of
/// `(cost, node sequence)`, using Yen's deviation algorithm.
///
/// Undirected graphs are passed as [`Digraph::from_topology`]. Returns fewer
/// than `k` paths when fewer exist.
pub fn yen_k_shortest<W: Weight>(g: &Digraph<W>, src: NodeId, dst: NodeId, k: usize) -> Vec<SimplePath<W>> {
    assert!(k >= 1, "k must be at least 1");
    let n = g.node_count();
    let Some(first) = shortest_path(g, src, dst) else {
        return Vec::new();
    };
    let mut found = vec![first];
    let mut candidates: BTreeSet<SimplePath<W>> = BTreeSet::new();

    while found.len() < k {
        let prev = found.last().unwrap().nodes.clone();
        let mut root_cost = W::zero();
        for i in 0..prev.len() - 1 {
            let spur = prev[i];
            let root = &prev[..=i];
            let mut bans = Bans::none(n);
            for &r in &root[..i] {
                bans.nodes[r.index()] = true;
            }
            for p in &found {
                if p.nodes.len() > i + 1 && p.nodes[..=i] == *root {
                    bans.arcs.insert((p.nodes[i], p.nodes[i + 1]));
                }
            }
            if let Some(spur_path) = lex_min_shortest_path(g, spur, dst, &bans) {
                let mut nodes = root[..i].to_vec();
                nodes.extend_from_slice(&spur_path.nodes);
                candidates.insert(SimplePath {
                    cost: root_cost + spur_path.cost,
                    nodes,
                });
            }
            root_cost = root_cost + g.arc_weight(prev[i], prev[i + 1]).expect("path arc exists");
        }
        match candidates.pop_first() {
            Some(next) => found.push(next),
            None => break,
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Milli;

    fn ring(n: usize) -> Topology<Milli> {
        Topology::from_links(n, (0..n).map(|i| (i, (i + 1) % n, 1000))).unwrap()
    }

    fn ids(v: &[usize]) -> Vec<NodeId> {
        v.iter().map(|&i| NodeId::new(i)).collect()
    }

    #[test]
    fn dijkstra_triangle() {
        let t = ring(3);
        let c = dijkstra(&t, NodeId::new(0));
        assert_eq!(c.as_slice(), &[Some(0), Some(1000), Some(1000)]);
        assert_eq!(c.source(), NodeId::new(0));
    }

    #[test]
    fn dijkstra_leaves_other_components_absent() {
        let t = Topology::<Milli>::from_links(4, [(0, 1, 500), (2, 3, 500)]).unwrap();
        let c = dijkstra(&t, NodeId::new(0));
        assert_eq!(c.as_slice(), &[Some(0), Some(500), None, None]);
    }

    #[test]
    fn excising_cut_vertex() {
        let t = Topology::<Milli>::from_links(3, [(0, 1, 1000), (1, 2, 1000)]).unwrap();
        let tables = neighbor_costs_excluding(&t, NodeId::new(1));
        assert_eq!(tables.len(), 2);
        let (n0, c0) = &tables[0];
        assert_eq!(*n0, NodeId::new(0));
        assert_eq!(c0.as_slice(), &[Some(0), None, None]);
    }

    #[test]
    fn excised_loop_back_case() {
        // ids: D=0, 1=1, X=2, 0'=3, 3'=4
        let t = Topology::<Milli>::from_links(
            5,
            [(0, 1, 1000), (1, 2, 1000), (2, 3, 1000), (2, 4, 1000), (3, 4, 1000)],
        )
        .unwrap();
        let x = NodeId::new(2);
        let d = NodeId::new(0);
        let tables = neighbor_costs_excluding(&t, x);
        let by: Vec<_> = tables.iter().map(|(n, c)| (n.index(), c.get(d))).collect();
        assert_eq!(by, vec![(1, Some(1000)), (3, None), (4, None)]);
    }

    #[test]
    fn excised_ring_goes_the_long_way() {
        let t = ring(6);
        for x in t.nodes() {
            for (nb, table) in neighbor_costs_excluding(&t, x) {
                assert_eq!(table.get(x), None);
                for v in t.nodes().filter(|&v| v != x) {
                    // remaining graph is a path of 5 nodes; distance is the index gap
                    let pos = |u: NodeId| (u.index() + 6 - x.index()) % 6;
                    let expect = (pos(nb) as i64 - pos(v) as i64).unsigned_abs() * 1000;
                    assert_eq!(table.get(v), Some(expect));
                }
            }
        }
    }

    #[test]
    fn reachability_respects_direction() {
        let g = Digraph::<Milli>::from_arcs(
            3,
            [(NodeId::new(0), NodeId::new(1), 1), (NodeId::new(1), NodeId::new(2), 1)],
        );
        assert!(is_reachable(&g, NodeId::new(0), NodeId::new(2)));
        assert!(!is_reachable(&g, NodeId::new(2), NodeId::new(0)));
        for v in 0..3 {
            assert!(is_reachable(&g, NodeId::new(v), NodeId::new(v)));
        }
    }

    #[test]
    fn digraph_insert_remove() {
        let mut g = Digraph::<Milli>::new(3);
        let (a, b) = (NodeId::new(0), NodeId::new(2));
        assert!(g.insert_arc(a, b, 5));
        assert!(!g.insert_arc(a, b, 7));
        assert_eq!(g.arc_weight(a, b), Some(5));
        assert_eq!(g.predecessors(b), &[(a, 5)]);
        assert_eq!(g.remove_arc(a, b), Some(5));
        assert_eq!(g.remove_arc(a, b), None);
        assert_eq!(g.arc_count(), 0);
        assert!(g.predecessors(b).is_empty());
    }

    #[test]
    fn yen_ring_of_five() {
        let g = Digraph::from_topology(&ring(5));
        let paths = yen_k_shortest(&g, NodeId::new(0), NodeId::new(1), 2);
        assert_eq!(paths.iter().map(|p| p.cost).collect::<Vec<_>>(), vec![1000, 4000]);
        let paths = yen_k_shortest(&g, NodeId::new(0), NodeId::new(1), 3);
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[1].nodes, ids(&[0, 4, 3, 2, 1]));
    }

    #[test]
    fn yen_triangle() {
        let g = Digraph::from_topology(&ring(3));
        let paths = yen_k_shortest(&g, NodeId::new(0), NodeId::new(2), 10);
        assert_eq!(paths.len(), 2);
        assert_eq!(
            paths[0],
            SimplePath {
                cost: 1000,
                nodes: ids(&[0, 2])
            }
        );
        assert_eq!(
            paths[1],
            SimplePath {
                cost: 2000,
                nodes: ids(&[0, 1, 2])
            }
        );
    }

    #[test]
    fn yen_breaks_ties_lexicographically() {
        // square 0-1-3, 0-2-3: two equal-cost paths
        let t = Topology::<Milli>::from_links(4, [(0, 2, 1), (2, 3, 1), (0, 1, 1), (1, 3, 1)]).unwrap();
        let g = Digraph::from_topology(&t);
        let paths = yen_k_shortest(&g, NodeId::new(0), NodeId::new(3), 1);
        assert_eq!(paths[0].nodes, ids(&[0, 1, 3]));
        let paths = yen_k_shortest(&g, NodeId::new(0), NodeId::new(3), 5);
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[1].nodes, ids(&[0, 2, 3]));
    }

    #[test]
    fn yen_unreachable_is_empty() {
        let g = Digraph::<Milli>::from_arcs(2, [(NodeId::new(1), NodeId::new(0), 1)]);
        assert!(yen_k_shortest(&g, NodeId::new(0), NodeId::new(1), 3).is_empty());
        let same = yen_k_shortest(&g, NodeId::new(0), NodeId::new(0), 3);
        assert_eq!(
            same,
            vec![SimplePath {
                cost: 0,
                nodes: ids(&[0])
            }]
        );
    }
}
