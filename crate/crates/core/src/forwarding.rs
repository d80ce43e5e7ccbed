//! Inport-dependent forwarding: which nexthops a router may use for a packet,
//! exhaustive loop checking, and reachability under link and node failures.

use std::collections::BTreeSet;

use crate::fib::{AllNodeFib, NexthopEntry};
use crate::shortest_paths::{is_reachable, shortest_path, Digraph, SimplePath};
use crate::topology::{NodeId, Topology};
use crate::weight::Weight;

/// A packet in flight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForwardingState {
    pub current: NodeId,
    /// The neighbor the packet arrived from; `None` at the source.
    pub inport: Option<NodeId>,
    pub destination: NodeId,
    /// Nodes traversed so far, from the source up to `current`.
    pub visited: Vec<NodeId>,
}

impl ForwardingState {
    pub fn start(source: NodeId, destination: NodeId) -> Self {
        ForwardingState {
            current: source,
            inport: None,
            destination,
            visited: vec![source],
        }
    }

    /// Moves the packet to `next`.
    pub fn advance(&mut self, next: NodeId) {
        self.inport = Some(self.current);
        self.current = next;
        self.visited.push(next);
    }
}

/// Failed (or congested) links and nodes. Link failures are bidirectional.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, serde::Serialize)]
pub struct FailureSet {
    #[serde(rename = "failed_links")]
    links: BTreeSet<(NodeId, NodeId)>,
    #[serde(rename = "failed_nodes")]
    nodes: BTreeSet<NodeId>,
}

impl FailureSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn link(a: NodeId, b: NodeId) -> Self {
        let mut f = Self::new();
        f.fail_link(a, b);
        f
    }

    pub fn node(v: NodeId) -> Self {
        let mut f = Self::new();
        f.fail_node(v);
        f
    }

    pub fn fail_link(&mut self, a: NodeId, b: NodeId) -> bool {
        self.links.insert((a.min(b), a.max(b)))
    }

    pub fn fail_node(&mut self, v: NodeId) -> bool {
        self.nodes.insert(v)
    }

    pub fn link_failed(&self, a: NodeId, b: NodeId) -> bool {
        self.links.contains(&(a.min(b), a.max(b)))
    }

    pub fn node_failed(&self, v: NodeId) -> bool {
        self.nodes.contains(&v)
    }

    /// Whether a packet can cross from `u` to `v`.
    pub fn arc_usable(&self, u: NodeId, v: NodeId) -> bool {
        !self.link_failed(u, v) && !self.node_failed(u) && !self.node_failed(v)
    }

    pub fn failed_links(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.links.iter().copied()
    }

    pub fn failed_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty() && self.nodes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.links.len() + self.nodes.len()
    }
}

/// The entries a router may use for this packet: its FIB list minus the
/// inport and anything over a failed link or toward a failed node, in
/// ascending cost order.
pub fn viable_nexthops<W: Weight>(
    fib: &AllNodeFib<W>,
    state: &ForwardingState,
    failures: &FailureSet,
) -> Vec<NexthopEntry<W>> {
    fib.entries(state.current, state.destination)
        .iter()
        .filter(|e| Some(e.neighbor) != state.inport && failures.arc_usable(state.current, e.neighbor))
        .copied()
        .collect()
}

/// Result of exhaustive walk enumeration for one destination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WalkVerdict {
    LoopFree,
    /// A walk whose last node repeats an earlier one.
    Counterexample(Vec<NodeId>),
}

impl WalkVerdict {
    pub fn is_loop_free(&self) -> bool {
        matches!(self, WalkVerdict::LoopFree)
    }
}

/// Follows every sequence of nexthop choices from every start node, with the
/// inport excluded at each hop and no failures, and reports the first walk
/// that revisits a node.
///
/// A walk longer than `n - 1` arcs must revisit a node, so the search depth
/// is bounded by the node count. Cost grows with the number of walks; meant
/// for small topologies.
pub fn enumerate_all_walks<W: Weight>(fib: &AllNodeFib<W>, destination: NodeId) -> WalkVerdict {
    let n = fib.node_count();
    let mut on_walk = vec![false; n];
    let mut walk = Vec::with_capacity(n + 1);
    for start in (0..n).map(NodeId::new) {
        if start == destination {
            continue;
        }
        on_walk[start.index()] = true;
        walk.push(start);
        let found = explore(fib, destination, None, &mut on_walk, &mut walk);
        if found {
            return WalkVerdict::Counterexample(walk);
        }
        walk.pop();
        on_walk[start.index()] = false;
    }
    WalkVerdict::LoopFree
}

/// Depth-first continuation of `walk`; on a revisit, leaves the offending
/// walk in place and returns `true`.
fn explore<W: Weight>(
    fib: &AllNodeFib<W>,
    destination: NodeId,
    inport: Option<NodeId>,
    on_walk: &mut [bool],
    walk: &mut Vec<NodeId>,
) -> bool {
    let current = *walk.last().unwrap();
    for e in fib.entries(current, destination) {
        let next = e.neighbor;
        if Some(next) == inport {
            continue;
        }
        walk.push(next);
        if on_walk[next.index()] {
            return true;
        }
        on_walk[next.index()] = true;
        if explore(fib, destination, Some(current), on_walk, walk) {
            return true;
        }
        on_walk[next.index()] = false;
        walk.pop();
    }
    false
}

/// Where rerouting starts after a failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vantage {
    /// The router adjacent to the failure.
    Adjacent(NodeId),
    /// The packet is backtracked to the source.
    Source,
}

/// The destination's FIB arcs that survive `failures`, weighted by link weight.
pub fn filtered_digraph<W: Weight>(
    fib: &AllNodeFib<W>,
    topology: &Topology<W>,
    destination: NodeId,
    failures: &FailureSet,
) -> Digraph<W> {
    let d = fib.destination(destination);
    let mut g = Digraph::new(topology.node_count());
    for x in topology.nodes() {
        if failures.node_failed(x) {
            continue;
        }
        for e in d.list(x) {
            if failures.arc_usable(x, e.neighbor) {
                let w = topology.weight(x, e.neighbor).expect("FIB entry over a topology link");
                g.insert_arc(x, e.neighbor, w);
            }
        }
    }
    g
}

/// True iff the failure-filtered FIB digraph has a path from the vantage
/// node to `dst`.
pub fn recovery_exists<W: Weight>(
    fib: &AllNodeFib<W>,
    topology: &Topology<W>,
    src: NodeId,
    dst: NodeId,
    failures: &FailureSet,
    vantage: Vantage,
) -> bool {
    let from = match vantage {
        Vantage::Adjacent(v) => v,
        Vantage::Source => src,
    };
    assert_ne!(from, dst, "vantage node must differ from the destination");
    assert!(
        !failures.node_failed(src) && !failures.node_failed(dst),
        "source and destination cannot fail"
    );
    if failures.node_failed(from) {
        return false;
    }
    is_reachable(&filtered_digraph(fib, topology, dst, failures), from, dst)
}

/// Cheapest directed path `from -> dst` in the failure-filtered FIB digraph.
pub fn cheapest_recovery_path<W: Weight>(
    fib: &AllNodeFib<W>,
    topology: &Topology<W>,
    dst: NodeId,
    from: NodeId,
    failures: &FailureSet,
) -> Option<SimplePath<W>> {
    if failures.node_failed(from) {
        return None;
    }
    shortest_path(&filtered_digraph(fib, topology, dst, failures), from, dst)
}

/// How a greedily forwarded packet ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForwardOutcome {
    Delivered(Vec<NodeId>),
    /// No viable nexthop at the last node of the walk.
    Stuck(Vec<NodeId>),
    /// The walk revisited its last node.
    Looped(Vec<NodeId>),
}

impl ForwardOutcome {
    pub fn delivered(&self) -> bool {
        matches!(self, ForwardOutcome::Delivered(_))
    }
}

/// Forwards a packet from `src`, always taking the cheapest viable entry.
pub fn greedy_forward<W: Weight>(
    fib: &AllNodeFib<W>,
    src: NodeId,
    dst: NodeId,
    failures: &FailureSet,
) -> ForwardOutcome {
    let mut state = ForwardingState::start(src, dst);
    let mut seen = vec![false; fib.node_count()];
    seen[src.index()] = true;
    while state.current != dst {
        let Some(next) = viable_nexthops(fib, &state, failures).first().map(|e| e.neighbor) else {
            return ForwardOutcome::Stuck(state.visited);
        };
        state.advance(next);
        if std::mem::replace(&mut seen[next.index()], true) {
            return ForwardOutcome::Looped(state.visited);
        }
    }
    ForwardOutcome::Delivered(state.visited)
}
