//! Loop removal and dead-end pruning over upward nexthops, and the assembled
//! LFID pipeline.
//!
//! After [`fill_fib`](crate::fib::fill_fib), every destination is processed on its own: upward
//! entries are loop-checked one at a time in priority order, then upward
//! entries that lead into a node whose only option is to bounce the packet
//! straight back are pruned to a fixpoint. Downward entries are never touched.
//!
//! With the incoming port excluded at every hop, the surviving FIB admits no
//! forwarding loop: every cycle must contain an upward arc `x -> n`, and the
//! loop check guarantees that `n` cannot reach `x` without the arc `n -> x`,
//! which would be an immediate return.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet, VecDeque};

use rayon::prelude::*;

use crate::fib::{fill_fib_with, AllNodeFib, Classification, DestinationFib, NexthopEntry};
use crate::shortest_paths::{Digraph, ReachabilityScratch};
use crate::topology::{NodeId, Topology};
use crate::weight::Weight;

/// The arcs induced by one destination's FIB entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DestinationDigraph<W> {
    destination: NodeId,
    graph: Digraph<W>,
}

impl<W: Weight> DestinationDigraph<W> {
    pub fn from_fib(fib: &AllNodeFib<W>, destination: NodeId, topology: &Topology<W>) -> Self {
        DestinationDigraph {
            destination,
            graph: fib.digraph(destination, topology),
        }
    }

    fn from_destination_fib(dfib: &DestinationFib<W>, destination: NodeId, topology: &Topology<W>) -> Self {
        let mut graph = Digraph::new(topology.node_count());
        for x in topology.nodes() {
            for e in dfib.list(x) {
                graph.insert_arc(x, e.neighbor, link_weight(topology, x, e.neighbor));
            }
        }
        DestinationDigraph { destination, graph }
    }

    pub fn destination(&self) -> NodeId {
        self.destination
    }

    pub fn graph(&self) -> &Digraph<W> {
        &self.graph
    }

    pub fn into_graph(self) -> Digraph<W> {
        self.graph
    }
}

fn link_weight<W: Weight>(topology: &Topology<W>, a: NodeId, b: NodeId) -> W {
    topology
        .weight(a, b)
        .expect("FIB entry over a link missing from the topology")
}

/// Queue element for loop removal.
///
/// Ordered so that the max-heap pops the node with the most remaining
/// nexthops, then the costliest unexamined upward entry, then the lowest id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodePriority<W> {
    pub node: NodeId,
    /// Downward plus upward entries the node currently holds.
    pub remaining_total_nexthops: usize,
    /// Upward entries not yet loop-checked, costliest first (ties by
    /// ascending neighbor id).
    pub upward_set: Vec<NexthopEntry<W>>,
}

impl<W: Weight> NodePriority<W> {
    fn costliest_upward(&self) -> Option<&NexthopEntry<W>> {
        self.upward_set.first()
    }

    fn key(&self) -> (usize, Option<W>, Reverse<NodeId>) {
        (
            self.remaining_total_nexthops,
            self.costliest_upward().map(|e| e.cost),
            Reverse(self.node),
        )
    }
}

impl<W: Weight> Ord for NodePriority<W> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl<W: Weight> PartialOrd for NodePriority<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Counters from one destination's loop removal.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoopRemovalStats {
    pub examined: usize,
    pub removed: usize,
}

/// Loop-checks every upward entry toward `destination` once, deleting
/// those whose target can reach back to the entry's owner.
pub fn remove_loops_for_destination<W: Weight>(
    dfib: &mut DestinationFib<W>,
    destination: NodeId,
    topology: &Topology<W>,
) -> LoopRemovalStats {
    let mut dg = DestinationDigraph::from_destination_fib(dfib, destination, topology);
    let mut scratch = ReachabilityScratch::new();
    let mut stats = LoopRemovalStats::default();

    let mut queue: BinaryHeap<NodePriority<W>> = topology
        .nodes()
        .filter_map(|x| {
            let list = dfib.list(x);
            let mut upward: Vec<_> = list.iter().filter(|e| e.is_upward()).copied().collect();
            if upward.is_empty() {
                return None;
            }
            upward.sort_by_key(|e| (Reverse(e.cost), e.neighbor));
            Some(NodePriority {
                node: x,
                remaining_total_nexthops: list.len(),
                upward_set: upward,
            })
        })
        .collect();

    while let Some(mut prio) = queue.pop() {
        let x = prio.node;
        let nh = prio.upward_set.remove(0);
        stats.examined += 1;

        let reverse = dg.graph.remove_arc(nh.neighbor, x);
        if scratch.is_reachable(&dg.graph, nh.neighbor, x) {
            dfib.remove(x, nh.neighbor).expect("examined entry is in the FIB");
            dg.graph.remove_arc(x, nh.neighbor);
            prio.remaining_total_nexthops -= 1;
            stats.removed += 1;
        }
        // only restore an arc that existed before the check
        if let Some(w) = reverse {
            dg.graph.insert_arc(nh.neighbor, x, w);
        }

        if !prio.upward_set.is_empty() {
            queue.push(prio);
        }
    }
    debug_assert_eq!(dg.graph.successors(destination).len(), 0);
    stats
}

/// Deletes, to a fixpoint, every upward entry `x -> n` where `n`'s only
/// entry leads straight back to `x`. Returns the number of deletions.
pub fn remove_dead_ends_for_destination<W: Weight>(dfib: &mut DestinationFib<W>) -> usize {
    let n_nodes = dfib.node_count();
    let mut queue: VecDeque<(NodeId, NodeId)> = dfib.upward_entries().map(|(x, e)| (x, e.neighbor)).collect();
    let mut queued: HashSet<(NodeId, NodeId)> = queue.iter().copied().collect();
    let mut removed = 0;

    while let Some((x, n)) = queue.pop_front() {
        queued.remove(&(x, n));
        let target = dfib.list(n);
        if target.len() == 1 && target[0].neighbor == x {
            dfib.remove(x, n);
            removed += 1;
            // x lost an option, so upward entries into x may now be dead ends
            for y in (0..n_nodes).map(NodeId::new) {
                let points_in = dfib.list(y).iter().any(|e| e.neighbor == x && e.is_upward());
                if points_in && queued.insert((y, x)) {
                    queue.push_back((y, x));
                }
            }
        }
    }
    removed
}

/// Loop removal over every destination (in parallel).
pub fn remove_loops<W: Weight>(fib: AllNodeFib<W>, topology: &Topology<W>) -> AllNodeFib<W> {
    let per_dest = fib
        .into_destinations()
        .into_par_iter()
        .enumerate()
        .map(|(d, mut dfib)| {
            remove_loops_for_destination(&mut dfib, NodeId::new(d), topology);
            dfib
        })
        .collect();
    AllNodeFib::from_destinations(per_dest)
}

/// Dead-end pruning over every destination (in parallel).
pub fn remove_dead_ends<W: Weight>(fib: AllNodeFib<W>) -> AllNodeFib<W> {
    let per_dest = fib
        .into_destinations()
        .into_par_iter()
        .map(|mut dfib| {
            remove_dead_ends_for_destination(&mut dfib);
            dfib
        })
        .collect();
    AllNodeFib::from_destinations(per_dest)
}

/// Fill, loop removal and dead-end pruning, in that order.
pub fn compute_lfid<W: Weight>(topology: &Topology<W>) -> AllNodeFib<W> {
    compute_lfid_with(topology, Classification::Excised)
}

pub fn compute_lfid_with<W: Weight>(topology: &Topology<W>, classification: Classification) -> AllNodeFib<W> {
    let fib = fill_fib_with(topology, classification);
    let fib = remove_loops(fib, topology);
    remove_dead_ends(fib)
}
