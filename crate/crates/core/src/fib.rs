//! Forwarding tables and the initial LFID fill step.
//!
//! A FIB maps every (node, destination) pair to a list of nexthop entries
//! sorted by `(cost, neighbor id)`. Storage is destination-major so that the
//! per-destination pruning stages can mutate destinations independently.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::shortest_paths::{dijkstra, neighbor_costs_excluding, CostTable, Digraph};
use crate::topology::{NodeId, Topology};
use crate::weight::Weight;
use crate::Milli;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NexthopKind {
    /// Neighbor strictly closer to the destination.
    Downward,
    /// Neighbor at equal or greater distance that reaches the destination
    /// without passing back through this node.
    Upward,
}

impl NexthopKind {
    pub fn token(self) -> &'static str {
        match self {
            NexthopKind::Downward => "DW",
            NexthopKind::Upward => "UW",
        }
    }
}

/// One FIB row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NexthopEntry<W> {
    pub neighbor: NodeId,
    /// Cost of the cheapest path to the destination through `neighbor`.
    pub cost: W,
    pub kind: NexthopKind,
    /// Traffic share in per-mille. Carried as data only; nothing sets it.
    pub split_permille: Option<u16>,
}

impl<W> NexthopEntry<W> {
    pub fn new(neighbor: NodeId, cost: W, kind: NexthopKind) -> Self {
        NexthopEntry {
            neighbor,
            cost,
            kind,
            split_permille: None,
        }
    }

    pub fn is_upward(&self) -> bool {
        self.kind == NexthopKind::Upward
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FibError {
    #[error("node {0} cannot use itself as a nexthop")]
    SelfNexthop(NodeId),
    #[error("destination {0} cannot hold entries toward itself")]
    EntryAtDestination(NodeId),
    #[error("duplicate entry at node {node} for destination {dest} via {neighbor}")]
    DuplicateEntry {
        node: NodeId,
        dest: NodeId,
        neighbor: NodeId,
    },
    #[error("node {0} is outside the FIB's node range")]
    UnknownNode(NodeId),
}

/// Entry lists of every node toward a single destination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DestinationFib<W> {
    lists: Vec<Vec<NexthopEntry<W>>>,
}

impl<W: Weight> DestinationFib<W> {
    pub fn node_count(&self) -> usize {
        self.lists.len()
    }

    #[inline]
    pub fn list(&self, node: NodeId) -> &[NexthopEntry<W>] {
        &self.lists[node.index()]
    }

    pub fn contains(&self, node: NodeId, neighbor: NodeId) -> bool {
        self.lists[node.index()].iter().any(|e| e.neighbor == neighbor)
    }

    /// Removes the entry `node -> neighbor`, returning it if present.
    pub fn remove(&mut self, node: NodeId, neighbor: NodeId) -> Option<NexthopEntry<W>> {
        let list = &mut self.lists[node.index()];
        let i = list.iter().position(|e| e.neighbor == neighbor)?;
        Some(list.remove(i))
    }

    /// `(node, entry)` for every upward entry, by node then list order.
    pub fn upward_entries(&self) -> impl Iterator<Item = (NodeId, &NexthopEntry<W>)> {
        self.lists
            .iter()
            .enumerate()
            .flat_map(|(x, list)| list.iter().filter(|e| e.is_upward()).map(move |e| (NodeId::new(x), e)))
    }

    pub fn entry_count(&self) -> usize {
        self.lists.iter().map(Vec::len).sum()
    }
}

/// The FIB of every node toward every destination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllNodeFib<W> {
    per_dest: Vec<DestinationFib<W>>,
}

impl<W: Weight> AllNodeFib<W> {
    /// An FIB over `n` nodes with no entries.
    pub fn empty(n: usize) -> Self {
        AllNodeFib {
            per_dest: (0..n)
                .map(|_| DestinationFib {
                    lists: vec![Vec::new(); n],
                })
                .collect(),
        }
    }

    /// Assembles an FIB from `(node, destination, entry)` triples, sorting
    /// each list by `(cost, neighbor)`.
    pub fn from_entries(
        n: usize,
        entries: impl IntoIterator<Item = (NodeId, NodeId, NexthopEntry<W>)>,
    ) -> Result<Self, FibError> {
        let mut fib = Self::empty(n);
        for (node, dest, entry) in entries {
            for v in [node, dest, entry.neighbor] {
                if v.index() >= n {
                    return Err(FibError::UnknownNode(v));
                }
            }
            if entry.neighbor == node {
                return Err(FibError::SelfNexthop(node));
            }
            if node == dest {
                return Err(FibError::EntryAtDestination(dest));
            }
            let d = &mut fib.per_dest[dest.index()];
            if d.contains(node, entry.neighbor) {
                return Err(FibError::DuplicateEntry {
                    node,
                    dest,
                    neighbor: entry.neighbor,
                });
            }
            d.lists[node.index()].push(entry);
        }
        fib.sort_lists();
        Ok(fib)
    }

    pub(crate) fn from_destinations(per_dest: Vec<DestinationFib<W>>) -> Self {
        AllNodeFib { per_dest }
    }

    pub(crate) fn into_destinations(self) -> Vec<DestinationFib<W>> {
        self.per_dest
    }

    fn sort_lists(&mut self) {
        for d in &mut self.per_dest {
            for list in &mut d.lists {
                list.sort_by_key(|e| (e.cost, e.neighbor));
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.per_dest.len()
    }

    #[inline]
    pub fn entries(&self, node: NodeId, dest: NodeId) -> &[NexthopEntry<W>] {
        self.per_dest[dest.index()].list(node)
    }

    pub fn destination(&self, dest: NodeId) -> &DestinationFib<W> {
        &self.per_dest[dest.index()]
    }

    pub fn contains(&self, node: NodeId, dest: NodeId, neighbor: NodeId) -> bool {
        self.per_dest[dest.index()].contains(node, neighbor)
    }

    /// Every `(node, destination, entry)`, ordered by node, destination and
    /// then list order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId, &NexthopEntry<W>)> + '_ {
        let n = self.node_count();
        (0..n).flat_map(move |x| {
            (0..n).flat_map(move |d| {
                self.per_dest[d].lists[x]
                    .iter()
                    .map(move |e| (NodeId::new(x), NodeId::new(d), e))
            })
        })
    }

    pub fn entry_count(&self) -> usize {
        self.per_dest.iter().map(DestinationFib::entry_count).sum()
    }

    pub fn upward_count(&self) -> usize {
        self.per_dest.iter().map(|d| d.upward_entries().count()).sum()
    }

    /// The arcs `node -> nexthop` toward `dest`, weighted by link weight.
    pub fn digraph(&self, dest: NodeId, topology: &Topology<W>) -> Digraph<W> {
        let d = &self.per_dest[dest.index()];
        let mut g = Digraph::new(self.node_count());
        for x in topology.nodes() {
            for e in d.list(x) {
                let w = topology
                    .weight(x, e.neighbor)
                    .expect("FIB entry over a link missing from the topology");
                g.insert_arc(x, e.neighbor, w);
            }
        }
        g
    }
}

/// Comparison used to tag entries Downward or Upward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Classification {
    /// Compare the neighbor's cost with the current node removed against the
    /// current node's shortest-path cost.
    #[default]
    Excised,
    /// Compare the neighbor's full-graph shortest-path cost instead.
    FullGraph,
}

/// Fills every node's FIB with all neighbors that can reach the destination
/// without passing back through the node.
///
/// The entry cost is the link weight plus the neighbor's shortest-path cost
/// in the topology with the node removed. Neighbors that can only reach the
/// destination through the node are omitted.
pub fn fill_fib<W: Weight>(topology: &Topology<W>) -> AllNodeFib<W> {
    fill_fib_with(topology, Classification::Excised)
}

pub fn fill_fib_with<W: Weight>(topology: &Topology<W>, classification: Classification) -> AllNodeFib<W> {
    let n = topology.node_count();
    // rows[x][d] = entries of x toward d
    let rows: Vec<Vec<Vec<NexthopEntry<W>>>> = (0..n)
        .into_par_iter()
        .map(|x| fill_node(topology, NodeId::new(x), classification))
        .collect();

    let mut per_dest: Vec<DestinationFib<W>> = (0..n)
        .map(|_| DestinationFib {
            lists: Vec::with_capacity(n),
        })
        .collect();
    for row in rows {
        for (d, list) in row.into_iter().enumerate() {
            per_dest[d].lists.push(list);
        }
    }
    AllNodeFib { per_dest }
}

fn fill_node<W: Weight>(
    topology: &Topology<W>,
    x: NodeId,
    classification: Classification,
) -> Vec<Vec<NexthopEntry<W>>> {
    let n = topology.node_count();
    let own = dijkstra(topology, x);
    let excised = neighbor_costs_excluding(topology, x);
    let full: Vec<CostTable<W>> = match classification {
        Classification::Excised => Vec::new(),
        Classification::FullGraph => excised.iter().map(|(nb, _)| dijkstra(topology, *nb)).collect(),
    };

    let mut out = vec![Vec::new(); n];
    for d in topology.nodes() {
        if d == x {
            continue;
        }
        let Some(sp_cost) = own.get(d) else { continue };
        let list = &mut out[d.index()];
        for (i, (nb, table)) in excised.iter().enumerate() {
            let Some(nb_cost) = table.get(d) else { continue };
            let link = topology.weight(x, *nb).expect("neighbor is adjacent");
            let compared = match classification {
                Classification::Excised => nb_cost,
                Classification::FullGraph => full[i].get(d).expect("same component"),
            };
            let kind = if compared < sp_cost {
                NexthopKind::Downward
            } else {
                NexthopKind::Upward
            };
            list.push(NexthopEntry::new(*nb, link + nb_cost, kind));
        }
        list.sort_by_key(|e| (e.cost, e.neighbor));
    }
    out
}

/// One line of the FIB dump.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct FibRow {
    pub node: String,
    pub dest: String,
    pub nexthop: String,
    pub cost_milli: Milli,
    pub kind: &'static str,
}

/// Dump rows sorted by `(node, dest, cost, nexthop)` with node ids as order.
pub fn fib_rows(fib: &AllNodeFib<Milli>, topology: &Topology<Milli>) -> Vec<FibRow> {
    fib.iter()
        .map(|(x, d, e)| FibRow {
            node: topology.name(x),
            dest: topology.name(d),
            nexthop: topology.name(e.neighbor),
            cost_milli: e.cost,
            kind: e.kind.token(),
        })
        .collect()
}

/// Writes the FIB as CSV with columns `node,dest,nexthop,cost_milli,kind`.
pub fn write_fib_csv<Wr: Write>(
    fib: &AllNodeFib<Milli>,
    topology: &Topology<Milli>,
    out: Wr,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in fib_rows(fib, topology) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
