//! DAG baselines (ECMP, downward, downward+equal) and the algorithm selector.
//!
//! Every entry produced here is `Downward` with cost `w(x, n) + sp(n, d)`,
//! using full-graph shortest-path costs.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::fib::{AllNodeFib, NexthopEntry, NexthopKind};
use crate::lfid::compute_lfid;
use crate::shortest_paths::{dijkstra, CostTable};
use crate::topology::{NodeId, Topology};
use crate::weight::Weight;

/// Nexthop-set strategies. The two MARA variants are named slots only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Ecmp,
    Dw,
    Dwe,
    Lfid,
    MaraMc,
    MaraSpe,
}

impl Algorithm {
    /// The four strategies that can actually be computed.
    pub const IMPLEMENTED: [Algorithm; 4] = [Algorithm::Ecmp, Algorithm::Dw, Algorithm::Dwe, Algorithm::Lfid];

    pub fn token(self) -> &'static str {
        match self {
            Algorithm::Ecmp => "ecmp",
            Algorithm::Dw => "dw",
            Algorithm::Dwe => "dwe",
            Algorithm::Lfid => "lfid",
            Algorithm::MaraMc => "mara-mc",
            Algorithm::MaraSpe => "mara-spe",
        }
    }

    /// Computes the all-node FIB for this strategy.
    pub fn compute<W: Weight>(self, topology: &Topology<W>) -> Result<AllNodeFib<W>, UnimplementedAlgorithm> {
        match self {
            Algorithm::Ecmp => Ok(compute_ecmp(topology)),
            Algorithm::Dw => Ok(compute_dw(topology)),
            Algorithm::Dwe => Ok(compute_dwe(topology)),
            Algorithm::Lfid => Ok(compute_lfid(topology)),
            Algorithm::MaraMc | Algorithm::MaraSpe => Err(UnimplementedAlgorithm(self)),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown algorithm `{0}` (expected one of: ecmp, dw, dwe, lfid)")]
pub struct UnknownAlgorithm(pub String);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("algorithm `{0}` is not implemented")]
pub struct UnimplementedAlgorithm(pub Algorithm);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ecmp" => Ok(Algorithm::Ecmp),
            "dw" => Ok(Algorithm::Dw),
            "dwe" => Ok(Algorithm::Dwe),
            "lfid" => Ok(Algorithm::Lfid),
            "mara-mc" => Ok(Algorithm::MaraMc),
            "mara-spe" => Ok(Algorithm::MaraSpe),
            _ => Err(UnknownAlgorithm(s.to_owned())),
        }
    }
}

/// All-pairs costs; `table[d]` holds costs to `d` (the topology is undirected).
fn all_pairs<W: Weight>(topology: &Topology<W>) -> Vec<CostTable<W>> {
    topology
        .nodes()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|d| dijkstra(topology, d))
        .collect()
}

/// Builds an FIB from a per-(node, neighbor, destination) admission rule.
/// `admit(sp_x, sp_n, x, n)` sees full-graph costs to the destination.
fn dag_fib<W, F>(topology: &Topology<W>, admit: F) -> AllNodeFib<W>
where
    W: Weight,
    F: Fn(W, W, W, NodeId, NodeId) -> bool + Sync,
{
    let tables = all_pairs(topology);
    let rows: Vec<Vec<(NodeId, NodeId, NexthopEntry<W>)>> = topology
        .nodes()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|x| {
            let mut out = Vec::new();
            for (d, to_d) in topology.nodes().zip(&tables) {
                if d == x {
                    continue;
                }
                let Some(sp_x) = to_d.get(x) else { continue };
                for &(n, w) in topology.neighbors(x) {
                    let sp_n = to_d.get(n).expect("neighbor shares the component");
                    if admit(sp_x, sp_n, w, x, n) {
                        out.push((x, d, NexthopEntry::new(n, w + sp_n, NexthopKind::Downward)));
                    }
                }
            }
            out
        })
        .collect();
    AllNodeFib::from_entries(topology.node_count(), rows.into_iter().flatten())
        .expect("baseline entries are well formed")
}

/// Equal-cost multipath: neighbors on some shortest path.
pub fn compute_ecmp<W: Weight>(topology: &Topology<W>) -> AllNodeFib<W> {
    dag_fib(topology, |sp_x, sp_n, w, _, _| w + sp_n == sp_x)
}

/// Downward criterion: neighbors strictly closer to the destination.
pub fn compute_dw<W: Weight>(topology: &Topology<W>) -> AllNodeFib<W> {
    dag_fib(topology, |sp_x, sp_n, _, _, _| sp_n < sp_x)
}

/// Downward plus equal-distance neighbors with a lower node id.
pub fn compute_dwe<W: Weight>(topology: &Topology<W>) -> AllNodeFib<W> {
    dag_fib(topology, |sp_x, sp_n, _, x, n| sp_n < sp_x || (sp_n == sp_x && n < x))
}
