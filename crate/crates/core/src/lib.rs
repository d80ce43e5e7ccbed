//! Multipath nexthop-set computation for weighted router topologies.
//!
//! The crate builds per-destination FIBs with loop-free inport-dependent
//! routing (LFID) and with the ECMP, downward (DW) and downward+equal (DWE)
//! baselines, and evaluates them for loop freedom, path diversity, stretch
//! and failure resilience.
//!
//! All graph and FIB types are generic over a [`Weight`] type. The aliases at
//! the crate root fix it to [`Milli`], integer thousandths of a link-cost unit,
//! which is what the edge-list loader and the CLI produce.

pub mod baselines;
pub mod cli;
pub mod experiments;
pub mod fib;
pub mod forwarding;
pub mod lfid;
pub mod shortest_paths;
pub mod topology;
pub mod weight;

pub use baselines::{Algorithm, UnimplementedAlgorithm};
pub use fib::NexthopKind;
pub use forwarding::{FailureSet, Vantage, WalkVerdict};
pub use topology::{NodeId, TopologyError, WeightMode};
pub use weight::Weight;

/// Link cost in thousandths of a unit (a weight of `22.5` is stored as `22500`).
pub type Milli = u64;

pub type Topology = topology::Topology<Milli>;
pub type Link = topology::Link<Milli>;
pub type CostTable = shortest_paths::CostTable<Milli>;
pub type SimplePath = shortest_paths::SimplePath<Milli>;
pub type Digraph = shortest_paths::Digraph<Milli>;
pub type NexthopEntry = fib::NexthopEntry<Milli>;
pub type AllNodeFib = fib::AllNodeFib<Milli>;
pub type DestinationDigraph = lfid::DestinationDigraph<Milli>;
pub type TrialRecord = experiments::TrialRecord<Milli>;
