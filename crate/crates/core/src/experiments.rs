//! Evaluation drivers: K-shortest-path diversity and stretch, single and
//! iterated failure resilience, and FIB computation runtime.
//!
//! Every driver fans out over independent units with rayon and collects in
//! canonical order, so the records do not depend on the thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::baselines::Algorithm;
use crate::fib::AllNodeFib;
use crate::forwarding::{filtered_digraph, FailureSet};
use crate::shortest_paths::{shortest_path, yen_k_shortest, Digraph, SimplePath};
use crate::topology::{format_milli, NodeId, Topology};
use crate::weight::Weight;
use crate::Milli;

/// Identifies the random generator in output headers.
pub const RNG_ID: &str = "ChaCha8Rng (rand_chacha 0.3), seed_from_u64(seed), stream = run << 40 | src << 20 | dst";

/// Version tag of the CSV and JSON layouts.
pub const FORMAT_VERSION: &str = "lfid-experiments/1";

/// Availability below which a `(algorithm, k)` stretch average is dropped.
pub const MIN_AVAILABILITY: f64 = 0.05;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExperimentError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("runs must be at least 1")]
    ZeroRuns,
    #[error("repetitions must be at least 1")]
    ZeroRepetitions,
    #[error("topology has more than 2^20 nodes; random streams would collide")]
    TooManyNodes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentConfig {
    /// Maximum number of paths (or successive failures) per pair.
    pub k: usize,
    pub runs: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            k: 10,
            runs: 100,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.k == 0 {
            return Err(ExperimentError::ZeroK);
        }
        if self.runs == 0 {
            return Err(ExperimentError::ZeroRuns);
        }
        Ok(())
    }
}

/// What is evaluated: an algorithm's FIB, or the undirected topology itself.
#[derive(Debug, Clone, Copy)]
pub enum Subject<'a, W> {
    Fib {
        algorithm: Algorithm,
        fib: &'a AllNodeFib<W>,
    },
    Opt,
}

impl<W: Weight> Subject<'_, W> {
    pub fn token(&self) -> &'static str {
        match self {
            Subject::Fib { algorithm, .. } => algorithm.token(),
            Subject::Opt => "opt",
        }
    }

    /// Arcs usable toward `dst` once `failures` are removed.
    pub fn digraph(&self, topology: &Topology<W>, dst: NodeId, failures: &FailureSet) -> Digraph<W> {
        match self {
            Subject::Fib { fib, .. } => filtered_digraph(fib, topology, dst, failures),
            Subject::Opt => Digraph::from_topology_filtered(topology, |a, b| failures.arc_usable(a, b)),
        }
    }
}

/// One evaluated case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord<W> {
    pub algorithm: String,
    pub scenario: Scenario,
    /// Repetition index; always 0 for deterministic experiments.
    pub run: usize,
    pub src: NodeId,
    pub dst: NodeId,
    /// Path rank, position of the failed element on the shortest path, or
    /// failure count, depending on the scenario.
    pub k_index: usize,
    pub recovered: bool,
    pub path_cost: Option<W>,
    pub optimal_cost: Option<W>,
    pub stretch: Option<f64>,
    /// The path found; for failure scenarios, the path from the recovering
    /// router to the destination.
    pub path: Vec<NodeId>,
    pub failures: FailureSet,
    /// Multi-failure only: the whole walk from the source, with its cost,
    /// the cheapest undirected cost from the source avoiding every failure,
    /// and their ratio.
    pub walk: Vec<NodeId>,
    pub walk_cost: Option<W>,
    pub walk_optimal_cost: Option<W>,
    pub walk_stretch: Option<f64>,
}

impl<W: Weight> TrialRecord<W> {
    fn new(algorithm: &str, scenario: Scenario, run: usize, src: NodeId, dst: NodeId, k_index: usize) -> Self {
        TrialRecord {
            algorithm: algorithm.to_string(),
            scenario,
            run,
            src,
            dst,
            k_index,
            recovered: false,
            path_cost: None,
            optimal_cost: None,
            stretch: None,
            path: Vec::new(),
            failures: FailureSet::new(),
            walk: Vec::new(),
            walk_cost: None,
            walk_optimal_cost: None,
            walk_stretch: None,
        }
    }

    fn set_path(&mut self, cost: W, path: Vec<NodeId>, optimal: Option<W>) {
        self.recovered = true;
        self.path_cost = Some(cost);
        self.optimal_cost = optimal;
        self.stretch = optimal.map(|o| cost.ratio(o));
        self.path = path;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Paths,
    LinkAdjacent,
    LinkBacktracking,
    NodeAdjacent,
    NodeBacktracking,
    MultiLink,
}

impl Scenario {
    pub fn token(self) -> &'static str {
        match self {
            Scenario::Paths => "paths",
            Scenario::LinkAdjacent => "link-adjacent",
            Scenario::LinkBacktracking => "link-backtracking",
            Scenario::NodeAdjacent => "node-adjacent",
            Scenario::NodeBacktracking => "node-backtracking",
            Scenario::MultiLink => "multi-link",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Ordered `(src, dst)` pairs in the same component, in lexicographic order.
fn pairs<W: Weight>(topology: &Topology<W>) -> Vec<(NodeId, NodeId)> {
    topology.connected_pairs()
}

/// The shortest path failures are placed on: cheapest, then lexicographically
/// smallest node sequence.
pub fn canonical_path<W: Weight>(topology: &Topology<W>, src: NodeId, dst: NodeId) -> Option<SimplePath<W>> {
    shortest_path(&Digraph::from_topology(topology), src, dst)
}

fn walk_cost<W: Weight>(topology: &Topology<W>, walk: &[NodeId]) -> W {
    walk.windows(2).fold(W::zero(), |acc, w| {
        acc + topology.weight(w[0], w[1]).expect("walk follows topology links")
    })
}

/// For every connected ordered pair and every `k <= config.k`, whether the
/// subject offers a `k`-th simple path and how it compares to the `k`-th
/// simple path of the undirected topology.
pub fn k_path_stats<W: Weight>(
    topology: &Topology<W>,
    subject: Subject<'_, W>,
    k: usize,
) -> Result<Vec<TrialRecord<W>>, ExperimentError> {
    if k == 0 {
        return Err(ExperimentError::ZeroK);
    }
    let undirected = Digraph::from_topology(topology);
    let token = subject.token();
    let per_dest: Vec<Vec<TrialRecord<W>>> = topology
        .nodes()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|dst| {
            let g = subject.digraph(topology, dst, &FailureSet::new());
            let mut out = Vec::new();
            for src in topology.nodes() {
                if src == dst || !topology.same_component(src, dst) {
                    continue;
                }
                let opt = yen_k_shortest(&undirected, src, dst, k);
                let got = match subject {
                    Subject::Opt => opt.clone(),
                    Subject::Fib { .. } => yen_k_shortest(&g, src, dst, k),
                };
                for i in 0..k {
                    let mut rec = TrialRecord::new(token, Scenario::Paths, 0, src, dst, i + 1);
                    if let Some(p) = got.get(i) {
                        rec.set_path(p.cost, p.nodes.clone(), opt.get(i).map(|o| o.cost));
                    }
                    out.push(rec);
                }
            }
            out
        })
        .collect();
    let mut records: Vec<_> = per_dest.into_iter().flatten().collect();
    records.sort_by_key(|r| (r.src, r.dst, r.k_index));
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureMode {
    Link,
    Node,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecoveryVantage {
    Adjacent,
    Backtracking,
}

fn failure_scenario(mode: FailureMode, vantage: RecoveryVantage) -> Scenario {
    match (mode, vantage) {
        (FailureMode::Link, RecoveryVantage::Adjacent) => Scenario::LinkAdjacent,
        (FailureMode::Link, RecoveryVantage::Backtracking) => Scenario::LinkBacktracking,
        (FailureMode::Node, RecoveryVantage::Adjacent) => Scenario::NodeAdjacent,
        (FailureMode::Node, RecoveryVantage::Backtracking) => Scenario::NodeBacktracking,
    }
}

/// Fails each link (or intermediate node) of every pair's canonical
/// shortest path in turn and checks whether the subject still has a path to
/// the destination from the router upstream of the failure, or from the
/// source.
///
/// Recovered records carry the cheapest such path and its stretch against
/// the cheapest undirected path from the same node avoiding the failure.
pub fn single_failure_experiment<W: Weight>(
    topology: &Topology<W>,
    subject: Subject<'_, W>,
    mode: FailureMode,
    vantage: RecoveryVantage,
) -> Vec<TrialRecord<W>> {
    let scenario = failure_scenario(mode, vantage);
    let token = subject.token();
    let per_pair: Vec<Vec<TrialRecord<W>>> = pairs(topology)
        .into_par_iter()
        .map(|(src, dst)| {
            let sp = canonical_path(topology, src, dst).expect("pair is connected");
            let cases: Vec<(usize, FailureSet, NodeId)> = match mode {
                FailureMode::Link => sp
                    .arcs()
                    .enumerate()
                    .map(|(i, (u, v))| (i + 1, FailureSet::link(u, v), u))
                    .collect(),
                FailureMode::Node => (1..sp.nodes.len() - 1)
                    .map(|i| (i, FailureSet::node(sp.nodes[i]), sp.nodes[i - 1]))
                    .collect(),
            };
            cases
                .into_iter()
                .map(|(k_index, failures, upstream)| {
                    let from = match vantage {
                        RecoveryVantage::Adjacent => upstream,
                        RecoveryVantage::Backtracking => src,
                    };
                    let mut rec = TrialRecord::new(token, scenario, 0, src, dst, k_index);
                    let g = subject.digraph(topology, dst, &failures);
                    if let Some(p) = shortest_path(&g, from, dst) {
                        let opt = Subject::<W>::Opt.digraph(topology, dst, &failures);
                        let best = shortest_path(&opt, from, dst).map(|o| o.cost);
                        rec.set_path(p.cost, p.nodes, best);
                    }
                    rec.failures = failures;
                    rec
                })
                .collect()
        })
        .collect();
    per_pair.into_iter().flatten().collect()
}

fn stream_id(run: usize, src: NodeId, dst: NodeId) -> u64 {
    ((run as u64) << 40) | ((src.index() as u64) << 20) | dst.index() as u64
}

/// Iterated failures: per run and pair, starting from the canonical shortest
/// path, fail a uniformly chosen link of the current path, reroute from the
/// router upstream of it along the cheapest surviving subject path, and
/// repeat on that recovery path up to `k` times or until rerouting fails.
///
/// Stretch compares each recovery path with the cheapest undirected path
/// from the same router avoiding every failure so far. The walk fields
/// compare the whole walk from the source with the cheapest undirected path
/// from the source.
pub fn multi_failure_experiment<W: Weight>(
    topology: &Topology<W>,
    subject: Subject<'_, W>,
    config: &ExperimentConfig,
) -> Result<Vec<TrialRecord<W>>, ExperimentError> {
    config.validate()?;
    if topology.node_count() > 1 << 20 {
        return Err(ExperimentError::TooManyNodes);
    }
    let units: Vec<(usize, NodeId, NodeId)> = (0..config.runs)
        .flat_map(|run| pairs(topology).into_iter().map(move |(s, d)| (run, s, d)))
        .collect();
    let token = subject.token();
    let per_unit: Vec<Vec<TrialRecord<W>>> = units
        .into_par_iter()
        .map(|(run, src, dst)| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(stream_id(run, src, dst));
            failure_chain(topology, subject, token, config.k, run, src, dst, &mut rng)
        })
        .collect();
    Ok(per_unit.into_iter().flatten().collect())
}

#[allow(clippy::too_many_arguments)]
fn failure_chain<W: Weight>(
    topology: &Topology<W>,
    subject: Subject<'_, W>,
    token: &str,
    k: usize,
    run: usize,
    src: NodeId,
    dst: NodeId,
    rng: &mut ChaCha8Rng,
) -> Vec<TrialRecord<W>> {
    let mut walk = canonical_path(topology, src, dst).expect("pair is connected").nodes;
    // the current path is walk[segment..]: the initial shortest path, then
    // each recovery path; it is simple and avoids every failure so far
    let mut segment = 0;
    let mut failures = FailureSet::new();
    let mut out = Vec::with_capacity(k);
    for k_index in 1..=k {
        let pos = segment + rng.gen_range(0..walk.len() - 1 - segment);
        failures.fail_link(walk[pos], walk[pos + 1]);

        let mut rec = TrialRecord::new(token, Scenario::MultiLink, run, src, dst, k_index);
        let g = subject.digraph(topology, dst, &failures);
        match shortest_path(&g, walk[pos], dst) {
            Some(recovery) => {
                let opt = Subject::<W>::Opt.digraph(topology, dst, &failures);
                let from_vantage = shortest_path(&opt, walk[pos], dst).map(|p| p.cost);
                let from_src = shortest_path(&opt, src, dst).map(|p| p.cost);
                walk.truncate(pos);
                walk.extend_from_slice(&recovery.nodes);
                segment = pos;
                rec.set_path(recovery.cost, recovery.nodes, from_vantage);
                let cost = walk_cost(topology, &walk);
                rec.walk = walk.clone();
                rec.walk_cost = Some(cost);
                rec.walk_optimal_cost = from_src;
                rec.walk_stretch = from_src.map(|o| cost.ratio(o));
                rec.failures = failures.clone();
                out.push(rec);
            }
            None => {
                rec.failures = failures.clone();
                out.push(rec);
                break;
            }
        }
    }
    out
}

/// Aggregate of one `(algorithm, scenario, k)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub scenario: Scenario,
    /// `None` when the cell aggregates over every `k_index`.
    pub k: Option<usize>,
    pub trials: usize,
    pub recovered: usize,
    /// `recovered / trials`.
    pub rate: Option<f64>,
    /// `recovered / OPT recovered` in the same cell; `None` when OPT
    /// recovers nothing there or no OPT records were supplied.
    pub normalized: Option<f64>,
    pub mean_stretch: Option<f64>,
    /// Mean whole-walk stretch; multi-failure cells only.
    pub mean_walk_stretch: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[derive(Default)]
struct Cell {
    trials: usize,
    recovered: usize,
    stretch_sum: f64,
    stretch_count: usize,
    walk_sum: f64,
    walk_count: usize,
}

/// Groups records by `(algorithm, scenario, k)` and normalizes each cell by
/// the `opt` cell with the same scenario and `k`.
///
/// With `per_k` false, all `k_index` values of a scenario share one cell.
/// Path-count cells keep their mean stretch only at availability of at
/// least [`MIN_AVAILABILITY`]. For the multi-failure scenario, `trials` at
/// every `k` is the number of chains started, so `rate` is the fraction of
/// chains that survived `k` failures.
pub fn summarize<W: Weight>(records: &[TrialRecord<W>], per_k: bool) -> Vec<SummaryRow> {
    let mut cells: BTreeMap<(String, Scenario, Option<usize>), Cell> = BTreeMap::new();
    let mut chains: BTreeMap<(String, Scenario), usize> = BTreeMap::new();
    for r in records {
        let key = (r.algorithm.clone(), r.scenario, per_k.then_some(r.k_index));
        let cell = cells.entry(key).or_default();
        cell.trials += 1;
        if r.recovered {
            cell.recovered += 1;
            if let Some(s) = r.stretch {
                cell.stretch_sum += s;
                cell.stretch_count += 1;
            }
            if let Some(s) = r.walk_stretch {
                cell.walk_sum += s;
                cell.walk_count += 1;
            }
        }
        if r.scenario == Scenario::MultiLink && r.k_index == 1 {
            *chains.entry((r.algorithm.clone(), r.scenario)).or_default() += 1;
        }
    }
    let recovered_of = |alg: &str, scenario: Scenario, k: Option<usize>| {
        cells.get(&(alg.to_string(), scenario, k)).map(|c| c.recovered)
    };
    cells
        .iter()
        .map(|((alg, scenario, k), c)| {
            let trials = match scenario {
                Scenario::MultiLink if per_k => chains[&(alg.clone(), *scenario)],
                _ => c.trials,
            };
            let rate = ratio(c.recovered, trials);
            let mean = |sum: f64, n: usize| (n > 0).then(|| sum / n as f64);
            let mut mean_stretch = mean(c.stretch_sum, c.stretch_count);
            if *scenario == Scenario::Paths && rate.is_none_or(|a| a < MIN_AVAILABILITY) {
                mean_stretch = None;
            }
            let normalized = recovered_of("opt", *scenario, *k).and_then(|o| ratio(c.recovered, o));
            SummaryRow {
                algorithm: alg.clone(),
                scenario: *scenario,
                k: *k,
                trials,
                recovered: c.recovered,
                rate,
                normalized,
                mean_stretch,
                mean_walk_stretch: mean(c.walk_sum, c.walk_count),
            }
        })
        .collect()
}

/// Empty cells for algorithms that produced no records, one per
/// `(scenario, k)` cell of `opt`, so comparison tables keep their shape.
pub fn absent_rows(rows: &[SummaryRow], absent: &[&str]) -> Vec<SummaryRow> {
    let mut out = rows.to_vec();
    for alg in absent {
        for r in rows.iter().filter(|r| r.algorithm == "opt") {
            out.push(SummaryRow {
                algorithm: alg.to_string(),
                trials: 0,
                recovered: 0,
                rate: None,
                normalized: None,
                mean_stretch: None,
                mean_walk_stretch: None,
                ..r.clone()
            });
        }
    }
    out
}

/// Number of pairs with at least `k` paths, for `k = 1..=max_k`.
pub fn pairs_with_at_least<W: Weight>(records: &[TrialRecord<W>], max_k: usize) -> Vec<usize> {
    (1..=max_k)
        .map(|k| {
            records
                .iter()
                .filter(|r| r.scenario == Scenario::Paths && r.k_index == k && r.recovered)
                .count()
        })
        .collect()
}

/// Wall-clock timing of one `(topology, algorithm, workers)` combination.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub topology: String,
    pub nodes: usize,
    pub links: usize,
    pub algorithm: String,
    pub workers: usize,
    pub repetitions: usize,
    pub mean_ms: f64,
    pub min_ms: f64,
}

/// Times `algorithm.compute` on every topology, once in a single-thread pool
/// and once in a pool of `parallel_workers` threads.
pub fn runtime_benchmark<W: Weight>(
    topologies: &[(String, Topology<W>)],
    algorithms: &[Algorithm],
    repetitions: usize,
    parallel_workers: usize,
) -> anyhow::Result<Vec<BenchRow>> {
    if repetitions == 0 {
        return Err(ExperimentError::ZeroRepetitions.into());
    }
    let mut worker_counts = vec![1];
    if parallel_workers > 1 {
        worker_counts.push(parallel_workers);
    }
    let mut rows = Vec::new();
    for (name, topo) in topologies {
        for &alg in algorithms {
            for &workers in &worker_counts {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
                let mut times = Vec::with_capacity(repetitions);
                for _ in 0..repetitions {
                    let start = Instant::now();
                    let fib = pool.install(|| alg.compute(topo))?;
                    times.push(start.elapsed());
                    drop(fib);
                }
                let total: Duration = times.iter().sum();
                rows.push(BenchRow {
                    topology: name.clone(),
                    nodes: topo.node_count(),
                    links: topo.link_count(),
                    algorithm: alg.token().to_string(),
                    workers,
                    repetitions,
                    mean_ms: total.as_secs_f64() * 1e3 / repetitions as f64,
                    min_ms: times.iter().min().unwrap().as_secs_f64() * 1e3,
                });
            }
        }
    }
    Ok(rows)
}

/// Provenance written at the top of every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputHeader {
    pub format: String,
    pub experiment: String,
    pub topology_sha256: String,
    pub nodes: usize,
    pub links: usize,
    pub algorithms: Vec<String>,
    /// Requested algorithms that have no implementation; no records exist for them.
    pub absent: Vec<String>,
    pub config: String,
    pub seed: Option<u64>,
    pub rng: Option<String>,
}

impl OutputHeader {
    pub fn new(experiment: &str, topology: &Topology<Milli>, algorithms: &[&str], config: String) -> Self {
        OutputHeader {
            format: FORMAT_VERSION.to_string(),
            experiment: experiment.to_string(),
            topology_sha256: topology_hash(topology),
            nodes: topology.node_count(),
            links: topology.link_count(),
            algorithms: algorithms.iter().map(|a| a.to_string()).collect(),
            absent: Vec::new(),
            config,
            seed: None,
            rng: None,
        }
    }

    pub fn with_absent(mut self, absent: &[&str]) -> Self {
        self.absent = absent.iter().map(|a| a.to_string()).collect();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self.rng = Some(RNG_ID.to_string());
        self
    }

    pub fn write_comments<Wr: Write + ?Sized>(&self, out: &mut Wr) -> std::io::Result<()> {
        writeln!(out, "# format: {}", self.format)?;
        writeln!(out, "# experiment: {}", self.experiment)?;
        writeln!(
            out,
            "# topology: sha256:{} nodes={} links={}",
            self.topology_sha256, self.nodes, self.links
        )?;
        writeln!(out, "# algorithms: {}", self.algorithms.join(","))?;
        if !self.absent.is_empty() {
            writeln!(out, "# absent: {} (unimplemented)", self.absent.join(","))?;
        }
        writeln!(out, "# config: {}", self.config)?;
        if let Some(seed) = self.seed {
            writeln!(out, "# seed: {seed}")?;
        }
        if let Some(rng) = &self.rng {
            writeln!(out, "# rng: {rng}")?;
        }
        Ok(())
    }
}

/// SHA-256 of the canonical edge-list form, hex encoded.
pub fn topology_hash(topology: &Topology<Milli>) -> String {
    hex::encode(Sha256::digest(topology.to_edge_list().as_bytes()))
}

fn join_path(topology: &Topology<Milli>, path: &[NodeId]) -> String {
    path.iter().map(|&v| topology.name(v)).collect::<Vec<_>>().join(" ")
}

fn describe_failures(topology: &Topology<Milli>, failures: &FailureSet) -> String {
    let links = failures
        .failed_links()
        .map(|(a, b)| format!("{}-{}", topology.name(a), topology.name(b)));
    let nodes = failures.failed_nodes().map(|v| topology.name(v));
    links.chain(nodes).collect::<Vec<_>>().join(" ")
}

fn opt_f64(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_default()
}

/// Trial records as CSV, preceded by `#` comment lines. Node ids are
/// written as labels and costs as decimal units.
pub fn write_records_csv<Wr: Write + ?Sized>(
    out: &mut Wr,
    header: &OutputHeader,
    topology: &Topology<Milli>,
    records: &[TrialRecord<Milli>],
) -> anyhow::Result<()> {
    header.write_comments(out)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "algorithm",
        "scenario",
        "run",
        "src",
        "dst",
        "k",
        "recovered",
        "path_cost",
        "optimal_cost",
        "stretch",
        "path",
        "failures",
        "walk_cost",
        "walk_optimal_cost",
        "walk_stretch",
        "walk",
    ])?;
    for r in records {
        w.write_record([
            r.algorithm.clone(),
            r.scenario.to_string(),
            r.run.to_string(),
            topology.name(r.src),
            topology.name(r.dst),
            r.k_index.to_string(),
            r.recovered.to_string(),
            r.path_cost.map(format_milli).unwrap_or_default(),
            r.optimal_cost.map(format_milli).unwrap_or_default(),
            opt_f64(r.stretch),
            join_path(topology, &r.path),
            describe_failures(topology, &r.failures),
            r.walk_cost.map(format_milli).unwrap_or_default(),
            r.walk_optimal_cost.map(format_milli).unwrap_or_default(),
            opt_f64(r.walk_stretch),
            join_path(topology, &r.walk),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<Wr: Write + ?Sized>(
    out: &mut Wr,
    header: &OutputHeader,
    rows: &[SummaryRow],
) -> anyhow::Result<()> {
    header.write_comments(out)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "algorithm",
        "scenario",
        "k",
        "trials",
        "recovered",
        "rate",
        "normalized",
        "mean_stretch",
        "mean_walk_stretch",
    ])?;
    for r in rows {
        w.write_record([
            r.algorithm.clone(),
            r.scenario.to_string(),
            r.k.map(|k| k.to_string()).unwrap_or_default(),
            r.trials.to_string(),
            r.recovered.to_string(),
            opt_f64(r.rate),
            opt_f64(r.normalized),
            opt_f64(r.mean_stretch),
            opt_f64(r.mean_walk_stretch),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_bench_csv<Wr: Write + ?Sized>(out: &mut Wr, rows: &[BenchRow]) -> anyhow::Result<()> {
    writeln!(out, "# format: {FORMAT_VERSION}")?;
    writeln!(out, "# experiment: bench")?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// `{"header": ..., "records": [...]}`.
pub fn write_json<Wr: Write + ?Sized, T: Serialize>(
    out: &mut Wr,
    header: &OutputHeader,
    records: &T,
) -> anyhow::Result<()> {
    #[derive(Serialize)]
    struct Doc<'a, T> {
        header: &'a OutputHeader,
        records: &'a T,
    }
    serde_json::to_writer_pretty(&mut *out, &Doc { header, records })?;
    writeln!(out)?;
    Ok(())
}
