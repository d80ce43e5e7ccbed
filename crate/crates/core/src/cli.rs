//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::LevelFilter;

use crate::baselines::Algorithm;
use crate::experiments::{
    absent_rows, k_path_stats, multi_failure_experiment, runtime_benchmark, single_failure_experiment, summarize,
    write_bench_csv, write_json, write_records_csv, write_summary_csv, ExperimentConfig, FailureMode, OutputHeader,
    RecoveryVantage, Subject,
};
use crate::fib::{fib_rows, write_fib_csv, Classification};
use crate::forwarding::{enumerate_all_walks, WalkVerdict};
use crate::lfid::compute_lfid_with;
use crate::topology::{load_topology, random_connected_graph, WeightMode};
use crate::{AllNodeFib, Topology, TrialRecord};

/// Exit status when `verify` finds a forwarding loop.
pub const EXIT_COUNTEREXAMPLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "lfid",
    version,
    about = "Multipath FIB computation and resilience experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the all-node FIB of one algorithm.
    Compute {
        #[command(flatten)]
        topo: TopoArgs,
        /// ecmp, dw, dwe or lfid.
        #[arg(long, default_value = "lfid")]
        algo: Algorithm,
        #[command(flatten)]
        out: OutArgs,
        #[command(flatten)]
        workers: WorkerArgs,
    },
    /// Count and compare the K shortest simple paths each FIB offers per pair.
    Paths {
        #[command(flatten)]
        topo: TopoArgs,
        #[command(flatten)]
        algos: AlgoArgs,
        /// Number of shortest paths to look for per pair.
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        #[command(flatten)]
        out: OutArgs,
        #[command(flatten)]
        workers: WorkerArgs,
    },
    /// Fail each link or node of every shortest path and check for recovery.
    SingleFailure {
        #[command(flatten)]
        topo: TopoArgs,
        #[command(flatten)]
        algos: AlgoArgs,
        /// Fail links or intermediate nodes.
        #[arg(long, value_enum, default_value_t = ModeArg::Link)]
        mode: ModeArg,
        /// Reroute at the router next to the failure, or back at the source.
        #[arg(long, value_enum, default_value_t = VantageArg::Adjacent)]
        vantage: VantageArg,
        #[command(flatten)]
        out: OutArgs,
        #[command(flatten)]
        workers: WorkerArgs,
    },
    /// Fail up to K random links in succession, rerouting after each.
    MultiFailure {
        #[command(flatten)]
        topo: TopoArgs,
        #[command(flatten)]
        algos: AlgoArgs,
        /// Maximum number of failures per chain.
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        /// Repetitions per pair, each with its own random stream.
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
        runs: u32,
        /// Seeds every random choice.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
        #[command(flatten)]
        workers: WorkerArgs,
    },
    /// Time FIB computation, single-threaded and with --workers threads.
    Bench {
        /// Topology files to time (repeatable).
        #[arg(long)]
        topo: Vec<PathBuf>,
        /// Give every link weight 1.
        #[arg(long)]
        hop_count: bool,
        /// Also time a random connected graph with this many nodes (repeatable).
        #[arg(long)]
        random: Vec<usize>,
        /// Mean degree of the random graphs.
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Generator seed for the random graphs.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated algorithm tokens.
        #[arg(long, value_delimiter = ',', default_value = "ecmp,dw,dwe,lfid")]
        algo: Vec<Algorithm>,
        /// Timed repetitions per topology and algorithm.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        reps: u32,
        /// Output file; standard output when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[command(flatten)]
        workers: WorkerArgs,
    },
    /// Follow every forwarding walk toward every destination and report loops.
    Verify {
        #[command(flatten)]
        topo: TopoArgs,
        /// Comma-separated algorithm tokens.
        #[arg(long, value_delimiter = ',', default_value = "lfid")]
        algo: Vec<Algorithm>,
        #[command(flatten)]
        workers: WorkerArgs,
    },
}

#[derive(Debug, Args)]
pub struct TopoArgs {
    /// Edge-list file: one `a b [weight]` link per line, `#` comments.
    #[arg(long)]
    pub topo: PathBuf,
    /// Ignore file weights and give every link weight 1.
    #[arg(long)]
    pub hop_count: bool,
    /// How LFID tags entries as downward.
    #[arg(long, value_enum, default_value_t = ClassificationArg::Excised)]
    pub classification: ClassificationArg,
}

#[derive(Debug, Args)]
pub struct AlgoArgs {
    /// Comma-separated algorithm tokens.
    #[arg(long, value_delimiter = ',', default_value = "ecmp,dw,dwe,lfid")]
    pub algo: Vec<Algorithm>,
    /// Write per-cell aggregates instead of per-trial records.
    #[arg(long)]
    pub summary: bool,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Records as CSV with `#` header lines, or one JSON document.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WorkerArgs {
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Link,
    Node,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VantageArg {
    Adjacent,
    Backtracking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassificationArg {
    Excised,
    FullGraph,
}

impl From<ClassificationArg> for Classification {
    fn from(c: ClassificationArg) -> Self {
        match c {
            ClassificationArg::Excised => Classification::Excised,
            ClassificationArg::FullGraph => Classification::FullGraph,
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::new()
        .filter_level(LevelFilter::Warn)
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    let workers = match &command {
        Command::Compute { workers, .. }
        | Command::Paths { workers, .. }
        | Command::SingleFailure { workers, .. }
        | Command::MultiFailure { workers, .. }
        | Command::Bench { workers, .. }
        | Command::Verify { workers, .. } => workers.workers,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n as usize);
    }
    let pool = builder.build().context("cannot start worker threads")?;
    pool.install(|| dispatch(command, workers.map(|n| n as usize)))
}

fn read_topology(args: &TopoArgs) -> Result<Topology> {
    read_topology_file(&args.topo, args.hop_count)
}

fn read_topology_file(path: &Path, hop_count: bool) -> Result<Topology> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mode = if hop_count {
        WeightMode::HopCount
    } else {
        WeightMode::Explicit
    };
    load_topology(&text, mode).with_context(|| format!("invalid topology {}", path.display()))
}

fn compute_fib(algorithm: Algorithm, topology: &Topology, classification: Classification) -> Result<AllNodeFib> {
    match algorithm {
        Algorithm::Lfid => Ok(compute_lfid_with(topology, classification)),
        other => Ok(other.compute(topology)?),
    }
}

fn compute_all(
    algos: &[Algorithm],
    topology: &Topology,
    classification: Classification,
) -> Result<Vec<(Algorithm, AllNodeFib)>> {
    algos
        .iter()
        .map(|&a| Ok((a, compute_fib(a, topology, classification)?)))
        .collect()
}

/// Requested algorithms for an experiment: those with an implementation,
/// and the tokens of those without one.
fn split_absent(algos: &[Algorithm]) -> (Vec<Algorithm>, Vec<&'static str>) {
    let (present, absent): (Vec<Algorithm>, Vec<Algorithm>) =
        algos.iter().partition(|a| Algorithm::IMPLEMENTED.contains(a));
    let absent: Vec<_> = absent.into_iter().map(|a| a.token()).collect();
    if !absent.is_empty() {
        log::warn!("no implementation for {}; reported as absent", absent.join(","));
    }
    (present, absent)
}

struct Experiment {
    fibs: Vec<(Algorithm, AllNodeFib)>,
    absent: Vec<&'static str>,
}

impl Experiment {
    fn prepare(algos: &[Algorithm], topology: &Topology, classification: Classification) -> Result<Self> {
        let (present, absent) = split_absent(algos);
        Ok(Experiment {
            fibs: compute_all(&present, topology, classification)?,
            absent,
        })
    }

    fn subjects(&self) -> impl Iterator<Item = Subject<'_, crate::Milli>> {
        self.fibs
            .iter()
            .map(|(a, fib)| Subject::Fib { algorithm: *a, fib })
            .chain(std::iter::once(Subject::Opt))
    }

    fn header(&self, experiment: &str, topology: &Topology, config: String) -> OutputHeader {
        let mut t: Vec<_> = self.fibs.iter().map(|(a, _)| a.token()).collect();
        t.push("opt");
        OutputHeader::new(experiment, topology, &t, config).with_absent(&self.absent)
    }
}

/// Follows every walk toward every destination of `fib` and writes the
/// `loop_free` line plus one line per counterexample. Returns whether the
/// FIB is loop-free.
pub fn verify_report<Wr: Write + ?Sized>(
    token: &str,
    fib: &AllNodeFib,
    topology: &Topology,
    out: &mut Wr,
) -> io::Result<bool> {
    use rayon::prelude::*;
    let dests: Vec<_> = topology.nodes().collect();
    let verdicts: Vec<WalkVerdict> = dests.par_iter().map(|&d| enumerate_all_walks(fib, d)).collect();
    let clean = verdicts.iter().filter(|v| v.is_loop_free()).count();
    writeln!(out, "{token} loop_free: {clean}/{} destinations", dests.len())?;
    for (&d, v) in dests.iter().zip(&verdicts) {
        if let WalkVerdict::Counterexample(walk) = v {
            let names: Vec<_> = walk.iter().map(|&x| topology.name(x)).collect();
            writeln!(
                out,
                "{token} counterexample toward {}: {}",
                topology.name(d),
                names.join(" -> ")
            )?;
        }
    }
    Ok(clean == dests.len())
}

/// Writes to a temporary file next to `path` and renames it into place, so
/// a failed run never leaves a partial file.
fn emit(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush()?;
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
            {
                let mut buf = io::BufWriter::new(tmp.as_file_mut());
                write(&mut buf)?;
                buf.flush()?;
            }
            tmp.persist(path)
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
    }
    Ok(())
}

fn emit_records(
    out: &OutArgs,
    summary: bool,
    header: &OutputHeader,
    topology: &Topology,
    records: &[TrialRecord],
) -> Result<()> {
    emit(out.output.as_deref(), |w| {
        if summary {
            let absent: Vec<&str> = header.absent.iter().map(String::as_str).collect();
            let rows = absent_rows(&summarize(records, true), &absent);
            match out.format {
                Format::Csv => write_summary_csv(w, header, &rows),
                Format::Json => write_json(w, header, &rows),
            }
        } else {
            match out.format {
                Format::Csv => write_records_csv(w, header, topology, records),
                Format::Json => write_json(w, header, &records),
            }
        }
    })
}

fn dispatch(command: Command, workers: Option<usize>) -> Result<i32> {
    match command {
        Command::Compute { topo, algo, out, .. } => {
            let topology = read_topology(&topo)?;
            let fib = compute_fib(algo, &topology, topo.classification.into())?;
            emit(out.output.as_deref(), |w| match out.format {
                Format::Csv => Ok(write_fib_csv(&fib, &topology, w)?),
                Format::Json => {
                    serde_json::to_writer_pretty(&mut *w, &fib_rows(&fib, &topology))?;
                    writeln!(w)?;
                    Ok(())
                }
            })?;
        }
        Command::Paths {
            topo, algos, k, out, ..
        } => {
            let topology = read_topology(&topo)?;
            let exp = Experiment::prepare(&algos.algo, &topology, topo.classification.into())?;
            let mut records = Vec::new();
            for subject in exp.subjects() {
                records.extend(k_path_stats(&topology, subject, k as usize)?);
            }
            let header = exp.header("paths", &topology, format!("k={k}"));
            emit_records(&out, algos.summary, &header, &topology, &records)?;
        }
        Command::SingleFailure {
            topo,
            algos,
            mode,
            vantage,
            out,
            ..
        } => {
            let topology = read_topology(&topo)?;
            let exp = Experiment::prepare(&algos.algo, &topology, topo.classification.into())?;
            let mode = match mode {
                ModeArg::Link => FailureMode::Link,
                ModeArg::Node => FailureMode::Node,
            };
            let vantage = match vantage {
                VantageArg::Adjacent => RecoveryVantage::Adjacent,
                VantageArg::Backtracking => RecoveryVantage::Backtracking,
            };
            let mut records = Vec::new();
            for subject in exp.subjects() {
                records.extend(single_failure_experiment(&topology, subject, mode, vantage));
            }
            let config = format!("mode={mode:?} vantage={vantage:?}").to_lowercase();
            let header = exp.header("single-failure", &topology, config);
            emit_records(&out, algos.summary, &header, &topology, &records)?;
        }
        Command::MultiFailure {
            topo,
            algos,
            k,
            runs,
            seed,
            out,
            ..
        } => {
            let topology = read_topology(&topo)?;
            let exp = Experiment::prepare(&algos.algo, &topology, topo.classification.into())?;
            let config = ExperimentConfig {
                k: k as usize,
                runs: runs as usize,
                seed,
            };
            let mut records = Vec::new();
            for subject in exp.subjects() {
                records.extend(multi_failure_experiment(&topology, subject, &config)?);
            }
            let header = exp
                .header("multi-failure", &topology, format!("k={k} runs={runs}"))
                .with_seed(seed);
            emit_records(&out, algos.summary, &header, &topology, &records)?;
        }
        Command::Bench {
            topo,
            hop_count,
            random,
            degree,
            seed,
            algo,
            reps,
            output,
            ..
        } => {
            let mut topologies = Vec::new();
            for path in &topo {
                topologies.push((path.display().to_string(), read_topology_file(path, hop_count)?));
            }
            for &n in &random {
                let links = n * degree / 2;
                if links < n.saturating_sub(1) {
                    bail!("degree {degree} is too small for a connected graph on {n} nodes");
                }
                let g = random_connected_graph(n, links - (n - 1), (1, 10), seed)?;
                topologies.push((format!("random-n{n}-d{degree}-s{seed}"), g));
            }
            if topologies.is_empty() {
                bail!("nothing to time: give --topo or --random");
            }
            let parallel = workers.unwrap_or_else(rayon::current_num_threads);
            let (present, _) = split_absent(&algo);
            let rows = runtime_benchmark(&topologies, &present, reps as usize, parallel)?;
            emit(output.as_deref(), |w| write_bench_csv(w, &rows))?;
        }
        Command::Verify { topo, algo, .. } => {
            let topology = read_topology(&topo)?;
            let mut code = 0;
            let stdout = io::stdout();
            for (a, fib) in compute_all(&algo, &topology, topo.classification.into())? {
                if !verify_report(a.token(), &fib, &topology, &mut stdout.lock())? {
                    code = EXIT_COUNTEREXAMPLE;
                }
            }
            return Ok(code);
        }
    }
    Ok(0)
}
