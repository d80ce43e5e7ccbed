//! Router topologies: the data model, edge-list ingestion and random
//! connected graphs for test corpora.
//!
//! The edge-list format is one link per line, `<node_a> <node_b> [weight]`,
//! whitespace separated. `#` starts a comment. Node names are arbitrary
//! tokens mapped to dense ids in order of first appearance, and a missing
//! weight means `1`. Weights are decimals with at most three fractional
//! digits and are stored as integer milli-units.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::weight::Weight;
use crate::Milli;

/// Dense router identifier, `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(transparent)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index exceeds u32"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An undirected link. `a < b` after construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Link<W> {
    pub a: NodeId,
    pub b: NodeId,
    pub weight: W,
}

/// How link weights are taken from an edge-list file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMode {
    /// Use the weights written in the file.
    #[default]
    Explicit,
    /// Ignore file weights; every link costs one unit.
    HopCount,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: String },
    #[error("line {line}: duplicate link {a} - {b}")]
    DuplicateLink { line: usize, a: String, b: String },
    #[error("line {line}: link weight must be positive")]
    NonPositiveWeight { line: usize },
    #[error("link {a} - {b} references a node outside 0..{n}")]
    UnknownNode { a: NodeId, b: NodeId, n: usize },
    #[error("a random graph needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("{extra} extra edges requested but only {available} are available for {n} nodes")]
    InfeasibleEdgeCount { n: usize, extra: usize, available: usize },
    #[error("invalid weight range [{lo}, {hi}]")]
    InvalidWeightRange { lo: u64, hi: u64 },
}

/// An immutable undirected weighted graph.
///
/// Adjacency lists are sorted by neighbor id, so every traversal over a
/// topology is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology<W> {
    labels: Vec<Option<String>>,
    links: Vec<Link<W>>,
    adjacency: Vec<Vec<(NodeId, W)>>,
    component: Vec<usize>,
    component_count: usize,
}

impl<W: Weight> Topology<W> {
    /// Builds a topology over `n` unlabeled nodes.
    pub fn from_links(n: usize, links: impl IntoIterator<Item = (usize, usize, W)>) -> Result<Self, TopologyError> {
        Self::with_labels(vec![None; n], links)
    }

    /// Builds a topology whose nodes carry the given labels.
    pub fn with_labels(
        labels: Vec<Option<String>>,
        links: impl IntoIterator<Item = (usize, usize, W)>,
    ) -> Result<Self, TopologyError> {
        let n = labels.len();
        let mut adjacency: Vec<Vec<(NodeId, W)>> = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (line, (a, b, weight)) in links.into_iter().enumerate() {
            let line = line + 1;
            if a >= n || b >= n {
                return Err(TopologyError::UnknownNode {
                    a: NodeId::new(a),
                    b: NodeId::new(b),
                    n,
                });
            }
            if a == b {
                return Err(TopologyError::SelfLoop {
                    line,
                    node: a.to_string(),
                });
            }
            if weight <= W::zero() {
                return Err(TopologyError::NonPositiveWeight { line });
            }
            let (a, b) = (a.min(b), a.max(b));
            if !seen.insert((a, b)) {
                return Err(TopologyError::DuplicateLink {
                    line,
                    a: a.to_string(),
                    b: b.to_string(),
                });
            }
            let (a, b) = (NodeId::new(a), NodeId::new(b));
            adjacency[a.index()].push((b, weight));
            adjacency[b.index()].push((a, weight));
            out.push(Link { a, b, weight });
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(v, _)| v);
        }
        let (component, component_count) = label_components(&adjacency);
        Ok(Topology {
            labels,
            links: out,
            adjacency,
            component,
            component_count,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.node_count() == 0 {
            return 0.0;
        }
        2.0 * self.link_count() as f64 / self.node_count() as f64
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + Clone {
        (0..self.node_count()).map(NodeId::new)
    }

    pub fn links(&self) -> &[Link<W>] {
        &self.links
    }

    /// Neighbors of `x` with the connecting link weight, ascending by id.
    #[inline]
    pub fn neighbors(&self, x: NodeId) -> &[(NodeId, W)] {
        &self.adjacency[x.index()]
    }

    pub fn degree(&self, x: NodeId) -> usize {
        self.adjacency[x.index()].len()
    }

    /// Weight of the link between `a` and `b`, if they are adjacent.
    pub fn weight(&self, a: NodeId, b: NodeId) -> Option<W> {
        let list = &self.adjacency[a.index()];
        list.binary_search_by_key(&b, |&(v, _)| v).ok().map(|i| list[i].1)
    }

    pub fn label(&self, x: NodeId) -> Option<&str> {
        self.labels[x.index()].as_deref()
    }

    /// The node's label, or its numeric id when unlabeled.
    pub fn name(&self, x: NodeId) -> String {
        match self.label(x) {
            Some(l) => l.to_owned(),
            None => x.to_string(),
        }
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.labels
            .iter()
            .position(|l| l.as_deref() == Some(label))
            .map(NodeId::new)
    }

    /// Resolves a label, falling back to a numeric id.
    pub fn resolve(&self, token: &str) -> Option<NodeId> {
        self.node_by_label(token).or_else(|| {
            token
                .parse::<usize>()
                .ok()
                .filter(|&i| i < self.node_count())
                .map(NodeId::new)
        })
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count <= 1
    }

    pub fn same_component(&self, a: NodeId, b: NodeId) -> bool {
        self.component[a.index()] == self.component[b.index()]
    }

    /// All ordered `(src, dst)` pairs, `src != dst`, within one component.
    pub fn connected_pairs(&self) -> Vec<(NodeId, NodeId)> {
        let mut pairs = Vec::new();
        for s in self.nodes() {
            for d in self.nodes() {
                if s != d && self.same_component(s, d) {
                    pairs.push((s, d));
                }
            }
        }
        pairs
    }

    /// Applies `f` to every link weight. `f` must keep weights positive.
    pub fn map_weights<V: Weight>(&self, mut f: impl FnMut(W) -> V) -> Topology<V> {
        let links: Vec<_> = self
            .links
            .iter()
            .map(|l| (l.a.index(), l.b.index(), f(l.weight)))
            .collect();
        Topology::with_labels(self.labels.clone(), links).expect("weight mapping produced an invalid topology")
    }
}

impl Topology<Milli> {
    /// Serializes to the edge-list format accepted by [`load_topology`].
    ///
    /// Unlabeled nodes are written under their numeric id. Links are written
    /// in insertion order, so reloading reproduces the same id assignment
    /// whenever every node is covered by some link.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for l in &self.links {
            out.push_str(&format!(
                "{} {} {}\n",
                self.name(l.a),
                self.name(l.b),
                format_milli(l.weight)
            ));
        }
        out
    }

    /// Every weight multiplied by `factor`.
    pub fn scaled(&self, factor: Milli) -> Topology<Milli> {
        self.map_weights(|w| w * factor)
    }
}

fn label_components<W>(adjacency: &[Vec<(NodeId, W)>]) -> (Vec<usize>, usize) {
    let n = adjacency.len();
    let mut component = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        component[start] = count;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &adjacency[u] {
                if component[v.index()] == usize::MAX {
                    component[v.index()] = count;
                    queue.push_back(v.index());
                }
            }
        }
        count += 1;
    }
    (component, count)
}

/// Parses a decimal weight with at most three fractional digits into
/// milli-units. Returns `None` for anything else, including signs.
pub fn parse_milli(token: &str) -> Option<Milli> {
    let (int, frac) = match token.split_once('.') {
        Some((i, f)) => (i, f),
        None => (token, ""),
    };
    if (int.is_empty() && frac.is_empty())
        || frac.len() > 3
        || !int.bytes().all(|c| c.is_ascii_digit())
        || !frac.bytes().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let int: Milli = if int.is_empty() { 0 } else { int.parse().ok()? };
    let mut frac_milli: Milli = 0;
    for (i, c) in frac.bytes().enumerate() {
        frac_milli += Milli::from(c - b'0') * 10u64.pow(2 - i as u32);
    }
    int.checked_mul(1000)?.checked_add(frac_milli)
}

/// Formats milli-units as the shortest decimal that parses back exactly.
pub fn format_milli(w: Milli) -> String {
    let (int, frac) = (w / 1000, w % 1000);
    if frac == 0 {
        int.to_string()
    } else {
        let s = format!("{int}.{frac:03}");
        s.trim_end_matches('0').to_owned()
    }
}

/// Reads an edge-list topology.
///
/// Disconnected inputs are accepted with a logged warning; downstream
/// computations work per component.
pub fn load_topology(text: &str, mode: WeightMode) -> Result<Topology<Milli>, TopologyError> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut links = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() < 2 || tokens.len() > 3 {
            return Err(TopologyError::Malformed {
                line,
                reason: format!("expected `<node_a> <node_b> [weight]`, got {} fields", tokens.len()),
            });
        }
        let weight = match tokens.get(2) {
            None => 1000,
            Some(tok) => {
                if let Some(rest) = tok.strip_prefix('-') {
                    if parse_milli(rest).is_some() {
                        return Err(TopologyError::NonPositiveWeight { line });
                    }
                }
                parse_milli(tok).ok_or_else(|| TopologyError::Malformed {
                    line,
                    reason: format!("invalid weight `{tok}`"),
                })?
            }
        };
        if weight == 0 {
            return Err(TopologyError::NonPositiveWeight { line });
        }
        if tokens[0] == tokens[1] {
            return Err(TopologyError::SelfLoop {
                line,
                node: tokens[0].to_owned(),
            });
        }
        let mut id_of = |name: &str| -> usize {
            *ids.entry(name.to_owned()).or_insert_with(|| {
                labels.push(Some(name.to_owned()));
                labels.len() - 1
            })
        };
        let a = id_of(tokens[0]);
        let b = id_of(tokens[1]);
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(TopologyError::DuplicateLink {
                line,
                a: tokens[0].to_owned(),
                b: tokens[1].to_owned(),
            });
        }
        let weight = match mode {
            WeightMode::Explicit => weight,
            WeightMode::HopCount => 1000,
        };
        links.push((a, b, weight));
    }

    let topo = Topology::with_labels(labels, links)?;
    if topo.component_count() > 1 {
        log::warn!(
            "topology has {} connected components; experiments are restricted to pairs within one component",
            topo.component_count()
        );
    }
    Ok(topo)
}

/// A connected random graph: a uniform random spanning tree plus
/// `extra_edges` distinct random non-tree links.
///
/// Weights are whole units drawn uniformly from `weight_range` (inclusive)
/// and stored as milli-units. The result depends only on the arguments.
pub fn random_connected_graph(
    n: usize,
    extra_edges: usize,
    weight_range: (u64, u64),
    seed: u64,
) -> Result<Topology<Milli>, TopologyError> {
    let (lo, hi) = weight_range;
    if n < 2 {
        return Err(TopologyError::TooFewNodes(n));
    }
    if lo == 0 || lo > hi {
        return Err(TopologyError::InvalidWeightRange { lo, hi });
    }
    let available = n * (n - 1) / 2 - (n - 1);
    if extra_edges > available {
        return Err(TopologyError::InfeasibleEdgeCount {
            n,
            extra: extra_edges,
            available,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = random_spanning_tree(n, &mut rng);
    let tree: HashSet<(usize, usize)> = edges.iter().copied().collect();
    let candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|e| !tree.contains(e))
        .collect();
    let mut picked: Vec<usize> = sample(&mut rng, candidates.len(), extra_edges).into_vec();
    picked.sort_unstable();
    edges.extend(picked.into_iter().map(|i| candidates[i]));

    let links: Vec<_> = edges
        .into_iter()
        .map(|(a, b)| (a, b, rng.gen_range(lo..=hi) * 1000))
        .collect();
    Topology::from_links(n, links)
}

/// Uniform random labeled tree via a random Prüfer sequence.
fn random_spanning_tree(n: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    if n == 2 {
        return vec![(0, 1)];
    }
    let prufer: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &prufer {
        degree[v] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &prufer {
        let leaf = leaves.pop_first().expect("prufer decoding always has a leaf");
        edges.push((leaf.min(v), leaf.max(v)));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.insert(v);
        }
    }
    let u = leaves.pop_first().unwrap();
    let w = leaves.pop_first().unwrap();
    edges.push((u, w));
    edges
}
