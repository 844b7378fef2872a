//! MAX-CUT problem graphs.
//!
//! One vertex per logical qubit, one undirected edge per CPHASE gate. Edges
//! are stored normalized (`u < v`) and sorted, which makes equality, hashing
//! and file output canonical.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::rng::SeededRng;

/// Unordered logical pair, always stored with the smaller id first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(pub usize, pub usize);

impl Edge {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn other(&self, v: usize) -> usize {
        if self.0 == v {
            self.1
        } else {
            self.0
        }
    }

    pub fn touches(&self, v: usize) -> bool {
        self.0 == v || self.1 == v
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}")]
    DuplicateEdge(Edge),
    #[error("vertex {id} out of range for {n} vertices")]
    OutOfRange { id: usize, n: usize },
    #[error("degenerate instance: density {density} on {n} vertices yields no edges")]
    NoEdges { n: usize, density: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl ProblemGraph {
    /// Builds a graph from raw pairs, rejecting self-loops, duplicates and
    /// out-of-range ids.
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for &(a, b) in pairs {
            for id in [a, b] {
                if id >= n {
                    return Err(GraphError::OutOfRange { id, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let e = Edge::new(a, b);
            if !seen.insert(e) {
                return Err(GraphError::DuplicateEdge(e));
            }
        }
        Ok(Self::from_sorted(n, seen.into_iter().collect()))
    }

    fn from_sorted(n: usize, edges: Vec<Edge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            adj[e.0].push(e.1);
            adj[e.1].push(e.0);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Self { n, edges, adj }
    }

    pub fn clique(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for a in 0..n {
            for b in a + 1..n {
                edges.push(Edge(a, b));
            }
        }
        Self::from_sorted(n, edges)
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted(n, Vec::new())
    }

    /// Uniform random graph with exactly `round(density * n(n-1)/2)` edges.
    ///
    /// Pairs `(u, v)`, `u < v`, are indexed in lexicographic order and `m` of
    /// them are drawn without replacement by a partial Fisher-Yates shuffle
    /// driven by [`SeededRng`]. Half-way products round up; a 1e-9 slack
    /// absorbs binary representation error so that e.g. `0.3 * 1225` gives 368.
    pub fn random(n: usize, density: f64, seed: u64) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::InvalidParameter(format!(
                "random graph needs at least 2 vertices, got {n}"
            )));
        }
        if !(density > 0.0 && density <= 1.0) {
            return Err(GraphError::InvalidParameter(format!(
                "density must lie in (0, 1], got {density}"
            )));
        }
        let total = n * (n - 1) / 2;
        let m = ((density * total as f64) + 0.5 + 1e-9).floor() as usize;
        let m = m.min(total);
        if m == 0 {
            return Err(GraphError::NoEdges { n, density });
        }
        let mut rng = SeededRng::new(seed);
        let mut picked = rng.sample_indices(total, m);
        picked.sort_unstable();
        let edges = picked
            .into_iter()
            .map(|idx| pair_from_index(n, idx))
            .collect();
        Ok(Self::from_sorted(n, edges))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && a < self.n && b < self.n && self.adj[a].binary_search(&b).is_ok()
    }

    /// Edge count over clique edge count. Zero for graphs with fewer than two
    /// vertices.
    pub fn density(&self) -> f64 {
        let total = self.n * self.n.saturating_sub(1) / 2;
        if total == 0 {
            0.0
        } else {
            self.m() as f64 / total as f64
        }
    }

    /// Parses the `n m` / `u v` edge-list format. Blank lines and `#`
    /// comments are skipped.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let (n, pairs) = parse_edge_list(text)?;
        Self::new(n, &pairs)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        for e in &self.edges {
            out.push_str(&format!("{} {}\n", e.0, e.1));
        }
        out
    }
}

/// Inverse of the lexicographic pair enumeration used by [`ProblemGraph::random`].
fn pair_from_index(n: usize, mut idx: usize) -> Edge {
    let mut u = 0;
    loop {
        let row = n - 1 - u;
        if idx < row {
            return Edge(u, u + 1 + idx);
        }
        idx -= row;
        u += 1;
    }
}

/// Shared reader for the graph and architecture edge-list formats.
pub(crate) fn parse_edge_list(text: &str) -> Result<(usize, Vec<(usize, usize)>), GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(GraphError::Parse {
                line,
                msg: format!("expected two integers, found {:?}", content),
            });
        }
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| GraphError::Parse {
                line,
                msg: format!("not a non-negative integer: {s:?}"),
            })
        };
        let a = parse(fields[0])?;
        let b = parse(fields[1])?;
        match header {
            None => header = Some((a, b)),
            Some((n, _)) => {
                if a >= n || b >= n {
                    return Err(GraphError::Parse {
                        line,
                        msg: format!("vertex id out of range for n = {n}"),
                    });
                }
                pairs.push((a, b));
            }
        }
    }
    let (n, m) = header.ok_or(GraphError::Parse {
        line: 1,
        msg: "missing \"n m\" header".into(),
    })?;
    if pairs.len() != m {
        return Err(GraphError::Parse {
            line: text.lines().count().max(1),
            msg: format!("header declares {m} edges, found {}", pairs.len()),
        });
    }
    Ok((n, pairs))
}
