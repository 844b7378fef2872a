//! Hardware coupling graphs.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::graph::{parse_edge_list, Edge, GraphError};

const IBM20_DATA: &str = include_str!("../data/ibm20.arch");
const IBM27_DATA: &str = include_str!("../data/ibm27.arch");

#[derive(Debug, Error)]
pub enum ArchError {
    #[error("architecture is disconnected ({reached} of {q} qubits reachable from qubit 0)")]
    Disconnected { reached: usize, q: usize },
    #[error("self-loop on physical qubit {0}")]
    SelfLoop(usize),
    #[error("duplicate coupling {0}")]
    DuplicateCoupling(Edge),
    #[error("physical qubit {id} out of range for {q} qubits")]
    OutOfRange { id: usize, q: usize },
    #[error("invalid architecture spec {0:?}")]
    BadSpec(String),
    #[error(transparent)]
    Parse(#[from] GraphError),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Topology family, kept so that callers can pick structure-aware line
/// embeddings (Hilbert curves on grids, cached paths on IBM devices).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Linear,
    Grid { rows: usize, cols: usize },
    Ibm20,
    Ibm27,
    Custom,
}

#[derive(Debug, Clone)]
pub struct Architecture {
    name: String,
    topology: Topology,
    q: usize,
    couplings: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    dist: Vec<u32>,
}

impl PartialEq for Architecture {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.couplings == other.couplings
    }
}

impl Architecture {
    /// Validates a coupling list and precomputes all-pairs hop distances.
    pub fn custom(
        name: impl Into<String>,
        q: usize,
        pairs: &[(usize, usize)],
    ) -> Result<Self, ArchError> {
        Self::build(name.into(), Topology::Custom, q, pairs)
    }

    fn build(
        name: String,
        topology: Topology,
        q: usize,
        pairs: &[(usize, usize)],
    ) -> Result<Self, ArchError> {
        let mut couplings = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            for id in [a, b] {
                if id >= q {
                    return Err(ArchError::OutOfRange { id, q });
                }
            }
            if a == b {
                return Err(ArchError::SelfLoop(a));
            }
            couplings.push(Edge::new(a, b));
        }
        couplings.sort_unstable();
        if let Some(w) = couplings.windows(2).find(|w| w[0] == w[1]) {
            return Err(ArchError::DuplicateCoupling(w[0]));
        }
        let mut adj = vec![Vec::new(); q];
        for e in &couplings {
            adj[e.0].push(e.1);
            adj[e.1].push(e.0);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let dist = all_pairs_bfs(&adj);
        if q > 0 {
            let reached = dist[..q].iter().filter(|&&d| d != u32::MAX).count();
            if reached != q {
                return Err(ArchError::Disconnected { reached, q });
            }
        }
        Ok(Self {
            name,
            topology,
            q,
            couplings,
            adj,
            dist,
        })
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn linear(n: usize) -> Self {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::build(format!("linear:{n}"), Topology::Linear, n, &pairs)
            .expect("a path is connected")
    }

    /// `rows x cols` square lattice with row-major ids.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut pairs = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let id = r * cols + c;
                if c + 1 < cols {
                    pairs.push((id, id + 1));
                }
                if r + 1 < rows {
                    pairs.push((id, id + cols));
                }
            }
        }
        Self::build(
            format!("grid:{rows}x{cols}"),
            Topology::Grid { rows, cols },
            rows * cols,
            &pairs,
        )
        .expect("a lattice is connected")
    }

    /// Smallest square lattice holding at least `n` qubits.
    pub fn square_grid_for(n: usize) -> Self {
        let mut k = 1;
        while k * k < n {
            k += 1;
        }
        Self::grid(k, k)
    }

    /// 20-qubit IBM Q Poughkeepsie.
    pub fn ibm20() -> Self {
        Self::from_data("ibm20", Topology::Ibm20, IBM20_DATA)
    }

    /// 27-qubit IBMQ Cairo (heavy-hex).
    pub fn ibm27() -> Self {
        Self::from_data("ibm27", Topology::Ibm27, IBM27_DATA)
    }

    fn from_data(name: &str, topology: Topology, text: &str) -> Self {
        let (q, pairs) = parse_edge_list(text).expect("bundled coupling map parses");
        Self::build(name.to_string(), topology, q, &pairs).expect("bundled coupling map is valid")
    }

    /// Parses the architecture file format: an optional `# name` line, then
    /// `q m` and `m` coupling lines.
    pub fn parse(text: &str) -> Result<Self, ArchError> {
        let name = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty())
            .and_then(|l| l.strip_prefix('#'))
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .unwrap_or_else(|| "custom".to_string());
        let (q, pairs) = parse_edge_list(text)?;
        Self::custom(name, q, &pairs)
    }

    /// Resolves `linear:N`, `grid:RxC`, `ibm20`, `ibm27` or `file:PATH`.
    pub fn from_spec(spec: &str) -> Result<Self, ArchError> {
        let bad = || ArchError::BadSpec(spec.to_string());
        let spec = spec.trim();
        if let Some(rest) = spec.strip_prefix("linear:") {
            let n: usize = rest.parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            return Ok(Self::linear(n));
        }
        if let Some(rest) = spec.strip_prefix("grid:") {
            let (r, c) = rest.split_once(['x', 'X']).ok_or_else(bad)?;
            let rows: usize = r.parse().map_err(|_| bad())?;
            let cols: usize = c.parse().map_err(|_| bad())?;
            if rows == 0 || cols == 0 {
                return Err(bad());
            }
            return Ok(Self::grid(rows, cols));
        }
        if let Some(path) = spec.strip_prefix("file:") {
            return Self::read(Path::new(path));
        }
        match spec {
            "ibm20" => Ok(Self::ibm20()),
            "ibm27" => Ok(Self::ibm27()),
            _ => Err(bad()),
        }
    }

    pub fn read(path: &Path) -> Result<Self, ArchError> {
        let text = std::fs::read_to_string(path).map_err(|source| ArchError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# {}\n{} {}\n", self.name, self.q, self.couplings.len());
        for e in &self.couplings {
            out.push_str(&format!("{} {}\n", e.0, e.1));
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn couplings(&self) -> &[Edge] {
        &self.couplings
    }

    pub fn neighbors(&self, p: usize) -> &[usize] {
        &self.adj[p]
    }

    pub fn degree(&self, p: usize) -> usize {
        self.adj[p].len()
    }

    pub fn is_coupled(&self, a: usize, b: usize) -> bool {
        a < self.q && b < self.q && self.adj[a].binary_search(&b).is_ok()
    }

    /// BFS hop count between two physical qubits.
    pub fn dist(&self, a: usize, b: usize) -> usize {
        self.dist[a * self.q + b] as usize
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} qubits, {} couplings)",
            self.name,
            self.q,
            self.couplings.len()
        )
    }
}

fn all_pairs_bfs(adj: &[Vec<usize>]) -> Vec<u32> {
    let q = adj.len();
    let mut dist = vec![u32::MAX; q * q];
    let mut queue = VecDeque::new();
    for src in 0..q {
        let row = &mut dist[src * q..(src + 1) * q];
        row[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = row[u];
            for &v in &adj[u] {
                if row[v] == u32::MAX {
                    row[v] = du + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    dist
}
