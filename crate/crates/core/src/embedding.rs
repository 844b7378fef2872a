//! Line embeddings: chains of consecutively coupled physical qubits along
//! which the linear pattern can run on a non-linear device.

use thiserror::Error;

use crate::arch::{Architecture, Topology};
use crate::rng::SeededRng;

const IBM20_LINE: &str = include_str!("../data/ibm20.embedding");
const IBM27_LINE: &str = include_str!("../data/ibm27.embedding");

/// Default node-expansion budget of the path search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum EmbeddingError {
    #[error("physical qubit {id} out of range for {q} qubits")]
    OutOfRange { id: usize, q: usize },
    #[error("physical qubit {0} appears twice")]
    Repeated(usize),
    #[error("consecutive qubits {0} and {1} are not coupled")]
    NotCoupled(usize, usize),
    #[error("embedding file: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LineEmbedding {
    order: Vec<usize>,
}

impl LineEmbedding {
    pub fn new(order: Vec<usize>, arch: &Architecture) -> Result<Self, EmbeddingError> {
        let q = arch.q();
        let mut seen = vec![false; q];
        for &p in &order {
            if p >= q {
                return Err(EmbeddingError::OutOfRange { id: p, q });
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(EmbeddingError::Repeated(p));
            }
        }
        if let Some(w) = order.windows(2).find(|w| !arch.is_coupled(w[0], w[1])) {
            return Err(EmbeddingError::NotCoupled(w[0], w[1]));
        }
        Ok(Self { order })
    }

    /// Single line of whitespace-separated qubit ids; `#` lines are ignored.
    pub fn parse(text: &str, arch: &Architecture) -> Result<Self, EmbeddingError> {
        let order = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .flat_map(str::split_whitespace)
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| EmbeddingError::Parse(format!("not a qubit id: {tok:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(order, arch)
    }

    pub fn to_text(&self) -> String {
        let ids: Vec<String> = self.order.iter().map(usize::to_string).collect();
        format!("{}\n", ids.join(" "))
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn prefix(&self, n: usize) -> Option<Self> {
        (n <= self.order.len()).then(|| Self {
            order: self.order[..n].to_vec(),
        })
    }

    /// Same path up to direction.
    pub fn same_path(&self, other: &Self) -> bool {
        self.order == other.order || self.order.iter().eq(other.order.iter().rev())
    }
}

/// Generalized Hilbert traversal of a `rows x cols` lattice (row-major ids).
///
/// Rectangles are split recursively in the style of the "gilbert" curve,
/// which visits every site with unit steps for most shapes. When the split
/// leaves a diagonal step in one orientation the transposed recursion is
/// used, and a serpentine order is the last resort.
pub fn hilbert_embedding(rows: usize, cols: usize) -> Vec<usize> {
    let (w, h) = (cols as i64, rows as i64);
    for transposed in [false, true] {
        let mut pts = Vec::with_capacity(rows * cols);
        if transposed {
            gilbert(&mut pts, 0, 0, 0, h, w, 0);
        } else {
            gilbert(&mut pts, 0, 0, w, 0, 0, h);
        }
        let unit = pts
            .windows(2)
            .all(|s| (s[0].0 - s[1].0).abs() + (s[0].1 - s[1].1).abs() == 1);
        if unit && pts.len() == rows * cols {
            return pts
                .into_iter()
                .map(|(x, y)| y as usize * cols + x as usize)
                .collect();
        }
    }
    serpentine(rows, cols)
}

fn serpentine(rows: usize, cols: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        if r % 2 == 0 {
            order.extend((0..cols).map(|c| r * cols + c));
        } else {
            order.extend((0..cols).rev().map(|c| r * cols + c));
        }
    }
    order
}

/// Appends the points of the rectangle spanned by the major axis `(ax, ay)`
/// and minor axis `(bx, by)` from corner `(x, y)`.
#[allow(clippy::too_many_arguments)]
fn gilbert(out: &mut Vec<(i64, i64)>, x: i64, y: i64, ax: i64, ay: i64, bx: i64, by: i64) {
    let w = (ax + ay).abs();
    let h = (bx + by).abs();
    let (dax, day) = (ax.signum(), ay.signum());
    let (dbx, dby) = (bx.signum(), by.signum());
    if h == 1 {
        let (mut x, mut y) = (x, y);
        for _ in 0..w {
            out.push((x, y));
            x += dax;
            y += day;
        }
        return;
    }
    if w == 1 {
        let (mut x, mut y) = (x, y);
        for _ in 0..h {
            out.push((x, y));
            x += dbx;
            y += dby;
        }
        return;
    }
    let (mut ax2, mut ay2) = (ax.div_euclid(2), ay.div_euclid(2));
    let (mut bx2, mut by2) = (bx.div_euclid(2), by.div_euclid(2));
    let w2 = (ax2 + ay2).abs();
    let h2 = (bx2 + by2).abs();
    if 2 * w > 3 * h {
        if w2 % 2 == 1 && w > 2 {
            ax2 += dax;
            ay2 += day;
        }
        gilbert(out, x, y, ax2, ay2, bx, by);
        gilbert(out, x + ax2, y + ay2, ax - ax2, ay - ay2, bx, by);
    } else {
        if h2 % 2 == 1 && h > 2 {
            bx2 += dbx;
            by2 += dby;
        }
        gilbert(out, x, y, bx2, by2, ax2, ay2);
        gilbert(out, x + bx2, y + by2, ax, ay, bx - bx2, by - by2);
        gilbert(
            out,
            x + (ax - dax) + (bx2 - dbx),
            y + (ay - day) + (by2 - dby),
            -bx2,
            -by2,
            -(ax - ax2),
            -(ay - ay2),
        );
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(LineEmbedding),
    /// The search space was exhausted: no such path exists.
    NoPath,
    /// The expansion budget ran out first; existence is unknown.
    BudgetExhausted,
}

impl SearchOutcome {
    pub fn found(self) -> Option<LineEmbedding> {
        match self {
            SearchOutcome::Found(e) => Some(e),
            _ => None,
        }
    }
}

/// Hamiltonian path search with the default budget.
pub fn find_line_embedding(arch: &Architecture, seed: u64) -> SearchOutcome {
    search_path(arch, arch.q(), seed, DEFAULT_SEARCH_BUDGET)
}

/// Backtracking search for a simple path on `len` qubits.
///
/// Start vertices are tried in ascending degree, and at each step the
/// unvisited neighbor with the fewest unvisited neighbors of its own is
/// extended first (Warnsdorff's rule); `seed` only breaks ties. For full
/// paths the search also cuts branches that strand an unvisited vertex or
/// leave more than one forced endpoint.
pub fn search_path(arch: &Architecture, len: usize, seed: u64, budget: u64) -> SearchOutcome {
    let q = arch.q();
    if len == 0 || len > q {
        return SearchOutcome::NoPath;
    }
    let mut rng = SeededRng::new(seed);
    let mut tie: Vec<u64> = (0..q).map(|_| rng.next_u64()).collect();
    let mut starts: Vec<usize> = (0..q).collect();
    starts.sort_by_key(|&p| (arch.degree(p), tie[p]));
    // Fresh tie-breaks for the neighbor ordering.
    for t in &mut tie {
        *t = rng.next_u64();
    }
    let mut search = PathSearch {
        arch,
        len,
        tie,
        visited: vec![false; q],
        path: Vec::with_capacity(len),
        expansions: 0,
        budget,
    };
    for s in starts {
        match search.from(s) {
            Step::Found => return SearchOutcome::Found(LineEmbedding { order: search.path }),
            Step::OutOfBudget => return SearchOutcome::BudgetExhausted,
            Step::Failed => {}
        }
    }
    SearchOutcome::NoPath
}

enum Step {
    Found,
    Failed,
    OutOfBudget,
}

struct PathSearch<'a> {
    arch: &'a Architecture,
    len: usize,
    tie: Vec<u64>,
    visited: Vec<bool>,
    path: Vec<usize>,
    expansions: u64,
    budget: u64,
}

impl PathSearch<'_> {
    fn from(&mut self, v: usize) -> Step {
        self.expansions += 1;
        if self.expansions > self.budget {
            return Step::OutOfBudget;
        }
        self.visited[v] = true;
        self.path.push(v);
        if self.path.len() == self.len {
            return Step::Found;
        }
        if self.len < self.arch.q() || self.full_path_possible(v) {
            let mut next: Vec<usize> = self
                .arch
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&u| !self.visited[u])
                .collect();
            next.sort_by_key(|&u| (self.free_degree(u), self.tie[u]));
            for u in next {
                match self.from(u) {
                    Step::Failed => {}
                    done => return done,
                }
            }
        }
        self.path.pop();
        self.visited[v] = false;
        Step::Failed
    }

    fn free_degree(&self, u: usize) -> usize {
        self.arch
            .neighbors(u)
            .iter()
            .filter(|&&w| !self.visited[w])
            .count()
    }

    /// Every unvisited vertex needs two usable neighbors (unvisited, or the
    /// current head), except a single one that can end the path.
    fn full_path_possible(&self, head: usize) -> bool {
        let mut endpoints = 0;
        for u in 0..self.arch.q() {
            if self.visited[u] {
                continue;
            }
            let usable = self.free_degree(u) + usize::from(self.arch.is_coupled(u, head));
            match usable {
                0 => return false,
                1 => {
                    endpoints += 1;
                    if endpoints > 1 {
                        return false;
                    }
                }
                _ => {}
            }
        }
        true
    }
}

/// Up to `k` distinct full embeddings (a path and its reverse count once).
/// The structure-aware line from [`line_for`] comes first, followed by
/// re-seeded searches.
pub fn multi_embeddings(arch: &Architecture, k: usize, seed: u64) -> Vec<LineEmbedding> {
    multi_embeddings_with_budget(arch, k, seed, DEFAULT_SEARCH_BUDGET)
}

pub fn multi_embeddings_with_budget(
    arch: &Architecture,
    k: usize,
    seed: u64,
    budget: u64,
) -> Vec<LineEmbedding> {
    let mut found: Vec<LineEmbedding> = Vec::new();
    let push = |e: LineEmbedding, found: &mut Vec<LineEmbedding>| {
        if found.len() < k && !found.iter().any(|f| f.same_path(&e)) {
            found.push(e);
        }
    };
    if let Some(e) = line_for(arch, arch.q(), seed) {
        push(e, &mut found);
    }
    let attempts = 8 * k as u64 + 8;
    let mut rng = SeededRng::new(seed ^ 0x6a09_e667_f3bc_c909);
    for _ in 0..attempts {
        if found.len() >= k {
            break;
        }
        match search_path(arch, arch.q(), rng.next_u64(), budget) {
            SearchOutcome::Found(e) => push(e, &mut found),
            SearchOutcome::NoPath => break,
            SearchOutcome::BudgetExhausted => {}
        }
    }
    found
}

fn cached_line(text: &str, arch: &Architecture) -> LineEmbedding {
    LineEmbedding::parse(text, arch).expect("bundled embedding is a valid path")
}

/// A path on `n` physical qubits suited to the architecture: the chain
/// itself on linear devices, a Hilbert-curve prefix on grids, the bundled
/// path on IBM devices and a searched path otherwise. `None` if no path of
/// that length is known.
pub fn line_for(arch: &Architecture, n: usize, seed: u64) -> Option<LineEmbedding> {
    if n > arch.q() {
        return None;
    }
    let full = match arch.topology() {
        Topology::Linear => LineEmbedding {
            order: (0..arch.q()).collect(),
        },
        Topology::Grid { rows, cols } => LineEmbedding {
            order: hilbert_embedding(rows, cols),
        },
        Topology::Ibm20 => cached_line(IBM20_LINE, arch),
        Topology::Ibm27 => cached_line(IBM27_LINE, arch),
        Topology::Custom => {
            return search_path(arch, n, seed, DEFAULT_SEARCH_BUDGET).found();
        }
    };
    full.prefix(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_path(arch: &Architecture, order: &[usize]) {
        LineEmbedding::new(order.to_vec(), arch).unwrap();
    }

    #[test]
    fn hilbert_four_by_four() {
        let order = hilbert_embedding(4, 4);
        assert_eq!(order.len(), 16);
        assert_path(&Architecture::grid(4, 4), &order);
    }

    #[test]
    fn hilbert_many_shapes() {
        for rows in 2..=12 {
            for cols in 2..=12 {
                let order = hilbert_embedding(rows, cols);
                assert_eq!(order.len(), rows * cols);
                assert_path(&Architecture::grid(rows, cols), &order);
            }
        }
    }

    #[test]
    fn star_has_no_path() {
        let star = Architecture::custom("star", 4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(find_line_embedding(&star, 0), SearchOutcome::NoPath);
    }

    #[test]
    fn budget_exhaustion_is_distinct() {
        let arch = Architecture::grid(5, 5);
        assert_eq!(search_path(&arch, 25, 0, 3), SearchOutcome::BudgetExhausted);
    }

    #[test]
    fn linear_identity() {
        let arch = Architecture::linear(6);
        assert_eq!(line_for(&arch, 6, 0).unwrap().order(), &[0, 1, 2, 3, 4, 5]);
        let found = find_line_embedding(&arch, 1).found().unwrap();
        assert!(found.same_path(&line_for(&arch, 6, 0).unwrap()));
    }

    #[test]
    fn ibm_lines() {
        let a20 = Architecture::ibm20();
        assert_eq!(line_for(&a20, 20, 0).unwrap().len(), 20);
        let searched = find_line_embedding(&a20, 3).found().unwrap();
        assert_eq!(searched.len(), 20);
        let a27 = Architecture::ibm27();
        assert_eq!(line_for(&a27, 21, 0).unwrap().len(), 21);
        assert!(line_for(&a27, 22, 0).is_none());
    }

    #[test]
    fn multi_on_grid_and_line() {
        assert_eq!(multi_embeddings(&Architecture::grid(3, 4), 2, 0).len(), 2);
        assert_eq!(multi_embeddings(&Architecture::linear(5), 3, 0).len(), 1);
        assert!(multi_embeddings(&Architecture::grid(2, 2), 2, 0).len() >= 2);
    }

    #[test]
    fn rejects_bad_orders() {
        let arch = Architecture::linear(4);
        assert_eq!(
            LineEmbedding::new(vec![0, 2], &arch),
            Err(EmbeddingError::NotCoupled(0, 2))
        );
        assert_eq!(
            LineEmbedding::new(vec![0, 1, 0], &arch),
            Err(EmbeddingError::Repeated(0))
        );
    }
}
