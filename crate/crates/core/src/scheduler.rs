//! Strategy selection and the end-to-end scheduling pipeline.
//!
//! Pattern-based strategies choose a placement of logical qubits on a
//! virtual chain, lay the chain onto a line embedding of the device and run
//! the pruned pattern. The heuristic strategy follows the pattern only while
//! its execution layers stay well filled, then hands over to
//! [`heuristic`](crate::heuristic).

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arch::{Architecture, Topology};
use crate::circuit::ScheduledCircuit;
use crate::embedding::{hilbert_embedding, line_for, multi_embeddings_with_budget, LineEmbedding};
use crate::graph::ProblemGraph;
use crate::heuristic::{MatchingMode, SchedulerState};
use crate::initial::{
    astar_initial_mapping, iso_initial_mapping, random_initial_mapping, IsoOutcome,
};
use crate::mapping::Mapping;
use crate::pattern::{layer_sequence, meet_table, prune_pattern};
use crate::verify::verify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Pruned pattern from a seeded random placement.
    CtagR,
    /// Pruned pattern from the best-first placement search.
    CtagIAstar,
    /// Pruned pattern from the pattern-graph matching scan; falls back to
    /// the best-first search when the scan times out.
    CtagIIso,
    /// Partial pattern followed by the matching-plus-swap heuristic.
    #[default]
    CtagH,
    /// Pruned pattern from the identity placement.
    PatternOnly,
    /// The shallower of `ctag-i-astar` and `ctag-h`.
    Ctag,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::CtagR,
        Strategy::CtagIAstar,
        Strategy::CtagIIso,
        Strategy::CtagH,
        Strategy::PatternOnly,
        Strategy::Ctag,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::CtagR => "ctag-r",
            Strategy::CtagIAstar => "ctag-i-astar",
            Strategy::CtagIIso => "ctag-i-iso",
            Strategy::CtagH => "ctag-h",
            Strategy::PatternOnly => "pattern-only",
            Strategy::Ctag => "ctag",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = SchedulerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "ctag-i" {
            return Ok(Strategy::CtagIAstar);
        }
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| SchedulerError::Config(format!("unknown strategy {s:?}")))
    }
}

/// Flat scheduler settings, readable from a TOML document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchedulerConfig {
    pub strategy: Strategy,
    /// Minimum share of a full execution layer (`floor(n/2)` gates) that
    /// keeps the heuristic strategy on the pattern.
    pub threshold: f64,
    /// Expansions per depth in the placement search; 0 means unlimited.
    pub beam: usize,
    /// Shortest paths considered per swap strategy.
    pub max_paths: usize,
    pub seed: u64,
    /// Time limit of the pattern-graph matching scan.
    pub timeout_ms: u64,
    /// Return the plain pruned pattern when it is at least as shallow as
    /// the heuristic result.
    pub fallback_guard: bool,
    /// Line embeddings tried by the heuristic strategy.
    pub embeddings: usize,
    pub matching: MatchingMode,
    /// Node-expansion budget of the line-embedding search.
    pub search_budget: u64,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::default(),
            threshold: 0.5,
            beam: 8,
            max_paths: 4,
            seed: 0,
            timeout_ms: 10_000,
            fallback_guard: true,
            embeddings: 2,
            matching: MatchingMode::Greedy,
            search_budget: crate::embedding::DEFAULT_SEARCH_BUDGET,
        }
    }
}

impl SchedulerConfig {
    pub fn with_strategy(strategy: Strategy) -> Self {
        Self {
            strategy,
            ..Self::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, SchedulerError> {
        let cfg: Self = toml::from_str(text).map_err(|e| SchedulerError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), SchedulerError> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(SchedulerError::Config(format!(
                "threshold must lie in [0, 1], got {}",
                self.threshold
            )));
        }
        if self.max_paths == 0 {
            return Err(SchedulerError::Config(
                "max_paths must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn beam_width(&self) -> usize {
        if self.beam == 0 {
            usize::MAX
        } else {
            self.beam
        }
    }
}

#[derive(Debug, Error)]
pub enum SchedulerError {
    #[error("graph has {n} logical qubits but the architecture only {q}")]
    ArchTooSmall { n: usize, q: usize },
    #[error("configuration: {0}")]
    Config(String),
    #[error("internal error: produced schedule failed verification: {0}")]
    Invalid(String),
}

/// Number of leading pattern cycles the heuristic strategy keeps.
///
/// Counts, under chain placement `mapping`, the input-graph CPHASEs fired by
/// each execution layer of the pruned pattern. The prefix ends after the
/// last execution layer `c` such that every execution layer up to `c` fires
/// at least `threshold * floor(n/2)` of them. SWAP layers are only kept when
/// a later execution layer qualifies.
pub fn partial_pattern_cycles(g: &ProblemGraph, mapping: &Mapping, threshold: f64) -> usize {
    let n = g.n();
    if g.m() == 0 || n < 2 {
        return 0;
    }
    let table = meet_table(n);
    let layers = layer_sequence(n);
    let mut fired = vec![0usize; layers.len()];
    for e in g.edges() {
        fired[table.get(mapping.get(e.0), mapping.get(e.1))] += 1;
    }
    let pruned_len = fired.iter().rposition(|&c| c > 0).map_or(0, |c| c + 1);
    let need = threshold * (n / 2) as f64;
    let mut keep = 0;
    for (c, layer) in layers.iter().enumerate().take(pruned_len) {
        if layer.is_execute() {
            if fired[c] as f64 + 1e-9 < need {
                break;
            }
            keep = c + 1;
        }
    }
    keep
}

/// Runs the configured strategy and verifies the result.
pub fn schedule(
    g: &ProblemGraph,
    arch: &Architecture,
    cfg: &SchedulerConfig,
) -> Result<ScheduledCircuit, SchedulerError> {
    cfg.validate()?;
    let n = g.n();
    if n > arch.q() {
        return Err(SchedulerError::ArchTooSmall { n, q: arch.q() });
    }
    let circuit = match cfg.strategy {
        Strategy::Ctag => {
            let via_pattern = run_strategy(g, arch, cfg, Strategy::CtagIAstar);
            let via_heuristic = run_strategy(g, arch, cfg, Strategy::CtagH);
            if via_heuristic.depth() < via_pattern.depth() {
                via_heuristic
            } else {
                via_pattern
            }
        }
        other => run_strategy(g, arch, cfg, other),
    };
    let report = verify(&circuit, g, arch);
    if !report.ok {
        return Err(SchedulerError::Invalid(format!(
            "{} missing, {} duplicated, {} illegal gates",
            report.missing.len(),
            report.duplicated.len(),
            report.illegal_gates.len()
        )));
    }
    Ok(circuit)
}

fn chain_mapping(g: &ProblemGraph, cfg: &SchedulerConfig, strategy: Strategy) -> Mapping {
    match strategy {
        Strategy::CtagR => random_initial_mapping(g.n(), cfg.seed),
        Strategy::PatternOnly => Mapping::identity(g.n()),
        Strategy::CtagIIso => match iso_initial_mapping(g, Duration::from_millis(cfg.timeout_ms)) {
            IsoOutcome::Found { mapping, .. } => mapping,
            IsoOutcome::NotFound | IsoOutcome::TimedOut => {
                astar_initial_mapping(g, cfg.beam_width(), None).0
            }
        },
        Strategy::CtagIAstar | Strategy::CtagH | Strategy::Ctag => {
            astar_initial_mapping(g, cfg.beam_width(), None).0
        }
    }
}

fn run_strategy(
    g: &ProblemGraph,
    arch: &Architecture,
    cfg: &SchedulerConfig,
    strategy: Strategy,
) -> ScheduledCircuit {
    let n = g.n();
    let chain = chain_mapping(g, cfg, strategy);
    let Some(line) = line_for(arch, n, cfg.seed) else {
        // No chain of n coupled qubits: place the chain along a DFS order
        // and leave everything to the heuristic.
        let sites = dfs_order(arch);
        let init = chain.through(&sites);
        return SchedulerState::from_mapping(g, arch, init).run(cfg.max_paths, cfg.matching);
    };
    let pruned = pruned_on(g, &chain, line.order(), arch);
    if strategy != Strategy::CtagH {
        return pruned;
    }

    let mut lines = vec![line];
    for extra in extra_lines(arch, n, cfg) {
        if !lines.iter().any(|l| l.same_path(&extra)) {
            lines.push(extra);
        }
    }
    // The natural-order placement is a second starting point: the search
    // optimizes the full pattern, not the prefix the heuristic keeps.
    let mut chains = vec![chain];
    if chains[0] != Mapping::identity(n) {
        chains.push(Mapping::identity(n));
    }
    let jobs: Vec<(&LineEmbedding, &Mapping)> = lines
        .iter()
        .flat_map(|line| chains.iter().map(move |chain| (line, chain)))
        .collect();
    let candidates: Vec<(ScheduledCircuit, ScheduledCircuit)> = jobs
        .par_iter()
        .map(|&(line, chain)| {
            let keep = partial_pattern_cycles(g, chain, cfg.threshold);
            let pattern = pruned_on(g, chain, line.order(), arch);
            let mut prefix = pattern.clone();
            prefix.cycles.truncate(keep);
            let heuristic = SchedulerState::new(g, arch, prefix).run(cfg.max_paths, cfg.matching);
            (heuristic, pattern)
        })
        .collect();
    let mut best: Option<ScheduledCircuit> = None;
    for (heuristic, pattern) in candidates {
        let pick = if cfg.fallback_guard && pattern.depth() <= heuristic.depth() {
            pattern
        } else {
            heuristic
        };
        if best.as_ref().is_none_or(|b| pick.depth() < b.depth()) {
            best = Some(pick);
        }
    }
    best.expect("at least one line")
}

fn pruned_on(
    g: &ProblemGraph,
    chain: &Mapping,
    line: &[usize],
    arch: &Architecture,
) -> ScheduledCircuit {
    prune_pattern(g, chain, line.len())
        .expect("chain placement is a permutation")
        .relabel(arch.name(), arch.q(), line)
}

/// Extra lines for the heuristic strategy: serpentine variants on grids,
/// searched paths elsewhere.
fn extra_lines(arch: &Architecture, n: usize, cfg: &SchedulerConfig) -> Vec<LineEmbedding> {
    let want = cfg.embeddings.saturating_sub(1);
    if want == 0 {
        return Vec::new();
    }
    let full: Vec<Vec<usize>> = match arch.topology() {
        Topology::Linear => Vec::new(),
        Topology::Grid { rows, cols } => {
            let mut transposed: Vec<usize> = hilbert_embedding(cols, rows)
                .into_iter()
                .map(|id| (id % rows) * cols + id / rows)
                .collect();
            let by_rows = serpentine(rows, cols, false);
            let by_cols = serpentine(rows, cols, true);
            if transposed.len() != rows * cols {
                transposed.clear();
            }
            [transposed, by_rows, by_cols]
                .into_iter()
                .filter(|v| !v.is_empty())
                .collect()
        }
        _ => multi_embeddings_with_budget(arch, cfg.embeddings, cfg.seed, cfg.search_budget)
            .into_iter()
            .map(|e| e.order().to_vec())
            .collect(),
    };
    full.into_iter()
        .filter_map(|order| LineEmbedding::new(order, arch).ok()?.prefix(n))
        .take(want)
        .collect()
}

fn serpentine(rows: usize, cols: usize, by_columns: bool) -> Vec<usize> {
    let mut order = Vec::with_capacity(rows * cols);
    if by_columns {
        for c in 0..cols {
            let col = (0..rows).map(|r| r * cols + c);
            if c % 2 == 0 {
                order.extend(col);
            } else {
                order.extend(col.rev());
            }
        }
    } else {
        for r in 0..rows {
            let row = (0..cols).map(|c| r * cols + c);
            if r % 2 == 0 {
                order.extend(row);
            } else {
                order.extend(row.rev());
            }
        }
    }
    order
}

/// Depth-first preorder of the coupling graph from qubit 0.
fn dfs_order(arch: &Architecture) -> Vec<usize> {
    let mut seen = vec![false; arch.q()];
    let mut order = Vec::with_capacity(arch.q());
    let mut stack = vec![0];
    while let Some(p) = stack.pop() {
        if std::mem::replace(&mut seen[p], true) {
            continue;
        }
        order.push(p);
        for &u in arch.neighbors(p).iter().rev() {
            if !seen[u] {
                stack.push(u);
            }
        }
    }
    order
}
