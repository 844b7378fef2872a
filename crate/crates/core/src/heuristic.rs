//! Matching-plus-swap heuristic that finishes a schedule once following
//! the pattern stops paying off.
//!
//! Each round:
//!
//! 1. collect the remaining edges whose endpoints are coupled,
//! 2. schedule a maximal matching of them,
//! 3. walk the other remaining edges by increasing distance and, for each,
//!    apply the best-scoring swap strategy that leaves this round's gates and
//!    the still-executable edges alone. Equal scores go to fewer SWAPs, then
//!    to the strategy whose SWAPs finish earliest, then to the lowest new
//!    positions and path index.
//!
//! Gates are placed as soon as both of their qubits are free, so SWAPs and
//! CPHASEs from different rounds interleave. A round with nothing
//! executable always moves at least one edge into reach, which bounds the
//! loop.

use std::cmp::Reverse;
use std::collections::BTreeSet;

use petgraph::graph::UnGraph;
use serde::{Deserialize, Serialize};

use crate::arch::Architecture;
use crate::circuit::{Gate, ScheduledCircuit};
use crate::graph::{Edge, ProblemGraph};
use crate::mapping::Mapping;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchingMode {
    /// Greedy maximal matching.
    #[default]
    Greedy,
    /// Maximum-cardinality matching.
    Maximum,
}

/// SWAP plan that brings the two endpoints of `edge` next to each other
/// along one shortest path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapStrategy {
    /// `(n_i, n_j)`: `n_i` starts at `path[0]`, `n_j` at the last entry.
    pub edge: (usize, usize),
    /// Hops travelled by `n_i` and by `n_j`; they add up to `path.len() - 2`.
    pub split: (usize, usize),
    pub path: Vec<usize>,
    pub path_index: usize,
    pub new_positions: (usize, usize),
}

impl SwapStrategy {
    /// SWAPs in application order: `n_i` walks forward, then `n_j` walks
    /// back.
    pub fn swaps(&self) -> Vec<(usize, usize)> {
        let (d1, d2) = self.split;
        let last = self.path.len() - 1;
        let mut out = Vec::with_capacity(d1 + d2);
        for k in 0..d1 {
            out.push((self.path[k], self.path[k + 1]));
        }
        for k in 0..d2 {
            out.push((self.path[last - k], self.path[last - k - 1]));
        }
        out
    }

    /// Physical qubits the strategy's SWAPs act on.
    pub fn touched(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.swaps().into_iter().flat_map(|(a, b)| [a, b]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn swap_count(&self) -> usize {
        self.split.0 + self.split.1
    }
}

/// Mutable scheduling state.
#[derive(Debug, Clone)]
pub struct SchedulerState<'a> {
    g: &'a ProblemGraph,
    arch: &'a Architecture,
    /// Logical to physical.
    pub mapping: Vec<usize>,
    /// Physical to logical.
    holder: Vec<Option<usize>>,
    pub remaining: BTreeSet<Edge>,
    /// Remaining neighbors of each logical qubit.
    pending: Vec<BTreeSet<usize>>,
    pub circuit: ScheduledCircuit,
    /// First cycle in which each physical qubit is free.
    free_from: Vec<usize>,
    /// Number of completed rounds.
    pub cycle_cursor: usize,
}

impl<'a> SchedulerState<'a> {
    /// Starts from `circuit` (which may already hold a schedule prefix):
    /// replays it to find the current mapping, the edges still to run and
    /// when each qubit becomes free.
    pub fn new(g: &'a ProblemGraph, arch: &'a Architecture, circuit: ScheduledCircuit) -> Self {
        let q = arch.q();
        let mut holder = circuit.init.inverse(q);
        let mut remaining: BTreeSet<Edge> = g.edges().iter().copied().collect();
        let mut free_from = vec![0; q];
        for (t, cycle) in circuit.cycles.iter().enumerate() {
            for gate in cycle {
                free_from[gate.a] = t + 1;
                free_from[gate.b] = t + 1;
                if gate.is_swap() {
                    holder.swap(gate.a, gate.b);
                } else if let (Some(u), Some(v)) = (holder[gate.a], holder[gate.b]) {
                    remaining.remove(&Edge::new(u, v));
                }
            }
        }
        let mut mapping = vec![0; g.n()];
        for (p, slot) in holder.iter().enumerate() {
            if let Some(l) = *slot {
                mapping[l] = p;
            }
        }
        let mut pending = vec![BTreeSet::new(); g.n()];
        for e in &remaining {
            pending[e.0].insert(e.1);
            pending[e.1].insert(e.0);
        }
        Self {
            g,
            arch,
            mapping,
            holder,
            remaining,
            pending,
            circuit,
            free_from,
            cycle_cursor: 0,
        }
    }

    pub fn from_mapping(g: &'a ProblemGraph, arch: &'a Architecture, init: Mapping) -> Self {
        Self::new(g, arch, ScheduledCircuit::new(arch.name(), arch.q(), init))
    }

    pub fn arch(&self) -> &Architecture {
        self.arch
    }

    pub fn graph(&self) -> &ProblemGraph {
        self.g
    }

    pub fn is_executable(&self, e: Edge) -> bool {
        self.arch.is_coupled(self.mapping[e.0], self.mapping[e.1])
    }

    pub fn pending_neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.pending[v]
    }

    fn place(&mut self, gate: Gate) {
        let t = self.free_from[gate.a].max(self.free_from[gate.b]);
        if self.circuit.cycles.len() <= t {
            self.circuit.cycles.resize(t + 1, Vec::new());
        }
        self.circuit.cycles[t].push(gate);
        self.free_from[gate.a] = t + 1;
        self.free_from[gate.b] = t + 1;
    }

    fn execute(&mut self, e: Edge) {
        let (a, b) = (self.mapping[e.0], self.mapping[e.1]);
        self.place(Gate::cphase(a, b, (e.0, e.1)));
        self.remaining.remove(&e);
        self.pending[e.0].remove(&e.1);
        self.pending[e.1].remove(&e.0);
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.place(Gate::swap(a, b));
        self.holder.swap(a, b);
        for p in [a, b] {
            if let Some(l) = self.holder[p] {
                self.mapping[l] = p;
            }
        }
    }

    /// Cycle after the strategy's last SWAP when its SWAPs are placed as
    /// early as possible from the current schedule.
    pub fn finish_cycle(&self, ss: &SwapStrategy) -> usize {
        let mut free: Vec<(usize, usize)> = Vec::new();
        let free_at = |p: usize, free: &[(usize, usize)]| {
            free.iter()
                .find(|(q, _)| *q == p)
                .map_or(self.free_from[p], |&(_, t)| t)
        };
        let mut finish = 0;
        for (a, b) in ss.swaps() {
            let t = free_at(a, &free).max(free_at(b, &free)) + 1;
            free.retain(|(q, _)| *q != a && *q != b);
            free.push((a, t));
            free.push((b, t));
            finish = finish.max(t);
        }
        finish
    }

    /// Runs rounds until every edge is scheduled.
    pub fn run(mut self, max_paths: usize, mode: MatchingMode) -> ScheduledCircuit {
        while !self.remaining.is_empty() {
            self.round(max_paths, mode);
            self.cycle_cursor += 1;
        }
        self.circuit.trim_trailing_swaps();
        self.circuit
    }

    /// One round; returns the number of CPHASEs scheduled and strategies
    /// applied.
    pub fn round(&mut self, max_paths: usize, mode: MatchingMode) -> (usize, usize) {
        let executable: Vec<Edge> = self
            .remaining
            .iter()
            .copied()
            .filter(|&e| self.is_executable(e))
            .collect();
        let chosen = maximal_matching(&executable, self, mode);
        let q = self.arch.q();
        let mut reserved = vec![false; q];
        for e in &chosen {
            reserved[self.mapping[e.0]] = true;
            reserved[self.mapping[e.1]] = true;
            self.execute(*e);
        }
        for e in &executable {
            if self.remaining.contains(e) {
                reserved[self.mapping[e.0]] = true;
                reserved[self.mapping[e.1]] = true;
            }
        }

        let mut distant: Vec<(usize, Edge)> = self
            .remaining
            .iter()
            .filter(|&&e| !self.is_executable(e))
            .map(|&e| (self.arch.dist(self.mapping[e.0], self.mapping[e.1]), e))
            .collect();
        distant.sort_unstable();
        let mut applied = 0;
        for (_, e) in distant {
            if reserved.iter().filter(|&&r| !r).count() < 2 {
                break;
            }
            let best = enumerate_swap_strategies_with(e, self, max_paths, &reserved)
                .into_iter()
                .map(|ss| {
                    let key = (
                        score_strategy(&ss, self),
                        ss.swap_count(),
                        self.finish_cycle(&ss),
                        ss.new_positions,
                        ss.path_index,
                    );
                    (key, ss)
                })
                .min_by(|(ka, _), (kb, _)| ka.cmp(kb));
            if let Some((_, ss)) = best {
                for p in ss.touched() {
                    reserved[p] = true;
                }
                // The endpoints end up adjacent; keep them for next round.
                reserved[ss.new_positions.0] = true;
                reserved[ss.new_positions.1] = true;
                for (a, b) in ss.swaps() {
                    self.swap(a, b);
                }
                applied += 1;
            }
        }
        (chosen.len(), applied)
    }
}

/// Greedy maximal matching on physical qubits. Edges whose endpoints have
/// the most remaining non-executable edges go first (they are the hardest
/// to serve later); ties go to the lowest edge. `Maximum` mode returns a
/// maximum-cardinality matching instead.
pub fn maximal_matching(
    edges: &[Edge],
    state: &SchedulerState<'_>,
    mode: MatchingMode,
) -> Vec<Edge> {
    match mode {
        MatchingMode::Greedy => greedy_matching(edges, state),
        MatchingMode::Maximum => maximum_matching(edges, state),
    }
}

fn greedy_matching(edges: &[Edge], state: &SchedulerState<'_>) -> Vec<Edge> {
    let blocked_work = |v: usize| {
        state.pending[v]
            .iter()
            .filter(|&&u| !state.is_executable(Edge::new(u, v)))
            .count()
    };
    let mut order: Vec<(Reverse<usize>, Edge)> = edges
        .iter()
        .map(|&e| (Reverse(blocked_work(e.0) + blocked_work(e.1)), e))
        .collect();
    order.sort_unstable();
    let mut used = vec![false; state.arch.q()];
    let mut out = Vec::new();
    for (_, e) in order {
        let (a, b) = (state.mapping[e.0], state.mapping[e.1]);
        if !used[a] && !used[b] {
            used[a] = true;
            used[b] = true;
            out.push(e);
        }
    }
    out.sort_unstable();
    out
}

fn maximum_matching(edges: &[Edge], state: &SchedulerState<'_>) -> Vec<Edge> {
    let mut graph = UnGraph::<(), Edge>::with_capacity(state.arch.q(), edges.len());
    let nodes: Vec<_> = (0..state.arch.q()).map(|_| graph.add_node(())).collect();
    for &e in edges {
        graph.add_edge(nodes[state.mapping[e.0]], nodes[state.mapping[e.1]], e);
    }
    let matching = petgraph::algo::maximum_matching(&graph);
    let mut out: Vec<Edge> = matching
        .edges()
        .map(|(a, b)| {
            let (a, b) = (a.index(), b.index());
            *edges
                .iter()
                .find(|e| {
                    let (pa, pb) = (state.mapping[e.0], state.mapping[e.1]);
                    (pa, pb) == (a, b) || (pa, pb) == (b, a)
                })
                .expect("matched pair comes from the edge list")
        })
        .collect();
    out.sort_unstable();
    out
}

/// Up to `limit` shortest paths from `from` to `to`, in lexicographic order
/// of their qubit sequences.
pub fn shortest_paths(
    arch: &Architecture,
    from: usize,
    to: usize,
    limit: usize,
) -> Vec<Vec<usize>> {
    fn walk(
        arch: &Architecture,
        to: usize,
        path: &mut Vec<usize>,
        limit: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if out.len() >= limit {
            return;
        }
        let here = *path.last().expect("path starts non-empty");
        if here == to {
            out.push(path.clone());
            return;
        }
        let left = arch.dist(here, to);
        for &next in arch.neighbors(here) {
            if arch.dist(next, to) + 1 == left {
                path.push(next);
                walk(arch, to, path, limit, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(arch, to, &mut vec![from], limit.max(1), &mut out);
    out
}

/// Feasible swap strategies for a non-executable remaining edge, with no
/// qubits reserved yet in the current round.
pub fn enumerate_swap_strategies(
    edge: Edge,
    state: &SchedulerState<'_>,
    max_paths: usize,
) -> Vec<SwapStrategy> {
    let reserved = vec![false; state.arch.q()];
    enumerate_swap_strategies_with(edge, state, max_paths, &reserved)
}

/// Every split of every enumerated shortest path, minus strategies that
/// would SWAP a `reserved` qubit (one holding a gate of this round or an
/// endpoint of a still-executable edge).
pub fn enumerate_swap_strategies_with(
    edge: Edge,
    state: &SchedulerState<'_>,
    max_paths: usize,
    reserved: &[bool],
) -> Vec<SwapStrategy> {
    let (ni, nj) = (edge.0, edge.1);
    let (pi, pj) = (state.mapping[ni], state.mapping[nj]);
    let d = state.arch.dist(pi, pj);
    if d < 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (path_index, path) in shortest_paths(state.arch, pi, pj, max_paths)
        .into_iter()
        .enumerate()
    {
        for d1 in 0..d {
            let d2 = d - 1 - d1;
            let ss = SwapStrategy {
                edge: (ni, nj),
                split: (d1, d2),
                new_positions: (path[d1], path[d1 + 1]),
                path: path.clone(),
                path_index,
            };
            if ss.touched().iter().all(|&p| !reserved[p]) {
                out.push(ss);
            }
        }
    }
    out
}

/// Sum of distances from each endpoint's new position to the positions of
/// its other remaining neighbors, evaluated on the mapping after the
/// strategy's SWAPs. Lower is better.
pub fn score_strategy(ss: &SwapStrategy, state: &SchedulerState<'_>) -> usize {
    let mut holder: Vec<Option<usize>> = ss.path.iter().map(|&p| state.holder[p]).collect();
    let index: Vec<usize> = ss.path.clone();
    let position = |l: usize, holder: &[Option<usize>]| -> usize {
        holder
            .iter()
            .position(|&h| h == Some(l))
            .map_or(state.mapping[l], |k| index[k])
    };
    let (d1, d2) = ss.split;
    let last = holder.len() - 1;
    for k in 0..d1 {
        holder.swap(k, k + 1);
    }
    for k in 0..d2 {
        holder.swap(last - k, last - k - 1);
    }
    let (ni, nj) = ss.edge;
    let mut score = 0;
    for (me, other, at) in [(ni, nj, ss.new_positions.0), (nj, ni, ss.new_positions.1)] {
        for &u in &state.pending[me] {
            if u != other {
                score += state.arch.dist(at, position(u, &holder));
            }
        }
    }
    score
}
