//! The clique pattern on a linear chain and everything derived from it.
//!
//! One outer-loop iteration is four layers over physical positions:
//!
//! ```text
//! CPHASE even-odd   (0,1) (2,3) ...
//! CPHASE odd-even   (1,2) (3,4) ...
//! SWAP   odd-even
//! SWAP   even-odd
//! ```
//!
//! Even `n` runs `n/2` iterations and drops the two trailing SWAP layers,
//! for `2n - 2` cycles. Odd `n` runs `(n-1)/2` full iterations and then a
//! truncated one in which the even-odd SWAP layer is replaced by the final
//! even-odd CPHASE layer (a SWAP directly before a CPHASE on the same pairs
//! is redundant), which is again `2n - 2` cycles. Every unordered pair of
//! qubits meets exactly once.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::arch::Architecture;
use crate::circuit::{Gate, ScheduledCircuit};
use crate::graph::ProblemGraph;
use crate::mapping::{Mapping, MappingError};

#[derive(Debug, Error, PartialEq)]
pub enum PatternError {
    #[error("pattern needs at least {min} qubits, got {n}")]
    TooSmall { n: usize, min: usize },
    #[error("one outer loop on {n} positions is not a single cycle (cycle through position 1 has length {len})")]
    NotSingleCycle { n: usize, len: usize },
    #[error("initial mapping covers {mapping} logical qubits but the graph has {graph}")]
    SizeMismatch { mapping: usize, graph: usize },
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// Pairs `(0,1), (2,3), ...`
    EvenOdd,
    /// Pairs `(1,2), (3,4), ...`
    OddEven,
}

impl Parity {
    pub fn pairs(self, n: usize) -> impl Iterator<Item = (usize, usize)> {
        let start = match self {
            Parity::EvenOdd => 0,
            Parity::OddEven => 1,
        };
        (start..n.saturating_sub(1)).step_by(2).map(|i| (i, i + 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Execute(Parity),
    Swap(Parity),
}

impl Layer {
    pub fn is_execute(self) -> bool {
        matches!(self, Layer::Execute(_))
    }
}

const LOOP_BODY: [Layer; 4] = [
    Layer::Execute(Parity::EvenOdd),
    Layer::Execute(Parity::OddEven),
    Layer::Swap(Parity::OddEven),
    Layer::Swap(Parity::EvenOdd),
];

/// The `2n - 2` layers of the clique pattern, already trimmed.
pub fn layer_sequence(n: usize) -> Vec<Layer> {
    if n < 2 {
        return Vec::new();
    }
    let len = 2 * n - 2;
    let mut layers: Vec<Layer> = (0..len).map(|c| LOOP_BODY[c % 4]).collect();
    if n % 2 == 1 {
        layers[len - 1] = Layer::Execute(Parity::EvenOdd);
    }
    layers
}

/// Outer-loop index a pattern cycle belongs to. The closing CPHASE layer of
/// an odd-length chain forms its own (truncated) iteration.
pub fn outer_loop_of(n: usize, cycle: usize) -> usize {
    if n % 2 == 1 && n >= 3 && cycle == 2 * n - 3 {
        (n - 1) / 2
    } else {
        cycle / 4
    }
}

/// Runs the layer sequence over `slots` (position -> logical) and keeps a
/// CPHASE only when `keep(u, v)` holds for its logical pair. Cycles are not
/// trimmed.
fn run_layers(
    n: usize,
    mut slots: Vec<Option<usize>>,
    keep: impl Fn(usize, usize) -> bool,
) -> Vec<Vec<Gate>> {
    let mut cycles = Vec::with_capacity(2 * n);
    for layer in layer_sequence(n) {
        let mut cycle = Vec::new();
        match layer {
            Layer::Execute(parity) => {
                for (a, b) in parity.pairs(n) {
                    if let (Some(u), Some(v)) = (slots[a], slots[b]) {
                        if keep(u, v) {
                            cycle.push(Gate::cphase(a, b, (u, v)));
                        }
                    }
                }
            }
            Layer::Swap(parity) => {
                for (a, b) in parity.pairs(n) {
                    slots.swap(a, b);
                    cycle.push(Gate::swap(a, b));
                }
            }
        }
        cycles.push(cycle);
    }
    cycles
}

/// All `n(n-1)/2` CPHASEs on `linear(n)` with the identity mapping.
pub fn generate_clique_pattern(n: usize) -> Result<ScheduledCircuit, PatternError> {
    if n < 2 {
        return Err(PatternError::TooSmall { n, min: 2 });
    }
    let mut circuit = ScheduledCircuit::new(format!("linear:{n}"), n, Mapping::identity(n));
    circuit.cycles = run_layers(n, (0..n).map(Some).collect(), |_, _| true);
    circuit.trim_trailing_swaps();
    Ok(circuit)
}

/// The clique pattern on `linear(n)` with CPHASEs outside `g` removed and
/// every cycle after the last remaining CPHASE dropped. `init` sends each
/// logical qubit of `g` to a chain position.
pub fn prune_pattern(
    g: &ProblemGraph,
    init: &Mapping,
    n: usize,
) -> Result<ScheduledCircuit, PatternError> {
    if init.len() != g.n() {
        return Err(PatternError::SizeMismatch {
            mapping: init.len(),
            graph: g.n(),
        });
    }
    init.validate(n)?;
    let mut circuit = ScheduledCircuit::new(format!("linear:{n}"), n, init.clone());
    if n >= 2 {
        circuit.cycles = run_layers(n, init.inverse(n), |u, v| g.has_edge(u, v));
    }
    circuit.trim_trailing_swaps();
    Ok(circuit)
}

/// [`prune_pattern`] laid along `line`, a chain of coupled physical qubits
/// in `arch`. Chain position `i` becomes physical qubit `line[i]`.
pub fn prune_pattern_on_line(
    g: &ProblemGraph,
    init: &Mapping,
    line: &[usize],
    arch: &Architecture,
) -> Result<ScheduledCircuit, PatternError> {
    let on_chain = prune_pattern(g, init, line.len())?;
    Ok(on_chain.relabel(arch.name(), arch.q(), line))
}

/// Where the qubit at `pos` sits after one outer-loop iteration.
///
/// Even positions travel toward 0 by two, odd positions toward `n - 1` by
/// two. At the ends the streams hand over: position 0 goes to 1, and the
/// last odd position of the downward stream turns into the upward one.
pub fn stream_step(n: usize, pos: usize) -> usize {
    debug_assert!(pos < n);
    if n < 2 {
        return pos;
    }
    if pos.is_multiple_of(2) {
        if pos == 0 {
            1
        } else {
            pos - 2
        }
    } else if pos + 2 < n {
        pos + 2
    } else if pos == n - 1 {
        n - 2
    } else {
        n - 1
    }
}

/// Position after `t` outer-loop iterations of the qubit starting at `start`.
pub fn position_at(n: usize, start: usize, t: usize) -> usize {
    (0..t).fold(start, |p, _| stream_step(n, p))
}

/// A qubit's place in the pattern after `t` outer-loop iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatternPosition {
    pub n: usize,
    pub t: usize,
    pub pos: usize,
    pub cyclic_rank: usize,
}

/// The position permutation of one outer-loop iteration together with the
/// cyclic ranking it induces.
///
/// Rank 0 is the qubit that starts on position 1; rank `k + 1` starts where
/// rank `k` lands after one iteration. After `t` iterations rank `k` sits
/// on the starting position of rank `k + t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicShift {
    /// `perm[p]` is the position reached from `p` in one iteration.
    pub perm: Vec<usize>,
    /// `order[k]` is the starting position of rank `k`.
    pub order: Vec<usize>,
    /// `rank[p]` is the rank of the qubit starting on `p`.
    pub rank: Vec<usize>,
}

impl CyclicShift {
    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn track(&self, start: usize, t: usize) -> PatternPosition {
        let n = self.n();
        let cyclic_rank = self.rank[start];
        PatternPosition {
            n,
            t,
            pos: self.order[(cyclic_rank + t) % n],
            cyclic_rank,
        }
    }
}

pub fn cyclic_rank_shift(n: usize) -> Result<CyclicShift, PatternError> {
    if n < 2 {
        return Err(PatternError::TooSmall { n, min: 2 });
    }
    let perm: Vec<usize> = (0..n).map(|p| stream_step(n, p)).collect();
    let mut order = vec![1];
    let mut p = perm[1];
    while p != 1 && order.len() <= n {
        order.push(p);
        p = perm[p];
    }
    if order.len() != n {
        return Err(PatternError::NotSingleCycle {
            n,
            len: order.len(),
        });
    }
    let mut rank = vec![0; n];
    for (k, &pos) in order.iter().enumerate() {
        rank[pos] = k;
    }
    Ok(CyclicShift { perm, order, rank })
}

/// Cycle at which each pair of chain positions meets in the clique pattern.
#[derive(Debug, Clone)]
pub struct MeetTable {
    n: usize,
    cycles: Vec<u32>,
}

impl MeetTable {
    fn build(n: usize) -> Self {
        let mut cycles = vec![u32::MAX; n * n];
        if let Ok(circuit) = generate_clique_pattern(n) {
            for (t, cycle) in circuit.cycles.iter().enumerate() {
                for gate in cycle {
                    if let Some((u, v)) = gate.logical {
                        cycles[u * n + v] = t as u32;
                        cycles[v * n + u] = t as u32;
                    }
                }
            }
        }
        Self { n, cycles }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 0-based cycle at which the qubits starting on `a` and `b` interact.
    pub fn get(&self, a: usize, b: usize) -> usize {
        debug_assert!(a != b, "a qubit does not meet itself");
        self.cycles[a * self.n + b] as usize
    }
}

/// Shared, lazily built meet table for chains of length `n`.
pub fn meet_table(n: usize) -> Arc<MeetTable> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<MeetTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(table) = cache.lock().expect("meet cache poisoned").get(&n) {
        return Arc::clone(table);
    }
    let table = Arc::new(MeetTable::build(n));
    cache
        .lock()
        .expect("meet cache poisoned")
        .entry(n)
        .or_insert(table)
        .clone()
}

pub fn meet_cycle(n: usize, a: usize, b: usize) -> usize {
    meet_table(n).get(a, b)
}

/// Boustrophedon walk of a two-row grid with `cols` columns: down the first
/// column, up the second, and so on. Returns row-major site ids.
pub fn two_row_snake(cols: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(2 * cols);
    for c in 0..cols {
        if c % 2 == 0 {
            order.extend([c, cols + c]);
        } else {
            order.extend([cols + c, c]);
        }
    }
    order
}

/// Clique pattern on a `2 x ceil(n/2)` grid.
///
/// Chain positions follow [`two_row_snake`], so even-odd pairs are the
/// columns. The even-odd SWAP layer only flips every column, which leaves
/// the column pairs of the next CPHASE layer unchanged; it is therefore never
/// executed and the chain-to-site assignment is flipped instead. For odd `n`
/// the last site of the snake stays empty and the lone last chain qubit
/// hops into it (during an even-odd CPHASE layer, where it is idle) whenever
/// a flip would break its adjacency.
pub fn generate_2xn_pattern(n: usize) -> Result<ScheduledCircuit, PatternError> {
    if n < 4 {
        return Err(PatternError::TooSmall { n, min: 4 });
    }
    let cols = n.div_ceil(2);
    let arch = Architecture::grid(2, cols);
    let snake = two_row_snake(cols);
    let mut site: Vec<usize> = snake[..n].to_vec();
    let mut spare = (n % 2 == 1).then(|| snake[n]);
    let mut slots: Vec<usize> = (0..n).collect();

    let mut circuit = ScheduledCircuit::new(
        arch.name(),
        arch.q(),
        Mapping::from_vec_unchecked(site.clone()),
    );
    for layer in layer_sequence(n) {
        match layer {
            Layer::Swap(Parity::EvenOdd) => {
                for (a, b) in Parity::EvenOdd.pairs(n) {
                    site.swap(a, b);
                    slots.swap(a, b);
                }
            }
            Layer::Swap(parity) => {
                let cycle = parity
                    .pairs(n)
                    .map(|(a, b)| {
                        slots.swap(a, b);
                        Gate::swap(site[a], site[b])
                    })
                    .collect();
                circuit.cycles.push(cycle);
            }
            Layer::Execute(parity) => {
                let mut cycle: Vec<Gate> = parity
                    .pairs(n)
                    .map(|(a, b)| Gate::cphase(site[a], site[b], (slots[a], slots[b])))
                    .collect();
                if let (Parity::EvenOdd, Some(free)) = (parity, spare) {
                    let (last, prev) = (site[n - 1], site[n - 2]);
                    if !arch.is_coupled(last, prev) && arch.is_coupled(free, prev) {
                        cycle.push(Gate::swap(last, free));
                        site[n - 1] = free;
                        spare = Some(last);
                    }
                }
                circuit.cycles.push(cycle);
            }
        }
    }
    circuit.trim_trailing_swaps();
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_qubits_single_cycle() {
        let c = generate_clique_pattern(2).unwrap();
        assert_eq!(c.depth(), 1);
        assert_eq!(c.cycles[0], vec![Gate::cphase(0, 1, (0, 1))]);
    }

    #[test]
    fn six_qubits_depth_ten() {
        let c = generate_clique_pattern(6).unwrap();
        assert_eq!(c.depth(), 10);
        assert_eq!(c.cphase_count(), 15);
    }

    #[test]
    fn too_small() {
        assert_eq!(
            generate_clique_pattern(1).unwrap_err(),
            PatternError::TooSmall { n: 1, min: 2 }
        );
        assert!(generate_2xn_pattern(3).is_err());
    }

    #[test]
    fn odd_sequence_ends_with_execution() {
        let layers = layer_sequence(7);
        assert_eq!(layers.len(), 12);
        assert_eq!(layers[11], Layer::Execute(Parity::EvenOdd));
        assert_eq!(layers[10], Layer::Swap(Parity::OddEven));
    }

    #[test]
    fn stream_examples() {
        assert_eq!(position_at(8, 2, 1), 0);
        assert_eq!(position_at(8, 0, 1), 1);
        for p in 0..9 {
            assert_eq!(position_at(9, p, 0), p);
        }
        // chain ends
        assert_eq!(stream_step(8, 7), 6);
        assert_eq!(stream_step(8, 5), 7);
        assert_eq!(stream_step(7, 5), 6);
        assert_eq!(stream_step(7, 6), 4);
    }

    #[test]
    fn meet_examples() {
        assert_eq!(meet_cycle(6, 0, 1), 0);
        assert_eq!(meet_cycle(6, 1, 3), 8);
        assert_eq!(meet_cycle(6, 3, 1), 8);
    }

    #[test]
    fn cyclic_shift_small() {
        let two = cyclic_rank_shift(2).unwrap();
        assert_eq!(two.perm, vec![1, 0]);
        let eight = cyclic_rank_shift(8).unwrap();
        assert_eq!(eight.order.len(), 8);
        assert_eq!(eight.perm, vec![1, 3, 0, 5, 2, 7, 4, 6]);
        assert!(cyclic_rank_shift(5).is_ok());
    }

    #[test]
    fn prune_clique_is_identity() {
        let n = 7;
        let pruned = prune_pattern(&ProblemGraph::clique(n), &Mapping::identity(n), n).unwrap();
        assert_eq!(pruned, generate_clique_pattern(n).unwrap());
    }

    #[test]
    fn prune_empty_graph() {
        let c = prune_pattern(&ProblemGraph::empty(5), &Mapping::identity(5), 5).unwrap();
        assert_eq!(c.depth(), 0);
    }

    #[test]
    fn snake_order() {
        assert_eq!(two_row_snake(3), vec![0, 3, 4, 1, 2, 5]);
    }

    #[test]
    fn two_row_depths() {
        assert_eq!(generate_2xn_pattern(6).unwrap().depth(), 8);
        assert_eq!(generate_2xn_pattern(4).unwrap().depth(), 5);
        assert_eq!(generate_2xn_pattern(7).unwrap().depth(), 10);
    }
}
