//! Independent schedule checker, depth metrics and a brute-force optimum
//! for tiny instances.
//!
//! The verifier trusts nothing in the circuit except the initial mapping and
//! the gate list: it replays every cycle on a physical-to-logical table and
//! derives each CPHASE's logical pair from that table.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arch::Architecture;
use crate::circuit::{GateKind, ScheduledCircuit};
use crate::graph::ProblemGraph;
use crate::mapping::Mapping;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Violation {
    /// A gate id is not a physical qubit of the architecture.
    OutOfRange,
    /// Both operands are the same qubit.
    SameQubit,
    /// The operands are not coupled.
    NotCoupled,
    /// The gate shares a qubit with an earlier gate of the same cycle.
    QubitConflict,
    /// A CPHASE touches a physical qubit that holds no logical qubit.
    EmptyQubit,
    /// The recorded logical pair differs from the replayed one.
    ProvenanceMismatch {
        recorded: (usize, usize),
        actual: (usize, usize),
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IllegalGate {
    pub cycle: usize,
    pub gate: String,
    pub violation: Violation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub ok: bool,
    /// Every CPHASE's logical pair in execution order, smaller id first.
    pub executed_pairs: Vec<(usize, usize)>,
    /// Graph edges never executed.
    pub missing: Vec<(usize, usize)>,
    /// Pairs executed more often than the graph asks for: graph edges run
    /// twice or more, and any executed pair that is not a graph edge.
    pub duplicated: Vec<(usize, usize)>,
    pub illegal_gates: Vec<IllegalGate>,
    /// Problem with the initial mapping itself; replay is skipped when set.
    pub init_error: Option<String>,
    pub final_mapping: Option<Mapping>,
}

pub fn verify(c: &ScheduledCircuit, g: &ProblemGraph, arch: &Architecture) -> VerificationReport {
    let mut report = VerificationReport {
        ok: false,
        executed_pairs: Vec::new(),
        missing: Vec::new(),
        duplicated: Vec::new(),
        illegal_gates: Vec::new(),
        init_error: None,
        final_mapping: None,
    };
    if c.init.len() != g.n() {
        report.init_error = Some(format!(
            "initial mapping has {} entries, graph has {} vertices",
            c.init.len(),
            g.n()
        ));
        report.missing = g.edges().iter().map(|e| (e.0, e.1)).collect();
        return report;
    }
    if let Err(e) = c.init.validate(arch.q()) {
        report.init_error = Some(e.to_string());
        report.missing = g.edges().iter().map(|e| (e.0, e.1)).collect();
        return report;
    }

    let q = arch.q();
    let mut holder = c.init.inverse(q);
    let mut busy = vec![usize::MAX; q];
    for (t, cycle) in c.cycles.iter().enumerate() {
        for gate in cycle {
            let mut flag = |violation| {
                report.illegal_gates.push(IllegalGate {
                    cycle: t,
                    gate: gate.to_string(),
                    violation,
                })
            };
            let (a, b) = (gate.a, gate.b);
            if a >= q || b >= q {
                flag(Violation::OutOfRange);
                continue;
            }
            if a == b {
                flag(Violation::SameQubit);
                continue;
            }
            if !arch.is_coupled(a, b) {
                flag(Violation::NotCoupled);
            }
            if busy[a] == t || busy[b] == t {
                flag(Violation::QubitConflict);
            }
            busy[a] = t;
            busy[b] = t;
            match gate.kind {
                GateKind::Swap => holder.swap(a, b),
                GateKind::Cphase => match (holder[a], holder[b]) {
                    (Some(u), Some(v)) => {
                        let actual = (u.min(v), u.max(v));
                        if let Some(recorded) = gate.logical {
                            if recorded != actual {
                                flag(Violation::ProvenanceMismatch { recorded, actual });
                            }
                        }
                        report.executed_pairs.push(actual);
                    }
                    _ => flag(Violation::EmptyQubit),
                },
            }
        }
    }

    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &pair in &report.executed_pairs {
        *counts.entry(pair).or_default() += 1;
    }
    for e in g.edges() {
        if !counts.contains_key(&(e.0, e.1)) {
            report.missing.push((e.0, e.1));
        }
    }
    for (&(u, v), &count) in &counts {
        let wanted = usize::from(g.has_edge(u, v));
        if count > wanted {
            report.duplicated.push((u, v));
        }
    }

    let mut pi = vec![0; g.n()];
    for (p, slot) in holder.iter().enumerate() {
        if let Some(l) = *slot {
            pi[l] = p;
        }
    }
    report.final_mapping = Some(Mapping::from_vec_unchecked(pi));
    report.ok = report.missing.is_empty()
        && report.duplicated.is_empty()
        && report.illegal_gates.is_empty();
    report
}

/// Depth and gate counts, abstract and after decomposing each CPHASE and
/// SWAP into three cycles and adding the opening Hadamard and closing mixer
/// layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub abstract_depth: usize,
    pub decomposed_depth: usize,
    pub cphase_count: usize,
    pub swap_count: usize,
    pub decomposed_gate_count: usize,
}

pub fn metrics(c: &ScheduledCircuit, n: usize) -> Metrics {
    let abstract_depth = c.depth();
    let cphase_count = c.cphase_count();
    let swap_count = c.swap_count();
    Metrics {
        abstract_depth,
        decomposed_depth: 3 * abstract_depth + 2,
        cphase_count,
        swap_count,
        decomposed_gate_count: 3 * cphase_count + 3 * swap_count + 2 * n,
    }
}

/// Published results of an external initial-placement router on clique
/// instances mapped to the smallest square lattice that holds them. They
/// are fixed reference data for speedup reporting, not reproduced here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaselineReference {
    pub n: usize,
    pub decomposed_depth: usize,
    pub compile_time_s: f64,
}

pub const BASELINE_REFERENCE: [BaselineReference; 5] = [
    BaselineReference {
        n: 10,
        decomposed_depth: 79,
        compile_time_s: 0.6,
    },
    BaselineReference {
        n: 30,
        decomposed_depth: 530,
        compile_time_s: 6.6,
    },
    BaselineReference {
        n: 50,
        decomposed_depth: 1408,
        compile_time_s: 27.3,
    },
    BaselineReference {
        n: 100,
        decomposed_depth: 5053,
        compile_time_s: 265.4,
    },
    BaselineReference {
        n: 200,
        decomposed_depth: 21189,
        compile_time_s: 3671.1,
    },
];

/// Reference depth divided by `decomposed_depth`, when a reference exists
/// for `n`.
pub fn baseline_speedup(n: usize, decomposed_depth: usize) -> Option<f64> {
    let reference = BASELINE_REFERENCE.iter().find(|r| r.n == n)?;
    (decomposed_depth > 0).then(|| reference.decomposed_depth as f64 / decomposed_depth as f64)
}

pub const BRUTE_FORCE_MAX_QUBITS: usize = 5;
pub const BRUTE_FORCE_MAX_DEPTH: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum BruteForceError {
    #[error("exhaustive search supports at most {max} physical qubits, got {q}")]
    TooManyQubits { q: usize, max: usize },
    #[error("depth cap {cap} exceeds the supported maximum {max}")]
    CapTooLarge { cap: usize, max: usize },
    #[error("graph has {n} vertices but the architecture only {q} qubits")]
    GraphTooLarge { n: usize, q: usize },
}

const EMPTY: u8 = u8::MAX;

/// Minimum abstract depth over all initial mappings and all schedules in
/// which every cycle is a set of qubit-disjoint CPHASEs (on remaining
/// adjacent edges) and SWAPs. `Ok(None)` means no schedule fits in
/// `depth_cap` cycles.
pub fn brute_force_optimal(
    g: &ProblemGraph,
    arch: &Architecture,
    depth_cap: usize,
) -> Result<Option<usize>, BruteForceError> {
    let q = arch.q();
    if q > BRUTE_FORCE_MAX_QUBITS {
        return Err(BruteForceError::TooManyQubits {
            q,
            max: BRUTE_FORCE_MAX_QUBITS,
        });
    }
    if depth_cap > BRUTE_FORCE_MAX_DEPTH {
        return Err(BruteForceError::CapTooLarge {
            cap: depth_cap,
            max: BRUTE_FORCE_MAX_DEPTH,
        });
    }
    if g.n() > q {
        return Err(BruteForceError::GraphTooLarge { n: g.n(), q });
    }
    let search = BruteForce::new(g, arch);
    // At most 10 edges fit on 5 qubits, so one bit per edge fits a u16.
    let full = ((1u32 << g.m()) - 1) as u16;
    if full == 0 {
        return Ok(Some(0));
    }
    let inits = injections(g.n(), q);
    let mut memo = HashMap::new();
    for limit in 1..=depth_cap {
        for init in &inits {
            let mut holder = [EMPTY; BRUTE_FORCE_MAX_QUBITS];
            for (l, &p) in init.iter().enumerate() {
                holder[p] = l as u8;
            }
            if search.solve(holder, full, limit, &mut memo) {
                return Ok(Some(limit));
            }
        }
    }
    Ok(None)
}

struct BruteForce {
    n: usize,
    couplings: Vec<(usize, usize)>,
    /// `edge_id[u * n + v]`, or `u8::MAX` when `(u, v)` is not an edge.
    edge_id: Vec<u8>,
    edge_ends: Vec<(usize, usize)>,
}

#[derive(Clone, Copy)]
enum Move {
    Cphase(usize, usize, u8),
    Swap(usize, usize),
}

impl BruteForce {
    fn new(g: &ProblemGraph, arch: &Architecture) -> Self {
        let n = g.n();
        let mut edge_id = vec![u8::MAX; n * n];
        for (i, e) in g.edges().iter().enumerate() {
            edge_id[e.0 * n + e.1] = i as u8;
            edge_id[e.1 * n + e.0] = i as u8;
        }
        Self {
            n,
            couplings: arch.couplings().iter().map(|e| (e.0, e.1)).collect(),
            edge_id,
            edge_ends: g.edges().iter().map(|e| (e.0, e.1)).collect(),
        }
    }

    fn lower_bound(&self, remaining: u16) -> usize {
        let mut degree = [0usize; 16];
        let mut count = 0usize;
        for (i, &(u, v)) in self.edge_ends.iter().enumerate() {
            if remaining & (1 << i) != 0 {
                degree[u] += 1;
                degree[v] += 1;
                count += 1;
            }
        }
        let per_cycle = (self.n / 2).max(1);
        let max_deg = degree.iter().copied().max().unwrap_or(0);
        max_deg.max(count.div_ceil(per_cycle))
    }

    /// True if `remaining` can be cleared within `budget` cycles. `memo`
    /// records, per state, the largest budget known to be insufficient.
    fn solve(
        &self,
        holder: [u8; BRUTE_FORCE_MAX_QUBITS],
        remaining: u16,
        budget: usize,
        memo: &mut HashMap<([u8; BRUTE_FORCE_MAX_QUBITS], u16), usize>,
    ) -> bool {
        if remaining == 0 {
            return true;
        }
        if budget == 0 || self.lower_bound(remaining) > budget {
            return false;
        }
        if memo
            .get(&(holder, remaining))
            .is_some_and(|&failed| failed >= budget)
        {
            return false;
        }
        let mut moves = Vec::new();
        for &(a, b) in &self.couplings {
            let (la, lb) = (holder[a], holder[b]);
            if la == EMPTY && lb == EMPTY {
                continue;
            }
            moves.push(Move::Swap(a, b));
            if la != EMPTY && lb != EMPTY {
                let id = self.edge_id[la as usize * self.n + lb as usize];
                if id != u8::MAX && remaining & (1 << id) != 0 {
                    moves.push(Move::Cphase(a, b, id));
                }
            }
        }
        let mut found = false;
        self.each_layer(
            &moves,
            0,
            0,
            &mut Vec::new(),
            &mut |layer| {
                let mut next = holder;
                let mut rest = remaining;
                for m in layer {
                    match *m {
                        Move::Swap(a, b) => next.swap(a, b),
                        Move::Cphase(_, _, id) => rest &= !(1 << id),
                    }
                }
                self.solve(next, rest, budget - 1, memo)
            },
            &mut found,
        );
        if !found {
            let entry = memo.entry((holder, remaining)).or_insert(0);
            *entry = (*entry).max(budget);
        }
        found
    }

    /// Calls `visit` on every non-empty qubit-disjoint subset of `moves`
    /// until it returns true.
    fn each_layer(
        &self,
        moves: &[Move],
        start: usize,
        used: u32,
        layer: &mut Vec<Move>,
        visit: &mut dyn FnMut(&[Move]) -> bool,
        found: &mut bool,
    ) {
        for i in start..moves.len() {
            if *found {
                return;
            }
            let (a, b) = match moves[i] {
                Move::Swap(a, b) | Move::Cphase(a, b, _) => (a, b),
            };
            let mask = (1u32 << a) | (1u32 << b);
            if used & mask != 0 {
                continue;
            }
            layer.push(moves[i]);
            if visit(layer) {
                *found = true;
            } else {
                self.each_layer(moves, i + 1, used | mask, layer, visit, found);
            }
            layer.pop();
        }
    }
}

/// Every injective assignment of `n` logical qubits to `q` sites.
fn injections(n: usize, q: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for p in 0..q {
            if !cur.contains(&p) {
                cur.push(p);
                extend(n, q, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(n, q, &mut Vec::new(), &mut out);
    out
}
