//! Property tests for the clique pattern, its pruned form, the two-stream
//! position model and the two-row grid variant.

use std::collections::HashMap;

use ctag_core::initial::pattern_graph;
use ctag_core::pattern::{
    cyclic_rank_shift, generate_2xn_pattern, generate_clique_pattern, meet_cycle, position_at,
    prune_pattern, stream_step,
};
use ctag_core::{verify, Architecture, Edge, GateKind, Mapping, ProblemGraph};
use proptest::prelude::*;

/// Meeting cycles found by an independent token simulation: even cycles of
/// each four-cycle loop pair up (2k, 2k+1) then (2k+1, 2k+2) and the last
/// two swap with the opposite parity. Odd chains close on an extra
/// even-odd CPHASE layer.
fn simulated_meetings(n: usize) -> HashMap<(usize, usize), usize> {
    let mut slots: Vec<usize> = (0..n).collect();
    let mut met = HashMap::new();
    let len = 2 * n - 2;
    let fire = |slots: &[usize], first: usize, met: &mut HashMap<(usize, usize), usize>, c| {
        let mut a = first;
        while a + 1 < n {
            let key = (slots[a].min(slots[a + 1]), slots[a].max(slots[a + 1]));
            met.entry(key).or_insert(c);
            a += 2;
        }
    };
    for c in 0..len {
        let last_odd = n % 2 == 1 && c == len - 1;
        match (c % 4, last_odd) {
            (_, true) | (0, _) => fire(&slots, 0, &mut met, c),
            (1, _) => fire(&slots, 1, &mut met, c),
            (2, _) => {
                let mut a = 1;
                while a + 1 < n {
                    slots.swap(a, a + 1);
                    a += 2;
                }
            }
            _ => {
                let mut a = 0;
                while a + 1 < n {
                    slots.swap(a, a + 1);
                    a += 2;
                }
            }
        }
    }
    met
}

#[test]
fn meet_table_matches_token_simulation() {
    for n in 2..=24 {
        let met = simulated_meetings(n);
        assert_eq!(met.len(), n * (n - 1) / 2, "n={n}");
        for (&(a, b), &c) in &met {
            assert_eq!(meet_cycle(n, a, b), c, "n={n} pair ({a},{b})");
            assert!(c < 2 * n - 2);
        }
    }
}

#[test]
fn pattern_graph_harvests_first_cycles() {
    let n = 8;
    let circuit = generate_clique_pattern(n).unwrap();
    let mut pairs: Vec<(usize, usize)> = circuit.cycles[..4]
        .iter()
        .flatten()
        .filter_map(|g| g.logical)
        .collect();
    pairs.sort();
    let harvested = ProblemGraph::new(n, &pairs).unwrap();
    assert_eq!(pattern_graph(n, 4), harvested);
    assert_eq!(pattern_graph(n, 4).m(), 7);
}

#[test]
fn two_row_pattern_verifies_for_even_n() {
    for n in (4..=32).step_by(2) {
        let c = generate_2xn_pattern(n).unwrap();
        let arch = Architecture::grid(2, n / 2);
        assert!(verify(&c, &ProblemGraph::clique(n), &arch).ok, "n={n}");
        assert_eq!(c.depth(), 3 * n / 2 - 1);
    }
}

#[test]
fn two_row_examples() {
    assert_eq!(generate_2xn_pattern(6).unwrap().depth(), 8);
    assert_eq!(generate_2xn_pattern(4).unwrap().depth(), 5);
    assert_eq!(generate_2xn_pattern(7).unwrap().depth(), 10);
    assert!(generate_2xn_pattern(3).is_err());
}

fn graph_and_mapping() -> impl Strategy<Value = (ProblemGraph, Vec<usize>)> {
    (2usize..24, 0.05f64..1.0, any::<u64>(), any::<u64>()).prop_filter_map(
        "degenerate density",
        |(n, density, seed, shuffle)| {
            let g = ProblemGraph::random(n, density, seed).ok()?;
            let pi = ctag_core::initial::random_initial_mapping(n, shuffle);
            Some((g, pi.as_slice().to_vec()))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clique_pattern_covers_every_pair_once(n in 2usize..48) {
        let c = generate_clique_pattern(n).unwrap();
        let report = verify(&c, &ProblemGraph::clique(n), &Architecture::linear(n));
        prop_assert!(report.ok);
        prop_assert!(c.depth() <= (2 * n - 2).max(1));
    }

    #[test]
    fn pruned_pattern_is_valid_and_bounded((g, pi) in graph_and_mapping()) {
        let n = g.n();
        let c = prune_pattern(&g, &Mapping::new(pi, n).unwrap(), n).unwrap();
        prop_assert!(verify(&c, &g, &Architecture::linear(n)).ok);
        let lower = g.m().div_ceil(n / 2) as f64;
        prop_assert!(c.depth() as f64 <= 2.0 / g.density() * lower);
        prop_assert!(c.depth() <= generate_clique_pattern(n).unwrap().depth());
    }

    #[test]
    fn pruned_pattern_keeps_only_graph_edges((g, pi) in graph_and_mapping()) {
        let n = g.n();
        let c = prune_pattern(&g, &Mapping::new(pi, n).unwrap(), n).unwrap();
        let cphases: Vec<Edge> = c
            .gates()
            .filter(|g| g.kind == GateKind::Cphase)
            .map(|g| { let (u, v) = g.logical.unwrap(); Edge::new(u, v) })
            .collect();
        prop_assert_eq!(cphases.len(), g.m());
        prop_assert!(cphases.iter().all(|e| g.has_edge(e.0, e.1)));
    }

    #[test]
    fn stream_step_is_a_single_cycle(n in 2usize..200) {
        let shift = cyclic_rank_shift(n).unwrap();
        let mut seen = vec![false; n];
        for p in 0..n {
            let q = stream_step(n, p);
            prop_assert!(!seen[q]);
            seen[q] = true;
        }
        prop_assert_eq!(shift.order.len(), n);
        // A full revolution returns every qubit home.
        for p in 0..n {
            prop_assert_eq!(position_at(n, p, n), p);
        }
    }

    #[test]
    fn rank_tracking_matches_position(n in 2usize..64, start in 0usize..64, t in 0usize..128) {
        let start = start % n;
        let shift = cyclic_rank_shift(n).unwrap();
        let tracked = shift.track(start, t);
        prop_assert_eq!(tracked.pos, position_at(n, start, t));
        prop_assert_eq!(tracked.cyclic_rank, shift.rank[start]);
    }
}
