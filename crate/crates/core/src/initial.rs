//! Initial placement of logical qubits on the chain positions of the
//! pattern.
//!
//! A placement is judged by the cycle at which the pruned pattern executes
//! its last input edge. Three strategies are provided: a best-first search
//! over partial placements, an exact scan over pattern graphs by subgraph
//! matching, and a seeded random permutation as the baseline.

mod vf2;

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use crate::graph::ProblemGraph;
use crate::mapping::Mapping;
use crate::pattern::{layer_sequence, meet_table};
use crate::rng::SeededRng;

/// Number of pattern cycles needed to execute every edge of `g` when
/// logical `v` starts on chain position `pi[v]` of a chain of length
/// `g.n()`. Zero for an edgeless graph.
pub fn predicted_depth(g: &ProblemGraph, pi: &[usize]) -> usize {
    let table = meet_table(g.n());
    g.edges()
        .iter()
        .map(|e| table.get(pi[e.0], pi[e.1]) + 1)
        .max()
        .unwrap_or(0)
}

/// Search state: a placement of the first `depth` vertices of the search
/// order. `cost` is the pattern depth forced by the edges already placed;
/// children inherit their parent's cost as a floor, so it never decreases
/// along a root-to-leaf path.
#[derive(Debug, Clone, Copy)]
pub struct MappingSearchNode {
    pub parent: usize,
    pub depth: usize,
    pub position: usize,
    pub cost: usize,
}

/// Best-first search over placements in descending-degree vertex order.
///
/// Placing vertex `v` on position `p` costs the latest meeting cycle of `p`
/// with the positions of `v`'s placed neighbors (plus one, to count cycles),
/// floored by the parent's cost. Nodes are expanded cheapest first, deeper
/// first on ties. `beam` caps the number of expansions at each depth:
/// `usize::MAX` is an exact search, `1` is greedy. Equal-cost positions are
/// tried in ascending order unless `tie_seed` asks for a shuffled order.
///
/// Returns the placement and its [`predicted_depth`].
pub fn astar_initial_mapping(
    g: &ProblemGraph,
    beam: usize,
    tie_seed: Option<u64>,
) -> (Mapping, usize) {
    let n = g.n();
    if n < 2 {
        return (Mapping::identity(n), 0);
    }
    let table = meet_table(n);
    let mut vertices: Vec<usize> = (0..n).collect();
    vertices.sort_by_key(|&v| (Reverse(g.degree(v)), v));
    let mut step_of = vec![0; n];
    for (i, &v) in vertices.iter().enumerate() {
        step_of[v] = i;
    }
    let mut positions: Vec<usize> = (0..n).collect();
    if let Some(seed) = tie_seed {
        SeededRng::new(seed).shuffle(&mut positions);
    }

    let beam = beam.max(1);
    let mut nodes = vec![MappingSearchNode {
        parent: usize::MAX,
        depth: 0,
        position: usize::MAX,
        cost: 0,
    }];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0usize, Reverse(0usize), 0usize)));
    let mut expanded = vec![0usize; n + 1];
    let mut placed = vec![usize::MAX; n];
    let mut taken = vec![false; n];

    while let Some(Reverse((cost, Reverse(depth), id))) = heap.pop() {
        if depth == n {
            let mut pi = vec![0; n];
            let mut cur = id;
            while cur != 0 {
                let node = nodes[cur];
                pi[vertices[node.depth - 1]] = node.position;
                cur = node.parent;
            }
            debug_assert_eq!(predicted_depth(g, &pi), cost);
            return (Mapping::from_vec_unchecked(pi), cost);
        }
        if expanded[depth] >= beam {
            continue;
        }
        expanded[depth] += 1;

        placed.fill(usize::MAX);
        taken.fill(false);
        let mut cur = id;
        while cur != 0 {
            let node = nodes[cur];
            placed[vertices[node.depth - 1]] = node.position;
            taken[node.position] = true;
            cur = node.parent;
        }
        let v = vertices[depth];
        let placed_neighbors: Vec<usize> = g
            .neighbors(v)
            .iter()
            .filter(|&&u| step_of[u] < depth)
            .map(|&u| placed[u])
            .collect();
        for &p in &positions {
            if taken[p] {
                continue;
            }
            let own = placed_neighbors
                .iter()
                .map(|&q| table.get(p, q) + 1)
                .max()
                .unwrap_or(0);
            let child_cost = own.max(cost);
            let child = nodes.len();
            nodes.push(MappingSearchNode {
                parent: id,
                depth: depth + 1,
                position: p,
                cost: child_cost,
            });
            heap.push(Reverse((child_cost, Reverse(depth + 1), child)));
        }
    }
    unreachable!("every expanded node has a child until depth n")
}

/// Chain-position pairs whose pattern CPHASE fires before cycle `horizon`.
/// Vertices are positions `0..n`. Horizons past the pattern's end give the
/// full clique.
pub fn pattern_graph(n: usize, horizon: usize) -> ProblemGraph {
    let table = meet_table(n);
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if table.get(a, b) < horizon {
                pairs.push((a, b));
            }
        }
    }
    ProblemGraph::new(n, &pairs).expect("position pairs are distinct")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoOutcome {
    /// Placement whose pruned pattern finishes in exactly `horizon` cycles,
    /// the least possible.
    Found {
        mapping: Mapping,
        horizon: usize,
    },
    /// No horizon admits the graph (only possible for malformed inputs).
    NotFound,
    TimedOut,
}

/// Smallest horizon `i` such that `g` embeds into [`pattern_graph`]`(n, i)`.
///
/// Horizons are scanned upward from the maximum degree (each qubit takes
/// part in at most one CPHASE per cycle). Horizons that end on a SWAP
/// cycle are skipped, as are pattern graphs with fewer edges than `g`.
pub fn iso_initial_mapping(g: &ProblemGraph, timeout: Duration) -> IsoOutcome {
    let n = g.n();
    if g.m() == 0 {
        return IsoOutcome::Found {
            mapping: Mapping::identity(n),
            horizon: 0,
        };
    }
    let deadline = Instant::now() + timeout;
    let layers = layer_sequence(n);
    let table = meet_table(n);
    let mut fire_count = vec![0usize; layers.len() + 1];
    for a in 0..n {
        for b in a + 1..n {
            fire_count[table.get(a, b) + 1] += 1;
        }
    }
    let mut edges_before = 0;
    for horizon in 1..=layers.len() {
        edges_before += fire_count[horizon];
        if horizon < g.max_degree() || !layers[horizon - 1].is_execute() || edges_before < g.m() {
            continue;
        }
        let target = pattern_graph(n, horizon);
        match vf2::Matcher::new(g, &target, Some(deadline)).run() {
            vf2::Outcome::Found(pi) => {
                return IsoOutcome::Found {
                    mapping: Mapping::from_vec_unchecked(pi),
                    horizon,
                }
            }
            vf2::Outcome::NotFound => {}
            vf2::Outcome::TimedOut => return IsoOutcome::TimedOut,
        }
    }
    IsoOutcome::NotFound
}

/// True if `pattern` maps injectively into `target` with every edge landing
/// on an edge. Exposed for tests and diagnostics.
pub fn is_subgraph_monomorphic(
    pattern: &ProblemGraph,
    target: &ProblemGraph,
) -> Option<Vec<usize>> {
    match vf2::Matcher::new(pattern, target, None).run() {
        vf2::Outcome::Found(map) => Some(map),
        _ => None,
    }
}

/// Uniform random permutation of `0..n`.
pub fn random_initial_mapping(n: usize, seed: u64) -> Mapping {
    let mut pi: Vec<usize> = (0..n).collect();
    SeededRng::new(seed).shuffle(&mut pi);
    Mapping::from_vec_unchecked(pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    #[test]
    fn clique_depth_is_full_pattern() {
        for n in 3..8 {
            let (_, d) = astar_initial_mapping(&ProblemGraph::clique(n), 8, None);
            assert_eq!(d, 2 * n - 2);
        }
        // The two-qubit pattern is a single CPHASE cycle.
        assert_eq!(
            astar_initial_mapping(&ProblemGraph::clique(2), 8, None).1,
            1
        );
    }

    #[test]
    fn path_fits_first_two_layers() {
        let g = ProblemGraph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let (m, d) = astar_initial_mapping(&g, usize::MAX, None);
        assert_eq!(d, 2);
        assert_eq!(predicted_depth(&g, m.as_slice()), 2);
    }

    #[test]
    fn pattern_graph_ends() {
        let first = pattern_graph(6, 1);
        assert_eq!(first.edges(), &[Edge(0, 1), Edge(2, 3), Edge(4, 5)]);
        assert_eq!(pattern_graph(6, 10), ProblemGraph::clique(6));
    }

    #[test]
    fn iso_on_matching_and_clique() {
        let matching = ProblemGraph::new(6, &[(0, 1), (2, 3), (4, 5)]).unwrap();
        match iso_initial_mapping(&matching, Duration::from_secs(5)) {
            IsoOutcome::Found { horizon, .. } => assert_eq!(horizon, 1),
            other => panic!("{other:?}"),
        }
        match iso_initial_mapping(&ProblemGraph::clique(5), Duration::from_secs(5)) {
            IsoOutcome::Found { horizon, .. } => assert_eq!(horizon, 8),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn random_is_permutation() {
        assert_eq!(random_initial_mapping(1, 9), Mapping::identity(1));
        let m = random_initial_mapping(50, 4);
        m.validate(50).unwrap();
        assert_eq!(m, random_initial_mapping(50, 4));
    }
}
