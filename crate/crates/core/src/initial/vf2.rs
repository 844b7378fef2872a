//! Subgraph monomorphism search in the VF2 family.
//!
//! Finds an injective vertex map from a pattern graph into a target graph
//! that sends every pattern edge onto a target edge. Extra target edges are
//! allowed, unlike induced matching.

use std::time::Instant;

use crate::graph::ProblemGraph;

pub enum Outcome {
    Found(Vec<usize>),
    NotFound,
    TimedOut,
}

pub struct Matcher<'a> {
    pattern: &'a ProblemGraph,
    target: &'a ProblemGraph,
    target_adj: Vec<bool>,
    order: Vec<usize>,
    /// For each position in `order`, an earlier-ordered neighbor, if any.
    anchor: Vec<Option<usize>>,
    map: Vec<usize>,
    used: Vec<bool>,
    deadline: Option<Instant>,
    steps: u64,
}

const UNMAPPED: usize = usize::MAX;

impl<'a> Matcher<'a> {
    pub fn new(
        pattern: &'a ProblemGraph,
        target: &'a ProblemGraph,
        deadline: Option<Instant>,
    ) -> Self {
        let t = target.n();
        let mut target_adj = vec![false; t * t];
        for e in target.edges() {
            target_adj[e.0 * t + e.1] = true;
            target_adj[e.1 * t + e.0] = true;
        }
        let order = match_order(pattern);
        let mut rank = vec![0; pattern.n()];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        let anchor = order
            .iter()
            .enumerate()
            .map(|(i, &v)| pattern.neighbors(v).iter().copied().find(|&u| rank[u] < i))
            .collect();
        Self {
            pattern,
            target,
            target_adj,
            order,
            anchor,
            map: vec![UNMAPPED; pattern.n()],
            used: vec![false; t],
            deadline,
            steps: 0,
        }
    }

    pub fn run(mut self) -> Outcome {
        if self.pattern.n() > self.target.n() || self.pattern.m() > self.target.m() {
            return Outcome::NotFound;
        }
        match self.extend(0) {
            Some(true) => Outcome::Found(self.map),
            Some(false) => Outcome::NotFound,
            None => Outcome::TimedOut,
        }
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.target_adj[a * self.target.n() + b]
    }

    /// `None` on timeout.
    fn extend(&mut self, depth: usize) -> Option<bool> {
        if depth == self.order.len() {
            return Some(true);
        }
        self.steps += 1;
        if self.steps.is_multiple_of(1024) {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    return None;
                }
            }
        }
        let v = self.order[depth];
        let candidates: Vec<usize> = match self.anchor[depth] {
            Some(u) => self.target.neighbors(self.map[u]).to_vec(),
            None => (0..self.target.n()).collect(),
        };
        for c in candidates {
            if self.used[c] || !self.feasible(v, c) {
                continue;
            }
            self.map[v] = c;
            self.used[c] = true;
            match self.extend(depth + 1) {
                Some(false) => {}
                done => return done,
            }
            self.used[c] = false;
            self.map[v] = UNMAPPED;
        }
        Some(false)
    }

    fn feasible(&self, v: usize, c: usize) -> bool {
        if self.target.degree(c) < self.pattern.degree(v) {
            return false;
        }
        let mut pending = 0;
        for &u in self.pattern.neighbors(v) {
            match self.map[u] {
                UNMAPPED => pending += 1,
                mu => {
                    if !self.adjacent(c, mu) {
                        return false;
                    }
                }
            }
        }
        let free = self
            .target
            .neighbors(c)
            .iter()
            .filter(|&&w| !self.used[w])
            .count();
        pending <= free
    }
}

/// Matching order: start from the highest-degree vertex of each component,
/// then repeatedly take the vertex with the most already-ordered neighbors
/// (higher degree, then lower id, on ties).
fn match_order(g: &ProblemGraph) -> Vec<usize> {
    let n = g.n();
    let mut placed = vec![false; n];
    let mut links = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (links[v], g.degree(v), std::cmp::Reverse(v)))
            .expect("an unplaced vertex remains");
        placed[next] = true;
        order.push(next);
        for &u in g.neighbors(next) {
            links[u] += 1;
        }
    }
    order
}
