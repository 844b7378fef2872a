//! Benchmark grid runner and CSV output.
//!
//! Each cell generates a seeded random graph, schedules it and verifies the
//! result. Only the scheduling call is timed. Cells run on a rayon pool and
//! rows come back sorted by `(n, density, seed, strategy)`.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arch::{ArchError, Architecture};
use crate::graph::ProblemGraph;
use crate::scheduler::{schedule, SchedulerConfig, Strategy};
use crate::verify::{metrics, verify};

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 11] = [
    "n",
    "density",
    "seed",
    "architecture",
    "strategy",
    "abstract_depth",
    "decomposed_depth",
    "cphase_count",
    "swap_count",
    "compile_time_ms",
    "verified",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub density: f64,
    pub seed: u64,
    pub architecture: String,
    pub strategy: String,
    pub abstract_depth: usize,
    pub decomposed_depth: usize,
    pub cphase_count: usize,
    pub swap_count: usize,
    pub compile_time_ms: f64,
    pub verified: bool,
}

#[derive(Debug, Clone)]
pub struct BenchGrid {
    pub ns: Vec<usize>,
    pub densities: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Architecture specs. Bare `linear` and `grid` are sized per instance
    /// (a chain of `n` qubits, the smallest square lattice holding `n`).
    pub architectures: Vec<String>,
    pub strategies: Vec<Strategy>,
    /// Settings shared by every cell; strategy and seed are overridden.
    pub base: SchedulerConfig,
}

/// Resolves an architecture spec for an instance with `n` logical qubits.
pub fn resolve_architecture(spec: &str, n: usize) -> Result<Architecture, ArchError> {
    match spec.trim() {
        "linear" => Ok(Architecture::linear(n.max(1))),
        "grid" => Ok(Architecture::square_grid_for(n)),
        other => Architecture::from_spec(other),
    }
}

#[derive(Debug, Clone)]
struct Cell {
    n: usize,
    density: f64,
    seed: u64,
    arch: String,
    strategy: Strategy,
}

impl BenchGrid {
    fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &n in &self.ns {
            for &density in &self.densities {
                for &seed in &self.seeds {
                    for arch in &self.architectures {
                        for &strategy in &self.strategies {
                            cells.push(Cell {
                                n,
                                density,
                                seed,
                                arch: arch.clone(),
                                strategy,
                            });
                        }
                    }
                }
            }
        }
        cells
    }

    /// Runs every cell on at most `jobs` threads (0 lets rayon decide).
    pub fn run(&self, jobs: usize) -> Vec<BenchRow> {
        let cells = self.cells();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        let mut rows: Vec<BenchRow> =
            pool.install(|| cells.par_iter().map(|cell| self.run_cell(cell)).collect());
        rows.sort_by(|a, b| {
            a.n.cmp(&b.n)
                .then(a.density.total_cmp(&b.density))
                .then(a.seed.cmp(&b.seed))
                .then(a.strategy.cmp(&b.strategy))
        });
        rows
    }

    fn run_cell(&self, cell: &Cell) -> BenchRow {
        let mut row = BenchRow {
            n: cell.n,
            density: cell.density,
            seed: cell.seed,
            architecture: cell.arch.clone(),
            strategy: cell.strategy.name().to_string(),
            abstract_depth: 0,
            decomposed_depth: 0,
            cphase_count: 0,
            swap_count: 0,
            compile_time_ms: 0.0,
            verified: false,
        };
        let Ok(arch) = resolve_architecture(&cell.arch, cell.n) else {
            return row;
        };
        row.architecture = arch.name().to_string();
        let Ok(g) = ProblemGraph::random(cell.n, cell.density, cell.seed) else {
            return row;
        };
        let cfg = SchedulerConfig {
            strategy: cell.strategy,
            seed: cell.seed,
            ..self.base.clone()
        };
        let start = Instant::now();
        let result = schedule(&g, &arch, &cfg);
        row.compile_time_ms = start.elapsed().as_secs_f64() * 1e3;
        if let Ok(circuit) = result {
            let m = metrics(&circuit, g.n());
            row.abstract_depth = m.abstract_depth;
            row.decomposed_depth = m.decomposed_depth;
            row.cphase_count = m.cphase_count;
            row.swap_count = m.swap_count;
            row.verified = verify(&circuit, &g, &arch).ok;
        }
        row
    }
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    if rows.is_empty() {
        writer.write_record(CSV_COLUMNS)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clique_ten_row() {
        let grid = BenchGrid {
            ns: vec![10],
            densities: vec![1.0],
            seeds: vec![0],
            architectures: vec!["linear".into()],
            strategies: vec![Strategy::PatternOnly],
            base: SchedulerConfig::default(),
        };
        let rows = grid.run(1);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].decomposed_depth, 56);
        assert!(rows[0].verified);
        assert_eq!(rows[0].architecture, "linear:10");
    }

    #[test]
    fn csv_header_order() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap().trim(),
            CSV_COLUMNS.join(",")
        );
    }

    #[test]
    fn degenerate_cell_is_unverified() {
        let grid = BenchGrid {
            ns: vec![3],
            densities: vec![0.1],
            seeds: vec![0],
            architectures: vec!["linear".into()],
            strategies: vec![Strategy::CtagH],
            base: SchedulerConfig::default(),
        };
        assert!(!grid.run(1)[0].verified);
    }
}
