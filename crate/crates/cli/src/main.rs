//! `ctag`: schedule, verify and benchmark QAOA cost layers on coupled
//! qubit devices.
//!
//! Exit codes: 0 on success, 1 when a schedule fails verification (or a
//! bench cell is unverified), 2 on unreadable or malformed input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ctag_core::bench::{write_csv, BenchGrid};
use ctag_core::{
    metrics, schedule, verify, Architecture, ProblemGraph, ScheduledCircuit, SchedulerConfig,
    Strategy,
};

#[derive(Parser)]
#[command(
    name = "ctag",
    version,
    about = "Commutativity-aware QAOA circuit scheduler"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Schedule a problem graph onto an architecture.
    Schedule(ScheduleArgs),
    /// Check a schedule against a problem graph and architecture.
    Verify(VerifyArgs),
    /// Run a benchmark grid and write one row per instance.
    Bench(BenchArgs),
    /// Write a seeded random problem graph.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

/// Settings that override the config file.
#[derive(Args)]
struct Tuning {
    /// ctag-r | ctag-i-astar | ctag-i-iso | ctag-h | pattern-only | ctag
    #[arg(long)]
    strategy: Option<String>,
    /// TOML file with scheduler settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    beam: Option<usize>,
}

impl Tuning {
    fn config(&self) -> anyhow::Result<SchedulerConfig> {
        let mut cfg = match &self.config {
            Some(path) => SchedulerConfig::from_toml(&read(path)?)?,
            None => SchedulerConfig::default(),
        };
        if let Some(s) = &self.strategy {
            cfg.strategy = s.parse()?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(t) = self.threshold {
            cfg.threshold = t;
        }
        if let Some(b) = self.beam {
            cfg.beam = b;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct ScheduleArgs {
    /// Problem graph file ("n m" header, then "u v" lines).
    #[arg(long)]
    graph: PathBuf,
    /// linear:N | grid:RxC | ibm20 | ibm27 | file:PATH
    #[arg(long)]
    arch: String,
    #[command(flatten)]
    tuning: Tuning,
    /// Output prefix; defaults to the graph path without its extension.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Format of the summary printed on stdout.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Schedule in the text or JSON format.
    #[arg(long)]
    schedule: PathBuf,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    arch: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated vertex counts.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Comma-separated densities; 1.0 gives cliques.
    #[arg(long, value_delimiter = ',', required = true)]
    density: Vec<f64>,
    /// Seeds as a comma list or a half-open range "a..b".
    #[arg(long, default_value = "0")]
    seeds: String,
    /// Comma-separated architecture specs; bare "linear" and "grid" are
    /// sized to each instance.
    #[arg(long, value_delimiter = ',', required = true)]
    arch: Vec<String>,
    /// Comma-separated strategies.
    #[arg(long = "strategy", value_delimiter = ',', default_value = "ctag-h")]
    strategies: Vec<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    beam: Option<usize>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Distinguishes bad input (exit 2) from failed checks (exit 1).
enum Failure {
    Input(anyhow::Error),
    Check(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Schedule(args) => cmd_schedule(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Generate(args) => cmd_generate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_graph(path: &Path) -> anyhow::Result<ProblemGraph> {
    ProblemGraph::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_arch(spec: &str) -> anyhow::Result<Architecture> {
    Architecture::from_spec(spec).with_context(|| format!("architecture {spec:?}"))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_schedule(args: ScheduleArgs) -> Outcome {
    let g = load_graph(&args.graph)?;
    let arch = load_arch(&args.arch)?;
    let cfg = args.tuning.config()?;
    let circuit = match schedule(&g, &arch, &cfg) {
        Ok(c) => c,
        Err(e @ ctag_core::SchedulerError::Invalid(_)) => {
            return Err(Failure::Check(e.to_string()))
        }
        Err(e) => return Err(Failure::Input(e.into())),
    };
    let report = verify(&circuit, &g, &arch);
    let m = metrics(&circuit, g.n());

    let prefix = args.out.unwrap_or_else(|| args.graph.with_extension(""));
    write(&with_suffix(&prefix, ".schedule.txt"), &circuit.to_text())?;
    write(&with_suffix(&prefix, ".schedule.json"), &circuit.to_json())?;
    let metrics_json = serde_json::to_string_pretty(&m).map_err(anyhow::Error::from)?;
    write(&with_suffix(&prefix, ".metrics.json"), &metrics_json)?;

    if args.format == Format::Json {
        println!("{metrics_json}");
    } else {
        println!("strategy: {}", cfg.strategy);
        println!("architecture: {}", arch.name());
        println!("abstract_depth: {}", m.abstract_depth);
        println!("decomposed_depth: {}", m.decomposed_depth);
        println!("cphase_count: {}", m.cphase_count);
        println!("swap_count: {}", m.swap_count);
        println!("decomposed_gate_count: {}", m.decomposed_gate_count);
    }
    if !report.ok {
        let detail = serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?;
        eprintln!("{detail}");
        return Err(Failure::Check("schedule failed verification".into()));
    }
    Ok(())
}

fn parse_schedule(text: &str) -> anyhow::Result<ScheduledCircuit> {
    if text.trim_start().starts_with('{') {
        Ok(ScheduledCircuit::from_json(text)?)
    } else {
        Ok(ScheduledCircuit::parse_text(text)?)
    }
}

fn cmd_verify(args: VerifyArgs) -> Outcome {
    let text = read(&args.schedule)?;
    let circuit = parse_schedule(&text)
        .map_err(|e| anyhow!("format error in {}: {e}", args.schedule.display()))?;
    let g = load_graph(&args.graph)?;
    let arch = load_arch(&args.arch)?;
    let report = verify(&circuit, &g, &arch);
    if args.format == Format::Json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?
        );
    } else {
        println!("ok: {}", report.ok);
        println!("executed: {}", report.executed_pairs.len());
        if let Some(e) = &report.init_error {
            println!("init_error: {e}");
        }
        println!("missing: {}", pairs(&report.missing));
        println!("duplicated: {}", pairs(&report.duplicated));
        println!("illegal_gates: {}", report.illegal_gates.len());
        for bad in &report.illegal_gates {
            println!("  cycle {}: {} ({:?})", bad.cycle, bad.gate, bad.violation);
        }
    }
    if report.ok {
        Ok(())
    } else {
        Err(Failure::Check("schedule failed verification".into()))
    }
}

fn pairs(list: &[(usize, usize)]) -> String {
    let items: Vec<String> = list.iter().map(|(u, v)| format!("({u},{v})")).collect();
    format!("{} [{}]", list.len(), items.join(" "))
}

fn parse_seeds(spec: &str) -> anyhow::Result<Vec<u64>> {
    if let Some((a, b)) = spec.split_once("..") {
        let a: u64 = a.trim().parse().context("seed range start")?;
        let b: u64 = b.trim().parse().context("seed range end")?;
        return Ok((a..b).collect());
    }
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .with_context(|| format!("seed {s:?}"))
        })
        .collect()
}

fn cmd_bench(args: BenchArgs) -> Outcome {
    let mut base = match &args.config {
        Some(path) => SchedulerConfig::from_toml(&read(path)?).map_err(anyhow::Error::from)?,
        None => SchedulerConfig::default(),
    };
    if let Some(t) = args.threshold {
        base.threshold = t;
    }
    if let Some(b) = args.beam {
        base.beam = b;
    }
    base.validate().map_err(anyhow::Error::from)?;
    let strategies = args
        .strategies
        .iter()
        .map(|s| s.parse::<Strategy>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(anyhow::Error::from)?;
    let grid = BenchGrid {
        ns: args.n,
        densities: args.density,
        seeds: parse_seeds(&args.seeds)?,
        architectures: args.arch,
        strategies,
        base,
    };
    let rows = grid.run(args.jobs);
    let body = match args.format {
        Format::Json => serde_json::to_string_pretty(&rows).map_err(anyhow::Error::from)?,
        Format::Csv | Format::Text => {
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf).map_err(anyhow::Error::from)?;
            String::from_utf8(buf).map_err(anyhow::Error::from)?
        }
    };
    match &args.out {
        Some(path) => write(path, &body)?,
        None => print!("{body}"),
    }
    let failed = rows.iter().filter(|r| !r.verified).count();
    if failed > 0 {
        return Err(Failure::Check(format!(
            "{failed} of {} instances unverified",
            rows.len()
        )));
    }
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Outcome {
    let g = ProblemGraph::random(args.n, args.density, args.seed).map_err(anyhow::Error::from)?;
    match &args.out {
        Some(path) => write(path, &g.to_text())?,
        None => print!("{}", g.to_text()),
    }
    Ok(())
}
