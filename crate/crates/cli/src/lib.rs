//! Command implementations shared by the `quokka`, `finder` and `Quokka`
//! binaries.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use quokka_core::circuit::{parse_optimized, parse_raw, serialize_optimized, serialize_raw};
use quokka_core::config::parse_ini;
use quokka_core::gen::{BenchSpec, Family};
use quokka_core::harness::{run_bench, write_csv, BenchOptions, Suite};
use quokka_core::optimizer::{optimize, OptimizeOptions};
use quokka_core::oracle::validate_order;
use quokka_core::sim::{get_amplitude, simulate, SimConfig};
use quokka_core::{Instruction, LayoutParams, OptimizedCircuit};

/// Environment variable holding the worker threads per simulated rank.
pub const WORKERS_ENV: &str = "QUOKKA_WORKERS";

/// `QUOKKA_WORKERS` when set to a positive integer, otherwise the number of
/// available cores.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&w: &usize| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "quokka", version, about = "Gate-block optimizer and partitioned state-vector simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a benchmark circuit in raw format.
    Gen(GenArgs),
    /// Optimize a raw circuit (same positional arguments as the standalone finder).
    Finder(FinderArgs),
    /// Simulate an optimized circuit.
    Sim(SimArgs),
    /// Check that an optimized circuit keeps the gate order of its raw circuit.
    Validate(ValidateArgs),
    /// Run a benchmark suite and write CSV.
    Bench(BenchArgs),
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen(a) => run_gen(&a).map(|_| 0),
        Command::Finder(a) => {
            print!("{}", run_finder(&a)?);
            Ok(0)
        }
        Command::Sim(a) => {
            print!("{}", run_simulator(&a)?);
            Ok(0)
        }
        Command::Validate(a) => {
            let (passed, report) = run_validate(&a)?;
            println!("{}", report.trim_end());
            Ok(if passed { 0 } else { 1 })
        }
        Command::Bench(a) => run_bench_cmd(&a).map(|_| 0),
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// qft, qaoa, bv, hs, qv, sc, vc, or a benchmark gate name for one gate layer.
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub qubits: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// QAOA levels.
    #[arg(long)]
    pub levels: Option<usize>,
    /// BV secret as 0/1 characters for qubits 0..n-1 (default all ones).
    #[arg(long)]
    pub secret: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_gen(a: &GenArgs) -> Result<()> {
    let mut family: Family = a.family.parse()?;
    match &mut family {
        Family::Qaoa { levels } => *levels = a.levels.unwrap_or(*levels),
        Family::Bv { secret } => secret.clone_from(&a.secret),
        _ => {}
    }
    let raw = BenchSpec::new(family, a.qubits, a.seed).generate()?;
    emit(&serialize_raw(&raw), a.out.as_deref())
}

/// `finder FILE CACHE RANK QUBITS IMS XRS FUSION_SIZE FUSION`.
///
/// `RANK` is the number of qubits indexing one rank's local state, so the
/// rank qubits are `QUBITS - RANK`.
#[derive(Debug, Args)]
pub struct FinderArgs {
    /// Raw circuit file.
    pub target: PathBuf,
    /// Chunk qubits (C).
    pub cache_size: usize,
    /// Local qubits per rank (N - R).
    pub rank_size: usize,
    /// Total qubits (N).
    pub qubit_size: usize,
    /// Apply in-memory swapping (0/1).
    pub in_memory_swapping: u8,
    /// Apply cross-rank swapping (0/1).
    pub cross_rank_swapping: u8,
    /// Largest fused gate width (F).
    pub fusion_size: usize,
    /// Apply diagonal gate fusion (0/1).
    pub fusion: u8,
}

fn flag(v: u8, name: &str) -> Result<bool> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        _ => bail!("{name} must be 0 or 1, got {v}"),
    }
}

pub fn run_finder(a: &FinderArgs) -> Result<String> {
    let n = a.qubit_size;
    if a.rank_size > n {
        bail!("rank size {} exceeds qubit size {n}", a.rank_size);
    }
    let opts = OptimizeOptions {
        in_memory_swaps: flag(a.in_memory_swapping, "in-memory swapping")?,
        cross_rank_swaps: flag(a.cross_rank_swapping, "cross-rank swapping")?,
        fusion: flag(a.fusion, "fusion")?,
    };
    let mut layout = LayoutParams::new(n, n - a.rank_size, a.cache_size);
    if opts.fusion {
        layout = layout.with_fusion(a.fusion_size);
    }
    let text = read(&a.target)?;
    let raw = parse_raw(&text, n).map_err(|e| anyhow::anyhow!("{}: {e}", a.target.display()))?;
    let opt = optimize(&raw, &layout, opts)?;
    Ok(serialize_optimized(&opt))
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// `.ini` file with the [system] section.
    #[arg(short = 'i', long = "ini")]
    pub ini: PathBuf,
    /// Circuit file, optimized format unless --raw is given.
    #[arg(short = 'c', long = "circuit")]
    pub circuit: PathBuf,
    /// Print the first K logical amplitudes.
    #[arg(short = 'a', long = "amplitudes", default_value_t = 0)]
    pub amplitudes: usize,
    /// Chunk qubits. Defaults to the widest multi-gate block of the circuit
    /// (or 10 with --raw).
    #[arg(long)]
    pub chunk_qubits: Option<usize>,
    /// Treat the circuit as raw and optimize it first.
    #[arg(long)]
    pub raw: bool,
    /// Fuse diagonal gates when optimizing a raw circuit.
    #[arg(long)]
    pub fusion: bool,
    /// Worker threads per rank (default from QUOKKA_WORKERS or the core count).
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Chunk width an optimized listing needs: one past the highest target of
/// any multi-gate block.
fn required_chunk(text: &str, n: usize, r: usize) -> Result<usize> {
    let probe = LayoutParams::new(n, r, n - r);
    let opt = parse_optimized(text, &probe)?;
    let widest = opt
        .gate_blocks()
        .filter(|b| b.len() > 1)
        .flat_map(|b| b.iter().flat_map(|g| g.targets.iter().copied()))
        .max()
        .map_or(1, |q| q + 1);
    Ok(widest.min(n - r))
}

pub fn run_simulator(a: &SimArgs) -> Result<String> {
    let ini = read(&a.ini)?;
    let system = parse_ini(&ini).with_context(|| format!("in {}", a.ini.display()))?;
    let n = system.total_qbit;
    let text = read(&a.circuit)?;
    let located = |e: quokka_core::circuit::ParseError| anyhow::anyhow!("{}: {e}", a.circuit.display());

    let mut report = String::new();
    let (opt, layout, aio): (OptimizedCircuit, LayoutParams, Option<f64>) = if a.raw {
        let c = a.chunk_qubits.unwrap_or(10).min(n.saturating_sub(system.rank_qbit)).max(1);
        let layout = system.layout(c)?;
        let raw = parse_raw(&text, n).map_err(located)?;
        let flags = OptimizeOptions { fusion: a.fusion, ..OptimizeOptions::default() };
        let start = Instant::now();
        let opt = optimize(&raw, &layout, flags)?;
        (opt, layout, Some(start.elapsed().as_secs_f64()))
    } else {
        if system.rank_qbit > n {
            bail!("rank_qbit {} exceeds total_qbit {n}", system.rank_qbit);
        }
        let c = match a.chunk_qubits {
            Some(c) => c,
            None => required_chunk(&text, n, system.rank_qbit)
                .map_err(|e| anyhow::anyhow!("{}: {e}", a.circuit.display()))?,
        };
        let layout = system.layout(c)?;
        let opt = parse_optimized(&text, &layout).map_err(located)?;
        if system.rank_qbit == 0 && opt.instructions.iter().any(|i| matches!(i, Instruction::CrossRankSwap { .. })) {
            bail!("circuit contains cross-rank swaps but rank_qbit is 0");
        }
        (opt, layout, None)
    };

    let workers = a.workers.unwrap_or_else(default_workers);
    let out = simulate(&opt, &SimConfig::new(layout, workers))?;
    let t = out.timings;
    writeln!(report, "layout: {layout}")?;
    writeln!(report, "ranks: {}  workers per rank: {workers}", layout.ranks())?;
    writeln!(
        report,
        "instructions: {}  gate blocks: {}  gates: {}",
        opt.instructions.len(),
        opt.block_count(),
        opt.gate_count()
    )?;
    writeln!(report, "norm: {:.12}", out.state.norm_sqr().sqrt())?;
    writeln!(report, "time gate: {:.6} s", t.gate.as_secs_f64())?;
    writeln!(report, "time ims: {:.6} s", t.ims.as_secs_f64())?;
    writeln!(report, "time xrs: {:.6} s", t.xrs.as_secs_f64())?;
    match aio {
        Some(s) => writeln!(report, "time aio: {s:.6} s")?,
        None => writeln!(report, "time aio: n/a (circuit already optimized)")?,
    }
    writeln!(report, "time total: {:.6} s", t.total.as_secs_f64())?;
    let k = a.amplitudes.min(1 << n.min(62));
    for i in 0..k {
        let amp = get_amplitude(&out.state, i, &out.permutation)?;
        writeln!(report, "amp {i} {:+.12e} {:+.12e}", amp.re, amp.im)?;
    }
    Ok(report)
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Raw circuit file.
    #[arg(long)]
    pub raw: PathBuf,
    /// Optimized circuit file.
    #[arg(long)]
    pub opt: PathBuf,
    /// Total qubits (default: one past the highest qubit in the raw circuit).
    #[arg(long)]
    pub qubits: Option<usize>,
    /// Rank qubits (default: the smallest count the optimized listing parses with).
    #[arg(long)]
    pub rank_qubits: Option<usize>,
}

fn highest_qubit(raw_text: &str) -> Result<usize> {
    let wide = parse_raw(raw_text, 63)?;
    Ok(wide.gates.iter().flat_map(|g| g.targets.iter().copied()).max().map_or(1, |q| q + 1))
}

pub fn run_validate(a: &ValidateArgs) -> Result<(bool, String)> {
    let raw_text = read(&a.raw)?;
    let opt_text = read(&a.opt)?;
    let n = match a.qubits {
        Some(n) => n,
        None => highest_qubit(&raw_text).map_err(|e| anyhow::anyhow!("{}: {e}", a.raw.display()))?,
    };
    let raw = parse_raw(&raw_text, n).map_err(|e| anyhow::anyhow!("{}: {e}", a.raw.display()))?;
    let ranks: Vec<usize> = match a.rank_qubits {
        Some(r) => vec![r],
        None => (0..n).collect(),
    };
    let mut last_err = None;
    for r in ranks {
        match parse_optimized(&opt_text, &LayoutParams::new(n, r, n - r)) {
            Ok(opt) => {
                let v = validate_order(&raw, &opt);
                return Ok((v.passed(), v.to_string()));
            }
            Err(e) => last_err = Some(e),
        }
    }
    match last_err {
        Some(e) => bail!("{}: {e}", a.opt.display()),
        None => bail!("no layout fits {}", a.opt.display()),
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// qubit, scaling, gate, circuit or breakdown.
    #[arg(long)]
    pub suite: String,
    /// Register sizes: a list `20,22` or a range `20..26`.
    #[arg(long)]
    pub sizes: Option<String>,
    #[arg(long, default_value_t = BenchOptions::DEFAULT_REPS)]
    pub reps: usize,
    #[arg(long, default_value_t = 10)]
    pub chunk_qubits: usize,
    /// Rank qubits used by the breakdown suite.
    #[arg(long, default_value_t = 2)]
    pub rank_qubits: usize,
    #[arg(long)]
    pub fusion: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
    /// CSV destination (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi): (usize, usize) = (lo.trim().parse()?, hi.trim().trim_start_matches('=').parse()?);
        if lo > hi {
            bail!("empty size range {s}");
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|x| x.trim().parse().with_context(|| format!("bad size `{x}`"))).collect()
}

pub fn run_bench_cmd(a: &BenchArgs) -> Result<()> {
    let suite: Suite = a.suite.parse().map_err(anyhow::Error::msg)?;
    let mut opts = BenchOptions::new(suite);
    if let Some(s) = &a.sizes {
        opts.sizes = parse_sizes(s)?;
    }
    opts.reps = a.reps.max(1);
    opts.chunk_qubits = a.chunk_qubits;
    opts.rank_qubits = a.rank_qubits;
    opts.fusion = a.fusion;
    opts.seed = a.seed;
    opts.workers = a.workers.unwrap_or_else(default_workers);
    let rows = run_bench(&opts, |r| {
        eprintln!(
            "{} {} n={} ranks={} {}: {:.6} s [{}]",
            r.suite, r.workload, r.qubits, r.ranks, r.mode, r.mean_seconds, r.status
        )
    })
    .map_err(anyhow::Error::msg)?;
    match &a.out {
        Some(p) => {
            let f = std::fs::File::create(p).with_context(|| format!("cannot write {}", p.display()))?;
            write_csv(&rows, f)?;
        }
        None => write_csv(&rows, std::io::stdout().lock())?,
    }
    Ok(())
}
