//! Benchmark harness: timed runs of the block-by-block simulator and the
//! gate-by-gate baseline, reported as CSV rows.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::circuit::{GateKind, LayoutParams, RawCircuit};
use crate::gen::{gen_gate_layer, gen_qft, BenchSpec, Family};
use crate::optimizer::{optimize, OptimizeOptions};
use crate::sim::{simulate, simulate_gate_by_gate, SimConfig, SimError, Timings};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// H layer over a range of register sizes.
    Qubit,
    /// QFT at fixed size over 1, 2, 4 and 8 simulated ranks.
    Scaling,
    /// One layer of each benchmark gate.
    Gate,
    /// The benchmark circuit families.
    Circuit,
    /// Per-class time split of the circuit families on several ranks.
    Breakdown,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Qubit, Suite::Scaling, Suite::Gate, Suite::Circuit, Suite::Breakdown];

    pub fn default_sizes(self) -> Vec<usize> {
        match self {
            Suite::Qubit => (20..=26).collect(),
            _ => vec![22],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Qubit => "qubit",
            Suite::Scaling => "scaling",
            Suite::Gate => "gate",
            Suite::Circuit => "circuit",
            Suite::Breakdown => "breakdown",
        };
        f.write_str(s)
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Suite, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown suite `{s}` (expected qubit, scaling, gate, circuit or breakdown)"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchOptions {
    pub suite: Suite,
    pub sizes: Vec<usize>,
    pub reps: usize,
    pub workers: usize,
    pub chunk_qubits: usize,
    /// Rank qubits for the breakdown suite.
    pub rank_qubits: usize,
    pub fusion: bool,
    pub seed: u64,
}

impl BenchOptions {
    pub const DEFAULT_REPS: usize = 10;

    pub fn new(suite: Suite) -> BenchOptions {
        BenchOptions {
            suite,
            sizes: suite.default_sizes(),
            reps: Self::DEFAULT_REPS,
            workers: 1,
            chunk_qubits: 10,
            rank_qubits: 2,
            fusion: false,
            seed: 1,
        }
    }
}

pub const MODE_BLOCK: &str = "block-by-block";
pub const MODE_BASELINE: &str = "gate-by-gate-baseline";

/// One CSV row. Column order is the field order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub suite: String,
    pub workload: String,
    pub qubits: usize,
    pub ranks: usize,
    pub rank_qubits: usize,
    pub chunk_qubits: usize,
    pub cache_line_qubits: usize,
    pub buffer_qubits: usize,
    pub fusion: bool,
    pub workers: usize,
    pub mode: String,
    pub reps: usize,
    pub mean_seconds: f64,
    pub gate_seconds: f64,
    pub ims_seconds: f64,
    pub xrs_seconds: f64,
    pub aio_seconds: f64,
    pub blocks: usize,
    pub status: String,
}

struct Workload {
    name: String,
    circuit: RawCircuit,
    rank_qubits: usize,
    baseline: bool,
}

fn workloads(opts: &BenchOptions, n: usize) -> Result<Vec<Workload>, String> {
    let w = |name: String, circuit: RawCircuit, rank_qubits: usize, baseline: bool| Workload {
        name,
        circuit,
        rank_qubits,
        baseline,
    };
    let err = |e: crate::gen::GenError| e.to_string();
    Ok(match opts.suite {
        Suite::Qubit => vec![w("h".into(), gen_gate_layer(GateKind::H, n, opts.seed).map_err(err)?, 0, true)],
        Suite::Scaling => {
            let qft = gen_qft(n).map_err(err)?;
            (0..=3).filter(|&r| r < n).map(|r| w("qft".into(), qft.clone(), r, false)).collect()
        }
        Suite::Gate => GateKind::BENCHMARK
            .iter()
            .map(|&k| Ok(w(k.to_string().to_lowercase(), gen_gate_layer(k, n, opts.seed).map_err(err)?, 0, true)))
            .collect::<Result<_, String>>()?,
        Suite::Circuit | Suite::Breakdown => {
            let breakdown = opts.suite == Suite::Breakdown;
            Family::circuit_suite()
                .into_iter()
                .map(|f| {
                    let c = BenchSpec::new(f.clone(), n, opts.seed).generate().map_err(err)?;
                    let r = if breakdown { opts.rank_qubits.min(n - 1) } else { 0 };
                    Ok(w(f.to_string(), c, r, !breakdown))
                })
                .collect::<Result<_, String>>()?
        }
    })
}

/// `MemAvailable` from `/proc/meminfo`, when the platform has it.
fn available_memory() -> Option<u128> {
    let info = std::fs::read_to_string("/proc/meminfo").ok()?;
    let line = info.lines().find(|l| l.starts_with("MemAvailable:"))?;
    let kb: u128 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Runs every workload of `opts.suite` at every size. `progress` sees each
/// row as soon as it is measured. Workloads that do not fit in memory get a
/// row whose `status` starts with `skipped`.
pub fn run_bench(opts: &BenchOptions, mut progress: impl FnMut(&BenchRow)) -> Result<Vec<BenchRow>, String> {
    let mut rows = Vec::new();
    let reps = opts.reps.max(1);
    for &n in &opts.sizes {
        for wl in workloads(opts, n)? {
            let r = wl.rank_qubits;
            let layout = LayoutParams::new(n, r, opts.chunk_qubits.min(n - r));
            let mut row = BenchRow {
                suite: opts.suite.to_string(),
                workload: wl.name.clone(),
                qubits: n,
                ranks: 1 << r,
                rank_qubits: r,
                chunk_qubits: layout.chunk_qubits,
                cache_line_qubits: layout.cache_line_qubits,
                buffer_qubits: layout.buffer_qubits,
                fusion: opts.fusion,
                workers: opts.workers,
                mode: MODE_BLOCK.into(),
                reps,
                mean_seconds: 0.0,
                gate_seconds: 0.0,
                ims_seconds: 0.0,
                xrs_seconds: 0.0,
                aio_seconds: 0.0,
                blocks: 0,
                status: "ok".into(),
            };
            let bytes = (1u128 << n) * 16;
            let fits = available_memory().is_none_or(|avail| bytes <= avail * 9 / 10);

            let mut block = row.clone();
            if fits {
                measure_blocks(&wl.circuit, &layout, opts, reps, &mut block);
            } else {
                block.status = format!("skipped: out of memory ({bytes} bytes)");
            }
            progress(&block);
            rows.push(block);

            if wl.baseline {
                row.mode = MODE_BASELINE.into();
                row.chunk_qubits = 0;
                row.cache_line_qubits = 0;
                row.blocks = wl.circuit.len();
                if fits {
                    measure_baseline(&wl.circuit, opts.workers, reps, &mut row);
                } else {
                    row.status = format!("skipped: out of memory ({bytes} bytes)");
                }
                progress(&row);
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

fn measure_blocks(raw: &RawCircuit, layout: &LayoutParams, opts: &BenchOptions, reps: usize, row: &mut BenchRow) {
    let flags = OptimizeOptions { in_memory_swaps: true, cross_rank_swaps: true, fusion: opts.fusion };
    let cfg = SimConfig::new(*layout, opts.workers);
    let mut aio = Duration::ZERO;
    let mut sum = Timings::default();
    for _ in 0..reps {
        let start = Instant::now();
        let opt = match optimize(raw, layout, flags) {
            Ok(o) => o,
            Err(e) => {
                row.status = format!("error: {e}");
                return;
            }
        };
        aio += start.elapsed();
        row.blocks = opt.block_count();
        match simulate(&opt, &cfg) {
            Ok(out) => {
                sum.gate += out.timings.gate;
                sum.ims += out.timings.ims;
                sum.xrs += out.timings.xrs;
                sum.total += out.timings.total;
            }
            Err(SimError::OutOfMemory { bytes }) => {
                row.status = format!("skipped: out of memory ({bytes} bytes)");
                return;
            }
            Err(e) => {
                row.status = format!("error: {e}");
                return;
            }
        }
    }
    let k = reps as f64;
    row.mean_seconds = secs(sum.total) / k;
    row.gate_seconds = secs(sum.gate) / k;
    row.ims_seconds = secs(sum.ims) / k;
    row.xrs_seconds = secs(sum.xrs) / k;
    row.aio_seconds = secs(aio) / k;
}

fn measure_baseline(raw: &RawCircuit, workers: usize, reps: usize, row: &mut BenchRow) {
    let mut total = Duration::ZERO;
    for _ in 0..reps {
        match simulate_gate_by_gate(raw, workers) {
            Ok((_, t)) => total += t,
            Err(SimError::OutOfMemory { bytes }) => {
                row.status = format!("skipped: out of memory ({bytes} bytes)");
                return;
            }
            Err(e) => {
                row.status = format!("error: {e}");
                return;
            }
        }
    }
    row.mean_seconds = secs(total) / reps as f64;
    row.gate_seconds = row.mean_seconds;
}

/// Writes `rows` with a header line.
pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    w.flush()?;
    Ok(())
}

pub const CSV_COLUMNS: [&str; 19] = [
    "suite",
    "workload",
    "qubits",
    "ranks",
    "rank_qubits",
    "chunk_qubits",
    "cache_line_qubits",
    "buffer_qubits",
    "fusion",
    "workers",
    "mode",
    "reps",
    "mean_seconds",
    "gate_seconds",
    "ims_seconds",
    "xrs_seconds",
    "aio_seconds",
    "blocks",
    "status",
];

#[cfg(test)]
mod tests {
    use super::*;

    fn small(suite: Suite, sizes: Vec<usize>) -> BenchOptions {
        BenchOptions { sizes, reps: 2, chunk_qubits: 4, ..BenchOptions::new(suite) }
    }

    #[test]
    fn qubit_suite_rows_per_mode() {
        let rows = run_bench(&small(Suite::Qubit, (6..=8).collect()), |_| {}).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows.iter().filter(|r| r.mode == MODE_BLOCK).count(), 3);
        assert!(rows.iter().all(|r| r.status == "ok" && r.reps == 2));
    }

    #[test]
    fn scaling_suite_has_four_rank_counts() {
        let rows = run_bench(&small(Suite::Scaling, vec![8]), |_| {}).unwrap();
        assert_eq!(rows.iter().map(|r| r.ranks).collect::<Vec<_>>(), vec![1, 2, 4, 8]);
    }

    #[test]
    fn csv_header_is_stable() {
        let rows = run_bench(&small(Suite::Gate, vec![5]), |_| {}).unwrap();
        assert_eq!(rows.len(), 20);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
        let mut empty = Vec::new();
        write_csv(&[], &mut empty).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().trim_end(), CSV_COLUMNS.join(","));
    }

    #[test]
    fn oversized_workload_is_skipped() {
        if available_memory().is_none() {
            return;
        }
        let rows = run_bench(&small(Suite::Qubit, vec![45]), |_| {}).unwrap();
        assert!(rows.iter().all(|r| r.status.starts_with("skipped")));
    }

    #[test]
    fn suite_names() {
        for s in Suite::ALL {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("disk".parse::<Suite>().is_err());
    }
}
