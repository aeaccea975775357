//! Partitioned state-vector execution of optimized circuits.
//!
//! The state is split over `2^R` simulated ranks, each a persistent thread
//! that owns `2^(N-R)` amplitudes. Gate blocks run chunk by chunk, `SQS`
//! permutes bits inside a rank and `CSQS` exchanges data between ranks
//! through per-rank receive buffers, two barriers per buffer window.

mod bits;
mod kernels;
mod swaps;

pub use bits::{bitswap, insert_zeros, BitShift, PairSwap};
pub use kernels::{apply_chunked, apply_parallel, GateKernel};
pub use swaps::{ImsPlan, XrsPlan};

use std::sync::Barrier;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{
    GateError, Instruction, LayoutError, LayoutParams, OptimizedCircuit, QubitPermutation, RawCircuit,
};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error("circuit layout {circuit} does not match simulator layout {config}")]
    LayoutMismatch { circuit: String, config: String },
    #[error("cannot allocate the state vector: {bytes} bytes required")]
    OutOfMemory { bytes: u128 },
    #[error("instruction {index}: {source}")]
    Gate { index: usize, source: GateError },
    #[error("instruction {index}: {detail}")]
    Instruction { index: usize, detail: String },
    #[error("logical index {index} out of range for {qubits} qubits")]
    IndexOutOfRange { index: usize, qubits: usize },
    #[error("state has {got} amplitudes, expected {expected}")]
    StateSize { got: usize, expected: usize },
}

/// Simulator configuration. `layout.buffer_qubits` sizes the exchange
/// buffers and `layout.cache_line_qubits` drives the swap thread mapping.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub layout: LayoutParams,
    pub workers_per_rank: usize,
}

impl SimConfig {
    pub fn new(layout: LayoutParams, workers_per_rank: usize) -> SimConfig {
        SimConfig { layout, workers_per_rank: workers_per_rank.max(1) }
    }
}

/// Wall-clock time per instruction class, maximum over ranks.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timings {
    pub gate: Duration,
    pub ims: Duration,
    pub xrs: Duration,
    pub total: Duration,
}

impl Timings {
    fn max(self, other: Timings) -> Timings {
        Timings {
            gate: self.gate.max(other.gate),
            ims: self.ims.max(other.ims),
            xrs: self.xrs.max(other.xrs),
            total: self.total.max(other.total),
        }
    }
}

/// The amplitudes of every rank, indexed by physical position.
#[derive(Clone, Debug, PartialEq)]
pub struct DistState {
    pub total_qubits: usize,
    pub rank_qubits: usize,
    pub ranks: Vec<Vec<Complex64>>,
}

fn state_bytes(n: usize) -> u128 {
    (1u128 << n) * std::mem::size_of::<Complex64>() as u128
}

fn alloc_zeroed(len: usize, n: usize) -> Result<Vec<Complex64>, SimError> {
    let mut v = Vec::new();
    v.try_reserve_exact(len).map_err(|_| SimError::OutOfMemory { bytes: state_bytes(n) })?;
    v.resize(len, Complex64::new(0.0, 0.0));
    Ok(v)
}

/// `|0...0>` split over the ranks of `layout`.
pub fn init_state(layout: &LayoutParams) -> Result<DistState, SimError> {
    layout.validate()?;
    let n = layout.total_qubits;
    if n >= usize::BITS as usize - 5 {
        return Err(SimError::OutOfMemory { bytes: state_bytes(n) });
    }
    let ranks = (0..layout.ranks()).map(|_| alloc_zeroed(layout.local_len(), n)).collect::<Result<Vec<_>, _>>()?;
    let mut state = DistState { total_qubits: n, rank_qubits: layout.rank_qubits, ranks };
    state.ranks[0][0] = Complex64::new(1.0, 0.0);
    Ok(state)
}

impl DistState {
    /// Splits a dense vector, read as physical order, over `2^rank_qubits` ranks.
    pub fn from_dense(amps: &[Complex64], rank_qubits: usize) -> Result<DistState, SimError> {
        let n = amps.len().trailing_zeros() as usize;
        if !amps.len().is_power_of_two() || rank_qubits > n {
            return Err(SimError::StateSize { got: amps.len(), expected: 1 << n });
        }
        let local = 1usize << (n - rank_qubits);
        Ok(DistState { total_qubits: n, rank_qubits, ranks: amps.chunks(local).map(<[_]>::to_vec).collect() })
    }

    pub fn local_qubits(&self) -> usize {
        self.total_qubits - self.rank_qubits
    }

    pub fn norm_sqr(&self) -> f64 {
        self.ranks.iter().flatten().map(Complex64::norm_sqr).sum()
    }

    /// Physical-order concatenation of all ranks.
    pub fn to_dense(&self) -> Vec<Complex64> {
        self.ranks.concat()
    }

    /// Logical-order vector: entry `i` is the amplitude of basis state `i`.
    pub fn to_logical(&self, perm: &QubitPermutation) -> Vec<Complex64> {
        let mask = (1usize << self.local_qubits()) - 1;
        (0..1usize << self.total_qubits)
            .map(|i| {
                let p = perm.physical_index(i);
                self.ranks[p >> self.local_qubits()][p & mask]
            })
            .collect()
    }
}

/// Amplitude of logical basis state `index` after `perm` was applied.
pub fn get_amplitude(state: &DistState, index: usize, perm: &QubitPermutation) -> Result<Complex64, SimError> {
    if index >> state.total_qubits != 0 {
        return Err(SimError::IndexOutOfRange { index, qubits: state.total_qubits });
    }
    let p = perm.physical_index(index);
    let l = state.local_qubits();
    Ok(state.ranks[p >> l][p & ((1 << l) - 1)])
}

enum Step {
    Chunked(Vec<GateKernel>),
    Memory(GateKernel),
    Ims(ImsPlan),
    Xrs(XrsPlan),
}

fn compile(opt: &OptimizedCircuit, layout: &LayoutParams) -> Result<Vec<Step>, SimError> {
    let local = layout.local_qubits();
    let chunk = layout.chunk_qubits;
    let mut steps = Vec::with_capacity(opt.instructions.len());
    for (index, ins) in opt.instructions.iter().enumerate() {
        let bad = |detail: String| SimError::Instruction { index, detail };
        let step = match ins {
            Instruction::GateBlock(gates) => {
                let kernels = gates
                    .iter()
                    .map(GateKernel::new)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|source| SimError::Gate { index, source })?;
                let widest = kernels.iter().map(GateKernel::max_target).max().unwrap_or(0);
                if widest < chunk {
                    Step::Chunked(kernels)
                } else if kernels.len() == 1 && widest < local {
                    Step::Memory(kernels.into_iter().next().expect("one kernel"))
                } else {
                    return Err(bad(format!("gate block target {widest} outside the chunk of {chunk} qubits")));
                }
            }
            Instruction::InMemSwap { out_set, in_set } => {
                Step::Ims(ImsPlan::new(out_set, in_set, local, layout.cache_line_qubits).map_err(bad)?)
            }
            Instruction::CrossRankSwap { local_set, rank_set } => Step::Xrs(
                XrsPlan::new(local_set, rank_set, local, layout.total_qubits, layout.buffer_qubits).map_err(bad)?,
            ),
        };
        steps.push(step);
    }
    Ok(steps)
}

/// Result of [`simulate`]: the physical state, the permutation needed to
/// read logical amplitudes, and per-class timings.
#[derive(Clone, Debug)]
pub struct SimOutput {
    pub state: DistState,
    pub permutation: QubitPermutation,
    pub timings: Timings,
}

/// Runs `opt` from `|0...0>`.
pub fn simulate(opt: &OptimizedCircuit, cfg: &SimConfig) -> Result<SimOutput, SimError> {
    check_layout(opt, &cfg.layout)?;
    let steps = compile(opt, &cfg.layout)?;
    let state = init_state(&cfg.layout)?;
    Ok(run(steps, opt, cfg, state))
}

/// Runs `opt` from a given physical state.
pub fn simulate_from(opt: &OptimizedCircuit, cfg: &SimConfig, state: DistState) -> Result<SimOutput, SimError> {
    check_layout(opt, &cfg.layout)?;
    if state.total_qubits != cfg.layout.total_qubits
        || state.rank_qubits != cfg.layout.rank_qubits
        || state.ranks.iter().any(|r| r.len() != cfg.layout.local_len())
    {
        return Err(SimError::StateSize {
            got: state.ranks.iter().map(Vec::len).sum(),
            expected: 1 << cfg.layout.total_qubits,
        });
    }
    let steps = compile(opt, &cfg.layout)?;
    Ok(run(steps, opt, cfg, state))
}

fn check_layout(opt: &OptimizedCircuit, layout: &LayoutParams) -> Result<(), SimError> {
    layout.validate()?;
    let o = &opt.layout;
    if o.total_qubits != layout.total_qubits || o.rank_qubits != layout.rank_qubits {
        return Err(SimError::LayoutMismatch { circuit: o.to_string(), config: layout.to_string() });
    }
    Ok(())
}

fn run(steps: Vec<Step>, opt: &OptimizedCircuit, cfg: &SimConfig, mut state: DistState) -> SimOutput {
    let layout = &cfg.layout;
    let workers = cfg.workers_per_rank;
    let buffers = swaps::exchange_buffers(layout.ranks(), layout.buffer_qubits);
    let barrier = Barrier::new(layout.ranks());
    let steps = &steps;

    let rank_loop = |rank: usize, amps: &mut Vec<Complex64>| {
        let mut t = Timings::default();
        let start = Instant::now();
        for step in steps {
            let s = Instant::now();
            match step {
                Step::Chunked(kernels) => {
                    apply_chunked(kernels, amps, layout.chunk_qubits, workers);
                    t.gate += s.elapsed();
                }
                Step::Memory(kernel) => {
                    apply_parallel(kernel, amps, workers);
                    t.gate += s.elapsed();
                }
                Step::Ims(plan) => {
                    plan.apply(amps, workers);
                    t.ims += s.elapsed();
                }
                Step::Xrs(plan) => {
                    barrier.wait();
                    plan.run_rank(rank, amps, &buffers, &barrier);
                    t.xrs += s.elapsed();
                }
            }
        }
        t.total = start.elapsed();
        t
    };

    let timings = if state.ranks.len() == 1 {
        rank_loop(0, &mut state.ranks[0])
    } else {
        std::thread::scope(|sc| {
            let handles: Vec<_> = state
                .ranks
                .iter_mut()
                .enumerate()
                .map(|(r, amps)| {
                    let rank_loop = &rank_loop;
                    sc.spawn(move || rank_loop(r, amps))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("rank thread panicked")).fold(Timings::default(), Timings::max)
        })
    };
    SimOutput { state, permutation: opt.final_permutation.clone(), timings }
}

/// Applies `raw` gate by gate over the whole state, without blocks or
/// scratch buffers. Returns the final state and the elapsed time.
pub fn simulate_gate_by_gate(raw: &RawCircuit, workers: usize) -> Result<(Vec<Complex64>, Duration), SimError> {
    let n = raw.num_qubits;
    let layout = LayoutParams::new(n, 0, 0);
    layout.validate()?;
    let kernels = raw
        .gates
        .iter()
        .map(GateKernel::new)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|source| SimError::Gate { index: 0, source })?;
    let mut amps = init_state(&layout)?.ranks.remove(0);
    let start = Instant::now();
    for k in &kernels {
        apply_parallel(k, &mut amps, workers);
    }
    Ok((amps, start.elapsed()))
}
