//! Circuit data model and the raw / optimized text formats.

mod error;
mod format;
mod gate;
mod layout;

pub use error::{GateError, LayoutError, ParseError, ParseErrorKind};
pub use format::{parse_optimized, parse_raw, serialize_optimized, serialize_raw};
pub use gate::{Gate, GateKind, Matrix, Params, DEFAULT_ANGLE, MAX_FUSED_QUBITS};
pub use layout::{LayoutParams, QubitPermutation, DEFAULT_CACHE_LINE_QUBITS};

/// An unoptimized circuit: gates in program order, ids `0, 1, 2, ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct RawCircuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
}

impl RawCircuit {
    pub fn new(num_qubits: usize) -> RawCircuit {
        RawCircuit { num_qubits, gates: Vec::new() }
    }

    /// Appends a gate, assigning it the next id. Targets of symmetric gates
    /// are stored ascending.
    pub fn push(&mut self, kind: GateKind, mut targets: Vec<usize>, angles: Vec<f64>) {
        if kind.is_symmetric() {
            targets.sort_unstable();
        }
        let id = self.gates.len();
        self.gates.push(Gate::with_angles(kind, targets, id, angles));
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

/// One element of an optimized circuit.
#[derive(Clone, Debug, PartialEq)]
pub enum Instruction {
    /// Gates executed back to back inside every chunk. A single gate may
    /// reach beyond the chunk, in which case it runs over the whole rank.
    GateBlock(Vec<Gate>),
    /// Exchange physical bits `out_set[k]` and `in_set[k]` (sorted pairing)
    /// inside every rank.
    InMemSwap { out_set: Vec<usize>, in_set: Vec<usize> },
    /// Exchange the top local bits `local_set` with the rank bits `rank_set`.
    CrossRankSwap { local_set: Vec<usize>, rank_set: Vec<usize> },
}

impl Instruction {
    pub fn is_gate_block(&self) -> bool {
        matches!(self, Instruction::GateBlock(_))
    }
}

/// Output of the optimizer: an instruction stream over physical qubits plus
/// the logical/physical mapping in force after the last instruction.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizedCircuit {
    pub layout: LayoutParams,
    pub instructions: Vec<Instruction>,
    pub final_permutation: QubitPermutation,
}

impl OptimizedCircuit {
    /// Wraps an instruction stream, computing the final permutation by
    /// replaying its swaps from the identity.
    pub fn new(layout: LayoutParams, instructions: Vec<Instruction>) -> OptimizedCircuit {
        let final_permutation = replay_permutation(layout.total_qubits, &instructions);
        OptimizedCircuit { layout, instructions, final_permutation }
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.total_qubits
    }

    pub fn gate_blocks(&self) -> impl Iterator<Item = &[Gate]> {
        self.instructions.iter().filter_map(|i| match i {
            Instruction::GateBlock(g) => Some(g.as_slice()),
            _ => None,
        })
    }

    pub fn block_count(&self) -> usize {
        self.gate_blocks().count()
    }

    pub fn gate_count(&self) -> usize {
        self.gate_blocks().map(|b| b.len()).sum()
    }
}

/// Permutation obtained by applying every swap in `instructions` to the identity.
pub fn replay_permutation(num_qubits: usize, instructions: &[Instruction]) -> QubitPermutation {
    let mut perm = QubitPermutation::identity(num_qubits);
    for inst in instructions {
        match inst {
            Instruction::InMemSwap { out_set, in_set } => perm.swap_positions(out_set, in_set),
            Instruction::CrossRankSwap { local_set, rank_set } => perm.swap_positions(local_set, rank_set),
            Instruction::GateBlock(_) => {}
        }
    }
    perm
}
