//! Cache-aware state-vector quantum circuit simulation.
//!
//! The crate has two halves. The [`optimizer`] rewrites a [`RawCircuit`] into
//! an [`OptimizedCircuit`]: gate blocks whose qubits all sit inside one chunk
//! of `2^C` amplitudes, separated by in-memory swaps (`SQS`) and cross-rank
//! swaps (`CSQS`), optionally with diagonal gates fused. The [`sim`] module
//! executes that stream over a state vector split across `2^R` simulated
//! ranks. [`oracle`] holds the dense reference simulator and the order
//! validator used to check both.

pub mod circuit;
pub mod config;
pub mod gen;
pub mod harness;
pub mod optimizer;
pub mod oracle;
pub mod sim;

pub use circuit::{Gate, GateKind, Instruction, LayoutParams, OptimizedCircuit, QubitPermutation, RawCircuit};
