//! Gate-block optimizer.
//!
//! Two passes of the same block finder: first over the local index range
//! (`N - R` qubits) to decide where cross-rank swaps go, then inside each of
//! those device blocks over the chunk (`C` qubits) to place in-memory swaps.

mod blocks;
mod fusion;
mod qubits;
mod swaps;

pub use blocks::{find_gbs, find_max_gate, setup_gb, update_dependency, ChunkSelection, LogicalBlock};
pub use fusion::do_fusion;
pub use qubits::QubitSet;
pub use swaps::{insert_qubit_swaps, SwapLevel};

use thiserror::Error;

use crate::circuit::{Gate, Instruction, LayoutError, LayoutParams, OptimizedCircuit, QubitPermutation, RawCircuit};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OptimizeError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error("circuit has {circuit} qubits but the layout has {layout}")]
    QubitCount { circuit: usize, layout: usize },
    #[error("gate {id} targets qubit {qubit} >= {limit}")]
    QubitOutOfRange { id: usize, qubit: usize, limit: usize },
    #[error("gate needs {width} qubits but the chunk holds {chunk}")]
    GateWiderThanChunk { width: usize, chunk: usize },
    #[error("chunk set of {size} qubits does not fit a region of {region}")]
    ChunkSetTooLarge { size: usize, region: usize },
    #[error("no progress with {remaining} gates left")]
    Stalled { remaining: usize },
    #[error("cross-rank swaps are required when rank qubits are present")]
    CrossRankSwapsRequired,
}

/// Which optimizations to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OptimizeOptions {
    pub in_memory_swaps: bool,
    pub cross_rank_swaps: bool,
    pub fusion: bool,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions { in_memory_swaps: true, cross_rank_swaps: true, fusion: false }
    }
}

/// Rewrites `raw` into gate blocks and swaps for `layout`.
pub fn optimize(
    raw: &RawCircuit,
    layout: &LayoutParams,
    opts: OptimizeOptions,
) -> Result<OptimizedCircuit, OptimizeError> {
    layout.validate()?;
    let n = layout.total_qubits;
    if raw.num_qubits != n {
        return Err(OptimizeError::QubitCount { circuit: raw.num_qubits, layout: n });
    }
    for g in &raw.gates {
        if let Some(&q) = g.targets.iter().find(|&&q| q >= n) {
            return Err(OptimizeError::QubitOutOfRange { id: g.id, qubit: q, limit: n });
        }
    }
    if layout.rank_qubits > 0 && !opts.cross_rank_swaps {
        return Err(OptimizeError::CrossRankSwapsRequired);
    }

    let chunk = layout.chunk_qubits;
    let mut perm = QubitPermutation::identity(n);
    let mut out = Vec::new();
    let fuse = |gates: Vec<Gate>| if opts.fusion { do_fusion(gates, layout.fusion_qubits) } else { gates };

    for device in find_gbs(raw.gates.clone(), layout.local_qubits())? {
        if layout.rank_qubits > 0 {
            out.extend(insert_qubit_swaps(device.chunk_set, &mut perm, layout, SwapLevel::Rank)?);
        }
        if opts.in_memory_swaps {
            for block in find_gbs(device.gates, chunk)? {
                out.extend(insert_qubit_swaps(block.chunk_set, &mut perm, layout, SwapLevel::Chunk)?);
                let mapped = block.gates.iter().map(|g| g.remapped(|q| perm.physical(q))).collect();
                out.push(Instruction::GateBlock(fuse(mapped)));
            }
        } else {
            let mut pending: Vec<Gate> = Vec::new();
            for g in &device.gates {
                let mapped = g.remapped(|q| perm.physical(q));
                if mapped.targets.iter().all(|&q| q < chunk) {
                    pending.push(mapped);
                } else {
                    if !pending.is_empty() {
                        out.push(Instruction::GateBlock(fuse(std::mem::take(&mut pending))));
                    }
                    out.push(Instruction::GateBlock(vec![mapped]));
                }
            }
            if !pending.is_empty() {
                out.push(Instruction::GateBlock(fuse(pending)));
            }
        }
    }
    Ok(OptimizedCircuit::new(*layout, out))
}

/// The 10-qubit, 14-gate worked example used across the tests.
#[cfg(test)]
pub(crate) fn example_raw() -> RawCircuit {
    let text = "H 0 0\nH 1 1\nRZZ 2 4 2\nRZZ 5 7 3\nH 8 4\nH 9 5\nH 3 6\nH 6 7\nRZZ 0 2 8\n\
                RZZ 4 7 9\nH 9 10\nRZZ 1 8 11\nRZZ 3 6 12\nH 5 13\n";
    crate::circuit::parse_raw(text, 10).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::serialize_optimized;

    const EXAMPLE_OPT: &str =
        "3\nH 0 0\nH 1 1\nH 3 6\n1\nSQS 3 0 1 3 4 5 7\n4\nRZZ 0 2 2\nRZZ 1 3 3\nRZZ 0 3 9\nH 1 13\n\
1\nSQS 3 0 1 3 4 6 7\n3\nH 1 7\nRZZ 1 3 12\nRZZ 0 2 8\n1\nSQS 2 0 2 6 7\n1\nCSQS 2 6 7 8 9\n1\nSQS 2 0 2 6 7\n\
1\nSQS 1 3 5\n4\nH 2 5\nH 2 10\nH 0 4\nRZZ 0 3 11\n";

    #[test]
    fn worked_example_is_reproduced_exactly() {
        let layout = LayoutParams::new(10, 2, 4);
        let opt = optimize(&example_raw(), &layout, OptimizeOptions::default()).unwrap();
        assert_eq!(serialize_optimized(&opt), EXAMPLE_OPT);
    }

    #[test]
    fn worked_example_with_fusion() {
        let layout = LayoutParams::new(10, 2, 4);
        let opts = OptimizeOptions { fusion: true, ..OptimizeOptions::default() };
        let opt = optimize(&example_raw(), &layout, opts).unwrap();
        let sizes: Vec<usize> = opt.gate_blocks().map(|b| b.len()).collect();
        assert_eq!(sizes, vec![3, 2, 2, 4]);
        let blocks: Vec<&[Gate]> = opt.gate_blocks().collect();
        assert!(blocks[1][0].is_fused() && blocks[1][0].targets.len() == 4);
        assert!(blocks[2][1].is_fused());
        assert!(blocks[3].iter().all(|g| !g.is_fused()));
    }

    #[test]
    fn rank_qubits_need_cross_rank_swaps() {
        let layout = LayoutParams::new(10, 2, 4);
        let opts = OptimizeOptions { cross_rank_swaps: false, ..OptimizeOptions::default() };
        assert_eq!(optimize(&example_raw(), &layout, opts), Err(OptimizeError::CrossRankSwapsRequired));
    }

    #[test]
    fn without_in_memory_swaps_far_gates_stand_alone() {
        let layout = LayoutParams::new(10, 0, 4);
        let opts = OptimizeOptions { in_memory_swaps: false, ..OptimizeOptions::default() };
        let opt = optimize(&example_raw(), &layout, opts).unwrap();
        assert_eq!(opt.gate_count(), 14);
        assert!(opt.instructions.iter().all(|i| i.is_gate_block()));
        for block in opt.gate_blocks() {
            assert!(block.len() == 1 || block.iter().all(|g| g.targets.iter().all(|&q| q < 4)));
        }
    }

    #[test]
    fn wrong_qubit_count() {
        let layout = LayoutParams::new(11, 2, 4);
        assert!(matches!(
            optimize(&example_raw(), &layout, OptimizeOptions::default()),
            Err(OptimizeError::QubitCount { .. })
        ));
    }
}
