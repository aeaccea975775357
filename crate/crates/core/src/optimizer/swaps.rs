//! Swap insertion between consecutive blocks.

use super::qubits::QubitSet;
use super::OptimizeError;
use crate::circuit::{Instruction, LayoutParams, QubitPermutation};

/// Which boundary a swap crosses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwapLevel {
    /// Level 1: bring rank qubits into the local index range (`SQS`/`CSQS`/`SQS`).
    Rank,
    /// Level 2: bring local qubits into the chunk (`SQS`).
    Chunk,
}

/// Physical slots below `region` to vacate and the physical positions (at or
/// above `region`) of the qubits that must come in, both ascending.
///
/// Evicted qubits are the residents outside `chunk_set`, lowest logical
/// index first.
fn plan_exchange(
    chunk_set: QubitSet,
    perm: &QubitPermutation,
    region: usize,
) -> Result<(Vec<usize>, Vec<usize>), OptimizeError> {
    if chunk_set.len() > region {
        return Err(OptimizeError::ChunkSetTooLarge { size: chunk_set.len(), region });
    }
    let mut incoming: Vec<usize> = chunk_set.iter().map(|q| perm.physical(q)).filter(|&p| p >= region).collect();
    incoming.sort_unstable();

    let mut evictable: Vec<usize> = (0..region).map(|p| perm.logical(p)).filter(|&q| !chunk_set.contains(q)).collect();
    evictable.sort_unstable();
    let mut slots: Vec<usize> = evictable.iter().take(incoming.len()).map(|&q| perm.physical(q)).collect();
    slots.sort_unstable();
    Ok((slots, incoming))
}

/// Emits the swaps that make every qubit of `chunk_set` resident at `level`
/// and applies them to `perm`. Nothing is emitted when they already are.
///
/// At [`SwapLevel::Rank`] the vacated local slots are first moved to the
/// top-of-local positions `[N-R-S, N-R)`, exchanged with the rank bits in
/// one `CSQS`, and the first `SQS` is repeated so the incoming qubits land
/// in the vacated slots.
pub fn insert_qubit_swaps(
    chunk_set: QubitSet,
    perm: &mut QubitPermutation,
    layout: &LayoutParams,
    level: SwapLevel,
) -> Result<Vec<Instruction>, OptimizeError> {
    let region = match level {
        SwapLevel::Chunk => layout.chunk_qubits,
        SwapLevel::Rank => layout.local_qubits(),
    };
    let (slots, incoming) = plan_exchange(chunk_set, perm, region)?;
    if incoming.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    match level {
        SwapLevel::Chunk => {
            perm.swap_positions(&slots, &incoming);
            out.push(Instruction::InMemSwap { out_set: slots, in_set: incoming });
        }
        SwapLevel::Rank => {
            let local = layout.local_qubits();
            let top: Vec<usize> = (local - slots.len()..local).collect();
            let staged: Vec<usize> = slots.iter().copied().filter(|p| !top.contains(p)).collect();
            let parked: Vec<usize> = top.iter().copied().filter(|p| !slots.contains(p)).collect();
            let stage = Instruction::InMemSwap { out_set: staged.clone(), in_set: parked.clone() };
            if !staged.is_empty() {
                perm.swap_positions(&staged, &parked);
                out.push(stage.clone());
            }
            perm.swap_positions(&top, &incoming);
            out.push(Instruction::CrossRankSwap { local_set: top, rank_set: incoming });
            if !staged.is_empty() {
                perm.swap_positions(&staged, &parked);
                out.push(stage);
            }
        }
    }
    Ok(out)
}
