//! Gate-block finding: dependency sweep, greedy chunk selection and block
//! extraction.

use std::collections::{HashMap, HashSet};

use super::qubits::QubitSet;
use super::OptimizeError;
use crate::circuit::Gate;

/// For each gate of `gates`, the qubits that must be chunk-resident for it
/// to run now: its own targets plus, transitively, those of every earlier
/// gate in the list that shares a qubit with it.
pub fn update_dependency(gates: &[Gate]) -> Vec<QubitSet> {
    let mut pending = [QubitSet::EMPTY; 64];
    gates
        .iter()
        .map(|g| {
            let dep = g.targets.iter().fold(QubitSet(g.qubit_mask()), |acc, &q| acc.union(pending[q]));
            for &q in &g.targets {
                pending[q] = dep;
            }
            dep
        })
        .collect()
}

/// A chunk set together with the order in which it was grown. Gates are
/// extracted stage by stage, so the block lists them in the order they
/// became executable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChunkSelection {
    pub stages: Vec<QubitSet>,
}

impl ChunkSelection {
    pub fn fixed(set: QubitSet) -> ChunkSelection {
        ChunkSelection { stages: vec![set] }
    }

    pub fn chunk_set(&self) -> QubitSet {
        self.stages.last().copied().unwrap_or(QubitSet::EMPTY)
    }
}

/// Greedily grows a chunk set of at most `chunk_size` qubits.
///
/// Every step merges the dependency set of one remaining gate into the
/// current set, picking the merge that makes the most gates executable
/// (a gate is executable when its dependency set is inside the chunk set).
/// Ties go to the smaller resulting set, then to the lexicographically
/// lowest qubit list. Growth stops when no merge fits.
pub fn find_max_gate(deps: &[QubitSet], chunk_size: usize) -> Result<ChunkSelection, OptimizeError> {
    let Some(&earliest) = deps.first() else {
        return Ok(ChunkSelection { stages: Vec::new() });
    };
    if earliest.len() > chunk_size {
        return Err(OptimizeError::GateWiderThanChunk { width: earliest.len(), chunk: chunk_size });
    }

    let mut counts: HashMap<QubitSet, usize> = HashMap::new();
    for &d in deps.iter().filter(|d| d.len() <= chunk_size) {
        *counts.entry(d).or_default() += 1;
    }
    let mut candidates: Vec<(QubitSet, usize)> = counts.into_iter().collect();
    candidates.sort_unstable_by_key(|(set, _)| set.0);

    let mut current = QubitSet::EMPTY;
    let mut stages = Vec::new();
    loop {
        let mut seen = HashSet::new();
        let mut best: Option<(QubitSet, usize)> = None;
        for &(set, _) in &candidates {
            if set.is_subset(current) {
                continue;
            }
            let merged = current.union(set);
            if merged.len() > chunk_size || !seen.insert(merged) {
                continue;
            }
            let score: usize = candidates.iter().filter(|(c, _)| c.is_subset(merged)).map(|(_, n)| n).sum();
            let better = match best {
                None => true,
                Some((b, s)) => {
                    score > s
                        || (score == s && merged.len() < b.len())
                        || (score == s && merged.len() == b.len() && merged.lex_less(b))
                }
            };
            if better {
                best = Some((merged, score));
            }
        }
        match best {
            Some((merged, _)) => {
                current = merged;
                stages.push(merged);
            }
            None => break,
        }
    }
    Ok(ChunkSelection { stages })
}

/// Removes from `gates` every gate executable inside `selection` and returns
/// them, stage by stage and in list order within a stage.
///
/// `deps` must be [`update_dependency`] of `gates`.
pub fn setup_gb(gates: &mut Vec<Gate>, deps: &[QubitSet], selection: &ChunkSelection) -> Vec<Gate> {
    debug_assert_eq!(gates.len(), deps.len());
    let mut taken = vec![false; gates.len()];
    let mut order = Vec::new();
    for &stage in &selection.stages {
        for (i, dep) in deps.iter().enumerate() {
            if !taken[i] && dep.is_subset(stage) {
                taken[i] = true;
                order.push(i);
            }
        }
    }
    let block = order.iter().map(|&i| gates[i].clone()).collect();
    let mut flags = taken.into_iter();
    gates.retain(|_| !flags.next().unwrap_or(false));
    block
}

/// A block of gates on logical qubits and the chunk set it was cut for.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalBlock {
    pub chunk_set: QubitSet,
    pub gates: Vec<Gate>,
}

/// Partitions `gates` into blocks that each fit a chunk of `chunk_size`
/// qubits.
///
/// The first block takes whatever runs inside the identity set
/// `{0, ..., chunk_size - 1}`; an empty first block is dropped. After that
/// each block comes from [`find_max_gate`]. Every gate lands in exactly one
/// block and the concatenation of blocks respects every per-qubit order.
pub fn find_gbs(gates: Vec<Gate>, chunk_size: usize) -> Result<Vec<LogicalBlock>, OptimizeError> {
    let mut list = gates;
    let mut blocks = Vec::new();

    let deps = update_dependency(&list);
    let initial = ChunkSelection::fixed(QubitSet::first(chunk_size));
    let before = list.clone();
    let first = setup_gb(&mut list, &deps, &initial);
    if !first.is_empty() {
        // Chunk set of the first block: only the qubits its gates need.
        let chunk_set = before
            .iter()
            .zip(&deps)
            .filter(|(_, d)| d.is_subset(initial.chunk_set()))
            .fold(QubitSet::EMPTY, |acc, (_, d)| acc.union(*d));
        blocks.push(LogicalBlock { chunk_set, gates: first });
    }

    while !list.is_empty() {
        let deps = update_dependency(&list);
        let selection = find_max_gate(&deps, chunk_size)?;
        let block = setup_gb(&mut list, &deps, &selection);
        if block.is_empty() {
            return Err(OptimizeError::Stalled { remaining: list.len() });
        }
        blocks.push(LogicalBlock { chunk_set: selection.chunk_set(), gates: block });
    }
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_raw, GateKind};
    use crate::optimizer::example_raw;

    fn set(qs: &[usize]) -> QubitSet {
        qs.iter().copied().collect()
    }

    #[test]
    fn dependency_examples() {
        let g = vec![Gate::new(GateKind::H, vec![0], 0)];
        assert_eq!(update_dependency(&g), vec![set(&[0])]);
        let g = vec![Gate::new(GateKind::CX, vec![0, 1], 0), Gate::new(GateKind::H, vec![2], 1)];
        assert_eq!(update_dependency(&g)[1], set(&[2]));
        let raw = example_raw();
        let deps = update_dependency(&raw.gates);
        assert_eq!(deps[8], set(&[0, 2, 4]));
    }

    /// Brute force: the best number of executable gates over all chunk sets
    /// of the given size.
    fn best_by_enumeration(deps: &[QubitSet], n: usize, size: usize) -> usize {
        (0u64..1 << n)
            .filter(|m| m.count_ones() as usize == size)
            .map(|m| deps.iter().filter(|d| d.is_subset(QubitSet(m))).count())
            .max()
            .unwrap()
    }

    #[test]
    fn independent_pairs_fill_the_chunk() {
        let raw = parse_raw("RZZ 0 1 0\nRZZ 2 3 1\n", 4).unwrap();
        let deps = update_dependency(&raw.gates);
        let sel = find_max_gate(&deps, 4).unwrap();
        assert_eq!(sel.chunk_set(), set(&[0, 1, 2, 3]));
        let executable = deps.iter().filter(|d| d.is_subset(sel.chunk_set())).count();
        assert_eq!(executable, best_by_enumeration(&deps, 4, 4));
        assert_eq!(executable, 2);
    }

    #[test]
    fn single_gate_selection() {
        let g = vec![Gate::new(GateKind::H, vec![7], 0)];
        let sel = find_max_gate(&update_dependency(&g), 4).unwrap();
        assert_eq!(sel.chunk_set(), set(&[7]));
    }

    #[test]
    fn too_wide_gate_is_an_error() {
        let g = vec![Gate::new(GateKind::CX, vec![0, 1], 0)];
        assert!(matches!(
            find_max_gate(&update_dependency(&g), 1),
            Err(OptimizeError::GateWiderThanChunk { width: 2, chunk: 1 })
        ));
    }

    #[test]
    fn initial_block_of_worked_example() {
        let mut gates = example_raw().gates;
        let deps = update_dependency(&gates);
        let block = setup_gb(&mut gates, &deps, &ChunkSelection::fixed(QubitSet::first(4)));
        assert_eq!(block.iter().map(|g| g.id).collect::<Vec<_>>(), vec![0, 1, 6]);
        assert_eq!(gates.len(), 11);
    }

    #[test]
    fn second_block_of_worked_example() {
        let mut gates: Vec<Gate> =
            example_raw().gates.into_iter().filter(|g| ![0, 1, 6, 4, 5, 10, 11].contains(&g.id)).collect();
        let deps = update_dependency(&gates);
        let sel = find_max_gate(&deps, 4).unwrap();
        assert_eq!(sel.chunk_set(), set(&[2, 4, 5, 7]));
        let block = setup_gb(&mut gates, &deps, &sel);
        assert_eq!(block.iter().map(|g| g.id).collect::<Vec<_>>(), vec![2, 3, 9, 13]);
    }

    #[test]
    fn empty_list_gives_empty_block() {
        let mut gates = Vec::new();
        assert!(setup_gb(&mut gates, &[], &ChunkSelection::fixed(QubitSet::first(4))).is_empty());
    }

    #[test]
    fn everything_fits_in_one_block() {
        let raw = parse_raw("H 0 0\nCX 0 1 1\nRZZ 1 2 2\nH 2 3\n", 3).unwrap();
        let blocks = find_gbs(raw.gates, 3).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].gates.len(), 4);
    }

    #[test]
    fn worked_example_level_two_blocks() {
        let gates: Vec<Gate> = example_raw().gates.into_iter().filter(|g| ![4, 5, 10, 11].contains(&g.id)).collect();
        let blocks = find_gbs(gates, 4).unwrap();
        let ids: Vec<Vec<usize>> = blocks.iter().map(|b| b.gates.iter().map(|g| g.id).collect()).collect();
        assert_eq!(ids, vec![vec![0, 1, 6], vec![2, 3, 9, 13], vec![7, 12, 8]]);
    }
}
