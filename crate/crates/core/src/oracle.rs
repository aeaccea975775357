//! Reference implementations: a dense gate-by-gate simulator, a direct bit
//! permutation, and the circuit-order validator.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{Gate, GateError, Instruction, OptimizedCircuit, QubitPermutation, RawCircuit};

/// Largest register the dense oracle accepts.
pub const ORACLE_MAX_QUBITS: usize = 26;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("oracle supports at most {ORACLE_MAX_QUBITS} qubits, got {0}")]
    TooLarge(usize),
    #[error("gate {id}: {source}")]
    Gate { id: usize, source: GateError },
    #[error("bit positions overlap or are out of range")]
    BadSwapSets,
}

/// Full matrix of every gate, applied in list order from `|0...0>`.
pub fn oracle_simulate(raw: &RawCircuit) -> Result<Vec<Complex64>, OracleError> {
    let n = raw.num_qubits;
    if n > ORACLE_MAX_QUBITS {
        return Err(OracleError::TooLarge(n));
    }
    let mut state = vec![Complex64::new(0.0, 0.0); 1 << n];
    state[0] = Complex64::new(1.0, 0.0);
    for g in &raw.gates {
        apply_dense(&mut state, g).map_err(|source| OracleError::Gate { id: g.id, source })?;
    }
    Ok(state)
}

/// `new[i] = sum_c M[r(i)][c] * old[i with target bits replaced by c]`.
pub fn apply_dense(state: &mut [Complex64], gate: &Gate) -> Result<(), GateError> {
    let m = gate.matrix()?;
    let k = gate.targets.len();
    let old = state.to_vec();
    let place = |i: usize, local: usize| {
        gate.targets.iter().enumerate().fold(i, |acc, (j, &q)| {
            let bit = (local >> (k - 1 - j)) & 1;
            (acc & !(1 << q)) | (bit << q)
        })
    };
    for (i, out) in state.iter_mut().enumerate() {
        let row = gate.targets.iter().enumerate().fold(0, |acc, (j, &q)| acc | ((i >> q) & 1) << (k - 1 - j));
        *out = (0..1 << k).map(|col| m.get(row, col) * old[place(i, col)]).sum();
    }
    Ok(())
}

/// `new[i] = old[i']` where `i'` is `i` with bit `sorted(a)[k]` exchanged
/// with bit `sorted(b)[k]`.
pub fn bitswap_permute(state: &[Complex64], a: &[usize], b: &[usize]) -> Result<Vec<Complex64>, OracleError> {
    let n = state.len().trailing_zeros() as usize;
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
    all.sort_unstable();
    all.dedup();
    if a.len() != b.len() || all.len() != 2 * a.len() || all.iter().any(|&p| p >= n) {
        return Err(OracleError::BadSwapSets);
    }
    Ok((0..state.len())
        .map(|i| {
            let src = a.iter().zip(&b).fold(i, |acc, (&x, &y)| {
                let (bx, by) = ((i >> x) & 1, (i >> y) & 1);
                (acc & !(1 << x) & !(1 << y)) | (by << x) | (bx << y)
            });
            state[src]
        })
        .collect())
}

/// Rewrites every gate of `opt` to logical qubits by replaying the swaps,
/// flattens the blocks and sorts by id. Symmetric gates list their targets
/// ascending. Fused gates carry no id and are left out.
pub fn restore_order(opt: &OptimizedCircuit) -> RawCircuit {
    let mut gates = logical_stream(opt);
    for g in gates.iter_mut().filter(|g| g.kind.is_symmetric()) {
        g.targets.sort_unstable();
    }
    gates.sort_by_key(|g| g.id);
    RawCircuit { num_qubits: opt.layout.total_qubits, gates }
}

/// Non-fused gates of `opt` on logical qubits, in execution order.
fn logical_stream(opt: &OptimizedCircuit) -> Vec<Gate> {
    let mut perm = QubitPermutation::identity(opt.layout.total_qubits);
    let mut out = Vec::new();
    for ins in &opt.instructions {
        match ins {
            Instruction::GateBlock(gates) => {
                out.extend(gates.iter().filter(|g| !g.is_fused()).map(|g| g.remapped(|p| perm.logical(p))));
            }
            Instruction::InMemSwap { out_set, in_set } => perm.swap_positions(out_set, in_set),
            Instruction::CrossRankSwap { local_set, rank_set } => perm.swap_positions(local_set, rank_set),
        }
    }
    out
}

/// Outcome of [`validate_order`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validation {
    Passed,
    Failed(Vec<String>),
}

impl Validation {
    pub fn passed(&self) -> bool {
        matches!(self, Validation::Passed)
    }
}

impl fmt::Display for Validation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Validation::Passed => write!(f, "Passed all circuit order validations"),
            Validation::Failed(issues) => {
                writeln!(f, "Circuit order validation failed ({} issues)", issues.len())?;
                for issue in issues {
                    writeln!(f, "  {issue}")?;
                }
                Ok(())
            }
        }
    }
}

fn key(g: &Gate) -> (String, Vec<usize>) {
    let mut t = g.targets.clone();
    if g.kind.is_symmetric() {
        t.sort_unstable();
    }
    (g.kind.to_string(), t)
}

/// Checks that `opt` holds exactly the gates of `raw` on the same logical
/// qubits, and that on every logical qubit the gate ids increase along the
/// execution order.
pub fn validate_order(raw: &RawCircuit, opt: &OptimizedCircuit) -> Validation {
    let mut issues = Vec::new();
    if raw.num_qubits != opt.layout.total_qubits {
        issues.push(format!("qubit count differs: raw {} vs optimized {}", raw.num_qubits, opt.layout.total_qubits));
        return Validation::Failed(issues);
    }
    let stream = logical_stream(opt);

    let mut seen: BTreeMap<usize, &Gate> = BTreeMap::new();
    for g in &stream {
        if seen.insert(g.id, g).is_some() {
            issues.push(format!("gate id {} appears more than once", g.id));
        }
    }
    for g in &raw.gates {
        match seen.get(&g.id) {
            None => issues.push(format!("gate id {} ({}) is missing", g.id, g.kind)),
            Some(o) if key(o) != key(g) => issues.push(format!(
                "gate id {}: expected {} {:?}, found {} {:?} after restoring qubits",
                g.id,
                g.kind,
                key(g).1,
                o.kind,
                key(o).1
            )),
            _ => {}
        }
    }
    let known: std::collections::HashSet<usize> = raw.gates.iter().map(|g| g.id).collect();
    for id in seen.keys().filter(|id| !known.contains(id)) {
        issues.push(format!("gate id {id} is not in the raw circuit"));
    }

    let mut last: Vec<Option<usize>> = vec![None; raw.num_qubits];
    for g in &stream {
        for &q in &g.targets {
            if let Some(prev) = last[q] {
                if prev > g.id {
                    issues.push(format!("qubit {q}: gate id {} runs after gate id {prev}", g.id));
                }
            }
            last[q] = Some(last[q].map_or(g.id, |p| p.max(g.id)));
        }
    }

    if issues.is_empty() {
        Validation::Passed
    } else {
        Validation::Failed(issues)
    }
}
