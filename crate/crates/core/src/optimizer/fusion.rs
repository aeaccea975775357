//! Diagonal gate fusion inside one block.

use num_complex::Complex64;

use super::qubits::QubitSet;
use crate::circuit::Gate;

/// Merges runs of diagonal gates (`RZ`, `RZZ`, `CP`, `Dk`) into single `Dk`
/// gates whose support has at most `scope` qubits.
///
/// Gates are scanned in order with one open diagonal group. A non-diagonal
/// gate closes the group only if it shares a qubit with it; otherwise it
/// commutes with the group and is emitted ahead of it. A group closes as a
/// `Dk` when it holds at least two gates on at least two qubits, and
/// otherwise its gates are emitted unchanged.
pub fn do_fusion(block: Vec<Gate>, scope: usize) -> Vec<Gate> {
    if scope < 2 {
        return block;
    }
    let mut out = Vec::with_capacity(block.len());
    let mut group: Vec<Gate> = Vec::new();
    let mut support = QubitSet::EMPTY;
    for gate in block {
        let mask = QubitSet(gate.qubit_mask());
        if gate.kind.is_diagonal() {
            let merged = support.union(mask);
            if merged.len() <= scope {
                support = merged;
                group.push(gate);
            } else {
                flush(&mut group, support, &mut out);
                support = mask;
                group.push(gate);
            }
        } else {
            if support.intersects(mask) {
                flush(&mut group, support, &mut out);
                support = QubitSet::EMPTY;
            }
            out.push(gate);
        }
    }
    flush(&mut group, support, &mut out);
    out
}

fn flush(group: &mut Vec<Gate>, support: QubitSet, out: &mut Vec<Gate>) {
    if group.len() >= 2 && support.len() >= 2 {
        out.push(fuse(group, support));
        group.clear();
    } else {
        out.append(group);
    }
}

/// Elementwise product of the members' diagonals on `support`.
fn fuse(group: &[Gate], support: QubitSet) -> Gate {
    let targets: Vec<usize> = support.iter().collect();
    let k = targets.len();
    let diagonals: Vec<Vec<Complex64>> =
        group.iter().map(|g| g.diagonal().expect("fusion group holds diagonal gates")).collect();
    let entries = (0..1usize << k)
        .map(|e| {
            let bit_of = |q: usize| {
                let pos = targets.iter().position(|&t| t == q).expect("member qubit in support");
                (e >> (k - 1 - pos)) & 1
            };
            group.iter().zip(&diagonals).fold(Complex64::new(1.0, 0.0), |acc, (g, d)| {
                let a = g.targets.len();
                let local = g.targets.iter().enumerate().fold(0, |l, (j, &q)| l | (bit_of(q) << (a - 1 - j)));
                acc * d[local]
            })
        })
        .collect();
    Gate::fused(targets, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{GateKind, Matrix};

    fn ids(block: &[Gate]) -> Vec<String> {
        block.iter().map(|g| if g.is_fused() { g.kind.to_string() } else { g.id.to_string() }).collect()
    }

    #[test]
    fn lone_diagonal_stays_native() {
        let block = vec![Gate::with_angles(GateKind::RZ, vec![0], 0, vec![0.3])];
        assert_eq!(do_fusion(block.clone(), 4), block);
    }

    #[test]
    fn consecutive_rzz_merge_into_d2() {
        let (t1, t2) = (0.4, -1.3);
        let block = vec![
            Gate::with_angles(GateKind::RZZ, vec![0, 1], 0, vec![t1]),
            Gate::with_angles(GateKind::RZZ, vec![0, 1], 1, vec![t2]),
        ];
        let fused = do_fusion(block.clone(), 4);
        assert_eq!(fused.len(), 1);
        assert_eq!(fused[0].kind, GateKind::D(2));
        // Oracle: product of the two 4x4 matrices.
        let product = block[1].matrix().unwrap().mul(&block[0].matrix().unwrap());
        assert!(fused[0].matrix().unwrap().max_abs_diff(&product) < 1e-15);
        let s = t1 + t2;
        let expected = Matrix::diagonal(&[
            Complex64::cis(-s / 2.0),
            Complex64::cis(s / 2.0),
            Complex64::cis(s / 2.0),
            Complex64::cis(-s / 2.0),
        ]);
        assert!(fused[0].matrix().unwrap().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn overlapping_non_diagonal_is_a_barrier() {
        let block = vec![
            Gate::new(GateKind::RZZ, vec![0, 2], 2),
            Gate::new(GateKind::RZZ, vec![1, 3], 3),
            Gate::new(GateKind::RZZ, vec![0, 3], 9),
            Gate::new(GateKind::H, vec![1], 13),
        ];
        assert_eq!(ids(&do_fusion(block, 4)), vec!["D4", "13"]);
    }

    #[test]
    fn disjoint_non_diagonal_moves_ahead() {
        let block = vec![
            Gate::new(GateKind::H, vec![1], 7),
            Gate::new(GateKind::RZZ, vec![1, 3], 12),
            Gate::new(GateKind::RZZ, vec![0, 2], 8),
        ];
        assert_eq!(ids(&do_fusion(block, 4)), vec!["7", "D4"]);
    }

    #[test]
    fn scope_limit_splits_runs() {
        let block = vec![
            Gate::new(GateKind::RZZ, vec![0, 1], 0),
            Gate::new(GateKind::RZZ, vec![1, 2], 1),
            Gate::new(GateKind::RZZ, vec![2, 3], 2),
            Gate::new(GateKind::RZZ, vec![3, 0], 3),
        ];
        let fused = do_fusion(block, 3);
        assert_eq!(ids(&fused), vec!["D3", "D3"]);
        assert_eq!(fused[0].targets, vec![0, 1, 2]);
        assert_eq!(fused[1].targets, vec![0, 2, 3]);
    }

    #[test]
    fn fused_diagonal_matches_sequential_product() {
        // CP with control first: fused entries must follow the same bit order.
        let block = vec![
            Gate::with_angles(GateKind::CP, vec![2, 0], 0, vec![0.7]),
            Gate::with_angles(GateKind::RZ, vec![1], 1, vec![1.9]),
            Gate::with_angles(GateKind::RZZ, vec![1, 2], 2, vec![-0.5]),
        ];
        let fused = do_fusion(block.clone(), 3);
        assert_eq!(fused.len(), 1);
        let d = fused[0].diagonal().unwrap();
        for idx in 0..8usize {
            let mut expect = Complex64::new(1.0, 0.0);
            for g in &block {
                let gd = g.diagonal().unwrap();
                let a = g.targets.len();
                let local = g.targets.iter().enumerate().fold(0, |l, (j, &q)| l | (((idx >> q) & 1) << (a - 1 - j)));
                expect *= gd[local];
            }
            // fused targets are [0, 1, 2] with qubit 0 as the most significant bit
            let e = ((idx & 1) << 2) | (((idx >> 1) & 1) << 1) | ((idx >> 2) & 1);
            assert!((d[e] - expect).norm() < 1e-15);
        }
    }
}
