use std::collections::HashSet;

use num_complex::Complex64;
use proptest::prelude::*;
use quokka_core::oracle::bitswap_permute;
use quokka_core::sim::{bitswap, BitShift, DistState, ImsPlan, XrsPlan};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..1 << n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// Disjoint A and B of equal random size below `width`.
fn random_sets(rng: &mut ChaCha8Rng, width: usize, max: usize) -> (Vec<usize>, Vec<usize>) {
    let mut bits: Vec<usize> = (0..width).collect();
    bits.shuffle(rng);
    let k = rng.gen_range(0..=max.min(width / 2));
    (bits[..k].to_vec(), bits[k..2 * k].to_vec())
}

#[test]
fn ims_matches_reference_permutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..10_000 {
        let n = rng.gen_range(2..=9);
        let (a, b) = random_sets(&mut rng, n, 4);
        let cl = rng.gen_range(0..=n.min(3));
        let init = random_state(n, &mut rng);
        let plan = ImsPlan::new(&a, &b, n, cl).unwrap();
        let mut amps = init.clone();
        plan.apply(&mut amps, 1 + case % 3);
        assert_eq!(amps, bitswap_permute(&init, &a, &b).unwrap(), "A={a:?} B={b:?} cl={cl}");
        plan.apply(&mut amps, 1);
        assert_eq!(amps, init);
    }
}

#[test]
fn ims_ten_qubits_three_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let init = random_state(10, &mut rng);
    let (a, b) = ([1, 4, 8], [0, 5, 9]);
    let mut amps = init.clone();
    ImsPlan::new(&a, &b, 10, 2).unwrap().apply(&mut amps, 4);
    assert_eq!(amps, bitswap_permute(&init, &a, &b).unwrap());
}

#[test]
fn xrs_matches_reference_permutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let r = rng.gen_range(1..=3);
        let l = rng.gen_range(1..=6);
        let n = l + r;
        let s = rng.gen_range(1..=r.min(l));
        let mut rank_bits: Vec<usize> = (l..n).collect();
        rank_bits.shuffle(&mut rng);
        rank_bits.truncate(s);
        let local: Vec<usize> = (l - s..l).collect();
        let init = random_state(n, &mut rng);
        let expect = bitswap_permute(&init, &local, &rank_bits).unwrap();
        let mut outputs = Vec::new();
        for b in s..=l {
            let plan = XrsPlan::new(&local, &rank_bits, l, n, b).unwrap();
            let mut state = DistState::from_dense(&init, r).unwrap();
            plan.apply(&mut state.ranks);
            outputs.push(state.to_dense());
            plan.apply(&mut state.ranks);
            assert_eq!(state.to_dense(), init);
        }
        assert!(outputs.iter().all(|o| *o == expect), "L={l} R={r} bits={rank_bits:?}");
    }
}

#[test]
fn xrs_rejects_small_buffer() {
    assert!(XrsPlan::new(&[2, 3], &[4, 5], 4, 6, 1).is_err());
}

#[test]
fn bitshift_is_a_bijection_on_twelve_bits() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let (a, b) = random_sets(&mut rng, 12, 6);
        let cl = rng.gen_range(0..=6);
        let mut a = a;
        let mut b = b;
        a.sort_unstable();
        b.sort_unstable();
        let shift = BitShift::new(&a, &b, cl);
        let image: HashSet<usize> = (0..1usize << 12).map(|t| shift.apply(t)).collect();
        assert_eq!(image.len(), 1 << 12);
        assert!(image.iter().all(|&m| m < 1 << 12));
    }
}

/// Runs of `2^CL` consecutive thread indices visit one aligned cache line,
/// and the partner indices of a run of `2^|needed|` threads cover whole
/// cache lines too.
#[test]
fn swap_threads_visit_whole_cache_lines() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let (mut a, mut b) = random_sets(&mut rng, 12, 5);
        a.sort_unstable();
        b.sort_unstable();
        let cl = rng.gen_range(1..=4);
        let shift = BitShift::new(&a, &b, cl);
        let line = 1usize << cl;
        for run in (0..1usize << 12).step_by(line) {
            let lines: HashSet<usize> = (run..run + line).map(|t| shift.apply(t) >> cl).collect();
            assert_eq!(lines.len(), 1);
        }
        let mut needed: usize = line - 1;
        for (&x, &y) in a.iter().zip(&b) {
            if x < cl || y < cl {
                needed |= (1 << x) | (1 << y);
            }
        }
        let block = 1usize << needed.count_ones();
        for run in (0..1usize << 12).step_by(block) {
            let mut per_line = std::collections::HashMap::<usize, usize>::new();
            for t in run..run + block {
                *per_line.entry(bitswap(shift.apply(t), &a, &b) >> cl).or_default() += 1;
            }
            assert!(per_line.values().all(|&c| c == line), "A={a:?} B={b:?} cl={cl}");
        }
    }
}

proptest! {
    #[test]
    fn bitswap_is_an_involution(i in 0usize..1 << 16, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut a, mut b) = random_sets(&mut rng, 16, 8);
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(bitswap(bitswap(i, &a, &b), &a, &b), i);
    }
}
