use std::time::{Duration, Instant};

use proptest::prelude::*;
use quokka_core::circuit::{parse_raw, serialize_optimized, serialize_raw};
use quokka_core::gen::{gen_qft, gen_random, BenchSpec, Family};
use quokka_core::optimizer::{optimize, OptimizeOptions};
use quokka_core::oracle::{restore_order, validate_order};
use quokka_core::{Instruction, LayoutParams};

const EXAMPLE_RAW: &str = include_str!("data/example_raw.txt");
const EXAMPLE_OPT: &str = include_str!("data/example_opt.txt");

#[test]
fn worked_example_round_trip() {
    let raw = parse_raw(EXAMPLE_RAW, 10).unwrap();
    let opt = optimize(&raw, &LayoutParams::new(10, 2, 4), OptimizeOptions::default()).unwrap();
    assert_eq!(serialize_optimized(&opt), EXAMPLE_OPT);
    assert_eq!(serialize_raw(&restore_order(&opt)), EXAMPLE_RAW);
    assert_eq!(validate_order(&raw, &opt).to_string(), "Passed all circuit order validations");
}

#[test]
fn qft31_block_count() {
    let raw = gen_qft(31).unwrap();
    let opt = optimize(&raw, &LayoutParams::new(31, 0, 10), OptimizeOptions::default()).unwrap();
    assert!(opt.block_count() <= 24, "{} blocks", opt.block_count());
    assert!(opt.instructions.iter().all(|i| !matches!(i, Instruction::CrossRankSwap { .. })));
}

#[test]
fn table_circuits_at_31_qubits_optimize_fast() {
    for family in Family::circuit_suite() {
        let raw = BenchSpec::new(family.clone(), 31, 7).generate().unwrap();
        for r in [0, 3] {
            let start = Instant::now();
            let opt = optimize(&raw, &LayoutParams::new(31, r, 10), OptimizeOptions::default()).unwrap();
            assert!(start.elapsed() < Duration::from_secs(1), "{family} R={r}: {:?}", start.elapsed());
            assert!(validate_order(&raw, &opt).passed(), "{family} R={r}");
        }
    }
}

#[test]
fn table_circuits_at_20_qubits_validate() {
    for family in Family::circuit_suite() {
        let raw = BenchSpec::new(family.clone(), 20, 11).generate().unwrap();
        for (r, c) in [(0, 8), (2, 6), (4, 10)] {
            let opt = optimize(&raw, &LayoutParams::new(20, r, c), OptimizeOptions::default()).unwrap();
            assert!(validate_order(&raw, &opt).passed(), "{family} R={r} C={c}");
            assert_eq!(restore_order(&opt), raw);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn optimized_circuits_keep_every_gate_in_order(
        n in 4usize..=10,
        gates in 1usize..=200,
        seed in any::<u64>(),
        r in 0usize..=2,
        c in 2usize..=4,
        ims in any::<bool>(),
    ) {
        prop_assume!(r + c <= n);
        let raw = gen_random(n, gates, seed).unwrap();
        let layout = LayoutParams::new(n, r, c);
        let opts = OptimizeOptions { in_memory_swaps: ims, cross_rank_swaps: true, fusion: false };
        let opt = optimize(&raw, &layout, opts).unwrap();
        prop_assert!(validate_order(&raw, &opt).passed());
        prop_assert_eq!(restore_order(&opt), raw);
        for block in opt.gate_blocks() {
            let inside = block.iter().all(|g| g.targets.iter().all(|&q| q < c));
            prop_assert!(inside || (!ims && block.len() == 1));
        }
        for ins in &opt.instructions {
            if let Instruction::CrossRankSwap { local_set, .. } = ins {
                let top: Vec<usize> = (n - r - local_set.len()..n - r).collect();
                prop_assert_eq!(local_set, &top);
            }
        }
    }

    #[test]
    fn fusion_only_replaces_diagonal_gates(n in 4usize..=8, gates in 1usize..=120, seed in any::<u64>()) {
        let raw = gen_random(n, gates, seed).unwrap();
        let layout = LayoutParams::new(n, 0, 3);
        let opts = OptimizeOptions { fusion: true, ..OptimizeOptions::default() };
        let opt = optimize(&raw, &layout, opts).unwrap();
        let restored = restore_order(&opt);
        let kept: Vec<usize> = restored.gates.iter().map(|g| g.id).collect();
        for g in &raw.gates {
            if !g.kind.is_diagonal() {
                prop_assert!(kept.contains(&g.id));
            }
        }
        for block in opt.gate_blocks() {
            for g in block.iter().filter(|g| g.is_fused()) {
                prop_assert!(g.targets.len() >= 2 && g.targets.len() <= 3);
            }
        }
    }
}
