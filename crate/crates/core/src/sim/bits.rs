//! Index bit permutations used by the swap kernels.

/// Exchanges bit `a[k]` with bit `b[k]` of `i` for every `k`.
///
/// Callers pass both lists sorted, which gives the sorted-to-sorted pairing.
#[inline]
pub fn bitswap(i: usize, a: &[usize], b: &[usize]) -> usize {
    let mut out = i;
    for (&x, &y) in a.iter().zip(b) {
        if ((i >> x) ^ (i >> y)) & 1 == 1 {
            out ^= (1 << x) | (1 << y);
        }
    }
    out
}

/// Checks that `a` and `b` have equal length, hold distinct positions below
/// `width`, and do not overlap.
pub fn check_swap_sets(a: &[usize], b: &[usize], width: usize) -> Result<(), String> {
    if a.len() != b.len() {
        return Err(format!("swap sets differ in size: {} vs {}", a.len(), b.len()));
    }
    let mut seen = 0u128;
    for &p in a.iter().chain(b) {
        if p >= width {
            return Err(format!("bit {p} out of range (width {width})"));
        }
        if seen >> p & 1 == 1 {
            return Err(format!("bit {p} appears twice"));
        }
        seen |= 1 << p;
    }
    Ok(())
}

/// Thread-index remapping for the in-memory swap.
///
/// `needed` is the cache-line range `[0, cl)` plus the partner of every
/// swapped bit that falls inside it. The lowest `|needed|` bits of the thread
/// index are routed onto exactly those positions, so a block of
/// `2^|needed|` consecutive threads covers whole cache lines on both sides
/// of every swapped pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitShift {
    from: Vec<usize>,
    to: Vec<usize>,
    swap: PairSwap,
}

impl BitShift {
    pub fn new(a: &[usize], b: &[usize], cl: usize) -> BitShift {
        let mut needed: u64 = if cl >= 64 { u64::MAX } else { (1u64 << cl) - 1 };
        for (&x, &y) in a.iter().zip(b) {
            if x < cl || y < cl {
                needed |= (1 << x) | (1 << y);
            }
        }
        let k = needed.count_ones();
        let window = if k >= 64 { u64::MAX } else { (1u64 << k) - 1 };
        let positions = |m: u64| (0..64).filter(move |p| m >> p & 1 == 1).collect::<Vec<usize>>();
        let (from, to) = (positions(window & !needed), positions(needed & !window));
        let swap = PairSwap::new(&from, &to);
        BitShift { from, to, swap }
    }

    #[inline]
    pub fn apply(&self, t: usize) -> usize {
        self.swap.apply(t)
    }

    pub fn is_identity(&self) -> bool {
        self.from.is_empty()
    }
}

/// [`bitswap`] with fixed pairs, as one masked delta swap per distinct
/// distance between paired bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSwap {
    steps: Vec<(u32, usize)>,
}

impl PairSwap {
    /// Pairs `a[k]` with `b[k]`; the pairs must be disjoint.
    pub fn new(a: &[usize], b: &[usize]) -> PairSwap {
        let mut steps: Vec<(u32, usize)> = Vec::new();
        for (&x, &y) in a.iter().zip(b) {
            let (lo, hi) = (x.min(y), x.max(y));
            let d = (hi - lo) as u32;
            match steps.iter_mut().find(|s| s.0 == d) {
                Some(s) => s.1 |= 1 << lo,
                None => steps.push((d, 1 << lo)),
            }
        }
        PairSwap { steps }
    }

    #[inline]
    pub fn apply(&self, mut i: usize) -> usize {
        for &(d, mask) in &self.steps {
            let t = ((i >> d) ^ i) & mask;
            i ^= t | (t << d);
        }
        i
    }

    pub fn is_identity(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Inserts a zero bit at each of `sorted` (ascending) into `w`.
#[inline]
pub fn insert_zeros(mut w: usize, sorted: &[usize]) -> usize {
    for &p in sorted {
        let low = w & ((1 << p) - 1);
        w = ((w >> p) << (p + 1)) | low;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitswap_examples() {
        assert_eq!(bitswap(0b10000, &[0], &[4]), 0b00001);
        assert_eq!(bitswap(0b1011, &[], &[]), 0b1011);
        assert_eq!(bitswap(0b0110, &[1], &[2]), 0b0110);
    }

    #[test]
    fn bitshift_identity_away_from_cache_line() {
        let s = BitShift::new(&[4, 5], &[7, 9], 2);
        assert!(s.is_identity());
        assert!((0..1 << 10).all(|t| s.apply(t) == t));
    }

    #[test]
    fn bitshift_worked_configuration() {
        let (a, b) = ([0, 2, 3, 4, 5], [6, 7, 9, 10, 11]);
        let s = BitShift::new(&a, &b, 6);
        assert_eq!((s.from.as_slice(), s.to.as_slice()), ([8].as_slice(), [11].as_slice()));
        // Every bit of m and n inside the cache line comes from the low
        // thread bits t0..t10 only.
        for t in 0..1usize << 12 {
            let m = s.apply(t);
            let n = bitswap(m, &a, &b);
            let hi = t & !0x7ff;
            let m2 = s.apply((t & 0x7ff) | (hi ^ 0x800));
            assert_eq!(m & 0x3f, m2 & 0x3f);
            assert_eq!(n & 0x3f, bitswap(m2, &a, &b) & 0x3f);
        }
    }

    #[test]
    fn insert_zeros_skips_positions() {
        assert_eq!(insert_zeros(0b11, &[1]), 0b101);
        assert_eq!(insert_zeros(0b111, &[0, 2]), 0b11010);
    }

    #[test]
    fn swap_set_checks() {
        assert!(check_swap_sets(&[0], &[1], 2).is_ok());
        assert!(check_swap_sets(&[0], &[0], 2).is_err());
        assert!(check_swap_sets(&[0], &[2], 2).is_err());
        assert!(check_swap_sets(&[0, 1], &[2], 3).is_err());
    }

    #[test]
    fn pair_swap_matches_bitswap() {
        let (a, b) = ([0, 3, 5, 9], [4, 1, 7, 2]);
        let p = PairSwap::new(&a, &b);
        assert!((0..1 << 10).all(|i| p.apply(i) == bitswap(i, &a, &b)));
        assert!(PairSwap::new(&[], &[]).is_identity());
    }
}
