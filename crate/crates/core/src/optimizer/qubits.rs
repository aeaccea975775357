use std::fmt;

/// A set of qubit indices below 64, stored as a bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct QubitSet(pub u64);

impl QubitSet {
    pub const EMPTY: QubitSet = QubitSet(0);

    /// `{0, 1, ..., n - 1}`
    pub fn first(n: usize) -> QubitSet {
        if n >= 64 {
            QubitSet(u64::MAX)
        } else {
            QubitSet((1u64 << n) - 1)
        }
    }

    pub fn single(q: usize) -> QubitSet {
        QubitSet(1 << q)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, q: usize) -> bool {
        (self.0 >> q) & 1 == 1
    }

    pub fn union(self, other: QubitSet) -> QubitSet {
        QubitSet(self.0 | other.0)
    }

    pub fn intersects(self, other: QubitSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn difference(self, other: QubitSet) -> QubitSet {
        QubitSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: QubitSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn insert(&mut self, q: usize) {
        self.0 |= 1 << q;
    }

    /// Ascending iteration.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let q = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(q)
        })
    }

    /// Orders equal-size sets by their sorted element lists.
    pub fn lex_less(self, other: QubitSet) -> bool {
        let diff = self.0 ^ other.0;
        diff != 0 && self.0 & (diff & diff.wrapping_neg()) != 0
    }
}

impl FromIterator<usize> for QubitSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> QubitSet {
        let mut s = QubitSet::EMPTY;
        for q in iter {
            s.insert(q);
        }
        s
    }
}

impl fmt::Debug for QubitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
