use std::fmt;

use super::error::LayoutError;

/// Default cache-line width on CPUs: 64-byte lines hold four `Complex64`.
pub const DEFAULT_CACHE_LINE_QUBITS: usize = 2;

/// Partitioning constants of an `N`-qubit state vector.
///
/// The `R` most significant index bits select the rank, the lowest `C` bits
/// of a rank-local index address an amplitude inside a chunk and the lowest
/// `CL` bits one inside a cache line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayoutParams {
    /// `N`
    pub total_qubits: usize,
    /// `R`, there are `2^R` ranks
    pub rank_qubits: usize,
    /// `C`, a chunk holds `2^C` amplitudes
    pub chunk_qubits: usize,
    /// `CL`
    pub cache_line_qubits: usize,
    /// `F`, widest fused diagonal
    pub fusion_qubits: usize,
    /// `B`, an exchange buffer holds `2^B` amplitudes
    pub buffer_qubits: usize,
}

impl LayoutParams {
    /// A layout with `CL = min(2, C)`, `F = C` and `B = N - R`.
    pub fn new(total_qubits: usize, rank_qubits: usize, chunk_qubits: usize) -> LayoutParams {
        LayoutParams {
            total_qubits,
            rank_qubits,
            chunk_qubits,
            cache_line_qubits: DEFAULT_CACHE_LINE_QUBITS.min(chunk_qubits),
            fusion_qubits: chunk_qubits,
            buffer_qubits: total_qubits.saturating_sub(rank_qubits),
        }
    }

    pub fn with_cache_line(mut self, cl: usize) -> LayoutParams {
        self.cache_line_qubits = cl;
        self
    }

    pub fn with_fusion(mut self, f: usize) -> LayoutParams {
        self.fusion_qubits = f;
        self
    }

    pub fn with_buffer(mut self, b: usize) -> LayoutParams {
        self.buffer_qubits = b;
        self
    }

    /// `N - R`, the index width inside one rank.
    pub fn local_qubits(&self) -> usize {
        self.total_qubits - self.rank_qubits
    }

    pub fn ranks(&self) -> usize {
        1 << self.rank_qubits
    }

    pub fn local_len(&self) -> usize {
        1 << self.local_qubits()
    }

    pub fn validate(&self) -> Result<(), LayoutError> {
        let LayoutParams {
            total_qubits: n,
            rank_qubits: r,
            chunk_qubits: c,
            cache_line_qubits: cl,
            fusion_qubits: f,
            buffer_qubits: b,
        } = *self;
        if n == 0 || n > 63 {
            return Err(LayoutError::invalid("1 <= N <= 63", format!("N = {n}")));
        }
        if r > n {
            return Err(LayoutError::invalid("R <= N", format!("R = {r}, N = {n}")));
        }
        if c > n - r {
            return Err(LayoutError::invalid("C <= N - R", format!("C = {c}, N - R = {}", n - r)));
        }
        if cl > c {
            return Err(LayoutError::invalid("CL <= C", format!("CL = {cl}, C = {c}")));
        }
        if f > c {
            return Err(LayoutError::invalid("F <= C", format!("F = {f}, C = {c}")));
        }
        if b > n - r {
            return Err(LayoutError::invalid("B <= N - R", format!("B = {b}, N - R = {}", n - r)));
        }
        Ok(())
    }
}

impl fmt::Display for LayoutParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N={} R={} C={} CL={} F={} B={}",
            self.total_qubits,
            self.rank_qubits,
            self.chunk_qubits,
            self.cache_line_qubits,
            self.fusion_qubits,
            self.buffer_qubits
        )
    }
}

/// Mapping between physical index bits and logical circuit qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitPermutation {
    phys_to_log: Vec<usize>,
    log_to_phys: Vec<usize>,
}

impl QubitPermutation {
    pub fn identity(n: usize) -> QubitPermutation {
        QubitPermutation { phys_to_log: (0..n).collect(), log_to_phys: (0..n).collect() }
    }

    /// Builds a permutation from its physical-to-logical table. Returns `None`
    /// unless the table is a bijection on `0..len`.
    pub fn from_phys_to_log(phys_to_log: Vec<usize>) -> Option<QubitPermutation> {
        let n = phys_to_log.len();
        let mut log_to_phys = vec![usize::MAX; n];
        for (p, &l) in phys_to_log.iter().enumerate() {
            if l >= n || log_to_phys[l] != usize::MAX {
                return None;
            }
            log_to_phys[l] = p;
        }
        Some(QubitPermutation { phys_to_log, log_to_phys })
    }

    pub fn len(&self) -> usize {
        self.phys_to_log.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phys_to_log.is_empty()
    }

    pub fn phys_to_log(&self) -> &[usize] {
        &self.phys_to_log
    }

    pub fn logical(&self, physical: usize) -> usize {
        self.phys_to_log[physical]
    }

    pub fn physical(&self, logical: usize) -> usize {
        self.log_to_phys[logical]
    }

    pub fn is_identity(&self) -> bool {
        self.phys_to_log.iter().enumerate().all(|(p, &l)| p == l)
    }

    /// Exchanges the contents of physical positions `a[k]` and `b[k]`, pairing
    /// the sorted lists elementwise.
    pub fn swap_positions(&mut self, a: &[usize], b: &[usize]) {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        a.sort_unstable();
        b.sort_unstable();
        for (&p, &q) in a.iter().zip(&b) {
            self.phys_to_log.swap(p, q);
            self.log_to_phys[self.phys_to_log[p]] = p;
            self.log_to_phys[self.phys_to_log[q]] = q;
        }
    }

    /// Physical amplitude index holding the logical basis state `logical_index`.
    pub fn physical_index(&self, logical_index: usize) -> usize {
        self.phys_to_log.iter().enumerate().fold(0, |acc, (p, &l)| acc | (((logical_index >> l) & 1) << p))
    }
}
