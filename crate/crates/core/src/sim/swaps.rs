//! In-memory and cross-rank swap kernels.

use std::sync::{Barrier, Mutex};

use num_complex::Complex64;

use super::bits::{check_swap_sets, BitShift, PairSwap};
use super::kernels::{run_ranges, SharedAmps};

/// A validated in-memory swap of local bit positions.
#[derive(Clone, Debug)]
pub struct ImsPlan {
    shift: BitShift,
    pairs: PairSwap,
}

impl ImsPlan {
    pub fn new(out_set: &[usize], in_set: &[usize], local_qubits: usize, cl: usize) -> Result<ImsPlan, String> {
        check_swap_sets(out_set, in_set, local_qubits)?;
        let mut a = out_set.to_vec();
        let mut b = in_set.to_vec();
        a.sort_unstable();
        b.sort_unstable();
        let shift = BitShift::new(&a, &b, cl);
        let pairs = PairSwap::new(&a, &b);
        Ok(ImsPlan { shift, pairs })
    }

    /// `new[i] = old[bitswap(i, A, B)]`, each unordered pair swapped once,
    /// with the thread index space split over `workers`.
    pub fn apply(&self, amps: &mut [Complex64], workers: usize) {
        if self.pairs.is_identity() {
            return;
        }
        let shared = SharedAmps::new(amps);
        run_ranges(shared.len(), workers, |r| {
            for t in r {
                let m = self.shift.apply(t);
                let n = self.pairs.apply(m);
                if m > n {
                    // SAFETY: `shift` is a bijection and the pair (m, n) is
                    // only handled by the thread index mapping to the larger
                    // of the two, so no index is touched twice.
                    unsafe {
                        let x = shared.get(m);
                        shared.set(m, shared.get(n));
                        shared.set(n, x);
                    }
                }
            }
        });
    }
}

/// A validated cross-rank swap: the top `S` local bits against `S` rank bits.
#[derive(Clone, Debug)]
pub struct XrsPlan {
    local_qubits: usize,
    /// Rank-id bit positions, ascending, paired with local bits `L-S+k`.
    rank_bits: Vec<usize>,
    buffer_qubits: usize,
}

impl XrsPlan {
    pub fn new(
        local_set: &[usize],
        rank_set: &[usize],
        layout_local: usize,
        total_qubits: usize,
        buffer_qubits: usize,
    ) -> Result<XrsPlan, String> {
        let s = local_set.len();
        if rank_set.len() != s || s == 0 {
            return Err(format!("cross-rank swap needs equal non-empty sets, got {} and {}", s, rank_set.len()));
        }
        let mut local = local_set.to_vec();
        local.sort_unstable();
        if s > layout_local || local != (layout_local - s..layout_local).collect::<Vec<_>>() {
            return Err(format!("local bits {local_set:?} are not the top {s} local bits"));
        }
        let mut rank = rank_set.to_vec();
        rank.sort_unstable();
        rank.dedup();
        if rank.len() != s || rank.iter().any(|&p| p < layout_local || p >= total_qubits) {
            return Err(format!("rank bits {rank_set:?} must be distinct and in [{layout_local}, {total_qubits})"));
        }
        if buffer_qubits < s {
            return Err(format!("buffer of 2^{buffer_qubits} is smaller than 2^{s} peers"));
        }
        if buffer_qubits > layout_local {
            return Err(format!("buffer of 2^{buffer_qubits} exceeds the local state"));
        }
        Ok(XrsPlan {
            local_qubits: layout_local,
            rank_bits: rank.iter().map(|p| p - layout_local).collect(),
            buffer_qubits,
        })
    }

    fn coordinate(&self, rank: usize) -> usize {
        self.rank_bits.iter().enumerate().fold(0, |c, (k, &p)| c | ((rank >> p) & 1) << k)
    }

    fn peer(&self, rank: usize, coordinate: usize) -> usize {
        self.rank_bits.iter().enumerate().fold(rank, |r, (k, &p)| (r & !(1 << p)) | ((coordinate >> k) & 1) << p)
    }

    /// One rank's side of the exchange. Every rank of the run must call this
    /// concurrently with the same `buffers` (one per rank, `2^B` each) and a
    /// barrier sized to the rank count.
    pub fn run_rank(&self, rank: usize, state: &mut [Complex64], buffers: &[Mutex<Vec<Complex64>>], barrier: &Barrier) {
        let s = self.rank_bits.len();
        let segment = 1usize << (self.local_qubits - s);
        let window = 1usize << (self.buffer_qubits - s);
        let me = self.coordinate(rank);
        for offset in (0..segment).step_by(window) {
            for j in 0..1usize << s {
                let src = &state[j * segment + offset..j * segment + offset + window];
                let mut buf = buffers[self.peer(rank, j)].lock().expect("exchange buffer");
                buf[me * window..(me + 1) * window].copy_from_slice(src);
            }
            barrier.wait();
            {
                let buf = buffers[rank].lock().expect("exchange buffer");
                for j in 0..1usize << s {
                    state[j * segment + offset..j * segment + offset + window]
                        .copy_from_slice(&buf[j * window..(j + 1) * window]);
                }
            }
            barrier.wait();
        }
    }

    /// Runs the exchange over all ranks, one thread per rank.
    pub fn apply(&self, ranks: &mut [Vec<Complex64>]) {
        let buffers = exchange_buffers(ranks.len(), self.buffer_qubits);
        let barrier = Barrier::new(ranks.len());
        std::thread::scope(|sc| {
            for (r, state) in ranks.iter_mut().enumerate() {
                let (buffers, barrier) = (&buffers, &barrier);
                sc.spawn(move || self.run_rank(r, state, buffers, barrier));
            }
        });
    }
}

pub(crate) fn exchange_buffers(ranks: usize, buffer_qubits: usize) -> Vec<Mutex<Vec<Complex64>>> {
    (0..ranks).map(|_| Mutex::new(vec![Complex64::new(0.0, 0.0); 1 << buffer_qubits])).collect()
}
