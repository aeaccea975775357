//! Per-gate amplitude update kernels.

use std::ops::Range;

use num_complex::Complex64;

use crate::circuit::{Gate, GateError, GateKind};

/// Raw view of an amplitude array shared by workers that touch disjoint
/// indices.
#[derive(Clone, Copy)]
pub(crate) struct SharedAmps {
    ptr: *mut Complex64,
    len: usize,
}

unsafe impl Send for SharedAmps {}
unsafe impl Sync for SharedAmps {}

impl SharedAmps {
    pub(crate) fn new(amps: &mut [Complex64]) -> SharedAmps {
        SharedAmps { ptr: amps.as_mut_ptr(), len: amps.len() }
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    /// # Safety
    /// No other thread may access index `i` concurrently.
    #[inline]
    pub(crate) unsafe fn get(&self, i: usize) -> Complex64 {
        debug_assert!(i < self.len);
        *self.ptr.add(i)
    }

    /// # Safety
    /// No other thread may access index `i` concurrently.
    #[inline]
    pub(crate) unsafe fn set(&self, i: usize, v: Complex64) {
        debug_assert!(i < self.len);
        *self.ptr.add(i) = v;
    }
}

#[derive(Clone, Debug)]
enum Op {
    /// 2x2 matrix on one qubit, row-major.
    Single {
        target: usize,
        m: [Complex64; 4],
    },
    /// Swap the target bit where the control bit is set.
    Cx {
        control: usize,
        target: usize,
    },
    Swap {
        a: usize,
        b: usize,
    },
    /// Two-qubit diagonal `[1, 1, 1, phase]`: only amplitudes with both
    /// bits set change.
    Phase {
        sorted_mask: usize,
        phase: Complex64,
    },
    /// `d[local]`, local index built with `targets[0]` as the top bit.
    Diagonal {
        targets: Vec<usize>,
        d: Vec<Complex64>,
    },
}

/// A gate compiled to index strides for physical target positions.
#[derive(Clone, Debug)]
pub struct GateKernel {
    op: Op,
    /// Target positions ascending, for enumerating work items.
    sorted: Vec<usize>,
}

impl GateKernel {
    pub fn new(gate: &Gate) -> Result<GateKernel, GateError> {
        let mut sorted = gate.targets.clone();
        sorted.sort_unstable();
        let op = match gate.kind {
            GateKind::CX => Op::Cx { control: gate.targets[0], target: gate.targets[1] },
            GateKind::SWAP => Op::Swap { a: gate.targets[0], b: gate.targets[1] },
            k if k.is_diagonal() => {
                let d = gate.diagonal().ok_or(GateError::MissingDiagonal)?;
                gate.matrix()?;
                let one = Complex64::new(1.0, 0.0);
                if d.len() == 4 && d[..3].iter().all(|&x| x == one) {
                    Op::Phase { sorted_mask: gate.qubit_mask() as usize, phase: d[3] }
                } else {
                    Op::Diagonal { targets: gate.targets.clone(), d }
                }
            }
            _ => {
                let m = gate.matrix()?;
                Op::Single { target: gate.targets[0], m: [m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)] }
            }
        };
        Ok(GateKernel { op, sorted })
    }

    pub fn max_target(&self) -> usize {
        *self.sorted.last().expect("gate has targets")
    }

    /// Number of independent work items over an array of `len` amplitudes.
    pub fn item_count(&self, len: usize) -> usize {
        match self.op {
            Op::Single { .. } => len >> 1,
            Op::Cx { .. } | Op::Swap { .. } | Op::Phase { .. } => len >> 2,
            Op::Diagonal { .. } => len,
        }
    }

    pub fn apply(&self, amps: &mut [Complex64]) {
        if let Op::Single { target, m } = &self.op {
            let stride = 1usize << target;
            for pair in amps.chunks_exact_mut(2 * stride) {
                let (lo, hi) = pair.split_at_mut(stride);
                for (x, y) in lo.iter_mut().zip(hi) {
                    let (a, b) = (*x, *y);
                    *x = m[0] * a + m[1] * b;
                    *y = m[2] * a + m[3] * b;
                }
            }
            return;
        }
        let n = self.item_count(amps.len());
        let shared = SharedAmps::new(amps);
        // SAFETY: the whole item range runs on this thread.
        unsafe { self.apply_items(shared, 0..n) }
    }

    /// Applies work items `items`.
    ///
    /// # Safety
    /// Distinct items touch distinct amplitudes, so concurrent callers must
    /// use disjoint item ranges and nothing else may touch `amps`.
    pub(crate) unsafe fn apply_items(&self, amps: SharedAmps, items: Range<usize>) {
        match &self.op {
            Op::Single { target, m } => {
                let stride = 1usize << target;
                let low = stride - 1;
                for w in items {
                    let i = ((w & !low) << 1) | (w & low);
                    let j = i | stride;
                    let (a, b) = (amps.get(i), amps.get(j));
                    amps.set(i, m[0] * a + m[1] * b);
                    amps.set(j, m[2] * a + m[3] * b);
                }
            }
            Op::Cx { control, target } => {
                for w in items {
                    let i = insert_two(w, self.sorted[0], self.sorted[1]) | (1 << control);
                    let j = i | (1 << target);
                    let a = amps.get(i);
                    amps.set(i, amps.get(j));
                    amps.set(j, a);
                }
            }
            Op::Swap { a, b } => {
                for w in items {
                    let i = insert_two(w, self.sorted[0], self.sorted[1]) | (1 << a);
                    let j = i ^ (1 << a) ^ (1 << b);
                    let x = amps.get(i);
                    amps.set(i, amps.get(j));
                    amps.set(j, x);
                }
            }
            Op::Phase { sorted_mask, phase } => {
                let (p0, p1) = (self.sorted[0], self.sorted[1]);
                for w in items {
                    let i = insert_two(w, p0, p1) | sorted_mask;
                    amps.set(i, amps.get(i) * phase);
                }
            }
            Op::Diagonal { targets, d } => match *targets.as_slice() {
                [t] => {
                    for i in items {
                        amps.set(i, amps.get(i) * d[(i >> t) & 1]);
                    }
                }
                [t0, t1] => {
                    for i in items {
                        amps.set(i, amps.get(i) * d[((i >> t0) & 1) << 1 | ((i >> t1) & 1)]);
                    }
                }
                _ => {
                    let k = targets.len();
                    for i in items {
                        let local = targets.iter().enumerate().fold(0, |l, (j, &q)| l | ((i >> q) & 1) << (k - 1 - j));
                        amps.set(i, amps.get(i) * d[local]);
                    }
                }
            },
        }
    }
}

/// Inserts zero bits at positions `lo < hi`.
#[inline(always)]
fn insert_two(w: usize, lo: usize, hi: usize) -> usize {
    let l = (1usize << lo) - 1;
    let w = ((w & !l) << 1) | (w & l);
    let h = (1usize << hi) - 1;
    ((w & !h) << 1) | (w & h)
}

/// Applies `kernel` over `amps` with `workers` threads on contiguous item
/// ranges.
pub fn apply_parallel(kernel: &GateKernel, amps: &mut [Complex64], workers: usize) {
    let n = kernel.item_count(amps.len());
    let shared = SharedAmps::new(amps);
    run_ranges(n, workers, |r| {
        // SAFETY: ranges from `run_ranges` are disjoint and `amps` is
        // borrowed mutably for the whole call.
        unsafe { kernel.apply_items(shared, r) }
    });
}

/// Splits `0..n` into at most `workers` contiguous ranges and runs `f` on
/// each, on scoped threads when there is more than one.
pub(crate) fn run_ranges(n: usize, workers: usize, f: impl Fn(Range<usize>) + Sync) {
    let workers = workers.clamp(1, n.max(1));
    if workers == 1 {
        f(0..n);
        return;
    }
    let per = n.div_ceil(workers);
    std::thread::scope(|s| {
        for w in 0..workers {
            let r = (w * per).min(n)..((w + 1) * per).min(n);
            let f = &f;
            s.spawn(move || f(r));
        }
    });
}

/// Runs a block whose targets all sit below `chunk_qubits`: every chunk is
/// copied into a private scratch buffer, the kernels run in order, and the
/// result is written back. Chunks are shared out in contiguous ranges.
pub fn apply_chunked(kernels: &[GateKernel], amps: &mut [Complex64], chunk_qubits: usize, workers: usize) {
    let chunk = 1usize << chunk_qubits;
    let chunks = amps.len() / chunk;
    let workers = workers.clamp(1, chunks.max(1));
    let per = chunks.div_ceil(workers) * chunk;
    // A chunk is a contiguous cache-sized slice, so it is worked on in place.
    let run = |part: &mut [Complex64]| {
        for c in part.chunks_mut(chunk) {
            for k in kernels {
                k.apply(c);
            }
        }
    };
    if workers == 1 {
        run(amps);
        return;
    }
    std::thread::scope(|s| {
        for part in amps.chunks_mut(per) {
            let run = &run;
            s.spawn(move || run(part));
        }
    });
}
