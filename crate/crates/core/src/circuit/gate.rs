use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;

use num_complex::Complex64;

use super::error::GateError;

/// Angle used for a parametric gate whose line carries no parameters.
pub const DEFAULT_ANGLE: f64 = FRAC_PI_4;

/// Largest fused diagonal width that can be represented.
pub const MAX_FUSED_QUBITS: usize = 16;

const UNITARITY_TOL: f64 = 1e-9;

/// The gate set understood by the toolkit.
///
/// `D(k)` is a fused diagonal gate acting on `k` qubits; it only appears in
/// optimized circuits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    U,
    CX,
    CP,
    SWAP,
    RX,
    RY,
    RZ,
    RZZ,
    D(u8),
}

impl GateKind {
    /// The ten benchmark gates, in the order they are usually listed.
    pub const BENCHMARK: [GateKind; 10] = [
        GateKind::H,
        GateKind::X,
        GateKind::U,
        GateKind::CX,
        GateKind::CP,
        GateKind::SWAP,
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::RZZ,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::U | GateKind::RX | GateKind::RY | GateKind::RZ => 1,
            GateKind::CX | GateKind::CP | GateKind::SWAP | GateKind::RZZ => 2,
            GateKind::D(k) => k as usize,
        }
    }

    /// Number of real angle parameters. Fused diagonals carry complex entries instead.
    pub fn angle_count(self) -> usize {
        match self {
            GateKind::CP | GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::RZZ => 1,
            GateKind::U => 3,
            _ => 0,
        }
    }

    pub fn is_diagonal(self) -> bool {
        matches!(self, GateKind::RZ | GateKind::RZZ | GateKind::CP | GateKind::D(_))
    }

    /// Gates whose action does not depend on the order of their targets.
    pub fn is_symmetric(self) -> bool {
        matches!(self, GateKind::RZZ | GateKind::SWAP)
    }

    pub fn from_symbol(symbol: &str) -> Option<GateKind> {
        let kind = match symbol {
            "H" => GateKind::H,
            "X" => GateKind::X,
            "U" => GateKind::U,
            "CX" => GateKind::CX,
            "CP" => GateKind::CP,
            "SWAP" => GateKind::SWAP,
            "RX" => GateKind::RX,
            "RY" => GateKind::RY,
            "RZ" => GateKind::RZ,
            "RZZ" => GateKind::RZZ,
            _ => {
                let k: u8 = symbol.strip_prefix('D')?.parse().ok()?;
                if !(2..=MAX_FUSED_QUBITS as u8).contains(&k) {
                    return None;
                }
                GateKind::D(k)
            }
        };
        Some(kind)
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        GateKind::from_symbol(&name.to_ascii_uppercase())
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::H => f.write_str("H"),
            GateKind::X => f.write_str("X"),
            GateKind::U => f.write_str("U"),
            GateKind::CX => f.write_str("CX"),
            GateKind::CP => f.write_str("CP"),
            GateKind::SWAP => f.write_str("SWAP"),
            GateKind::RX => f.write_str("RX"),
            GateKind::RY => f.write_str("RY"),
            GateKind::RZ => f.write_str("RZ"),
            GateKind::RZZ => f.write_str("RZZ"),
            GateKind::D(k) => write!(f, "D{k}"),
        }
    }
}

/// Gate parameters as they appear on a circuit line.
///
/// An empty angle list means "not given"; [`Gate::angle`] then falls back to
/// [`DEFAULT_ANGLE`]. Keeping the list as written makes files round-trip.
#[derive(Clone, Debug, PartialEq)]
pub enum Params {
    Angles(Vec<f64>),
    Diagonal(Vec<Complex64>),
}

/// One quantum operation.
///
/// `targets` are qubit indices (bit positions of the amplitude index, LSB is
/// qubit 0). For `CX` and `CP` the first target is the control.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub id: usize,
    pub params: Params,
}

impl Gate {
    /// Id carried by fused diagonal gates, which have no position in the source circuit.
    pub const FUSED_ID: usize = usize::MAX;

    pub fn new(kind: GateKind, targets: Vec<usize>, id: usize) -> Gate {
        Gate { kind, targets, id, params: Params::Angles(Vec::new()) }
    }

    pub fn with_angles(kind: GateKind, targets: Vec<usize>, id: usize, angles: Vec<f64>) -> Gate {
        Gate { kind, targets, id, params: Params::Angles(angles) }
    }

    /// A fused diagonal gate. `entries[e]` multiplies the amplitudes whose
    /// target bits spell `e`, with `targets[0]` as the most significant bit.
    pub fn fused(targets: Vec<usize>, entries: Vec<Complex64>) -> Gate {
        let kind = GateKind::D(targets.len() as u8);
        Gate { kind, targets, id: Gate::FUSED_ID, params: Params::Diagonal(entries) }
    }

    pub fn is_fused(&self) -> bool {
        matches!(self.kind, GateKind::D(_))
    }

    /// The `i`-th angle, or [`DEFAULT_ANGLE`] when the line gave none.
    pub fn angle(&self, i: usize) -> f64 {
        match &self.params {
            Params::Angles(a) => a.get(i).copied().unwrap_or(DEFAULT_ANGLE),
            Params::Diagonal(_) => DEFAULT_ANGLE,
        }
    }

    /// Bit mask of the targeted qubits.
    pub fn qubit_mask(&self) -> u64 {
        self.targets.iter().fold(0, |m, &q| m | (1u64 << q))
    }

    /// The same gate acting on `map(q)` for each target. Symmetric gates get
    /// their new targets sorted.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Gate {
        let mut targets: Vec<usize> = self.targets.iter().map(|&q| map(q)).collect();
        if self.kind.is_symmetric() {
            targets.sort_unstable();
        }
        Gate { targets, ..self.clone() }
    }

    /// Diagonal entries for diagonal gates (same bit convention as [`Gate::matrix`]).
    pub fn diagonal(&self) -> Option<Vec<Complex64>> {
        let theta = self.angle(0);
        let d = match self.kind {
            GateKind::RZ => vec![Complex64::cis(-theta / 2.0), Complex64::cis(theta / 2.0)],
            GateKind::RZZ => {
                let same = Complex64::cis(-theta / 2.0);
                let diff = Complex64::cis(theta / 2.0);
                vec![same, diff, diff, same]
            }
            GateKind::CP => {
                let one = Complex64::new(1.0, 0.0);
                vec![one, one, one, Complex64::cis(theta)]
            }
            GateKind::D(_) => match &self.params {
                Params::Diagonal(d) => d.clone(),
                Params::Angles(_) => return None,
            },
            _ => return None,
        };
        Some(d)
    }

    /// Dense unitary of dimension `2^arity`, row-major.
    ///
    /// Row and column indices read the target bits with `targets[0]` as the
    /// most significant bit, so `CX` is the textbook block matrix with the
    /// control selecting the lower-right `X` block.
    pub fn matrix(&self) -> Result<Matrix, GateError> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let m = match self.kind {
            GateKind::H => {
                let s = FRAC_1_SQRT_2;
                Matrix::from_rows(2, vec![c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
            }
            GateKind::X => Matrix::from_rows(2, vec![zero, one, one, zero]),
            GateKind::U => {
                let (theta, phi, lambda) = (self.angle(0), self.angle(1), self.angle(2));
                let (s, co) = (theta / 2.0).sin_cos();
                Matrix::from_rows(
                    2,
                    vec![
                        c(co, 0.0),
                        -Complex64::cis(lambda) * s,
                        Complex64::cis(phi) * s,
                        Complex64::cis(phi + lambda) * co,
                    ],
                )
            }
            GateKind::RX => {
                let (s, co) = (self.angle(0) / 2.0).sin_cos();
                Matrix::from_rows(2, vec![c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)])
            }
            GateKind::RY => {
                let (s, co) = (self.angle(0) / 2.0).sin_cos();
                Matrix::from_rows(2, vec![c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
            }
            GateKind::CX => {
                let mut m = Matrix::identity(4);
                m.set(2, 2, zero);
                m.set(3, 3, zero);
                m.set(2, 3, one);
                m.set(3, 2, one);
                m
            }
            GateKind::SWAP => {
                let mut m = Matrix::identity(4);
                m.set(1, 1, zero);
                m.set(2, 2, zero);
                m.set(1, 2, one);
                m.set(2, 1, one);
                m
            }
            GateKind::RZ | GateKind::RZZ | GateKind::CP | GateKind::D(_) => {
                let d = self.diagonal().ok_or(GateError::MissingDiagonal)?;
                let dim = 1usize << self.kind.arity();
                if d.len() != dim {
                    return Err(GateError::DiagonalLength { expected: dim, found: d.len() });
                }
                if let Some(entry) = d.iter().find(|z| (z.norm() - 1.0).abs() > UNITARITY_TOL) {
                    return Err(GateError::NonUnitaryFused { modulus: entry.norm() });
                }
                Matrix::diagonal(&d)
            }
        };
        Ok(m)
    }
}

/// Small dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl Matrix {
    pub fn from_rows(dim: usize, data: Vec<Complex64>) -> Matrix {
        assert_eq!(data.len(), dim * dim);
        Matrix { dim, data }
    }

    pub fn identity(dim: usize) -> Matrix {
        let mut m = Matrix { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] };
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn diagonal(d: &[Complex64]) -> Matrix {
        let mut m = Matrix { dim: d.len(), data: vec![Complex64::new(0.0, 0.0); d.len() * d.len()] };
        for (i, &z) in d.iter().enumerate() {
            m.set(i, i, z);
        }
        m
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    out[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Matrix { dim: n, data: out }
    }

    pub fn adjoint(&self) -> Matrix {
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.get(i, j).conj();
            }
        }
        Matrix { dim: n, data: out }
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}
