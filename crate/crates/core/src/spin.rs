//! Exact two-level quantum mechanics on the `{|o_n>, |o_-n>}` subspace.
//!
//! The dichotomic observable, the rotation and the entangled pair state never
//! leave the two-dimensional span of `|o_n>` and `|o_-n>`, so everything here
//! works with 2×2 single-side operators and 4×4 pair operators. On that
//! subspace the observable `O = O+ - O-` acts as σz.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entrywise tolerance for `M = M†`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Entrywise tolerance for `M†M = I`.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance on the norm of a pair state.
pub const NORM_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense square complex matrix of dimension 2 or 4, row-major.
#[derive(Clone, PartialEq)]
pub struct SquareComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl SquareComplexMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::Contract(format!("matrix dimension must be 2 or 4, got {dim}")));
        }
        if entries.len() != dim * dim {
            return Err(Error::Contract(format!(
                "{dim}x{dim} matrix needs {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real2(m: [[f64; 2]; 2]) -> Self {
        Self::from_complex2([
            [Complex64::from(m[0][0]), Complex64::from(m[0][1])],
            [Complex64::from(m[1][0]), Complex64::from(m[1][1])],
        ])
    }

    pub fn from_complex2(m: [[Complex64; 2]; 2]) -> Self {
        Self {
            dim: 2,
            entries: vec![m[0][0], m[0][1], m[1][0], m[1][1]],
        }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 4, "matrix dimension must be 2 or 4");
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m.entries[k * dim + k] = ONE;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.entries[c * n + r] = self.entries[r * n + c].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::from(s))
    }

    /// Kronecker product of two 2×2 matrices.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.dim != 2 || other.dim != 2 {
            return Err(Error::Contract("kron is defined for 2x2 factors only".into()));
        }
        let mut out = Self::zeros(4);
        for (r1, c1, r2, c2) in (0..2)
            .flat_map(|r1| (0..2).map(move |c1| (r1, c1)))
            .flat_map(|(r1, c1)| (0..2).flat_map(move |r2| (0..2).map(move |c2| (r1, c1, r2, c2))))
        {
            out.entries[(2 * r1 + r2) * 4 + (2 * c1 + c2)] = self.get(r1, c1) * other.get(r2, c2);
        }
        Ok(out)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self.get(k, k)).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.approx_eq(&self.adjoint(), tol)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (&self.adjoint() * self).approx_eq(&Self::identity(self.dim), tol)
    }

    /// Spectral norm (largest singular value). Closed form, 2×2 only.
    pub fn operator_norm(&self) -> Result<f64> {
        if self.dim != 2 {
            return Err(Error::Contract("operator_norm is implemented for 2x2 matrices".into()));
        }
        let frob2: f64 = self.entries.iter().map(|z| z.norm_sqr()).sum();
        let det = (self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0)).norm_sqr();
        let disc = (frob2 * frob2 - 4.0 * det).max(0.0).sqrt();
        Ok(((frob2 + disc) / 2.0).sqrt())
    }

    /// Pauli components `(c0, cx, cy, cz)` of a 2×2 matrix, `M = c0 I + c·σ`.
    pub fn pauli_components(&self) -> Result<[Complex64; 4]> {
        if self.dim != 2 {
            return Err(Error::Contract("Pauli decomposition needs a 2x2 matrix".into()));
        }
        let (a, b, c, d) = (self.get(0, 0), self.get(0, 1), self.get(1, 0), self.get(1, 1));
        Ok([(a + d) / 2.0, (b + c) / 2.0, (b - c) * I / 2.0, (a - d) / 2.0])
    }
}

impl fmt::Debug for SquareComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareComplexMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let z = self.get(r, c);
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Mul for &SquareComplexMatrix {
    type Output = SquareComplexMatrix;

    fn mul(self, rhs: Self) -> SquareComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = SquareComplexMatrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.entries[r * n + c] = (0..n).map(|k| self.get(r, k) * rhs.get(k, c)).sum();
            }
        }
        out
    }
}

impl Add for &SquareComplexMatrix {
    type Output = SquareComplexMatrix;

    fn add(self, rhs: Self) -> SquareComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        SquareComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &SquareComplexMatrix {
    type Output = SquareComplexMatrix;

    fn sub(self, rhs: Self) -> SquareComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        SquareComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Pure state of the pair in the basis
/// `{|o_n,o_n>, |o_n,o_-n>, |o_-n,o_n>, |o_-n,o_-n>}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    amplitudes: [Complex64; 4],
}

impl TwoQubitState {
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Contract(format!("pair state must be normalized, norm = {norm}")));
        }
        Ok(Self { amplitudes })
    }

    /// The entangled state `(|o_n>|o_-n> + |o_-n>|o_n>)/√2`.
    pub fn entangled() -> Self {
        let h = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
        Self {
            amplitudes: [ZERO, h, h, ZERO],
        }
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<ψ|M|ψ>` for a 4×4 operator.
    pub fn expectation(&self, op: &SquareComplexMatrix) -> Result<Complex64> {
        if op.dim() != 4 {
            return Err(Error::Contract("pair expectation needs a 4x4 operator".into()));
        }
        let psi = &self.amplitudes;
        let mut acc = ZERO;
        for r in 0..4 {
            let row: Complex64 = (0..4).map(|c| op.get(r, c) * psi[c]).sum();
            acc += psi[r].conj() * row;
        }
        Ok(acc)
    }
}

/// Unit vector on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAxis {
    nx: f64,
    ny: f64,
    nz: f64,
}

impl BlochAxis {
    /// Normalizes `(x, y, z)`; `None` for the zero vector or non-finite input.
    pub fn new(x: f64, y: f64, z: f64) -> Option<Self> {
        let len = (x * x + y * y + z * z).sqrt();
        if !len.is_finite() || len == 0.0 {
            return None;
        }
        Some(Self {
            nx: x / len,
            ny: y / len,
            nz: z / len,
        })
    }

    /// Axis of the Hamiltonian `w σx + beta σz`.
    pub fn of_hamiltonian(w: f64, beta: f64) -> Option<Self> {
        Self::new(w, 0.0, beta)
    }

    pub fn components(&self) -> [f64; 3] {
        [self.nx, self.ny, self.nz]
    }

    /// `n·σ`.
    pub fn sigma(&self) -> SquareComplexMatrix {
        SquareComplexMatrix::from_complex2([
            [Complex64::from(self.nz), Complex64::new(self.nx, -self.ny)],
            [Complex64::new(self.nx, self.ny), Complex64::from(-self.nz)],
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl std::str::FromStr for PauliAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(PauliAxis::X),
            "y" => Ok(PauliAxis::Y),
            "z" => Ok(PauliAxis::Z),
            other => Err(Error::Usage(format!("unknown Pauli axis '{other}', expected x, y or z"))),
        }
    }
}

pub fn pauli(which: PauliAxis) -> SquareComplexMatrix {
    match which {
        PauliAxis::X => SquareComplexMatrix::from_complex2([[ZERO, ONE], [ONE, ZERO]]),
        PauliAxis::Y => SquareComplexMatrix::from_complex2([[ZERO, -I], [I, ZERO]]),
        PauliAxis::Z => SquareComplexMatrix::from_complex2([[ONE, ZERO], [ZERO, -ONE]]),
    }
}

/// Pauli matrix from a label (`"x"`, `"y"`, `"z"`).
pub fn pauli_by_label(label: &str) -> Result<SquareComplexMatrix> {
    Ok(pauli(label.parse()?))
}

/// `U(θ) = [[cos θ, sin θ], [sin θ, -cos θ]]`; real symmetric, `U² = I`.
pub fn rotation_unitary(theta: f64) -> SquareComplexMatrix {
    let (s, c) = theta.sin_cos();
    SquareComplexMatrix::from_real2([[c, s], [s, -c]])
}

/// `U†(θ) σz U(θ) = cos 2θ σz + sin 2θ σx`.
pub fn rotated_observable(theta: f64) -> SquareComplexMatrix {
    let (s, c) = (2.0 * theta).sin_cos();
    SquareComplexMatrix::from_real2([[c, s], [s, -c]])
}

/// Heisenberg-evolved σz, `exp(iHt) σz exp(-iHt)` with `H = w σx + beta σz`.
///
/// Uses `exp(iHt) = cos(Ωt) I + i sin(Ωt) H/Ω`, `Ω = √(w² + beta²)`. For
/// `beta = 0` the axis turns in the z–y plane: the result is
/// `cos 2wt σz + sin 2wt σy`, the same operator as [`rotated_observable`] up to
/// the phase frame `diag(1, i)` (see [`x_frame`]).
pub fn evolve_observable(w: f64, beta: f64, t: f64) -> SquareComplexMatrix {
    let sz = pauli(PauliAxis::Z);
    let Some(axis) = BlochAxis::of_hamiltonian(w, beta) else {
        return sz;
    };
    let omega = w.hypot(beta);
    let (s, c) = (omega * t).sin_cos();
    let forward = &SquareComplexMatrix::identity(2).scale_real(c) + &axis.sigma().scale(I * s);
    &(&forward * &sz) * &forward.adjoint()
}

/// Maps an operator from the σx-generated evolution frame onto the frame of
/// [`rotated_observable`]: `S† M S` with `S = diag(1, i)`, which sends σy to σx
/// and leaves σz fixed. The entangled pair state is invariant under `S⊗S` up
/// to a global phase, so correlations agree in both frames.
pub fn x_frame(m: &SquareComplexMatrix) -> SquareComplexMatrix {
    let phase = SquareComplexMatrix::from_complex2([[ONE, ZERO], [ZERO, I]]);
    &(&phase.adjoint() * m) * &phase
}

/// `<ψ| A⊗B |ψ>` for Hermitian 2×2 `A`, `B`.
///
/// The result is clamped to `‖A‖·‖B‖` to absorb rounding.
pub fn pair_expectation(
    state: &TwoQubitState,
    a: &SquareComplexMatrix,
    b: &SquareComplexMatrix,
) -> Result<f64> {
    for (name, m) in [("A", a), ("B", b)] {
        if m.dim() != 2 {
            return Err(Error::Contract(format!("{name} must be 2x2")));
        }
        if !m.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::Contract(format!("{name} is not Hermitian")));
        }
    }
    let value = state.expectation(&a.kron(b)?)?;
    debug_assert!(value.im.abs() <= 1e-12 * (1.0 + value.re.abs()));
    let bound = a.operator_norm()? * b.operator_norm()?;
    Ok(value.re.clamp(-bound, bound))
}
