//! Small dense complex matrices for one and two qubits.
//!
//! Everything here works on 2×2 and 4×4 row-major matrices. Hermitian
//! eigenproblems and singular values are delegated to `nalgebra`; the rest
//! is hand-written because the matrices are tiny.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Index, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for algebraic identities (Hermiticity, trace).
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for eigen-derived quantities.
pub const EIGEN_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major complex matrix of dimension 2 or 4.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if entries.len() != dim * dim {
            return Err(Error::EntryCount {
                dim,
                found: entries.len(),
            });
        }
        Ok(ComplexMatrix { dim, entries })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            dim,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(dim, vec![ZERO; dim * dim])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.entries[i * dim + i] = ONE;
        }
        Ok(m)
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Result<Self> {
        let dim = diag.len();
        let mut m = Self::zeros(dim)?;
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * dim + i] = d;
        }
        Ok(m)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let diag: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&diag)
    }

    /// Outer product `|v><v|` of an amplitude vector (not normalized).
    pub fn outer(v: &[Complex64]) -> Result<Self> {
        let dim = v.len();
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                m.entries[i * dim + j] = v[i] * v[j].conj();
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        ComplexMatrix { dim: n, entries }
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        Ok(ComplexMatrix { dim: n, entries })
    }

    /// Largest absolute entrywise difference, `‖A − B‖_max`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖A − A†‖_max`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let eig = nalgebra::SymmetricEigen::new(self.to_nalgebra());
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        vals
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<Complex64>) -> Result<Self> {
        let n = m.nrows();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(m[(i, j)]);
            }
        }
        Self::new(n, entries)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.entries[r * self.dim + c]
    }
}

/// Panics on dimension mismatch; use [`ComplexMatrix::matmul`] for a checked product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix dimensions must agree")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions must agree");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    let i = Complex64::i();
    ComplexMatrix::new(2, vec![ZERO, -i, i, ZERO]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
}

/// Kronecker product of two square row-major blocks of side `na` and `nb`.
pub(crate) fn kron_entries(
    a: &[Complex64],
    na: usize,
    b: &[Complex64],
    nb: usize,
) -> Vec<Complex64> {
    let n = na * nb;
    let mut out = vec![ZERO; n * n];
    for i in 0..na {
        for j in 0..na {
            let aij = a[i * na + j];
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k) * n + (j * nb + l)] = aij * b[k * nb + l];
                }
            }
        }
    }
    out
}

/// Two-qubit operator `a ⊗ b` from two single-qubit operators.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    for m in [a, b] {
        if m.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: m.dim,
            });
        }
    }
    ComplexMatrix::new(4, kron_entries(&a.entries, 2, &b.entries, 2))
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let herm = matrix.hermiticity_defect();
        if herm > ALGEBRAIC_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > ALGEBRAIC_TOL || tr.im.abs() > ALGEBRAIC_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min_eig = matrix.hermitian_eigenvalues()[0];
        if min_eig < -EIGEN_TOL {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(DensityMatrix(matrix))
    }

    /// Wraps a matrix already known to be a state (output of a CPTP map or
    /// a renormalized conjugation).
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        DensityMatrix(matrix)
    }

    /// `|v><v| / <v|v>` for a non-zero amplitude vector of length 2 or 4.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        let m = ComplexMatrix::outer(amplitudes)?.scale_real(1.0 / norm);
        Ok(DensityMatrix(m))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Ok(DensityMatrix(
            ComplexMatrix::identity(dim)?.scale_real(1.0 / dim as f64),
        ))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.0.hermitian_eigenvalues()
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    /// Positive square root, with eigenvalues in `[-EIGEN_TOL, 0)` clipped to zero.
    pub(crate) fn sqrt(&self) -> Result<ComplexMatrix> {
        let eig = nalgebra::SymmetricEigen::new(self.0.to_nalgebra());
        let mut roots = eig.eigenvalues.clone();
        for v in roots.iter_mut() {
            if *v < -EIGEN_TOL {
                return Err(Error::NotPositive(*v));
            }
            *v = v.max(0.0).sqrt();
        }
        let vecs = &eig.eigenvectors;
        let diag = DMatrix::from_diagonal(&roots.map(|x| Complex64::new(x, 0.0)));
        ComplexMatrix::from_nalgebra(&(vecs * diag * vecs.adjoint()))
    }
}

/// A pure single-qubit state as a point on the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureQubit {
    theta: f64,
    phi: f64,
}

impl PureQubit {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        crate::error::check_range("theta", theta, 0.0, PI, "[0, pi]")?;
        if !(phi.is_finite() && (0.0..2.0 * PI).contains(&phi)) {
            return Err(Error::OutOfRange {
                name: "phi",
                value: phi,
                range: "[0, 2pi)",
            });
        }
        Ok(PureQubit { theta, phi })
    }

    /// Equatorial state `(|0> + e^{iφ}|1>)/√2`; `phi` is wrapped into `[0, 2π)`.
    pub fn equatorial(phi: f64) -> Self {
        let wrapped = phi.rem_euclid(2.0 * PI);
        PureQubit {
            theta: PI / 2.0,
            phi: if wrapped >= 2.0 * PI { 0.0 } else { wrapped },
        }
    }

    pub fn zero() -> Self {
        PureQubit {
            theta: 0.0,
            phi: 0.0,
        }
    }

    pub fn one() -> Self {
        PureQubit {
            theta: PI,
            phi: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// `½(I + sinθcosφ X + sinθsinφ Y + cosθ Z)`.
pub fn to_density(state: PureQubit) -> DensityMatrix {
    let (st, ct) = state.theta.sin_cos();
    let (sp, cp) = state.phi.sin_cos();
    let (x, y, z) = (st * cp, st * sp, ct);
    let m = ComplexMatrix::new(
        2,
        vec![
            Complex64::new(0.5 * (1.0 + z), 0.0),
            Complex64::new(0.5 * x, -0.5 * y),
            Complex64::new(0.5 * x, 0.5 * y),
            Complex64::new(0.5 * (1.0 - z), 0.0),
        ],
    )
    .unwrap();
    DensityMatrix(m)
}

/// Returns the unnormalized `K ρ K†` and its trace.
pub fn conjugate_by(op: &ComplexMatrix, rho: &DensityMatrix) -> Result<(ComplexMatrix, f64)> {
    let out = op.matmul(rho.matrix())?.matmul(&op.adjoint())?;
    let weight = out.trace().re.max(0.0);
    Ok((out, weight))
}

/// Overlap `<ψ|ρ|ψ>` of a pure reference state with `rho`.
pub fn fidelity(psi: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            found: rho.dim(),
        });
    }
    let purity = psi.purity();
    if (purity - 1.0).abs() > EIGEN_TOL {
        return Err(Error::NotPure(purity));
    }
    // for pure ψ, tr(ψρ) = <ψ|ρ|ψ>
    let overlap = psi.matrix().matmul(rho.matrix())?.trace().re;
    Ok(overlap.clamp(0.0, 1.0))
}

/// Wootters concurrence of a two-qubit state.
///
/// The spin-flip values λᵢ are the singular values of `√ρ (Y⊗Y) √ρ*`, i.e. the
/// square roots of the eigenvalues of the Hermitian `√ρ ρ̃ √ρ`.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let sqrt_rho = rho.sqrt()?;
    let yy = tensor(&pauli_y(), &pauli_y())?;
    let t = sqrt_rho.matmul(&yy)?.matmul(&sqrt_rho.conj())?;
    let mut lambdas: Vec<f64> = t.to_nalgebra().singular_values().iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}
