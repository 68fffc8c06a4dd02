//! Hermitian operators and spectral matrix functions.
//!
//! The eigendecomposition is the only primitive used for matrix functions.
//! It is a cyclic complex Jacobi sweep, which is accurate to a few ulps on
//! the small, possibly near-singular matrices the entropy code feeds it.

use alloc::vec::Vec;
use core::ops::Deref;

#[allow(unused_imports)] // unused when std is linked (tests)
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ZERO};

/// Hermiticity tolerance, relative to the largest entry.
pub const TOL_HERM: f64 = 1e-12;
/// Most negative eigenvalue still accepted as numerical noise.
pub const TOL_PSD: f64 = 1e-10;
/// Floor applied to eigenvalues before taking logarithms.
pub const DEFAULT_EIGEN_FLOOR: f64 = 1e-300;

const MAX_SWEEPS: usize = 64;

/// A matrix known to equal its adjoint within [`TOL_HERM`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    /// Validates Hermiticity and stores the exactly symmetrized matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let deviation = matrix.hermiticity_defect();
        let scale = matrix.max_abs().max(f64::MIN_POSITIVE);
        if deviation > TOL_HERM * scale {
            return Err(Error::NotHermitian { deviation });
        }
        let mut m = matrix;
        m.symmetrize();
        Ok(Self(m))
    }

    /// Symmetrizes without checking. Used after integrator steps, where the
    /// exact dynamics is Hermiticity-preserving and drift is rounding only.
    pub fn symmetrized(mut matrix: ComplexMatrix) -> Self {
        matrix.symmetrize();
        Self(matrix)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    pub fn diag(values: &[f64]) -> Self {
        Self(ComplexMatrix::diag(values))
    }

    /// |ψ⟩⟨ψ| for a vector normalised internally.
    pub fn pure_state(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if psi.is_empty() || !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter(
                "state vector must be nonzero and finite".into(),
            ));
        }
        let scaled: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self::symmetrized(ComplexMatrix::outer(&scaled)))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Real part of the trace (the imaginary part is zero for Hermitian input).
    pub fn trace_re(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn eigh(&self) -> Eigen {
        Eigen::of(self)
    }

    /// Spectral norm (largest |eigenvalue|).
    pub fn spectral_norm(&self) -> f64 {
        self.eigh().values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// f(A) = U diag(f(λ)) U†.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Self {
        self.eigh().reconstruct(f)
    }

    pub fn exp(&self) -> Self {
        self.map_spectrum(f64::exp)
    }

    /// Checks λ_min ≥ −TOL_PSD·max(1, λ_max).
    pub fn check_psd(&self) -> Result<Eigen> {
        let eig = self.eigh();
        eig.check_psd()?;
        Ok(eig)
    }
}

impl Deref for HermitianOperator {
    type Target = ComplexMatrix;
    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Eigendecomposition A = U diag(λ) U† with ascending eigenvalues.
/// Column k of `vectors` is the eigenvector for `values[k]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn of(a: &HermitianOperator) -> Self {
        jacobi_eigh(a.matrix())
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn check_psd(&self) -> Result<()> {
        let min = self.min();
        if min < -TOL_PSD * self.max().abs().max(1.0) {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(())
    }

    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let n = self.dim();
        let fv: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        let u = &self.vectors;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += u[(i, k)] * u[(j, k)].conj() * fv[k];
                }
                out[(i, j)] = acc;
            }
        }
        HermitianOperator::symmetrized(out)
    }

    /// Diagonal of U† B U, i.e. ⟨u_k|B|u_k⟩ for each eigenvector.
    pub fn diagonal_in_basis(&self, b: &ComplexMatrix) -> Vec<f64> {
        let n = self.dim();
        let u = &self.vectors;
        (0..n)
            .map(|k| {
                let mut acc = ZERO;
                for i in 0..n {
                    let mut row = ZERO;
                    for j in 0..n {
                        row += b[(i, j)] * u[(j, k)];
                    }
                    acc += u[(i, k)].conj() * row;
                }
                acc.re
            })
            .collect()
    }
}

/// ln of a positive semidefinite operator with eigenvalues floored at
/// `eigen_floor`. Paired with the convention λ·ln λ → 0 used by the entropy
/// code, which works directly on the eigenvalues.
pub fn log_psd(a: &HermitianOperator, eigen_floor: f64) -> Result<HermitianOperator> {
    if !(eigen_floor > 0.0) {
        return Err(Error::InvalidParameter(
            "eigen_floor must be positive".into(),
        ));
    }
    let eig = a.check_psd()?;
    Ok(eig.reconstruct(|v| v.max(eigen_floor).ln()))
}

/// x ln x with 0 ln 0 = 0; slightly negative noise is treated as zero.
#[inline]
pub fn xlogx(x: f64, floor: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.max(floor).ln()
    }
}

fn jacobi_eigh(a: &ComplexMatrix) -> Eigen {
    let n = a.dim();
    let mut m = a.clone();
    m.symmetrize();
    let mut v = ComplexMatrix::identity(n);

    let scale = m.frobenius().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q, scale);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[(i, i)]
            .re
            .partial_cmp(&m[(j, j)].re)
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, col)] = v[(i, k)];
        }
    }
    Eigen { values, vectors }
}

/// One Jacobi rotation annihilating m[p,q]. The unitary is a phase on q
/// (making the pivot real) followed by a real Givens rotation.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, scale: f64) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // Below this the rotation angle is under one ulp of the diagonal.
    if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) || r < f64::EPSILON * 1e-6 * scale {
        m[(p, q)] = ZERO;
        m[(q, p)] = ZERO;
        return;
    }
    let phase = apq.conj() / r; // e^{-iφ}
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G restricted to (p,q): [[c, s], [-s·e^{-iφ}, c·e^{-iφ}]]
    let gpp = C64::new(c, 0.0);
    let gpq = C64::new(s, 0.0);
    let gqp = phase * (-s);
    let gqq = phase * c;

    let n = m.dim();
    // A ← A G (columns), V ← V G
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * gpp + akq * gqp;
        m[(k, q)] = akp * gpq + akq * gqq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
    // A ← G† A (rows)
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        m[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;
}
