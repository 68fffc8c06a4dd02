//! Non-Hermitian Hamiltonians H − iΓ and non-normalised density states.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hermitian::{Eigen, HermitianOperator};
use crate::matrix::{ComplexMatrix, C64};

/// The pair (H, Γ) of Hermitian operators making up 𝓗 = H − iΓ, together with
/// the unit constants ħ and k_B.
#[derive(Debug, Clone, PartialEq)]
pub struct NonHermitianHamiltonian {
    h: HermitianOperator,
    gamma: HermitianOperator,
    hbar: f64,
    kb: f64,
}

impl NonHermitianHamiltonian {
    pub fn new(h: HermitianOperator, gamma: HermitianOperator) -> Result<Self> {
        Self::with_units(h, gamma, 1.0, 1.0)
    }

    pub fn with_units(
        h: HermitianOperator,
        gamma: HermitianOperator,
        hbar: f64,
        kb: f64,
    ) -> Result<Self> {
        if h.dim() != gamma.dim() {
            return Err(Error::DimensionMismatch {
                expected: h.dim(),
                found: gamma.dim(),
            });
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter("hbar must be positive".into()));
        }
        if !(kb > 0.0 && kb.is_finite()) {
            return Err(Error::InvalidParameter("kB must be positive".into()));
        }
        Ok(Self { h, gamma, hbar, kb })
    }

    /// Γ = (ħγ₀/2)·I, the constant decay model with closed-form solutions.
    pub fn constant_decay(h: HermitianOperator, gamma0: f64, hbar: f64, kb: f64) -> Result<Self> {
        let n = h.dim();
        let gamma = HermitianOperator::identity(n).scale(0.5 * hbar * gamma0);
        Self::with_units(h, gamma, hbar, kb)
    }

    pub fn h(&self) -> &HermitianOperator {
        &self.h
    }

    pub fn gamma(&self) -> &HermitianOperator {
        &self.gamma
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn kb(&self) -> f64 {
        self.kb
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// γ₀ if Γ is exactly a multiple of the identity, i.e. Γ = (ħγ₀/2)I.
    pub fn constant_decay_rate(&self) -> Option<f64> {
        let n = self.dim();
        let g = self.gamma.matrix();
        let g00 = g[(0, 0)].re;
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { g00 } else { 0.0 };
                if (g[(i, j)] - C64::new(expected, 0.0)).norm() > 1e-14 * g00.abs().max(1e-300) {
                    return None;
                }
            }
        }
        Some(2.0 * g00 / self.hbar)
    }
}

/// Non-normalised density matrix Ω at a given time.
///
/// Invariants: Hermitian, positive semidefinite up to `TOL_PSD`, real
/// positive trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    omega: HermitianOperator,
    trace: f64,
    time: f64,
}

impl DensityState {
    pub fn new(omega: HermitianOperator, time: f64) -> Result<Self> {
        let eig = omega.check_psd()?;
        Self::from_checked(omega, &eig, time)
    }

    /// Builds a state whose PSD check has already been done with `eig`.
    pub(crate) fn from_checked(omega: HermitianOperator, eig: &Eigen, time: f64) -> Result<Self> {
        eig.check_psd()?;
        let trace = omega.trace_re();
        if !(trace > 0.0) || !trace.is_finite() {
            return Err(Error::NonPositiveTrace { trace });
        }
        Ok(Self { omega, trace, time })
    }

    /// Pure initial state |ψ⟩⟨ψ| with unit trace.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        Self::new(HermitianOperator::pure_state(psi)?, 0.0)
    }

    /// Σ_k P_k |k⟩⟨k| in the computational basis. Probabilities must be
    /// nonnegative and sum to one.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::mixture(
            &probabilities
                .iter()
                .enumerate()
                .map(|(k, &p)| {
                    let mut v = alloc::vec![C64::new(0.0, 0.0); probabilities.len()];
                    v[k] = C64::new(1.0, 0.0);
                    (p, v)
                })
                .collect::<Vec<_>>(),
        )
    }

    /// Σ_k P_k |Ψ^k⟩⟨Ψ^k| for normalised vectors |Ψ^k⟩ and occurrence
    /// probabilities P_k summing to one.
    pub fn mixture(components: &[(f64, Vec<C64>)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let n = first.1.len();
        let mut total = 0.0;
        let mut omega = ComplexMatrix::zeros(n);
        for (p, psi) in components {
            if psi.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: psi.len(),
                });
            }
            if !(*p >= 0.0) {
                return Err(Error::InvalidParameter(
                    "probabilities must be nonnegative".into(),
                ));
            }
            total += p;
            omega.axpy(*p, HermitianOperator::pure_state(psi)?.matrix());
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "probabilities must sum to 1".into(),
            ));
        }
        Self::new(HermitianOperator::symmetrized(omega), 0.0)
    }

    pub fn omega(&self) -> &HermitianOperator {
        &self.omega
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    /// Tr Ω².
    pub fn purity(&self) -> f64 {
        self.omega.trace_product(&self.omega).re
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }
}
