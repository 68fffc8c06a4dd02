//! Partially Wigner-transformed Hamiltonians H_W(R, P).

use crate::error::{Error, Result};
use crate::hermitian::HermitianOperator;
use crate::matrix::ComplexMatrix;

/// An operator-valued phase-space function H_W(X) and its gradient.
pub trait PhaseSpaceHamiltonian: Sync {
    /// Subsystem dimension n_s.
    fn dim(&self) -> usize;
    fn h_w(&self, r: f64, p: f64) -> ComplexMatrix;
    fn dh_dr(&self, r: f64, p: f64) -> ComplexMatrix;
    fn dh_dp(&self, r: f64, p: f64) -> ComplexMatrix;
}

/// Classical bath potential V_b(R).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BathPotential {
    /// V = ½ M ω² R².
    Harmonic { omega: f64 },
    /// V = barrier·((R/r0)² − 1)².
    DoubleWell { barrier: f64, r0: f64 },
    /// V = 0.
    Free,
}

impl BathPotential {
    pub fn value(&self, r: f64, mass: f64) -> f64 {
        match *self {
            Self::Harmonic { omega } => 0.5 * mass * omega * omega * r * r,
            Self::DoubleWell { barrier, r0 } => {
                let u = (r / r0) * (r / r0) - 1.0;
                barrier * u * u
            }
            Self::Free => 0.0,
        }
    }

    pub fn derivative(&self, r: f64, mass: f64) -> f64 {
        match *self {
            Self::Harmonic { omega } => mass * omega * omega * r,
            Self::DoubleWell { barrier, r0 } => {
                let u = (r / r0) * (r / r0) - 1.0;
                4.0 * barrier * u * r / (r0 * r0)
            }
            Self::Free => 0.0,
        }
    }
}

/// H_W(R, P) = (P²/2M + V_b(R))·I + h_s + λR·C.
///
/// `h_s` is the subsystem Hamiltonian and C the coupling operator; the
/// coupling profile V_c(R) = λR is linear in the bath coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    pub h_s: HermitianOperator,
    pub mass: f64,
    pub potential: BathPotential,
    pub coupling_strength: f64,
    pub coupling_op: HermitianOperator,
}

impl BathSpec {
    pub fn new(
        h_s: HermitianOperator,
        mass: f64,
        potential: BathPotential,
        coupling_strength: f64,
        coupling_op: HermitianOperator,
    ) -> Result<Self> {
        if h_s.dim() != coupling_op.dim() {
            return Err(Error::DimensionMismatch {
                expected: h_s.dim(),
                found: coupling_op.dim(),
            });
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter("bath mass must be positive".into()));
        }
        if !coupling_strength.is_finite() {
            return Err(Error::InvalidParameter(
                "coupling strength must be finite".into(),
            ));
        }
        match potential {
            BathPotential::Harmonic { omega } if !omega.is_finite() => {
                return Err(Error::InvalidParameter(
                    "harmonic frequency must be finite".into(),
                ))
            }
            BathPotential::DoubleWell { barrier, r0 }
                if !(r0 != 0.0 && r0.is_finite() && barrier.is_finite()) =>
            {
                return Err(Error::InvalidParameter(
                    "double well needs finite barrier and nonzero r0".into(),
                ))
            }
            _ => {}
        }
        Ok(Self {
            h_s,
            mass,
            potential,
            coupling_strength,
            coupling_op,
        })
    }

    /// Uncoupled bath with a given subsystem Hamiltonian.
    pub fn uncoupled(h_s: HermitianOperator, mass: f64, potential: BathPotential) -> Result<Self> {
        let n = h_s.dim();
        Self::new(h_s, mass, potential, 0.0, HermitianOperator::zeros(n))
    }
}

impl PhaseSpaceHamiltonian for BathSpec {
    fn dim(&self) -> usize {
        self.h_s.dim()
    }

    fn h_w(&self, r: f64, p: f64) -> ComplexMatrix {
        let n = self.dim();
        let scalar = 0.5 * p * p / self.mass + self.potential.value(r, self.mass);
        let mut h = ComplexMatrix::identity(n).scale(scalar);
        h += self.h_s.matrix();
        h.axpy(self.coupling_strength * r, self.coupling_op.matrix());
        h
    }

    fn dh_dr(&self, r: f64, _p: f64) -> ComplexMatrix {
        let n = self.dim();
        let mut d = ComplexMatrix::identity(n).scale(self.potential.derivative(r, self.mass));
        d.axpy(self.coupling_strength, self.coupling_op.matrix());
        d
    }

    fn dh_dp(&self, _r: f64, p: f64) -> ComplexMatrix {
        ComplexMatrix::identity(self.dim()).scale(p / self.mass)
    }
}
