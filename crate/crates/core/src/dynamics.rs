//! Time propagation of the non-normalised density matrix.
//!
//! The primary path integrates the linear equation
//! dΩ/dt = −(i/ħ)[H, Ω] − (1/ħ){Γ, Ω}
//! and obtains ρ = Ω / Tr Ω by normalisation. The nonlinear equation for ρ,
//! dρ/dt = −(i/ħ)[H, ρ] − (1/ħ){Γ, ρ} + (2/ħ)ρ Tr(Γρ),
//! is integrated separately only as a cross-check.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hermitian::HermitianOperator;
use crate::integrator::{check_stability, rk4_step, IntegratorSpec};
use crate::matrix::{anticommutator, commutator, ComplexMatrix, C64};
use crate::model::{DensityState, NonHermitianHamiltonian};

/// Trace tolerance for inputs to [`rhs_rho`].
pub const TOL_NORMALISED: f64 = 1e-9;

fn check_dim(model: &NonHermitianHamiltonian, a: &ComplexMatrix) -> Result<()> {
    if a.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: a.dim(),
        });
    }
    Ok(())
}

fn rhs_omega_raw(model: &NonHermitianHamiltonian, omega: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dim(model, omega)?;
    let inv_hbar = 1.0 / model.hbar();
    let mut out = commutator(model.h(), omega)?.scale_complex(C64::new(0.0, -inv_hbar));
    out.axpy(-inv_hbar, &anticommutator(model.gamma(), omega)?);
    Ok(out)
}

/// −(i/ħ)[H, Ω] − (1/ħ){Γ, Ω}.
pub fn rhs_omega(
    model: &NonHermitianHamiltonian,
    omega: &HermitianOperator,
) -> Result<HermitianOperator> {
    rhs_omega_raw(model, omega).map(HermitianOperator::symmetrized)
}

fn rhs_rho_raw(model: &NonHermitianHamiltonian, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let tr = rho.trace().re;
    if (tr - 1.0).abs() > TOL_NORMALISED {
        return Err(Error::NotNormalised { trace: tr });
    }
    let mut out = rhs_omega_raw(model, rho)?;
    let feedback = 2.0 / model.hbar() * model.gamma().trace_product(rho).re;
    out.axpy(feedback, rho);
    Ok(out)
}

/// −(i/ħ)[H, ρ] − (1/ħ){Γ, ρ} + (2/ħ)ρ Tr(Γρ); requires Tr ρ = 1.
pub fn rhs_rho(
    model: &NonHermitianHamiltonian,
    rho: &HermitianOperator,
) -> Result<HermitianOperator> {
    rhs_rho_raw(model, rho).map(HermitianOperator::symmetrized)
}

/// ρ = Ω / Tr Ω.
pub fn normalize(state: &DensityState) -> Result<HermitianOperator> {
    normalize_operator(state.omega())
}

pub fn normalize_operator(omega: &HermitianOperator) -> Result<HermitianOperator> {
    let tr = omega.trace_re();
    if !(tr > 0.0) || !tr.is_finite() {
        return Err(Error::NonPositiveTrace { trace: tr });
    }
    Ok(omega.scale(1.0 / tr))
}

/// Fastest rate max(‖H‖, ‖Γ‖)/ħ entering the step-size guard.
pub fn generator_rate(model: &NonHermitianHamiltonian) -> f64 {
    model.h().spectral_norm().max(model.gamma().spectral_norm()) / model.hbar()
}

/// One RK4 step of the Ω equation. The result is symmetrized and
/// PSD-checked; `dt = 0` returns the input unchanged.
pub fn step_rk4(
    model: &NonHermitianHamiltonian,
    state: &DensityState,
    dt: f64,
) -> Result<DensityState> {
    if dt == 0.0 {
        return Ok(state.clone());
    }
    check_stability(dt, generator_rate(model))?;
    step_unchecked(model, state, dt)
}

fn step_unchecked(
    model: &NonHermitianHamiltonian,
    state: &DensityState,
    dt: f64,
) -> Result<DensityState> {
    let next = rk4_step(state.omega().matrix(), dt, |om| rhs_omega_raw(model, om))?;
    let omega = HermitianOperator::symmetrized(next);
    let eig = omega.eigh();
    DensityState::from_checked(omega, &eig, state.time() + dt)
}

/// Stepper over the Ω equation with a fixed step size. The stability guard
/// is evaluated once at construction.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    model: &'a NonHermitianHamiltonian,
    state: DensityState,
    dt: f64,
    step: usize,
}

impl<'a> Propagator<'a> {
    pub fn new(model: &'a NonHermitianHamiltonian, initial: DensityState, dt: f64) -> Result<Self> {
        if initial.dim() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                found: initial.dim(),
            });
        }
        check_stability(dt, generator_rate(model))?;
        Ok(Self {
            model,
            state: initial,
            dt,
            step: 0,
        })
    }

    pub fn state(&self) -> &DensityState {
        &self.state
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn advance(&mut self) -> Result<&DensityState> {
        let next = step_unchecked(self.model, &self.state, self.dt)?;
        self.step += 1;
        // Recompute the time from the step count to avoid summation drift.
        self.state = next.with_time(self.step as f64 * self.dt);
        Ok(&self.state)
    }
}

/// Sampled solution of the Ω equation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<DensityState>,
    pub model: NonHermitianHamiltonian,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(DensityState::time).collect()
    }

    pub fn traces(&self) -> Vec<f64> {
        self.samples.iter().map(DensityState::trace).collect()
    }

    pub fn last(&self) -> &DensityState {
        self.samples
            .last()
            .expect("trajectory always holds the initial state")
    }
}

/// Runs `spec.steps` RK4 steps and returns all `steps + 1` states.
pub fn propagate(
    model: &NonHermitianHamiltonian,
    initial: DensityState,
    spec: &IntegratorSpec,
) -> Result<Trajectory> {
    let mut samples = Vec::with_capacity(spec.steps + 1);
    samples.push(initial.clone());
    if spec.steps > 0 {
        let mut prop = Propagator::new(model, initial, spec.dt)?;
        for _ in 0..spec.steps {
            samples.push(prop.advance()?.clone());
        }
    }
    Ok(Trajectory {
        samples,
        model: model.clone(),
    })
}

/// Integrates the nonlinear ρ equation directly (cross-check path).
pub fn propagate_rho(
    model: &NonHermitianHamiltonian,
    rho0: &HermitianOperator,
    spec: &IntegratorSpec,
) -> Result<Vec<HermitianOperator>> {
    check_dim(model, rho0)?;
    check_stability(spec.dt, generator_rate(model))?;
    let mut out = Vec::with_capacity(spec.steps + 1);
    let mut rho = rho0.clone();
    out.push(rho.clone());
    for _ in 0..spec.steps {
        let next = rk4_step(rho.matrix(), spec.dt, |r| rhs_rho_raw(model, r))?;
        rho = HermitianOperator::symmetrized(next);
        out.push(rho.clone());
    }
    Ok(out)
}
