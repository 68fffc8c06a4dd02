//! A quantum subsystem coupled to one classical degree of freedom, described
//! by the partially Wigner-transformed operator Ω_W(R, P) on a phase-space grid.
//!
//! T̃r denotes the partial trace over the subsystem together with the
//! phase-space integral. K = (2πħ)^N is the phase-space unit.

mod bath;
mod field;
mod grid;
mod rhs;

use alloc::vec::Vec;

pub use bath::{BathPotential, BathSpec, PhaseSpaceHamiltonian};
pub use field::{normalize_field, phase_space_unit, WignerField, LEAK_LAYERS, LEAK_MAX};
pub use grid::{PhaseSpaceGrid, MIN_POINTS};
pub use rhs::{poisson_term, rhs_omega_w, RowExecutor, Sequential, WignerRhs, CFL_MAX};

use crate::error::{Error, Result};
use crate::integrator::{rk4_step, IntegratorSpec};
use crate::matrix::ComplexMatrix;

fn positive_trace(field: &WignerField) -> Result<f64> {
    let z = field.tilde_trace();
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::NonPositiveTrace { trace: z });
    }
    Ok(z)
}

/// S_lin,W = 1 − K·T̃r[ρ_W²].
pub fn s_lin_w(field: &WignerField, hbar: f64) -> Result<f64> {
    let z = positive_trace(field)?;
    Ok(1.0 - phase_space_unit(hbar, field.grid().n_dof()) * field.tilde_trace_square() / (z * z))
}

/// S_lin,W^NH = 1 − K·T̃r[ρ_W Ω_W] = 1 − K·T̃r[Ω_W²]/T̃r[Ω_W].
pub fn s_lin_w_nh(field: &WignerField, hbar: f64) -> Result<f64> {
    let z = positive_trace(field)?;
    Ok(1.0 - phase_space_unit(hbar, field.grid().n_dof()) * field.tilde_trace_square() / z)
}

/// Ṡ_lin,W = (4K/ħ){T̃r[Γρ_W²] − T̃r[Γρ_W]·T̃r[ρ_W²]}.
///
/// Exact time derivative of [`s_lin_w`] along the semi-discrete dynamics.
pub fn rate_s_lin_w(field: &WignerField, gamma: &ComplexMatrix, hbar: f64) -> Result<f64> {
    let z = positive_trace(field)?;
    let k = phase_space_unit(hbar, field.grid().n_dof());
    let g_sq = field.tilde_trace_with_square(gamma) / (z * z);
    let g = field.tilde_trace_with(gamma) / z;
    let sq = field.tilde_trace_square() / (z * z);
    Ok(4.0 * k / hbar * (g_sq - g * sq))
}

/// Ṡ_lin,W^NH = (4K/ħ)T̃r[Γρ_W Ω_W] − (2K/ħ)T̃r[ΓΩ_W]·T̃r[ρ_W²].
pub fn rate_s_lin_w_nh(field: &WignerField, gamma: &ComplexMatrix, hbar: f64) -> Result<f64> {
    let z = positive_trace(field)?;
    let k = phase_space_unit(hbar, field.grid().n_dof());
    let g_sq = field.tilde_trace_with_square(gamma) / z;
    let g = field.tilde_trace_with(gamma);
    let sq = field.tilde_trace_square() / (z * z);
    Ok(4.0 * k / hbar * g_sq - 2.0 * k / hbar * g * sq)
}

/// (4K/ħ){Tr′[Γρ_S²] − Tr′[Γρ_S]·Tr′[ρ_S²]} with ρ_S = ∫dX ρ_W.
///
/// Agrees with [`rate_s_lin_w`] when Γ ∝ I; for correlated states the two
/// differ because T̃r[Γρ_W²] ≠ Tr′[Γρ_S²].
pub fn rate_s_lin_w_reduced(field: &WignerField, gamma: &ComplexMatrix, hbar: f64) -> Result<f64> {
    let z = positive_trace(field)?;
    let k = phase_space_unit(hbar, field.grid().n_dof());
    let rho = field.reduced().scale(1.0 / z);
    let rho_sq = rho.matmul(&rho);
    let g_sq = gamma.trace_product(&rho_sq).re;
    let g = gamma.trace_product(&rho).re;
    Ok(4.0 * k / hbar * (g_sq - g * rho_sq.trace().re))
}

/// (4K/ħ)Tr′[Γρ_S Ω_S] − (2K/ħ)Tr′[ΓΩ_S]·Tr′[ρ_S²] with Ω_S = ∫dX Ω_W.
pub fn rate_s_lin_w_nh_reduced(
    field: &WignerField,
    gamma: &ComplexMatrix,
    hbar: f64,
) -> Result<f64> {
    let z = positive_trace(field)?;
    let k = phase_space_unit(hbar, field.grid().n_dof());
    let omega = field.reduced();
    let rho = omega.scale(1.0 / z);
    let g_ro = gamma.trace_product(&rho.matmul(&omega)).re;
    let g_o = gamma.trace_product(&omega).re;
    let rho_sq = rho.trace_product(&rho).re;
    Ok(4.0 * k / hbar * g_ro - 2.0 * k / hbar * g_o * rho_sq)
}

/// Scalar observables of a field at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerSample {
    pub time: f64,
    pub tilde_trace: f64,
    /// K·T̃r[ρ_W²]
    pub purity_w: f64,
    /// K·T̃r[Ω_W²]
    pub purity_omega_w: f64,
    pub s_lin_w: f64,
    pub s_lin_w_nh: f64,
    pub rate_s_lin_w: f64,
    pub rate_s_lin_w_nh: f64,
    pub leakage: f64,
}

impl WignerSample {
    pub fn evaluate(field: &WignerField, gamma: &ComplexMatrix, hbar: f64) -> Result<Self> {
        let z = positive_trace(field)?;
        let k = phase_space_unit(hbar, field.grid().n_dof());
        let sq = k * field.tilde_trace_square();
        Ok(Self {
            time: field.time(),
            tilde_trace: z,
            purity_w: sq / (z * z),
            purity_omega_w: sq,
            s_lin_w: 1.0 - sq / (z * z),
            s_lin_w_nh: 1.0 - sq / z,
            rate_s_lin_w: rate_s_lin_w(field, gamma, hbar)?,
            rate_s_lin_w_nh: rate_s_lin_w_nh(field, gamma, hbar)?,
            leakage: field.leakage(),
        })
    }
}

/// Step-by-step RK4 propagation of a field with guards and leakage checks.
pub struct FieldPropagator<'a, E: RowExecutor + ?Sized> {
    rhs: &'a WignerRhs,
    exec: &'a E,
    field: WignerField,
    t_start: f64,
    dt: f64,
    step: usize,
}

impl<'a, E: RowExecutor + ?Sized> FieldPropagator<'a, E> {
    pub fn new(rhs: &'a WignerRhs, initial: WignerField, dt: f64, exec: &'a E) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(
                "dt must be positive and finite".into(),
            ));
        }
        if initial.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                expected: rhs.dim(),
                found: initial.dim(),
            });
        }
        if initial.grid() != rhs.grid() {
            return Err(Error::InvalidGrid(
                "field and Hamiltonian grids differ".into(),
            ));
        }
        rhs.check_step(dt)?;
        let t_start = initial.time();
        Ok(Self {
            rhs,
            exec,
            field: initial,
            t_start,
            dt,
            step: 0,
        })
    }

    pub fn field(&self) -> &WignerField {
        &self.field
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn into_field(self) -> WignerField {
        self.field
    }

    pub fn advance(&mut self) -> Result<&WignerField> {
        let mut next = rk4_step(&self.field, self.dt, |y| self.rhs.eval_with(y, self.exec))?;
        next.symmetrize();
        if next
            .values()
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let leak = next.leakage();
        if leak > LEAK_MAX {
            return Err(Error::Leakage {
                leakage: leak,
                limit: LEAK_MAX,
            });
        }
        self.step += 1;
        // time from the step count avoids accumulated rounding
        next.set_time(self.t_start + self.step as f64 * self.dt);
        self.field = next;
        Ok(&self.field)
    }
}

/// Propagates `initial` for `spec.steps` steps, returning snapshots at
/// t = 0 and after every `snapshot_every` steps.
pub fn propagate_field<E: RowExecutor + ?Sized>(
    rhs: &WignerRhs,
    initial: WignerField,
    spec: &IntegratorSpec,
    snapshot_every: usize,
    exec: &E,
) -> Result<Vec<WignerField>> {
    if snapshot_every == 0 {
        return Err(Error::InvalidParameter(
            "snapshot interval must be at least 1".into(),
        ));
    }
    let mut prop = FieldPropagator::new(rhs, initial, spec.dt, exec)?;
    let mut out = Vec::with_capacity(spec.steps / snapshot_every + 1);
    out.push(prop.field().clone());
    for s in 1..=spec.steps {
        prop.advance()?;
        if s % snapshot_every == 0 {
            out.push(prop.field().clone());
        }
    }
    Ok(out)
}
