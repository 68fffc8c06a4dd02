//! Closed-form solutions for the constant decay operator Γ = (ħγ₀/2)·I.
//!
//! The oracle only consumes scalars measured from the initial state, never a
//! trajectory, so it stays independent of the integrators it checks. All
//! forms assume Tr Ω(0) = 1.

#[allow(unused_imports)] // unused when std is linked (tests)
use num_traits::Float;

/// Scalars characterising a constant-decay run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantDecayModel {
    /// γ₀ (inverse time). Negative values describe a source.
    pub gamma0: f64,
    /// S_vN at t = 0, in k_B units (already multiplied by k_B).
    pub s_vn0: f64,
    /// Tr Ω²(0).
    pub purity_omega0: f64,
    /// (2πħ)^N T̃r[Ω_W²(0)] for a phase-space run. For a purely quantum run
    /// (N = 0) this coincides with `purity_omega0`.
    pub wigner_prefactor: f64,
}

impl ConstantDecayModel {
    pub fn quantum(gamma0: f64, s_vn0: f64, purity_omega0: f64) -> Self {
        Self {
            gamma0,
            s_vn0,
            purity_omega0,
            wigner_prefactor: purity_omega0,
        }
    }

    pub fn quantum_classical(
        gamma0: f64,
        s_vn0: f64,
        purity_omega0: f64,
        wigner_prefactor: f64,
    ) -> Self {
        Self {
            gamma0,
            s_vn0,
            purity_omega0,
            wigner_prefactor,
        }
    }

    fn decay(&self, t: f64) -> f64 {
        (-self.gamma0 * t).exp()
    }
}

/// Tr Ω(t) = e^{−γ₀t}.
pub fn analytic_trace(m: &ConstantDecayModel, t: f64) -> f64 {
    m.decay(t)
}

/// S_vN(t) = S_vN(0).
pub fn analytic_s_vn(m: &ConstantDecayModel, _t: f64) -> f64 {
    m.s_vn0
}

/// S_NH(t) = S_vN(0) + k_B γ₀ t.
pub fn analytic_s_nh(m: &ConstantDecayModel, t: f64, kb: f64) -> f64 {
    m.s_vn0 + kb * m.gamma0 * t
}

/// S_lin(t) = 1 − Tr ρ²(0); with Tr Ω(0) = 1, Tr ρ²(0) = Tr Ω²(0).
pub fn analytic_s_lin(m: &ConstantDecayModel, _t: f64) -> f64 {
    1.0 - m.purity_omega0
}

/// (1 − e^{−γ₀t})·Tr Ω²(0).
///
/// This is the time integral of the S_lin^NH production rate from 0 to t,
/// so it equals S_lin^NH(t) itself only for a pure initial state, where
/// S_lin^NH(0) = 0. See [`analytic_s_lin_nh_from_initial`] for mixed starts.
pub fn analytic_s_lin_nh(m: &ConstantDecayModel, t: f64) -> f64 {
    (1.0 - m.decay(t)) * m.purity_omega0
}

/// S_lin^NH(t) = S_lin^NH(0) + (1 − e^{−γ₀t})·Tr Ω²(0) = 1 − Tr Ω²(0)e^{−γ₀t}.
pub fn analytic_s_lin_nh_from_initial(m: &ConstantDecayModel, t: f64) -> f64 {
    (1.0 - m.purity_omega0) + analytic_s_lin_nh(m, t)
}

/// Ṡ_lin^NH(t) = γ₀ Tr Ω²(0) e^{−γ₀t}.
pub fn analytic_rate_s_lin_nh(m: &ConstantDecayModel, t: f64) -> f64 {
    m.gamma0 * m.purity_omega0 * m.decay(t)
}

/// T̃r[Ω_W(t)] = e^{−γ₀t}.
pub fn analytic_qc_trace(m: &ConstantDecayModel, t: f64) -> f64 {
    m.decay(t)
}

/// (2πħ)^N T̃r[Ω_W²(0)]·(1 − e^{−γ₀t}).
///
/// As in the quantum case this is the accumulated increase of S_lin,W^NH;
/// it equals the entropy itself when the prefactor is 1.
pub fn analytic_qc_s_lin_nh(m: &ConstantDecayModel, t: f64) -> f64 {
    m.wigner_prefactor * (1.0 - m.decay(t))
}

/// S_lin,W^NH(0) + (2πħ)^N T̃r[Ω_W²(0)]·(1 − e^{−γ₀t}).
pub fn analytic_qc_s_lin_nh_from_initial(m: &ConstantDecayModel, t: f64) -> f64 {
    (1.0 - m.wigner_prefactor) + analytic_qc_s_lin_nh(m, t)
}
