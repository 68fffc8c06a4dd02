//! Entropy functionals of the normalised and non-normalised density
//! matrices, and their analytic production rates.
//!
//! With ρ = Ω/Tr Ω:
//!
//! | quantity  | definition                 |
//! |-----------|----------------------------|
//! | S_vN      | −k_B Tr(ρ ln ρ)            |
//! | S_NH      | −k_B Tr(ρ ln Ω)            |
//! | S_lin     | 1 − Tr ρ²                  |
//! | S_lin^NH  | 1 − Tr(ρ Ω)                |
//!
//! Everything spectral for one state comes from a single eigendecomposition
//! of Ω. Γ enters the rates only through its diagonal in that eigenbasis,
//! because every trace involved has the form Tr(Γ f(Ω)).

use alloc::vec::Vec;
#[allow(unused_imports)] // unused when std is linked (tests)
use num_traits::Float;

use crate::dynamics::TOL_NORMALISED;
use crate::error::{Error, Result};
use crate::hermitian::{xlogx, Eigen, HermitianOperator, DEFAULT_EIGEN_FLOOR};
use crate::model::{DensityState, NonHermitianHamiltonian};

/// Eigendecomposition of Ω with its trace, shared by every entropy and rate.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eig: Eigen,
    trace: f64,
    floor: f64,
}

impl Spectrum {
    pub fn of(omega: &HermitianOperator) -> Result<Self> {
        Self::with_floor(omega, DEFAULT_EIGEN_FLOOR)
    }

    pub fn with_floor(omega: &HermitianOperator, floor: f64) -> Result<Self> {
        let eig = omega.check_psd()?;
        let trace = omega.trace_re();
        if !(trace > 0.0) || !trace.is_finite() {
            return Err(Error::NonPositiveTrace { trace });
        }
        Ok(Self { eig, trace, floor })
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.values
    }

    /// Eigenvalues of ρ.
    pub fn probabilities(&self) -> Vec<f64> {
        self.eig.values.iter().map(|&v| v / self.trace).collect()
    }

    /// Tr ρ².
    pub fn purity_rho(&self) -> f64 {
        self.probabilities().iter().map(|p| p * p).sum()
    }

    /// Tr Ω².
    pub fn purity_omega(&self) -> f64 {
        self.eig.values.iter().map(|v| v * v).sum()
    }

    /// −Σ p ln p, without k_B.
    fn vn(&self) -> f64 {
        -self
            .probabilities()
            .iter()
            .map(|&p| xlogx(p, self.floor))
            .sum::<f64>()
    }

    /// −Σ μ ln μ / Tr Ω, without k_B.
    fn nh(&self) -> f64 {
        -self
            .eig
            .values
            .iter()
            .map(|&v| xlogx(v, self.floor))
            .sum::<f64>()
            / self.trace
    }

    /// ⟨u_k|Γ|u_k⟩ for each eigenvector of Ω.
    fn gamma_diag(&self, gamma: &HermitianOperator) -> Vec<f64> {
        self.eig.diagonal_in_basis(gamma.matrix())
    }

    fn ln_floor(&self, v: f64) -> f64 {
        v.max(self.floor).ln()
    }
}

fn check_unit_trace(rho: &HermitianOperator) -> Result<()> {
    let tr = rho.trace_re();
    if (tr - 1.0).abs() > TOL_NORMALISED {
        return Err(Error::NotNormalised { trace: tr });
    }
    Ok(())
}

/// −k_B Tr(ρ ln ρ) for a unit-trace ρ.
pub fn s_vn(rho: &HermitianOperator, kb: f64) -> Result<f64> {
    check_unit_trace(rho)?;
    Ok(kb * Spectrum::of(rho)?.vn())
}

/// −k_B Tr(Ω ln Ω)/Tr Ω.
pub fn s_nh(omega: &HermitianOperator, kb: f64) -> Result<f64> {
    Ok(kb * Spectrum::of(omega)?.nh())
}

/// 1 − Tr ρ² for a unit-trace ρ.
pub fn s_lin(rho: &HermitianOperator) -> Result<f64> {
    check_unit_trace(rho)?;
    Ok(1.0 - rho.trace_product(rho).re)
}

/// 1 − Tr Ω²/Tr Ω.
pub fn s_lin_nh(omega: &HermitianOperator) -> Result<f64> {
    let tr = omega.trace_re();
    if !(tr > 0.0) || !tr.is_finite() {
        return Err(Error::NonPositiveTrace { trace: tr });
    }
    Ok(1.0 - omega.trace_product(omega).re / tr)
}

/// Analytic production rates evaluated from one spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub vn: f64,
    pub nh: f64,
    pub lin: f64,
    pub lin_nh: f64,
}

impl Rates {
    pub fn evaluate(model: &NonHermitianHamiltonian, spec: &Spectrum) -> Self {
        let kb = model.kb();
        let inv_hbar = 1.0 / model.hbar();
        let g = spec.gamma_diag(model.gamma());
        let p = spec.probabilities();
        let mu = spec.eigenvalues();
        let t = spec.trace();

        // Tr(Γρ), Tr(Γρ²), Tr(Γρ ln ρ), Tr(Γρ ln Ω)
        let mut g_rho = 0.0;
        let mut g_rho2 = 0.0;
        let mut g_rho_lnrho = 0.0;
        let mut g_rho_lnomega = 0.0;
        for k in 0..p.len() {
            g_rho += g[k] * p[k];
            g_rho2 += g[k] * p[k] * p[k];
            g_rho_lnrho += g[k] * xlogx(p[k], spec.floor);
            if p[k] > 0.0 {
                g_rho_lnomega += g[k] * p[k] * spec.ln_floor(mu[k]);
            }
        }
        let purity = spec.purity_rho();
        let s_vn = kb * spec.vn();
        let s_nh = kb * spec.nh();

        let vn = 2.0 * kb * inv_hbar * g_rho_lnrho + 2.0 * inv_hbar * g_rho * s_vn;
        let nh = 2.0 * kb * inv_hbar * g_rho_lnomega
            + 2.0 * inv_hbar * g_rho * s_nh
            + 2.0 * kb * inv_hbar * g_rho;
        let lin = 4.0 * inv_hbar * (g_rho2 - g_rho * purity);
        // 4Tr(ΓΩ²)/(ħTrΩ) − 2TrΩ²Tr(ΓΩ)/(ħ(TrΩ)²), rewritten in ρ
        let lin_nh = 4.0 * inv_hbar * t * g_rho2 - 2.0 * inv_hbar * t * purity * g_rho;
        Self {
            vn,
            nh,
            lin,
            lin_nh,
        }
    }
}

/// (2k_B/ħ)Tr(Γρ ln ρ) + (2/ħ)Tr(Γρ)S_vN with ρ = Ω/Tr Ω.
pub fn rate_vn(model: &NonHermitianHamiltonian, omega: &HermitianOperator) -> Result<f64> {
    Ok(Rates::evaluate(model, &spectrum_for(model, omega)?).vn)
}

/// (2k_B/ħ)Tr(Γρ ln Ω) + (2/ħ)Tr(Γρ)S_NH + (2k_B/ħ)Tr(Γρ).
pub fn rate_nh(model: &NonHermitianHamiltonian, omega: &HermitianOperator) -> Result<f64> {
    Ok(Rates::evaluate(model, &spectrum_for(model, omega)?).nh)
}

/// (4/ħ)Tr(Γρ²) − (4/ħ)Tr(Γρ)Tr ρ².
pub fn rate_lin(model: &NonHermitianHamiltonian, omega: &HermitianOperator) -> Result<f64> {
    Ok(Rates::evaluate(model, &spectrum_for(model, omega)?).lin)
}

/// 4Tr(ΓΩ²)/(ħ Tr Ω) − 2 Tr Ω² Tr(ΓΩ)/(ħ (Tr Ω)²).
pub fn rate_lin_nh(model: &NonHermitianHamiltonian, omega: &HermitianOperator) -> Result<f64> {
    Ok(Rates::evaluate(model, &spectrum_for(model, omega)?).lin_nh)
}

fn spectrum_for(model: &NonHermitianHamiltonian, omega: &HermitianOperator) -> Result<Spectrum> {
    if omega.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: omega.dim(),
        });
    }
    Spectrum::of(omega)
}

/// All entropies, rates and purities at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropySample {
    pub time: f64,
    pub trace_omega: f64,
    pub purity_rho: f64,
    pub purity_omega: f64,
    pub s_vn: f64,
    pub s_nh: f64,
    pub s_lin: f64,
    pub s_lin_nh: f64,
    pub rate_vn: f64,
    pub rate_nh: f64,
    pub rate_lin: f64,
    pub rate_lin_nh: f64,
}

impl EntropySample {
    pub fn evaluate(model: &NonHermitianHamiltonian, state: &DensityState) -> Result<Self> {
        Self::at(model, state.omega(), state.time())
    }

    pub fn at(
        model: &NonHermitianHamiltonian,
        omega: &HermitianOperator,
        time: f64,
    ) -> Result<Self> {
        let spec = spectrum_for(model, omega)?;
        let rates = Rates::evaluate(model, &spec);
        let kb = model.kb();
        let purity_rho = spec.purity_rho();
        let purity_omega = spec.purity_omega();
        Ok(Self {
            time,
            trace_omega: spec.trace(),
            purity_rho,
            purity_omega,
            s_vn: kb * spec.vn(),
            s_nh: kb * spec.nh(),
            s_lin: 1.0 - purity_rho,
            s_lin_nh: 1.0 - purity_omega / spec.trace(),
            rate_vn: rates.vn,
            rate_nh: rates.nh,
            rate_lin: rates.lin,
            rate_lin_nh: rates.lin_nh,
        })
    }

    /// |S_vN − S_NH − k_B ln Tr Ω|, zero up to rounding for any state.
    pub fn identity_defect(&self, kb: f64) -> f64 {
        (self.s_vn - self.s_nh - kb * self.trace_omega.ln()).abs()
    }
}
