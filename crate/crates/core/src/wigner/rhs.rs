//! Right-hand side of the quantum-classical equation of motion
//!
//! ∂Ω_W/∂t = −(i/ħ)[H_W, Ω_W] + ½𝓑_ab(∂_a H_W)(∂_b Ω_W) − ½𝓑_ab(∂_a Ω_W)(∂_b H_W) − (1/ħ){Γ, Ω_W}
//!
//! with 𝓑 = ((0, 1), (−1, 0)) over X = (R, P). Gradients of Ω_W use
//! fourth-order central differences with zeros outside the grid; gradients
//! of H_W are analytic.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hermitian::HermitianOperator;
use crate::matrix::{self, ComplexMatrix, C64, ZERO};

use super::bath::PhaseSpaceHamiltonian;
use super::field::WignerField;
use super::grid::PhaseSpaceGrid;

/// Runs a closure over every R-row of an output buffer.
///
/// Rows are independent, so implementations may run them in parallel. Each
/// row is computed the same way regardless of scheduling, which keeps
/// results bit-identical across executors.
pub trait RowExecutor {
    fn for_each_row(&self, out: &mut [C64], row_len: usize, f: &(dyn Fn(usize, &mut [C64]) + Sync));
}

/// Runs rows one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl RowExecutor for Sequential {
    fn for_each_row(
        &self,
        out: &mut [C64],
        row_len: usize,
        f: &(dyn Fn(usize, &mut [C64]) + Sync),
    ) {
        for (i, row) in out.chunks_exact_mut(row_len).enumerate() {
            f(i, row);
        }
    }
}

/// ½𝓑_ab(∂_a H)(∂_b Ω) − ½𝓑_ab(∂_a Ω)(∂_b H) for one degree of freedom.
///
/// Arguments are `[∂_R, ∂_P]` pairs. Exchanging the roles of H and Ω flips
/// the sign of the result.
pub fn poisson_term(dh: [&ComplexMatrix; 2], domega: [&ComplexMatrix; 2]) -> Result<ComplexMatrix> {
    let n = dh[0].dim();
    for m in dh.iter().chain(domega.iter()) {
        if m.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.dim(),
            });
        }
    }
    let mut out = ComplexMatrix::zeros(n);
    let mut scratch = vec![ZERO; n * n];
    poisson_into(
        dh[0].as_slice(),
        dh[1].as_slice(),
        domega[0].as_slice(),
        domega[1].as_slice(),
        out.as_mut_slice(),
        &mut scratch,
        n,
    );
    Ok(out)
}

/// out += ½[(H_R Ω_P − H_P Ω_R) − (Ω_R H_P − Ω_P H_R)]
#[inline]
fn poisson_into(
    h_r: &[C64],
    h_p: &[C64],
    om_r: &[C64],
    om_p: &[C64],
    out: &mut [C64],
    scratch: &mut [C64],
    n: usize,
) {
    matrix::matmul_into(h_r, om_p, scratch, n);
    add_scaled(out, scratch, 0.5);
    matrix::matmul_into(h_p, om_r, scratch, n);
    add_scaled(out, scratch, -0.5);
    matrix::matmul_into(om_r, h_p, scratch, n);
    add_scaled(out, scratch, -0.5);
    matrix::matmul_into(om_p, h_r, scratch, n);
    add_scaled(out, scratch, 0.5);
}

#[inline]
fn add_scaled(out: &mut [C64], src: &[C64], s: f64) {
    for (o, v) in out.iter_mut().zip(src) {
        *o += v * s;
    }
}

/// Largest accepted dt·[`WignerRhs::transport_rate`].
pub const CFL_MAX: f64 = 0.25;

/// Fourth-order central-difference weights for offsets −2..=2, divided by 12h.
const STENCIL: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];

/// Precomputed H_W and its gradient on a grid, plus Γ and ħ.
#[derive(Debug, Clone)]
pub struct WignerRhs {
    grid: PhaseSpaceGrid,
    dim: usize,
    hbar: f64,
    gamma: HermitianOperator,
    h: Vec<C64>,
    dh_dr: Vec<C64>,
    dh_dp: Vec<C64>,
}

impl WignerRhs {
    pub fn new<B: PhaseSpaceHamiltonian + ?Sized>(
        bath: &B,
        grid: PhaseSpaceGrid,
        gamma: HermitianOperator,
        hbar: f64,
    ) -> Result<Self> {
        grid.validate()?;
        let n = bath.dim();
        if gamma.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: gamma.dim(),
            });
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter("hbar must be positive".into()));
        }
        let len = grid.n_points() * n * n;
        let (mut h, mut dh_dr, mut dh_dp) = (
            Vec::with_capacity(len),
            Vec::with_capacity(len),
            Vec::with_capacity(len),
        );
        for i in 0..grid.n_r {
            let r = grid.r(i);
            for j in 0..grid.n_p {
                let p = grid.p(j);
                let hw = bath.h_w(r, p);
                if hw.dim() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: hw.dim(),
                    });
                }
                h.extend_from_slice(HermitianOperator::new(hw)?.as_slice());
                dh_dr.extend_from_slice(bath.dh_dr(r, p).as_slice());
                dh_dp.extend_from_slice(bath.dh_dp(r, p).as_slice());
            }
        }
        Ok(Self {
            grid,
            dim: n,
            hbar,
            gamma,
            h,
            dh_dr,
            dh_dp,
        })
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn gamma(&self) -> &HermitianOperator {
        &self.gamma
    }

    fn block(&self, data: &[C64], i: usize, j: usize) -> ComplexMatrix {
        let b = self.dim * self.dim;
        let k = self.grid.index(i, j);
        ComplexMatrix::from_vec(self.dim, data[k * b..(k + 1) * b].to_vec())
            .expect("block shape is fixed")
    }

    /// Transport rate max(max‖∂H/∂P‖/ΔR, max‖∂H/∂R‖/ΔP). The step must
    /// satisfy dt·rate ≤ [`CFL_MAX`].
    pub fn transport_rate(&self) -> f64 {
        let (mut vr, mut vp) = (0.0f64, 0.0f64);
        for i in 0..self.grid.n_r {
            for j in 0..self.grid.n_p {
                vr = vr.max(
                    HermitianOperator::symmetrized(self.block(&self.dh_dp, i, j)).spectral_norm(),
                );
                vp = vp.max(
                    HermitianOperator::symmetrized(self.block(&self.dh_dr, i, j)).spectral_norm(),
                );
            }
        }
        (vr / self.grid.dr()).max(vp / self.grid.dp())
    }

    /// Fastest quantum rate max(‖H_W − Tr′H_W/n_s‖, ‖Γ‖)/ħ. The part of H_W
    /// proportional to the identity drops out of the commutator.
    pub fn quantum_rate(&self) -> f64 {
        let n = self.dim;
        let mut hmax = 0.0f64;
        for i in 0..self.grid.n_r {
            for j in 0..self.grid.n_p {
                let mut hw = self.block(&self.h, i, j);
                let shift = hw.trace().re / n as f64;
                hw.axpy(-shift, &ComplexMatrix::identity(n));
                hmax = hmax.max(HermitianOperator::symmetrized(hw).spectral_norm());
            }
        }
        hmax.max(self.gamma.spectral_norm()) / self.hbar
    }

    /// Rejects a step that violates the transport bound or the quantum guard.
    pub fn check_step(&self, dt: f64) -> Result<()> {
        let product = dt * self.transport_rate();
        if product > CFL_MAX {
            return Err(Error::Unstable {
                dt,
                product,
                limit: CFL_MAX,
            });
        }
        crate::integrator::check_stability(dt, self.quantum_rate())
    }

    fn check_field(&self, field: &WignerField) -> Result<()> {
        if field.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: field.dim(),
            });
        }
        if *field.grid() != self.grid {
            return Err(Error::InvalidGrid(
                "field and Hamiltonian grids differ".into(),
            ));
        }
        Ok(())
    }

    /// Evaluates the right-hand side for one R-row into `out`
    /// (length n_p·n_s²).
    pub fn eval_row(&self, field: &WignerField, i: usize, out: &mut [C64]) {
        let n = self.dim;
        let b = n * n;
        let g = &self.grid;
        let inv_hbar = 1.0 / self.hbar;
        let (inv_12dr, inv_12dp) = (1.0 / (12.0 * g.dr()), 1.0 / (12.0 * g.dp()));
        let gamma = self.gamma.as_slice();
        let values = field.values();

        let mut om_r = vec![ZERO; b];
        let mut om_p = vec![ZERO; b];
        let mut scratch = vec![ZERO; b];

        for j in 0..g.n_p {
            let k = g.index(i, j);
            let om = &values[k * b..(k + 1) * b];
            let dst = &mut out[j * b..(j + 1) * b];

            // finite-difference gradients, zero beyond the grid
            om_r.iter_mut().for_each(|z| *z = ZERO);
            om_p.iter_mut().for_each(|z| *z = ZERO);
            for (s, &w) in STENCIL.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let off = s as isize - 2;
                let ii = i as isize + off;
                if ii >= 0 && (ii as usize) < g.n_r {
                    let kk = g.index(ii as usize, j);
                    add_scaled(&mut om_r, &values[kk * b..(kk + 1) * b], w * inv_12dr);
                }
                let jj = j as isize + off;
                if jj >= 0 && (jj as usize) < g.n_p {
                    let kk = g.index(i, jj as usize);
                    add_scaled(&mut om_p, &values[kk * b..(kk + 1) * b], w * inv_12dp);
                }
            }

            let h = &self.h[k * b..(k + 1) * b];
            matrix::commutator_into(h, om, &mut scratch, n);
            for (d, c) in dst.iter_mut().zip(&scratch) {
                *d = C64::new(c.im * inv_hbar, -c.re * inv_hbar); // −(i/ħ)·c
            }
            matrix::anticommutator_into(gamma, om, &mut scratch, n);
            add_scaled(dst, &scratch, -inv_hbar);
            poisson_into(
                &self.dh_dr[k * b..(k + 1) * b],
                &self.dh_dp[k * b..(k + 1) * b],
                &om_r,
                &om_p,
                dst,
                &mut scratch,
                n,
            );
        }
    }

    pub fn eval_with<E: RowExecutor + ?Sized>(
        &self,
        field: &WignerField,
        exec: &E,
    ) -> Result<WignerField> {
        self.check_field(field)?;
        let mut out = WignerField::zeros(self.grid, self.dim);
        out.set_time(field.time());
        let row_len = self.grid.n_p * self.dim * self.dim;
        exec.for_each_row(out.values_mut(), row_len, &|i, row| {
            self.eval_row(field, i, row)
        });
        Ok(out)
    }
}

/// Sequential evaluation of the right-hand side over the whole grid.
pub fn rhs_omega_w(rhs: &WignerRhs, field: &WignerField) -> Result<WignerField> {
    rhs.eval_with(field, &Sequential)
}
