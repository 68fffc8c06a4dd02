use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // unused when std is linked (tests)
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hermitian::HermitianOperator;
use crate::integrator::OdeState;
use crate::matrix::{self, ComplexMatrix, C64, ZERO};

use super::grid::PhaseSpaceGrid;

/// Largest accepted fraction of the field norm in the two outermost layers.
pub const LEAK_MAX: f64 = 1e-6;
/// Width of the boundary band used by the leakage metric.
pub const LEAK_LAYERS: usize = 2;

/// Ω_W(X, t): one n_s × n_s block per grid point, stored contiguously with
/// R as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerField {
    grid: PhaseSpaceGrid,
    dim: usize,
    values: Vec<C64>,
    time: f64,
}

impl WignerField {
    pub fn zeros(grid: PhaseSpaceGrid, dim: usize) -> Self {
        Self {
            grid,
            dim,
            values: vec![ZERO; grid.n_points() * dim * dim],
            time: 0.0,
        }
    }

    /// Product state ρ₀·g(X) with g a phase-space Gaussian normalised so
    /// that the discrete tilde-trace is one.
    pub fn gaussian(
        rho0: &HermitianOperator,
        center: (f64, f64),
        widths: (f64, f64),
        grid: PhaseSpaceGrid,
    ) -> Result<Self> {
        grid.validate()?;
        let tr = rho0.trace_re();
        if (tr - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalised { trace: tr });
        }
        if !(widths.0 > 0.0 && widths.1 > 0.0) {
            return Err(Error::InvalidParameter(
                "Gaussian widths must be positive".into(),
            ));
        }
        let mut weights = Vec::with_capacity(grid.n_points());
        for i in 0..grid.n_r {
            let dr = (grid.r(i) - center.0) / widths.0;
            for j in 0..grid.n_p {
                let dp = (grid.p(j) - center.1) / widths.1;
                weights.push((-0.5 * (dr * dr + dp * dp)).exp());
            }
        }
        let norm: f64 = weights.iter().sum::<f64>() * grid.cell_volume();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter(
                "Gaussian has no weight on the grid".into(),
            ));
        }
        let n = rho0.dim();
        let mut field = Self::zeros(grid, n);
        let block = rho0.as_slice();
        for (k, w) in weights.iter().enumerate() {
            let g = w / norm;
            for (dst, src) in field.values[k * n * n..(k + 1) * n * n]
                .iter_mut()
                .zip(block)
            {
                *dst = src * g;
            }
        }
        let leak = field.leakage();
        if leak > LEAK_MAX {
            return Err(Error::Leakage {
                leakage: leak,
                limit: LEAK_MAX,
            });
        }
        Ok(field)
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    #[inline]
    pub fn block_len(&self) -> usize {
        self.dim * self.dim
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> &[C64] {
        let b = self.block_len();
        let k = self.grid.index(i, j);
        &self.values[k * b..(k + 1) * b]
    }

    #[inline]
    pub fn point_mut(&mut self, i: usize, j: usize) -> &mut [C64] {
        let b = self.block_len();
        let k = self.grid.index(i, j);
        &mut self.values[k * b..(k + 1) * b]
    }

    pub fn point_matrix(&self, i: usize, j: usize) -> ComplexMatrix {
        ComplexMatrix::from_vec(self.dim, self.point(i, j).to_vec()).expect("block shape is fixed")
    }

    fn blocks(&self) -> impl Iterator<Item = &[C64]> {
        self.values.chunks_exact(self.block_len())
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|z| *z *= c);
        out
    }

    /// Largest |Ω_W(X) − Ω_W(X)†| over the grid.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        self.blocks()
            .map(|b| {
                let mut d = 0.0f64;
                for i in 0..n {
                    for j in i..n {
                        d = d.max((b[i * n + j] - b[j * n + i].conj()).norm());
                    }
                }
                d
            })
            .fold(0.0, f64::max)
    }

    pub fn symmetrize(&mut self) {
        let n = self.dim;
        let b = self.block_len();
        for block in self.values.chunks_exact_mut(b) {
            matrix::symmetrize_slice(block, n);
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// T̃r[Ω_W] = Σ_X Tr′ Ω_W(X) dX.
    pub fn tilde_trace(&self) -> f64 {
        let n = self.dim;
        self.blocks()
            .map(|b| matrix::trace_slice(b, n).re)
            .sum::<f64>()
            * self.grid.cell_volume()
    }

    /// T̃r[Ω_W²].
    pub fn tilde_trace_square(&self) -> f64 {
        let n = self.dim;
        self.blocks()
            .map(|b| matrix::trace_product_slices(b, b, n).re)
            .sum::<f64>()
            * self.grid.cell_volume()
    }

    /// T̃r[Γ Ω_W] for an X-independent operator Γ.
    pub fn tilde_trace_with(&self, op: &ComplexMatrix) -> f64 {
        let n = self.dim;
        let g = op.as_slice();
        self.blocks()
            .map(|b| matrix::trace_product_slices(g, b, n).re)
            .sum::<f64>()
            * self.grid.cell_volume()
    }

    /// T̃r[Γ Ω_W²].
    pub fn tilde_trace_with_square(&self, op: &ComplexMatrix) -> f64 {
        let n = self.dim;
        let g = op.as_slice();
        let mut sq = vec![ZERO; n * n];
        let mut acc = 0.0;
        for b in self.blocks() {
            matrix::matmul_into(b, b, &mut sq, n);
            acc += matrix::trace_product_slices(g, &sq, n).re;
        }
        acc * self.grid.cell_volume()
    }

    /// Ω_S = ∫dX Ω_W(X), the reduced subsystem operator.
    pub fn reduced(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for b in self.blocks() {
            for (o, v) in out.iter_mut().zip(b) {
                *o += v;
            }
        }
        let dx = self.grid.cell_volume();
        ComplexMatrix::from_vec(n, out.into_iter().map(|z| z * dx).collect())
            .expect("block shape is fixed")
    }

    /// Fraction of Σ_X ‖Ω_W(X)‖_F held in the outermost [`LEAK_LAYERS`] layers.
    pub fn leakage(&self) -> f64 {
        let mut edge = 0.0;
        let mut total = 0.0;
        for i in 0..self.grid.n_r {
            for j in 0..self.grid.n_p {
                let w = self
                    .point(i, j)
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                total += w;
                if self.grid.is_boundary(i, j, LEAK_LAYERS) {
                    edge += w;
                }
            }
        }
        if total > 0.0 {
            edge / total
        } else {
            0.0
        }
    }

    /// Phase-space moments weighted by Tr′ Ω_W(X): (⟨R⟩, ⟨P⟩, ⟨δR²⟩, ⟨δP²⟩).
    pub fn moments(&self) -> (f64, f64, f64, f64) {
        let g = &self.grid;
        let n = self.dim;
        let (mut m0, mut mr, mut mp, mut mrr, mut mpp) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..g.n_r {
            let r = g.r(i);
            for j in 0..g.n_p {
                let p = g.p(j);
                let w = matrix::trace_slice(self.point(i, j), n).re;
                m0 += w;
                mr += w * r;
                mp += w * p;
                mrr += w * r * r;
                mpp += w * p * p;
            }
        }
        let (r, p) = (mr / m0, mp / m0);
        (r, p, mrr / m0 - r * r, mpp / m0 - p * p)
    }
}

impl OdeState for WignerField {
    fn axpy(&mut self, s: f64, other: &Self) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b * s;
        }
    }
}

/// Phase-space normalisation constant (2πħ)^N.
pub fn phase_space_unit(hbar: f64, n_dof: usize) -> f64 {
    (2.0 * PI * hbar).powi(n_dof as i32)
}

/// ρ_W = Ω_W / T̃r[Ω_W].
pub fn normalize_field(field: &WignerField) -> Result<WignerField> {
    let z = field.tilde_trace();
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::NonPositiveTrace { trace: z });
    }
    Ok(field.scale(1.0 / z))
}
