use alloc::format;

use crate::error::{Error, Result};

/// Smallest number of points per phase-space axis.
pub const MIN_POINTS: usize = 33;

/// Uniform cell-centred grid over one classical degree of freedom X = (R, P).
///
/// Point (i, j) sits at the centre of cell i along R and cell j along P, so
/// sums times `cell_volume()` are midpoint-rule integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_r: usize,
    pub n_p: usize,
}

impl PhaseSpaceGrid {
    pub fn new(r_range: (f64, f64), p_range: (f64, f64), n_r: usize, n_p: usize) -> Result<Self> {
        let g = Self {
            r_min: r_range.0,
            r_max: r_range.1,
            p_min: p_range.0,
            p_max: p_range.1,
            n_r,
            n_p,
        };
        g.validate()?;
        Ok(g)
    }

    /// Square grid [-half_width, half_width]² with `n` points per axis.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new((-half_width, half_width), (-half_width, half_width), n, n)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.r_min, self.r_max, self.p_min, self.p_max]
            .iter()
            .all(|x| x.is_finite());
        if !finite || !(self.r_min < self.r_max) || !(self.p_min < self.p_max) {
            return Err(Error::InvalidGrid(format!(
                "ranges must be finite and increasing: R [{}, {}], P [{}, {}]",
                self.r_min, self.r_max, self.p_min, self.p_max
            )));
        }
        if self.n_r < MIN_POINTS || self.n_p < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_POINTS} points per axis (got {}x{})",
                self.n_r, self.n_p
            )));
        }
        Ok(())
    }

    /// Number of classical degrees of freedom N.
    pub fn n_dof(&self) -> usize {
        1
    }

    #[inline]
    pub fn dr(&self) -> f64 {
        (self.r_max - self.r_min) / self.n_r as f64
    }

    #[inline]
    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.n_p as f64
    }

    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        self.r_min + (i as f64 + 0.5) * self.dr()
    }

    #[inline]
    pub fn p(&self, j: usize) -> f64 {
        self.p_min + (j as f64 + 0.5) * self.dp()
    }

    /// dX = ΔR·ΔP.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.dr() * self.dp()
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.n_r * self.n_p
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_p + j
    }

    /// Whether (i, j) lies within `layers` cells of the edge.
    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize, layers: usize) -> bool {
        i < layers || j < layers || i + layers >= self.n_r || j + layers >= self.n_p
    }
}
