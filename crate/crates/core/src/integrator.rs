//! Fixed-step classical Runge–Kutta.

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Vector-space operations the integrator needs.
pub trait OdeState: Clone {
    /// `self += s * other`
    fn axpy(&mut self, s: f64, other: &Self);
}

impl OdeState for ComplexMatrix {
    fn axpy(&mut self, s: f64, other: &Self) {
        ComplexMatrix::axpy(self, s, other)
    }
}

/// One classical fourth-order Runge–Kutta step for an autonomous system.
pub fn rk4_step<S, E>(
    y: &S,
    dt: f64,
    mut f: impl FnMut(&S) -> core::result::Result<S, E>,
) -> core::result::Result<S, E>
where
    S: OdeState,
{
    let k1 = f(y)?;
    let mut y2 = y.clone();
    y2.axpy(0.5 * dt, &k1);
    let k2 = f(&y2)?;
    let mut y3 = y.clone();
    y3.axpy(0.5 * dt, &k2);
    let k3 = f(&y3)?;
    let mut y4 = y.clone();
    y4.axpy(dt, &k3);
    let k4 = f(&y4)?;

    let mut out = y.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    Rk4,
}

/// Time step, step count and scheme for a fixed-step run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSpec {
    pub dt: f64,
    pub steps: usize,
    pub scheme: Scheme,
}

/// dt·scale above this logs a warning.
pub const STABILITY_WARN: f64 = 0.1;
/// dt·scale above this is rejected.
pub const STABILITY_MAX: f64 = 0.5;

impl IntegratorSpec {
    pub fn new(dt: f64, steps: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(
                "dt must be positive and finite".into(),
            ));
        }
        Ok(Self {
            dt,
            steps,
            scheme: Scheme::Rk4,
        })
    }

    pub fn final_time(&self) -> f64 {
        self.dt * self.steps as f64
    }
}

/// Guard on dt·rate where `rate` is the fastest frequency of the generator.
pub fn check_stability(dt: f64, rate: f64) -> Result<()> {
    let product = dt * rate;
    if product > STABILITY_MAX {
        return Err(Error::Unstable {
            dt,
            product,
            limit: STABILITY_MAX,
        });
    }
    if product > STABILITY_WARN {
        log::warn!("dt*rate = {product:.3} exceeds {STABILITY_WARN}; accuracy may suffer");
    }
    Ok(())
}
