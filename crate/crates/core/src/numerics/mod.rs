//! Complex-valued quadrature on finite, half-infinite and infinite intervals,
//! symmetric principal values, Fourier-type amplitudes and complex Newton
//! root finding, plus the straight-line fits used for scaling exponents.
//!
//! Everything here is a pure function of its arguments. The integrators are
//! built on one adaptive 21-point Gauss-Kronrod engine ([`integrate_interval`]);
//! infinite ranges are mapped onto bounded ones by rational substitutions
//! whose centre and scale come from optional [`Feature`] hints.

mod fit;
mod infinite;
mod kronrod;
mod oscillatory;
mod roots;

pub use fit::{fit_line, LineFit};
pub use infinite::{
    integrate_half_line, integrate_half_line_with, integrate_real_line, integrate_real_line_with,
    principal_value, principal_value_with,
};
pub use kronrod::integrate_interval;
pub use oscillatory::{oscillatory_integral, Density, TailBehavior, MAX_PHASE};
pub use roots::{find_root_complex, find_root_complex_with_derivative, Root, RootError};

use num_complex::Complex64;
use thiserror::Error;

/// Complex quantities used throughout the crate (energies, amplitudes,
/// integral values).
pub type ComplexValue = Complex64;

/// Tolerances and budgets for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Relative tolerance on the integral value.
    pub rel_tol: f64,
    /// Absolute floor on the error estimate.
    pub abs_tol: f64,
    /// Maximum bisection depth of any subinterval.
    pub max_refinements: u32,
    /// Distance from a density's centre beyond which oscillatory tails are
    /// summed analytically or dropped. Zero lets the integrator choose.
    pub decay_cutoff: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_refinements: 30,
            decay_cutoff: 0.0,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        Self { rel_tol, ..self }
    }

    pub fn with_abs_tol(self, abs_tol: f64) -> Self {
        Self { abs_tol, ..self }
    }

    pub fn with_max_refinements(self, max_refinements: u32) -> Self {
        Self {
            max_refinements,
            ..self
        }
    }

    pub fn with_decay_cutoff(self, decay_cutoff: f64) -> Self {
        Self {
            decay_cutoff,
            ..self
        }
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(NumericsError::InvalidSpec("rel_tol must be positive"));
        }
        if !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(NumericsError::InvalidSpec("abs_tol must be non-negative"));
        }
        if self.max_refinements < 1 {
            return Err(NumericsError::InvalidSpec("max_refinements must be at least 1"));
        }
        if !(self.decay_cutoff >= 0.0 && self.decay_cutoff.is_finite()) {
            return Err(NumericsError::InvalidSpec("decay_cutoff must be non-negative"));
        }
        Ok(())
    }

    /// Error budget for a given integral value.
    pub fn tolerance_for(&self, value: ComplexValue) -> f64 {
        (self.rel_tol * value.norm()).max(self.abs_tol)
    }
}

/// A converged integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: ComplexValue,
    pub abs_error: f64,
    pub evaluations: usize,
}

/// Region where an integrand varies quickly: a peak, a nearby pole, a kink.
///
/// Features never change the value of an integral, only where the adaptive
/// engine starts looking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feature {
    pub center: f64,
    pub width: f64,
}

impl Feature {
    pub fn new(center: f64, width: f64) -> Self {
        Self { center, width }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("quadrature did not converge: estimate {value} with error {abs_error:e} > tolerance {tolerance:e}")]
    NonConvergence {
        value: ComplexValue,
        abs_error: f64,
        tolerance: f64,
    },
    #[error("integrand returned a non-finite value at x = {at}")]
    NonFinite { at: f64 },
    #[error("invalid quadrature settings: {0}")]
    InvalidSpec(&'static str),
    #[error("invalid integration domain: {0}")]
    InvalidDomain(&'static str),
    #[error("t = {t} is beyond the supported oscillatory range (largest reliable t = {max_reliable_t})")]
    BeyondOscillatoryRange { t: f64, max_reliable_t: f64 },
}
