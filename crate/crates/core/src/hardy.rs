//! Rational Hardy-class test functions and their Cauchy boundary integrals.
//!
//! A function analytic and decaying in one half plane is recovered at any
//! interior point `z` from its real-axis boundary values:
//!
//! ```text
//! f(z) = ± (1/2πi) ∫ f(E) / (E - z) dE      (+ upper, - lower)
//! ```
//!
//! while the same integral with `z` in the opposite half plane vanishes. The
//! decaying Gamow functional is this recovery evaluated at `z_R`.
//!
//! The test family is `f(z) = (z - p)^{-n} ((z - p*) / (z - p))^m`: a pole of
//! order `n` at `p` times an inner factor that has unit modulus on the real
//! axis. With `Im p > 0` the function is analytic in the lower half plane,
//! with `Im p < 0` in the upper one.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::gamow::ResonancePole;
use crate::numerics::{integrate_real_line_with, Feature, NumericsError, QuadratureSpec};

/// Targets closer than this to the real axis are rejected.
pub const ON_AXIS_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HalfPlane {
    Upper,
    Lower,
}

impl HalfPlane {
    pub fn contains(self, z: Complex64) -> bool {
        match self {
            HalfPlane::Upper => z.im > 0.0,
            HalfPlane::Lower => z.im < 0.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            HalfPlane::Upper => HalfPlane::Lower,
            HalfPlane::Lower => HalfPlane::Upper,
        }
    }

    /// Sign of the `1/2πi` prefactor that recovers interior values.
    fn cauchy_sign(self) -> f64 {
        match self {
            HalfPlane::Upper => 1.0,
            HalfPlane::Lower => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HardyError {
    #[error("target {z} is within {ON_AXIS_THRESHOLD:e} of the real axis")]
    OnAxisTarget { z: Complex64 },
    #[error("target {z} is not in the {expected:?} half plane")]
    WrongHalfPlane { z: Complex64, expected: HalfPlane },
    #[error("invalid Hardy function: {0}")]
    InvalidFunction(String),
    #[error(transparent)]
    Quadrature(#[from] NumericsError),
}

/// A function analytic and square integrable in one half plane.
pub trait HardyFunction: Sync {
    /// Half plane of analyticity.
    fn half_plane(&self) -> HalfPlane;
    /// Value on the real axis.
    fn eval_boundary(&self, energy: f64) -> Complex64;
    /// Value at an interior point of [`Self::half_plane`].
    fn eval_analytic(&self, z: Complex64) -> Complex64;
    /// Power-law decay exponent at infinity.
    fn decay_order(&self) -> u32;
    /// Quadrature hints for the boundary integrand.
    fn features(&self) -> Vec<Feature>;
}

/// `(z - p)^{-n} ((z - p*) / (z - p))^m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalHardy {
    pole: Complex64,
    order: u32,
    phase_order: u32,
}

impl RationalHardy {
    pub fn new(pole: Complex64, order: u32, phase_order: u32) -> Result<Self, HardyError> {
        if order == 0 {
            return Err(HardyError::InvalidFunction(
                "pole order must be at least 1 for square integrability".into(),
            ));
        }
        if !(pole.re.is_finite() && pole.im.is_finite()) || pole.im.abs() < ON_AXIS_THRESHOLD {
            return Err(HardyError::InvalidFunction(format!(
                "pole {pole} must be finite and off the real axis"
            )));
        }
        Ok(Self {
            pole,
            order,
            phase_order,
        })
    }

    /// `(E - i)^{-n}`, analytic in the lower half plane.
    pub fn lower(order: u32) -> Self {
        Self::new(Complex64::new(0.0, 1.0), order, 0).expect("valid built-in")
    }

    /// `(E + i)^{-n}`, analytic in the upper half plane.
    pub fn upper(order: u32) -> Self {
        Self::new(Complex64::new(0.0, -1.0), order, 0).expect("valid built-in")
    }

    /// Multiplies by `m` inner factors `(z - p*) / (z - p)`.
    pub fn with_phase(self, phase_order: u32) -> Self {
        Self {
            phase_order,
            ..self
        }
    }

    pub fn pole(&self) -> Complex64 {
        self.pole
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn phase_order(&self) -> u32 {
        self.phase_order
    }

    /// `f^#(z) = f(z*)*`, which lives in the opposite half plane.
    pub fn conjugate(&self) -> Self {
        Self {
            pole: self.pole.conj(),
            ..*self
        }
    }

    /// Stable label `lower:n:m` / `upper:n:m`, with `@re,im` appended when the
    /// pole is not at `±i`.
    pub fn label(&self) -> String {
        let side = match self.half_plane() {
            HalfPlane::Upper => "upper",
            HalfPlane::Lower => "lower",
        };
        let base = format!("{side}:{}:{}", self.order, self.phase_order);
        if self.pole.re == 0.0 && self.pole.im.abs() == 1.0 {
            base
        } else {
            format!("{base}@{:?}{:+?}i", self.pole.re, self.pole.im)
        }
    }

    fn eval(&self, z: Complex64) -> Complex64 {
        let dz = z - self.pole;
        let base = dz.powi(-(self.order as i32));
        if self.phase_order == 0 {
            base
        } else {
            base * ((z - self.pole.conj()) / dz).powi(self.phase_order as i32)
        }
    }
}

impl HardyFunction for RationalHardy {
    fn half_plane(&self) -> HalfPlane {
        if self.pole.im > 0.0 {
            HalfPlane::Lower
        } else {
            HalfPlane::Upper
        }
    }

    fn eval_boundary(&self, energy: f64) -> Complex64 {
        self.eval(Complex64::new(energy, 0.0))
    }

    fn eval_analytic(&self, z: Complex64) -> Complex64 {
        self.eval(z)
    }

    fn decay_order(&self) -> u32 {
        self.order
    }

    fn features(&self) -> Vec<Feature> {
        vec![Feature::new(self.pole.re, self.pole.im.abs())]
    }
}

/// A finite linear combination of rational functions sharing one half plane.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyCombination {
    half_plane: HalfPlane,
    terms: Vec<(Complex64, RationalHardy)>,
}

impl HardyCombination {
    /// The zero function of the given class.
    pub fn zero(half_plane: HalfPlane) -> Self {
        Self {
            half_plane,
            terms: Vec::new(),
        }
    }

    pub fn plus(mut self, coefficient: Complex64, f: RationalHardy) -> Result<Self, HardyError> {
        if f.half_plane() != self.half_plane {
            return Err(HardyError::InvalidFunction(format!(
                "{} does not belong to the {:?} class",
                f.label(),
                self.half_plane
            )));
        }
        self.terms.push((coefficient, f));
        Ok(self)
    }
}

impl HardyFunction for HardyCombination {
    fn half_plane(&self) -> HalfPlane {
        self.half_plane
    }

    fn eval_boundary(&self, energy: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(c, f)| c * f.eval_boundary(energy))
            .sum()
    }

    fn eval_analytic(&self, z: Complex64) -> Complex64 {
        self.terms.iter().map(|(c, f)| c * f.eval_analytic(z)).sum()
    }

    fn decay_order(&self) -> u32 {
        self.terms.iter().map(|(_, f)| f.order).min().unwrap_or(u32::MAX)
    }

    fn features(&self) -> Vec<Feature> {
        self.terms.iter().flat_map(|(_, f)| f.features()).collect()
    }
}

/// The built-in family: `(E - i)^{-n}` for `n = 1..4`, two members with one
/// inner factor, and the complex conjugates of all six.
pub fn builtin_family() -> Vec<RationalHardy> {
    let lower: Vec<RationalHardy> = (1..=4)
        .map(RationalHardy::lower)
        .chain((1..=2).map(|n| RationalHardy::lower(n).with_phase(1)))
        .collect();
    let upper: Vec<RationalHardy> = lower.iter().map(RationalHardy::conjugate).collect();
    lower.into_iter().chain(upper).collect()
}

fn check_target(z: Complex64) -> Result<(), HardyError> {
    if !(z.re.is_finite() && z.im.is_finite()) || z.im.abs() < ON_AXIS_THRESHOLD {
        return Err(HardyError::OnAxisTarget { z });
    }
    Ok(())
}

fn boundary_integral<F: HardyFunction + ?Sized>(
    f: &F,
    z: Complex64,
    spec: &QuadratureSpec,
) -> Result<Complex64, HardyError> {
    let mut features = f.features();
    features.push(Feature::new(z.re, z.im.abs()));
    let est = integrate_real_line_with(
        |e| f.eval_boundary(e) / (Complex64::new(e, 0.0) - z),
        &features,
        spec,
    )?;
    Ok(est.value)
}

/// `± (1/2πi) ∫ f(E) / (E - z) dE` for `z` inside the half plane of `f`.
pub fn cauchy_eval<F: HardyFunction + ?Sized>(
    f: &F,
    z: Complex64,
    spec: &QuadratureSpec,
) -> Result<Complex64, HardyError> {
    check_target(z)?;
    let side = f.half_plane();
    if !side.contains(z) {
        return Err(HardyError::WrongHalfPlane { z, expected: side });
    }
    let integral = boundary_integral(f, z, spec)?;
    Ok(integral * side.cauchy_sign() / Complex64::new(0.0, 2.0 * PI))
}

/// `∫ f(E) / (E - z) dE` for `z` in the half plane opposite to `f`; zero up to
/// quadrature error.
pub fn opposite_halfplane_check<F: HardyFunction + ?Sized>(
    f: &F,
    z: Complex64,
    spec: &QuadratureSpec,
) -> Result<Complex64, HardyError> {
    check_target(z)?;
    let side = f.half_plane().opposite();
    if !side.contains(z) {
        return Err(HardyError::WrongHalfPlane { z, expected: side });
    }
    boundary_integral(f, z, spec)
}

/// Decaying Gamow functional on a lower-class test function:
/// `-(1/2πi) ∫ f(E) / (E - z_R) dE = f(z_R)`.
pub fn gamow_functional_value<F: HardyFunction + ?Sized>(
    pole: &ResonancePole,
    f: &F,
    spec: &QuadratureSpec,
) -> Result<Complex64, HardyError> {
    if f.half_plane() != HalfPlane::Lower {
        return Err(HardyError::WrongHalfPlane {
            z: pole.z(),
            expected: f.half_plane(),
        });
    }
    cauchy_eval(f, pole.z(), spec)
}
