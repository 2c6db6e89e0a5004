//! Resonance poles and their normalized energy-representation Gamow vectors.
//!
//! A pole `z_R = E_R - iΓ/2` carries two square-integrable Lorentzian
//! vectors on the real energy line:
//!
//! ```text
//! ψ^D(E) = α / (E - z_R)      (decaying)
//! ψ^G(E) = α / (E - z_R*)     (growing)
//! ```
//!
//! with `α = sqrt(Γ / 2π)`, which makes both unit vectors for every width
//! since `∫ dE / ((E - E_R)^2 + (Γ/2)^2) = 2π/Γ`. The decaying vector is tied
//! to `z_R`; some treatments instead write the decaying representative with
//! `1/(E - z_R*)` and a `∓1/2πi` prefactor, which differs only by relabelling
//! the pair.
//!
//! The decaying amplitude evolves as `e^{-i z_R t} = e^{-iE_R t} e^{-Γt/2}` for
//! `t >= 0`, so the probability decays as `e^{-Γt}`; the growing one as
//! `e^{-i z_R* t}` for `t <= 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{integrate_real_line_with, Feature, NumericsError, QuadratureSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GamowError {
    #[error("resonance width must be positive and finite, got {0}")]
    NonPositiveWidth(f64),
    #[error("resonance energy must be finite, got {0}")]
    NonFiniteEnergy(f64),
    #[error("{kind:?} vectors only evolve for {allowed}, got t = {t}")]
    WrongTimeDomain {
        kind: VectorKind,
        t: f64,
        allowed: &'static str,
    },
    #[error(transparent)]
    Quadrature(#[from] NumericsError),
}

/// A resonance pole `z_R = E_R - iΓ/2` with `Γ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonancePole {
    energy: f64,
    width: f64,
}

impl ResonancePole {
    pub fn new(energy: f64, width: f64) -> Result<Self, GamowError> {
        if !energy.is_finite() {
            return Err(GamowError::NonFiniteEnergy(energy));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(GamowError::NonPositiveWidth(width));
        }
        Ok(Self { energy, width })
    }

    /// Resonance energy `E_R`.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Width `Γ`.
    pub fn width(&self) -> f64 {
        self.width
    }

    /// `z_R = E_R - iΓ/2`.
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.energy, -0.5 * self.width)
    }

    /// `z_R* = E_R + iΓ/2`, the growing (capture) partner.
    pub fn z_conj(&self) -> Complex64 {
        self.z().conj()
    }

    /// Breakpoint hint for quadrature around the Lorentzian peak.
    pub fn feature(&self) -> Feature {
        Feature::new(self.energy, 0.5 * self.width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VectorKind {
    Decaying,
    Growing,
}

/// `α = sqrt(Γ / 2π)`, the constant that gives `α/(E - z_R)` unit norm.
pub fn normalization(pole: &ResonancePole) -> f64 {
    (pole.width() / (2.0 * PI)).sqrt()
}

/// Normalization from a raw width, rejecting `Γ <= 0`.
pub fn normalization_for_width(width: f64) -> Result<f64, GamowError> {
    ResonancePole::new(0.0, width).map(|p| normalization(&p))
}

/// A unit-norm Lorentzian Gamow vector in the energy representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GamowVector {
    pole: ResonancePole,
    kind: VectorKind,
    alpha: f64,
}

impl GamowVector {
    pub fn new(pole: ResonancePole, kind: VectorKind) -> Self {
        Self {
            pole,
            kind,
            alpha: normalization(&pole),
        }
    }

    pub fn decaying(pole: ResonancePole) -> Self {
        Self::new(pole, VectorKind::Decaying)
    }

    pub fn growing(pole: ResonancePole) -> Self {
        Self::new(pole, VectorKind::Growing)
    }

    pub fn pole(&self) -> &ResonancePole {
        &self.pole
    }

    pub fn kind(&self) -> VectorKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The eigenvalue this vector is attached to: `z_R` or `z_R*`.
    pub fn eigenvalue(&self) -> Complex64 {
        match self.kind {
            VectorKind::Decaying => self.pole.z(),
            VectorKind::Growing => self.pole.z_conj(),
        }
    }

    /// `α / (E - z_R)` or `α / (E - z_R*)`.
    pub fn eval(&self, energy: f64) -> Complex64 {
        self.alpha / (Complex64::new(energy, 0.0) - self.eigenvalue())
    }

    /// `|ψ(E)|^2 = (Γ/2π) / ((E - E_R)^2 + (Γ/2)^2)`, the same for both kinds.
    pub fn breit_wigner_density(&self, energy: f64) -> f64 {
        breit_wigner_density(&self.pole, energy)
    }

    /// Amplitude factor `e^{-i z t}` of the semigroup evolution.
    pub fn time_evolution_factor(&self, t: f64) -> Result<Complex64, GamowError> {
        let allowed = match self.kind {
            VectorKind::Decaying if t < 0.0 => Some("t >= 0"),
            VectorKind::Growing if t > 0.0 => Some("t <= 0"),
            _ => None,
        };
        if let Some(allowed) = allowed {
            return Err(GamowError::WrongTimeDomain {
                kind: self.kind,
                t,
                allowed,
            });
        }
        Ok((Complex64::new(0.0, -t) * self.eigenvalue()).exp())
    }
}

/// Breit-Wigner density with width `Γ` (full width at half maximum).
pub fn breit_wigner_density(pole: &ResonancePole, energy: f64) -> f64 {
    let half = 0.5 * pole.width();
    (pole.width() / (2.0 * PI)) / ((energy - pole.energy()).powi(2) + half * half)
}

/// `⟨a|b⟩ = ∫ a(E)* b(E) dE` computed by quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    pub value: Complex64,
    pub abs_error: f64,
    /// `false` when the two vectors belong to different poles; such overlaps
    /// have no closed-form reference value.
    pub anchored: bool,
}

pub fn overlap(
    a: &GamowVector,
    b: &GamowVector,
    spec: &QuadratureSpec,
) -> Result<Overlap, GamowError> {
    let features = [a.pole.feature(), b.pole.feature()];
    let est = integrate_real_line_with(|e| a.eval(e).conj() * b.eval(e), &features, spec)?;
    Ok(Overlap {
        value: est.value,
        abs_error: est.abs_error,
        anchored: a.pole == b.pole,
    })
}

/// `‖ψ‖^2` by quadrature.
pub fn norm_squared(g: &GamowVector, spec: &QuadratureSpec) -> Result<f64, GamowError> {
    Ok(overlap(g, g, spec)?.value.re)
}
