//! Fourier-type amplitudes `A(t) = ∫ ρ(E) e^{-iEt} dE` of spectral densities.
//!
//! The carrier `e^{-iμt}` at the density centre μ is factored out, the
//! remaining integrand is split into half-period panels and handed to the
//! Kronrod engine. Algebraic tails beyond the window are summed with the
//! integration-by-parts series
//! `∫_U^∞ ρ e^{-iEt} dE = e^{-iUt} Σ_n ρ^{(n)}(U) / (it)^{n+1}`,
//! which needs exact derivatives of ρ at the window edge.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::infinite::integrate_from;
use super::{
    integrate_interval, integrate_real_line_with, Estimate, Feature, NumericsError,
    QuadratureSpec,
};

/// Largest supported `|t|·(|centre| + scale)`.
pub const MAX_PHASE: f64 = 1e4;

/// Window half-width in units of `1/|t|`; keeps the tail series ratio below
/// `TAIL_TERMS / TAIL_PHASE`.
const TAIL_PHASE: f64 = 2000.0;
const TAIL_TERMS: usize = 12;
const MAX_PANELS: f64 = 200_000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailBehavior {
    /// The density is below double-precision resolution outside
    /// `centre ± half_width`.
    Negligible { half_width: f64 },
    /// Power-law decay; [`Density::derivatives`] must be exact.
    Algebraic,
}

/// A non-negative spectral weight on the real line or on `[edge, ∞)`.
pub trait Density {
    fn value(&self, e: f64) -> f64;
    /// Lower edge of the support, `None` for the whole line.
    fn lower_edge(&self) -> Option<f64>;
    fn center(&self) -> f64;
    fn scale(&self) -> f64;
    fn tail(&self) -> TailBehavior;
    /// Fills `out[n]` with the n-th derivative at `e`. Only called for
    /// algebraic tails.
    fn derivatives(&self, e: f64, out: &mut [f64]);
}

fn tail_series<D: Density + ?Sized>(density: &D, at: f64, mu: f64, t: f64) -> (Complex64, f64) {
    let mut derivs = [0.0; TAIL_TERMS];
    density.derivatives(at, &mut derivs);
    let it = Complex64::new(0.0, t);
    let mut power = it;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut last = 0.0;
    for d in derivs {
        let term = d / power;
        sum += term;
        last = term.norm();
        power *= it;
    }
    let phase = Complex64::new(0.0, -(at - mu) * t).exp();
    (phase * sum, last)
}

/// `A(t) = ∫ ρ(E) e^{-iEt} dE` over the support of `density`.
///
/// At `t = 0` this is the total weight. Times with
/// `|t|·(|centre| + scale) > MAX_PHASE` are refused.
pub fn oscillatory_integral<D: Density + ?Sized>(
    density: &D,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate, NumericsError> {
    spec.validate()?;
    if !t.is_finite() {
        return Err(NumericsError::InvalidDomain("time must be finite"));
    }
    let mu = density.center();
    let scale = density.scale();
    if !(mu.is_finite() && scale.is_finite() && scale > 0.0) {
        return Err(NumericsError::InvalidDomain("density centre and scale must be finite"));
    }
    let features = [Feature::new(mu, scale)];
    let weight = |e: f64| Complex64::new(density.value(e), 0.0);

    if t == 0.0 {
        return match (density.lower_edge(), density.tail()) {
            (edge, TailBehavior::Negligible { half_width }) => {
                let lo = edge.map_or(mu - half_width, |x| x.max(mu - half_width));
                integrate_interval(weight, lo, mu + half_width, &[mu - scale, mu, mu + scale], spec)
            }
            (Some(edge), TailBehavior::Algebraic) => integrate_from(weight, edge, &features, spec),
            (None, TailBehavior::Algebraic) => integrate_real_line_with(weight, &features, spec),
        };
    }

    let reach = mu.abs() + scale;
    if t.abs() * reach > MAX_PHASE {
        return Err(NumericsError::BeyondOscillatoryRange {
            t,
            max_reliable_t: MAX_PHASE / reach,
        });
    }

    let (lo, hi, algebraic) = match density.tail() {
        TailBehavior::Negligible { half_width } => {
            let lo = density
                .lower_edge()
                .map_or(mu - half_width, |x| x.max(mu - half_width));
            (lo, mu + half_width, false)
        }
        TailBehavior::Algebraic => {
            let reach = spec
                .decay_cutoff
                .max(TAIL_PHASE / t.abs())
                .max(4.0 * scale);
            let lo = density.lower_edge().unwrap_or(mu - reach);
            (lo, (mu + reach).max(lo + reach), true)
        }
    };
    if hi <= lo {
        return Ok(Estimate {
            value: Complex64::new(0.0, 0.0),
            abs_error: 0.0,
            evaluations: 0,
        });
    }

    let panel = PI / t.abs();
    let panels = ((hi - lo) / panel).ceil();
    if panels > MAX_PANELS {
        return Err(NumericsError::BeyondOscillatoryRange {
            t,
            max_reliable_t: t.abs() * MAX_PANELS / panels,
        });
    }
    let mut cuts: Vec<f64> = (1..panels as usize).map(|j| lo + j as f64 * panel).collect();
    cuts.extend([-10.0, -1.0, 0.0, 1.0, 10.0].map(|k| mu + k * scale));

    let shifted = |e: f64| weight(e) * Complex64::new(0.0, -(e - mu) * t).exp();
    let mut est = integrate_interval(shifted, lo, hi, &cuts, spec)?;

    if algebraic {
        let (upper, upper_err) = tail_series(density, hi, mu, t);
        est.value += upper;
        est.abs_error += upper_err;
        if density.lower_edge().is_none() {
            let (lower, lower_err) = tail_series(density, lo, mu, t);
            est.value -= lower;
            est.abs_error += lower_err;
        }
        est.evaluations += 2;
    }

    est.value *= Complex64::new(0.0, -mu * t).exp();
    Ok(est)
}
