//! Non-decay amplitude `A(t) = ∫ ρ(E) e^{-iEt} dE` and probability `|A|²`.
//!
//! A Lorentzian on the whole line decays exactly exponentially. Cutting the
//! spectrum off at `E = 0` adds an endpoint contribution `≈ ρ(0)/(it)` that
//! eventually dominates, so `P(t) ~ t^{-2}` at long times. A density with a
//! finite second moment has `P(t) = 1 - (ΔH)² t² + O(t⁴)`: the probability
//! starts flat, although `A` itself has slope `-i⟨H⟩` at `t = 0`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::numerics::{
    fit_line, integrate_interval, oscillatory_integral, Density, LineFit, NumericsError,
    QuadratureSpec, TailBehavior,
};

/// Gaussian tails beyond this many standard deviations are dropped.
const GAUSSIAN_REACH: f64 = 9.0;
/// Largest RMS log-residual accepted from a long-time power-law fit.
pub const POWER_LAW_RESIDUAL_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DensityKind {
    /// Lorentzian over the whole real line.
    BreitWignerFullLine,
    /// Lorentzian restricted to `E ≥ 0` and renormalized.
    BreitWignerTruncated,
    /// Gaussian restricted to `E ≥ 0` and renormalized.
    GaussianTruncated,
}

impl DensityKind {
    pub fn name(self) -> &'static str {
        match self {
            DensityKind::BreitWignerFullLine => "bw_full_line",
            DensityKind::BreitWignerTruncated => "bw_truncated",
            DensityKind::GaussianTruncated => "gaussian_truncated",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            DensityKind::BreitWignerFullLine,
            DensityKind::BreitWignerTruncated,
            DensityKind::GaussianTruncated,
        ]
        .into_iter()
        .find(|k| k.name() == name)
    }

    fn is_lorentzian(self) -> bool {
        !matches!(self, DensityKind::GaussianTruncated)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurvivalError {
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("time {0} is negative or not finite")]
    NegativeTime(f64),
    #[error("{operation} does not apply to {kind} densities")]
    NotApplicable {
        operation: &'static str,
        kind: &'static str,
    },
    #[error("{kind} density has no finite second moment")]
    InfiniteMoment { kind: &'static str },
    #[error("exponential decay still dominates the window (log-log RMS residual {rms_residual:.3} > {limit})")]
    WindowTooEarly { rms_residual: f64, limit: f64 },
    #[error("invalid time window: {0}")]
    InvalidWindow(String),
    #[error(transparent)]
    Quadrature(#[from] NumericsError),
}

/// Normalized energy distribution of an initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDensity {
    kind: DensityKind,
    energy: f64,
    width: f64,
    norm: f64,
}

impl SpectralDensity {
    /// `width` is `Γ` for the Lorentzians and `σ` for the Gaussian.
    pub fn new(kind: DensityKind, energy: f64, width: f64) -> Result<Self, SurvivalError> {
        if !energy.is_finite() {
            return Err(SurvivalError::InvalidDensity(format!("energy {energy} is not finite")));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(SurvivalError::InvalidDensity(format!("width {width} must be positive")));
        }
        let norm = match kind {
            DensityKind::BreitWignerFullLine => 1.0,
            DensityKind::BreitWignerTruncated => 0.5 + (2.0 * energy / width).atan() / PI,
            DensityKind::GaussianTruncated => 0.5 * erfc(-energy / (width * SQRT_2)),
        };
        if norm.is_nan() || norm <= 0.0 {
            return Err(SurvivalError::InvalidDensity(format!(
                "no weight on E >= 0 for centre {energy} and width {width}"
            )));
        }
        Ok(Self {
            kind,
            energy,
            width,
            norm,
        })
    }

    pub fn breit_wigner(energy: f64, width: f64) -> Result<Self, SurvivalError> {
        Self::new(DensityKind::BreitWignerFullLine, energy, width)
    }

    pub fn breit_wigner_truncated(energy: f64, width: f64) -> Result<Self, SurvivalError> {
        Self::new(DensityKind::BreitWignerTruncated, energy, width)
    }

    pub fn gaussian_truncated(energy: f64, sigma: f64) -> Result<Self, SurvivalError> {
        Self::new(DensityKind::GaussianTruncated, energy, sigma)
    }

    pub fn kind(&self) -> DensityKind {
        self.kind
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Weight of the untruncated profile on the support.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    fn half_width(&self) -> f64 {
        self.width / 2.0
    }

    /// Mean energy; `None` for the Lorentzians.
    pub fn mean(&self) -> Option<f64> {
        match self.kind {
            DensityKind::GaussianTruncated => {
                let alpha = -self.energy / self.width;
                let phi = (-alpha * alpha / 2.0).exp() / (2.0 * PI).sqrt();
                Some(self.energy + self.width * phi / self.norm)
            }
            _ => None,
        }
    }

    /// `e^{-Γt}` for the Lorentzians and `e^{-σ²t²}` for the Gaussian: the
    /// probability the untruncated profile would give.
    pub fn reference_probability(&self, t: f64) -> f64 {
        match self.kind {
            DensityKind::GaussianTruncated => (-(self.width * t).powi(2)).exp(),
            _ => (-self.width * t.abs()).exp(),
        }
    }

    /// Total weight, computed by quadrature.
    pub fn total_weight(&self, spec: &QuadratureSpec) -> Result<f64, SurvivalError> {
        Ok(oscillatory_integral(self, 0.0, spec)?.value.re)
    }
}

impl Density for SpectralDensity {
    fn value(&self, e: f64) -> f64 {
        if self.kind != DensityKind::BreitWignerFullLine && e < 0.0 {
            return 0.0;
        }
        let x = e - self.energy;
        let raw = if self.kind.is_lorentzian() {
            let g = self.half_width();
            (g / PI) / (x * x + g * g)
        } else {
            let s = self.width;
            (-(x * x) / (2.0 * s * s)).exp() / (s * (2.0 * PI).sqrt())
        };
        raw / self.norm
    }

    fn lower_edge(&self) -> Option<f64> {
        match self.kind {
            DensityKind::BreitWignerFullLine => None,
            _ => Some(0.0),
        }
    }

    fn center(&self) -> f64 {
        self.energy
    }

    fn scale(&self) -> f64 {
        if self.kind.is_lorentzian() {
            self.half_width()
        } else {
            self.width
        }
    }

    fn tail(&self) -> TailBehavior {
        if self.kind.is_lorentzian() {
            TailBehavior::Algebraic
        } else {
            TailBehavior::Negligible {
                half_width: GAUSSIAN_REACH * self.width,
            }
        }
    }

    fn derivatives(&self, e: f64, out: &mut [f64]) {
        // ρ = Im[1/(x - iγ)] / (πN), so ρ^(n) = Im[(-1)^n n! / (x - iγ)^{n+1}] / (πN)
        let w = Complex64::new(e - self.energy, -self.half_width());
        let mut factorial = 1.0;
        for (n, slot) in out.iter_mut().enumerate() {
            if n > 0 {
                factorial *= -(n as f64);
            }
            *slot = (factorial / w.powi(n as i32 + 1)).im / (PI * self.norm);
        }
    }
}

fn check_time(t: f64) -> Result<(), SurvivalError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(SurvivalError::NegativeTime(t))
    }
}

/// `A(t)` for `t ≥ 0`.
pub fn amplitude(
    d: &SpectralDensity,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64, SurvivalError> {
    check_time(t)?;
    Ok(oscillatory_integral(d, t, spec)?.value)
}

/// `P(t) = |A(t)|²`, clipped to `[0, 1]` against rounding.
pub fn nondecay_probability(
    d: &SpectralDensity,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<f64, SurvivalError> {
    Ok(amplitude(d, t, spec)?.norm_sqr().clamp(0.0, 1.0))
}

/// One row of a survival table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalSample {
    pub t: f64,
    pub amplitude: Complex64,
    pub probability: f64,
    /// [`SpectralDensity::reference_probability`] at `t`.
    pub reference: f64,
    /// `probability - reference`: what the truncation adds to the pure profile.
    pub background: f64,
}

/// Evaluates the survival table on `times`, which must be non-negative.
pub fn survival_curve(
    d: &SpectralDensity,
    times: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<SurvivalSample>, SurvivalError> {
    for &t in times {
        check_time(t)?;
    }
    times
        .par_iter()
        .map(|&t| {
            let amplitude = amplitude(d, t, spec)?;
            let probability = amplitude.norm_sqr().clamp(0.0, 1.0);
            let reference = d.reference_probability(t);
            Ok(SurvivalSample {
                t,
                amplitude,
                probability,
                reference,
                background: probability - reference,
            })
        })
        .collect()
}

/// `samples` geometrically spaced points from `start` to `end`.
pub fn geometric_times(start: f64, end: f64, samples: usize) -> Result<Vec<f64>, SurvivalError> {
    if !(start > 0.0 && end > start && end.is_finite()) {
        return Err(SurvivalError::InvalidWindow(format!(
            "need 0 < start < end, got [{start}, {end}]"
        )));
    }
    if samples < 2 {
        return Err(SurvivalError::InvalidWindow("need at least two samples".into()));
    }
    let ratio = (end / start).ln() / (samples - 1) as f64;
    Ok((0..samples)
        .map(|i| {
            if i + 1 == samples {
                end
            } else {
                start * (ratio * i as f64).exp()
            }
        })
        .collect())
}

fn require_truncated_lorentzian(
    d: &SpectralDensity,
    operation: &'static str,
) -> Result<(), SurvivalError> {
    if d.kind == DensityKind::BreitWignerTruncated {
        Ok(())
    } else {
        Err(SurvivalError::NotApplicable {
            operation,
            kind: d.kind.name(),
        })
    }
}

/// Least-squares fit of `log P` against `log t` over a geometric window.
///
/// A clean power law leaves small residuals; exponential decay or its
/// interference with the endpoint term bends the curve and is reported as
/// [`SurvivalError::WindowTooEarly`].
pub fn longtime_exponent(
    d: &SpectralDensity,
    t_min: f64,
    t_max: f64,
    samples: usize,
    spec: &QuadratureSpec,
) -> Result<LineFit, SurvivalError> {
    require_truncated_lorentzian(d, "longtime_exponent")?;
    if samples < 4 {
        return Err(SurvivalError::InvalidWindow("need at least four samples".into()));
    }
    let times = geometric_times(t_min, t_max, samples)?;
    let curve = survival_curve(d, &times, spec)?;
    let log_t: Vec<f64> = curve.iter().map(|s| s.t.ln()).collect();
    let log_p: Vec<f64> = curve.iter().map(|s| s.probability.max(f64::MIN_POSITIVE).ln()).collect();
    let fit = fit_line(&log_t, &log_p)
        .ok_or_else(|| SurvivalError::InvalidWindow("degenerate time window".into()))?;
    if fit.rms_residual > POWER_LAW_RESIDUAL_LIMIT {
        return Err(SurvivalError::WindowTooEarly {
            rms_residual: fit.rms_residual,
            limit: POWER_LAW_RESIDUAL_LIMIT,
        });
    }
    Ok(fit)
}

/// First time from which a power law in `t` describes `log P` better than a
/// straight line in `t` on every later window of `window` samples.
///
/// Both models have two parameters, so comparing their Akaike criteria
/// reduces to comparing residual sums of squares.
pub fn power_law_onset(
    samples: &[SurvivalSample],
    window: usize,
) -> Result<Option<f64>, SurvivalError> {
    if window < 3 || samples.len() < window {
        return Err(SurvivalError::InvalidWindow(format!(
            "need windows of at least 3 samples within {} samples",
            samples.len()
        )));
    }
    if samples.iter().any(|s| s.t.is_nan() || s.t <= 0.0) {
        return Err(SurvivalError::InvalidWindow("onset detection needs t > 0".into()));
    }
    let aic = |rss: f64| window as f64 * (rss / window as f64).max(f64::MIN_POSITIVE).ln() + 4.0;
    let power_wins: Vec<bool> = samples
        .windows(window)
        .map(|w| {
            let t: Vec<f64> = w.iter().map(|s| s.t).collect();
            let log_t: Vec<f64> = t.iter().map(|x| x.ln()).collect();
            let log_p: Vec<f64> = w
                .iter()
                .map(|s| s.probability.max(f64::MIN_POSITIVE).ln())
                .collect();
            match (fit_line(&log_t, &log_p), fit_line(&t, &log_p)) {
                (Some(power), Some(exp)) => aic(power.rss) < aic(exp.rss),
                _ => false,
            }
        })
        .collect();
    let start = power_wins
        .iter()
        .rposition(|win| !win)
        .map_or(Some(0), |last_loss| {
            (last_loss + 1 < power_wins.len()).then_some(last_loss + 1)
        });
    Ok(start.map(|i| samples[i].t))
}

/// Time at which the pole term `e^{-Γt/2}/N` falls to the endpoint term
/// `ρ(0)/t`.
pub fn crossover_time(d: &SpectralDensity) -> Result<f64, SurvivalError> {
    require_truncated_lorentzian(d, "crossover_time")?;
    let rho0 = d.value(0.0);
    let gap = |t: f64| -d.width * t / 2.0 - d.norm.ln() - (rho0 / t).ln();
    // log |pole| - log |endpoint| peaks at t = 2/Γ and falls linearly after
    let mut lo = 2.0 / d.width;
    if gap(lo) <= 0.0 {
        return Ok(lo);
    }
    let mut hi = 2.0 * lo;
    while gap(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Forward-difference estimate `(P(h) - 1)/h` of `dP/dt` at `t = 0⁺`.
///
/// `P` is even in `t` for a real density, so a central difference vanishes
/// identically and says nothing. The forward difference is `-(ΔH)² h + O(h³)`
/// and is computed without cancellation from
/// `1 - P = 2c - c² - s²`, `c = ∫ρ 2sin²((E-μ)h/2)`, `s = ∫ρ sin((E-μ)h)`.
pub fn zeno_check(
    d: &SpectralDensity,
    h: f64,
    spec: &QuadratureSpec,
) -> Result<f64, SurvivalError> {
    if d.kind.is_lorentzian() {
        return Err(SurvivalError::InfiniteMoment {
            kind: d.kind.name(),
        });
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(SurvivalError::InvalidWindow(format!("step {h} must be positive")));
    }
    let mu = d.mean().expect("finite-moment density");
    let reach = GAUSSIAN_REACH * d.width;
    let lo = (d.energy - reach).max(0.0);
    let hi = d.energy + reach;
    let breaks = [d.energy - d.width, d.energy, d.energy + d.width];
    let c = integrate_interval(
        |e| {
            let s = ((e - mu) * h / 2.0).sin();
            Complex64::new(2.0 * d.value(e) * s * s, 0.0)
        },
        lo,
        hi,
        &breaks,
        spec,
    )?
    .value
    .re;
    let s = integrate_interval(
        |e| Complex64::new(d.value(e) * ((e - mu) * h).sin(), 0.0),
        lo,
        hi,
        &breaks,
        spec,
    )?
    .value
    .re;
    let loss = 2.0 * c - c * c - s * s;
    Ok(-loss / h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> QuadratureSpec {
        QuadratureSpec::default()
            .with_rel_tol(1e-10)
            .with_abs_tol(1e-13)
    }

    #[test]
    fn densities_are_normalized() {
        let spec = tight();
        for d in [
            SpectralDensity::breit_wigner(3.0, 0.7).unwrap(),
            SpectralDensity::breit_wigner_truncated(1.0, 2.0).unwrap(),
            SpectralDensity::breit_wigner_truncated(10.0, 0.5).unwrap(),
            SpectralDensity::gaussian_truncated(10.0, 1.0).unwrap(),
            SpectralDensity::gaussian_truncated(0.5, 1.0).unwrap(),
        ] {
            assert!((d.total_weight(&spec).unwrap() - 1.0).abs() < 1e-8, "{d:?}");
        }
    }

    #[test]
    fn zero_time_amplitude_is_one() {
        let spec = tight();
        for d in [
            SpectralDensity::breit_wigner(3.0, 0.7).unwrap(),
            SpectralDensity::breit_wigner_truncated(5.0, 1.0).unwrap(),
            SpectralDensity::gaussian_truncated(10.0, 1.0).unwrap(),
        ] {
            assert!((amplitude(&d, 0.0, &spec).unwrap() - 1.0).norm() < 1e-8);
            assert!((nondecay_probability(&d, 0.0, &spec).unwrap() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn full_line_amplitude_is_exponential() {
        let spec = tight();
        let (er, gamma) = (4.0, 0.5);
        let d = SpectralDensity::breit_wigner(er, gamma).unwrap();
        for t in [0.3, 2.0, 10.0, 40.0] {
            let a = amplitude(&d, t, &spec).unwrap();
            let exact = Complex64::new(-gamma * t / 2.0, -er * t).exp();
            assert!((a - exact).norm() < 1e-8 * exact.norm().max(1e-3), "t={t}");
        }
        let p = nondecay_probability(&d, 2.0 / gamma, &spec).unwrap();
        assert!((p - (-2.0f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn early_truncation_is_small() {
        let spec = tight();
        let full = amplitude(&SpectralDensity::breit_wigner(10.0, 0.5).unwrap(), 1.0, &spec).unwrap();
        let cut =
            amplitude(&SpectralDensity::breit_wigner_truncated(10.0, 0.5).unwrap(), 1.0, &spec).unwrap();
        assert!((full - cut).norm() < 1e-2);
    }

    #[test]
    fn gaussian_onset_is_quadratic() {
        // P(t) ≈ 1 - σ² t² for E_R ≫ σ
        let spec = tight();
        let d = SpectralDensity::gaussian_truncated(10.0, 1.0).unwrap();
        for t in [1e-3, 1e-2] {
            let loss = 1.0 - nondecay_probability(&d, t, &spec).unwrap();
            assert!((loss / (t * t) - 1.0).abs() < 1e-3, "t={t}: {loss}");
        }
    }

    #[test]
    fn long_time_power_law() {
        let d = SpectralDensity::breit_wigner_truncated(5.0, 1.0).unwrap();
        let fit = longtime_exponent(&d, 60.0, 200.0, 16, &tight()).unwrap();
        assert!((fit.slope + 2.0).abs() < 0.2, "{fit:?}");

        // the endpoint term wins at the right edge of the window
        let p = nondecay_probability(&d, 200.0, &tight()).unwrap();
        assert!(p >= d.reference_probability(200.0));
    }

    #[test]
    fn exponential_window_is_too_early() {
        let d = SpectralDensity::breit_wigner_truncated(5.0, 1.0).unwrap();
        assert!(matches!(
            longtime_exponent(&d, 0.5, 20.0, 16, &tight()),
            Err(SurvivalError::WindowTooEarly { .. })
        ));
    }

    #[test]
    fn longtime_rejects_other_densities() {
        let d = SpectralDensity::breit_wigner(5.0, 1.0).unwrap();
        assert!(matches!(
            longtime_exponent(&d, 60.0, 200.0, 16, &tight()),
            Err(SurvivalError::NotApplicable { .. })
        ));
    }

    #[test]
    fn crossover_moves_later_with_energy() {
        let times: Vec<f64> = [2.0, 5.0, 10.0]
            .iter()
            .map(|&er| crossover_time(&SpectralDensity::breit_wigner_truncated(er, 1.0).unwrap()).unwrap())
            .collect();
        assert!(times[0] < times[1] && times[1] < times[2], "{times:?}");
    }

    #[test]
    fn onset_detection_finds_power_law_regime() {
        let d = SpectralDensity::breit_wigner_truncated(5.0, 1.0).unwrap();
        let times = geometric_times(1.0, 200.0, 60).unwrap();
        let curve = survival_curve(&d, &times, &tight()).unwrap();
        let onset = power_law_onset(&curve, 8).unwrap().expect("power law reached");
        let cross = crossover_time(&d).unwrap();
        assert!(onset > 0.5 * cross && onset < 200.0, "onset {onset}, crossover {cross}");
    }

    #[test]
    fn zeno_estimates_shrink_linearly() {
        let spec = tight();
        let d = SpectralDensity::gaussian_truncated(10.0, 1.0).unwrap();
        let est: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&h| zeno_check(&d, h, &spec).unwrap())
            .collect();
        assert!(est[1].abs() < 1e-2);
        for (e, h) in est.iter().zip([1e-2, 1e-3, 1e-4]) {
            assert!((e / h + 1.0).abs() < 1e-3, "h={h}: {e}");
        }
        assert!(matches!(
            zeno_check(&SpectralDensity::breit_wigner_truncated(5.0, 1.0).unwrap(), 1e-3, &spec),
            Err(SurvivalError::InfiniteMoment { .. })
        ));
    }

    #[test]
    fn full_line_background_vanishes() {
        let d = SpectralDensity::breit_wigner(5.0, 0.3).unwrap();
        let times: Vec<f64> = (0..20).map(|i| i as f64 * 3.0).collect();
        for s in survival_curve(&d, &times, &tight()).unwrap() {
            assert!(s.background.abs() < 1e-6, "t={}", s.t);
        }
        assert!(matches!(
            survival_curve(&d, &[0.0, -1.0], &tight()),
            Err(SurvivalError::NegativeTime(_))
        ));
    }

    #[test]
    fn density_validation() {
        assert!(SpectralDensity::breit_wigner(1.0, 0.0).is_err());
        assert!(SpectralDensity::gaussian_truncated(f64::NAN, 1.0).is_err());
        assert!(SpectralDensity::gaussian_truncated(-1e4, 1.0).is_err());
        assert_eq!(DensityKind::from_name("bw_truncated"), Some(DensityKind::BreitWignerTruncated));
        assert_eq!(DensityKind::from_name("nope"), None);
    }
}
