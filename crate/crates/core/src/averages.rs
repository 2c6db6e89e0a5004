//! Four ways of assigning an average of a diagonal observable `g(Ê)` to a
//! resonance:
//!
//! * zero: the decaying vector paired with itself has no finite bracket and
//!   the formal result is `0`;
//! * complex: the growing/decaying pairing with unit normalization, giving
//!   the analytic continuation `g(z_R)`;
//! * Lorentzian (Bohm): `∫ |ψ(E)|² g(E) dE` with the normalized Lorentzian
//!   wave function, a principal value about `E_R` when `g(E) = E`;
//! * Berggren: the real part of the complex average.
//!
//! For `g(E) = E` all of the finite ones give `E_R`. For a smooth bounded
//! `g` the Lorentzian and Berggren values differ by a Hilbert-transform term
//! linear in `Γ`; [`gamma_scaling_experiment`] measures that exponent.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::gamow::{GamowError, GamowVector, ResonancePole};
use crate::numerics::{
    fit_line, integrate_half_line_with, integrate_interval, integrate_real_line_with,
    principal_value_with, Feature, LineFit, NumericsError, QuadratureSpec,
};

/// Largest imaginary part tolerated in a Lorentzian average before it is
/// dropped.
pub const IMAGINARY_LIMIT: f64 = 1e-9;
/// Differences below `EXACT_FLOOR · max(1, |berggren|)` count as zero.
pub const EXACT_FLOOR: f64 = 1e-10;
/// Points needed for a scaling fit.
pub const MIN_FIT_POINTS: usize = 4;
/// Smallest accepted density of a geometric width grid.
pub const MIN_POINTS_PER_DECADE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GrowthClass {
    /// Bounded on the real line and vanishing at infinity.
    BoundedDecaying,
    /// `g(E) = E`.
    Linear,
    /// Faster than linear; no Lorentzian average exists.
    Superlinear,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AverageError {
    #[error("observable {name} grows too fast for a Lorentzian average")]
    DivergentObservable { name: String },
    #[error("observable {name} has no analytic continuation at {z}")]
    ContinuationUndefined { name: String, z: Complex64 },
    #[error("Lorentzian average has imaginary part {imag:e}")]
    ImaginaryResidue { imag: f64 },
    #[error("resonance energy {0} must be positive for the momentum representation")]
    NegativeResonanceEnergy(f64),
    #[error("invalid observable: {0}")]
    InvalidObservable(String),
    #[error("invalid width grid: {0}")]
    InvalidGrid(String),
    #[error("scaling fit needs at least {needed} points with a nonzero difference, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error(transparent)]
    Gamow(#[from] GamowError),
    #[error(transparent)]
    Quadrature(#[from] NumericsError),
}

type RealMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type ComplexMap = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A diagonal observable `g(Ê)` with its real form and analytic continuation.
#[derive(Clone)]
pub struct ObservableSpec {
    name: String,
    real: RealMap,
    analytic: ComplexMap,
    growth: GrowthClass,
    features: Vec<Feature>,
}

impl fmt::Debug for ObservableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObservableSpec")
            .field("name", &self.name)
            .field("growth", &self.growth)
            .field("features", &self.features)
            .finish()
    }
}

impl ObservableSpec {
    /// A custom observable. `Linear` is reserved for [`ObservableSpec::energy`].
    pub fn new<R, A>(
        name: impl Into<String>,
        real: R,
        analytic: A,
        growth: GrowthClass,
    ) -> Result<Self, AverageError>
    where
        R: Fn(f64) -> f64 + Send + Sync + 'static,
        A: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        if growth == GrowthClass::Linear {
            return Err(AverageError::InvalidObservable(
                "only the energy itself is linear".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            real: Arc::new(real),
            analytic: Arc::new(analytic),
            growth,
            features: Vec::new(),
        })
    }

    /// Quadrature hints where `g` varies quickly.
    pub fn with_features(mut self, features: Vec<Feature>) -> Self {
        self.features = features;
        self
    }

    /// `g(E) = E`.
    pub fn energy() -> Self {
        Self {
            name: "energy".into(),
            real: Arc::new(|e| e),
            analytic: Arc::new(|z| z),
            growth: GrowthClass::Linear,
            features: Vec::new(),
        }
    }

    /// `g(E) = value`.
    pub fn constant(value: f64) -> Self {
        Self {
            name: format!("constant:{value}"),
            real: Arc::new(move |_| value),
            analytic: Arc::new(move |_| Complex64::new(value, 0.0)),
            growth: GrowthClass::BoundedDecaying,
            features: Vec::new(),
        }
    }

    /// `g(E) = 1 / ((E - c)² + b²)`.
    pub fn lorentzian_kernel(center: f64, half_width: f64) -> Result<Self, AverageError> {
        if !(center.is_finite() && half_width.is_finite() && half_width > 0.0) {
            return Err(AverageError::InvalidObservable(format!(
                "lorentzian kernel needs finite centre and positive width, got ({center}, {half_width})"
            )));
        }
        let b2 = half_width * half_width;
        Ok(Self {
            name: format!("lorentzian:{center}:{half_width}"),
            real: Arc::new(move |e| 1.0 / ((e - center).powi(2) + b2)),
            analytic: Arc::new(move |z| 1.0 / ((z - center).powi(2) + b2)),
            growth: GrowthClass::BoundedDecaying,
            features: vec![Feature::new(center, half_width)],
        })
    }

    /// `g(E) = 1 / (E² + 1)`.
    pub fn inverse_quadratic() -> Self {
        let mut spec = Self::lorentzian_kernel(0.0, 1.0).expect("valid kernel");
        spec.name = "inverse_quadratic".into();
        spec
    }

    /// `g(E) = exp(-(E - c)² / 2s²)`.
    pub fn gaussian_kernel(center: f64, width: f64) -> Result<Self, AverageError> {
        if !(center.is_finite() && width.is_finite() && width > 0.0) {
            return Err(AverageError::InvalidObservable(format!(
                "gaussian kernel needs finite centre and positive width, got ({center}, {width})"
            )));
        }
        let two_s2 = 2.0 * width * width;
        Ok(Self {
            name: format!("gaussian:{center}:{width}"),
            real: Arc::new(move |e| (-(e - center).powi(2) / two_s2).exp()),
            analytic: Arc::new(move |z| (-(z - center).powi(2) / two_s2).exp()),
            growth: GrowthClass::BoundedDecaying,
            features: vec![Feature::new(center, width)],
        })
    }

    /// `g(E) = E²`.
    pub fn energy_squared() -> Self {
        Self {
            name: "energy_squared".into(),
            real: Arc::new(|e| e * e),
            analytic: Arc::new(|z| z * z),
            growth: GrowthClass::Superlinear,
            features: Vec::new(),
        }
    }

    /// Parses `energy`, `energy_squared`, `inverse_quadratic`, `constant:v`,
    /// `lorentzian:c:b` or `gaussian:c:s`.
    pub fn parse(text: &str) -> Result<Self, AverageError> {
        let mut parts = text.trim().split(':');
        let head = parts.next().unwrap_or_default().trim();
        let args: Vec<f64> = parts
            .map(|p| {
                p.trim().parse::<f64>().map_err(|_| {
                    AverageError::InvalidObservable(format!("bad number {p:?} in {text:?}"))
                })
            })
            .collect::<Result<_, _>>()?;
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(AverageError::InvalidObservable(format!(
                    "{head} takes {n} argument(s), got {} in {text:?}",
                    args.len()
                )))
            }
        };
        match head {
            "energy" => arity(0).map(|_| Self::energy()),
            "energy_squared" => arity(0).map(|_| Self::energy_squared()),
            "inverse_quadratic" => arity(0).map(|_| Self::inverse_quadratic()),
            "constant" => arity(1).map(|_| Self::constant(args[0])),
            "lorentzian" => arity(2).and_then(|_| Self::lorentzian_kernel(args[0], args[1])),
            "gaussian" => arity(2).and_then(|_| Self::gaussian_kernel(args[0], args[1])),
            _ => Err(AverageError::InvalidObservable(format!(
                "unknown observable {text:?}"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn growth_class(&self) -> GrowthClass {
        self.growth
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn eval_real(&self, e: f64) -> f64 {
        (self.real)(e)
    }

    pub fn eval_analytic(&self, z: Complex64) -> Complex64 {
        (self.analytic)(z)
    }

    /// Largest `|g_analytic(E) - g_real(E)|` over `energies`.
    pub fn continuation_mismatch(&self, energies: &[f64]) -> f64 {
        energies
            .iter()
            .map(|&e| (self.eval_analytic(Complex64::new(e, 0.0)) - self.eval_real(e)).norm())
            .fold(0.0, f64::max)
    }
}

/// The formal self-pairing average, which is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroAverage {
    pub value: f64,
    /// Why the number should not be read as an expectation value.
    pub caveat: &'static str,
}

pub const ZERO_AVERAGE_CAVEAT: &str =
    "the self-pairing of a decaying vector is not a defined bracket; 0 is formal";

pub fn average_nakanishi(_pole: &ResonancePole) -> ZeroAverage {
    ZeroAverage {
        value: 0.0,
        caveat: ZERO_AVERAGE_CAVEAT,
    }
}

/// `g(z_R)`, the growing/decaying pairing normalized to one.
pub fn average_complex(
    pole: &ResonancePole,
    obs: &ObservableSpec,
) -> Result<Complex64, AverageError> {
    let z = pole.z();
    let value = obs.eval_analytic(z);
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(AverageError::ContinuationUndefined {
            name: obs.name.clone(),
            z,
        });
    }
    Ok(value)
}

/// `Re g(z_R)`.
pub fn average_berggren(pole: &ResonancePole, obs: &ObservableSpec) -> Result<f64, AverageError> {
    Ok(average_complex(pole, obs)?.re)
}

/// `∫ ψ*(E) g(E) ψ(E) dE` for a Lorentzian Gamow vector.
pub fn average_bohm(
    vector: &GamowVector,
    obs: &ObservableSpec,
    spec: &QuadratureSpec,
) -> Result<f64, AverageError> {
    let integrand = |e: f64| {
        let psi = vector.eval(e);
        psi.conj() * obs.eval_real(e) * psi
    };
    let pole = vector.pole();
    let mut features = vec![pole.feature()];
    features.extend_from_slice(&obs.features);
    let estimate = match obs.growth {
        GrowthClass::Superlinear => {
            return Err(AverageError::DivergentObservable {
                name: obs.name.clone(),
            })
        }
        GrowthClass::Linear => principal_value_with(integrand, pole.energy(), &features, spec)?,
        GrowthClass::BoundedDecaying => integrate_real_line_with(integrand, &features, spec)?,
    };
    if estimate.value.im.abs() > IMAGINARY_LIMIT {
        return Err(AverageError::ImaginaryResidue {
            imag: estimate.value.im,
        });
    }
    Ok(estimate.value.re)
}

#[derive(Debug, Clone, PartialEq)]
pub enum BohmOutcome {
    Value(f64),
    Divergent,
}

impl BohmOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            BohmOutcome::Value(v) => Some(*v),
            BohmOutcome::Divergent => None,
        }
    }
}

/// All four averages of one observable on one resonance.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageReport {
    pub pole: ResonancePole,
    pub observable: String,
    pub nakanishi: ZeroAverage,
    pub complex_avg: Complex64,
    pub bohm: BohmOutcome,
    pub berggren: f64,
    /// `None` when the Lorentzian average diverges.
    pub bohm_minus_berggren: Option<f64>,
}

/// Builds an [`AverageReport`] using the decaying vector of `pole`. A
/// divergent Lorentzian average is recorded in the report, not returned as an
/// error.
pub fn average_report(
    pole: &ResonancePole,
    obs: &ObservableSpec,
    spec: &QuadratureSpec,
) -> Result<AverageReport, AverageError> {
    let complex_avg = average_complex(pole, obs)?;
    let berggren = complex_avg.re;
    let bohm = match average_bohm(&GamowVector::decaying(*pole), obs, spec) {
        Ok(v) => BohmOutcome::Value(v),
        Err(AverageError::DivergentObservable { .. }) => BohmOutcome::Divergent,
        Err(e) => return Err(e),
    };
    Ok(AverageReport {
        pole: *pole,
        observable: obs.name.clone(),
        nakanishi: average_nakanishi(pole),
        complex_avg,
        bohm_minus_berggren: bohm.value().map(|b| b - berggren),
        bohm,
        berggren,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub gamma: f64,
    pub bohm: f64,
    pub berggren: f64,
    /// `|bohm - berggren|`.
    pub difference: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalingOutcome {
    /// Every difference is below the rounding floor.
    ExactAgreement { max_difference: f64 },
    /// Fit of `log difference` against `log Γ`.
    PowerLaw(LineFit),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub observable: String,
    pub energy: f64,
    pub rows: Vec<ScalingRow>,
    pub outcome: ScalingOutcome,
}

impl ScalingReport {
    pub fn slope(&self) -> Option<f64> {
        match self.outcome {
            ScalingOutcome::PowerLaw(fit) => Some(fit.slope),
            ScalingOutcome::ExactAgreement { .. } => None,
        }
    }
}

/// Geometric grid from `lo` to `hi` with `per_decade` points per decade.
pub fn gamma_grid(lo: f64, hi: f64, per_decade: usize) -> Result<Vec<f64>, AverageError> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(AverageError::InvalidGrid(format!(
            "need 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    if per_decade < MIN_POINTS_PER_DECADE {
        return Err(AverageError::InvalidGrid(format!(
            "need at least {MIN_POINTS_PER_DECADE} points per decade, got {per_decade}"
        )));
    }
    let decades = (hi / lo).log10();
    let steps = (decades * per_decade as f64).round().max(1.0) as usize;
    Ok((0..=steps)
        .map(|i| {
            if i == steps {
                hi
            } else {
                lo * 10f64.powf(decades * i as f64 / steps as f64)
            }
        })
        .collect())
}

/// Measures how `|bohm - berggren|` scales with the width at fixed `E_R`.
///
/// The grid points are evaluated in parallel. If every difference sits below
/// [`EXACT_FLOOR`] the outcome is [`ScalingOutcome::ExactAgreement`];
/// otherwise the nonzero differences are fitted on log-log axes, which needs
/// at least [`MIN_FIT_POINTS`] of them.
pub fn gamma_scaling_experiment(
    obs: &ObservableSpec,
    energy: f64,
    gammas: &[f64],
    spec: &QuadratureSpec,
) -> Result<ScalingReport, AverageError> {
    if gammas.is_empty() {
        return Err(AverageError::InvalidGrid("width grid is empty".into()));
    }
    if obs.growth == GrowthClass::Superlinear {
        return Err(AverageError::DivergentObservable {
            name: obs.name.clone(),
        });
    }
    let rows: Vec<ScalingRow> = gammas
        .par_iter()
        .map(|&gamma| {
            let pole = ResonancePole::new(energy, gamma)?;
            let bohm = average_bohm(&GamowVector::decaying(pole), obs, spec)?;
            let berggren = average_berggren(&pole, obs)?;
            Ok(ScalingRow {
                gamma,
                bohm,
                berggren,
                difference: (bohm - berggren).abs(),
            })
        })
        .collect::<Result<_, AverageError>>()?;

    let exact = rows
        .iter()
        .all(|r| r.difference < EXACT_FLOOR * r.berggren.abs().max(1.0));
    let outcome = if exact {
        ScalingOutcome::ExactAgreement {
            max_difference: rows.iter().map(|r| r.difference).fold(0.0, f64::max),
        }
    } else {
        let (log_g, log_d): (Vec<f64>, Vec<f64>) = rows
            .iter()
            .filter(|r| r.difference > 0.0)
            .map(|r| (r.gamma.ln(), r.difference.ln()))
            .unzip();
        if log_g.len() < MIN_FIT_POINTS {
            return Err(AverageError::InsufficientPoints {
                needed: MIN_FIT_POINTS,
                got: log_g.len(),
            });
        }
        let fit = fit_line(&log_g, &log_d).ok_or_else(|| {
            AverageError::InvalidGrid("widths must not all be equal".into())
        })?;
        ScalingOutcome::PowerLaw(fit)
    };
    Ok(ScalingReport {
        observable: obs.name.clone(),
        energy,
        rows,
        outcome,
    })
}

/// Comparison of the same Lorentzian-weighted average written over momentum
/// and over energy on the physical half line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumCheck {
    /// `(Γ/2π) ∫ (k/m) g(k²/2m) / |k²/2m - z_R|² dk`.
    pub momentum_value: f64,
    /// `(Γ/2π) ∫ g(E) / |E - z_R|² dE` over the same energies.
    pub energy_value: f64,
    /// `|momentum_value - energy_value|`: quadrature consistency only.
    pub residual: f64,
    /// `|momentum_value - bohm|`: weight lost below `E = 0` (and, for the
    /// energy, above `2E_R`).
    pub tail_deficit: f64,
}

/// Evaluates the diagonal average in the momentum representation
/// `E = k²/2m`, `k ≥ 0`, and compares it with the energy-space integral and
/// with the full-line Lorentzian average.
///
/// For `g(E) = E` the half-line integral diverges logarithmically, so both
/// sides are cut symmetrically at `E ∈ [0, 2E_R]`.
pub fn berggren_momentum_check(
    pole: &ResonancePole,
    mass: f64,
    obs: &ObservableSpec,
    spec: &QuadratureSpec,
) -> Result<MomentumCheck, AverageError> {
    let er = pole.energy();
    if er.is_nan() || er <= 0.0 {
        return Err(AverageError::NegativeResonanceEnergy(er));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(AverageError::InvalidObservable(format!(
            "mass {mass} must be positive"
        )));
    }
    if obs.growth == GrowthClass::Superlinear {
        return Err(AverageError::DivergentObservable {
            name: obs.name.clone(),
        });
    }
    let gamma = pole.width();
    let z = pole.z();
    let weight = |e: f64| (gamma / (2.0 * std::f64::consts::PI)) / (e - z).norm_sqr();
    let in_energy = |e: f64| Complex64::new(weight(e) * obs.eval_real(e), 0.0);
    let in_momentum = |k: f64| {
        let e = k * k / (2.0 * mass);
        Complex64::new(k / mass * weight(e) * obs.eval_real(e), 0.0)
    };

    let k_peak = (2.0 * mass * er).sqrt();
    let k_feature = Feature::new(k_peak, gamma / 2.0 * mass / k_peak);
    let mut e_features = vec![pole.feature()];
    e_features.extend_from_slice(&obs.features);
    let k_features: Vec<Feature> = e_features
        .iter()
        .filter(|f| f.center > 0.0)
        .map(|f| {
            let k = (2.0 * mass * f.center).sqrt();
            Feature::new(k, f.width * mass / k)
        })
        .chain(std::iter::once(k_feature))
        .collect();

    let (momentum_value, energy_value) = if obs.growth == GrowthClass::Linear {
        let e_hi = 2.0 * er;
        let k_hi = (2.0 * mass * e_hi).sqrt();
        let e_breaks: Vec<f64> = [-10.0, -1.0, 0.0, 1.0, 10.0]
            .iter()
            .map(|s| er + s * gamma / 2.0)
            .collect();
        let k_breaks: Vec<f64> = e_breaks
            .iter()
            .filter(|&&e| e > 0.0)
            .map(|&e| (2.0 * mass * e).sqrt())
            .collect();
        (
            integrate_interval(in_momentum, 0.0, k_hi, &k_breaks, spec)?.value.re,
            integrate_interval(in_energy, 0.0, e_hi, &e_breaks, spec)?.value.re,
        )
    } else {
        (
            integrate_half_line_with(in_momentum, &k_features, spec)?.value.re,
            integrate_half_line_with(in_energy, &e_features, spec)?.value.re,
        )
    };
    let bohm = average_bohm(&GamowVector::decaying(*pole), obs, spec)?;
    Ok(MomentumCheck {
        momentum_value,
        energy_value,
        residual: (momentum_value - energy_value).abs(),
        tail_deficit: (momentum_value - bohm).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pole(e: f64, g: f64) -> ResonancePole {
        ResonancePole::new(e, g).unwrap()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn zero_average_is_zero() {
        for (e, g) in [(1.0, 0.1), (0.0, 1.0), (100.0, 10.0)] {
            let z = average_nakanishi(&pole(e, g));
            assert_eq!(z.value, 0.0);
            assert!(!z.caveat.is_empty());
        }
    }

    #[test]
    fn complex_average_examples() {
        let p = pole(2.0, 0.4);
        assert_eq!(average_complex(&p, &ObservableSpec::energy()).unwrap(), Complex64::new(2.0, -0.2));
        assert_eq!(average_complex(&p, &ObservableSpec::constant(1.0)).unwrap(), Complex64::new(1.0, 0.0));
        let q = pole(1.0, 0.2);
        let z = Complex64::new(1.0, -0.1);
        let got = average_complex(&q, &ObservableSpec::inverse_quadratic()).unwrap();
        assert!((got - 1.0 / (z * z + 1.0)).norm() < 1e-15);
    }

    #[test]
    fn continuation_failure() {
        // the kernel has a pole at c - ib = 3 - 0.5i, exactly z_R
        let obs = ObservableSpec::lorentzian_kernel(3.0, 0.5).unwrap();
        assert!(matches!(
            average_complex(&pole(3.0, 1.0), &obs),
            Err(AverageError::ContinuationUndefined { .. })
        ));
    }

    #[test]
    fn berggren_examples() {
        let p = pole(2.0, 0.4);
        assert_eq!(average_berggren(&p, &ObservableSpec::energy()).unwrap(), 2.0);
        assert_eq!(average_berggren(&p, &ObservableSpec::constant(1.0)).unwrap(), 1.0);
        let q = pole(1.0, 0.2);
        let z = Complex64::new(1.0, -0.1);
        let got = average_berggren(&q, &ObservableSpec::inverse_quadratic()).unwrap();
        assert!((got - (1.0 / (z * z + 1.0)).re).abs() < 1e-15);
    }

    #[test]
    fn bohm_examples() {
        let p = pole(5.0, 0.3);
        let energy = ObservableSpec::energy();
        for v in [GamowVector::decaying(p), GamowVector::growing(p)] {
            assert!((average_bohm(&v, &energy, &spec()).unwrap() - 5.0).abs() < 1e-8);
            let one = average_bohm(&v, &ObservableSpec::constant(1.0), &spec()).unwrap();
            assert!((one - 1.0).abs() < 1e-9);
        }
        assert!(matches!(
            average_bohm(&GamowVector::decaying(p), &ObservableSpec::energy_squared(), &spec()),
            Err(AverageError::DivergentObservable { .. })
        ));
    }

    #[test]
    fn bohm_lorentzian_kernel_closed_form() {
        // convolution of two Lorentzians: ((b+γ)/b) / ((E_R-c)² + (b+γ)²)
        let (er, c, b) = (10.0, 15.0, 2.0);
        let obs = ObservableSpec::lorentzian_kernel(c, b).unwrap();
        for gamma in [1e-3, 1e-2, 0.1, 1.0] {
            let g = gamma / 2.0;
            let exact = ((b + g) / b) / ((er - c).powi(2) + (b + g).powi(2));
            let got = average_bohm(&GamowVector::decaying(pole(er, gamma)), &obs, &spec()).unwrap();
            assert!((got - exact).abs() < 1e-11, "Γ={gamma}: {got} vs {exact}");
        }
    }

    #[test]
    fn report_rows() {
        let p = pole(5.0, 0.3);
        let r = average_report(&p, &ObservableSpec::energy(), &spec()).unwrap();
        assert_eq!(r.nakanishi.value, 0.0);
        assert_eq!(r.complex_avg, Complex64::new(5.0, -0.15));
        assert!((r.bohm.value().unwrap() - 5.0).abs() < 1e-8);
        assert_eq!(r.berggren, 5.0);
        assert!(r.bohm_minus_berggren.unwrap().abs() < 1e-8);

        let r = average_report(&p, &ObservableSpec::constant(1.0), &spec()).unwrap();
        assert_eq!(r.complex_avg, Complex64::new(1.0, 0.0));
        assert!(r.bohm_minus_berggren.unwrap().abs() < 1e-9);

        let r = average_report(&p, &ObservableSpec::energy_squared(), &spec()).unwrap();
        assert_eq!(r.bohm, BohmOutcome::Divergent);
        assert_eq!(r.bohm_minus_berggren, None);
    }

    #[test]
    fn energy_scaling_is_exact() {
        let report =
            gamma_scaling_experiment(&ObservableSpec::energy(), 3.0, &[0.1, 0.01, 0.001], &spec())
                .unwrap();
        assert!(matches!(report.outcome, ScalingOutcome::ExactAgreement { .. }));
        let report =
            gamma_scaling_experiment(&ObservableSpec::constant(2.5), 3.0, &[0.1, 0.01, 0.001], &spec())
                .unwrap();
        assert!(matches!(report.outcome, ScalingOutcome::ExactAgreement { .. }));
    }

    #[test]
    fn kernel_differences_match_closed_form() {
        let (er, c, b) = (10.0, 15.0, 2.0);
        let obs = ObservableSpec::lorentzian_kernel(c, b).unwrap();
        let grid = gamma_grid(1e-3, 1e-1, 8).unwrap();
        let report = gamma_scaling_experiment(&obs, er, &grid, &spec()).unwrap();
        for row in &report.rows {
            let g = row.gamma / 2.0;
            let bohm = ((b + g) / b) / ((er - c).powi(2) + (b + g).powi(2));
            let berggren = (1.0 / (Complex64::new(er - c, -g).powi(2) + b * b)).re;
            assert!((row.difference - (bohm - berggren).abs()).abs() < 1e-11);
        }
        assert!(report.slope().is_some());
    }

    #[test]
    fn scaling_input_errors() {
        let obs = ObservableSpec::inverse_quadratic();
        assert!(matches!(
            gamma_scaling_experiment(&obs, 2.0, &[0.1], &spec()),
            Err(AverageError::InsufficientPoints { .. })
        ));
        assert!(gamma_scaling_experiment(&obs, 2.0, &[], &spec()).is_err());
        assert!(gamma_scaling_experiment(&ObservableSpec::energy_squared(), 2.0, &[0.1; 4], &spec()).is_err());
        assert!(gamma_grid(1e-3, 1.0, 4).is_err());
        let grid = gamma_grid(1e-3, 1.0, 8).unwrap();
        assert_eq!(grid.len(), 25);
        assert_eq!(grid[0], 1e-3);
        assert_eq!(*grid.last().unwrap(), 1.0);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn momentum_check_examples() {
        let p = pole(10.0, 0.1);
        let one = berggren_momentum_check(&p, 1.0, &ObservableSpec::constant(1.0), &spec()).unwrap();
        assert!(one.residual < 1e-3);
        // the weight below E = 0 is atan(γ/E_R)/π
        assert!((one.tail_deficit - (0.05f64 / 10.0).atan() / PI).abs() < 1e-8);

        let e = berggren_momentum_check(&p, 1.0, &ObservableSpec::energy(), &spec()).unwrap();
        assert!((e.momentum_value / 10.0 - 1.0).abs() < 0.1 / 10.0);
        assert!(e.residual < 1e-8);

        assert!(matches!(
            berggren_momentum_check(&pole(-1.0, 0.1), 1.0, &ObservableSpec::constant(1.0), &spec()),
            Err(AverageError::NegativeResonanceEnergy(_))
        ));
    }

    #[test]
    fn momentum_tail_shrinks_with_width() {
        let deficits: Vec<f64> = [1.0, 0.3, 0.1, 0.03, 0.01]
            .iter()
            .map(|&g| {
                berggren_momentum_check(&pole(10.0, g), 1.0, &ObservableSpec::constant(1.0), &spec())
                    .unwrap()
                    .tail_deficit
            })
            .collect();
        assert!(deficits.windows(2).all(|w| w[1] < w[0]), "{deficits:?}");
    }

    #[test]
    fn parser_round_trip() {
        for text in ["energy", "energy_squared", "inverse_quadratic", "constant:2.5", "lorentzian:15:2", "gaussian:1:0.5"] {
            assert_eq!(ObservableSpec::parse(text).unwrap().name(), text);
        }
        for bad in ["", "constant", "lorentzian:1", "lorentzian:1:-2", "energy:1", "cubic", "constant:x"] {
            assert!(ObservableSpec::parse(bad).is_err(), "{bad}");
        }
        assert_eq!(ObservableSpec::energy().growth_class(), GrowthClass::Linear);
        assert!(ObservableSpec::new("affine", |e| e, |z| z, GrowthClass::Linear).is_err());
    }

    #[test]
    fn continuation_agrees_on_axis() {
        let samples: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.7).collect();
        for text in ["energy", "energy_squared", "inverse_quadratic", "constant:2.5", "lorentzian:15:2", "gaussian:1:0.5"] {
            assert!(ObservableSpec::parse(text).unwrap().continuation_mismatch(&samples) < 1e-10);
        }
    }
}
