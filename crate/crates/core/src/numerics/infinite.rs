//! Infinite and half-infinite ranges by rational substitution.
//!
//! The real line is mapped onto (-1, 1) with `E = c + w t / (1 - t^2)` and the
//! half line onto [0, 1) with `E = lo + w u / (1 - u)`. For integrands that
//! decay like `1/E^2` both Jacobian-weighted integrands stay bounded at the
//! open ends, so the Kronrod engine never needs an explicit tail model.

use num_complex::Complex64;

use super::{integrate_interval, Estimate, Feature, NumericsError, QuadratureSpec};

fn usable(features: &[Feature]) -> impl Iterator<Item = &Feature> {
    features
        .iter()
        .filter(|f| f.center.is_finite() && f.width.is_finite() && f.width > 0.0)
}

/// Offsets (in units of a feature width) at which breakpoints are seeded.
const FEATURE_OFFSETS: [f64; 5] = [-10.0, -1.0, 0.0, 1.0, 10.0];

fn line_to_unit(y: f64) -> f64 {
    // inverse of y = t / (1 - t^2), stable for both signs
    if y == 0.0 {
        0.0
    } else {
        2.0 * y / (1.0 + (1.0 + 4.0 * y * y).sqrt())
    }
}

/// Integrates `f` over the whole real line.
pub fn integrate_real_line<F>(f: F, spec: &QuadratureSpec) -> Result<Estimate, NumericsError>
where
    F: Fn(f64) -> Complex64,
{
    integrate_real_line_with(f, &[], spec)
}

/// Integrates `f` over the whole real line, centring the substitution on the
/// widest feature and seeding breakpoints around every feature.
pub fn integrate_real_line_with<F>(
    f: F,
    features: &[Feature],
    spec: &QuadratureSpec,
) -> Result<Estimate, NumericsError>
where
    F: Fn(f64) -> Complex64,
{
    let (c, w) = usable(features)
        .max_by(|x, y| x.width.total_cmp(&y.width))
        .map_or((0.0, 1.0), |f| (f.center, f.width));

    let mut cuts = vec![0.0];
    for feat in usable(features) {
        for k in FEATURE_OFFSETS {
            cuts.push(line_to_unit((feat.center + k * feat.width - c) / w));
        }
    }

    let mapped = |t: f64| {
        let gap = (1.0 - t) * (1.0 + t);
        let e = c + w * t / gap;
        f(e) * (w * (1.0 + t * t) / (gap * gap))
    };
    integrate_interval(mapped, -1.0, 1.0, &cuts, spec)
}

/// Integrates `f` over `[0, ∞)`.
pub fn integrate_half_line<F>(f: F, spec: &QuadratureSpec) -> Result<Estimate, NumericsError>
where
    F: Fn(f64) -> Complex64,
{
    integrate_half_line_with(f, &[], spec)
}

/// Integrates `f` over `[0, ∞)` with feature hints.
pub fn integrate_half_line_with<F>(
    f: F,
    features: &[Feature],
    spec: &QuadratureSpec,
) -> Result<Estimate, NumericsError>
where
    F: Fn(f64) -> Complex64,
{
    integrate_from(f, 0.0, features, spec)
}

pub(crate) fn integrate_from<F>(
    f: F,
    lo: f64,
    features: &[Feature],
    spec: &QuadratureSpec,
) -> Result<Estimate, NumericsError>
where
    F: Fn(f64) -> Complex64,
{
    if !lo.is_finite() {
        return Err(NumericsError::InvalidDomain("lower limit must be finite"));
    }
    let w = usable(features)
        .map(|f| (f.center - lo).abs() + f.width)
        .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.max(s))))
        .unwrap_or(1.0);

    let mut cuts = Vec::new();
    for feat in usable(features) {
        for k in FEATURE_OFFSETS {
            let y = (feat.center + k * feat.width - lo) / w;
            if y > 0.0 {
                cuts.push(y / (1.0 + y));
            }
        }
    }

    let mapped = |u: f64| {
        let gap = 1.0 - u;
        let e = lo + w * u / gap;
        f(e) * (w / (gap * gap))
    };
    integrate_interval(mapped, 0.0, 1.0, &cuts, spec)
}

/// Symmetric principal value `lim_{R→∞} ∫_{c-R}^{c+R} f` about `center`.
pub fn principal_value<F>(
    f: F,
    center: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate, NumericsError>
where
    F: Fn(f64) -> Complex64,
{
    principal_value_with(f, center, &[], spec)
}

/// Principal value about `center` with feature hints.
///
/// The integrand is folded onto `[0, ∞)` as `f(c + x) + f(c - x)`; any part of
/// `f` that is odd about `c` cancels pointwise, so the folded integrand is
/// absolutely integrable exactly when the symmetric partial integrals
/// converge. A folded tail decaying like `1/x` leaves a logarithmic
/// divergence that the adaptive engine reports as non-convergence.
pub fn principal_value_with<F>(
    f: F,
    center: f64,
    features: &[Feature],
    spec: &QuadratureSpec,
) -> Result<Estimate, NumericsError>
where
    F: Fn(f64) -> Complex64,
{
    if !center.is_finite() {
        return Err(NumericsError::InvalidDomain("principal value centre must be finite"));
    }
    let folded_features: Vec<Feature> = usable(features)
        .map(|feat| Feature::new((feat.center - center).abs(), feat.width))
        .collect();
    integrate_from(
        |x| f(center + x) + f(center - x),
        0.0,
        &folded_features,
        spec,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn unit_lorentzian_over_line() {
        let spec = QuadratureSpec::default();
        let est = integrate_real_line(|e| c(1.0 / (e * e + 1.0)), &spec).unwrap();
        assert!((est.value.re - PI).abs() < 1e-12);
        assert!(est.abs_error <= spec.tolerance_for(est.value));
    }

    #[test]
    fn shifted_lorentzian_width_two() {
        // E_R = 1, Γ = 2: ∫ dE / ((E-1)^2 + 1) = π
        let spec = QuadratureSpec::default();
        let est = integrate_real_line(|e| c(1.0 / ((e - 1.0).powi(2) + 1.0)), &spec).unwrap();
        assert!((est.value.re - PI).abs() < 1e-12);
    }

    #[test]
    fn double_pole_integrates_to_zero() {
        for z in [
            Complex64::new(1.0, -0.5),
            Complex64::new(-3.0, 2.0),
            Complex64::new(0.0, -1e-2),
        ] {
            // ∫|f| = π/|Im z|; the absolute floor has to follow that scale
            let spec = QuadratureSpec::default().with_abs_tol(1e-12 * PI / z.im.abs());
            let est = integrate_real_line_with(
                |e| (c(e) - z).powi(-2),
                &[Feature::new(z.re, z.im.abs())],
                &spec,
            )
            .unwrap();
            assert!(est.value.norm() < 1e-9 * PI / z.im.abs(), "z = {z}: {}", est.value);
        }
    }

    #[test]
    fn half_line_examples() {
        let spec = QuadratureSpec::default();
        let exp = integrate_half_line(|e| c((-e).exp()), &spec).unwrap();
        assert!((exp.value.re - 1.0).abs() < 1e-12);

        let lor = integrate_half_line(|e| c(1.0 / (e * e + 1.0)), &spec).unwrap();
        assert!((lor.value.re - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn half_line_breit_wigner_deficit() {
        // mass of the Lorentzian below zero is atan(γ/E_R)/π
        let (er, gamma) = (5.0, 0.1);
        let half = gamma / 2.0;
        let spec = QuadratureSpec::default();
        let est = integrate_half_line_with(
            |e| c((gamma / (2.0 * PI)) / ((e - er).powi(2) + half * half)),
            &[Feature::new(er, half)],
            &spec,
        )
        .unwrap();
        let delta = 1.0 - est.value.re;
        let oracle = (half / er).atan() / PI;
        assert!(delta > 0.0);
        assert!((delta - oracle).abs() < 1e-9, "{delta} vs {oracle}");
    }

    #[test]
    fn principal_value_examples() {
        let spec = QuadratureSpec::default();
        let odd = principal_value(|x| c(x / (x * x + 1.0)), 0.0, &spec).unwrap();
        assert!(odd.value.norm() < 1e-12);

        let (er, gamma) = (2.0, 0.5);
        let first_moment = principal_value_with(
            |e| c(e / ((e - er).powi(2) + (gamma / 2.0).powi(2))),
            er,
            &[Feature::new(er, gamma / 2.0)],
            &spec,
        )
        .unwrap();
        assert!((first_moment.value.re - 8.0 * PI).abs() < 1e-8 * 8.0 * PI);

        let plain = principal_value(|x| c(1.0 / (x * x + 4.0)), 0.0, &spec).unwrap();
        assert!((plain.value.re - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn even_one_over_x_tail_diverges() {
        let spec = QuadratureSpec::default();
        let err = principal_value(|x| c(1.0 / (x.abs() + 1.0)), 0.0, &spec).unwrap_err();
        assert!(matches!(err, NumericsError::NonConvergence { .. }));
    }
}
