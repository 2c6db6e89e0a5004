//! Damped Newton iteration for analytic functions of one complex variable.

use num_complex::Complex64;
use thiserror::Error;

/// Relative step of the central difference used when no derivative is
/// supplied: `h = STEP · (1 + |k|)`.
const DERIVATIVE_STEP: f64 = 1e-6;
const MAX_HALVINGS: usize = 30;
const POLISH_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub point: Complex64,
    /// `|g(point)|`, always `<= tol` on success.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum RootError {
    #[error("Newton iteration did not converge after {iterations} steps (last point {last}, |g| = {residual:e})")]
    NoConvergence {
        last: Complex64,
        residual: f64,
        iterations: usize,
    },
    #[error("derivative vanished at {at}")]
    DerivativeVanished { at: Complex64 },
    #[error("function is not finite at {at}")]
    NonFinite { at: Complex64 },
}

fn central_difference<G: Fn(Complex64) -> Complex64>(g: &G, k: Complex64) -> Complex64 {
    let h = DERIVATIVE_STEP * (1.0 + k.norm());
    (g(k + h) - g(k - h)) / (2.0 * h)
}

/// Newton iteration with a central-difference derivative.
pub fn find_root_complex<G>(
    g: G,
    seed: Complex64,
    tol: f64,
    max_iter: usize,
) -> Result<Root, RootError>
where
    G: Fn(Complex64) -> Complex64,
{
    find_root_complex_with_derivative(&g, |k| central_difference(&g, k), seed, tol, max_iter)
}

fn finite(v: Complex64) -> bool {
    v.re.is_finite() && v.im.is_finite()
}

/// Newton iteration with a caller-supplied derivative.
///
/// Steps that increase `|g|` are halved until they do not. Once `|g| <= tol`
/// a few extra steps are taken and the best point is kept, so the returned
/// residual usually sits at the rounding floor rather than just under `tol`.
pub fn find_root_complex_with_derivative<G, D>(
    g: G,
    dg: D,
    seed: Complex64,
    tol: f64,
    max_iter: usize,
) -> Result<Root, RootError>
where
    G: Fn(Complex64) -> Complex64,
    D: Fn(Complex64) -> Complex64,
{
    let mut k = seed;
    let mut value = g(k);
    if !finite(value) {
        return Err(RootError::NonFinite { at: k });
    }

    for iteration in 0..max_iter {
        if value.norm() <= tol {
            return Ok(polish(&g, &dg, k, value, iteration));
        }
        let slope = dg(k);
        if !finite(slope) || slope.norm() == 0.0 {
            return Err(RootError::DerivativeVanished { at: k });
        }
        let step = value / slope;
        let mut lambda = 1.0;
        let mut next = k - step;
        let mut next_value = g(next);
        for _ in 0..MAX_HALVINGS {
            if finite(next_value) && next_value.norm() < value.norm() {
                break;
            }
            lambda *= 0.5;
            next = k - step * lambda;
            next_value = g(next);
        }
        if !finite(next_value) {
            return Err(RootError::NonFinite { at: next });
        }
        k = next;
        value = next_value;
    }

    if value.norm() <= tol {
        return Ok(polish(&g, &dg, k, value, max_iter));
    }
    Err(RootError::NoConvergence {
        last: k,
        residual: value.norm(),
        iterations: max_iter,
    })
}

fn polish<G, D>(g: &G, dg: &D, mut k: Complex64, mut value: Complex64, iterations: usize) -> Root
where
    G: Fn(Complex64) -> Complex64,
    D: Fn(Complex64) -> Complex64,
{
    let mut best = (k, value.norm());
    for _ in 0..POLISH_STEPS {
        let slope = dg(k);
        if !finite(slope) || slope.norm() == 0.0 {
            break;
        }
        k -= value / slope;
        value = g(k);
        if !finite(value) {
            break;
        }
        if value.norm() < best.1 {
            best = (k, value.norm());
        }
    }
    Root {
        point: best.0,
        residual: best.1,
        iterations,
    }
}
