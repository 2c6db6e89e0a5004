//! s-wave scattering from a delta-function shell.
//!
//! With `ħ = 1` and the reduced potential `U(r) = 2mV(r) = λ δ(r - a)`, the
//! regular solution is `sin(kr)/k` inside the shell. Matching value and the
//! derivative jump `λ u(a)` at `r = a` onto `u = (F(-k) e^{ikr} - F(k) e^{-ikr}) / 2ik`
//! outside gives the Jost function
//!
//! ```text
//! F(k) = 1 + (λ/k) sin(ka) e^{ika} = 1 + λ (e^{2ika} - 1) / (2ik)
//! ```
//!
//! and the S-matrix `S(k) = F(-k) / F(k)`. `F` is entire, satisfies
//! `F(-k*) = F(k)*`, so `|S| = 1` on the real axis, and its zeros in the lower
//! half plane come in pairs `(k, -k*)`. Zeros with `Re k > 0` are decaying
//! resonances at `z = k²/2m`. As `λa → ∞` the shell becomes impenetrable and
//! the zeros approach the box momenta `nπ/a` from below.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::gamow::ResonancePole;
use crate::numerics::find_root_complex_with_derivative;

/// `|ka|` below which the Jost function is summed as a power series.
const SERIES_RADIUS: f64 = 1e-3;
const NEWTON_TOL: f64 = 1e-11;
const NEWTON_MAX_ITER: usize = 100;
/// Zeros closer than this are the same zero.
pub const DEDUP_DISTANCE: f64 = 1e-8;
/// Jost values at or below this make the S-matrix undefined.
const POLE_HIT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid model parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("invalid search window: {0}")]
    InvalidWindow(String),
    #[error("no resonance zeros in the search window")]
    NoPolesInWindow,
    #[error("S-matrix evaluated at a Jost zero k = {k}")]
    PoleHit { k: Complex64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaShellModel {
    strength: f64,
    radius: f64,
    mass: f64,
}

impl DeltaShellModel {
    pub fn new(strength: f64, radius: f64, mass: f64) -> Result<Self, ModelError> {
        if !strength.is_finite() {
            return Err(ModelError::InvalidParameter {
                name: "strength",
                value: strength,
            });
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(ModelError::InvalidParameter {
                name: "radius",
                value: radius,
            });
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(ModelError::InvalidParameter {
                name: "mass",
                value: mass,
            });
        }
        Ok(Self {
            strength,
            radius,
            mass,
        })
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `E = k² / 2m`.
    pub fn energy_of(&self, k: Complex64) -> Complex64 {
        k * k / (2.0 * self.mass)
    }

    /// `(e^{2ika} - 1) / (2ik)` and its k-derivative.
    fn shell_factor(&self, k: Complex64) -> (Complex64, Complex64) {
        let a = self.radius;
        let i = Complex64::i();
        if (k * a).norm() < SERIES_RADIUS {
            // a Σ (2ika)^n / (n+1)!
            let x = 2.0 * i * a * k;
            let mut value = Complex64::new(0.0, 0.0);
            let mut slope = Complex64::new(0.0, 0.0);
            let mut power = Complex64::new(1.0, 0.0);
            let mut power_prev = Complex64::new(0.0, 0.0);
            let mut fact = 1.0;
            for n in 0..8 {
                fact *= (n + 1) as f64;
                value += power / fact;
                slope += n as f64 * power_prev / fact;
                power_prev = power;
                power *= x;
            }
            (a * value, a * slope * 2.0 * i * a)
        } else {
            let phase = (2.0 * i * a * k).exp();
            let value = (phase - 1.0) / (2.0 * i * k);
            let slope = a * phase / k - (phase - 1.0) / (2.0 * i * k * k);
            (value, slope)
        }
    }

    pub fn jost_function(&self, k: Complex64) -> Complex64 {
        1.0 + self.strength * self.shell_factor(k).0
    }

    pub fn jost_derivative(&self, k: Complex64) -> Complex64 {
        self.strength * self.shell_factor(k).1
    }

    pub fn s_matrix(&self, k: Complex64) -> Result<Complex64, ModelError> {
        let denominator = self.jost_function(k);
        if denominator.norm() <= POLE_HIT {
            return Err(ModelError::PoleHit { k });
        }
        Ok(self.jost_function(-k) / denominator)
    }

    /// `|F(-k0*)|`, which vanishes whenever `k0` is a zero.
    pub fn pole_pair_symmetry_check(&self, k0: Complex64) -> f64 {
        self.jost_function(-k0.conj()).norm()
    }
}

/// Closed rectangle of the lower half momentum plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumWindow {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl MomentumWindow {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Result<Self, ModelError> {
        let w = Self {
            re_min: re.0,
            re_max: re.1,
            im_min: im.0,
            im_max: im.1,
        };
        w.validate()?;
        Ok(w)
    }

    fn validate(&self) -> Result<(), ModelError> {
        let all_finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(ModelError::InvalidWindow("bounds must be finite".into()));
        }
        if self.re_min >= self.re_max || self.im_min >= self.im_max {
            return Err(ModelError::InvalidWindow(
                "bounds must be strictly increasing".into(),
            ));
        }
        if self.im_max > 0.0 {
            return Err(ModelError::InvalidWindow(format!(
                "Im k must stay in the lower half plane, got upper bound {}",
                self.im_max
            )));
        }
        Ok(())
    }

    pub fn contains(&self, k: Complex64) -> bool {
        (self.re_min..=self.re_max).contains(&k.re) && (self.im_min..=self.im_max).contains(&k.im)
    }
}

impl Default for MomentumWindow {
    fn default() -> Self {
        Self {
            re_min: 0.0,
            re_max: 10.0,
            im_min: -2.0,
            im_max: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Seed columns along Re k.
    pub grid_re: usize,
    /// Seed rows along Im k.
    pub grid_im: usize,
    /// Keep at most this many poles (lowest energies first).
    pub max_count: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            grid_re: 50,
            grid_im: 25,
            max_count: None,
        }
    }
}

impl SearchOptions {
    pub fn with_grid(self, grid_re: usize, grid_im: usize) -> Self {
        Self {
            grid_re,
            grid_im,
            ..self
        }
    }

    pub fn with_max_count(self, max_count: usize) -> Self {
        Self {
            max_count: Some(max_count),
            ..self
        }
    }
}

/// A located Jost zero and the resonance it defines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub k: Complex64,
    pub pole: ResonancePole,
    /// `|F(k)|` at the returned zero.
    pub jost_residual: f64,
}

/// Cell centres whose `|F|` is no larger than at any grid neighbour.
fn seed_points(model: &DeltaShellModel, w: &MomentumWindow, nx: usize, ny: usize) -> Vec<Complex64> {
    let dx = (w.re_max - w.re_min) / nx as f64;
    let dy = (w.im_max - w.im_min) / ny as f64;
    let point = |i: usize, j: usize| {
        Complex64::new(
            w.re_min + (i as f64 + 0.5) * dx,
            w.im_min + (j as f64 + 0.5) * dy,
        )
    };
    let magnitude: Vec<f64> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .map(|(i, j)| model.jost_function(point(i, j)).norm())
        .collect();
    let at = |i: usize, j: usize| magnitude[j * nx + i];

    let mut seeds = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let here = at(i, j);
            let is_min = (j.saturating_sub(1)..=(j + 1).min(ny - 1))
                .flat_map(|jj| (i.saturating_sub(1)..=(i + 1).min(nx - 1)).map(move |ii| (ii, jj)))
                .all(|(ii, jj)| at(ii, jj) >= here);
            if is_min {
                seeds.push(point(i, j));
            }
        }
    }
    seeds
}

/// Resonance zeros of the Jost function inside `window`, sorted by energy.
///
/// Local minima of `|F|` on a cell-centred grid seed a Newton iteration with
/// the analytic derivative. Converged zeros outside the window or with a
/// non-positive width are dropped and repeats closer than
/// [`DEDUP_DISTANCE`] are merged.
pub fn find_resonances(
    model: &DeltaShellModel,
    window: &MomentumWindow,
    options: &SearchOptions,
) -> Result<Vec<Resonance>, ModelError> {
    window.validate()?;
    if options.grid_re < 2 || options.grid_im < 2 {
        return Err(ModelError::InvalidWindow(
            "seed grid needs at least 2x2 points".into(),
        ));
    }
    let seeds = seed_points(model, window, options.grid_re, options.grid_im);

    let zeros: Vec<Complex64> = seeds
        .par_iter()
        .filter_map(|&seed| {
            find_root_complex_with_derivative(
                |k| model.jost_function(k),
                |k| model.jost_derivative(k),
                seed,
                NEWTON_TOL,
                NEWTON_MAX_ITER,
            )
            .ok()
            .map(|root| root.point)
        })
        .collect();

    let mut found: Vec<Resonance> = Vec::new();
    for k in zeros {
        if !window.contains(k) || k.re <= 0.0 || k.im >= 0.0 {
            continue;
        }
        if found.iter().any(|r| (r.k - k).norm() < DEDUP_DISTANCE) {
            continue;
        }
        let z = model.energy_of(k);
        let Ok(pole) = ResonancePole::new(z.re, -2.0 * z.im) else {
            continue;
        };
        found.push(Resonance {
            k,
            pole,
            jost_residual: model.jost_function(k).norm(),
        });
    }
    if found.is_empty() {
        return Err(ModelError::NoPolesInWindow);
    }
    found.sort_by(|a, b| {
        a.pole
            .energy()
            .total_cmp(&b.pole.energy())
            .then(a.k.im.total_cmp(&b.k.im))
    });
    if let Some(n) = options.max_count {
        found.truncate(n);
    }
    Ok(found)
}
