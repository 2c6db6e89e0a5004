//! Run configuration: a TOML file with one section per subcommand, plus
//! `section.key=value` overrides from the command line.

use std::path::{Path, PathBuf};

use gamow_core::averages::MIN_FIT_POINTS;
use gamow_core::numerics::QuadratureSpec;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub poles: PolesSection,
    pub average: AverageSection,
    pub compare_gamma: CompareGammaSection,
    pub survival: SurvivalSection,
    pub titchmarsh: TitchmarshSection,
    pub quadrature: QuadratureSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    /// Shell coupling λ (inverse length).
    pub strength: f64,
    pub radius: f64,
    pub mass: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            strength: 10.0,
            radius: 1.0,
            mass: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct PolesSection {
    pub re_range: [f64; 2],
    pub im_range: [f64; 2],
    /// Seed grid `[columns, rows]`.
    pub grid: [usize; 2],
    pub max_count: Option<usize>,
}

impl Default for PolesSection {
    fn default() -> Self {
        Self {
            re_range: [0.0, 10.0],
            im_range: [-2.0, 0.0],
            grid: [50, 25],
            max_count: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct AverageSection {
    /// Inline `[E_R, Γ]` pairs.
    pub poles: Vec<[f64; 2]>,
    /// Also average over the poles found in the model.
    pub use_model_poles: bool,
    /// A table written by `gamow poles`.
    pub poles_file: Option<PathBuf>,
    pub observables: Vec<String>,
}

impl Default for AverageSection {
    fn default() -> Self {
        Self {
            poles: vec![[5.0, 0.3]],
            use_model_poles: false,
            poles_file: None,
            observables: vec!["energy".into(), "constant:1".into()],
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct CompareGammaSection {
    pub energy: f64,
    pub observable: String,
    pub gamma_range: [f64; 2],
    pub per_decade: usize,
    /// Explicit widths; replaces the geometric grid when present.
    pub gammas: Option<Vec<f64>>,
}

impl Default for CompareGammaSection {
    fn default() -> Self {
        Self {
            energy: 10.0,
            observable: "lorentzian:15:2".into(),
            gamma_range: [1e-3, 1.0],
            per_decade: 8,
            gammas: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Geometric,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SurvivalSection {
    /// `bw_full_line`, `bw_truncated` or `gaussian_truncated`.
    pub density: String,
    pub energy: f64,
    /// Γ for the Lorentzians, σ for the Gaussian.
    pub width: f64,
    pub time_range: [f64; 2],
    pub samples: usize,
    pub spacing: Spacing,
    /// Explicit times; replaces the generated grid when present.
    pub times: Option<Vec<f64>>,
}

impl Default for SurvivalSection {
    fn default() -> Self {
        Self {
            density: "bw_truncated".into(),
            energy: 5.0,
            width: 1.0,
            time_range: [0.0, 200.0],
            samples: 201,
            spacing: Spacing::Linear,
            times: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct TitchmarshSection {
    /// `builtin`, or entries `lower:n:m` / `upper:n:m`.
    pub family: Vec<String>,
    /// `[Re z, Im z]` with `Im z < 0`; mirrored for upper-class functions.
    pub targets: Vec<[f64; 2]>,
    /// Add `z_R` of every model pole to the targets.
    pub use_model_poles: bool,
}

impl Default for TitchmarshSection {
    fn default() -> Self {
        Self {
            family: vec!["builtin".into()],
            targets: vec![[0.0, -1.0], [1.5, -0.25]],
            use_model_poles: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_refinements: u32,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            max_refinements: q.max_refinements,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub format: Format,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { format: Format::Csv }
    }
}

/// Parses an override `section.key=value`. The value is read as a TOML value
/// and falls back to a bare string, so `survival.density=bw_full_line` needs
/// no quotes.
fn apply_override(table: &mut toml::Table, text: &str) -> Result<(), CliError> {
    let (path, raw) = text
        .split_once('=')
        .ok_or_else(|| CliError::Validation(format!("override {text:?} is not key=value")))?;
    let (section, key) = path.trim().split_once('.').ok_or_else(|| {
        CliError::Validation(format!("override key {path:?} must look like section.key"))
    })?;
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let entry = table
        .entry(section.trim().to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    match entry {
        toml::Value::Table(t) => {
            t.insert(key.trim().to_string(), value);
            Ok(())
        }
        _ => Err(CliError::Validation(format!("{section} is not a section"))),
    }
}

impl RunConfig {
    /// Parses configuration text and applies overrides in order.
    pub fn from_text(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::Validation(format!("config: {e}")))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let config: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Validation(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        Self::from_text(&text, overrides)
    }

    pub fn quadrature_spec(&self) -> QuadratureSpec {
        QuadratureSpec::default()
            .with_rel_tol(self.quadrature.rel_tol)
            .with_abs_tol(self.quadrature.abs_tol)
            .with_max_refinements(self.quadrature.max_refinements)
    }

    /// Checks every physical parameter and grid; errors name the field.
    pub fn validate(&self) -> Result<(), CliError> {
        let m = &self.model;
        finite("model.strength", m.strength)?;
        positive("model.radius", m.radius)?;
        positive("model.mass", m.mass)?;

        let p = &self.poles;
        increasing_pair("poles.re_range", p.re_range)?;
        increasing_pair("poles.im_range", p.im_range)?;
        if p.im_range[1] > 0.0 {
            return invalid("poles.im_range", "must lie in the lower half plane (upper bound <= 0)");
        }
        if p.grid[0] < 2 || p.grid[1] < 2 {
            return invalid("poles.grid", "needs at least 2 points in each direction");
        }
        if p.max_count == Some(0) {
            return invalid("poles.max_count", "must be at least 1");
        }

        let a = &self.average;
        if a.observables.is_empty() {
            return invalid("average.observables", "must not be empty");
        }
        for (i, [e, g]) in a.poles.iter().enumerate() {
            finite(&format!("average.poles[{i}] energy"), *e)?;
            positive(&format!("average.poles[{i}] width"), *g)?;
        }

        let c = &self.compare_gamma;
        finite("compare_gamma.energy", c.energy)?;
        match &c.gammas {
            Some(g) => {
                strictly_increasing("compare_gamma.gammas", g)?;
                if g[0] <= 0.0 {
                    return invalid("compare_gamma.gammas", "widths must be positive");
                }
            }
            None => {
                increasing_pair("compare_gamma.gamma_range", c.gamma_range)?;
                positive("compare_gamma.gamma_range lower bound", c.gamma_range[0])?;
            }
        }
        if self.gamma_grid()?.len() < MIN_FIT_POINTS {
            return invalid(
                "compare_gamma.gammas",
                &format!("needs at least {MIN_FIT_POINTS} widths for the scaling fit"),
            );
        }

        let s = &self.survival;
        finite("survival.energy", s.energy)?;
        positive("survival.width", s.width)?;
        match &s.times {
            Some(t) => strictly_increasing("survival.times", t)?,
            None => {
                increasing_pair("survival.time_range", s.time_range)?;
                if s.samples < 2 {
                    return invalid("survival.samples", "needs at least 2 samples");
                }
                if s.spacing == Spacing::Geometric && s.time_range[0] <= 0.0 {
                    return invalid("survival.time_range", "geometric spacing needs a positive start");
                }
            }
        }
        if self.survival_times()?.iter().any(|&t| t < 0.0) {
            return invalid("survival.times", "times must be non-negative");
        }

        let t = &self.titchmarsh;
        if t.family.is_empty() {
            return invalid("titchmarsh.family", "must name at least one test function");
        }
        if t.targets.is_empty() && !t.use_model_poles {
            return invalid("titchmarsh.targets", "must not be empty without model poles");
        }
        for (i, [re, im]) in t.targets.iter().enumerate() {
            finite(&format!("titchmarsh.targets[{i}] real part"), *re)?;
            if im.is_nan() || *im >= 0.0 {
                return invalid(
                    &format!("titchmarsh.targets[{i}]"),
                    "imaginary part must be negative",
                );
            }
        }

        self.quadrature_spec()
            .validate()
            .map_err(|e| CliError::Validation(format!("quadrature: {e}")))?;
        Ok(())
    }

    /// Width grid for `compare-gamma`.
    pub fn gamma_grid(&self) -> Result<Vec<f64>, CliError> {
        let c = &self.compare_gamma;
        match &c.gammas {
            Some(g) => Ok(g.clone()),
            None => gamow_core::averages::gamma_grid(c.gamma_range[0], c.gamma_range[1], c.per_decade)
                .map_err(|e| CliError::Validation(format!("compare_gamma: {e}"))),
        }
    }

    /// Time grid for `survival`.
    pub fn survival_times(&self) -> Result<Vec<f64>, CliError> {
        let s = &self.survival;
        if let Some(t) = &s.times {
            return Ok(t.clone());
        }
        let [lo, hi] = s.time_range;
        let n = s.samples;
        Ok(match s.spacing {
            Spacing::Linear => (0..n)
                .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
                .collect(),
            Spacing::Geometric => gamow_core::survival::geometric_times(lo, hi, n)
                .map_err(|e| CliError::Validation(format!("survival: {e}")))?,
        })
    }
}

fn invalid<T>(field: &str, why: &str) -> Result<T, CliError> {
    Err(CliError::Validation(format!("{field} {why}")))
}

fn finite(field: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        invalid(field, &format!("must be finite, got {v}"))
    }
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        invalid(field, &format!("must be positive, got {v}"))
    }
}

fn increasing_pair(field: &str, [lo, hi]: [f64; 2]) -> Result<(), CliError> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        invalid(field, &format!("must be an increasing pair, got [{lo}, {hi}]"))
    }
}

fn strictly_increasing(field: &str, v: &[f64]) -> Result<(), CliError> {
    if v.is_empty() {
        return invalid(field, "must not be empty");
    }
    if v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| w[1] <= w[0]) {
        return invalid(field, "must be finite and strictly increasing");
    }
    Ok(())
}
