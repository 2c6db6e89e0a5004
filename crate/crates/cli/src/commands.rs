//! The five subcommands, each turning a [`RunConfig`] into a [`Table`].

use std::path::Path;

use gamow_core::averages::{
    average_report, gamma_scaling_experiment, AverageError, BohmOutcome, ObservableSpec,
    ScalingOutcome, ZERO_AVERAGE_CAVEAT,
};
use gamow_core::gamow::ResonancePole;
use gamow_core::hardy::{
    builtin_family, cauchy_eval, opposite_halfplane_check, HardyError, HardyFunction,
    RationalHardy,
};
use gamow_core::model::{
    find_resonances, DeltaShellModel, ModelError, MomentumWindow, Resonance, SearchOptions,
};
use gamow_core::survival::{crossover_time, survival_curve, DensityKind, SpectralDensity, SurvivalError};
use gamow_core::Complex64;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::table::{Cell, Column, ColumnKind, Table};

/// A table plus the failure, if any, that should set the exit status after
/// the table has been written.
#[derive(Debug)]
pub struct Outcome {
    pub table: Table,
    pub failure: Option<CliError>,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Self {
            table,
            failure: None,
        }
    }
}

fn num(name: &str, unit: &str) -> Column {
    Column::new(name, ColumnKind::Num, unit)
}

fn model_error(e: ModelError) -> CliError {
    match e {
        ModelError::InvalidParameter { .. } | ModelError::InvalidWindow(_) => {
            CliError::Validation(e.to_string())
        }
        ModelError::NoPolesInWindow => CliError::Empty(e.to_string()),
        ModelError::PoleHit { .. } => CliError::Numerical(e.to_string()),
    }
}

fn model(config: &RunConfig) -> Result<DeltaShellModel, CliError> {
    let m = &config.model;
    DeltaShellModel::new(m.strength, m.radius, m.mass).map_err(model_error)
}

fn model_poles(config: &RunConfig) -> Result<(DeltaShellModel, Vec<Resonance>), CliError> {
    let shell = model(config)?;
    let p = &config.poles;
    let window = MomentumWindow::new(
        (p.re_range[0], p.re_range[1]),
        (p.im_range[0], p.im_range[1]),
    )
    .map_err(model_error)?;
    let mut options = SearchOptions::default().with_grid(p.grid[0], p.grid[1]);
    options.max_count = p.max_count;
    let poles = find_resonances(&shell, &window, &options).map_err(model_error)?;
    Ok((shell, poles))
}

/// Resonance zeros of the delta-shell Jost function.
pub fn poles(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut table = Table::new(
        "poles",
        vec![
            Column::new("n", ColumnKind::Int, "-"),
            num("k_re", "1/length"),
            num("k_im", "1/length"),
            num("energy", "energy"),
            num("width", "energy"),
            num("jost_residual", "-"),
            num("pair_residual", "-"),
        ],
    );
    let m = &config.model;
    table.note("strength", m.strength);
    table.note("radius", m.radius);
    table.note("mass", m.mass);
    let found = match model_poles(config) {
        Ok((shell, found)) => found
            .into_iter()
            .map(|r| (r, shell.pole_pair_symmetry_check(r.k)))
            .collect::<Vec<_>>(),
        Err(e @ CliError::Empty(_)) => {
            table.note("count", 0usize);
            return Ok(Outcome {
                table,
                failure: Some(e),
            });
        }
        Err(e) => return Err(e),
    };
    table.note("count", found.len());
    for (n, (r, pair)) in found.iter().enumerate() {
        table.push(vec![
            (n as i64 + 1).into(),
            r.k.re.into(),
            r.k.im.into(),
            r.pole.energy().into(),
            r.pole.width().into(),
            r.jost_residual.into(),
            (*pair).into(),
        ]);
    }
    Ok(table.into())
}

fn read_pole_table(path: &Path) -> Result<Vec<ResonancePole>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    let format = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        _ => Format::Csv,
    };
    let table = Table::decode(&text, format)?;
    let missing = |c: &str| CliError::Validation(format!("{}: no {c} column", path.display()));
    let energies = table.column_values("energy").ok_or_else(|| missing("energy"))?;
    let widths = table.column_values("width").ok_or_else(|| missing("width"))?;
    energies
        .into_iter()
        .zip(widths)
        .enumerate()
        .map(|(i, pair)| match pair {
            (Some(e), Some(w)) => ResonancePole::new(e, w)
                .map_err(|err| CliError::Validation(format!("{} row {}: {err}", path.display(), i + 1))),
            _ => Err(CliError::Validation(format!(
                "{} row {}: energy and width must be numbers",
                path.display(),
                i + 1
            ))),
        })
        .collect()
}

fn average_poles(config: &RunConfig) -> Result<Vec<ResonancePole>, CliError> {
    let a = &config.average;
    let mut poles: Vec<ResonancePole> = a
        .poles
        .iter()
        .map(|&[e, w]| {
            ResonancePole::new(e, w).map_err(|err| CliError::Validation(format!("average.poles: {err}")))
        })
        .collect::<Result<_, _>>()?;
    if let Some(path) = &a.poles_file {
        poles.extend(read_pole_table(path)?);
    }
    if a.use_model_poles {
        poles.extend(model_poles(config)?.1.into_iter().map(|r| r.pole));
    }
    if poles.is_empty() {
        return Err(CliError::Validation("average needs at least one pole".into()));
    }
    Ok(poles)
}

fn observable(text: &str, field: &str) -> Result<ObservableSpec, CliError> {
    ObservableSpec::parse(text).map_err(|e| CliError::Validation(format!("{field}: {e}")))
}

/// The four averages for every (pole, observable) pair.
pub fn average(config: &RunConfig) -> Result<Outcome, CliError> {
    let poles = average_poles(config)?;
    let observables: Vec<ObservableSpec> = config
        .average
        .observables
        .iter()
        .map(|o| observable(o, "average.observables"))
        .collect::<Result<_, _>>()?;
    let spec = config.quadrature_spec();
    let mut table = Table::new(
        "average",
        vec![
            Column::new("pole", ColumnKind::Int, "-"),
            num("energy", "energy"),
            num("width", "energy"),
            Column::new("observable", ColumnKind::Text, "-"),
            num("zero", "observable"),
            num("complex_re", "observable"),
            num("complex_im", "observable"),
            num("bohm", "observable"),
            num("berggren", "observable"),
            num("bohm_minus_berggren", "observable"),
        ],
    );
    table.note("zero", ZERO_AVERAGE_CAVEAT);
    table.note("complex", "g(z_R) with the growing/decaying pairing normalized to 1");
    table.note("bohm", "Lorentzian average; principal value about E_R for the energy");
    table.note("berggren", "real part of the complex average");

    for (i, pole) in poles.iter().enumerate() {
        for obs in &observables {
            let head: Vec<Cell> = vec![
                (i as i64 + 1).into(),
                pole.energy().into(),
                pole.width().into(),
                obs.name().into(),
            ];
            let tail: Vec<Cell> = match average_report(pole, obs, &spec) {
                Ok(r) => vec![
                    r.nakanishi.value.into(),
                    r.complex_avg.re.into(),
                    r.complex_avg.im.into(),
                    match r.bohm {
                        BohmOutcome::Value(v) => v.into(),
                        BohmOutcome::Divergent => "divergent".into(),
                    },
                    r.berggren.into(),
                    r.bohm_minus_berggren.map_or("n/a".into(), Cell::from),
                ],
                Err(AverageError::ContinuationUndefined { .. }) => vec![
                    0.0.into(),
                    "undefined".into(),
                    "undefined".into(),
                    "n/a".into(),
                    "undefined".into(),
                    "n/a".into(),
                ],
                Err(e) => return Err(CliError::Numerical(format!("{}: {e}", obs.name()))),
            };
            table.push(head.into_iter().chain(tail).collect());
        }
    }
    Ok(table.into())
}

/// `|bohm - berggren|` over a width grid and its log-log slope.
pub fn compare_gamma(config: &RunConfig) -> Result<Outcome, CliError> {
    let c = &config.compare_gamma;
    let obs = observable(&c.observable, "compare_gamma.observable")?;
    let gammas = config.gamma_grid()?;
    let report = gamma_scaling_experiment(&obs, c.energy, &gammas, &config.quadrature_spec())
        .map_err(|e| match e {
            AverageError::Quadrature(_) | AverageError::ImaginaryResidue { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Validation(format!("compare_gamma: {e}")),
        })?;
    let mut table = Table::new(
        "compare_gamma",
        vec![
            num("gamma", "energy"),
            num("bohm", "observable"),
            num("berggren", "observable"),
            num("difference", "observable"),
        ],
    );
    table.note("observable", obs.name());
    table.note("energy", c.energy);
    match report.outcome {
        ScalingOutcome::ExactAgreement { max_difference } => {
            table.note("outcome", "exact agreement");
            table.note("max_difference", max_difference);
        }
        ScalingOutcome::PowerLaw(fit) => {
            table.note("outcome", "power law");
            table.note("slope", fit.slope);
            table.note("intercept", fit.intercept);
            table.note("rms_residual", fit.rms_residual);
        }
    }
    for row in &report.rows {
        table.push(vec![
            row.gamma.into(),
            row.bohm.into(),
            row.berggren.into(),
            row.difference.into(),
        ]);
    }
    Ok(table.into())
}

/// Non-decay amplitude and probability on a time grid.
pub fn survival(config: &RunConfig) -> Result<Outcome, CliError> {
    let s = &config.survival;
    let kind = DensityKind::from_name(&s.density).ok_or_else(|| {
        CliError::Validation(format!(
            "survival.density: unknown density {:?} (bw_full_line, bw_truncated, gaussian_truncated)",
            s.density
        ))
    })?;
    let density = SpectralDensity::new(kind, s.energy, s.width)
        .map_err(|e| CliError::Validation(format!("survival: {e}")))?;
    let times = config.survival_times()?;
    let curve = survival_curve(&density, &times, &config.quadrature_spec()).map_err(|e| match e {
        SurvivalError::NegativeTime(_) => CliError::Validation(format!("survival.times: {e}")),
        _ => CliError::Numerical(e.to_string()),
    })?;
    let mut table = Table::new(
        "survival",
        vec![
            num("t", "1/energy"),
            num("amplitude_re", "-"),
            num("amplitude_im", "-"),
            num("probability", "-"),
            num("reference", "-"),
            num("background", "-"),
        ],
    );
    table.note("density", kind.name());
    table.note("energy", s.energy);
    table.note("width", s.width);
    table.note("norm", density.norm());
    table.note(
        "reference",
        if kind == DensityKind::GaussianTruncated {
            "exp(-width^2 t^2)"
        } else {
            "exp(-width t)"
        },
    );
    if let Ok(t) = crossover_time(&density) {
        table.note("crossover_time", t);
    }
    for p in &curve {
        table.push(vec![
            p.t.into(),
            p.amplitude.re.into(),
            p.amplitude.im.into(),
            p.probability.into(),
            p.reference.into(),
            p.background.into(),
        ]);
    }
    Ok(table.into())
}

fn hardy_family(entries: &[String]) -> Result<Vec<RationalHardy>, CliError> {
    let bad = |e: &str, why: &str| CliError::Validation(format!("titchmarsh.family: {e:?} {why}"));
    let mut family = Vec::new();
    for entry in entries {
        if entry == "builtin" {
            family.extend(builtin_family());
            continue;
        }
        let parts: Vec<&str> = entry.split(':').collect();
        let [side, n, m] = parts[..] else {
            return Err(bad(entry, "must be builtin, lower:n:m or upper:n:m"));
        };
        let n: u32 = n.parse().map_err(|_| bad(entry, "has a bad pole order"))?;
        let m: u32 = m.parse().map_err(|_| bad(entry, "has a bad phase order"))?;
        if n == 0 {
            return Err(bad(entry, "needs pole order >= 1"));
        }
        let f = match side {
            "lower" => RationalHardy::lower(n),
            "upper" => RationalHardy::upper(n),
            _ => return Err(bad(entry, "must start with lower or upper")),
        };
        family.push(f.with_phase(m));
    }
    if family.is_empty() {
        return Err(CliError::Validation("titchmarsh.family is empty".into()));
    }
    Ok(family)
}

fn hardy_error(e: HardyError) -> CliError {
    match e {
        HardyError::Quadrature(_) => CliError::Numerical(e.to_string()),
        _ => CliError::Validation(format!("titchmarsh: {e}")),
    }
}

/// Boundary-integral recovery of Hardy test functions and the
/// opposite-half-plane zero check.
pub fn titchmarsh(config: &RunConfig) -> Result<Outcome, CliError> {
    let t = &config.titchmarsh;
    let family = hardy_family(&t.family)?;
    let mut targets: Vec<Complex64> = t.targets.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    if t.use_model_poles {
        targets.extend(model_poles(config)?.1.iter().map(|r| r.pole.z()));
    }
    let spec = config.quadrature_spec();
    let mut table = Table::new(
        "titchmarsh",
        vec![
            Column::new("function", ColumnKind::Text, "-"),
            Column::new("check", ColumnKind::Text, "-"),
            num("z_re", "energy"),
            num("z_im", "energy"),
            num("value_re", "-"),
            num("value_im", "-"),
            num("residual", "-"),
        ],
    );
    let mut worst_interior: f64 = 0.0;
    let mut worst_opposite: f64 = 0.0;
    for f in &family {
        for &target in &targets {
            let inside = if f.half_plane().contains(target) { target } else { target.conj() };
            let value = cauchy_eval(f, inside, &spec).map_err(hardy_error)?;
            let residual = (value - f.eval_analytic(inside)).norm();
            worst_interior = worst_interior.max(residual);
            table.push(vec![
                f.label().as_str().into(),
                "interior".into(),
                inside.re.into(),
                inside.im.into(),
                value.re.into(),
                value.im.into(),
                residual.into(),
            ]);

            let outside = inside.conj();
            let value = opposite_halfplane_check(f, outside, &spec).map_err(hardy_error)?;
            worst_opposite = worst_opposite.max(value.norm());
            table.push(vec![
                f.label().as_str().into(),
                "opposite".into(),
                outside.re.into(),
                outside.im.into(),
                value.re.into(),
                value.im.into(),
                value.norm().into(),
            ]);
        }
    }
    table.note("functions", family.len());
    table.note("targets", targets.len());
    table.note("max_interior_residual", worst_interior);
    table.note("max_opposite_value", worst_opposite);
    Ok(table.into())
}
