//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use gamow_cli::{execute, Command, RunOptions};
use gamow_core::averages::{
    average_bohm, average_complex, gamma_grid, gamma_scaling_experiment, ObservableSpec,
    ScalingOutcome,
};
use gamow_core::gamow::{norm_squared, normalization_for_width, overlap, GamowVector, ResonancePole};
use gamow_core::hardy::{builtin_family, cauchy_eval, opposite_halfplane_check, HalfPlane, HardyFunction};
use gamow_core::model::{find_resonances, DeltaShellModel, MomentumWindow, SearchOptions};
use gamow_core::numerics::QuadratureSpec;
use gamow_core::survival::{amplitude, longtime_exponent, zeno_check, SpectralDensity};
use gamow_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// 50 poles with `|E_R|` in [0.5, 50] of either sign and `Γ/|E_R|` log-uniform in [1e-4, 1].
fn random_poles() -> Vec<ResonancePole> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    (0..50)
        .map(|_| {
            let magnitude = rng.gen_range(0.5..50.0);
            let energy = if rng.gen_bool(0.5) { magnitude } else { -magnitude };
            let ratio = 10f64.powf(rng.gen_range(-4.0..=0.0));
            ResonancePole::new(energy, magnitude * ratio).unwrap()
        })
        .collect()
}

fn check(ok: bool, pass: String, fail: String) -> Verdict {
    if ok {
        Ok(pass)
    } else {
        Err(fail)
    }
}

fn lorentzian_energy_mean() -> Verdict {
    let mut worst: f64 = 0.0;
    for pole in random_poles() {
        let got = average_bohm(&GamowVector::decaying(pole), &ObservableSpec::energy(), &spec())
            .map_err(|e| format!("{pole:?}: {e}"))?;
        worst = worst.max((got - pole.energy()).abs() / pole.energy().abs());
    }
    let msg = format!("max relative error {worst:.3e} over 50 poles (limit 1e-6)");
    check(worst <= 1e-6, msg.clone(), msg)
}

fn normalization_and_orthogonality() -> Verdict {
    let (mut norm_err, mut cross): (f64, f64) = (0.0, 0.0);
    for pole in random_poles() {
        let d = GamowVector::decaying(pole);
        let g = GamowVector::growing(pole);
        for v in [&d, &g] {
            let n = norm_squared(v, &spec()).map_err(|e| e.to_string())?;
            norm_err = norm_err.max((n.sqrt() - 1.0).abs());
        }
        cross = cross.max(overlap(&g, &d, &spec()).map_err(|e| e.to_string())?.value.norm());
    }
    let alpha = normalization_for_width(2.0).map_err(|e| e.to_string())?;
    let alpha_err = (alpha - 1.0 / std::f64::consts::PI.sqrt()).abs();
    let msg = format!(
        "max |norm - 1| {norm_err:.3e} (limit 1e-8), max |cross overlap| {cross:.3e} (limit 1e-8), \
         |alpha(2) - 1/sqrt(pi)| {alpha_err:.3e} (limit 1e-12)"
    );
    check(norm_err < 1e-8 && cross < 1e-8 && alpha_err <= 1e-12, msg.clone(), msg)
}

fn complex_energy_average() -> Verdict {
    for pole in random_poles() {
        let got = average_complex(&pole, &ObservableSpec::energy()).map_err(|e| e.to_string())?;
        let want = Complex64::new(pole.energy(), -pole.width() / 2.0);
        if got.re.to_bits() != want.re.to_bits() || got.im.to_bits() != want.im.to_bits() {
            return Err(format!("{pole:?}: got {got}, expected {want}"));
        }
    }
    Ok("bit-exact E_R - i width/2 for 50 poles".into())
}

fn berggren_energy_agreement() -> Verdict {
    let gammas = gamma_grid(1e-3, 1.0, 8).map_err(|e| e.to_string())?;
    let report = gamma_scaling_experiment(&ObservableSpec::energy(), 10.0, &gammas, &spec())
        .map_err(|e| e.to_string())?;
    let worst = report.rows.iter().map(|r| r.difference).fold(0.0, f64::max);
    let msg = format!(
        "energy observable: max |bohm - berggren| {worst:.3e} over {} widths (limit 1e-9)",
        gammas.len()
    );
    check(worst < 1e-9, msg.clone(), msg)
}

fn berggren_smooth_scaling() -> Verdict {
    let gammas = gamma_grid(1e-3, 1.0, 8).map_err(|e| e.to_string())?;
    let family = [
        ObservableSpec::lorentzian_kernel(15.0, 2.0).unwrap(),
        ObservableSpec::gaussian_kernel(12.0, 1.5).unwrap(),
        ObservableSpec::inverse_quadratic(),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for obs in &family {
        let report = gamma_scaling_experiment(obs, 10.0, &gammas, &spec()).map_err(|e| e.to_string())?;
        match report.outcome {
            ScalingOutcome::PowerLaw(fit) => {
                ok &= (1.8..=2.2).contains(&fit.slope);
                lines.push(format!("{} slope {:.4}", obs.name(), fit.slope));
            }
            ScalingOutcome::ExactAgreement { max_difference } => {
                ok = false;
                lines.push(format!("{} exact agreement ({max_difference:.1e})", obs.name()));
            }
        }
    }
    let msg = format!("log-log slope over [1e-3, 1] (target [1.8, 2.2]): {}", lines.join(", "));
    check(ok, msg.clone(), msg)
}

fn titchmarsh_recovery() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let targets: Vec<Complex64> = (0..20)
        .map(|_| Complex64::new(rng.gen_range(-5.0..5.0), -10f64.powf(rng.gen_range(-1.5..0.6))))
        .collect();
    let family = builtin_family();
    let (mut interior, mut opposite): (f64, f64) = (0.0, 0.0);
    for f in &family {
        for &t in &targets {
            let (inside, outside) = match f.half_plane() {
                HalfPlane::Lower => (t, t.conj()),
                HalfPlane::Upper => (t.conj(), t),
            };
            let v = cauchy_eval(f, inside, &spec()).map_err(|e| format!("{}: {e}", f.label()))?;
            interior = interior.max((v - f.eval_analytic(inside)).norm());
            let o = opposite_halfplane_check(f, outside, &spec()).map_err(|e| format!("{}: {e}", f.label()))?;
            opposite = opposite.max(o.norm());
        }
    }
    let msg = format!(
        "{} functions x 20 targets: max interior error {interior:.3e}, max opposite value {opposite:.3e} (limits 1e-6)",
        family.len()
    );
    check(family.len() == 12 && interior < 1e-6 && opposite < 1e-6, msg.clone(), msg)
}

fn pole_finder() -> Verdict {
    let model = DeltaShellModel::new(10.0, 1.0, 1.0).map_err(|e| e.to_string())?;
    let window = MomentumWindow::default();
    let base = find_resonances(&model, &window, &SearchOptions::default()).map_err(|e| e.to_string())?;
    let fine = find_resonances(&model, &window, &SearchOptions::default().with_grid(100, 50))
        .map_err(|e| e.to_string())?;
    if base.is_empty() {
        return Err("no resonances found".into());
    }
    let mut problems = Vec::new();
    for r in &base {
        let pair = model.pole_pair_symmetry_check(r.k);
        if r.jost_residual > 1e-10 || r.pole.width() <= 0.0 || pair > 1e-8 {
            problems.push(format!("k={} jost {:.1e} pair {:.1e}", r.k, r.jost_residual, pair));
        }
    }
    let invariant = base.len() == fine.len()
        && base.iter().zip(&fine).all(|(a, b)| (a.k - b.k).norm() <= 1e-8);
    if !invariant {
        problems.push(format!("grid doubling changed the set: {} vs {} poles", base.len(), fine.len()));
    }

    let mut trend = Vec::new();
    for lambda in [10.0, 50.0, 250.0] {
        let m = DeltaShellModel::new(lambda, 1.0, 1.0).map_err(|e| e.to_string())?;
        let found = find_resonances(&m, &window, &SearchOptions::default()).map_err(|e| e.to_string())?;
        let offsets: Vec<f64> = (1..=3)
            .map(|n| {
                let target = n as f64 * std::f64::consts::PI;
                found
                    .iter()
                    .map(|r| (r.k.re - target).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        trend.push(offsets);
    }
    let decreasing = (0..3).all(|n| trend[0][n] > trend[1][n] && trend[1][n] > trend[2][n]);
    if !decreasing {
        problems.push(format!("|Re k_n - n pi| not decreasing: {trend:?}"));
    }
    let summary = format!(
        "{} poles, grid doubling invariant, |Re k_1 - pi| = {:.3e} / {:.3e} / {:.3e} for strength 10 / 50 / 250",
        base.len(),
        trend[0][0],
        trend[1][0],
        trend[2][0]
    );
    check(problems.is_empty(), summary, problems.join("; "))
}

fn unitarity() -> Verdict {
    let mut worst: f64 = 0.0;
    for lambda in [-3.0, 10.0, 250.0] {
        let m = DeltaShellModel::new(lambda, 1.0, 1.0).map_err(|e| e.to_string())?;
        for i in 0..100 {
            let k = 0.05 + 0.3 * i as f64;
            let s = m.s_matrix(Complex64::new(k, 0.0)).map_err(|e| e.to_string())?;
            worst = worst.max((s.norm() - 1.0).abs());
        }
    }
    let msg = format!("max ||S| - 1| {worst:.3e} over 3 x 100 real momenta (limit 1e-10)");
    check(worst <= 1e-10, msg.clone(), msg)
}

fn survival_behaviour() -> Verdict {
    let mut problems = Vec::new();

    let (energy, width) = (5.0, 1.0);
    let full = SpectralDensity::breit_wigner(energy, width).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for i in 0..=80 {
        let t = 20.0 / width * i as f64 / 80.0;
        let a = amplitude(&full, t, &spec()).map_err(|e| e.to_string())?;
        worst = worst.max((a.norm() - (-width * t / 2.0).exp()).abs());
    }
    if worst >= 1e-6 {
        problems.push(format!("full-line |A| error {worst:.3e}"));
    }

    let truncated = SpectralDensity::breit_wigner_truncated(energy, width).map_err(|e| e.to_string())?;
    let slope = longtime_exponent(&truncated, 60.0, 200.0, 24, &spec())
        .map(|fit| fit.slope)
        .map_err(|e| e.to_string())?;
    if (slope + 2.0).abs() > 0.2 {
        problems.push(format!("truncated long-time slope {slope:.4}"));
    }

    let sigma = 1.0;
    let gauss = SpectralDensity::gaussian_truncated(10.0, sigma).map_err(|e| e.to_string())?;
    let steps = [1e-2, 1e-3, 1e-4];
    let estimates: Vec<f64> = steps
        .iter()
        .map(|&h| zeno_check(&gauss, h, &spec()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = estimates.iter().zip(&steps).map(|(d, h)| d / h).collect();
    let linear = ratios
        .windows(2)
        .all(|w| (w[0] - w[1]).abs() <= 1e-3 * w[1].abs())
        && estimates.iter().zip(&estimates[1..]).all(|(a, b)| b.abs() < a.abs());
    if !linear {
        problems.push(format!("zeno estimates {estimates:?} are not linear in h"));
    }

    let summary = format!(
        "full-line max |A| error {worst:.3e} (limit 1e-6), truncated slope {slope:.4} (target -2 +/- 0.2), \
         zeno estimate / h = {:.6} / {:.6} / {:.6} at h = 1e-2 / 1e-3 / 1e-4",
        ratios[0], ratios[1], ratios[2]
    );
    check(problems.is_empty(), summary, problems.join("; "))
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn cli_determinism() -> Verdict {
    let root = workspace_root();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let commands = [
        Command::Poles,
        Command::Average,
        Command::CompareGamma,
        Command::Survival,
        Command::Titchmarsh,
    ];
    let mut problems = Vec::new();
    for command in commands {
        let mut runs = Vec::new();
        for attempt in 0..2 {
            let out = dir.path().join(format!("{}-{attempt}.csv", command.name()));
            let options = RunOptions {
                config: Some(root.join("configs/example.toml")),
                out: Some(out.clone()),
                ..RunOptions::default()
            };
            execute(command, &options).map_err(|e| format!("{}: {e}", command.name()))?;
            runs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        let golden_path = root.join(format!("crates/cli/tests/golden/{}.csv", command.name()));
        let golden = std::fs::read(&golden_path).map_err(|e| format!("{}: {e}", golden_path.display()))?;
        if runs[0] != runs[1] {
            problems.push(format!("{} differs between runs", command.name()));
        }
        if runs[0] != golden {
            problems.push(format!("{} differs from its golden file", command.name()));
        }
    }
    check(
        problems.is_empty(),
        "5 subcommands byte-identical across two runs and equal to the golden files".into(),
        problems.join("; "),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 Lorentzian energy mean", lorentzian_energy_mean),
        ("2 normalization and orthogonality", normalization_and_orthogonality),
        ("3 complex energy average", complex_energy_average),
        ("4a Berggren agreement for the energy", berggren_energy_agreement),
        ("4b Berggren difference scaling for smooth observables", berggren_smooth_scaling),
        ("5 boundary-integral recovery", titchmarsh_recovery),
        ("6 pole finder", pole_finder),
        ("7 S-matrix unitarity", unitarity),
        ("8 survival behaviour", survival_behaviour),
        ("9 CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail} [{secs:.2}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
