//! Globally adaptive 21-point Gauss-Kronrod integration of complex-valued
//! integrands on a bounded interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::{Estimate, NumericsError, QuadratureSpec};

/// Hard cap on subdivisions beyond the initial partition.
const MAX_BISECTIONS: usize = 20_000;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    /// Rounding floor of `error`.
    floor: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn eval<F: Fn(f64) -> Complex64>(f: &F, x: f64) -> Result<Complex64, NumericsError> {
    let v = f(x);
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(NumericsError::NonFinite { at: x })
    }
}

/// QUADPACK error scaling. Returns the error estimate and the rounding floor
/// `50 eps ∫|f|` below which no estimate can go.
fn rescale_error(err: f64, resabs: f64, resasc: f64) -> (f64, f64) {
    let mut scaled = err;
    if resasc != 0.0 && scaled != 0.0 {
        let ratio = (200.0 * scaled / resasc).powf(1.5);
        scaled = if ratio < 1.0 { resasc * ratio } else { resasc };
    }
    let mut floor = 0.0;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        floor = 50.0 * f64::EPSILON * resabs;
        scaled = scaled.max(floor);
    }
    (scaled, floor)
}

/// One 21-point Kronrod panel with its embedded 10-point Gauss estimate.
fn gk21<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    depth: u32,
) -> Result<Segment, NumericsError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = eval(f, center)?;

    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];
    let mut res_gauss = Complex64::new(0.0, 0.0);
    let mut res_kronrod = f_center * WGK[10];
    let mut res_abs = f_center.norm() * WGK[10];

    for (j, wg) in WG.iter().enumerate() {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_gauss += (f1 + f2) * *wg;
        res_kronrod += (f1 + f2) * WGK[jtw];
        res_abs += WGK[jtw] * (f1.norm() + f2.norm());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_kronrod += (f1 + f2) * WGK[jtwm1];
        res_abs += WGK[jtwm1] * (f1.norm() + f2.norm());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).norm();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }

    let scale = half.abs();
    let err = ((res_kronrod - res_gauss) * half).norm();
    let (error, floor) = rescale_error(err, res_abs * scale, res_asc * scale);
    Ok(Segment {
        a,
        b,
        value: res_kronrod * half,
        error,
        floor,
        depth,
    })
}

fn sum_in_order(segments: &mut [Segment]) -> (Complex64, f64, f64) {
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    segments
        .iter()
        .fold((Complex64::new(0.0, 0.0), 0.0, 0.0), |(v, e, r), s| {
            (v + s.value, e + s.error, r + s.floor)
        })
}

fn effective_tolerance(spec: &QuadratureSpec, value: Complex64, floor: f64) -> f64 {
    spec.tolerance_for(value).max(2.0 * floor)
}

/// Integrates `f` over the bounded interval `[a, b]`.
///
/// `breakpoints` seed the initial partition; points outside `(a, b)` are
/// ignored. Refinement bisects the panel with the largest error estimate
/// until the summed estimate satisfies `spec`, a panel reaches
/// `spec.max_refinements` bisections, or the global subdivision cap is hit.
/// A tolerance below twice the summed rounding floor `50 eps ∫|f|` cannot be
/// met by any rule and is raised to it; the returned `abs_error` still
/// reports the actual estimate.
pub fn integrate_interval<F>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate, NumericsError>
where
    F: Fn(f64) -> Complex64,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(NumericsError::InvalidDomain("interval endpoints must be finite"));
    }
    if a == b {
        return Ok(Estimate {
            value: Complex64::new(0.0, 0.0),
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    if a > b {
        let mut flipped = integrate_interval(f, b, a, breakpoints, spec)?;
        flipped.value = -flipped.value;
        return Ok(flipped);
    }

    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > a && *x < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::with_capacity(cuts.len() + 64);
    let mut left = a;
    for right in cuts.into_iter().chain(std::iter::once(b)) {
        heap.push(gk21(&f, left, right, 0)?);
        left = right;
    }
    let mut evaluations = 21 * heap.len();

    let mut total_value: Complex64 = heap.iter().map(|s| s.value).sum();
    let mut total_error: f64 = heap.iter().map(|s| s.error).sum();
    let mut total_floor: f64 = heap.iter().map(|s| s.floor).sum();
    let mut frozen: Vec<Segment> = Vec::new();
    let mut frozen_error = 0.0;

    for step in 0..=MAX_BISECTIONS {
        if step % 64 == 63 {
            // resynchronise the running sums
            total_value = heap.iter().chain(frozen.iter()).map(|s| s.value).sum();
            total_error = heap.iter().chain(frozen.iter()).map(|s| s.error).sum();
            total_floor = heap.iter().chain(frozen.iter()).map(|s| s.floor).sum();
        }
        let tolerance = effective_tolerance(spec, total_value, total_floor);
        if total_error <= tolerance {
            let mut all: Vec<Segment> = heap.into_vec();
            all.extend(frozen);
            let (value, abs_error, floor) = sum_in_order(&mut all);
            let tolerance = effective_tolerance(spec, value, floor);
            if abs_error <= tolerance {
                return Ok(Estimate {
                    value,
                    abs_error,
                    evaluations,
                });
            }
            return Err(NumericsError::NonConvergence {
                value,
                abs_error,
                tolerance,
            });
        }
        if frozen_error > tolerance || step == MAX_BISECTIONS {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if worst.depth >= spec.max_refinements || mid <= worst.a || mid >= worst.b {
            frozen_error += worst.error;
            frozen.push(worst);
            continue;
        }
        let lo = gk21(&f, worst.a, mid, worst.depth + 1)?;
        let hi = gk21(&f, mid, worst.b, worst.depth + 1)?;
        evaluations += 42;
        total_value += lo.value + hi.value - worst.value;
        total_error += lo.error + hi.error - worst.error;
        total_floor += lo.floor + hi.floor - worst.floor;
        heap.push(lo);
        heap.push(hi);
    }

    let mut all: Vec<Segment> = heap.into_vec();
    all.extend(frozen);
    let (value, abs_error, floor) = sum_in_order(&mut all);
    Err(NumericsError::NonConvergence {
        value,
        abs_error,
        tolerance: effective_tolerance(spec, value, floor),
    })
}
