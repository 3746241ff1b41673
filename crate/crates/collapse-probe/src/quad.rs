//! Adaptive Gauss–Kronrod quadrature for smooth integrands.
//!
//! 15-point Kronrod rule with embedded 7-point Gauss rule, bisection driven
//! by a max-heap on per-interval error estimates. Callers pass the interior
//! breakpoints where the integrand has structure (pulse centers, kinks from
//! |y|), since a single panel over a window much wider than the pulse width
//! would never see the peak.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

// 15-point Kronrod abscissae on [-1, 1] (positive half), embedded 7-point
// Gauss weights, and Kronrod weights. QUADPACK values.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// QUADPACK-style error rescaling: sharpen the raw |K - G| difference and
/// floor it at the round-off level of the panel.
fn rescale_error(err: f64, result_abs: f64, result_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if result_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / result_asc).powf(1.5);
        scaled = if scale < 1.0 { result_asc * scale } else { result_asc };
    }
    if result_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * result_abs);
    }
    scaled
}

/// One Gauss–Kronrod 15 evaluation on [a, b].
/// Returns (integral, error estimate, integral of |f|).
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];
    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();

    for j in 0..7 {
        let x = half * XGK[j];
        let v1 = f(center - x);
        let v2 = f(center + x);
        fv1[j] = v1;
        fv2[j] = v2;
        let sum = v1 + v2;
        if j % 2 != 0 {
            res_gauss += WG[j / 2] * sum;
        }
        res_kronrod += WGK[j] * sum;
        res_abs += WGK[j] * (v1.abs() + v2.abs());
    }
    res_gauss += WG[3] * f_center;

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = ((res_kronrod - res_gauss) * half).abs();
    (
        res_kronrod * half,
        rescale_error(err, res_abs * half.abs(), res_asc * half.abs()),
        res_abs * half.abs(),
    )
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    f_abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

const MAX_PANELS: usize = 10_000;

/// Integrate `f` over the interval chain defined by `points` (strictly the
/// panel edges; must be sorted, at least two entries).
///
/// Refines until the summed error estimate satisfies both the absolute
/// tolerance `eps_abs` and the relative tolerance `eps_rel`, or hits the
/// round-off floor of the accumulated panels.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    eps_abs: f64,
    eps_rel: f64,
) -> Result<QuadResult> {
    assert!(points.len() >= 2, "need at least one panel");
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let (value, error, f_abs) = qk15(&f, a, b);
        heap.push(Panel { a, b, value, error, f_abs });
    }
    if heap.is_empty() {
        return Ok(QuadResult { value: 0.0, error: 0.0, panels: 0 });
    }

    loop {
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.error).sum();
        let abs_total: f64 = heap.iter().map(|p| p.f_abs).sum();
        let floor = 100.0 * f64::EPSILON * abs_total;
        let target = eps_abs.min(eps_rel * total.abs()).max(floor);
        if err <= target {
            return Ok(QuadResult { value: total, error: err, panels: heap.len() });
        }
        if heap.len() >= MAX_PANELS {
            return Err(Error::Numerical(format!(
                "quadrature did not converge: {} panels, estimate {:e}, error {:e}, target {:e}",
                heap.len(),
                total,
                err,
                target
            )));
        }
        let worst = heap.pop().expect("heap nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval at floating-point resolution; keep it and stop refining
            let mut panels: Vec<Panel> = heap.into_vec();
            panels.push(worst);
            let total: f64 = panels.iter().map(|p| p.value).sum();
            let err: f64 = panels.iter().map(|p| p.error).sum();
            return Ok(QuadResult { value: total, error: err, panels: panels.len() });
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error, f_abs) = qk15(&f, a, b);
            heap.push(Panel { a, b, value, error, f_abs });
        }
    }
}

/// Build sorted panel edges for `[lo, hi]` with extra interior breakpoints
/// clipped to the interval. Consecutive duplicates are removed.
pub fn panel_edges(lo: f64, hi: f64, interior: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = Vec::with_capacity(interior.len() + 2);
    pts.push(lo);
    pts.extend(interior.iter().copied().filter(|x| *x > lo && *x < hi));
    pts.push(hi);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    pts
}
