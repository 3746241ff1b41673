//! Temporal intensity profiles of single photons at detection.
//!
//! A profile doubles as the probability density of the microscopic hit time
//! within the measurement window. The sech² shape is the physical default
//! (mode-locked pulse); a Gaussian variant exists so that downstream results
//! can be shown not to depend on the specific pulse shape.
//!
//! All times are femtoseconds.

use crate::error::{Error, Result};
use crate::rng::SimRng;
use statrs::function::erf;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const SQRT_TAU: f64 = 2.506_628_274_631_000_7; // sqrt(2 pi)

/// Functional form of the pulse envelope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    Sech2,
    Gaussian,
}

/// Temporal intensity profile, normalized to unit area: the hit-time density.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PulseProfile {
    pub shape: PulseShape,
    /// Width parameter in femtoseconds, > 0.
    pub sigma_t: f64,
    /// Center of the pulse, femtoseconds.
    pub center: f64,
}

impl PulseProfile {
    pub fn new(shape: PulseShape, sigma_t: f64, center: f64) -> Result<Self> {
        if !(sigma_t > 0.0) || !sigma_t.is_finite() {
            return Err(Error::Config(format!("sigma_t must be positive and finite, got {sigma_t}")));
        }
        if !center.is_finite() {
            return Err(Error::Config(format!("center must be finite, got {center}")));
        }
        Ok(PulseProfile { shape, sigma_t, center })
    }

    /// Same shape shifted in time by `dt`.
    pub fn shifted(&self, dt: f64) -> Self {
        PulseProfile { center: self.center + dt, ..*self }
    }

    /// Probability density at time `t`, in 1/fs.
    #[inline]
    pub fn pdf(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.sigma_t;
        match self.shape {
            PulseShape::Sech2 => {
                let s = 1.0 / x.cosh();
                s * s / (2.0 * self.sigma_t)
            }
            PulseShape::Gaussian => (-0.5 * x * x).exp() / (self.sigma_t * SQRT_TAU),
        }
    }

    /// Cumulative distribution at time `t`.
    #[inline]
    pub fn cdf(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.sigma_t;
        match self.shape {
            // (1 + tanh x)/2 in logistic form: full relative precision in
            // the lower tail instead of cancelling against 1
            PulseShape::Sech2 => 1.0 / (1.0 + (-2.0 * x).exp()),
            PulseShape::Gaussian => 0.5 * erf::erfc(-x / SQRT_2),
        }
    }

    /// Probability mass of the band `[t - half_width, t + half_width]`.
    ///
    /// Uses cancellation-free identities so the result keeps full relative
    /// precision even when `half_width` is many orders of magnitude below
    /// `sigma_t`; a plain CDF difference would lose all digits there.
    #[inline]
    pub fn band_mass(&self, t: f64, half_width: f64) -> f64 {
        let x = (t - self.center) / self.sigma_t;
        let d = half_width / self.sigma_t;
        match self.shape {
            PulseShape::Sech2 => {
                // (tanh(x+d) - tanh(x-d))/2 = sinh(2d) / (2 cosh(x+d) cosh(x-d))
                let denom = 2.0 * (x + d).cosh() * (x - d).cosh();
                if denom.is_finite() {
                    (2.0 * d).sinh() / denom
                } else {
                    0.0
                }
            }
            PulseShape::Gaussian => normal_band_mass(x - d, x + d),
        }
    }

    /// Inverse CDF. `u` must lie strictly inside (0, 1).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile argument must be in (0,1), got {u}")));
        }
        Ok(self.quantile_unchecked(u))
    }

    #[inline]
    fn quantile_unchecked(&self, u: f64) -> f64 {
        match self.shape {
            // atanh(2u - 1) = logit(u)/2; 1 - u is exact for u >= 1/2
            // (Sterbenz), so one log suffices without losing the tails
            PulseShape::Sech2 => self.center + self.sigma_t * 0.5 * (u / (1.0 - u)).ln(),
            PulseShape::Gaussian => {
                let mut z = SQRT_2 * erf::erf_inv(2.0 * u - 1.0);
                // one Newton step against the exact CDF tightens the rational
                // approximation of erf_inv to round-off
                let pdf = (-0.5 * z * z).exp() / SQRT_TAU;
                if pdf > 1e-280 {
                    let cdf = 0.5 * erf::erfc(-z / SQRT_2);
                    z -= (cdf - u) / pdf;
                }
                self.center + self.sigma_t * z
            }
        }
    }
}

/// P(a < Z < b) for a standard normal, accurate in both tails.
pub(crate) fn normal_band_mass(a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    if a >= 0.0 {
        0.5 * (erf::erfc(a / SQRT_2) - erf::erfc(b / SQRT_2))
    } else if b <= 0.0 {
        0.5 * (erf::erfc(-b / SQRT_2) - erf::erfc(-a / SQRT_2))
    } else {
        0.5 * (erf::erf(b / SQRT_2) + erf::erf(-a / SQRT_2))
    }
}

/// The left/right photon pair: one base profile, the right one delayed by
/// the residual delay T, plus the measurement window `[t0, t0 + window_dt]`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExperimentGeometry {
    /// Left-photon profile. The right profile is the same object shifted:
    /// f_R(t) = f_L(t - delay_T).
    pub base: PulseProfile,
    /// Residual delay T between the photons, femtoseconds.
    pub delay_t: f64,
    /// Measurement duration, femtoseconds, > 0.
    pub window_dt: f64,
    /// Window start t0, femtoseconds.
    pub window_origin: f64,
}

impl ExperimentGeometry {
    /// `window_origin = None` centers the window on the midpoint of the two
    /// pulse centers.
    pub fn new(
        base: PulseProfile,
        delay_t: f64,
        window_dt: f64,
        window_origin: Option<f64>,
    ) -> Result<Self> {
        if !(window_dt > 0.0) || !window_dt.is_finite() {
            return Err(Error::Config(format!("window_dt must be positive and finite, got {window_dt}")));
        }
        if !delay_t.is_finite() {
            return Err(Error::Config(format!("delay_T must be finite, got {delay_t}")));
        }
        let origin = match window_origin {
            Some(t0) => {
                if !t0.is_finite() {
                    return Err(Error::Config(format!("window_origin must be finite, got {t0}")));
                }
                t0
            }
            None => base.center + 0.5 * delay_t - 0.5 * window_dt,
        };
        Ok(ExperimentGeometry { base, delay_t, window_dt, window_origin: origin })
    }

    /// Measurement window `(t0, t0 + window_dt)`.
    pub fn window(&self) -> (f64, f64) {
        (self.window_origin, self.window_origin + self.window_dt)
    }

    pub fn left(&self) -> &PulseProfile {
        &self.base
    }

    /// Shift-covariant right-profile density: f_R(t) = f_L(t - T), evaluated
    /// through the left profile so the identity holds bit-exactly.
    #[inline]
    pub fn right_pdf(&self, t: f64) -> f64 {
        self.base.pdf(t - self.delay_t)
    }

    #[inline]
    pub fn right_cdf(&self, t: f64) -> f64 {
        self.base.cdf(t - self.delay_t)
    }

    /// Band mass of the right profile over `[t - h, t + h]`.
    #[inline]
    pub fn right_band_mass(&self, t: f64, half_width: f64) -> f64 {
        self.base.band_mass(t - self.delay_t, half_width)
    }

    /// Sampler for the left photon's hit time, truncated to the window.
    pub fn left_sampler(&self) -> Result<TruncatedSampler> {
        let (lo, hi) = self.window();
        TruncatedSampler::new(self.base, (lo, hi))
    }

    /// Sampler for the right photon's hit time, truncated to the window.
    /// Implemented by sampling the base profile on the shifted window and
    /// adding the delay back, so the truncation uses the exact right CDF.
    pub fn right_sampler(&self) -> Result<TruncatedSampler> {
        let (lo, hi) = self.window();
        let inner = TruncatedSampler::new(self.base, (lo - self.delay_t, hi - self.delay_t))?;
        Ok(TruncatedSampler { output_shift: self.delay_t, ..inner })
    }
}

/// Uniform draws are clamped away from 0 and 1 before the inverse CDF so a
/// finite-precision uniform can never produce an infinite hit time. The bias
/// is far below statistical resolution for any realistic trial count.
const UNIFORM_CLAMP: f64 = 1e-15;

/// Draws from a profile restricted and renormalized to a window.
#[derive(Clone, Copy, Debug)]
pub struct TruncatedSampler {
    profile: PulseProfile,
    cdf_lo: f64,
    cdf_span: f64,
    output_shift: f64,
}

impl TruncatedSampler {
    pub fn new(profile: PulseProfile, window: (f64, f64)) -> Result<Self> {
        let (lo, hi) = window;
        if !(hi > lo) {
            return Err(Error::Config(format!("empty sampling window [{lo}, {hi}]")));
        }
        let cdf_lo = profile.cdf(lo);
        let cdf_span = profile.cdf(hi) - cdf_lo;
        if !(cdf_span >= 1e-12) {
            return Err(Error::Config(format!(
                "window [{lo}, {hi}] carries negligible profile mass ({cdf_span:e})"
            )));
        }
        Ok(TruncatedSampler { profile, cdf_lo, cdf_span, output_shift: 0.0 })
    }

    /// One draw from the renormalized density.
    #[inline]
    pub fn sample(&self, rng: &mut SimRng) -> f64 {
        let u = self.cdf_lo + rng.next_f64() * self.cdf_span;
        let u = u.clamp(UNIFORM_CLAMP, 1.0 - UNIFORM_CLAMP);
        self.profile.quantile_unchecked(u) + self.output_shift
    }
}

/// Draw one hit time from `profile` restricted to `window`.
pub fn sample_hit_time(profile: &PulseProfile, window: (f64, f64), rng: &mut SimRng) -> Result<f64> {
    Ok(TruncatedSampler::new(*profile, window)?.sample(rng))
}
