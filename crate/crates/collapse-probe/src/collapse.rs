//! Kinematic collapse routes over the reduction window.
//!
//! After the first hit the two-photon state heads toward one of the two
//! definite outcomes along a prescribed amplitude trajectory; the route is
//! selected with Born frequencies. Only the two opposite-polarization kets
//! appear anywhere: angular momentum conservation structurally excludes the
//! equal-polarization terms, so a route is fully described by one decaying
//! ("doomed") magnitude, the survivor being fixed by unit norm of the
//! system-plus-environment ket.
//!
//! No dynamical law is implied; the families below are boundary-respecting
//! interpolations, plus two special constructions used as controls.

use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Magnitudes of the initial amplitudes: alpha for |+->, beta for |-+>.
/// Phases play no role in any observable quantity, so only magnitudes are
/// stored; both must be nonzero. The squared magnitude is kept as
/// configured so that Born thresholds and the balanced-state case
/// (alpha^2 = 1/2 exactly) are not perturbed by a sqrt/square round trip.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StateAmplitudes {
    alpha_sq: f64,
    alpha: f64,
    beta: f64,
}

impl StateAmplitudes {
    /// Build from |alpha|^2. Requires 0 < alpha2 < 1 so that neither
    /// amplitude vanishes.
    pub fn from_alpha_squared(alpha2: f64) -> Result<Self> {
        if !(alpha2 > 0.0 && alpha2 < 1.0) {
            return Err(Error::Config(format!(
                "alpha2 must lie strictly inside (0,1), got {alpha2}"
            )));
        }
        Ok(StateAmplitudes {
            alpha_sq: alpha2,
            alpha: alpha2.sqrt(),
            beta: (1.0 - alpha2).sqrt(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha_sq(&self) -> f64 {
        self.alpha_sq
    }

    pub fn beta_sq(&self) -> f64 {
        1.0 - self.alpha_sq
    }

    /// Born-frequency route selection: route 1 with probability |alpha|^2.
    pub fn sample_route(&self, rng: &mut SimRng) -> Route {
        if rng.next_f64() < self.alpha_sq() {
            Route::One
        } else {
            Route::Two
        }
    }
}

/// The two kinematic routes: route 1 ends in |+->, route 2 in |-+>.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Route {
    One,
    Two,
}

/// How the doomed amplitudes decay across the reduction window.
///
/// Rates and exponents are dimensionless: an exponential rate `r` means the
/// decay constant is `r / delta_t`, so a family keeps its shape when the
/// reduction duration is swept.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum DecayFamily {
    /// Shifted exponentials with independent rates per route, rescaled so
    /// the doomed amplitude reaches exactly zero at delta_t:
    /// s(x) = (e^{-r x} - e^{-r}) / (1 - e^{-r}), x = tau/delta_t.
    TwoShapeExponential { rate1: f64, rate2: f64 },
    /// Power-law ramps s(x) = (1 - x)^p with independent exponents.
    TwoShapeLinear { exponent1: f64, exponent2: f64 },
    /// One shared shape g with doomed amplitudes beta*g (route 1) and
    /// alpha*g (route 2). Survivors fixed by normalization. Outcome
    /// statistics are identical to instantaneous collapse for any g: the
    /// swap-covariant null family.
    SingleShapeCovariant { rate: f64 },
    /// Only route 2 is specified (a2 = alpha * s); route 1 is completed by
    /// the left-right symmetry of outcome probabilities, which amounts to
    /// the doomed magnitude alpha * s on route 1 as well. This makes the
    /// constraint Gamma_hat = 1 - 2*Lambda_hat hold identically, at the
    /// price of the route-1 endpoints: a1(0) = beta instead of alpha
    /// whenever alpha^2 != 1/2.
    EffectiveSymmetric { rate2: f64 },
}

impl DecayFamily {
    fn validate(&self) -> Result<()> {
        let check = |name: &str, v: f64| -> Result<()> {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
            Ok(())
        };
        match *self {
            DecayFamily::TwoShapeExponential { rate1, rate2 } => {
                check("rate1", rate1)?;
                check("rate2", rate2)
            }
            DecayFamily::TwoShapeLinear { exponent1, exponent2 } => {
                check("exponent1", exponent1)?;
                check("exponent2", exponent2)
            }
            DecayFamily::SingleShapeCovariant { rate } => check("rate", rate),
            DecayFamily::EffectiveSymmetric { rate2 } => check("rate2", rate2),
        }
    }
}

/// Shifted-and-rescaled exponential: 1 at x=0, exactly 0 at x=1.
#[inline]
fn shape_exp(x: f64, rate: f64) -> f64 {
    let em = (-rate).exp();
    ((-rate * x).exp() - em) / (1.0 - em)
}

#[inline]
fn shape_pow(x: f64, exponent: f64) -> f64 {
    (1.0 - x).powf(exponent)
}

/// Amplitude trajectories of both routes for one (state, delta_t, family)
/// configuration. All trajectory evaluations are pure.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RouteKinematics {
    state: StateAmplitudes,
    delta_t: f64,
    family: DecayFamily,
}

impl RouteKinematics {
    pub fn new(state: StateAmplitudes, delta_t: f64, family: DecayFamily) -> Result<Self> {
        if !(delta_t >= 0.0) || !delta_t.is_finite() {
            return Err(Error::Config(format!("delta_t must be >= 0 and finite, got {delta_t}")));
        }
        family.validate()?;
        Ok(RouteKinematics { state, delta_t, family })
    }

    pub fn state(&self) -> &StateAmplitudes {
        &self.state
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    pub fn family(&self) -> &DecayFamily {
        &self.family
    }

    fn check_tau(&self, tau: f64) -> Result<f64> {
        if !(tau >= 0.0 && tau <= self.delta_t) {
            return Err(Error::Domain(format!(
                "tau = {tau} outside reduction window [0, {}]",
                self.delta_t
            )));
        }
        Ok(tau)
    }

    /// Doomed magnitude at progress x = tau/delta_t: |b1| for route 1,
    /// |a2| for route 2.
    #[inline]
    pub(crate) fn doomed_at_fraction(&self, route: Route, x: f64) -> f64 {
        let (alpha, beta) = (self.state.alpha, self.state.beta);
        match (self.family, route) {
            (DecayFamily::TwoShapeExponential { rate1, .. }, Route::One) => beta * shape_exp(x, rate1),
            (DecayFamily::TwoShapeExponential { rate2, .. }, Route::Two) => alpha * shape_exp(x, rate2),
            (DecayFamily::TwoShapeLinear { exponent1, .. }, Route::One) => beta * shape_pow(x, exponent1),
            (DecayFamily::TwoShapeLinear { exponent2, .. }, Route::Two) => alpha * shape_pow(x, exponent2),
            (DecayFamily::SingleShapeCovariant { rate }, Route::One) => beta * shape_exp(x, rate),
            (DecayFamily::SingleShapeCovariant { rate }, Route::Two) => alpha * shape_exp(x, rate),
            // probability-level symmetry completion: alpha on both routes
            (DecayFamily::EffectiveSymmetric { rate2 }, Route::One) => alpha * shape_exp(x, rate2),
            (DecayFamily::EffectiveSymmetric { rate2 }, Route::Two) => alpha * shape_exp(x, rate2),
        }
    }

    /// |b1(tau)| for route 1, |a2(tau)| for route 2.
    pub fn doomed_amplitude(&self, route: Route, tau: f64) -> Result<f64> {
        let tau = self.check_tau(tau)?;
        if self.delta_t == 0.0 {
            // collapse already complete at the only admissible tau
            return Ok(0.0);
        }
        Ok(self.doomed_at_fraction(route, tau / self.delta_t))
    }

    /// |a1(tau)| for route 1, |b2(tau)| for route 2: sqrt(1 - doomed^2).
    pub fn survivor_amplitude(&self, route: Route, tau: f64) -> Result<f64> {
        let d = self.doomed_amplitude(route, tau)?;
        Ok((1.0 - d * d).max(0.0).sqrt())
    }

    /// P(+- | second hit at relative time y), |y| < delta_t:
    /// |alpha|^2 |a1(|y|)|^2 + (1-|alpha|^2) |a2(|y|)|^2.
    ///
    /// Only the elapsed time since the first hit is physical, so the
    /// trajectories are evaluated at tau = |y|.
    pub fn conditional_plus_minus_prob(&self, y: f64) -> Result<f64> {
        let tau = y.abs();
        if !(tau < self.delta_t) {
            return Err(Error::Domain(format!(
                "|y| = {tau} is not inside the reduction window (delta_t = {}); \
                 the trivial Born branch applies",
                self.delta_t
            )));
        }
        Ok(self.plus_minus_prob_at_fraction(tau / self.delta_t))
    }

    /// Same probability with the window fraction x = |y|/delta_t already
    /// formed; used by the trial engine.
    #[inline]
    pub(crate) fn plus_minus_prob_at_fraction(&self, x: f64) -> f64 {
        let a2 = self.state.alpha_sq();
        let d1 = self.doomed_at_fraction(Route::One, x);
        let d2 = self.doomed_at_fraction(Route::Two, x);
        a2 * (1.0 - d1 * d1) + (1.0 - a2) * (d2 * d2)
    }

    /// Survivor-squared of the given route at window fraction x; one uniform
    /// can then decide route and outcome jointly.
    #[inline]
    pub(crate) fn survivor_sq_at_fraction(&self, route: Route, x: f64) -> f64 {
        let d = self.doomed_at_fraction(route, x);
        1.0 - d * d
    }
}
