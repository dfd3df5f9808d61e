//! Quadratic plant model for PV power and interval bounds on its normalized
//! quantities.
//!
//! Generated power is modeled as
//!
//! ```text
//! P = mu1*I + mu2*I^2 + mu3*I*T        [kW]
//! ```
//!
//! with `I` the plane-of-array irradiance in W/m^2 and `T` the outdoor air
//! temperature in degC. Factoring out the linear term gives
//! `P = mu1 * alpha(I, T) * I` with the correction factor
//!
//! ```text
//! alpha(I, T) = 1 + eta2*I + eta3*T,   eta2 = mu2/mu1, eta3 = mu3/mu1.
//! ```
//!
//! Across commercial silicon plants the eta coefficients fall inside a known
//! strictly negative box. That prior alone makes interval bounds on `alpha`,
//! on its one-step increment and on the normalized power increment computable
//! without knowing the plant parameters; the clear-sky tests are built on
//! those bounds. All bounds here are derived with plain interval arithmetic,
//! which keeps every sign case uniform and provably tight (each endpoint is
//! attained at a corner of the eta box).

use crate::error::Error;
use crate::Result;

/// Default lower edge of the `eta2` prior box, 1/(W/m^2).
pub const ETA2_MIN: f64 = -2.5e-4;
/// Default upper edge of the `eta2` prior box, 1/(W/m^2).
pub const ETA2_MAX: f64 = -1.9e-5;
/// Default lower edge of the `eta3` prior box, 1/degC.
pub const ETA3_MIN: f64 = -4.8e-3;
/// Default upper edge of the `eta3` prior box, 1/degC.
pub const ETA3_MAX: f64 = -1.7e-3;

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Builds `[lo, hi]`. Panics if the endpoints are not finite or ordered;
    /// intervals are internal machinery, a bad one is a programming error.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(
            lo.is_finite() && hi.is_finite(),
            "interval endpoints must be finite"
        );
        assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval::new(x, x)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Interval sum.
    pub fn add(&self, other: Interval) -> Interval {
        Interval::new(self.lo + other.lo, self.hi + other.hi)
    }

    /// Shift by a scalar.
    pub fn shift(&self, c: f64) -> Interval {
        assert!(c.is_finite(), "shift by non-finite scalar");
        Interval::new(self.lo + c, self.hi + c)
    }

    /// Multiplication by a scalar; a negative factor swaps the endpoints.
    pub fn scale(&self, c: f64) -> Interval {
        assert!(c.is_finite(), "scale by non-finite scalar");
        if c >= 0.0 {
            Interval::new(self.lo * c, self.hi * c)
        } else {
            Interval::new(self.hi * c, self.lo * c)
        }
    }

    /// Division by a strictly positive interval. For each endpoint the
    /// extreme quotient is picked, so the result is the exact range of
    /// `n / d` over `n in self`, `d in den`.
    pub fn div_pos(&self, den: Interval) -> Interval {
        assert!(den.lo > 0.0, "divisor interval must be strictly positive");
        let lo = (self.lo / den.lo).min(self.lo / den.hi);
        let hi = (self.hi / den.lo).max(self.hi / den.hi);
        Interval::new(lo, hi)
    }
}

/// Prior box for the normalized coefficients `eta2`, `eta3`.
///
/// Both intervals must be strictly negative: the quadratic term and the
/// thermal term always reduce power for the silicon plants this prior covers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaBox {
    pub eta2: Interval,
    pub eta3: Interval,
}

impl EtaBox {
    pub fn new(eta2: Interval, eta3: Interval) -> Result<Self> {
        if !(eta2.hi < 0.0 && eta3.hi < 0.0) {
            return Err(Error::invalid(format!(
                "eta box must be strictly negative, got eta2=[{}, {}] eta3=[{}, {}]",
                eta2.lo, eta2.hi, eta3.lo, eta3.hi
            )));
        }
        Ok(EtaBox { eta2, eta3 })
    }

    /// Midpoints of the box, used to seed the estimator.
    pub fn center(&self) -> (f64, f64) {
        (
            0.5 * (self.eta2.lo + self.eta2.hi),
            0.5 * (self.eta3.lo + self.eta3.hi),
        )
    }
}

impl Default for EtaBox {
    fn default() -> Self {
        EtaBox {
            eta2: Interval::new(ETA2_MIN, ETA2_MAX),
            eta3: Interval::new(ETA3_MIN, ETA3_MAX),
        }
    }
}

/// Plant model coefficients.
///
/// `mu1` is kW per W/m^2, `mu2` kW per (W/m^2)^2, `mu3` kW per (W/m^2 * degC).
/// A physical plant has `mu1 > 0`; a fitted estimate can transiently violate
/// that, which is why conversions to the eta form are fallible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvusaParams {
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
}

impl PvusaParams {
    pub fn new(mu1: f64, mu2: f64, mu3: f64) -> Self {
        assert!(
            mu1.is_finite() && mu2.is_finite() && mu3.is_finite(),
            "plant coefficients must be finite"
        );
        PvusaParams { mu1, mu2, mu3 }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.mu1, self.mu2, self.mu3]
    }

    pub fn eta2(&self) -> Result<f64> {
        if self.mu1 <= 0.0 {
            return Err(Error::invalid(format!(
                "eta2 undefined for mu1 = {}",
                self.mu1
            )));
        }
        Ok(self.mu2 / self.mu1)
    }

    pub fn eta3(&self) -> Result<f64> {
        if self.mu1 <= 0.0 {
            return Err(Error::invalid(format!(
                "eta3 undefined for mu1 = {}",
                self.mu1
            )));
        }
        Ok(self.mu3 / self.mu1)
    }
}

/// Regressor vector `[I, I^2, I*T]` of the linear-in-parameters model.
///
/// Panics on non-finite input or negative irradiance.
pub fn regressor(i_wm2: f64, t_c: f64) -> [f64; 3] {
    assert!(
        i_wm2.is_finite() && t_c.is_finite(),
        "regressor inputs must be finite"
    );
    assert!(i_wm2 >= 0.0, "irradiance must be nonnegative, got {i_wm2}");
    [i_wm2, i_wm2 * i_wm2, i_wm2 * t_c]
}

/// Model power in kW at the given irradiance and temperature.
pub fn power(p: &PvusaParams, i_wm2: f64, t_c: f64) -> f64 {
    let phi = regressor(i_wm2, t_c);
    p.mu1 * phi[0] + p.mu2 * phi[1] + p.mu3 * phi[2]
}

/// Correction factor `alpha(I, T) = 1 + eta2*I + eta3*T`.
///
/// Fails when `mu1 <= 0` (eta form undefined).
pub fn alpha(p: &PvusaParams, i_wm2: f64, t_c: f64) -> Result<f64> {
    assert!(
        i_wm2.is_finite() && t_c.is_finite(),
        "alpha inputs must be finite"
    );
    Ok(1.0 + p.eta2()? * i_wm2 + p.eta3()? * t_c)
}

/// Range of `alpha(I, T)` over all eta in the box, at fixed `I >= 0` and `T`.
pub fn alpha_bounds(i_wm2: f64, t_c: f64, eta: &EtaBox) -> Interval {
    assert!(
        i_wm2.is_finite() && t_c.is_finite(),
        "alpha_bounds inputs must be finite"
    );
    assert!(i_wm2 >= 0.0, "irradiance must be nonnegative, got {i_wm2}");
    eta.eta2.scale(i_wm2).add(eta.eta3.scale(t_c)).shift(1.0)
}

/// Range of the increment `alpha(j) - alpha(j-1) = eta2*dI + eta3*dT` over
/// the box. Increments may have either sign; the scalar products handle the
/// four sign cases uniformly.
pub fn delta_alpha_bounds(d_i: f64, d_t: f64, eta: &EtaBox) -> Interval {
    assert!(
        d_i.is_finite() && d_t.is_finite(),
        "delta_alpha_bounds inputs must be finite"
    );
    eta.eta2.scale(d_i).add(eta.eta3.scale(d_t))
}

/// Range of the normalized power increment `dP / mu1` over the box.
///
/// For consecutive samples with irradiance `I(j-1) = i_prev`,
/// `I(j) = i_prev + d_i`, temperature `T(j) = t` and `dT = d_t`,
///
/// ```text
/// dP/mu1 = I(j-1) * dAlpha(j) + dI(j) * alpha(I(j), T(j)),
/// ```
///
/// so the bound combines [`delta_alpha_bounds`] and [`alpha_bounds`] with the
/// signs of `i_prev` (always nonnegative) and `d_i`.
pub fn delta_power_bounds(i_prev: f64, d_i: f64, t: f64, d_t: f64, eta: &EtaBox) -> Interval {
    assert!(
        i_prev >= 0.0,
        "previous irradiance must be nonnegative, got {i_prev}"
    );
    let i_new = i_prev + d_i;
    assert!(
        i_new >= -1e-9,
        "irradiance step leads below zero: {i_prev} + {d_i}"
    );
    let da = delta_alpha_bounds(d_i, d_t, eta);
    let a = alpha_bounds(i_new.max(0.0), t, eta);
    da.scale(i_prev).add(a.scale(d_i))
}
