//! Solar geometry and clear-sky irradiance on a tilted panel.
//!
//! The clear-sky irradiance model is deliberately simple: a normal-incidence
//! attenuation curve driven only by solar altitude, projected onto the panel
//! plane. It needs no atmospheric inputs, which fits the estimation scheme:
//! the clear-sky tests compare measured power against this profile in
//! normalized form, so a reasonable shape matters more than absolute
//! accuracy.
//!
//! Conventions: all timestamps are UTC. Azimuths (solar and panel) are
//! measured from due south, positive toward west, in degrees within
//! (-180, 180]. A south-facing panel in the northern hemisphere has azimuth
//! 0; an equator-facing panel in the southern hemisphere has azimuth 180.

use chrono::{DateTime, Duration, NaiveDate, Timelike, Utc};

use crate::error::Error;
use crate::Result;

/// Solar constant scaled for the attenuation curve, W/m^2.
const IRRADIANCE_AT_ZENITH_SUN: f64 = 1353.0;
/// Exponent of the relative-air-mass attenuation law.
const AIR_MASS_EXPONENT: f64 = 0.678;
/// Broadband clear-atmosphere transmittance.
const TRANSMITTANCE: f64 = 0.7;

/// Geographic location and panel orientation of a plant.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SiteConfig {
    /// Degrees north.
    pub latitude_deg: f64,
    /// Degrees east.
    pub longitude_deg: f64,
    /// Panel tilt from horizontal, degrees in [0, 90].
    pub tilt_deg: f64,
    /// Panel azimuth from due south, positive toward west, in (-180, 180].
    pub azimuth_deg: f64,
    /// Local civil offset from UTC in hours; defines day boundaries.
    pub timezone_offset_hours: f64,
}

impl SiteConfig {
    pub fn validate(&self) -> Result<()> {
        if !(-90.0..=90.0).contains(&self.latitude_deg) {
            return Err(Error::invalid(format!(
                "latitude out of range: {}",
                self.latitude_deg
            )));
        }
        if !(-180.0..=180.0).contains(&self.longitude_deg) {
            return Err(Error::invalid(format!(
                "longitude out of range: {}",
                self.longitude_deg
            )));
        }
        if !(0.0..=90.0).contains(&self.tilt_deg) {
            return Err(Error::invalid(format!(
                "tilt out of range: {}",
                self.tilt_deg
            )));
        }
        if !(self.azimuth_deg > -180.0 && self.azimuth_deg <= 180.0) {
            return Err(Error::invalid(format!(
                "azimuth out of range: {}",
                self.azimuth_deg
            )));
        }
        if !(-14.0..=14.0).contains(&self.timezone_offset_hours) {
            return Err(Error::invalid(format!(
                "timezone offset out of range: {}",
                self.timezone_offset_hours
            )));
        }
        Ok(())
    }

    /// UTC instant of local midnight opening the given local date.
    pub fn local_midnight_utc(&self, date: NaiveDate) -> DateTime<Utc> {
        let midnight = date.and_hms_opt(0, 0, 0).expect("valid midnight");
        let offset = Duration::seconds((self.timezone_offset_hours * 3600.0).round() as i64);
        DateTime::<Utc>::from_naive_utc_and_offset(midnight - offset, Utc)
    }

    /// Local calendar date of a UTC instant.
    pub fn local_date(&self, t: DateTime<Utc>) -> NaiveDate {
        let offset = Duration::seconds((self.timezone_offset_hours * 3600.0).round() as i64);
        (t + offset).date_naive()
    }
}

/// Sun direction seen from a site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolarPosition {
    /// Elevation above the horizon, degrees; negative below the horizon.
    pub altitude_deg: f64,
    /// From due south, positive toward west, degrees in (-180, 180].
    pub azimuth_deg: f64,
}

/// Tilt and azimuth for a site with no surveyed orientation: equator-facing,
/// tilt equal to |latitude| capped at 35 degrees.
pub fn default_orientation(latitude_deg: f64) -> (f64, f64) {
    let tilt = latitude_deg.abs().min(35.0);
    let azimuth = if latitude_deg >= 0.0 { 0.0 } else { 180.0 };
    (tilt, azimuth)
}

/// Sun altitude and azimuth at a UTC instant.
///
/// Ephemeris of the low-precision almanac kind (Julian-century polynomial
/// mean elements with the leading periodic corrections); accurate to a few
/// hundredths of a degree across 1950-2100, with no leap-year wobble because
/// everything is driven by the continuous Julian date.
pub fn solar_position(site: &SiteConfig, t: DateTime<Utc>) -> SolarPosition {
    let jd =
        2440587.5 + (t.timestamp() as f64 + f64::from(t.timestamp_subsec_millis()) / 1e3) / 86400.0;
    let jc = (jd - 2451545.0) / 36525.0;

    // Mean elements of the sun, degrees.
    let mean_long = (280.46646 + jc * (36000.76983 + 0.0003032 * jc)).rem_euclid(360.0);
    let mean_anom = 357.52911 + jc * (35999.05029 - 0.0001537 * jc);
    let ecc = 0.016708634 - jc * (0.000042037 + 0.0000001267 * jc);

    let ma = mean_anom.to_radians();
    let eq_center = (1.914602 - jc * (0.004817 + 0.000014 * jc)) * ma.sin()
        + (0.019993 - 0.000101 * jc) * (2.0 * ma).sin()
        + 0.000289 * (3.0 * ma).sin();
    let true_long = mean_long + eq_center;
    let omega = (125.04 - 1934.136 * jc).to_radians();
    let apparent_long = (true_long - 0.00569 - 0.00478 * omega.sin()).to_radians();

    let mean_obliq =
        23.0 + (26.0 + (21.448 - jc * (46.8150 + jc * (0.00059 - jc * 0.001813))) / 60.0) / 60.0;
    let obliq = (mean_obliq + 0.00256 * omega.cos()).to_radians();

    let decl = (obliq.sin() * apparent_long.sin()).asin();

    // Equation of time, minutes.
    let y = (obliq / 2.0).tan().powi(2);
    let ml = mean_long.to_radians();
    let eqtime = 4.0
        * (y * (2.0 * ml).sin() - 2.0 * ecc * ma.sin()
            + 4.0 * ecc * y * ma.sin() * (2.0 * ml).cos()
            - 0.5 * y * y * (4.0 * ml).sin()
            - 1.25 * ecc * ecc * (2.0 * ma).sin())
        .to_degrees();

    let minutes_utc = f64::from(t.time().num_seconds_from_midnight()) / 60.0;
    let true_solar_minutes = minutes_utc + eqtime + 4.0 * site.longitude_deg;
    let mut hour_angle_deg = true_solar_minutes / 4.0 - 180.0;
    hour_angle_deg = (hour_angle_deg + 180.0).rem_euclid(360.0) - 180.0;

    let lat = site.latitude_deg.to_radians();
    let ha = hour_angle_deg.to_radians();
    let cos_zen = lat.sin() * decl.sin() + lat.cos() * decl.cos() * ha.cos();
    let cos_zen = cos_zen.clamp(-1.0, 1.0);
    let altitude = cos_zen.asin().to_degrees();

    // Azimuth from south, positive west: atan2 form avoids quadrant juggling.
    let az = ha
        .sin()
        .atan2(ha.cos() * lat.sin() - decl.tan() * lat.cos())
        .to_degrees();
    let azimuth = if az <= -180.0 { az + 360.0 } else { az };

    SolarPosition {
        altitude_deg: altitude,
        azimuth_deg: azimuth,
    }
}

/// Clear-sky irradiance at normal incidence for sun altitude `h` (radians).
///
/// Zero at and below the horizon; at the zenith the attenuation reduces to
/// the plain transmittance, giving 1353 * 0.7 = 947.1 W/m^2.
pub fn normal_clearsky_irradiance(altitude_rad: f64) -> f64 {
    assert!(altitude_rad.is_finite(), "altitude must be finite");
    if altitude_rad > 0.0 && altitude_rad <= std::f64::consts::FRAC_PI_2 {
        let air_mass = 1.0 / altitude_rad.sin();
        IRRADIANCE_AT_ZENITH_SUN * TRANSMITTANCE.powf(air_mass.powf(AIR_MASS_EXPONENT))
    } else {
        0.0
    }
}

/// Clear-sky irradiance on the panel plane at a UTC instant, W/m^2.
///
/// Projects the normal-incidence irradiance with the incidence factor
/// `sin(tilt) cos(h) cos(panel_az - solar_az) + cos(tilt) sin(h)`, clamped at
/// zero when the sun is behind the panel plane or below the horizon.
pub fn tilted_irradiance(site: &SiteConfig, t: DateTime<Utc>) -> f64 {
    let pos = solar_position(site, t);
    tilted_from_position(site, &pos)
}

/// Same projection from an already computed solar position.
pub fn tilted_from_position(site: &SiteConfig, pos: &SolarPosition) -> f64 {
    let h = pos.altitude_deg.to_radians();
    if h <= 0.0 {
        return 0.0;
    }
    let tilt = site.tilt_deg.to_radians();
    let az_diff = (site.azimuth_deg - pos.azimuth_deg).to_radians();
    let factor = tilt.sin() * h.cos() * az_diff.cos() + tilt.cos() * h.sin();
    factor.max(0.0) * normal_clearsky_irradiance(h)
}

/// Panel-plane clear-sky profile for one local day, sampled every `step`
/// starting at local midnight. Timestamps are the UTC sample instants.
pub fn clearsky_profile(
    site: &SiteConfig,
    date: NaiveDate,
    step: Duration,
) -> Result<Vec<(DateTime<Utc>, f64)>> {
    site.validate()?;
    let step_s = step.num_seconds();
    if step_s <= 0 || 86400 % step_s != 0 {
        return Err(Error::invalid(format!(
            "profile step must be positive and divide one day, got {step_s} s"
        )));
    }
    let start = site.local_midnight_utc(date);
    let n = (86400 / step_s) as usize;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let t = start + Duration::seconds(step_s * k as i64);
        out.push((t, tilted_irradiance(site, t)));
    }
    Ok(out)
}
