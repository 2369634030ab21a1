use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Constants of the exposure-normalized crash rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateParameters {
    /// Exponent applied to the traffic exposure.
    pub exposure_p: f64,
    pub scale: f64,
    pub days: f64,
}

impl Default for RateParameters {
    fn default() -> Self {
        RateParameters {
            exposure_p: 0.8,
            scale: 1e6,
            days: 365.0,
        }
    }
}

impl RateParameters {
    pub fn validate(&self) -> Result<()> {
        if !(self.exposure_p > 0.0 && self.exposure_p <= 1.0) {
            return Err(Error::Config(format!(
                "exposure_p must lie in (0, 1], got {}",
                self.exposure_p
            )));
        }
        if !(self.scale > 0.0 && self.scale.is_finite())
            || !(self.days > 0.0 && self.days.is_finite())
        {
            return Err(Error::Config("scale and days must be positive".into()));
        }
        Ok(())
    }
}

/// Crashes per million vehicle-miles per day:
///
/// `count / (length * (lanes * aadt_per_lane)^p) * scale / days^p`
///
/// The exponent is only required to be non-negative here so the degenerate
/// `p = 0` form stays computable; [`RateParameters::validate`] enforces the
/// modeling range.
pub fn crash_rate(
    crash_count: f64,
    section_length: f64,
    num_lanes: u32,
    aadt_per_lane: f64,
    params: &RateParameters,
) -> Result<f64> {
    if !(section_length > 0.0 && section_length.is_finite()) {
        return Err(Error::domain(format!(
            "section length must be > 0, got {section_length}"
        )));
    }
    if !(aadt_per_lane > 0.0 && aadt_per_lane.is_finite()) {
        return Err(Error::domain(format!(
            "AADT per lane must be > 0, got {aadt_per_lane}"
        )));
    }
    if num_lanes == 0 {
        return Err(Error::domain("number of lanes must be >= 1"));
    }
    if !(crash_count >= 0.0 && crash_count.is_finite()) {
        return Err(Error::domain(format!(
            "crash count must be >= 0, got {crash_count}"
        )));
    }
    let p = params.exposure_p;
    if !(p >= 0.0 && p.is_finite()) || !(params.scale > 0.0) || !(params.days > 0.0) {
        return Err(Error::domain("invalid rate parameters"));
    }
    let exposure = section_length * (num_lanes as f64 * aadt_per_lane).powf(p);
    Ok(crash_count / exposure * params.scale / params.days.powf(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_count_is_zero_rate() {
        let r = crash_rate(0.0, 1.3, 2, 5000.0, &RateParameters::default()).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn zero_exponent_collapses() {
        let params = RateParameters {
            exposure_p: 0.0,
            ..RateParameters::default()
        };
        assert_eq!(
            crash_rate(2.0, 2.0, 3, 1234.0, &params).unwrap(),
            1_000_000.0
        );
    }

    #[test]
    fn domain_errors() {
        let p = RateParameters::default();
        assert!(matches!(
            crash_rate(1.0, 0.0, 2, 10.0, &p),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            crash_rate(1.0, 1.0, 2, -1.0, &p),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            crash_rate(1.0, 1.0, 0, 10.0, &p),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn validate_range() {
        assert!(RateParameters::default().validate().is_ok());
        let bad = RateParameters {
            exposure_p: 1.5,
            ..RateParameters::default()
        };
        assert!(bad.validate().is_err());
    }
}
