//! Wavelength/frequency bookkeeping and physical constants.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// A vacuum wavelength in meters.
///
/// Conversions to angular frequency and back are exact up to floating-point
/// rounding; the round-trip is tested to 1 part in 1e12.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavelength(f64);

impl Wavelength {
    /// Construct from meters. Must be positive and finite.
    pub fn from_meters(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::invalid(
                "wavelength",
                format!("must be positive and finite, got {value}"),
            ));
        }
        Ok(Wavelength(value))
    }

    /// Construct from an angular frequency omega = 2 pi c / lambda.
    pub fn from_angular_frequency(omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid(
                "angular_frequency",
                format!("must be positive and finite, got {omega}"),
            ));
        }
        Ok(Wavelength(2.0 * PI * SPEED_OF_LIGHT / omega))
    }

    /// Vacuum wavelength in meters.
    pub fn meters(self) -> f64 {
        self.0
    }

    /// Vacuum wavelength in micrometers (the Sellmeier argument unit).
    pub fn micrometers(self) -> f64 {
        self.0 * 1e6
    }

    /// Ordinary frequency c / lambda in Hz.
    pub fn frequency(self) -> f64 {
        SPEED_OF_LIGHT / self.0
    }

    /// Angular frequency 2 pi c / lambda in rad/s.
    pub fn angular_frequency(self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / self.0
    }

    /// Detuning of this wavelength's frequency from a reference frequency, Hz.
    pub fn detuning_from(self, reference_hz: f64) -> f64 {
        self.frequency() - reference_hz
    }
}

/// Wavelength of a photon whose ordinary frequency is `frequency_hz`.
pub fn wavelength_of_frequency(frequency_hz: f64) -> Result<Wavelength> {
    if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
        return Err(Error::invalid(
            "frequency",
            format!("must be positive and finite, got {frequency_hz}"),
        ));
    }
    Wavelength::from_meters(SPEED_OF_LIGHT / frequency_hz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn round_trip_through_angular_frequency() {
        let lam = Wavelength::from_meters(650e-9).unwrap();
        let back = Wavelength::from_angular_frequency(lam.angular_frequency()).unwrap();
        assert_relative_eq!(back.meters(), 650e-9, max_relative = 1e-12);
    }

    #[test]
    fn detuning_sign() {
        let nu0 = Wavelength::from_meters(650e-9).unwrap().frequency();
        let blue = Wavelength::from_meters(600e-9).unwrap();
        assert!(blue.detuning_from(nu0) > 0.0);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(Wavelength::from_meters(0.0).is_err());
        assert!(Wavelength::from_meters(-1e-9).is_err());
        assert!(Wavelength::from_meters(f64::NAN).is_err());
    }
}
