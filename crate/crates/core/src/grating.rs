//! Angular-dispersion mapping between frequency and collection angle, and the
//! grating diffraction-efficiency model.
//!
//! The first-order grating relation used throughout:
//! sin(theta_0) - sin(gamma theta_c) = 2 pi c D / omega,
//! where theta_c is the crystal-side external collection angle, theta_0 the
//! incidence angle of the fiber-conjugate mode, D the groove density, and
//! gamma the relay magnification between crystal and grating.

use crate::error::{Error, Result};
use crate::phasematching::PumpSpec;
use crate::units::SPEED_OF_LIGHT;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Whether spectra include the grating's spectral diffraction efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EfficiencyMode {
    /// Lossless grating: unit efficiency everywhere.
    Ideal,
    /// Piecewise-linear efficiency through the measured anchor points.
    Anchored,
}

/// Diffraction grating and relay geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct GratingSpec {
    /// Groove density D, lines per meter.
    pub groove_density: f64,
    /// Incidence angle theta_0 of the fiber-conjugate mode, rad.
    pub incidence_angle: f64,
    /// Relay (lens-system) angular magnification gamma.
    pub magnification: f64,
    /// (wavelength m, efficiency) anchor points, sorted by wavelength.
    pub efficiency_anchors: Vec<(f64, f64)>,
    pub efficiency_mode: EfficiencyMode,
}

impl GratingSpec {
    pub fn new(
        groove_density: f64,
        incidence_angle: f64,
        magnification: f64,
        mut efficiency_anchors: Vec<(f64, f64)>,
        efficiency_mode: EfficiencyMode,
    ) -> Result<Self> {
        if !(groove_density.is_finite() && groove_density > 0.0) {
            return Err(Error::invalid("grating.groove_density", "must be positive"));
        }
        if !(magnification.is_finite() && magnification > 0.0) {
            return Err(Error::invalid("grating.magnification", "must be positive"));
        }
        if !incidence_angle.is_finite() || incidence_angle.abs() > std::f64::consts::FRAC_PI_2 {
            return Err(Error::invalid(
                "grating.incidence_angle",
                "must lie in [-pi/2, pi/2]",
            ));
        }
        efficiency_anchors.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(lam, eff) in &efficiency_anchors {
            if !(lam > 0.0 && (0.0..=1.0).contains(&eff)) {
                return Err(Error::invalid(
                    "grating.efficiency_anchors",
                    format!("bad anchor ({lam}, {eff}): wavelength must be positive, efficiency in [0,1]"),
                ));
            }
        }
        if efficiency_mode == EfficiencyMode::Anchored && efficiency_anchors.len() < 2 {
            return Err(Error::invalid(
                "grating.efficiency_anchors",
                "anchored mode needs at least two anchor points",
            ));
        }
        Ok(GratingSpec {
            groove_density,
            incidence_angle,
            magnification,
            efficiency_anchors,
            efficiency_mode,
        })
    }

    /// Crystal-side external collection angle for an angular frequency,
    /// signed: positive above the degenerate frequency anchored by theta_0.
    pub fn angle_for_frequency(&self, omega: f64) -> Result<f64> {
        let arg = self.incidence_angle.sin() - TAU * SPEED_OF_LIGHT * self.groove_density / omega;
        if arg.abs() > 1.0 {
            return Err(Error::EvanescentOrder {
                argument: arg.abs(),
            });
        }
        Ok(arg.asin() / self.magnification)
    }

    /// Inverse of [`GratingSpec::angle_for_frequency`].
    pub fn frequency_for_angle(&self, theta_c: f64) -> Result<f64> {
        let denom = self.incidence_angle.sin() - (self.magnification * theta_c).sin();
        if denom <= 0.0 {
            return Err(Error::EvanescentOrder { argument: denom });
        }
        Ok(TAU * SPEED_OF_LIGHT * self.groove_density / denom)
    }

    /// First-order diffraction efficiency at a vacuum wavelength (meters).
    ///
    /// Anchored mode interpolates linearly in wavelength between the anchor
    /// points and clamps to the end values outside their span.
    pub fn efficiency(&self, wavelength_m: f64) -> f64 {
        match self.efficiency_mode {
            EfficiencyMode::Ideal => 1.0,
            EfficiencyMode::Anchored => {
                let anchors = &self.efficiency_anchors;
                let first = anchors[0];
                let last = anchors[anchors.len() - 1];
                if wavelength_m <= first.0 {
                    return first.1;
                }
                if wavelength_m >= last.0 {
                    return last.1;
                }
                for w in anchors.windows(2) {
                    let (l0, e0) = w[0];
                    let (l1, e1) = w[1];
                    if wavelength_m <= l1 {
                        let t = (wavelength_m - l0) / (l1 - l0);
                        return (e0 + (e1 - e0) * t).clamp(0.0, 1.0);
                    }
                }
                last.1
            }
        }
    }

    /// Probability that both photons of a pair survive diffraction:
    /// the product of the single-photon efficiencies at the signal wavelength
    /// and at the energy-conserving idler wavelength.
    pub fn pair_efficiency(&self, omega_s: f64, pump: &PumpSpec) -> f64 {
        if self.efficiency_mode == EfficiencyMode::Ideal {
            return 1.0;
        }
        let f_s = omega_s / TAU;
        let f_i = pump.frequency() - f_s;
        if f_s <= 0.0 || f_i <= 0.0 {
            return 0.0;
        }
        self.efficiency(SPEED_OF_LIGHT / f_s) * self.efficiency(SPEED_OF_LIGHT / f_i)
    }
}

/// Incidence angle that puts the central wavelength on the fiber axis:
/// sin(theta_0) = lambda_central D.
pub fn solve_theta0(groove_density: f64, central_wavelength_m: f64) -> Result<f64> {
    let arg = central_wavelength_m * groove_density;
    if arg > 1.0 {
        return Err(Error::EvanescentOrder { argument: arg });
    }
    Ok(arg.asin())
}
