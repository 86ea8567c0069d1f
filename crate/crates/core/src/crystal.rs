//! Uniaxial crystal dispersion: Sellmeier indices, the extraordinary index at
//! an angle to the optic axis, the collinear degenerate cut-angle solver, and
//! refraction between crystal-internal and lab angles.

use crate::error::{Error, Result};
use crate::numeric::bisect;
use crate::units::Wavelength;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Sellmeier coefficients for n^2 = A + B / (lambda^2 - C) - D lambda^2,
/// with lambda in micrometers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sellmeier {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Sellmeier {
    /// Ordinary-ray coefficients for beta barium borate (Eimerl et al.,
    /// J. Appl. Phys. 62, 1968 (1987)).
    pub const BBO_ORDINARY: Sellmeier = Sellmeier {
        a: 2.7405,
        b: 0.0184,
        c: 0.0179,
        d: 0.0155,
    };

    /// Principal extraordinary-ray coefficients for beta barium borate
    /// (same source).
    pub const BBO_EXTRAORDINARY: Sellmeier = Sellmeier {
        a: 2.3730,
        b: 0.0128,
        c: 0.0156,
        d: 0.0044,
    };

    /// n^2 at the given vacuum wavelength. May leave the physical range when
    /// evaluated far outside the fit band; callers decide how to guard.
    pub fn index_squared(&self, wavelength: Wavelength) -> f64 {
        let l2 = wavelength.micrometers().powi(2);
        self.a + self.b / (l2 - self.c) - self.d * l2
    }
}

/// A uniaxial nonlinear crystal cut for type-I downconversion.
///
/// `cut_angle` is the angle between the pump propagation axis and the optic
/// axis. `walkoff_displacement` is the total lateral drift of the
/// extraordinary pump envelope accumulated over the full crystal length; its
/// sign selects the drift direction along the dispersion plane (positive
/// toward the side where the grating collects the high-frequency photon).
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalSpec {
    pub length: f64,
    pub sellmeier_o: Sellmeier,
    pub sellmeier_e: Sellmeier,
    pub cut_angle: f64,
    pub walkoff_displacement: f64,
    /// Accepted wavelength window (meters) for the public index operations.
    pub validity_window: (f64, f64),
}

/// Default Sellmeier validity window, meters.
pub const DEFAULT_VALIDITY_WINDOW: (f64, f64) = (0.20e-6, 1.10e-6);

impl CrystalSpec {
    /// Validated constructor. Checks the geometric invariants and that the
    /// coefficient pair is negative uniaxial (n_o > n_e principal) across the
    /// declared window.
    pub fn new(
        length: f64,
        sellmeier_o: Sellmeier,
        sellmeier_e: Sellmeier,
        cut_angle: f64,
        walkoff_displacement: f64,
        validity_window: (f64, f64),
    ) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::invalid("crystal.length", "must be positive"));
        }
        if !(0.0..=FRAC_PI_2).contains(&cut_angle) {
            return Err(Error::invalid(
                "crystal.cut_angle",
                "must lie in [0, pi/2]",
            ));
        }
        if !walkoff_displacement.is_finite() {
            return Err(Error::invalid(
                "crystal.walkoff_displacement",
                "must be finite",
            ));
        }
        let (lo, hi) = validity_window;
        if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
            return Err(Error::invalid(
                "crystal.validity_window",
                "must satisfy 0 < min < max",
            ));
        }
        let spec = CrystalSpec {
            length,
            sellmeier_o,
            sellmeier_e,
            cut_angle,
            walkoff_displacement,
            validity_window,
        };
        // negative uniaxial check by sampling the window
        for i in 0..=32 {
            let lam = lo + (hi - lo) * i as f64 / 32.0;
            let w = Wavelength::from_meters(lam)?;
            let no2 = spec.sellmeier_o.index_squared(w);
            let ne2 = spec.sellmeier_e.index_squared(w);
            if !(no2 > 1.0 && ne2 > 1.0) {
                return Err(Error::invalid(
                    "crystal.sellmeier",
                    format!("index not physical at {:.3} um", w.micrometers()),
                ));
            }
            if no2 <= ne2 {
                return Err(Error::invalid(
                    "crystal.sellmeier",
                    format!(
                        "not negative uniaxial at {:.3} um (n_o <= n_e)",
                        w.micrometers()
                    ),
                ));
            }
        }
        Ok(spec)
    }

    /// The stock BBO crystal with the shipped coefficient set.
    pub fn bbo(length: f64, cut_angle: f64, walkoff_displacement: f64) -> Result<Self> {
        CrystalSpec::new(
            length,
            Sellmeier::BBO_ORDINARY,
            Sellmeier::BBO_EXTRAORDINARY,
            cut_angle,
            walkoff_displacement,
            DEFAULT_VALIDITY_WINDOW,
        )
    }

    fn check_window(&self, wavelength: Wavelength) -> Result<()> {
        let (lo, hi) = self.validity_window;
        let m = wavelength.meters();
        if m < lo || m > hi {
            return Err(Error::WavelengthOutOfWindow {
                wavelength_um: wavelength.micrometers(),
                min_um: lo * 1e6,
                max_um: hi * 1e6,
            });
        }
        Ok(())
    }

    /// Ordinary refractive index n_o(lambda), window-checked.
    pub fn index_ordinary(&self, wavelength: Wavelength) -> Result<f64> {
        self.check_window(wavelength)?;
        let n2 = self.sellmeier_o.index_squared(wavelength);
        if n2 <= 1.0 {
            return Err(Error::SellmeierOutOfRange {
                wavelength_um: wavelength.micrometers(),
                n_squared: n2,
            });
        }
        Ok(n2.sqrt())
    }

    /// Principal extraordinary index n_e(lambda), window-checked.
    pub fn index_extraordinary_principal(&self, wavelength: Wavelength) -> Result<f64> {
        self.check_window(wavelength)?;
        let n2 = self.sellmeier_e.index_squared(wavelength);
        if n2 <= 1.0 {
            return Err(Error::SellmeierOutOfRange {
                wavelength_um: wavelength.micrometers(),
                n_squared: n2,
            });
        }
        Ok(n2.sqrt())
    }

    /// Extraordinary index at angle `theta` to the optic axis:
    /// 1/n^2 = cos^2(theta)/n_o^2 + sin^2(theta)/n_e^2.
    pub fn index_extraordinary(&self, wavelength: Wavelength, theta: f64) -> Result<f64> {
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::invalid("theta", "must lie in [0, pi/2]"));
        }
        let no = self.index_ordinary(wavelength)?;
        let ne = self.index_extraordinary_principal(wavelength)?;
        Ok(index_ellipsoid(no, ne, theta))
    }

    /// Window-free ordinary index for internal dispersive tracing. The
    /// frequency-angular branch reaches idler wavelengths far outside the
    /// fitted band; the map treats a non-physical evaluation (n^2 <= 1) as
    /// the end of the branch rather than an error.
    pub(crate) fn index_ordinary_relaxed(&self, wavelength_m: f64) -> Option<f64> {
        if wavelength_m <= 0.0 {
            return None;
        }
        let l2 = (wavelength_m * 1e6).powi(2);
        let n2 = self.sellmeier_o.a + self.sellmeier_o.b / (l2 - self.sellmeier_o.c)
            - self.sellmeier_o.d * l2;
        (n2 > 1.0).then(|| n2.sqrt())
    }

    /// Window-free extraordinary index at an angle, for the pump wave number.
    pub(crate) fn index_extraordinary_relaxed(
        &self,
        wavelength_m: f64,
        theta: f64,
    ) -> Option<f64> {
        let l2 = (wavelength_m * 1e6).powi(2);
        let no2 = self.sellmeier_o.a + self.sellmeier_o.b / (l2 - self.sellmeier_o.c)
            - self.sellmeier_o.d * l2;
        let ne2 = self.sellmeier_e.a + self.sellmeier_e.b / (l2 - self.sellmeier_e.c)
            - self.sellmeier_e.d * l2;
        if no2 <= 1.0 || ne2 <= 1.0 {
            return None;
        }
        Some(index_ellipsoid(no2.sqrt(), ne2.sqrt(), theta))
    }

    /// Pump wave number along the propagation axis, extraordinary at the cut
    /// angle.
    pub(crate) fn pump_wavenumber(&self, pump_wavelength: Wavelength) -> Option<f64> {
        let n = self.index_extraordinary_relaxed(pump_wavelength.meters(), self.cut_angle)?;
        Some(n * pump_wavelength.angular_frequency() / crate::units::SPEED_OF_LIGHT)
    }

    /// Refract an ordinary-ray internal angle into the lab frame at the exit
    /// face: sin(theta_ext) = n_o sin(theta_int). Signed, odd in the angle.
    pub fn external_angle(&self, wavelength: Wavelength, theta_internal: f64) -> Result<f64> {
        let n = self.index_ordinary(wavelength)?;
        let s = n * theta_internal.sin();
        if s.abs() > 1.0 {
            return Err(Error::TotalInternalReflection { sine: s.abs() });
        }
        Ok(s.asin())
    }

    /// Inverse of [`CrystalSpec::external_angle`].
    pub fn internal_angle(&self, wavelength: Wavelength, theta_external: f64) -> Result<f64> {
        let n = self.index_ordinary(wavelength)?;
        Ok((theta_external.sin() / n).asin())
    }
}

/// The uniaxial index ellipsoid evaluated at polar angle `theta`.
fn index_ellipsoid(no: f64, ne_principal: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    1.0 / ((c * c) / (no * no) + (s * s) / (ne_principal * ne_principal)).sqrt()
}

/// Solve the collinear degenerate type-I cut angle: the angle at which the
/// extraordinary pump index at `lambda_p` equals the ordinary index at
/// `2 lambda_p`. Monotone bisection on [0, pi/2] down to an index residual
/// of 1e-10.
pub fn solve_cut_angle(crystal: &CrystalSpec, pump_wavelength: Wavelength) -> Result<f64> {
    let target = crystal.index_ordinary(Wavelength::from_meters(2.0 * pump_wavelength.meters())?)?;
    let lo = crystal.index_extraordinary_principal(pump_wavelength)?;
    let hi = crystal.index_ordinary(pump_wavelength)?;
    if target < lo || target > hi {
        return Err(Error::PhaseMatchingInfeasible {
            target,
            min: lo,
            max: hi,
        });
    }
    // n_e(theta) decreases monotonically from n_o at theta=0 to n_e at pi/2.
    let f = |theta: f64| index_ellipsoid(hi, lo, theta) - target;
    Ok(bisect(f, 0.0, FRAC_PI_2, 0.0, 1e-10))
}
