//! Gaussian-mode overlap model for the fiber-coupled coincidence rate.
//!
//! The pair amplitude into a given signal/idler mode pair is the volume
//! overlap of three Gaussian beams crossing the crystal: the pump envelope
//! along the z axis (drifting laterally by the walk-off displacement), and
//! the two collection modes tilted at their internal central angles. Each
//! mode is a collimated tube exp(ik u.r) exp(-rho^2/W^2) with rho measured
//! from its own axis; diffraction over the crystal length is neglected.
//!
//! With every axis line parametrized linearly in z, the x and y integrals are
//! Gaussians and are done in closed form (completing the square), leaving
//!
//!   F = N exp(-Dx^2 / (4 bx)) * Int_{-L/2}^{L/2} exp(i (Dz + Dx m1) z - p2 z^2) dz,
//!
//! where Dx, Dz are the transverse and longitudinal mismatches of the central
//! wave vectors, bx the combined transverse curvature, m1 the z-rate of the
//! weighted beam center, and p2 >= 0 the lateral-separation penalty that
//! shrinks the interaction volume for noncollinear geometry. N carries the
//! normalized-mode prefactors, so the collinear matched-waist rate scales as
//! 1/W^2. The z integral is evaluated by adaptive Simpson quadrature.
//!
//! The rate is R_T = delta_omega |F|^2 in the narrow detection-filter limit.

use crate::crystal::CrystalSpec;
use crate::error::{Error, Result};
use crate::numeric::adaptive_simpson_complex;
use crate::phasematching::PumpSpec;
use crate::units::{Wavelength, SPEED_OF_LIGHT};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// Single-mode fiber plus the imaging train that relays its mode to the
/// crystal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberTrainSpec {
    /// Fiber numerical aperture (sine of the acceptance half-angle).
    pub numerical_aperture: f64,
    /// Transverse magnification Gamma between fiber mode and crystal plane.
    pub magnification: f64,
    /// Wavelength at which Gamma was selected.
    pub reference_wavelength: Wavelength,
}

impl FiberTrainSpec {
    pub fn new(
        numerical_aperture: f64,
        magnification: f64,
        reference_wavelength: Wavelength,
    ) -> Result<Self> {
        if !(numerical_aperture > 0.0 && numerical_aperture < 1.0) {
            return Err(Error::invalid(
                "fiber.numerical_aperture",
                format!("must lie in (0, 1), got {numerical_aperture}"),
            ));
        }
        if !(magnification.is_finite() && magnification > 0.0) {
            return Err(Error::invalid("fiber.magnification", "must be positive"));
        }
        Ok(FiberTrainSpec {
            numerical_aperture,
            magnification,
            reference_wavelength,
        })
    }
}

/// Fundamental fiber-mode waist W_f = lambda / (pi NA).
pub fn fiber_mode_waist(wavelength: Wavelength, fiber: &FiberTrainSpec) -> f64 {
    wavelength.meters() / (PI * fiber.numerical_aperture)
}

/// Collection-mode waist at the crystal, W = Gamma W_f(lambda).
pub fn collection_waist(wavelength: Wavelength, fiber: &FiberTrainSpec) -> f64 {
    fiber.magnification * fiber_mode_waist(wavelength, fiber)
}

/// Train magnification that produces `target_waist` at the reference
/// wavelength: Gamma = target / W_f(reference).
pub fn select_gamma_train(
    target_waist: f64,
    reference: Wavelength,
    numerical_aperture: f64,
) -> f64 {
    target_waist * PI * numerical_aperture / reference.meters()
}

/// Central angles, waists, and detection bandwidth of one signal/idler mode
/// pair. Angles are signed lab-frame (external) angles in the dispersion
/// plane; the idler of a noncollinear pair carries the opposite sign from
/// the signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectionModes {
    pub signal_angle: f64,
    pub idler_angle: f64,
    pub signal_waist: f64,
    pub idler_waist: f64,
    pub pump_waist: f64,
    /// Detection bandwidth delta_omega, rad/s.
    pub detection_bandwidth: f64,
}

impl CollectionModes {
    pub fn new(
        signal_angle: f64,
        idler_angle: f64,
        signal_waist: f64,
        idler_waist: f64,
        pump_waist: f64,
        detection_bandwidth: f64,
    ) -> Result<Self> {
        for (name, w) in [
            ("signal_waist", signal_waist),
            ("idler_waist", idler_waist),
            ("pump_waist", pump_waist),
        ] {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid(name, "waist must be positive"));
            }
        }
        if !(detection_bandwidth.is_finite() && detection_bandwidth > 0.0) {
            return Err(Error::invalid("detection_bandwidth", "must be positive"));
        }
        Ok(CollectionModes {
            signal_angle,
            idler_angle,
            signal_waist,
            idler_waist,
            pump_waist,
            detection_bandwidth,
        })
    }
}

fn ordinary_index_extended(crystal: &CrystalSpec, wavelength_m: f64) -> Result<f64> {
    let w = Wavelength::from_meters(wavelength_m)?;
    let n2 = crystal.sellmeier_o.index_squared(w);
    if n2 <= 1.0 {
        return Err(Error::SellmeierOutOfRange {
            wavelength_um: wavelength_m * 1e6,
            n_squared: n2,
        });
    }
    Ok(n2.sqrt())
}

/// Complex pair-overlap amplitude F for a signal at angular frequency
/// `omega_cs` collected by `modes`. The rate is
/// `modes.detection_bandwidth * |F|^2`.
pub fn coincidence_amplitude(
    omega_cs: f64,
    modes: &CollectionModes,
    crystal: &CrystalSpec,
    pump: &PumpSpec,
) -> Result<Complex64> {
    let f_s = omega_cs / TAU;
    let f_i = pump.frequency() - f_s;
    if f_s <= 0.0 || f_i <= 0.0 {
        return Err(Error::NoConjugateAngle {
            reason: format!("idler frequency nonpositive for omega_cs = {omega_cs:.6e}"),
        });
    }
    let n_s = ordinary_index_extended(crystal, SPEED_OF_LIGHT / f_s)?;
    let n_i = ordinary_index_extended(crystal, SPEED_OF_LIGHT / f_i)?;
    let k_s = TAU * f_s * n_s / SPEED_OF_LIGHT;
    let k_i = TAU * f_i * n_i / SPEED_OF_LIGHT;
    let k_p = crystal
        .pump_wavenumber(pump.wavelength)
        .ok_or(Error::SellmeierOutOfRange {
            wavelength_um: pump.wavelength.micrometers(),
            n_squared: f64::NAN,
        })?;

    // refract the lab collection angles into the crystal (signed)
    let alpha_s = (modes.signal_angle.sin() / n_s).asin();
    let alpha_i = (modes.idler_angle.sin() / n_i).asin();
    let (sin_s, cos_s) = (alpha_s.sin(), alpha_s.cos());
    let (sin_i, cos_i) = (alpha_i.sin(), alpha_i.cos());

    let dx = -k_s * sin_s - k_i * sin_i;
    let dz = k_p - k_s * cos_s - k_i * cos_i;

    let (w_s, w_i, w_p) = (modes.signal_waist, modes.idler_waist, modes.pump_waist);
    let drift = crystal.walkoff_displacement / crystal.length;
    let bx = cos_s * cos_s / (w_s * w_s) + cos_i * cos_i / (w_i * w_i) + 1.0 / (w_p * w_p);
    let b1 = cos_s * sin_s / (w_s * w_s) + cos_i * sin_i / (w_i * w_i) + drift / (w_p * w_p);
    let b2 = sin_s * sin_s / (w_s * w_s)
        + sin_i * sin_i / (w_i * w_i)
        + drift * drift / (w_p * w_p);
    let by = 1.0 / (w_s * w_s) + 1.0 / (w_i * w_i) + 1.0 / (w_p * w_p);
    let m1 = b1 / bx;
    let p2 = (b2 - b1 * b1 / bx).max(0.0);

    let a_eff = dz + dx * m1;
    let half = crystal.length / 2.0;
    let z_integral = adaptive_simpson_complex(
        |z| Complex64::cis(a_eff * z) * (-p2 * z * z).exp(),
        -half,
        half,
        1e-8,
        crystal.length,
        64,
    )?;
    let norm = (2.0 / PI).powf(1.5) / (w_p * w_s * w_i) * PI / (bx * by).sqrt();
    Ok(norm * (-dx * dx / (4.0 * bx)).exp() * z_integral)
}

/// Fiber-coupled coincidence rate R_T (arbitrary units).
pub fn coincidence_rate(
    omega_cs: f64,
    modes: &CollectionModes,
    crystal: &CrystalSpec,
    pump: &PumpSpec,
) -> Result<f64> {
    let amp = coincidence_amplitude(omega_cs, modes, crystal, pump)?;
    Ok(modes.detection_bandwidth * amp.norm_sqr())
}

/// Rayleigh length pi W^2 / lambda of a Gaussian mode.
pub fn rayleigh_length(waist: f64, wavelength: Wavelength) -> f64 {
    PI * waist * waist / wavelength.meters()
}

/// Paraxial validity check: every mode's Rayleigh length should exceed the
/// crystal length, otherwise the collimated-tube model is outside its range.
pub fn paraxial_warnings(
    crystal: &CrystalSpec,
    pump: &PumpSpec,
    fiber: &FiberTrainSpec,
) -> Vec<String> {
    let mut warnings = Vec::new();
    let mut check = |label: &str, waist: f64, lam: Wavelength| {
        let zr = rayleigh_length(waist, lam);
        if zr < crystal.length {
            warnings.push(format!(
                "{label}: Rayleigh length {:.2} mm is shorter than the crystal ({:.2} mm); \
                 the collimated-mode model does not apply to this tight focus",
                zr * 1e3,
                crystal.length * 1e3
            ));
        }
    };
    check("pump mode", pump.waist, pump.wavelength);
    check(
        "collection mode",
        collection_waist(fiber.reference_wavelength, fiber),
        fiber.reference_wavelength,
    );
    warnings
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lam(m: f64) -> Wavelength {
        Wavelength::from_meters(m).unwrap()
    }

    fn fiber() -> FiberTrainSpec {
        let gamma = select_gamma_train(48e-6, lam(650e-9), 0.12);
        FiberTrainSpec::new(0.12, gamma, lam(650e-9)).unwrap()
    }

    fn setup(walkoff: f64) -> (CrystalSpec, PumpSpec) {
        let crystal = CrystalSpec::bbo(2e-3, 0.6359637464072742, walkoff).unwrap();
        let pump = PumpSpec::new(lam(325e-9), 34e-6).unwrap();
        (crystal, pump)
    }

    fn matched_modes(nu: f64, pump: &PumpSpec, fib: &FiberTrainSpec) -> CollectionModes {
        let f0 = pump.degenerate_frequency();
        let w_s = collection_waist(lam(SPEED_OF_LIGHT / (f0 + nu)), fib);
        let w_i = collection_waist(lam(SPEED_OF_LIGHT / (f0 - nu)), fib);
        CollectionModes::new(0.0, 0.0, w_s, w_i, pump.waist, TAU * 3.2e12).unwrap()
    }

    #[test]
    fn fiber_mode_waist_formula() {
        let f = fiber();
        assert_relative_eq!(
            fiber_mode_waist(lam(650e-9), &f),
            1.7241785501621997e-6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            fiber_mode_waist(lam(325e-9), &f),
            0.5 * 1.7241785501621997e-6,
            max_relative = 1e-12
        );
        // linear in wavelength
        assert_relative_eq!(
            fiber_mode_waist(lam(1300e-9), &f),
            2.0 * fiber_mode_waist(lam(650e-9), &f),
            max_relative = 1e-14
        );
    }

    #[test]
    fn gamma_selection_and_collection_waist() {
        assert_relative_eq!(
            select_gamma_train(48e-6, lam(650e-9), 0.12),
            27.839344130272625,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            select_gamma_train(96e-6, lam(650e-9), 0.12),
            2.0 * 27.839344130272625,
            max_relative = 1e-14
        );
        let f = fiber();
        assert_relative_eq!(collection_waist(lam(650e-9), &f), 48e-6, max_relative = 1e-12);
        assert_relative_eq!(
            collection_waist(lam(520e-9), &f),
            38.4e-6,
            max_relative = 1e-12
        );
        // identity magnification reproduces the bare fiber waist
        let unity = FiberTrainSpec::new(0.12, 1.0, lam(650e-9)).unwrap();
        assert_relative_eq!(
            collection_waist(lam(650e-9), &unity),
            fiber_mode_waist(lam(650e-9), &unity),
            max_relative = 1e-15
        );
        // Gamma selected at W_f(lambda) is unity
        let g = select_gamma_train(fiber_mode_waist(lam(650e-9), &f), lam(650e-9), 0.12);
        assert_relative_eq!(g, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn collinear_degenerate_rate_peaks_at_zero_detuning() {
        let (c, p) = setup(50e-6);
        let f = fiber();
        let r0 = coincidence_rate(p.omega_signal(0.0), &matched_modes(0.0, &p, &f), &c, &p).unwrap();
        for nu in [-60e12, -20e12, 20e12, 60e12] {
            let r =
                coincidence_rate(p.omega_signal(nu), &matched_modes(nu, &p, &f), &c, &p).unwrap();
            assert!(r < r0, "rate at {nu} not below peak");
        }
    }

    #[test]
    fn collinear_rate_even_in_detuning_with_fixed_waists() {
        let (c, p) = setup(0.0);
        let modes = CollectionModes::new(0.0, 0.0, 48e-6, 48e-6, 34e-6, TAU * 3.2e12).unwrap();
        for nu in [15e12, 40e12, 90e12] {
            let rp = coincidence_rate(p.omega_signal(nu), &modes, &c, &p).unwrap();
            let rm = coincidence_rate(p.omega_signal(-nu), &modes, &c, &p).unwrap();
            assert_relative_eq!(rp, rm, max_relative = 1e-9);
        }
    }

    #[test]
    fn rate_decreases_monotonically_with_walkoff() {
        let p = PumpSpec::new(lam(325e-9), 34e-6).unwrap();
        let f = fiber();
        let modes = matched_modes(0.0, &p, &f);
        let mut prev = f64::INFINITY;
        for walkoff in [0.0, 20e-6, 50e-6, 100e-6, 200e-6] {
            let c = CrystalSpec::bbo(2e-3, 0.6359637464072742, walkoff).unwrap();
            let r = coincidence_rate(p.omega_signal(0.0), &modes, &c, &p).unwrap();
            assert!(r < prev || walkoff == 0.0, "not decreasing at {walkoff}");
            prev = r;
        }
    }

    #[test]
    fn peak_rate_scales_as_inverse_waist_squared() {
        // matched waists, no walkoff, collinear: the closed form gives
        // R proportional to 1/W^2 exactly
        let c = CrystalSpec::bbo(2e-3, 0.6359637464072742, 0.0).unwrap();
        let p = PumpSpec::new(lam(325e-9), 100e-6 / 2.0_f64.sqrt()).unwrap();
        let rate_at = |w: f64| {
            let pump = PumpSpec::new(lam(325e-9), w / 2.0_f64.sqrt()).unwrap();
            let modes = CollectionModes::new(0.0, 0.0, w, w, pump.waist, TAU * 3.2e12).unwrap();
            coincidence_rate(pump.omega_signal(0.0), &modes, &c, &pump).unwrap()
        };
        let _ = p;
        let ratio = rate_at(100e-6) / rate_at(200e-6);
        assert_relative_eq!(ratio, 4.0, max_relative = 1e-6);
    }

    #[test]
    fn tilted_modes_suppress_the_rate() {
        let (c, p) = setup(50e-6);
        let f = fiber();
        let base = matched_modes(0.0, &p, &f);
        let tilted = CollectionModes {
            signal_angle: 0.05,
            idler_angle: -0.05,
            ..base
        };
        let r0 = coincidence_rate(p.omega_signal(0.0), &base, &c, &p).unwrap();
        let rt = coincidence_rate(p.omega_signal(0.0), &tilted, &c, &p).unwrap();
        assert!(rt < 0.5 * r0, "tilt did not shrink the interaction volume");
    }

    #[test]
    fn rate_is_nonnegative_and_finite_across_detunings() {
        let (c, p) = setup(50e-6);
        let f = fiber();
        let mut nu = -300e12;
        while nu <= 300e12 {
            let r = coincidence_rate(p.omega_signal(nu), &matched_modes(nu, &p, &f), &c, &p)
                .unwrap_or(0.0);
            assert!(r.is_finite() && r >= 0.0);
            nu += 25e12;
        }
    }

    #[test]
    fn paraxial_guard_flags_tight_focus() {
        let (c, p) = setup(50e-6);
        assert!(paraxial_warnings(&c, &p, &fiber()).is_empty());
        let tight = PumpSpec::new(lam(325e-9), 5e-6).unwrap();
        let w = paraxial_warnings(&c, &tight, &fiber());
        assert_eq!(w.len(), 1);
        assert!(w[0].contains("Rayleigh"));
    }

    #[test]
    fn invalid_modes_rejected() {
        assert!(CollectionModes::new(0.0, 0.0, 0.0, 48e-6, 34e-6, 1.0).is_err());
        assert!(CollectionModes::new(0.0, 0.0, 48e-6, 48e-6, 34e-6, 0.0).is_err());
        assert!(FiberTrainSpec::new(1.5, 27.0, lam(650e-9)).is_err());
        assert!(FiberTrainSpec::new(0.12, -1.0, lam(650e-9)).is_err());
    }
}
