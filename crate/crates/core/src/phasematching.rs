//! Longitudinal phase mismatch and the frequency-angular intensity map for a
//! monochromatic plane-wave pump.
//!
//! Conventions: the pump propagates along +z, extraordinary-polarized at the
//! crystal cut angle; signal and idler are ordinary. Detunings are ordinary
//! frequencies in Hz relative to the degenerate frequency (half the pump
//! frequency). User-facing emission angles are lab (external) angles; the
//! exit-face refraction is applied inside this module.

use crate::crystal::CrystalSpec;
use crate::error::{Error, Result};
use crate::units::{Wavelength, SPEED_OF_LIGHT};
use std::f64::consts::TAU;

/// The pump beam: wavelength and waist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec {
    pub wavelength: Wavelength,
    pub waist: f64,
}

impl PumpSpec {
    pub fn new(wavelength: Wavelength, waist: f64) -> Result<Self> {
        if !(waist.is_finite() && waist > 0.0) {
            return Err(Error::invalid("pump.waist", "must be positive"));
        }
        Ok(PumpSpec { wavelength, waist })
    }

    /// Pump ordinary frequency, Hz.
    pub fn frequency(&self) -> f64 {
        self.wavelength.frequency()
    }

    /// Degenerate (central) frequency omega_p / (4 pi), Hz.
    pub fn degenerate_frequency(&self) -> f64 {
        0.5 * self.frequency()
    }

    /// Signal angular frequency for a detuning from the degenerate point.
    pub fn omega_signal(&self, detuning_hz: f64) -> f64 {
        TAU * (self.degenerate_frequency() + detuning_hz)
    }
}

/// sin(x)/x with the removable singularity filled in.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Signal/idler wave numbers and frequencies for one detuning, or `None`
/// where either photon leaves the evaluable dispersion range.
struct PairKinematics {
    k_signal: f64,
    k_idler: f64,
    f_signal: f64,
}

fn pair_kinematics(crystal: &CrystalSpec, pump: &PumpSpec, omega_s: f64) -> Option<PairKinematics> {
    let f_signal = omega_s / TAU;
    let f_idler = pump.frequency() - f_signal;
    if f_signal <= 0.0 || f_idler <= 0.0 {
        return None;
    }
    let n_s = crystal.index_ordinary_relaxed(SPEED_OF_LIGHT / f_signal)?;
    let n_i = crystal.index_ordinary_relaxed(SPEED_OF_LIGHT / f_idler)?;
    Some(PairKinematics {
        k_signal: TAU * f_signal * n_s / SPEED_OF_LIGHT,
        k_idler: TAU * f_idler * n_i / SPEED_OF_LIGHT,
        f_signal,
    })
}

/// Idler internal angle conjugate to a signal plane wave at `theta_s_internal`
/// under transverse momentum conservation
/// n(omega_i) omega_i sin(theta_i) = n(omega_s) omega_s sin(theta_s).
///
/// Returns the magnitude; the idler propagates on the opposite side of the
/// pump axis.
pub fn conjugate_angle(
    omega_s: f64,
    theta_s_internal: f64,
    crystal: &CrystalSpec,
    pump: &PumpSpec,
) -> Result<f64> {
    let kin = pair_kinematics(crystal, pump, omega_s).ok_or_else(|| Error::NoConjugateAngle {
        reason: format!(
            "pair kinematics not evaluable at omega_s = {omega_s:.6e} rad/s (idler outside dispersion range)"
        ),
    })?;
    let q = kin.k_signal * theta_s_internal.sin().abs();
    if q > kin.k_idler {
        return Err(Error::NoConjugateAngle {
            reason: format!(
                "required transverse momentum {q:.6e} 1/m exceeds idler wave number {:.6e} 1/m",
                kin.k_idler
            ),
        });
    }
    Ok((q / kin.k_idler).asin())
}

/// Longitudinal phase mismatch Delta_z = k_pz - k_sz - k_iz, rad/m, with the
/// idler angle taken from [`conjugate_angle`].
pub fn longitudinal_mismatch(
    omega_s: f64,
    theta_s_internal: f64,
    crystal: &CrystalSpec,
    pump: &PumpSpec,
) -> Result<f64> {
    let kin = pair_kinematics(crystal, pump, omega_s).ok_or_else(|| Error::NoConjugateAngle {
        reason: "pair kinematics not evaluable".to_string(),
    })?;
    let theta_i = conjugate_angle(omega_s, theta_s_internal, crystal, pump)?;
    let k_p = crystal
        .pump_wavenumber(pump.wavelength)
        .ok_or_else(|| Error::NoConjugateAngle {
            reason: "pump index not evaluable".to_string(),
        })?;
    Ok(k_p - kin.k_signal * theta_s_internal.cos() - kin.k_idler * theta_i.cos())
}

/// Sampled frequency-angular intensity map |F(nu, theta)|^2, normalized to
/// its grid maximum.
#[derive(Debug, Clone)]
pub struct SpectralAngularGrid {
    /// Detuning axis, Hz, strictly increasing.
    pub detuning_hz: Vec<f64>,
    /// External angle axis, rad, strictly increasing.
    pub external_angle_rad: Vec<f64>,
    /// Row-major intensities: `values[i_nu * n_theta + i_theta]`, in [0, 1].
    pub values: Vec<f64>,
    /// Raw (pre-normalization) maximum.
    pub raw_max: f64,
}

impl SpectralAngularGrid {
    pub fn value(&self, i_nu: usize, i_theta: usize) -> f64 {
        self.values[i_nu * self.external_angle_rad.len() + i_theta]
    }
}

/// Plane-wave phase-matching intensity sinc^2(Delta_z L / 2) at one detuning
/// and signed external angle; zero where no conjugate idler exists or the
/// dispersion leaves its evaluable range.
pub fn plane_wave_intensity(
    crystal: &CrystalSpec,
    pump: &PumpSpec,
    detuning_hz: f64,
    theta_external: f64,
) -> f64 {
    let omega_s = pump.omega_signal(detuning_hz);
    let Some(kin) = pair_kinematics(crystal, pump, omega_s) else {
        return 0.0;
    };
    // transverse momentum is conserved across the exit face
    let q = (TAU * kin.f_signal / SPEED_OF_LIGHT) * theta_external.sin().abs();
    if q > kin.k_signal || q > kin.k_idler {
        return 0.0;
    }
    let Some(k_p) = crystal.pump_wavenumber(pump.wavelength) else {
        return 0.0;
    };
    let dz = k_p - (kin.k_signal * kin.k_signal - q * q).sqrt()
        - (kin.k_idler * kin.k_idler - q * q).sqrt();
    sinc(dz * crystal.length / 2.0).powi(2)
}

/// Evaluate the frequency-angular map on a regular grid.
pub fn intensity_grid(
    crystal: &CrystalSpec,
    pump: &PumpSpec,
    nu_range: (f64, f64),
    theta_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<SpectralAngularGrid> {
    let (nu_lo, nu_hi) = nu_range;
    let (th_lo, th_hi) = theta_range;
    let (n_nu, n_th) = resolution;
    if !(nu_lo < nu_hi) || n_nu < 2 {
        return Err(Error::EmptyRange { axis: "detuning" });
    }
    if !(th_lo < th_hi) || n_th < 2 {
        return Err(Error::EmptyRange { axis: "angle" });
    }
    let detuning_hz: Vec<f64> = (0..n_nu)
        .map(|i| nu_lo + (nu_hi - nu_lo) * i as f64 / (n_nu - 1) as f64)
        .collect();
    let external_angle_rad: Vec<f64> = (0..n_th)
        .map(|i| th_lo + (th_hi - th_lo) * i as f64 / (n_th - 1) as f64)
        .collect();
    let mut values = Vec::with_capacity(n_nu * n_th);
    let mut raw_max = 0.0_f64;
    for &nu in &detuning_hz {
        for &th in &external_angle_rad {
            let v = plane_wave_intensity(crystal, pump, nu, th);
            raw_max = raw_max.max(v);
            values.push(v);
        }
    }
    if raw_max > 0.0 {
        for v in &mut values {
            *v /= raw_max;
        }
    }
    Ok(SpectralAngularGrid {
        detuning_hz,
        external_angle_rad,
        values,
        raw_max,
    })
}

/// External emission angle of the phase-matched branch at one detuning, or
/// `None` where the branch does not exist or is totally internally reflected.
pub fn branch_angle_external(crystal: &CrystalSpec, pump: &PumpSpec, detuning_hz: f64) -> Option<f64> {
    let omega_s = pump.omega_signal(detuning_hz);
    let kin = pair_kinematics(crystal, pump, omega_s)?;
    let k_p = crystal.pump_wavenumber(pump.wavelength)?;
    let q_max = kin.k_signal.min(kin.k_idler) * (1.0 - 1e-15);
    let mismatch = |q: f64| {
        k_p - (kin.k_signal * kin.k_signal - q * q).sqrt()
            - (kin.k_idler * kin.k_idler - q * q).sqrt()
    };
    let at_zero = mismatch(0.0);
    if at_zero > 0.0 {
        // the cut-angle solver leaves a sub-linewidth residual at the
        // degenerate point; treat it as on-axis phase matching
        return (at_zero < 1e-3 * TAU / crystal.length).then_some(0.0);
    }
    if mismatch(q_max) < 0.0 {
        return None;
    }
    let q = crate::numeric::bisect(mismatch, 0.0, q_max, q_max * 1e-14, 0.0);
    // refraction at the exit face conserves transverse momentum
    let sin_ext = q * SPEED_OF_LIGHT / (TAU * kin.f_signal);
    (sin_ext <= 1.0).then(|| sin_ext.asin())
}

/// Connected detuning interval around zero over which the phase-matched
/// branch exists and stays within `theta_max_external` of the pump axis.
///
/// The negative endpoint is where the steep (low-frequency) branch crosses
/// the angular limit; the positive endpoint is where the flat branch either
/// crosses the limit or terminates because the idler wave number collapses.
pub fn branch_extent(
    crystal: &CrystalSpec,
    pump: &PumpSpec,
    theta_max_external: f64,
) -> Result<(f64, f64)> {
    if !(theta_max_external > 0.0) {
        return Err(Error::EmptyRange { axis: "angle" });
    }
    let visible = |nu: f64| {
        branch_angle_external(crystal, pump, nu).is_some_and(|t| t <= theta_max_external)
    };
    if !visible(0.0) {
        return Err(Error::NoConjugateAngle {
            reason: "degenerate collinear point not phase matched".to_string(),
        });
    }
    let step = 1e12;
    let scan = |direction: f64| -> f64 {
        let mut nu = 0.0;
        while visible(nu + direction * step) {
            nu += direction * step;
        }
        let (mut inside, mut outside) = (nu, nu + direction * step);
        while (outside - inside).abs() > 1e7 {
            let mid = 0.5 * (inside + outside);
            if visible(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        0.5 * (inside + outside)
    };
    Ok((scan(-1.0), scan(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn setup() -> (CrystalSpec, PumpSpec) {
        let crystal = CrystalSpec::bbo(2e-3, 0.6359637464072742, 50e-6).unwrap();
        let pump = PumpSpec::new(Wavelength::from_meters(325e-9).unwrap(), 34e-6).unwrap();
        (crystal, pump)
    }

    #[test]
    fn conjugate_angle_degenerate_symmetry() {
        let (c, p) = setup();
        let omega0 = p.omega_signal(0.0);
        assert_eq!(conjugate_angle(omega0, 0.0, &c, &p).unwrap(), 0.0);
        let th = conjugate_angle(omega0, 5e-3, &c, &p).unwrap();
        assert_relative_eq!(th, 5e-3, max_relative = 1e-12);
    }

    #[test]
    fn conjugate_angle_matches_root_finder_oracle() {
        let (c, p) = setup();
        let omega_s = p.omega_signal(50e12);
        let got = conjugate_angle(omega_s, 0.010, &c, &p).unwrap();
        // independent oracle: scalar bisection directly on
        // n_i w_i sin(th_i) = n_s w_s sin(th_s)
        let f_s = omega_s / TAU;
        let f_i = p.frequency() - f_s;
        let n_s = c
            .index_ordinary(Wavelength::from_meters(SPEED_OF_LIGHT / f_s).unwrap())
            .unwrap();
        let n_i = c
            .index_ordinary(Wavelength::from_meters(SPEED_OF_LIGHT / f_i).unwrap())
            .unwrap();
        let lhs = n_s * f_s * (0.010_f64).sin();
        let eq4 = |t: f64| n_i * f_i * t.sin() - lhs;
        let oracle = crate::numeric::bisect(eq4, 0.0, 0.3, 1e-16, 0.0);
        assert_relative_eq!(got, oracle, max_relative = 1e-12);
        // frozen from the pre-build oracle script
        assert_relative_eq!(got, 0.012484621833777387, max_relative = 1e-10);
    }

    #[test]
    fn conjugate_angle_no_solution() {
        let (c, p) = setup();
        // deep detuning: idler wave number is small, large signal angle fails
        let omega_s = p.omega_signal(400e12);
        assert!(matches!(
            conjugate_angle(omega_s, 0.15, &c, &p),
            Err(Error::NoConjugateAngle { .. })
        ));
    }

    #[test]
    fn mismatch_vanishes_at_degenerate_collinear_point() {
        let (c, p) = setup();
        let dz = longitudinal_mismatch(p.omega_signal(0.0), 0.0, &c, &p).unwrap();
        let bound = 1e-6 * TAU / c.length;
        assert!(dz.abs() < bound, "dz = {dz}, bound = {bound}");
    }

    #[test]
    fn mismatch_matches_wave_number_oracle_at_100_thz() {
        let (c, p) = setup();
        let got = longitudinal_mismatch(p.omega_signal(100e12), 0.0, &c, &p).unwrap();
        // independent route: assemble the three collinear wave numbers by hand
        let f0 = p.degenerate_frequency();
        let (f_s, f_i) = (f0 + 100e12, f0 - 100e12);
        let n = |f: f64| {
            c.index_ordinary(Wavelength::from_meters(SPEED_OF_LIGHT / f).unwrap())
                .unwrap()
        };
        let n_p = c
            .index_extraordinary(p.wavelength, c.cut_angle)
            .unwrap();
        let oracle =
            TAU * (n_p * p.frequency() - n(f_s) * f_s - n(f_i) * f_i) / SPEED_OF_LIGHT;
        assert_relative_eq!(got, oracle, max_relative = 1e-10);
        // frozen from the pre-build oracle script
        assert_relative_eq!(got, -39103.86372494325, max_relative = 1e-9);
    }

    #[test]
    fn exchange_symmetry_of_intensity() {
        let (c, p) = setup();
        for &(nu, th_int) in &[(30e12, 4e-3), (80e12, 12e-3), (-60e12, 20e-3)] {
            let omega_s = p.omega_signal(nu);
            let th_i = conjugate_angle(omega_s, th_int, &c, &p).unwrap();
            let dz_a = longitudinal_mismatch(omega_s, th_int, &c, &p).unwrap();
            let dz_b = longitudinal_mismatch(p.omega_signal(-nu), th_i, &c, &p).unwrap();
            let ia = sinc(dz_a * c.length / 2.0).powi(2);
            let ib = sinc(dz_b * c.length / 2.0).powi(2);
            assert_relative_eq!(ia, ib, max_relative = 1e-9);
        }
    }

    #[test]
    fn grid_peak_and_sinc_zero() {
        let (c, p) = setup();
        let g = intensity_grid(&c, &p, (-50e12, 50e12), (-2e-2, 2e-2), (101, 41)).unwrap();
        // the degenerate collinear point is on this grid and is its maximum
        let i_nu = 50;
        let i_th = 20;
        assert_relative_eq!(g.value(i_nu, i_th), 1.0, epsilon = 1e-12);
        assert!((g.raw_max - 1.0).abs() < 1e-9);
        // first sinc zero: find the collinear detuning where dz L/2 = -pi
        let target = -2.0 * PI / c.length;
        let f = |nu: f64| longitudinal_mismatch(p.omega_signal(nu), 0.0, &c, &p).unwrap() - target;
        let nu_zero = crate::numeric::bisect(f, 1e12, 80e12, 1.0, 0.0);
        let v = plane_wave_intensity(&c, &p, nu_zero, 0.0);
        assert!(v < 1e-18, "sinc zero not reproduced: {v}");
    }

    #[test]
    fn grid_rejects_empty_ranges() {
        let (c, p) = setup();
        assert!(matches!(
            intensity_grid(&c, &p, (1e12, 1e12), (-1e-2, 1e-2), (10, 10)),
            Err(Error::EmptyRange { .. })
        ));
        assert!(matches!(
            intensity_grid(&c, &p, (-1e12, 1e12), (1e-2, -1e-2), (10, 10)),
            Err(Error::EmptyRange { .. })
        ));
    }

    #[test]
    fn branch_passes_through_origin() {
        let (c, p) = setup();
        let mut prev = f64::INFINITY;
        for &nu in &[40e12, 20e12, 10e12, 5e12, 2e12] {
            let th = branch_angle_external(&c, &p, nu).unwrap();
            assert!(th < prev, "branch angle not shrinking toward origin");
            prev = th;
        }
        assert!(prev < 2e-2);
        // sign change of the mismatch across the branch along a theta column
        let nu = 25e12;
        let th_branch = branch_angle_external(&c, &p, nu).unwrap();
        let om = p.omega_signal(nu);
        let int_lo = c
            .internal_angle(Wavelength::from_angular_frequency(om).unwrap(), th_branch * 0.9)
            .unwrap();
        let int_hi = c
            .internal_angle(Wavelength::from_angular_frequency(om).unwrap(), th_branch * 1.1)
            .unwrap();
        let a = longitudinal_mismatch(om, int_lo, &c, &p).unwrap();
        let b = longitudinal_mismatch(om, int_hi, &c, &p).unwrap();
        assert!(a < 0.0 && b > 0.0, "no sign change across branch: {a} {b}");
    }

    #[test]
    fn branch_extent_matches_oracle() {
        let (c, p) = setup();
        let (lo, hi) = branch_extent(&c, &p, 9.5_f64.to_radians()).unwrap();
        // frozen from the pre-build oracle script
        assert_relative_eq!(lo, -145.225e12, max_relative = 5e-3);
        assert_relative_eq!(hi, 432.93e12, max_relative = 5e-3);
    }

    #[test]
    fn grid_resolution_halving_keeps_branch_positions() {
        let (c, p) = setup();
        // the branch stays inside this window over the whole detuning range,
        // so each column's maximum is the main phase-matching lobe
        let nu_range = (-100e12, 100e12);
        let th_range = (0.0, 0.12);
        let coarse = intensity_grid(&c, &p, nu_range, th_range, (41, 61)).unwrap();
        let fine = intensity_grid(&c, &p, nu_range, th_range, (81, 121)).unwrap();
        let coarse_cell = coarse.external_angle_rad[1] - coarse.external_angle_rad[0];
        for (i_c, &nu) in coarse.detuning_hz.iter().enumerate() {
            let argmax = |g: &SpectralAngularGrid, i_nu: usize| {
                let n = g.external_angle_rad.len();
                let mut best = 0;
                for j in 0..n {
                    if g.value(i_nu, j) > g.value(i_nu, best) {
                        best = j;
                    }
                }
                (g.value(i_nu, best) > 0.0).then(|| g.external_angle_rad[best])
            };
            let i_f = fine
                .detuning_hz
                .iter()
                .position(|&x| (x - nu).abs() < 1e6)
                .unwrap();
            if let (Some(tc), Some(tf)) = (argmax(&coarse, i_c), argmax(&fine, i_f)) {
                assert!(
                    (tc - tf).abs() <= coarse_cell + 1e-12,
                    "branch moved by more than a coarse cell at nu = {nu}"
                );
            }
        }
    }
}
