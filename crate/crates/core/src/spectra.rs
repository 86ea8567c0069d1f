//! Coincidence spectra and their integral metrics: the equivalent-width
//! bandwidth (spectrum area over central value), the second-order correlation
//! function obtained by Fourier transforming the pair amplitude, and the
//! correlation time (the same equivalent-width metric applied to G2).

use crate::collection::{collection_waist, coincidence_amplitude, CollectionModes};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::grating::{EfficiencyMode, GratingSpec};
use crate::numeric::{interp_cubic, trapezoid};
use crate::units::{wavelength_of_frequency, SPEED_OF_LIGHT};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::TAU;

/// Normalization bookkeeping for a sampled spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumMeta {
    /// Largest raw sample value.
    pub raw_peak: f64,
    /// Raw value at zero detuning (cubic-interpolated if 0 is off-grid).
    pub central_value: f64,
}

/// A coincidence spectrum R(nu) on a uniform detuning grid.
///
/// `amplitude` is the complex pair amplitude the rate was derived from
/// (R = delta_omega |F|^2), kept so the correlation function can use the
/// model's actual spectral amplitude including its sign structure. Spectra
/// built from bare rate samples carry no amplitude and fall back to the
/// flat-phase square root.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub detuning_hz: Vec<f64>,
    pub rate: Vec<f64>,
    pub amplitude: Option<Vec<Complex64>>,
    pub meta: SpectrumMeta,
}

impl Spectrum {
    /// Build from samples on a uniform grid, computing the normalization
    /// metadata.
    pub fn new(
        detuning_hz: Vec<f64>,
        rate: Vec<f64>,
        amplitude: Option<Vec<Complex64>>,
    ) -> Result<Self> {
        if detuning_hz.len() < 4 || detuning_hz.len() != rate.len() {
            return Err(Error::invalid(
                "spectrum",
                "need at least 4 samples with matching axes",
            ));
        }
        if let Some(a) = &amplitude {
            if a.len() != rate.len() {
                return Err(Error::invalid("spectrum.amplitude", "length mismatch"));
            }
        }
        let step = detuning_hz[1] - detuning_hz[0];
        if !(step > 0.0) {
            return Err(Error::invalid("spectrum.grid", "must be increasing"));
        }
        for w in detuning_hz.windows(2) {
            if ((w[1] - w[0]) - step).abs() > 1e-6 * step {
                return Err(Error::invalid("spectrum.grid", "must be uniform"));
            }
        }
        if rate.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::invalid("spectrum.rate", "must be finite and nonnegative"));
        }
        let raw_peak = rate.iter().cloned().fold(0.0, f64::max);
        let central_value = central_value(&detuning_hz, &rate);
        Ok(Spectrum {
            detuning_hz,
            rate,
            amplitude,
            meta: SpectrumMeta {
                raw_peak,
                central_value,
            },
        })
    }

    pub fn step_hz(&self) -> f64 {
        self.detuning_hz[1] - self.detuning_hz[0]
    }
}

fn central_value(detuning: &[f64], rate: &[f64]) -> f64 {
    let step = detuning[1] - detuning[0];
    if let Some(i) = detuning.iter().position(|&x| x.abs() < 1e-9 * step) {
        rate[i]
    } else {
        interp_cubic(detuning, rate, 0.0)
    }
}

/// A normalized second-order correlation function G2(tau) on a uniform delay
/// grid symmetric about zero, with G2(0) = 1.
#[derive(Debug, Clone)]
pub struct CorrelationFunction {
    pub delay_s: Vec<f64>,
    pub g2: Vec<f64>,
}

impl CorrelationFunction {
    pub fn step_s(&self) -> f64 {
        self.delay_s[1] - self.delay_s[0]
    }

    fn zero_index(&self) -> usize {
        self.delay_s.len() / 2
    }
}

/// How one detuning sample is collected.
enum ModeGeometry {
    Collinear,
    Grating,
}

/// Rates and amplitudes over the configured detuning grid for a given
/// collection geometry; entries where the pair cannot be collected
/// (evanescent order, dispersion out of range, missing idler) are zero.
fn assemble(cfg: &RunConfig, geometry: ModeGeometry) -> Result<Spectrum> {
    let grid = cfg.spectrum_grid();
    let pump = &cfg.pump;
    let f_p = pump.frequency();
    let d_omega = cfg.detection_bandwidth_angular();
    let mut rate = vec![0.0; grid.len()];
    let mut amp = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (i, &nu) in grid.iter().enumerate() {
        let omega_s = pump.omega_signal(nu);
        let f_s = omega_s / TAU;
        let f_i = f_p - f_s;
        if f_s <= 0.0 || f_i <= 0.0 {
            continue;
        }
        let angles = match geometry {
            ModeGeometry::Collinear => Some((0.0, 0.0)),
            ModeGeometry::Grating => {
                let ts = cfg.grating.angle_for_frequency(omega_s);
                let ti = cfg.grating.angle_for_frequency(TAU * f_i);
                match (ts, ti) {
                    (Ok(a), Ok(b)) => Some((a, b)),
                    (Err(Error::EvanescentOrder { .. }), _)
                    | (_, Err(Error::EvanescentOrder { .. })) => None,
                    (Err(e), _) | (_, Err(e)) => return Err(e),
                }
            }
        };
        let Some((theta_s, theta_i)) = angles else {
            continue;
        };
        let w_s = collection_waist(wavelength_of_frequency(f_s)?, &cfg.fiber);
        let w_i = collection_waist(wavelength_of_frequency(f_i)?, &cfg.fiber);
        let modes = CollectionModes::new(theta_s, theta_i, w_s, w_i, pump.waist, d_omega)?;
        match coincidence_amplitude(omega_s, &modes, &cfg.crystal, pump) {
            Ok(a) => {
                amp[i] = a;
                rate[i] = d_omega * a.norm_sqr();
            }
            Err(
                Error::SellmeierOutOfRange { .. }
                | Error::NoConjugateAngle { .. }
                | Error::TotalInternalReflection { .. },
            ) => {}
            Err(e) => return Err(e),
        }
    }
    Spectrum::new(grid, rate, Some(amp))
}

/// Coincidence spectrum with both photons collected on the pump axis (the
/// grating replaced by a unit-reflectance mirror).
pub fn initial_spectrum(cfg: &RunConfig) -> Result<Spectrum> {
    assemble(cfg, ModeGeometry::Collinear)
}

/// Coincidence spectrum with the collection angles of both photons set by the
/// grating dispersion relation. `Anchored` additionally weights each pair by
/// the product of single-photon diffraction efficiencies.
pub fn transformed_spectrum(cfg: &RunConfig, mode: EfficiencyMode) -> Result<Spectrum> {
    let ideal = assemble(cfg, ModeGeometry::Grating)?;
    match mode {
        EfficiencyMode::Ideal => Ok(ideal),
        EfficiencyMode::Anchored => anchored_from_ideal(cfg, &ideal),
    }
}

/// Reweight an ideal-mode transformed spectrum by the anchored pair
/// efficiency, reusing the already-computed overlap amplitudes.
pub(crate) fn anchored_from_ideal(cfg: &RunConfig, ideal: &Spectrum) -> Result<Spectrum> {
    let anchored_grating = GratingSpec::new(
        cfg.grating.groove_density,
        cfg.grating.incidence_angle,
        cfg.grating.magnification,
        cfg.grating.efficiency_anchors.clone(),
        EfficiencyMode::Anchored,
    )?;
    Ok(apply_pair_efficiency(cfg, ideal, &anchored_grating))
}

fn apply_pair_efficiency(cfg: &RunConfig, ideal: &Spectrum, grating: &GratingSpec) -> Spectrum {
    let mut rate = Vec::with_capacity(ideal.rate.len());
    let mut amp = Vec::with_capacity(ideal.rate.len());
    let amps = ideal.amplitude.as_ref();
    for (i, &nu) in ideal.detuning_hz.iter().enumerate() {
        let pe = grating.pair_efficiency(cfg.pump.omega_signal(nu), &cfg.pump);
        rate.push(ideal.rate[i] * pe);
        if let Some(a) = amps {
            amp.push(a[i] * pe.sqrt());
        }
    }
    Spectrum::new(
        ideal.detuning_hz.clone(),
        rate,
        amps.map(|_| amp),
    )
    .expect("reweighted spectrum keeps the valid grid")
}

/// Integral (equivalent-width) bandwidth: area of R over its central value.
pub fn bandwidth(s: &Spectrum) -> Result<f64> {
    let r0 = s.meta.central_value;
    if !(r0 > 0.0) {
        return Err(Error::UndefinedBandwidth);
    }
    Ok(trapezoid(&s.detuning_hz, &s.rate) / r0)
}

/// Default zero-padding factor for the correlation transform.
pub const DEFAULT_G2_PADDING: usize = 16;

/// Second-order correlation function G2(tau) = |integral F(nu) e^{-i 2 pi nu
/// tau} d nu|^2, normalized to G2(0) = 1.
///
/// Uses the spectrum's stored complex amplitude when present (the
/// Fourier-limited model amplitude, including its sign structure at
/// phase-matching zeros); otherwise takes F = sqrt(R) with flat phase. The
/// transform runs on a zero-padded grid with at least the requested padding
/// factor, rounded up to a power of two.
pub fn correlation_function_padded(s: &Spectrum, padding: usize) -> Result<CorrelationFunction> {
    if padding < 8 {
        return Err(Error::invalid("padding", "zero-padding factor must be >= 8"));
    }
    let n = s.rate.len();
    let field: Vec<Complex64> = match &s.amplitude {
        Some(a) => a.clone(),
        None => s
            .rate
            .iter()
            .map(|&r| Complex64::new(r.sqrt(), 0.0))
            .collect(),
    };
    let n_pad = (padding * n).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); n_pad];
    buf[..n].copy_from_slice(&field);
    FftPlanner::new().plan_fft_forward(n_pad).process(&mut buf);
    // shift so tau runs symmetrically through zero; drop the unpaired
    // most-negative delay sample
    let d_tau = 1.0 / (n_pad as f64 * s.step_hz());
    let half = n_pad / 2;
    let mut delay_s = Vec::with_capacity(n_pad - 1);
    let mut g2 = Vec::with_capacity(n_pad - 1);
    for k in 1..n_pad {
        let tau_index = k as i64 - half as i64;
        delay_s.push(tau_index as f64 * d_tau);
        g2.push(buf[(k + half) % n_pad].norm_sqr());
    }
    let center = half - 1;
    let g0 = g2[center];
    if !(g0 > 0.0) {
        return Err(Error::UndefinedBandwidth);
    }
    for v in &mut g2 {
        *v /= g0;
    }
    Ok(CorrelationFunction { delay_s, g2 })
}

/// [`correlation_function_padded`] with the default padding factor.
pub fn correlation_function(s: &Spectrum) -> Result<CorrelationFunction> {
    correlation_function_padded(s, DEFAULT_G2_PADDING)
}

/// Equivalent-width correlation time: area of G2 over its zero-delay value.
pub fn correlation_time(g: &CorrelationFunction) -> f64 {
    trapezoid(&g.delay_s, &g.g2) / g.g2[g.zero_index()]
}

/// Restrict a correlation function to |tau| <= half_range for export.
pub fn trim_correlation(g: &CorrelationFunction, half_range_s: f64) -> CorrelationFunction {
    let keep: Vec<usize> = (0..g.delay_s.len())
        .filter(|&i| g.delay_s[i].abs() <= half_range_s + 1e-30)
        .collect();
    CorrelationFunction {
        delay_s: keep.iter().map(|&i| g.delay_s[i]).collect(),
        g2: keep.iter().map(|&i| g.g2[i]).collect(),
    }
}

/// Wavelength (meters) of the photon at detuning `nu` from the degenerate
/// frequency. Utility for exports.
pub fn wavelength_at_detuning(cfg: &RunConfig, nu: f64) -> f64 {
    SPEED_OF_LIGHT / (cfg.pump.degenerate_frequency() + nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::default_config;
    use approx::assert_relative_eq;

    fn rect_spectrum(b: f64, dnu: f64) -> Spectrum {
        // rect of full width b centered on zero, on a grid 3x wider; the grid
        // is offset half a step so the edges fall between samples and the
        // trapezoid rule integrates the rectangle exactly
        let half = (1.5 * b / dnu).round() as i64;
        let detuning: Vec<f64> = (-half..half).map(|i| (i as f64 + 0.5) * dnu).collect();
        let rate: Vec<f64> = detuning
            .iter()
            .map(|&nu| if nu.abs() < b / 2.0 { 1.0 } else { 0.0 })
            .collect();
        Spectrum::new(detuning, rate, None).unwrap()
    }

    fn gaussian_spectrum(sigma: f64, dnu: f64, offset: f64) -> Spectrum {
        let half = (8.0 * sigma / dnu).round() as i64;
        let detuning: Vec<f64> = (-half..=half).map(|i| i as f64 * dnu + offset).collect();
        let rate: Vec<f64> = detuning
            .iter()
            .map(|&nu| (-nu * nu / (2.0 * sigma * sigma)).exp())
            .collect();
        Spectrum::new(detuning, rate, None).unwrap()
    }

    #[test]
    fn rect_bandwidth_is_exact_width() {
        let b = 40e12;
        let s = rect_spectrum(b, b / 500.0);
        assert_relative_eq!(bandwidth(&s).unwrap(), b, max_relative = 1e-12);
    }

    #[test]
    fn gaussian_bandwidth_matches_analytic_integral() {
        let sigma = 15e12;
        let s = gaussian_spectrum(sigma, sigma / 60.0, 0.0);
        assert_relative_eq!(
            bandwidth(&s).unwrap(),
            (TAU).sqrt() * sigma,
            max_relative = 1e-4
        );
    }

    #[test]
    fn gaussian_bandwidth_with_offgrid_center_uses_interpolation() {
        let sigma = 15e12;
        let s = gaussian_spectrum(sigma, sigma / 60.0, sigma / 150.0);
        assert!(!s.detuning_hz.iter().any(|&x| x == 0.0));
        assert_relative_eq!(
            bandwidth(&s).unwrap(),
            (TAU).sqrt() * sigma,
            max_relative = 1e-4
        );
    }

    #[test]
    fn rect_correlation_is_sinc_squared() {
        let b = 40e12;
        let s = rect_spectrum(b, b / 500.0);
        let g = correlation_function(&s).unwrap();
        // first zero at tau = 1/B
        let tau0 = 1.0 / b;
        let at = |tau: f64| {
            let i = g
                .delay_s
                .iter()
                .position(|&t| (t - tau).abs() <= g.step_s() / 2.0)
                .unwrap();
            g.g2[i]
        };
        assert!(at(tau0) < 2e-3, "G2 at the first sinc zero: {}", at(tau0));
        assert_relative_eq!(correlation_time(&g), 1.0 / b, max_relative = 1e-3);
        // time-bandwidth product exactly 1 for a rectangle
        let product = bandwidth(&s).unwrap() * correlation_time(&g);
        assert_relative_eq!(product, 1.0, max_relative = 1e-3);
    }

    #[test]
    fn gaussian_time_bandwidth_product_is_half() {
        let sigma = 15e12;
        let s = gaussian_spectrum(sigma, sigma / 60.0, 0.0);
        let g = correlation_function(&s).unwrap();
        assert_relative_eq!(
            correlation_time(&g),
            1.0 / ((8.0 * std::f64::consts::PI).sqrt() * sigma),
            max_relative = 1e-3
        );
        let product = bandwidth(&s).unwrap() * correlation_time(&g);
        assert_relative_eq!(product, 0.5, max_relative = 1e-3);
    }

    #[test]
    fn g2_is_even_and_unit_at_zero() {
        let s = rect_spectrum(40e12, 0.1e12);
        let g = correlation_function(&s).unwrap();
        let z = g.delay_s.len() / 2;
        assert_eq!(g.delay_s[z], 0.0);
        assert_eq!(g.g2[z], 1.0);
        for k in 1..z {
            assert_relative_eq!(g.g2[z - k], g.g2[z + k], max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn doubling_padding_barely_moves_correlation_time() {
        let s = gaussian_spectrum(15e12, 0.5e12, 0.0);
        let a = correlation_time(&correlation_function_padded(&s, 16).unwrap());
        let b = correlation_time(&correlation_function_padded(&s, 32).unwrap());
        assert!((a - b).abs() / a < 1e-3, "padding sensitivity: {a} vs {b}");
    }

    #[test]
    fn metrics_invariant_under_uniform_rescaling() {
        let s = gaussian_spectrum(15e12, 0.25e12, 0.0);
        let scaled = Spectrum::new(
            s.detuning_hz.clone(),
            s.rate.iter().map(|r| 7.3 * r).collect(),
            None,
        )
        .unwrap();
        assert_relative_eq!(
            bandwidth(&s).unwrap(),
            bandwidth(&scaled).unwrap(),
            max_relative = 1e-12
        );
        let ta = correlation_time(&correlation_function(&s).unwrap());
        let tb = correlation_time(&correlation_function(&scaled).unwrap());
        assert_relative_eq!(ta, tb, max_relative = 1e-12);
    }

    #[test]
    fn zero_central_value_is_an_error() {
        let n = 101;
        let detuning: Vec<f64> = (0..n).map(|i| (i as f64 - 50.0) * 1e12).collect();
        let rate: Vec<f64> = detuning
            .iter()
            .map(|&nu| if nu.abs() > 30e12 { 1.0 } else { 0.0 })
            .collect();
        let s = Spectrum::new(detuning, rate, None).unwrap();
        assert!(matches!(bandwidth(&s), Err(Error::UndefinedBandwidth)));
    }

    #[test]
    fn nonuniform_grid_rejected() {
        let detuning = vec![0.0, 1.0, 2.5, 3.0];
        let rate = vec![1.0; 4];
        assert!(Spectrum::new(detuning, rate, None).is_err());
    }

    #[test]
    fn initial_spectrum_peaks_at_zero_detuning() {
        let cfg = default_config();
        let s = initial_spectrum(&cfg).unwrap();
        let i0 = s
            .detuning_hz
            .iter()
            .position(|&x| x.abs() < 1e-3)
            .unwrap();
        assert_relative_eq!(s.rate[i0], s.meta.raw_peak, max_relative = 1e-12);
        assert_relative_eq!(s.meta.central_value, s.meta.raw_peak, max_relative = 1e-12);
    }

    #[test]
    fn transformed_matches_initial_at_center_in_ideal_mode() {
        let cfg = default_config();
        let s_in = initial_spectrum(&cfg).unwrap();
        let s_tr = transformed_spectrum(&cfg, EfficiencyMode::Ideal).unwrap();
        assert_relative_eq!(
            s_tr.meta.central_value / s_in.meta.central_value,
            1.0,
            max_relative = 1e-9
        );
    }

    #[test]
    fn anchored_center_carries_squared_efficiency() {
        let cfg = default_config();
        let ideal = transformed_spectrum(&cfg, EfficiencyMode::Ideal).unwrap();
        let anch = transformed_spectrum(&cfg, EfficiencyMode::Anchored).unwrap();
        let e650 = 0.52; // linear interpolation of the stock anchors at 650 nm
        assert_relative_eq!(
            anch.meta.central_value / ideal.meta.central_value,
            e650 * e650,
            max_relative = 1e-9
        );
    }

    #[test]
    fn transformed_spectrum_vanishes_where_idler_order_is_evanescent() {
        let cfg = default_config();
        let s = transformed_spectrum(&cfg, EfficiencyMode::Ideal).unwrap();
        // beyond ~332 THz the idler wavelength exceeds the grating's passing
        // band and the pair cannot be collected
        for (nu, r) in s.detuning_hz.iter().zip(&s.rate) {
            if nu.abs() > 340e12 {
                assert_eq!(*r, 0.0, "expected dark sample at {nu}");
            }
        }
        assert!(s.rate.iter().any(|&r| r > 0.0));
    }
}
