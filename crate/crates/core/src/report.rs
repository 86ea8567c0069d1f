//! The summary pipeline: initial and transformed spectra, their bandwidths
//! and correlation times, and the central spectral-intensity ratios.

use crate::config::RunConfig;
use crate::error::Result;
use crate::grating::EfficiencyMode;
use crate::spectra::{
    bandwidth, correlation_function_padded, correlation_time, initial_spectrum,
    transformed_spectrum, Spectrum,
};
use serde::Serialize;

/// One value per spectrum variant.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VariantValues {
    pub initial: f64,
    pub transformed_ideal: f64,
    pub transformed_anchored: f64,
}

/// Everything the `report` subcommand writes to JSON.
#[derive(Debug, Clone, Serialize)]
pub struct ReportSummary {
    /// Integral bandwidths, Hz.
    pub bandwidth_hz: VariantValues,
    /// Correlation times, s.
    pub correlation_time_s: VariantValues,
    /// Transformed-over-initial central spectral value, lossless grating.
    pub central_ratio_ideal: f64,
    /// Transformed-over-initial central spectral value with the anchored
    /// efficiency model.
    pub central_ratio_anchored: f64,
    /// Squared single-photon efficiency at the reference wavelength, the
    /// model prediction for `central_ratio_anchored`.
    pub central_efficiency_product: f64,
    /// Initial over transformed-anchored bandwidth.
    pub broadening_factor_anchored: f64,
}

/// Spectra computed once and shared by the report metrics.
pub struct ReportSpectra {
    pub initial: Spectrum,
    pub transformed_ideal: Spectrum,
    pub transformed_anchored: Spectrum,
}

pub fn compute_spectra(cfg: &RunConfig) -> Result<ReportSpectra> {
    let transformed_ideal = transformed_spectrum(cfg, EfficiencyMode::Ideal)?;
    let transformed_anchored = crate::spectra::anchored_from_ideal(cfg, &transformed_ideal)?;
    Ok(ReportSpectra {
        initial: initial_spectrum(cfg)?,
        transformed_ideal,
        transformed_anchored,
    })
}

/// Run the full summary pipeline on one configuration.
pub fn run_report(cfg: &RunConfig) -> Result<ReportSummary> {
    let spectra = compute_spectra(cfg)?;
    summarize(cfg, &spectra)
}

/// Metrics for already-computed spectra.
pub fn summarize(cfg: &RunConfig, spectra: &ReportSpectra) -> Result<ReportSummary> {
    let pad = cfg.grids.g2_padding_factor;
    let tau = |s: &Spectrum| -> Result<f64> {
        Ok(correlation_time(&correlation_function_padded(s, pad)?))
    };
    let bw_initial = bandwidth(&spectra.initial)?;
    let bw_ideal = bandwidth(&spectra.transformed_ideal)?;
    let bw_anchored = bandwidth(&spectra.transformed_anchored)?;
    let e_ref = {
        let anchored = crate::grating::GratingSpec::new(
            cfg.grating.groove_density,
            cfg.grating.incidence_angle,
            cfg.grating.magnification,
            cfg.grating.efficiency_anchors.clone(),
            EfficiencyMode::Anchored,
        )?;
        anchored.efficiency(cfg.fiber.reference_wavelength.meters())
    };
    Ok(ReportSummary {
        bandwidth_hz: VariantValues {
            initial: bw_initial,
            transformed_ideal: bw_ideal,
            transformed_anchored: bw_anchored,
        },
        correlation_time_s: VariantValues {
            initial: tau(&spectra.initial)?,
            transformed_ideal: tau(&spectra.transformed_ideal)?,
            transformed_anchored: tau(&spectra.transformed_anchored)?,
        },
        central_ratio_ideal: spectra.transformed_ideal.meta.central_value
            / spectra.initial.meta.central_value,
        central_ratio_anchored: spectra.transformed_anchored.meta.central_value
            / spectra.initial.meta.central_value,
        central_efficiency_product: e_ref * e_ref,
        broadening_factor_anchored: bw_initial / bw_anchored,
    })
}
