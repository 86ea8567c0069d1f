//! Design-space exploration: collection-waist sweeps, grating-magnification
//! optimization, and the rate-versus-waist scaling law.
//!
//! Sweeps hold the matched-waist condition: at each sample the signal and
//! idler collection waists equal W at the reference wavelength (the train
//! magnification is re-solved) and the pump waist is W / sqrt(2).

use crate::collection::{coincidence_rate, select_gamma_train, CollectionModes};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::grating::EfficiencyMode;
use crate::numeric::{golden_section_max, linear_fit_slope};
use crate::spectra::{anchored_from_ideal, bandwidth, transformed_spectrum};
use std::cell::RefCell;

/// One named objective column of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveColumn {
    pub name: String,
    pub values: Vec<f64>,
}

/// A sampled one-dimensional sweep with one value per objective per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter_name: String,
    pub parameter_unit: String,
    pub parameter_values: Vec<f64>,
    pub objectives: Vec<ObjectiveColumn>,
}

impl SweepResult {
    fn validate(&self) -> Result<()> {
        if self.parameter_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sweep", "parameter axis must be strictly increasing"));
        }
        for o in &self.objectives {
            if o.values.len() != self.parameter_values.len() {
                return Err(Error::invalid("sweep", "objective column length mismatch"));
            }
        }
        Ok(())
    }
}

/// Result of the magnification optimization.
#[derive(Debug, Clone)]
pub struct GammaOptimum {
    pub gamma: f64,
    pub bandwidth_hz: f64,
    /// All objective evaluations made by the search, sorted by gamma.
    pub trace: SweepResult,
    /// True when the optimum sits on the bracket edge (no interior maximum).
    pub boundary_warning: bool,
}

/// Rate sweep samples plus the fitted log-log scaling exponent.
#[derive(Debug, Clone)]
pub struct RateScaling {
    pub sweep: SweepResult,
    pub loglog_slope: f64,
}

/// Re-solve the dependent quantities for a collection waist `w` at the
/// reference wavelength: Gamma and the pump waist.
pub fn config_for_waist(cfg: &RunConfig, w: f64) -> RunConfig {
    let mut out = cfg.clone();
    out.fiber.magnification = select_gamma_train(
        w,
        cfg.fiber.reference_wavelength,
        cfg.fiber.numerical_aperture,
    );
    out.pump.waist = w / 2.0_f64.sqrt();
    out
}

/// Evenly spaced waist samples from the configured sweep range.
pub fn sweep_waist_samples(cfg: &RunConfig) -> Vec<f64> {
    let g = &cfg.grids;
    let n = g.sweep_waist_samples;
    (0..n)
        .map(|i| {
            g.sweep_waist_min_m
                + (g.sweep_waist_max_m - g.sweep_waist_min_m) * i as f64 / (n - 1) as f64
        })
        .collect()
}

/// Log-spaced waist samples from the configured rate-scaling range.
pub fn rate_waist_samples(cfg: &RunConfig) -> Vec<f64> {
    let g = &cfg.grids;
    let n = g.rate_waist_samples;
    let (lo, hi) = (g.rate_waist_min_m.ln(), g.rate_waist_max_m.ln());
    (0..n)
        .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Transformed-spectrum bandwidth in both efficiency modes across collection
/// waists.
pub fn waist_sweep(cfg: &RunConfig, waists: &[f64]) -> Result<SweepResult> {
    if waists.len() < 2 {
        return Err(Error::EmptyRange { axis: "waist" });
    }
    let mut ideal = Vec::with_capacity(waists.len());
    let mut anchored = Vec::with_capacity(waists.len());
    for &w in waists {
        let local = config_for_waist(cfg, w);
        let s_ideal = transformed_spectrum(&local, EfficiencyMode::Ideal)?;
        let s_anch = anchored_from_ideal(&local, &s_ideal)?;
        ideal.push(bandwidth(&s_ideal)?);
        anchored.push(bandwidth(&s_anch)?);
    }
    let result = SweepResult {
        parameter_name: "collection_waist".to_string(),
        parameter_unit: "m".to_string(),
        parameter_values: waists.to_vec(),
        objectives: vec![
            ObjectiveColumn {
                name: "bandwidth_ideal_hz".to_string(),
                values: ideal,
            },
            ObjectiveColumn {
                name: "bandwidth_anchored_hz".to_string(),
                values: anchored,
            },
        ],
    };
    result.validate()?;
    Ok(result)
}

/// Golden-section maximization of the transformed ideal bandwidth over the
/// relay magnification gamma. Bracket tolerance 1e-3 on gamma.
pub fn optimize_gamma(cfg: &RunConfig, gamma_range: (f64, f64)) -> Result<GammaOptimum> {
    let (lo, hi) = gamma_range;
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::EmptyRange { axis: "gamma" });
    }
    let evaluations: RefCell<Vec<(f64, f64)>> = RefCell::new(Vec::new());
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let objective = |gamma: f64| -> f64 {
        let mut local = cfg.clone();
        local.grating.magnification = gamma;
        let value = transformed_spectrum(&local, EfficiencyMode::Ideal)
            .and_then(|s| bandwidth(&s));
        match value {
            Ok(v) => {
                evaluations.borrow_mut().push((gamma, v));
                v
            }
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                f64::NEG_INFINITY
            }
        }
    };
    let (gamma, best) = golden_section_max(objective, lo, hi, 1e-3);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let mut trace: Vec<(f64, f64)> = evaluations.into_inner();
    trace.sort_by(|a, b| a.0.total_cmp(&b.0));
    trace.dedup_by(|a, b| a.0 == b.0);
    let boundary_warning = (gamma - lo).abs() < 2e-3 || (hi - gamma).abs() < 2e-3;
    Ok(GammaOptimum {
        gamma,
        bandwidth_hz: best,
        trace: SweepResult {
            parameter_name: "gamma".to_string(),
            parameter_unit: "1".to_string(),
            parameter_values: trace.iter().map(|p| p.0).collect(),
            objectives: vec![ObjectiveColumn {
                name: "bandwidth_ideal_hz".to_string(),
                values: trace.iter().map(|p| p.1).collect(),
            }],
        },
        boundary_warning,
    })
}

/// Peak (zero-detuning) coincidence rate per waist and the fitted log-log
/// slope of rate against waist.
pub fn rate_vs_waist(cfg: &RunConfig, waists: &[f64]) -> Result<RateScaling> {
    if waists.len() < 2 {
        return Err(Error::EmptyRange { axis: "waist" });
    }
    let mut rates = Vec::with_capacity(waists.len());
    for &w in waists {
        rates.push(peak_rate(&config_for_waist(cfg, w))?);
    }
    let log_w: Vec<f64> = waists.iter().map(|w| w.ln()).collect();
    let log_r: Vec<f64> = rates.iter().map(|r| r.ln()).collect();
    let slope = linear_fit_slope(&log_w, &log_r);
    let sweep = SweepResult {
        parameter_name: "collection_waist".to_string(),
        parameter_unit: "m".to_string(),
        parameter_values: waists.to_vec(),
        objectives: vec![ObjectiveColumn {
            name: "peak_rate_arb".to_string(),
            values: rates,
        }],
    };
    sweep.validate()?;
    Ok(RateScaling {
        sweep,
        loglog_slope: slope,
    })
}

/// Collinear degenerate coincidence rate for one configuration.
pub fn peak_rate(cfg: &RunConfig) -> Result<f64> {
    let w = crate::collection::collection_waist(cfg.fiber.reference_wavelength, &cfg.fiber);
    let modes = CollectionModes::new(
        0.0,
        0.0,
        w,
        w,
        cfg.pump.waist,
        cfg.detection_bandwidth_angular(),
    )?;
    coincidence_rate(
        cfg.pump.omega_signal(0.0),
        &modes,
        &cfg.crystal,
        &cfg.pump,
    )
}
