//! Run configuration: TOML schema, paper-default values, validation, and the
//! effective-config dump.
//!
//! The file format is TOML restricted to flat keys inside section headers.
//! Every key is optional; unspecified keys take the stock defaults (the
//! published source configuration: 325 nm pump with a 34 um waist, 2 mm BBO,
//! 600/mm grating with gamma = 1.05, 48 um collection waists at 650 nm,
//! efficiency anchors (500 nm, 0.25) and (750 nm, 0.70)). Three values are
//! derived when absent: the crystal cut angle, the grating incidence angle,
//! and the fiber-train magnification.

use crate::collection::{select_gamma_train, FiberTrainSpec};
use crate::crystal::{solve_cut_angle, CrystalSpec, Sellmeier, DEFAULT_VALIDITY_WINDOW};
use crate::error::{Error, Result};
use crate::grating::{solve_theta0, EfficiencyMode, GratingSpec};
use crate::phasematching::PumpSpec;
use crate::units::Wavelength;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

/// Sampling grids and search ranges for the pipelines.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub spectrum_min_hz: f64,
    pub spectrum_max_hz: f64,
    pub spectrum_step_hz: f64,
    pub xmap_detuning_min_hz: f64,
    pub xmap_detuning_max_hz: f64,
    pub xmap_detuning_samples: usize,
    pub xmap_angle_min_rad: f64,
    pub xmap_angle_max_rad: f64,
    pub xmap_angle_samples: usize,
    pub g2_padding_factor: usize,
    pub g2_delay_half_range_s: f64,
    pub sweep_waist_min_m: f64,
    pub sweep_waist_max_m: f64,
    pub sweep_waist_samples: usize,
    pub gamma_search_min: f64,
    pub gamma_search_max: f64,
    pub rate_waist_min_m: f64,
    pub rate_waist_max_m: f64,
    pub rate_waist_samples: usize,
}

/// Fully resolved and validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub crystal: CrystalSpec,
    pub pump: PumpSpec,
    pub fiber: FiberTrainSpec,
    pub grating: GratingSpec,
    /// Detection bandwidth delta_nu, Hz (enters rates as delta_omega).
    pub detection_bandwidth_hz: f64,
    pub grids: GridConfig,
    pub output_dir: PathBuf,
}

impl RunConfig {
    /// delta_omega in rad/s.
    pub fn detection_bandwidth_angular(&self) -> f64 {
        TAU * self.detection_bandwidth_hz
    }

    /// The uniform detuning grid for spectra, always containing 0.
    pub fn spectrum_grid(&self) -> Vec<f64> {
        let g = &self.grids;
        let n = ((g.spectrum_max_hz - g.spectrum_min_hz) / g.spectrum_step_hz).round() as usize + 1;
        (0..n)
            .map(|i| g.spectrum_min_hz + i as f64 * g.spectrum_step_hz)
            .collect()
    }
}

/// Where each effective value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Default,
    FromConfig,
    Derived,
}

impl Origin {
    fn label(self) -> &'static str {
        match self {
            Origin::Default => "default",
            Origin::FromConfig => "from config",
            Origin::Derived => "derived",
        }
    }
}

/// Per-key origin map for the effective-config dump.
pub type ConfigOrigins = BTreeMap<&'static str, Origin>;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    crystal: RawCrystal,
    #[serde(default)]
    pump: RawPump,
    #[serde(default)]
    fiber: RawFiber,
    #[serde(default)]
    grating: RawGrating,
    #[serde(default)]
    detection: RawDetection,
    #[serde(default)]
    grids: RawGrids,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCrystal {
    length_m: Option<f64>,
    cut_angle_rad: Option<f64>,
    walkoff_displacement_m: Option<f64>,
    sellmeier_o: Option<[f64; 4]>,
    sellmeier_e: Option<[f64; 4]>,
    validity_window_m: Option<[f64; 2]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPump {
    wavelength_m: Option<f64>,
    waist_m: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFiber {
    numerical_aperture: Option<f64>,
    reference_wavelength_m: Option<f64>,
    target_collection_waist_m: Option<f64>,
    magnification: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrating {
    groove_density_per_mm: Option<f64>,
    incidence_angle_rad: Option<f64>,
    magnification: Option<f64>,
    efficiency_mode: Option<EfficiencyMode>,
    efficiency_anchors: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetection {
    bandwidth_hz: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrids {
    spectrum_min_hz: Option<f64>,
    spectrum_max_hz: Option<f64>,
    spectrum_step_hz: Option<f64>,
    xmap_detuning_min_hz: Option<f64>,
    xmap_detuning_max_hz: Option<f64>,
    xmap_detuning_samples: Option<usize>,
    xmap_angle_min_rad: Option<f64>,
    xmap_angle_max_rad: Option<f64>,
    xmap_angle_samples: Option<usize>,
    g2_padding_factor: Option<usize>,
    g2_delay_half_range_s: Option<f64>,
    sweep_waist_min_m: Option<f64>,
    sweep_waist_max_m: Option<f64>,
    sweep_waist_samples: Option<usize>,
    gamma_search_min: Option<f64>,
    gamma_search_max: Option<f64>,
    rate_waist_min_m: Option<f64>,
    rate_waist_max_m: Option<f64>,
    rate_waist_samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    directory: Option<String>,
}

macro_rules! take {
    ($origins:expr, $key:literal, $opt:expr, $default:expr) => {
        match $opt {
            Some(v) => {
                $origins.insert($key, Origin::FromConfig);
                v
            }
            None => {
                $origins.insert($key, Origin::Default);
                $default
            }
        }
    };
}

fn resolve(raw: RawConfig) -> Result<(RunConfig, ConfigOrigins)> {
    let mut origins = ConfigOrigins::new();

    // pump
    let pump_lambda = take!(origins, "pump.wavelength_m", raw.pump.wavelength_m, 325e-9);
    let pump_waist = take!(origins, "pump.waist_m", raw.pump.waist_m, 34e-6);
    let pump = PumpSpec::new(Wavelength::from_meters(pump_lambda)?, pump_waist)?;

    // crystal
    let length = take!(origins, "crystal.length_m", raw.crystal.length_m, 2e-3);
    let walkoff = take!(
        origins,
        "crystal.walkoff_displacement_m",
        raw.crystal.walkoff_displacement_m,
        50e-6
    );
    let sell_o = take!(
        origins,
        "crystal.sellmeier_o",
        raw.crystal.sellmeier_o.map(|[a, b, c, d]| Sellmeier { a, b, c, d }),
        Sellmeier::BBO_ORDINARY
    );
    let sell_e = take!(
        origins,
        "crystal.sellmeier_e",
        raw.crystal.sellmeier_e.map(|[a, b, c, d]| Sellmeier { a, b, c, d }),
        Sellmeier::BBO_EXTRAORDINARY
    );
    let window = take!(
        origins,
        "crystal.validity_window_m",
        raw.crystal.validity_window_m.map(|[lo, hi]| (lo, hi)),
        DEFAULT_VALIDITY_WINDOW
    );
    let cut_angle = match raw.crystal.cut_angle_rad {
        Some(v) => {
            origins.insert("crystal.cut_angle_rad", Origin::FromConfig);
            v
        }
        None => {
            origins.insert("crystal.cut_angle_rad", Origin::Derived);
            let probe = CrystalSpec::new(length, sell_o, sell_e, 0.0, walkoff, window)?;
            solve_cut_angle(&probe, pump.wavelength)?
        }
    };
    let crystal = CrystalSpec::new(length, sell_o, sell_e, cut_angle, walkoff, window)?;

    // fiber train
    let na = take!(
        origins,
        "fiber.numerical_aperture",
        raw.fiber.numerical_aperture,
        0.12
    );
    let reference = take!(
        origins,
        "fiber.reference_wavelength_m",
        raw.fiber.reference_wavelength_m,
        650e-9
    );
    let reference = Wavelength::from_meters(reference)?;
    let target_waist = take!(
        origins,
        "fiber.target_collection_waist_m",
        raw.fiber.target_collection_waist_m,
        48e-6
    );
    if !(target_waist.is_finite() && target_waist > 0.0) {
        return Err(Error::invalid(
            "fiber.target_collection_waist_m",
            "must be positive",
        ));
    }
    let magnification = match raw.fiber.magnification {
        Some(v) => {
            origins.insert("fiber.magnification", Origin::FromConfig);
            v
        }
        None => {
            origins.insert("fiber.magnification", Origin::Derived);
            select_gamma_train(target_waist, reference, na)
        }
    };
    let fiber = FiberTrainSpec::new(na, magnification, reference)?;

    // grating
    let groove_per_mm = take!(
        origins,
        "grating.groove_density_per_mm",
        raw.grating.groove_density_per_mm,
        600.0
    );
    let groove_density = groove_per_mm * 1e3;
    let gamma = take!(origins, "grating.magnification", raw.grating.magnification, 1.05);
    let mode = take!(
        origins,
        "grating.efficiency_mode",
        raw.grating.efficiency_mode,
        EfficiencyMode::Anchored
    );
    let anchors = take!(
        origins,
        "grating.efficiency_anchors",
        raw.grating
            .efficiency_anchors
            .map(|v| v.into_iter().map(|[l, e]| (l, e)).collect()),
        vec![(500e-9, 0.25), (750e-9, 0.70)]
    );
    let incidence = match raw.grating.incidence_angle_rad {
        Some(v) => {
            origins.insert("grating.incidence_angle_rad", Origin::FromConfig);
            v
        }
        None => {
            origins.insert("grating.incidence_angle_rad", Origin::Derived);
            solve_theta0(groove_density, reference.meters())?
        }
    };
    let grating = GratingSpec::new(groove_density, incidence, gamma, anchors, mode)?;

    // detection
    let bandwidth = take!(
        origins,
        "detection.bandwidth_hz",
        raw.detection.bandwidth_hz,
        3.2e12
    );
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(Error::invalid("detection.bandwidth_hz", "must be positive"));
    }

    // grids
    let g = raw.grids;
    let grids = GridConfig {
        spectrum_min_hz: take!(origins, "grids.spectrum_min_hz", g.spectrum_min_hz, -350e12),
        spectrum_max_hz: take!(origins, "grids.spectrum_max_hz", g.spectrum_max_hz, 350e12),
        spectrum_step_hz: take!(origins, "grids.spectrum_step_hz", g.spectrum_step_hz, 0.5e12),
        xmap_detuning_min_hz: take!(
            origins,
            "grids.xmap_detuning_min_hz",
            g.xmap_detuning_min_hz,
            -200e12
        ),
        xmap_detuning_max_hz: take!(
            origins,
            "grids.xmap_detuning_max_hz",
            g.xmap_detuning_max_hz,
            500e12
        ),
        xmap_detuning_samples: take!(
            origins,
            "grids.xmap_detuning_samples",
            g.xmap_detuning_samples,
            1000
        ),
        xmap_angle_min_rad: take!(
            origins,
            "grids.xmap_angle_min_rad",
            g.xmap_angle_min_rad,
            (-10.0_f64).to_radians()
        ),
        xmap_angle_max_rad: take!(
            origins,
            "grids.xmap_angle_max_rad",
            g.xmap_angle_max_rad,
            10.0_f64.to_radians()
        ),
        xmap_angle_samples: take!(
            origins,
            "grids.xmap_angle_samples",
            g.xmap_angle_samples,
            600
        ),
        g2_padding_factor: take!(origins, "grids.g2_padding_factor", g.g2_padding_factor, 16),
        g2_delay_half_range_s: take!(
            origins,
            "grids.g2_delay_half_range_s",
            g.g2_delay_half_range_s,
            200e-15
        ),
        sweep_waist_min_m: take!(
            origins,
            "grids.sweep_waist_min_m",
            g.sweep_waist_min_m,
            20e-6
        ),
        sweep_waist_max_m: take!(
            origins,
            "grids.sweep_waist_max_m",
            g.sweep_waist_max_m,
            600e-6
        ),
        sweep_waist_samples: take!(
            origins,
            "grids.sweep_waist_samples",
            g.sweep_waist_samples,
            30
        ),
        gamma_search_min: take!(origins, "grids.gamma_search_min", g.gamma_search_min, 0.8),
        gamma_search_max: take!(origins, "grids.gamma_search_max", g.gamma_search_max, 1.4),
        rate_waist_min_m: take!(
            origins,
            "grids.rate_waist_min_m",
            g.rate_waist_min_m,
            100e-6
        ),
        rate_waist_max_m: take!(
            origins,
            "grids.rate_waist_max_m",
            g.rate_waist_max_m,
            500e-6
        ),
        rate_waist_samples: take!(
            origins,
            "grids.rate_waist_samples",
            g.rate_waist_samples,
            9
        ),
    };
    validate_grids(&grids)?;

    let output_dir = PathBuf::from(take!(
        origins,
        "output.directory",
        raw.output.directory,
        "out".to_string()
    ));

    Ok((
        RunConfig {
            crystal,
            pump,
            fiber,
            grating,
            detection_bandwidth_hz: bandwidth,
            grids,
            output_dir,
        },
        origins,
    ))
}

fn validate_grids(g: &GridConfig) -> Result<()> {
    if !(g.spectrum_min_hz < 0.0 && g.spectrum_max_hz > 0.0) {
        return Err(Error::invalid(
            "grids.spectrum_min_hz/spectrum_max_hz",
            "spectrum grid must straddle zero detuning",
        ));
    }
    if !(g.spectrum_step_hz > 0.0) {
        return Err(Error::invalid("grids.spectrum_step_hz", "must be positive"));
    }
    if g.xmap_detuning_min_hz >= g.xmap_detuning_max_hz
        || g.xmap_angle_min_rad >= g.xmap_angle_max_rad
    {
        return Err(Error::invalid("grids.xmap", "empty map range"));
    }
    if g.xmap_detuning_samples < 2 || g.xmap_angle_samples < 2 {
        return Err(Error::invalid("grids.xmap", "need at least 2 samples per axis"));
    }
    if g.g2_padding_factor < 8 {
        return Err(Error::invalid(
            "grids.g2_padding_factor",
            "zero-padding factor must be at least 8",
        ));
    }
    if !(g.g2_delay_half_range_s > 0.0) {
        return Err(Error::invalid("grids.g2_delay_half_range_s", "must be positive"));
    }
    if !(0.0 < g.sweep_waist_min_m && g.sweep_waist_min_m < g.sweep_waist_max_m)
        || g.sweep_waist_samples < 2
    {
        return Err(Error::invalid("grids.sweep_waist", "bad sweep range"));
    }
    if !(0.0 < g.gamma_search_min && g.gamma_search_min < g.gamma_search_max) {
        return Err(Error::invalid("grids.gamma_search", "bad search bracket"));
    }
    if !(0.0 < g.rate_waist_min_m && g.rate_waist_min_m < g.rate_waist_max_m)
        || g.rate_waist_samples < 2
    {
        return Err(Error::invalid("grids.rate_waist", "bad sweep range"));
    }
    Ok(())
}

/// The stock configuration with every key at its default.
pub fn default_config() -> RunConfig {
    let (cfg, _) = resolve(RawConfig::default()).expect("default configuration must validate");
    cfg
}

/// Parse and validate a configuration from TOML text.
pub fn config_from_str(text: &str, source: &str) -> Result<(RunConfig, ConfigOrigins)> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config {
        path: source.to_string(),
        message: e.to_string(),
    })?;
    resolve(raw)
}

/// Load a configuration file.
pub fn load_config(path: &Path) -> Result<(RunConfig, ConfigOrigins)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.display().to_string(),
        message: format!("cannot read file: {e}"),
    })?;
    config_from_str(&text, &path.display().to_string())
}

/// Render the fully resolved configuration as TOML, labeling every key with
/// its origin. The dump re-parses to an identical configuration.
pub fn effective_config_toml(cfg: &RunConfig, origins: &ConfigOrigins) -> String {
    let tag = |key: &str| -> &'static str {
        origins
            .get(key)
            .copied()
            .unwrap_or(Origin::Derived)
            .label()
    };
    let f = |v: f64| format!("{v:?}");
    let mut s = String::new();
    s.push_str("# effective configuration: every key resolved, origin labeled\n\n");
    s.push_str("[crystal]\n");
    s.push_str(&format!(
        "length_m = {} # {}\n",
        f(cfg.crystal.length),
        tag("crystal.length_m")
    ));
    s.push_str(&format!(
        "cut_angle_rad = {} # {}\n",
        f(cfg.crystal.cut_angle),
        tag("crystal.cut_angle_rad")
    ));
    s.push_str(&format!(
        "walkoff_displacement_m = {} # {}\n",
        f(cfg.crystal.walkoff_displacement),
        tag("crystal.walkoff_displacement_m")
    ));
    let so = cfg.crystal.sellmeier_o;
    let se = cfg.crystal.sellmeier_e;
    s.push_str(&format!(
        "sellmeier_o = [{}, {}, {}, {}] # {}\n",
        f(so.a),
        f(so.b),
        f(so.c),
        f(so.d),
        tag("crystal.sellmeier_o")
    ));
    s.push_str(&format!(
        "sellmeier_e = [{}, {}, {}, {}] # {}\n",
        f(se.a),
        f(se.b),
        f(se.c),
        f(se.d),
        tag("crystal.sellmeier_e")
    ));
    s.push_str(&format!(
        "validity_window_m = [{}, {}] # {}\n\n",
        f(cfg.crystal.validity_window.0),
        f(cfg.crystal.validity_window.1),
        tag("crystal.validity_window_m")
    ));
    s.push_str("[pump]\n");
    s.push_str(&format!(
        "wavelength_m = {} # {}\n",
        f(cfg.pump.wavelength.meters()),
        tag("pump.wavelength_m")
    ));
    s.push_str(&format!(
        "waist_m = {} # {}\n\n",
        f(cfg.pump.waist),
        tag("pump.waist_m")
    ));
    s.push_str("[fiber]\n");
    s.push_str(&format!(
        "numerical_aperture = {} # {}\n",
        f(cfg.fiber.numerical_aperture),
        tag("fiber.numerical_aperture")
    ));
    s.push_str(&format!(
        "reference_wavelength_m = {} # {}\n",
        f(cfg.fiber.reference_wavelength.meters()),
        tag("fiber.reference_wavelength_m")
    ));
    s.push_str(&format!(
        "magnification = {} # {}\n\n",
        f(cfg.fiber.magnification),
        tag("fiber.magnification")
    ));
    s.push_str("[grating]\n");
    s.push_str(&format!(
        "groove_density_per_mm = {} # {}\n",
        f(cfg.grating.groove_density / 1e3),
        tag("grating.groove_density_per_mm")
    ));
    s.push_str(&format!(
        "incidence_angle_rad = {} # {}\n",
        f(cfg.grating.incidence_angle),
        tag("grating.incidence_angle_rad")
    ));
    s.push_str(&format!(
        "magnification = {} # {}\n",
        f(cfg.grating.magnification),
        tag("grating.magnification")
    ));
    s.push_str(&format!(
        "efficiency_mode = \"{}\" # {}\n",
        match cfg.grating.efficiency_mode {
            EfficiencyMode::Ideal => "ideal",
            EfficiencyMode::Anchored => "anchored",
        },
        tag("grating.efficiency_mode")
    ));
    let anchors: Vec<String> = cfg
        .grating
        .efficiency_anchors
        .iter()
        .map(|(l, e)| format!("[{}, {}]", f(*l), f(*e)))
        .collect();
    s.push_str(&format!(
        "efficiency_anchors = [{}] # {}\n\n",
        anchors.join(", "),
        tag("grating.efficiency_anchors")
    ));
    s.push_str("[detection]\n");
    s.push_str(&format!(
        "bandwidth_hz = {} # {}\n\n",
        f(cfg.detection_bandwidth_hz),
        tag("detection.bandwidth_hz")
    ));
    s.push_str("[grids]\n");
    let g = &cfg.grids;
    let grid_rows: Vec<(&str, String)> = vec![
        ("spectrum_min_hz", f(g.spectrum_min_hz)),
        ("spectrum_max_hz", f(g.spectrum_max_hz)),
        ("spectrum_step_hz", f(g.spectrum_step_hz)),
        ("xmap_detuning_min_hz", f(g.xmap_detuning_min_hz)),
        ("xmap_detuning_max_hz", f(g.xmap_detuning_max_hz)),
        ("xmap_detuning_samples", format!("{}", g.xmap_detuning_samples)),
        ("xmap_angle_min_rad", f(g.xmap_angle_min_rad)),
        ("xmap_angle_max_rad", f(g.xmap_angle_max_rad)),
        ("xmap_angle_samples", format!("{}", g.xmap_angle_samples)),
        ("g2_padding_factor", format!("{}", g.g2_padding_factor)),
        ("g2_delay_half_range_s", f(g.g2_delay_half_range_s)),
        ("sweep_waist_min_m", f(g.sweep_waist_min_m)),
        ("sweep_waist_max_m", f(g.sweep_waist_max_m)),
        ("sweep_waist_samples", format!("{}", g.sweep_waist_samples)),
        ("gamma_search_min", f(g.gamma_search_min)),
        ("gamma_search_max", f(g.gamma_search_max)),
        ("rate_waist_min_m", f(g.rate_waist_min_m)),
        ("rate_waist_max_m", f(g.rate_waist_max_m)),
        ("rate_waist_samples", format!("{}", g.rate_waist_samples)),
    ];
    for (key, value) in grid_rows {
        s.push_str(&format!("{key} = {value} # {}\n", tag(&format!("grids.{key}"))));
    }
    s.push('\n');
    s.push_str("[output]\n");
    s.push_str(&format!(
        "directory = \"{}\" # {}\n",
        cfg.output_dir.display(),
        tag("output.directory")
    ));
    s
}
