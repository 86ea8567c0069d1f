//! Simulation and design toolkit for broadband biphoton sources in a single
//! spatial mode.
//!
//! The model chain: a uniaxial crystal pumped by a monochromatic beam emits
//! photon pairs under type-I collinear degenerate phase matching. The
//! frequency-angular emission pattern is reshaped by a diffraction grating so
//! that many spectral components land in one angular mode, and the pairs are
//! projected onto wavelength-scaled Gaussian collection modes conjugate to a
//! single-mode fiber. From the resulting coincidence spectra the toolkit
//! computes the integral spectral bandwidth, the second-order correlation
//! function and its correlation time, and runs design sweeps over collection
//! waist, grating magnification, and groove density.
//!
//! Modules follow the physical chain:
//! - [`crystal`]: Sellmeier dispersion, extraordinary index, cut-angle solver,
//!   refraction between internal and lab angles.
//! - [`phasematching`]: longitudinal mismatch and the frequency-angular
//!   intensity map for a plane-wave pump.
//! - [`grating`]: angular-dispersion mapping and diffraction efficiency.
//! - [`collection`]: Gaussian-mode overlap and the fiber-coupled coincidence
//!   rate.
//! - [`spectra`]: assembled coincidence spectra, integral bandwidth,
//!   correlation functions.
//! - [`designer`]: waist sweeps, magnification optimization, rate scaling.
//! - [`config`]: run configuration, defaults, and the effective-config dump.
//! - [`report`]: the summary pipeline combining all of the above.

pub mod collection;
pub mod config;
pub mod crystal;
pub mod designer;
pub mod error;
pub mod grating;
pub mod numeric;
pub mod phasematching;
pub mod report;
pub mod spectra;
pub mod units;

pub use collection::{CollectionModes, FiberTrainSpec};
pub use config::RunConfig;
pub use crystal::{CrystalSpec, Sellmeier};
pub use error::{Error, Result};
pub use grating::{EfficiencyMode, GratingSpec};
pub use phasematching::{PumpSpec, SpectralAngularGrid};
pub use report::ReportSummary;
pub use spectra::{CorrelationFunction, Spectrum};
pub use units::{Wavelength, SPEED_OF_LIGHT};
