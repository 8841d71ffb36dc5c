//! Desk-scale simulation of 2D multi-target localization with a two-antenna
//! FMCW radar under severe bit-rate reduction.
//!
//! The acquisition chain keeps one baseband channel per antenna (the I channel
//! of the first antenna and the Q channel of the second) and quantizes each
//! retained sample with a dithered uniform scalar quantizer, down to a single
//! bit. Recovery runs Projected Back Projection: adjoint of the sensing matrix
//! applied to the quantized data, a symmetry-aware hard threshold to find the
//! target range bins, and inter-antenna phase comparison for the angles.
//!
//! Modules follow the processing chain:
//!
//! - [`radar`] - physical parameters, range grid, target scenes
//! - [`sensing`] - frequency plan, range measurement matrix, channel dropping
//! - [`quantizer`] - dithered uniform scalar quantization
//! - [`recovery`] - backprojection, support selection, angle estimation
//! - [`montecarlo`] - seeded error-map campaigns and bit-rate accounting

pub mod montecarlo;
pub mod quantizer;
pub mod radar;
pub mod recovery;
pub mod sensing;

mod error;

pub use error::{Error, Result};
pub use montecarlo::{CampaignConfig, CellStats, ErrorMap, PolarCell, PolarGrid};
pub use quantizer::{Dither, QuantizerConfig};
pub use radar::{RadarParams, Target, TargetScene};
pub use recovery::{Estimate, RecoveryMode, TargetPosition};
pub use sensing::{FrequencyPlan, MeasurementSet, RangeMatrix};
