//! Dithered uniform scalar quantization and the quantized observation
//! operator for the channel-dropped two-antenna model.
//!
//! The quantizer is the floor-based map `Q(v) = delta * floor(v/delta) +
//! delta/2`, applied separately to real and imaginary parts and clamped into
//! a `2^bits`-level alphabet. At one bit that is a sign quantizer with output
//! `+-delta/2`; at 32 bits the pipeline switches to a passthrough mode that
//! performs no quantization and no dithering.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::sensing::{drop_channels, RangeMatrix};
use crate::{Error, Result};

/// Configuration of the uniform scalar quantizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizerConfig {
    /// Bit depth, 1..=32. A depth of 32 selects passthrough mode.
    pub bits: u32,
    /// Quantization width delta (signal units).
    pub delta: f64,
    /// Whether uniform random dithering is added before quantizing.
    pub dithered: bool,
}

impl QuantizerConfig {
    pub fn new(bits: u32, delta: f64, dithered: bool) -> Result<Self> {
        if !(1..=32).contains(&bits) {
            return Err(Error::InvalidConfig(format!("bit depth {bits} outside 1..=32")));
        }
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::InvalidConfig("quantization width must be positive".into()));
        }
        Ok(Self { bits, delta, dithered })
    }

    /// One-bit (sign) quantizer.
    pub fn one_bit(delta: f64, dithered: bool) -> Result<Self> {
        Self::new(1, delta, dithered)
    }

    /// Unquantized mode: samples pass through untouched and no dither is
    /// drawn.
    pub fn passthrough() -> Self {
        Self { bits: 32, delta: 1.0, dithered: false }
    }

    pub fn is_passthrough(&self) -> bool {
        self.bits >= 32
    }

    /// Saturation level `S = delta * 2^(bits-1)`; outputs are clamped to the
    /// extreme alphabet points `+-(S - delta/2)`.
    pub fn saturation(&self) -> f64 {
        self.delta * (1u64 << (self.bits - 1)) as f64
    }
}

/// The dither scale used by campaigns for a K-target unit-amplitude scene:
/// the support `[-delta/2, delta/2]` covers the maximal per-channel signal
/// amplitude K with 25% headroom.
pub fn default_one_bit_delta(targets: usize) -> f64 {
    2.0 * targets as f64 * 1.25
}

/// Uniform scalar quantization of a single real value. Not defined in
/// passthrough mode.
pub fn uniform_quantize(value: f64, cfg: &QuantizerConfig) -> f64 {
    assert!(!cfg.is_passthrough(), "passthrough mode does not quantize");
    let d = cfg.delta;
    let q = d * (value / d).floor() + 0.5 * d;
    let top = cfg.saturation() - 0.5 * d;
    q.clamp(-top, top)
}

/// A complex dither vector with Re and Im i.i.d. uniform on
/// `[-delta/2, delta/2]`, or all zeros when dithering is disabled.
#[derive(Debug, Clone, PartialEq)]
pub struct Dither {
    samples: Vec<Complex64>,
}

impl Dither {
    pub fn zero(len: usize) -> Self {
        Self { samples: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Draws a fresh dither vector of length `len`. Both real and imaginary
/// components are generated even though channel dropping keeps only one of
/// them, so the random stream does not depend on which channel survives.
pub fn draw_dither(len: usize, cfg: &QuantizerConfig, rng: &mut impl Rng) -> Dither {
    if !cfg.dithered || cfg.is_passthrough() {
        return Dither::zero(len);
    }
    let h = 0.5 * cfg.delta;
    let samples = (0..len)
        .map(|_| Complex64::new(rng.random_range(-h..=h), rng.random_range(-h..=h)))
        .collect();
    Dither { samples }
}

/// The quantized observation operator: column 1 is `Q(Re(Phi x1 + xi1))`
/// embedded with zero imaginary part, column 2 is `i Q(Im(Phi x2 + xi2))`.
/// In passthrough mode this reduces exactly to channel dropping of the raw
/// synthesis.
pub fn sense_quantized(
    x1: &[Complex64],
    x2: &[Complex64],
    phi: &RangeMatrix,
    cfg: &QuantizerConfig,
    dither1: &Dither,
    dither2: &Dither,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    for len in [x1.len(), x2.len()] {
        if len != phi.cols() {
            return Err(Error::DimensionMismatch { expected: phi.cols(), got: len });
        }
    }
    for len in [dither1.len(), dither2.len()] {
        if len != phi.rows() {
            return Err(Error::DimensionMismatch { expected: phi.rows(), got: len });
        }
    }
    let g1 = phi.forward(x1);
    let g2 = phi.forward(x2);
    if cfg.is_passthrough() {
        return Ok(drop_channels(&g1, &g2));
    }
    let z1 = g1
        .iter()
        .zip(dither1.samples())
        .map(|(g, xi)| Complex64::new(uniform_quantize(g.re + xi.re, cfg), 0.0))
        .collect();
    let z2 = g2
        .iter()
        .zip(dither2.samples())
        .map(|(g, xi)| Complex64::new(0.0, uniform_quantize(g.im + xi.im, cfg)))
        .collect();
    Ok((z1, z2))
}
