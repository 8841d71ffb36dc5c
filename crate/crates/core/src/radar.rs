//! Radar parameters, the discrete range grid, and target-scene construction.

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::montecarlo::{PolarCell, PolarGrid};
use crate::sensing::steering_phase;
use crate::{Error, Result};

/// Default propagation speed (m/s). The round value makes the default range
/// resolution exactly 0.6 m.
pub const WAVE_SPEED: f64 = 3.0e8;

/// Exact vacuum speed of light (m/s), for callers that prefer it over the
/// rounded default.
pub const WAVE_SPEED_EXACT: f64 = 299_792_458.0;

/// Physical parameters of the two-antenna FMCW radar.
///
/// Range resolution and maximum range are always derived from these fields,
/// never stored separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarParams {
    /// Carrier frequency f0 (Hz).
    pub carrier_hz: f64,
    /// Sweep bandwidth B (Hz).
    pub bandwidth_hz: f64,
    /// Number of discrete range bins N.
    pub bins: usize,
    /// Antenna spacing d (m).
    pub spacing_m: f64,
    /// Propagation speed c (m/s).
    pub wave_speed: f64,
}

impl Default for RadarParams {
    /// K-band defaults: 24 GHz carrier, 250 MHz sweep, 256 range bins.
    ///
    /// The antenna spacing defaults to a quarter wavelength. With one channel
    /// dropped per antenna the recovered profile carries a conjugate-mirror
    /// ghost of every target weighted by `|1 - G*| = 2|sin(psi/2)|` against a
    /// true peak weighted by `|1 + G| = 2|cos(psi/2)|`, where
    /// `psi = 2 pi f0 d sin(theta) / c`. Quarter-wavelength spacing keeps
    /// `|psi| <= pi/2`, so the true peak dominates for every angle inside
    /// (-90 deg, 90 deg); half-wavelength spacing would cap exact support
    /// recovery at 30 degrees.
    fn default() -> Self {
        let carrier_hz = 24.0e9;
        Self {
            carrier_hz,
            bandwidth_hz: 250.0e6,
            bins: 256,
            spacing_m: WAVE_SPEED / (4.0 * carrier_hz),
            wave_speed: WAVE_SPEED,
        }
    }
}

impl RadarParams {
    /// Checks the hard parameter invariants.
    pub fn validate(&self) -> Result<()> {
        if !self.carrier_hz.is_finite() || self.carrier_hz <= 0.0 {
            return Err(Error::InvalidConfig("carrier frequency must be positive".into()));
        }
        if !self.bandwidth_hz.is_finite() || self.bandwidth_hz <= 0.0 {
            return Err(Error::InvalidConfig("bandwidth must be positive".into()));
        }
        if self.bins < 2 {
            return Err(Error::InvalidConfig("need at least 2 range bins".into()));
        }
        if !self.spacing_m.is_finite() || self.spacing_m <= 0.0 {
            return Err(Error::InvalidConfig("antenna spacing must be positive".into()));
        }
        if !self.wave_speed.is_finite() || self.wave_speed <= 0.0 {
            return Err(Error::InvalidConfig("wave speed must be positive".into()));
        }
        Ok(())
    }

    /// True when the narrowband approximation behind the sensing model is
    /// comfortable (B/f0 <= 0.1). Callers should warn the user otherwise.
    pub fn is_narrowband(&self) -> bool {
        self.bandwidth_hz / self.carrier_hz <= 0.1
    }

    /// Range resolution `c / (2B)` (m).
    pub fn range_resolution(&self) -> f64 {
        self.wave_speed / (2.0 * self.bandwidth_hz)
    }

    /// Maximum range `N * c / (2B)` (m).
    pub fn r_max(&self) -> f64 {
        self.bins as f64 * self.range_resolution()
    }

    /// Carrier-to-bandwidth ratio f0/B. An integer value makes the range
    /// matrix a row-sampled DFT; the defaults give exactly 96.
    pub fn carrier_bandwidth_ratio(&self) -> f64 {
        self.carrier_hz / self.bandwidth_hz
    }

    /// The discrete range grid `R_n = n * c / (2B)`, length N.
    pub fn range_grid(&self) -> Vec<f64> {
        let dr = self.range_resolution();
        (0..self.bins).map(|n| n as f64 * dr).collect()
    }

    /// Index of the range bin nearest to `range_m`, with ties snapping to the
    /// lower bin. Clamped to `[0, N)`.
    pub fn nearest_bin(&self, range_m: f64) -> usize {
        let t = range_m / self.range_resolution();
        // ceil(t - 1/2) is round-half-down, so a midpoint keeps the lower bin.
        let snapped = (t - 0.5).ceil();
        snapped.clamp(0.0, (self.bins - 1) as f64) as usize
    }
}

/// A point target: on-grid range bin, angle of arrival, unit-modulus
/// complex amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub bin: usize,
    pub theta_rad: f64,
    pub amplitude: Complex64,
}

impl Target {
    /// Physical range of the target's bin (m).
    pub fn range_m(&self, params: &RadarParams) -> f64 {
        self.bin as f64 * params.range_resolution()
    }
}

/// A K-sparse target scene over the N-bin range grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetScene {
    targets: Vec<Target>,
    bins: usize,
}

impl TargetScene {
    /// Builds a scene, enforcing the sparsity invariants: pairwise-distinct
    /// bins inside `[0, N)`, `K <= N/8`, unit-modulus amplitudes, and angles
    /// strictly inside (-pi/2, pi/2).
    pub fn new(params: &RadarParams, targets: Vec<Target>) -> Result<Self> {
        params.validate()?;
        if targets.len() > params.bins / 8 {
            return Err(Error::InvalidConfig(format!(
                "{} targets exceed the sparsity budget N/8 = {}",
                targets.len(),
                params.bins / 8
            )));
        }
        let mut seen = HashSet::new();
        for t in &targets {
            if t.bin >= params.bins {
                return Err(Error::InvalidConfig(format!(
                    "target bin {} outside [0, {})",
                    t.bin, params.bins
                )));
            }
            if !seen.insert(t.bin) {
                return Err(Error::InvalidConfig(format!("duplicate target bin {}", t.bin)));
            }
            if t.theta_rad.is_nan() || t.theta_rad.abs() >= FRAC_PI_2 {
                return Err(Error::InvalidConfig(format!(
                    "target angle {} rad outside (-pi/2, pi/2)",
                    t.theta_rad
                )));
            }
            if (t.amplitude.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidConfig(format!(
                    "target amplitude must be unit modulus, got |a| = {}",
                    t.amplitude.norm()
                )));
            }
        }
        Ok(Self { targets, bins: params.bins })
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    /// Number of targets K.
    pub fn sparsity(&self) -> usize {
        self.targets.len()
    }

    /// Grid size N the scene was built against.
    pub fn bins(&self) -> usize {
        self.bins
    }

    /// The sparse range profile x as a dense length-N vector.
    pub fn range_profile(&self) -> Vec<Complex64> {
        let mut x = vec![Complex64::new(0.0, 0.0); self.bins];
        for t in &self.targets {
            x[t.bin] = t.amplitude;
        }
        x
    }

    /// The per-antenna signal pair `(x, Gx)`, where G applies the steering
    /// phase of each target's angle on the support.
    pub fn signal_pair(&self, params: &RadarParams) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut x1 = vec![Complex64::new(0.0, 0.0); self.bins];
        let mut x2 = x1.clone();
        for t in &self.targets {
            x1[t.bin] = t.amplitude;
            x2[t.bin] = t.amplitude * steering_phase(t.theta_rad, params);
        }
        (x1, x2)
    }
}

/// Maximum redraw attempts before giving up on a collision-free cell set.
const MAX_REDRAWS: usize = 10_000;

/// Draws `k` grid cells uniformly without replacement, redrawing the whole
/// set until the snapped range bins are pairwise distinct.
pub fn sample_cells(
    params: &RadarParams,
    k: usize,
    grid: &PolarGrid,
    rng: &mut impl Rng,
) -> Result<Vec<PolarCell>> {
    if k == 0 {
        return Err(Error::InvalidConfig("need at least one target".into()));
    }
    let reachable: HashSet<usize> = (0..grid.n_range)
        .map(|ir| params.nearest_bin(grid.range_center(ir)))
        .collect();
    if k > reachable.len() {
        return Err(Error::InvalidConfig(format!(
            "{k} targets cannot occupy distinct bins: the grid reaches only {} bins",
            reachable.len()
        )));
    }
    for _ in 0..MAX_REDRAWS {
        let picks = rand::seq::index::sample(rng, grid.cell_count(), k);
        let cells: Vec<PolarCell> = picks.iter().map(|i| grid.cell_at(i)).collect();
        let mut bins = HashSet::new();
        if cells
            .iter()
            .all(|c| bins.insert(params.nearest_bin(grid.range_center(c.range_idx))))
        {
            return Ok(cells);
        }
    }
    Err(Error::InvalidConfig(
        "could not draw targets with distinct range bins".into(),
    ))
}

/// Builds a scene from fixed grid cells: range snapped to the nearest bin,
/// angle at the cell's angle center, amplitudes with independent uniform
/// random phase. One phase is drawn per cell, in slice order.
pub fn scene_from_cells(
    params: &RadarParams,
    grid: &PolarGrid,
    cells: &[PolarCell],
    rng: &mut impl Rng,
) -> Result<TargetScene> {
    let targets = cells
        .iter()
        .map(|c| Target {
            bin: params.nearest_bin(grid.range_center(c.range_idx)),
            theta_rad: grid.theta_center(c.theta_idx),
            amplitude: Complex64::from_polar(1.0, rng.random_range(0.0..TAU)),
        })
        .collect();
    TargetScene::new(params, targets)
}

/// Samples a K-target scene from the polar grid: cells drawn uniformly
/// without replacement, resampled on snapped-bin collisions.
pub fn sample_scene(
    params: &RadarParams,
    k: usize,
    grid: &PolarGrid,
    rng: &mut impl Rng,
) -> Result<TargetScene> {
    let cells = sample_cells(params, k, grid, rng)?;
    scene_from_cells(params, grid, &cells, rng)
}
