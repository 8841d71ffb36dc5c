//! Seeded Monte Carlo campaigns over a discretized polar domain: per-cell
//! positional error maps and bit-rate accounting.
//!
//! Determinism contract: every trial derives its own random stream from the
//! campaign seed, the target cells, and the trial index through a splitmix64
//! fold, so results do not depend on scheduling. Trials may run on any number
//! of worker threads; aggregation folds the per-trial records sequentially in
//! trial-index order, which keeps parallel and serial campaigns bit-identical.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::quantizer::{draw_dither, sense_quantized, QuantizerConfig};
use crate::radar::{sample_cells, scene_from_cells, RadarParams};
use crate::recovery::{localize_with_mode, RecoveryMode, TargetPosition};
use crate::sensing::{select_frequencies, RangeMatrix};
use crate::{Error, Result};

/// Default number of range cells in the polar error-map grid.
pub const DEFAULT_RANGE_CELLS: usize = 40;
/// Default number of angle cells in the polar error-map grid.
pub const DEFAULT_THETA_CELLS: usize = 30;

/// A uniform polar grid over `[0, r_max] x [-pi/2, pi/2]` with cell centers
/// at the midpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub n_range: usize,
    pub n_theta: usize,
    pub r_max: f64,
}

impl PolarGrid {
    pub fn new(n_range: usize, n_theta: usize, r_max: f64) -> Result<Self> {
        if n_range == 0 || n_theta == 0 {
            return Err(Error::InvalidConfig("polar grid needs at least one cell".into()));
        }
        if !r_max.is_finite() || r_max <= 0.0 {
            return Err(Error::InvalidConfig("polar grid needs a positive range limit".into()));
        }
        Ok(Self { n_range, n_theta, r_max })
    }

    /// The default 40 x 30 grid over the radar's full range.
    pub fn for_params(params: &RadarParams) -> Self {
        Self {
            n_range: DEFAULT_RANGE_CELLS,
            n_theta: DEFAULT_THETA_CELLS,
            r_max: params.r_max(),
        }
    }

    pub fn cell_count(&self) -> usize {
        self.n_range * self.n_theta
    }

    pub fn range_width(&self) -> f64 {
        self.r_max / self.n_range as f64
    }

    pub fn theta_width(&self) -> f64 {
        std::f64::consts::PI / self.n_theta as f64
    }

    /// Range at the center of range row `range_idx`.
    pub fn range_center(&self, range_idx: usize) -> f64 {
        (range_idx as f64 + 0.5) * self.range_width()
    }

    /// Angle at the center of angle column `theta_idx`.
    pub fn theta_center(&self, theta_idx: usize) -> f64 {
        -std::f64::consts::FRAC_PI_2 + (theta_idx as f64 + 0.5) * self.theta_width()
    }

    /// Polar center `(range, theta)` of a cell.
    pub fn cell_center(&self, cell: PolarCell) -> (f64, f64) {
        (self.range_center(cell.range_idx), self.theta_center(cell.theta_idx))
    }

    /// Range-major linear index of a cell.
    pub fn linear_index(&self, cell: PolarCell) -> usize {
        cell.range_idx * self.n_theta + cell.theta_idx
    }

    /// Cell at a range-major linear index.
    pub fn cell_at(&self, linear: usize) -> PolarCell {
        PolarCell { range_idx: linear / self.n_theta, theta_idx: linear % self.n_theta }
    }

    /// All range rows whose centers are nearest to `range_m` (ties included).
    pub fn rows_nearest_range(&self, range_m: f64) -> Vec<usize> {
        let dist = |ir: usize| (self.range_center(ir) - range_m).abs();
        let best = (0..self.n_range)
            .map(dist)
            .fold(f64::INFINITY, f64::min);
        (0..self.n_range).filter(|&ir| dist(ir) <= best).collect()
    }
}

/// One cell of the polar grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolarCell {
    pub range_idx: usize,
    pub theta_idx: usize,
}

/// Configuration of one Monte Carlo campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub params: RadarParams,
    /// Measurement ratio M/N; M is derived as `round(ratio * N)`.
    pub ratio_mn: f64,
    /// Number of targets K per trial.
    pub targets: usize,
    pub quantizer: QuantizerConfig,
    pub recovery: RecoveryMode,
    /// Trials per grid cell. For K = 1 every cell is visited exactly this
    /// often; for K >= 2 the campaign runs `cells * trials_per_cell` trials
    /// over randomly drawn cell tuples.
    pub trials_per_cell: usize,
    pub seed: u64,
    pub grid_range_cells: usize,
    pub grid_theta_cells: usize,
}

impl CampaignConfig {
    pub fn new(
        params: RadarParams,
        ratio_mn: f64,
        targets: usize,
        quantizer: QuantizerConfig,
    ) -> Self {
        Self {
            params,
            ratio_mn,
            targets,
            quantizer,
            recovery: RecoveryMode::Combined,
            trials_per_cell: 25,
            seed: 0,
            grid_range_cells: DEFAULT_RANGE_CELLS,
            grid_theta_cells: DEFAULT_THETA_CELLS,
        }
    }

    /// Measurement count `M = round(ratio * N)`.
    pub fn measurements(&self) -> usize {
        (self.ratio_mn * self.params.bins as f64).round() as usize
    }

    pub fn grid(&self) -> Result<PolarGrid> {
        PolarGrid::new(self.grid_range_cells, self.grid_theta_cells, self.params.r_max())
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        QuantizerConfig::new(self.quantizer.bits, self.quantizer.delta, self.quantizer.dithered)?;
        if !self.ratio_mn.is_finite() || self.ratio_mn <= 0.0 {
            return Err(Error::InvalidConfig("measurement ratio must be positive".into()));
        }
        if self.measurements() < 1 {
            return Err(Error::InvalidConfig("measurement ratio rounds to zero samples".into()));
        }
        if self.targets < 1 {
            return Err(Error::InvalidConfig("need at least one target".into()));
        }
        if self.targets > self.params.bins / 8 {
            return Err(Error::InvalidConfig(format!(
                "{} targets exceed the sparsity budget N/8 = {}",
                self.targets,
                self.params.bins / 8
            )));
        }
        if self.trials_per_cell < 1 {
            return Err(Error::InvalidConfig("need at least one trial per cell".into()));
        }
        self.grid()?;
        Ok(())
    }
}

/// Aggregated statistics of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    /// Mean positional error (m); `None` for cells no trial ever touched.
    pub mean_error_m: Option<f64>,
    pub trial_count: u64,
    /// Trials whose error for this cell came from an empty estimate or a
    /// degenerate phase comparison.
    pub degenerate_count: u64,
}

/// The per-cell error map produced by a campaign.
#[derive(Debug, Clone)]
pub struct ErrorMap {
    pub grid: PolarGrid,
    pub config: CampaignConfig,
    /// Range-major cell statistics, length `grid.cell_count()`.
    pub cells: Vec<CellStats>,
    pub runtime: Duration,
}

impl ErrorMap {
    pub fn cell(&self, cell: PolarCell) -> &CellStats {
        &self.cells[self.grid.linear_index(cell)]
    }

    /// Mean error over all trial records (cells weighted by their counts).
    pub fn global_mean_error(&self) -> f64 {
        let mut sum = 0.0;
        let mut count = 0u64;
        for c in &self.cells {
            if let Some(mean) = c.mean_error_m {
                sum += mean * c.trial_count as f64;
                count += c.trial_count;
            }
        }
        if count == 0 {
            f64::NAN
        } else {
            sum / count as f64
        }
    }

    /// Mean of the per-cell means over one range row, skipping empty cells.
    pub fn row_mean_error(&self, range_idx: usize) -> Option<f64> {
        let mut sum = 0.0;
        let mut n = 0usize;
        for it in 0..self.grid.n_theta {
            let cell = self.cell(PolarCell { range_idx, theta_idx: it });
            if let Some(mean) = cell.mean_error_m {
                sum += mean;
                n += 1;
            }
        }
        (n > 0).then(|| sum / n as f64)
    }
}

/// Positional error of one true target against a list of estimates: the
/// Euclidean distance `min_k |R e^{i theta} - Rhat_k e^{i thetahat_k}|` in
/// the Cartesian embedding. An empty estimate list scores the fixed penalty
/// `r_max`.
pub fn position_error(truth: (f64, f64), estimates: &[TargetPosition], r_max: f64) -> f64 {
    match closest_estimate(truth, estimates) {
        Some((_, d)) => d,
        None => r_max,
    }
}

/// Index and distance of the estimate closest to the true position.
fn closest_estimate(truth: (f64, f64), estimates: &[TargetPosition]) -> Option<(usize, f64)> {
    let (r, theta) = truth;
    let (tx, ty) = (r * theta.cos(), r * theta.sin());
    estimates
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let (ex, ey) = (
                e.range_m * e.theta_rad.cos(),
                e.range_m * e.theta_rad.sin(),
            );
            (i, ((tx - ex).powi(2) + (ty - ey).powi(2)).sqrt())
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// One error record: a true cell, its positional error, and whether the
/// error came from a degenerate estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub cell: PolarCell,
    pub error_m: f64,
    pub degenerate: bool,
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream tag reserved for the campaign-level cell draw (K >= 2).
const CELL_DRAW_TAG: u64 = 0xC0FF_EE00_0000_0001;

/// Derives the trial-local generator: a splitmix64 fold of the campaign
/// seed, the linear cell indices (in slice order), and the trial index,
/// seeding a ChaCha stream.
fn trial_rng(seed: u64, grid: &PolarGrid, cells: &[PolarCell], trial_index: u64) -> ChaCha8Rng {
    let mut h = splitmix64(seed);
    for &cell in cells {
        h = splitmix64(h ^ grid.linear_index(cell) as u64);
    }
    h = splitmix64(h ^ trial_index);
    ChaCha8Rng::seed_from_u64(h)
}

/// Runs a single trial: builds the scene on the given cells, draws the
/// frequency plan and dither from the trial-local stream, senses, localizes,
/// and scores each true target against the estimate list.
///
/// Draw order within the trial stream is fixed: target phases (cell order),
/// partial-ramp frequency indices, dither for antenna 1, dither for
/// antenna 2.
pub fn run_trial(
    cfg: &CampaignConfig,
    grid: &PolarGrid,
    cells: &[PolarCell],
    trial_index: u64,
) -> Result<Vec<TrialRecord>> {
    let mut rng = trial_rng(cfg.seed, grid, cells, trial_index);
    let scene = scene_from_cells(&cfg.params, grid, cells, &mut rng)?;
    let plan = select_frequencies(cfg.measurements(), cfg.params.bins, &mut rng);
    let phi = RangeMatrix::new(&plan, &cfg.params)?;
    let (x1, x2) = scene.signal_pair(&cfg.params);
    let dither1 = draw_dither(phi.rows(), &cfg.quantizer, &mut rng);
    let dither2 = draw_dither(phi.rows(), &cfg.quantizer, &mut rng);
    let (z1, z2) = sense_quantized(&x1, &x2, &phi, &cfg.quantizer, &dither1, &dither2)?;
    let estimate = localize_with_mode(&z1, &z2, &phi, cfg.targets, &cfg.params, cfg.recovery);

    let r_max = cfg.params.r_max();
    Ok(cells
        .iter()
        .map(|&cell| {
            let truth = grid.cell_center(cell);
            match closest_estimate(truth, &estimate.positions) {
                Some((idx, error_m)) => TrialRecord {
                    cell,
                    error_m,
                    degenerate: estimate.positions[idx].degenerate_phase,
                },
                None => TrialRecord { cell, error_m: r_max, degenerate: true },
            }
        })
        .collect())
}

/// Enumerates the campaign's trial jobs. For K = 1 this is every cell
/// repeated `trials_per_cell` times in range-major order; for K >= 2 it is
/// `cells * trials_per_cell` cell tuples drawn from a dedicated stream, with
/// snapped-bin collisions resampled.
fn trial_jobs(cfg: &CampaignConfig, grid: &PolarGrid) -> Result<Vec<Vec<PolarCell>>> {
    let total = grid.cell_count() * cfg.trials_per_cell;
    if cfg.targets == 1 {
        let mut jobs = Vec::with_capacity(total);
        for linear in 0..grid.cell_count() {
            for _ in 0..cfg.trials_per_cell {
                jobs.push(vec![grid.cell_at(linear)]);
            }
        }
        Ok(jobs)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(cfg.seed ^ CELL_DRAW_TAG));
        (0..total)
            .map(|_| sample_cells(&cfg.params, cfg.targets, grid, &mut rng))
            .collect()
    }
}

/// Runs a full campaign and aggregates the error map.
///
/// Trials execute on the current rayon pool; per-trial results are collected
/// in job order and folded sequentially, so the map is a pure function of
/// the configuration regardless of worker count.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<ErrorMap> {
    cfg.validate()?;
    let start = Instant::now();
    let grid = cfg.grid()?;
    let jobs = trial_jobs(cfg, &grid)?;

    let results: Vec<Result<Vec<TrialRecord>>> = jobs
        .par_iter()
        .enumerate()
        .map(|(index, cells)| run_trial(cfg, &grid, cells, index as u64))
        .collect();

    let mut error_sum = vec![0.0f64; grid.cell_count()];
    let mut counts = vec![0u64; grid.cell_count()];
    let mut degenerate = vec![0u64; grid.cell_count()];
    for trial in results {
        for record in trial? {
            let idx = grid.linear_index(record.cell);
            error_sum[idx] += record.error_m;
            counts[idx] += 1;
            if record.degenerate {
                degenerate[idx] += 1;
            }
        }
    }

    let cells = (0..grid.cell_count())
        .map(|idx| CellStats {
            mean_error_m: (counts[idx] > 0).then(|| error_sum[idx] / counts[idx] as f64),
            trial_count: counts[idx],
            degenerate_count: degenerate[idx],
        })
        .collect();

    Ok(ErrorMap { grid, config: cfg.clone(), cells, runtime: start.elapsed() })
}

/// Bits transmitted per scan by the reduced scheme: 2 antennas, one channel
/// each, M samples of `bits` bits.
pub fn bit_budget(measurements: usize, bits: u32) -> u64 {
    2 * measurements as u64 * bits as u64
}

/// Bits per scan of the classic acquisition: 2 antennas, I and Q channels,
/// N samples of `ref_bits` bits.
pub fn baseline_bit_budget(bins: usize, ref_bits: u32) -> u64 {
    4 * bins as u64 * ref_bits as u64
}

/// Bit-rate reduction of the scheme against the classic baseline (percent).
pub fn bitrate_reduction(measurements: usize, bins: usize, bits: u32, ref_bits: u32) -> f64 {
    100.0 * (1.0 - bit_budget(measurements, bits) as f64 / baseline_bit_budget(bins, ref_bits) as f64)
}
