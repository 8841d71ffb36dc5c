//! Campaign and trial drivers behind the CLI subcommands.

use std::fmt;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qradar_core::montecarlo::{bitrate_reduction, run_campaign, CampaignConfig};
use qradar_core::quantizer::{default_one_bit_delta, draw_dither, sense_quantized, QuantizerConfig};
use qradar_core::radar::{RadarParams, Target, TargetScene};
use qradar_core::recovery::{localize_with_mode, RecoveryMode, TargetPosition};
use qradar_core::sensing::{select_frequencies, RangeMatrix};

use crate::output;
use crate::presets;

/// Failures split by exit code: usage problems exit 1, runtime problems 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Runtime(err) => write!(f, "{err:#}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(err: anyhow::Error) -> Self {
        CliError::Runtime(err)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

impl Switch {
    fn is_on(self) -> bool {
        self == Switch::On
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct CampaignArgs {
    /// Scenario preset (fig2a, fig2b, fig2c, fig2d, fig3a, fig3b, fig3c,
    /// fig3d); mutually exclusive with the explicit scenario flags.
    #[arg(long, conflicts_with_all = ["mn_ratio", "k", "bits", "dither"])]
    pub preset: Option<String>,

    /// Measurement ratio M/N.
    #[arg(long)]
    pub mn_ratio: Option<f64>,

    /// Number of targets per trial.
    #[arg(long)]
    pub k: Option<usize>,

    /// Quantizer bit depth (32 = unquantized passthrough).
    #[arg(long)]
    pub bits: Option<u32>,

    /// Dithering on or off.
    #[arg(long, value_enum)]
    pub dither: Option<Switch>,

    /// Quantization width; defaults to 2.5 K.
    #[arg(long)]
    pub delta: Option<f64>,

    /// Campaign seed; falls back to QRADAR_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Trials per grid cell.
    #[arg(long)]
    pub trials: Option<usize>,

    /// Output file for the error map.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = FileFormat::Csv)]
    pub format: FileFormat,

    /// Worker thread cap; 0 uses all cores. Does not affect the output.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,

    /// Range cells in the error-map grid.
    #[arg(long, default_value_t = 40)]
    pub grid_r: usize,

    /// Angle cells in the error-map grid.
    #[arg(long, default_value_t = 30)]
    pub grid_theta: usize,
}

#[derive(Debug, Args)]
pub struct TrialArgs {
    /// True target range bin.
    #[arg(long)]
    pub range_bin: usize,

    /// True target angle (degrees).
    #[arg(long, allow_negative_numbers = true)]
    pub theta_deg: f64,

    /// Measurement ratio M/N.
    #[arg(long, default_value_t = 1.0)]
    pub mn_ratio: f64,

    /// Quantizer bit depth (32 = unquantized passthrough).
    #[arg(long, default_value_t = 32)]
    pub bits: u32,

    #[arg(long, value_enum, default_value_t = Switch::Off)]
    pub dither: Switch,

    /// Quantization width; defaults to 2.5 for a single target.
    #[arg(long)]
    pub delta: Option<f64>,

    /// Trial seed; falls back to QRADAR_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output file for the JSON dump; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Resolves the seed: explicit flag, then the QRADAR_SEED environment
/// variable, then zero.
fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("QRADAR_SEED") {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| usage(format!("QRADAR_SEED is not a valid seed: {text:?}"))),
        Err(_) => Ok(0),
    }
}

fn build_quantizer(bits: u32, dithered: bool, delta: Option<f64>, targets: usize) -> Result<QuantizerConfig, CliError> {
    if bits >= 32 {
        if delta.is_some() {
            // Harmless, but the value would be ignored; refuse the footgun.
            return Err(usage("--delta has no effect at 32 bits (passthrough)"));
        }
        return Ok(QuantizerConfig::passthrough());
    }
    let delta = delta.unwrap_or_else(|| default_one_bit_delta(targets));
    QuantizerConfig::new(bits, delta, dithered).map_err(|e| usage(e.to_string()))
}

pub fn build_campaign_config(args: &CampaignArgs) -> Result<CampaignConfig, CliError> {
    let mut cfg = if let Some(name) = &args.preset {
        let preset = presets::find(name)
            .ok_or_else(|| usage(format!("unknown preset {name:?} (expected fig2a..fig3d)")))?;
        let mut cfg = preset.campaign_config();
        if let Some(delta) = args.delta {
            if cfg.quantizer.is_passthrough() {
                return Err(usage("--delta has no effect on a passthrough preset"));
            }
            cfg.quantizer =
                QuantizerConfig::new(cfg.quantizer.bits, delta, cfg.quantizer.dithered)
                    .map_err(|e| usage(e.to_string()))?;
        }
        cfg
    } else {
        let (Some(ratio), Some(k), Some(bits), Some(dither)) =
            (args.mn_ratio, args.k, args.bits, args.dither)
        else {
            return Err(usage(
                "either --preset or all of --mn-ratio, --k, --bits, --dither are required",
            ));
        };
        let quantizer = build_quantizer(bits, dither.is_on(), args.delta, k)?;
        CampaignConfig::new(RadarParams::default(), ratio, k, quantizer)
    };
    cfg.seed = resolve_seed(args.seed)?;
    if let Some(trials) = args.trials {
        cfg.trials_per_cell = trials;
    }
    cfg.grid_range_cells = args.grid_r;
    cfg.grid_theta_cells = args.grid_theta;
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

/// Truncated two-decimal percentage, the convention used when quoting
/// bit-rate reductions.
pub fn format_percent_2dp(value: f64) -> String {
    format!("{:.2}", (value * 100.0).floor() / 100.0)
}

pub fn cmd_campaign(args: &CampaignArgs) -> Result<(), CliError> {
    let cfg = build_campaign_config(args)?;
    if !cfg.params.is_narrowband() {
        eprintln!(
            "warning: bandwidth is more than 10% of the carrier; the \
             narrowband sensing model degrades"
        );
    }

    let map = if args.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build()
            .context("building the worker pool")?
            .install(|| run_campaign(&cfg))
    } else {
        run_campaign(&cfg)
    }
    .map_err(|e| CliError::Runtime(anyhow::Error::new(e)))?;

    let m = cfg.measurements();
    let n = cfg.params.bins;
    println!(
        "campaign: {} x {} cells, {} trials, M = {m} (M/N = {:.4}%), K = {}, {}",
        cfg.grid_range_cells,
        cfg.grid_theta_cells,
        cfg.grid_range_cells * cfg.grid_theta_cells * cfg.trials_per_cell,
        100.0 * cfg.ratio_mn,
        cfg.targets,
        describe_quantizer(&cfg.quantizer),
    );
    println!("global mean error: {:.4} m", map.global_mean_error());
    let reduction = bitrate_reduction(m, n, cfg.quantizer.bits, 32);
    println!(
        "bit-rate reduction vs 32-bit I/Q baseline: {}%",
        format_percent_2dp(reduction)
    );

    if let Some(out) = &args.out {
        let contents = match args.format {
            FileFormat::Csv => output::error_map_to_csv(&map),
            FileFormat::Json => output::error_map_to_json(&map)?,
        };
        output::write_atomic(out, &contents)?;
        println!("wrote {}", out.display());
    }
    println!("elapsed: {:.2} s", map.runtime.as_secs_f64());
    Ok(())
}

fn describe_quantizer(q: &QuantizerConfig) -> String {
    if q.is_passthrough() {
        "32-bit passthrough".to_string()
    } else {
        format!(
            "{}-bit {} (delta = {})",
            q.bits,
            if q.dithered { "dithered" } else { "non-dithered" },
            q.delta
        )
    }
}

/// JSON dump of a single trial.
#[derive(Debug, serde::Serialize)]
struct TrialDump {
    seed: u64,
    mn_ratio: f64,
    measurements: usize,
    bits: u32,
    dithered: bool,
    delta: f64,
    scene: Vec<SceneTarget>,
    plan_indices: Vec<usize>,
    /// First entries of each observation column, as [re, im] pairs.
    z1_preview: Vec<[f64; 2]>,
    z2_preview: Vec<[f64; 2]>,
    /// |xhat1 + xhat2| over all range bins.
    combined_magnitude: Vec<f64>,
    support: Vec<usize>,
    truncated: bool,
    positions: Vec<TargetPosition>,
    error_m: f64,
    self_mirror_ambiguity: bool,
}

#[derive(Debug, serde::Serialize)]
struct SceneTarget {
    bin: usize,
    range_m: f64,
    theta_rad: f64,
    amplitude: [f64; 2],
}

const Z_PREVIEW_LEN: usize = 8;

pub fn cmd_trial(args: &TrialArgs) -> Result<(), CliError> {
    let params = RadarParams::default();
    if args.range_bin >= params.bins {
        return Err(usage(format!(
            "--range-bin {} outside the grid [0, {})",
            args.range_bin, params.bins
        )));
    }
    if args.theta_deg.is_nan() || args.theta_deg.abs() >= 90.0 {
        return Err(usage("--theta-deg must be strictly inside (-90, 90)"));
    }
    let seed = resolve_seed(args.seed)?;
    let quantizer = build_quantizer(args.bits, args.dither.is_on(), args.delta, 1)?;
    let m = (args.mn_ratio * params.bins as f64).round() as usize;
    if m < 1 {
        return Err(usage("--mn-ratio rounds to zero measurements"));
    }

    // Draw order matches the campaign trials: phase, plan, both dithers.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta = args.theta_deg.to_radians();
    let scene = TargetScene::new(
        &params,
        vec![Target {
            bin: args.range_bin,
            theta_rad: theta,
            amplitude: Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)),
        }],
    )
    .map_err(|e| usage(e.to_string()))?;
    let plan = select_frequencies(m, params.bins, &mut rng);
    let phi = RangeMatrix::new(&plan, &params)
        .map_err(|e| CliError::Runtime(anyhow::Error::new(e)))?;
    let (x1, x2) = scene.signal_pair(&params);
    let d1 = draw_dither(phi.rows(), &quantizer, &mut rng);
    let d2 = draw_dither(phi.rows(), &quantizer, &mut rng);
    let (z1, z2) = sense_quantized(&x1, &x2, &phi, &quantizer, &d1, &d2)
        .map_err(|e| CliError::Runtime(anyhow::Error::new(e)))?;
    let est = localize_with_mode(&z1, &z2, &phi, 1, &params, RecoveryMode::Combined);

    let truth = (args.range_bin as f64 * params.range_resolution(), theta);
    let error_m =
        qradar_core::montecarlo::position_error(truth, &est.positions, params.r_max());
    let combined_magnitude = est
        .xhat1
        .iter()
        .zip(&est.xhat2)
        .map(|(a, b)| (a + b).norm())
        .collect();
    let dump = TrialDump {
        seed,
        mn_ratio: args.mn_ratio,
        measurements: m,
        bits: quantizer.bits,
        dithered: quantizer.dithered,
        delta: quantizer.delta,
        scene: scene
            .targets()
            .iter()
            .map(|t| SceneTarget {
                bin: t.bin,
                range_m: t.range_m(&params),
                theta_rad: t.theta_rad,
                amplitude: [t.amplitude.re, t.amplitude.im],
            })
            .collect(),
        plan_indices: plan.indices().to_vec(),
        z1_preview: z1.iter().take(Z_PREVIEW_LEN).map(|v| [v.re, v.im]).collect(),
        z2_preview: z2.iter().take(Z_PREVIEW_LEN).map(|v| [v.re, v.im]).collect(),
        combined_magnitude,
        support: est.support.clone(),
        truncated: est.truncated,
        positions: est.positions.clone(),
        error_m,
        self_mirror_ambiguity: args.range_bin == 0 || 2 * args.range_bin == params.bins,
    };
    let mut text = serde_json::to_string_pretty(&dump)
        .context("serializing the trial dump")?;
    text.push('\n');
    match &args.out {
        Some(path) => {
            output::write_atomic(path, &text)?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}
