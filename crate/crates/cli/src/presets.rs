//! Frozen scenario presets, one per published experiment panel.

use qradar_core::montecarlo::CampaignConfig;
use qradar_core::quantizer::{default_one_bit_delta, QuantizerConfig};
use qradar_core::radar::RadarParams;
use qradar_core::recovery::RecoveryMode;

/// One named scenario: measurement ratio, sparsity, quantizer mode, and the
/// support-selection rule.
#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub ratio_mn: f64,
    pub targets: usize,
    pub bits: u32,
    pub dithered: bool,
    pub recovery: RecoveryMode,
}

/// The eight shipped presets. `fig2c` reruns the 200% one-bit dithered
/// scenario with support selection on the first antenna alone, the earlier
/// single-profile scheme that channel dropping breaks.
pub const PRESETS: &[Preset] = &[
    Preset { name: "fig2a", ratio_mn: 0.2, targets: 1, bits: 1, dithered: true, recovery: RecoveryMode::Combined },
    Preset { name: "fig2b", ratio_mn: 2.0, targets: 1, bits: 1, dithered: true, recovery: RecoveryMode::Combined },
    Preset { name: "fig2c", ratio_mn: 2.0, targets: 1, bits: 1, dithered: true, recovery: RecoveryMode::FirstAntennaOnly },
    Preset { name: "fig2d", ratio_mn: 2.0, targets: 1, bits: 1, dithered: false, recovery: RecoveryMode::Combined },
    Preset { name: "fig3a", ratio_mn: 2.0, targets: 2, bits: 1, dithered: false, recovery: RecoveryMode::Combined },
    Preset { name: "fig3b", ratio_mn: 2.0, targets: 2, bits: 1, dithered: true, recovery: RecoveryMode::Combined },
    Preset { name: "fig3c", ratio_mn: 0.0625, targets: 2, bits: 32, dithered: false, recovery: RecoveryMode::Combined },
    Preset { name: "fig3d", ratio_mn: 1.0, targets: 2, bits: 32, dithered: false, recovery: RecoveryMode::Combined },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

impl Preset {
    /// Expands the preset into a campaign configuration with default radar
    /// parameters and the default dither scale for its sparsity.
    pub fn campaign_config(&self) -> CampaignConfig {
        let quantizer = if self.bits >= 32 {
            QuantizerConfig::passthrough()
        } else {
            QuantizerConfig::new(self.bits, default_one_bit_delta(self.targets), self.dithered)
                .expect("preset quantizer is valid")
        };
        let mut cfg =
            CampaignConfig::new(RadarParams::default(), self.ratio_mn, self.targets, quantizer);
        cfg.recovery = self.recovery;
        cfg
    }
}
