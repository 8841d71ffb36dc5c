//! Library side of the `qradar` command-line tool: scenario presets, error
//! map serialization, and the campaign/trial drivers. The binary in
//! `main.rs` is a thin argument-parsing wrapper so integration tests can
//! exercise everything here directly.

pub mod output;
pub mod presets;
pub mod run;

pub use run::{cmd_campaign, cmd_trial, CampaignArgs, CliError, FileFormat, Switch, TrialArgs};
