//! Monte Carlo campaigns, configuration and file formats on top of
//! [`eigdyn_core`].

pub mod campaign;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;

pub use campaign::{run_campaign, CampaignSummary, Verdict};
pub use config::{Check, RunConfig};
pub use error::{Error, Result};
