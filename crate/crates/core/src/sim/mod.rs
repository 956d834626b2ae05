//! Simulated observers and multi-JND campaigns.
//!
//! Every subject draws from its own ChaCha streams derived from the master seed
//! and the subject id, so results do not depend on the order subjects are run in.

mod campaign;
mod planted;
mod subject;

pub use campaign::{
    compare_procedures, deterministic_comparison_counts, run_campaign, CampaignResult, ComparisonCounts, HaltEntry,
    HaltReason, RobustnessRow, RoundSummary,
};
pub use planted::{plant_outliers, PlantSpec, PlantedTruth};
pub use subject::{sample_population, LatentSubject, LevelSpec, Population, PopulationSpec, SequenceSpec};
