#![allow(dead_code)]

use jnd_core::sim::{LevelSpec, PopulationSpec, SequenceSpec};
use jnd_core::{Resolution, SequenceId};

/// `sequences` sequence sets cycling through the four resolutions, each with the
/// given `(mean, sd)` per JND level.
pub fn population_spec(
    subjects: usize,
    sequences: u32,
    levels: &[(f64, f64)],
    lapse_rate: f64,
    seed: u64,
) -> PopulationSpec {
    PopulationSpec {
        subject_count: subjects,
        sequences: (0..sequences)
            .map(|i| SequenceSpec {
                id: SequenceId::new(i / 4 + 1, Resolution::ALL[(i % 4) as usize]),
                levels: levels.iter().map(|&(mean, sd)| LevelSpec { mean, sd }).collect(),
            })
            .collect(),
        lapse_rate,
        consistency: 0.9,
        master_seed: seed,
    }
}
