use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal, StandardUniform};

use crate::dataset::SequenceId;
use crate::error::{Error, Result};
use crate::search::{ComparisonRequest, Response};

const LOWEST_THRESHOLD: f64 = 1.0;
const HIGHEST_THRESHOLD: f64 = 51.0;
const MAX_REJECTIONS: usize = 10_000;

// Stream tags, combined with the subject id.
const STREAM_POPULATION: u64 = 1;
const STREAM_RESPONSE: u64 = 2;
const STREAM_RESAMPLE: u64 = 3;

fn stream(master_seed: u64, tag: u64, subject: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(tag << 32 | u64::from(subject));
    rng
}

/// Threshold distribution of one JND level of one sequence, in QP units.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevelSpec {
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SequenceSpec {
    pub id: SequenceId,
    /// Level `k` (1-based JND index) is `levels[k - 1]`.
    pub levels: Vec<LevelSpec>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PopulationSpec {
    pub subject_count: usize,
    pub sequences: Vec<SequenceSpec>,
    pub lapse_rate: f64,
    /// Weight of the subject-level sensitivity shared by all of a subject's
    /// thresholds, in `[0, 1]`. 0 makes the sequences of a subject independent.
    pub consistency: f64,
    pub master_seed: u64,
}

impl PopulationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.subject_count < 2 {
            return Err(Error::param("subject_count", "need at least two subjects"));
        }
        if self.sequences.is_empty() {
            return Err(Error::param("sequences", "need at least one sequence"));
        }
        if !(0.0..0.5).contains(&self.lapse_rate) {
            return Err(Error::param("lapse_rate", "must lie in [0, 0.5)"));
        }
        if !(0.0..=1.0).contains(&self.consistency) {
            return Err(Error::param("consistency", "must lie in [0, 1]"));
        }
        for seq in &self.sequences {
            if seq.levels.is_empty() {
                return Err(Error::param("levels", "every sequence needs at least one JND level"));
            }
            if seq
                .levels
                .iter()
                .any(|l| !l.mean.is_finite() || !l.sd.is_finite() || l.sd < 0.0)
            {
                return Err(Error::param("levels", "level means must be finite and SDs >= 0"));
            }
        }
        Ok(())
    }

    pub fn level(&self, sequence: SequenceId, jnd_index: u8) -> Option<LevelSpec> {
        let seq = self.sequences.iter().find(|s| s.id == sequence)?;
        seq.levels.get(usize::from(jnd_index).checked_sub(1)?).copied()
    }
}

/// A simulated observer with a latent JND threshold per sequence and level.
///
/// The observer answers "noticeable" iff the probe QP is at or above its
/// threshold, and flips the answer with probability `lapse_rate`.
#[derive(Debug, Clone)]
pub struct LatentSubject {
    id: u32,
    thresholds: BTreeMap<(SequenceId, u8), f64>,
    /// Shared standard-normal offset behind all thresholds of this subject.
    sensitivity: f64,
    lapse_rate: f64,
    response_rng: ChaCha8Rng,
    resample_rng: ChaCha8Rng,
}

impl LatentSubject {
    /// A subject with explicit thresholds. Thresholds above 51 model a JND beyond
    /// the tested range.
    pub fn new(id: u32, thresholds: BTreeMap<(SequenceId, u8), f64>, lapse_rate: f64, seed: u64) -> Result<Self> {
        if !(0.0..0.5).contains(&lapse_rate) {
            return Err(Error::param("lapse_rate", "must lie in [0, 0.5)"));
        }
        if thresholds.values().any(|&t| t.is_nan() || t < LOWEST_THRESHOLD) {
            return Err(Error::param("thresholds", "thresholds must be at least 1"));
        }
        Ok(LatentSubject {
            id,
            thresholds,
            sensitivity: 0.0,
            lapse_rate,
            response_rng: stream(seed, STREAM_RESPONSE, id),
            resample_rng: stream(seed, STREAM_RESAMPLE, id),
        })
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn lapse_rate(&self) -> f64 {
        self.lapse_rate
    }

    pub fn set_lapse_rate(&mut self, lapse_rate: f64) -> Result<()> {
        if !(0.0..0.5).contains(&lapse_rate) {
            return Err(Error::param("lapse_rate", "must lie in [0, 0.5)"));
        }
        self.lapse_rate = lapse_rate;
        Ok(())
    }

    pub fn threshold(&self, sequence: SequenceId, jnd_index: u8) -> Option<f64> {
        self.thresholds.get(&(sequence, jnd_index)).copied()
    }

    pub fn thresholds(&self) -> &BTreeMap<(SequenceId, u8), f64> {
        &self.thresholds
    }

    pub fn respond(&mut self, sequence: SequenceId, jnd_index: u8, request: &ComparisonRequest) -> Result<Response> {
        let threshold = self
            .threshold(sequence, jnd_index)
            .ok_or(Error::MissingThreshold { sequence, jnd_index })?;
        let noticeable = request.probe_qp.as_f64() >= threshold;
        // Always draw so the stream position does not depend on the lapse rate.
        let u: f64 = StandardUniform.sample(&mut self.response_rng);
        let flipped = u < self.lapse_rate;
        Ok(if noticeable != flipped {
            Response::Noticeable
        } else {
            Response::Unnoticeable
        })
    }

    /// Redraws the threshold of `(sequence, jnd_index)` until it lies above
    /// `floor`. Returns whether the threshold changed. A floor at or above 51
    /// places the threshold beyond the tested range.
    pub(crate) fn ensure_above(
        &mut self,
        sequence: SequenceId,
        jnd_index: u8,
        floor: f64,
        level: LevelSpec,
        consistency: f64,
    ) -> Result<bool> {
        let current = self
            .threshold(sequence, jnd_index)
            .ok_or(Error::MissingThreshold { sequence, jnd_index })?;
        if current > floor {
            return Ok(false);
        }
        let next = if floor >= HIGHEST_THRESHOLD {
            HIGHEST_THRESHOLD + 1.0
        } else {
            let lo = floor.max(LOWEST_THRESHOLD);
            let drawn = (0..MAX_REJECTIONS)
                .map(|_| draw_threshold(&mut self.resample_rng, level, consistency, self.sensitivity))
                .find(|&x| x > lo && x <= HIGHEST_THRESHOLD);
            drawn.unwrap_or_else(|| {
                let u: f64 = StandardUniform.sample(&mut self.resample_rng);
                HIGHEST_THRESHOLD - (HIGHEST_THRESHOLD - lo) * u
            })
        };
        self.thresholds.insert((sequence, jnd_index), next);
        Ok(true)
    }
}

fn draw_threshold(rng: &mut ChaCha8Rng, level: LevelSpec, consistency: f64, sensitivity: f64) -> f64 {
    let e: f64 = StandardNormal.sample(rng);
    let own = libm::sqrt(1.0 - consistency * consistency);
    level.mean + level.sd * (consistency * sensitivity + own * e)
}

/// Thresholds of every level of one sequence. The subject's standardized
/// deviation is drawn once per sequence and shared by its levels, so the levels
/// stay ordered whenever the level means grow faster than the SDs shrink. Draws
/// with any level outside `[1, 51]` are rejected.
fn sequence_thresholds(rng: &mut ChaCha8Rng, levels: &[LevelSpec], consistency: f64, sensitivity: f64) -> Vec<f64> {
    let at = |z: f64| -> Vec<f64> { levels.iter().map(|l| l.mean + l.sd * z).collect() };
    let in_range = |ts: &[f64]| ts.iter().all(|t| (LOWEST_THRESHOLD..=HIGHEST_THRESHOLD).contains(t));
    let own = libm::sqrt(1.0 - consistency * consistency);
    for _ in 0..MAX_REJECTIONS {
        let e: f64 = StandardNormal.sample(rng);
        let ts = at(consistency * sensitivity + own * e);
        if in_range(&ts) {
            return ts;
        }
    }
    levels
        .iter()
        .map(|l| l.mean.clamp(LOWEST_THRESHOLD, HIGHEST_THRESHOLD))
        .collect()
}

/// A sampled population together with the spec it came from.
#[derive(Debug, Clone)]
pub struct Population {
    pub spec: PopulationSpec,
    /// Sorted by subject id.
    pub subjects: Vec<LatentSubject>,
}

/// Draws `subject_count` subjects with ids `1..=subject_count`. Deterministic in
/// the master seed.
pub fn sample_population(spec: &PopulationSpec) -> Result<Population> {
    spec.validate()?;
    let subjects = (1..=spec.subject_count as u32)
        .map(|id| {
            let mut rng = stream(spec.master_seed, STREAM_POPULATION, id);
            let sensitivity: f64 = StandardNormal.sample(&mut rng);
            let mut thresholds = BTreeMap::new();
            for seq in &spec.sequences {
                let ts = sequence_thresholds(&mut rng, &seq.levels, spec.consistency, sensitivity);
                for (k, t) in ts.into_iter().enumerate() {
                    thresholds.insert((seq.id, k as u8 + 1), t);
                }
            }
            LatentSubject {
                id,
                thresholds,
                sensitivity,
                lapse_rate: spec.lapse_rate,
                response_rng: stream(spec.master_seed, STREAM_RESPONSE, id),
                resample_rng: stream(spec.master_seed, STREAM_RESAMPLE, id),
            }
        })
        .collect();
    Ok(Population {
        spec: spec.clone(),
        subjects,
    })
}
