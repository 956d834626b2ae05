//! Splitting sequence sets into test packages.

use jnd_core::{Resolution, SequenceId};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackageAssignment {
    /// `1..=P`.
    pub package_id: u32,
    pub sets: Vec<SequenceId>,
    pub seed: u64,
}

/// `count` sequence sets: contents `1..`, each at all four resolutions in turn.
pub fn synthetic_sets(count: usize) -> Vec<SequenceId> {
    (0..count)
        .map(|i| SequenceId::new((i / 4 + 1) as u32, Resolution::ALL[i % 4]))
        .collect()
}

/// Seeded Fisher-Yates shuffle.
pub fn shuffle<T>(items: &mut [T], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..items.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        items.swap(i, j);
    }
}

/// Shuffles the sets, then deals them round-robin into `packages` packages, so
/// sizes differ by at most one.
pub fn partition_packages(sets: &[SequenceId], packages: u32, seed: u64) -> Result<Vec<PackageAssignment>> {
    if sets.is_empty() {
        return Err(Error::Validation("no sequence sets to partition".into()));
    }
    if packages == 0 {
        return Err(Error::Validation("package count must be at least 1".into()));
    }
    let mut order = sets.to_vec();
    order.sort();
    order.dedup();
    if order.len() != sets.len() {
        return Err(Error::Validation("sequence sets must be distinct".into()));
    }
    shuffle(&mut order, seed);
    let mut out: Vec<PackageAssignment> = (1..=packages)
        .map(|package_id| PackageAssignment {
            package_id,
            sets: Vec::new(),
            seed,
        })
        .collect();
    for (i, set) in order.into_iter().enumerate() {
        out[i % packages as usize].sets.push(set);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_campaign_split() {
        let packages = partition_packages(&synthetic_sets(880), 58, 1).unwrap();
        assert_eq!(packages.len(), 58);
        assert!(packages.iter().all(|p| p.sets.len() == 15 || p.sets.len() == 16));
        assert_eq!(packages.iter().map(|p| p.sets.len()).sum::<usize>(), 880);
    }

    #[test]
    fn singletons() {
        let packages = partition_packages(&synthetic_sets(10), 10, 3).unwrap();
        assert!(packages.iter().all(|p| p.sets.len() == 1));
    }

    #[test]
    fn deterministic_in_seed() {
        let sets = synthetic_sets(100);
        assert_eq!(
            partition_packages(&sets, 7, 5).unwrap(),
            partition_packages(&sets, 7, 5).unwrap()
        );
        assert_ne!(
            partition_packages(&sets, 7, 5).unwrap(),
            partition_packages(&sets, 7, 6).unwrap()
        );
    }

    #[test]
    fn every_set_lands_once() {
        let sets = synthetic_sets(97);
        let mut all: Vec<SequenceId> = partition_packages(&sets, 8, 2)
            .unwrap()
            .into_iter()
            .flat_map(|p| p.sets)
            .collect();
        all.sort();
        let mut expected = sets.clone();
        expected.sort();
        assert_eq!(all, expected);
    }

    #[test]
    fn bad_input() {
        assert!(partition_packages(&[], 3, 0).is_err());
        assert!(partition_packages(&synthetic_sets(4), 0, 0).is_err());
        let dup = [synthetic_sets(1)[0]; 2];
        assert!(partition_packages(&dup, 1, 0).is_err());
    }
}
