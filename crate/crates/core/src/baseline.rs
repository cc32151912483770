//! Seeded random sampling without replacement, the comparison method.
//!
//! The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`,
//! and bounded integers come from Lemire's multiply-and-reject method on raw
//! `u64` draws. Both are fixed here rather than delegated to a shuffle helper
//! whose algorithm could change between library versions, so a published
//! seed reproduces the same partition on any platform.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::partition::{check_k, Method, Partition, PartitionError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        Self(seed)
    }
}

/// Uniform integer in `0..bound` without modulo bias.
fn bounded(rng: &mut impl RngCore, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let m = u128::from(rng.next_u64()) * u128::from(bound);
        if (m as u64) >= threshold {
            return (m >> 64) as u64;
        }
    }
}

/// Fisher-Yates shuffle of `0..n`.
pub fn shuffled_indices(n: usize, seed: RngSeed) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = bounded(&mut rng, i as u64 + 1) as usize;
        idx.swap(i, j);
    }
    idx
}

/// Shuffles the rows and deals them round-robin into `k` clusters.
pub fn random_partition(d: &Dataset, k: usize, seed: RngSeed) -> Result<Partition, PartitionError> {
    check_k(k, 2, d.n_rows())?;
    let mut clusters = vec![Vec::with_capacity(d.n_rows() / k + 1); k];
    for (pos, row) in shuffled_indices(d.n_rows(), seed).into_iter().enumerate() {
        clusters[pos % k].push(row);
    }
    Ok(Partition {
        method: Method::Random,
        k,
        seed: Some(seed.0),
        source_n: d.n_rows(),
        clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(n: usize) -> Dataset {
        Dataset::from_unnamed_rows((0..n).map(|i| vec![i as f64]).collect()).unwrap()
    }

    #[test]
    fn even_split() {
        let p = random_partition(&data(4), 2, RngSeed(7)).unwrap();
        assert_eq!(p.sizes(), vec![2, 2]);
        p.validate(4).unwrap();
        assert_eq!(p.method, Method::Random);
        assert_eq!(p.seed, Some(7));
    }

    #[test]
    fn remainder_goes_to_first_cluster() {
        let p = random_partition(&data(5), 2, RngSeed(1)).unwrap();
        assert_eq!(p.sizes(), vec![3, 2]);
        assert!(p.is_balanced());
    }

    #[test]
    fn deterministic_per_seed() {
        let d = data(50);
        let a = random_partition(&d, 3, RngSeed(42)).unwrap();
        let b = random_partition(&d, 3, RngSeed(42)).unwrap();
        assert_eq!(a, b);
        let c = random_partition(&d, 3, RngSeed(43)).unwrap();
        assert_ne!(a.clusters, c.clusters);
    }

    #[test]
    fn k_out_of_range() {
        assert!(random_partition(&data(3), 1, RngSeed(0)).is_err());
        assert!(random_partition(&data(3), 4, RngSeed(0)).is_err());
    }

    #[test]
    fn stream_is_pinned() {
        // Frozen output; a change here means published seeds no longer reproduce.
        assert_eq!(shuffled_indices(10, RngSeed(42)), PINNED_SEED_42);
    }

    const PINNED_SEED_42: [usize; 10] = [9, 7, 2, 5, 0, 1, 4, 3, 8, 6];

    #[test]
    fn bounded_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for bound in [1u64, 2, 3, 7, 1000, u64::MAX] {
            for _ in 0..100 {
                assert!(bounded(&mut rng, bound) < bound);
            }
        }
    }
}
