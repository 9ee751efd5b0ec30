//! Seed derivation and uniform sampling of grid allocations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::domain::{BudgetAllocation, ISSUES};

pub type SeededRng = ChaCha8Rng;

/// Maximum number of rejection-sampling attempts per question.
pub const REJECTION_CAP: usize = 10_000;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Stable child seed for stream `label`/`index` under `root`.
pub fn derive_seed(root: u64, label: &str, index: u64) -> u64 {
    let mut h = splitmix64(root);
    h = splitmix64(h ^ fnv1a(label.as_bytes()));
    splitmix64(h ^ index)
}

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rng for stream `label`/`index` under `root`.
pub fn stream(root: u64, label: &str, index: u64) -> SeededRng {
    rng_from_seed(derive_seed(root, label, index))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SamplingError {
    #[error("no allocation satisfies the sampling constraints")]
    Unsatisfiable,
}

/// Constraints for random allocations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct RandomAllocationConfig {
    /// Grid step in whole points.
    pub grid: i64,
    /// Smallest allowed entry in whole points.
    pub min_entry: i64,
    pub require_all_positive: bool,
}

impl Default for RandomAllocationConfig {
    fn default() -> Self {
        RandomAllocationConfig {
            grid: 5,
            min_entry: 0,
            require_all_positive: false,
        }
    }
}

/// Enumerates every allocation matching a config and draws uniformly from it.
#[derive(Clone, Debug)]
pub struct GridSampler {
    points: Vec<BudgetAllocation>,
}

impl GridSampler {
    pub fn new(config: RandomAllocationConfig) -> Result<Self, SamplingError> {
        if config.grid <= 0 || 100 % config.grid != 0 {
            return Err(SamplingError::Unsatisfiable);
        }
        let lo = config.min_entry.max(if config.require_all_positive { 1 } else { 0 });
        let mut points = Vec::new();
        let mut a = 0;
        while a <= 100 {
            let mut b = 0;
            while a + b <= 100 {
                let c = 100 - a - b;
                if a >= lo && b >= lo && c >= lo {
                    let entries: [Amount; ISSUES] = [a, b, c].map(Amount::from_points);
                    points.push(BudgetAllocation::new(entries).expect("sums to 100"));
                }
                b += config.grid;
            }
            a += config.grid;
        }
        if points.is_empty() {
            Err(SamplingError::Unsatisfiable)
        } else {
            Ok(GridSampler { points })
        }
    }

    /// Multiples of 5, no further constraints.
    pub fn grid5() -> Self {
        Self::new(RandomAllocationConfig::default()).expect("grid5 simplex is non-empty")
    }

    pub fn points(&self) -> &[BudgetAllocation] {
        &self.points
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BudgetAllocation {
        self.points[rng.random_range(0..self.points.len())]
    }
}

/// One uniform draw under `config`.
pub fn sample_random_allocation<R: Rng + ?Sized>(
    config: RandomAllocationConfig,
    rng: &mut R,
) -> Result<BudgetAllocation, SamplingError> {
    Ok(GridSampler::new(config)?.sample(rng))
}
