//! Shared inputs for the benchmarks.

use budgetpoll_core::agents::{run_cohort, sample_ideals, AgentSpec, CohortOutput};
use budgetpoll_core::generators::BatteryConfig;
use budgetpoll_core::{BatteryKind, UtilityModel};

/// `n` noisy ℓ1 agents with strictly positive ideals.
pub fn cohort(n: usize, seed: u64) -> Vec<AgentSpec> {
    sample_ideals(n, seed, true)
        .into_iter()
        .map(|ideal| AgentSpec::new(ideal, UtilityModel::L1).with_noise(0.1))
        .collect()
}

pub fn responses(kind: BatteryKind, n: usize, seed: u64) -> CohortOutput {
    run_cohort(&cohort(n, seed), &BatteryConfig::default_for(kind), seed)
}
