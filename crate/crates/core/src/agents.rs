//! Synthetic respondents that answer questions under a utility model.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{BudgetAllocation, IdealBudget};
use crate::generators::{build_battery, BatteryConfig, GenError};
use crate::question::{BatteryKind, Question, QuestionOptions};
use crate::response::{Answer, ResponseRecord};
use crate::rng::{derive_seed, stream, GridSampler, RandomAllocationConfig};
use crate::utility::{Score, UtilityError, UtilityModel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AgentError {
    #[error("invalid agent: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Utility(#[from] UtilityError),
}

fn default_year_weights() -> [f64; 2] {
    [1.0, 1.0]
}

/// A synthetic respondent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub ideal: IdealBudget,
    pub model: UtilityModel,
    /// Probability of answering uniformly at random.
    #[serde(default)]
    pub noise_rate: f64,
    /// Weights of year 1 and year 2 when scoring a two-year option.
    #[serde(default = "default_year_weights")]
    pub biennial_year_weights: [f64; 2],
}

impl AgentSpec {
    pub fn new(ideal: IdealBudget, model: UtilityModel) -> Self {
        AgentSpec {
            ideal,
            model,
            noise_rate: 0.0,
            biennial_year_weights: default_year_weights(),
        }
    }

    pub fn with_noise(mut self, noise_rate: f64) -> Self {
        self.noise_rate = noise_rate;
        self
    }

    pub fn with_year_weights(mut self, w1: f64, w2: f64) -> Self {
        self.biennial_year_weights = [w1, w2];
        self
    }

    pub fn participant_id(&self) -> &str {
        &self.ideal.participant_id
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return Err(AgentError::InvalidSpec(format!(
                "noise rate {} is outside [0, 1]",
                self.noise_rate
            )));
        }
        let [w1, w2] = self.biennial_year_weights;
        if !(w1.is_finite() && w2.is_finite() && w1 >= 0.0 && w2 >= 0.0 && w1 + w2 > 0.0) {
            return Err(AgentError::InvalidSpec(
                "year weights must be non-negative with a positive sum".into(),
            ));
        }
        self.model.validate()?;
        Ok(())
    }

    fn score_options(&self, question: &Question) -> Result<Vec<Score>, AgentError> {
        let p = self.ideal.peak();
        let score = |q: &BudgetAllocation| self.model.score(p, q);
        match &question.options {
            QuestionOptions::Allocations(v) => Ok(v.iter().map(score).collect::<Result<_, _>>()?),
            QuestionOptions::Biennial(v) => {
                let [w1, w2] = self.biennial_year_weights;
                v.iter()
                    .map(|o| Ok(score(&o.year1)?.weighted_sum(w1, &score(&o.year2)?, w2)))
                    .collect()
            }
        }
    }
}

/// The agent's answer to one question, in displayed option indices.
pub fn answer<R: Rng + ?Sized>(
    agent: &AgentSpec,
    battery_kind: BatteryKind,
    question: &Question,
    rng: &mut R,
) -> Result<ResponseRecord, AgentError> {
    agent.validate()?;
    let n = question.option_count();
    let is_ranking = question.kind == crate::question::QuestionKind::Ranking;
    let noisy = agent.noise_rate > 0.0 && rng.random_bool(agent.noise_rate);
    let (ans, tie_broken) = if noisy {
        if is_ranking {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            (Answer::Ranking(order), false)
        } else {
            (Answer::Choice(rng.random_range(0..n)), false)
        }
    } else {
        let scores = agent.score_options(question)?;
        let mut order: Vec<usize> = (0..n).collect();
        // shuffle first so the stable sort breaks ties uniformly at random
        order.shuffle(rng);
        order.sort_by(|&a, &b| scores[b].compare(&scores[a]));
        let tied = order
            .windows(2)
            .any(|w| scores[w[0]].compare(&scores[w[1]]) == Ordering::Equal);
        if is_ranking {
            (Answer::Ranking(order), tied)
        } else {
            let top_tied = scores[order[0]].compare(&scores[order[1]]) == Ordering::Equal;
            (Answer::Choice(order[0]), top_tied)
        }
    };
    let mut record = ResponseRecord::new(agent.participant_id(), battery_kind, question, ans);
    record.tie_broken = tie_broken;
    Ok(record)
}

/// Responses from a cohort run plus the agents whose battery could not be
/// generated.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CohortOutput {
    pub records: Vec<ResponseRecord>,
    pub failures: Vec<CohortFailure>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("participant {participant_id}: {reason}")]
pub struct CohortFailure {
    pub participant_id: String,
    pub reason: String,
    pub exhausted: bool,
}

/// Seed of the battery generated for `participant_id` under a cohort seed.
pub fn battery_seed(seed: u64, participant_id: &str) -> u64 {
    derive_seed(seed, &format!("battery:{participant_id}"), 0)
}

/// Seed of the answer stream for `participant_id` under a cohort seed.
pub fn answer_seed(seed: u64, participant_id: &str) -> u64 {
    derive_seed(seed, &format!("answer:{participant_id}"), 0)
}

fn run_agent(
    spec: &AgentSpec,
    plan: &BatteryConfig,
    seed: u64,
) -> Result<Vec<ResponseRecord>, CohortFailure> {
    let fail = |reason: String, exhausted: bool| CohortFailure {
        participant_id: spec.participant_id().to_string(),
        reason,
        exhausted,
    };
    spec.validate().map_err(|e| fail(e.to_string(), false))?;
    let battery = build_battery(&spec.ideal, plan, battery_seed(seed, spec.participant_id()))
        .map_err(|e: GenError| fail(e.to_string(), e.is_exhaustion()))?;
    let mut rng = crate::rng::rng_from_seed(answer_seed(seed, spec.participant_id()));
    battery
        .questions
        .iter()
        .map(|q| answer(spec, battery.battery_kind, q, &mut rng).map_err(|e| fail(e.to_string(), false)))
        .collect()
}

/// Generates and answers a battery for every agent, in parallel.
///
/// Output order follows `specs`; per-agent streams depend only on the cohort
/// seed and the participant id.
pub fn run_cohort(specs: &[AgentSpec], plan: &BatteryConfig, seed: u64) -> CohortOutput {
    let results: Vec<_> = specs.par_iter().map(|s| run_agent(s, plan, seed)).collect();
    let mut out = CohortOutput::default();
    for r in results {
        match r {
            Ok(records) => out.records.extend(records),
            Err(f) => out.failures.push(f),
        }
    }
    out
}

/// `n` ideals drawn uniformly from grid allocations with at least two funded
/// issues (every issue funded when `all_positive`), ids `agent-000`...
pub fn sample_ideals(n: usize, seed: u64, all_positive: bool) -> Vec<IdealBudget> {
    let sampler = GridSampler::new(RandomAllocationConfig {
        require_all_positive: all_positive,
        ..Default::default()
    })
    .expect("satisfiable");
    let candidates: Vec<BudgetAllocation> = sampler
        .points()
        .iter()
        .copied()
        .filter(|p| p.positive_count() >= 2)
        .collect();
    let mut rng = stream(seed, "ideals", 0);
    (0..n)
        .map(|i| {
            let p = candidates[rng.random_range(0..candidates.len())];
            IdealBudget::new(format!("agent-{i:03}"), p).expect("filtered")
        })
        .collect()
}

/// A homogeneous cohort description, as read by the command-line tool.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub n: usize,
    pub model: UtilityModel,
    #[serde(default)]
    pub noise_rate: f64,
    #[serde(default = "default_year_weights")]
    pub biennial_year_weights: [f64; 2],
    #[serde(default)]
    pub all_positive: bool,
}

impl CohortSpec {
    pub fn agents(&self, seed: u64) -> Vec<AgentSpec> {
        sample_ideals(self.n, seed, self.all_positive)
            .into_iter()
            .map(|ideal| AgentSpec {
                ideal,
                model: self.model.clone(),
                noise_rate: self.noise_rate,
                biennial_year_weights: self.biennial_year_weights,
            })
            .collect()
    }
}
