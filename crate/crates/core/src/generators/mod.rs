//! Question-battery generators.
//!
//! Each generator is a pure function of the ideal budget, its configuration
//! and a root seed. Random draws come from per-question streams derived from
//! the root seed, so inserting alertness checks or shuffling options never
//! perturbs the generated content.

mod alertness;
mod biennial;
mod concentrated;
mod convex;
mod disagreement;
mod peak_linear;
mod ranking;
mod shuffle;
mod symmetry;
mod triangle;

use serde::{Deserialize, Serialize};

use crate::amount::Weight;
use crate::domain::{BudgetAllocation, DomainError, IdealBudget};
use crate::question::{BatteryKind, Generator, Question, QuestionBattery};
use crate::utility::{UtilityError, UtilityModel};

pub use alertness::insert_alertness_checks;
pub use biennial::{biennial_question, gen_biennial};
pub use concentrated::{
    concentrated_pair, default_fallback_vectors, gen_concentrated_vs_distributed, x_base,
    FallbackVectors, MAGNITUDE_LEVELS,
};
pub use convex::{convex_question, gen_convex_combinations, round_to_grid5, DEFAULT_LAMBDAS};
pub use disagreement::gen_model_disagreement;
pub use peak_linear::{gen_peak_linear, EXTREMES, PEAK_LINEAR_LAMBDAS};
pub use ranking::{cyclic_question, cyclic_shift_options, gen_cyclic_asymmetry_ranking, x_lambda, RANKING_LAMBDAS};
pub use shuffle::shuffle_option_order;
pub use symmetry::{gen_project_symmetry, gen_sign_symmetry, project_set, sign_set};
pub use triangle::{gen_triangle_split, split, triangle_questions, SplitRule};

pub use crate::rng::{
    sample_random_allocation, GridSampler, RandomAllocationConfig, SamplingError, REJECTION_CAP,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("{generator:?}: no acceptable question after {attempts} attempts")]
    GenerationExhausted { generator: Generator, attempts: usize },
    #[error("option {option} is not a valid allocation: {source}")]
    InvalidOptions { option: usize, source: DomainError },
    #[error("fallback vectors are invalid for issue {category} at level {level}")]
    FallbackExhausted { category: usize, level: u8 },
    #[error("ideal budget is not eligible: {0}")]
    Ineligible(DomainError),
    #[error(transparent)]
    Utility(#[from] UtilityError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
}

impl GenError {
    /// True when the ideal cannot support the battery (as opposed to a bad
    /// configuration).
    pub fn is_exhaustion(&self) -> bool {
        matches!(
            self,
            GenError::GenerationExhausted { .. }
                | GenError::FallbackExhausted { .. }
                | GenError::InvalidOptions { .. }
        )
    }
}

fn default_k_disagreement() -> usize {
    10
}
fn default_k_project() -> usize {
    4
}
fn default_k_sign() -> usize {
    6
}
fn default_k_biennial() -> usize {
    4
}
fn default_k_triangle() -> usize {
    2
}
fn default_lambdas() -> Vec<Weight> {
    DEFAULT_LAMBDAS
        .iter()
        .map(|&h| Weight::from_hundredths(h).expect("valid weight"))
        .collect()
}
fn default_true() -> bool {
    true
}

/// Generator-specific parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorConfig {
    ModelDisagreement {
        model_a: UtilityModel,
        model_b: UtilityModel,
        #[serde(default = "default_k_disagreement")]
        k: usize,
    },
    SinglePeaked {
        #[serde(default = "default_lambdas")]
        lambdas: Vec<Weight>,
        #[serde(default)]
        avoid_peak: bool,
    },
    SinglePeakedRounded {
        #[serde(default = "default_lambdas")]
        lambdas: Vec<Weight>,
        #[serde(default)]
        avoid_peak: bool,
    },
    PeakLinear,
    ProjectSymmetry {
        #[serde(default = "default_k_project")]
        k: usize,
    },
    SignSymmetry {
        #[serde(default = "default_k_sign")]
        k: usize,
    },
    CyclicRanking,
    ConcentratedVsDistributed {
        #[serde(default)]
        fallback: Option<FallbackVectors>,
    },
    Biennial {
        #[serde(default = "default_k_biennial")]
        k: usize,
    },
    TriangleSplit {
        #[serde(default = "default_k_triangle")]
        k: usize,
        #[serde(default)]
        split_rule: SplitRule,
    },
}

impl GeneratorConfig {
    /// Default parameters for a battery kind. Model disagreement
    /// defaults to ℓ1 versus ℓ2.
    pub fn default_for(kind: BatteryKind) -> Self {
        match kind {
            BatteryKind::ModelDisagreement => GeneratorConfig::ModelDisagreement {
                model_a: UtilityModel::L1,
                model_b: UtilityModel::L2,
                k: default_k_disagreement(),
            },
            BatteryKind::SinglePeaked => GeneratorConfig::SinglePeaked {
                lambdas: default_lambdas(),
                avoid_peak: false,
            },
            BatteryKind::SinglePeakedRounded => GeneratorConfig::SinglePeakedRounded {
                lambdas: default_lambdas(),
                avoid_peak: false,
            },
            BatteryKind::PeakLinear => GeneratorConfig::PeakLinear,
            BatteryKind::ProjectSymmetry => GeneratorConfig::ProjectSymmetry {
                k: default_k_project(),
            },
            BatteryKind::SignSymmetry => GeneratorConfig::SignSymmetry {
                k: default_k_sign(),
            },
            BatteryKind::CyclicRanking => GeneratorConfig::CyclicRanking,
            BatteryKind::ConcentratedVsDistributed => {
                GeneratorConfig::ConcentratedVsDistributed { fallback: None }
            }
            BatteryKind::Biennial => GeneratorConfig::Biennial {
                k: default_k_biennial(),
            },
            BatteryKind::TriangleSplit => GeneratorConfig::TriangleSplit {
                k: default_k_triangle(),
                split_rule: SplitRule::default(),
            },
        }
    }

    pub fn battery_kind(&self) -> BatteryKind {
        match self {
            GeneratorConfig::ModelDisagreement { .. } => BatteryKind::ModelDisagreement,
            GeneratorConfig::SinglePeaked { .. } => BatteryKind::SinglePeaked,
            GeneratorConfig::SinglePeakedRounded { .. } => BatteryKind::SinglePeakedRounded,
            GeneratorConfig::PeakLinear => BatteryKind::PeakLinear,
            GeneratorConfig::ProjectSymmetry { .. } => BatteryKind::ProjectSymmetry,
            GeneratorConfig::SignSymmetry { .. } => BatteryKind::SignSymmetry,
            GeneratorConfig::CyclicRanking => BatteryKind::CyclicRanking,
            GeneratorConfig::ConcentratedVsDistributed { .. } => {
                BatteryKind::ConcentratedVsDistributed
            }
            GeneratorConfig::Biennial { .. } => BatteryKind::Biennial,
            GeneratorConfig::TriangleSplit { .. } => BatteryKind::TriangleSplit,
        }
    }

    /// Whether participants with an unfunded issue are screened out.
    pub fn requires_all_positive(&self) -> bool {
        match self {
            GeneratorConfig::ModelDisagreement {
                model_a, model_b, ..
            } => model_a.requires_all_positive() || model_b.requires_all_positive(),
            // a negative deviation rotated onto a zero entry leaves the simplex
            GeneratorConfig::ProjectSymmetry { .. }
            | GeneratorConfig::CyclicRanking
            | GeneratorConfig::ConcentratedVsDistributed { .. }
            | GeneratorConfig::TriangleSplit { .. } => true,
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let positive = |k: usize, name: &str| {
            if k == 0 {
                Err(GenError::InvalidConfig(format!("{name} must be at least 1")))
            } else {
                Ok(())
            }
        };
        match self {
            GeneratorConfig::ModelDisagreement {
                model_a,
                model_b,
                k,
            } => {
                positive(*k, "k")?;
                model_a.validate()?;
                model_b.validate()?;
                Ok(())
            }
            GeneratorConfig::SinglePeaked { lambdas, .. }
            | GeneratorConfig::SinglePeakedRounded { lambdas, .. } => {
                if lambdas.is_empty() {
                    return Err(GenError::InvalidConfig("lambdas must be non-empty".into()));
                }
                match lambdas.iter().find(|l| !l.is_interior()) {
                    Some(l) => Err(GenError::InvalidConfig(format!(
                        "lambda {l} is outside (0, 1)"
                    ))),
                    None => Ok(()),
                }
            }
            GeneratorConfig::ProjectSymmetry { k }
            | GeneratorConfig::SignSymmetry { k }
            | GeneratorConfig::Biennial { k }
            | GeneratorConfig::TriangleSplit { k, .. } => positive(*k, "k"),
            GeneratorConfig::PeakLinear
            | GeneratorConfig::CyclicRanking
            | GeneratorConfig::ConcentratedVsDistributed { .. } => Ok(()),
        }
    }

    /// Number of questions the generator emits, before alertness checks.
    pub fn question_count(&self) -> usize {
        match self {
            GeneratorConfig::ModelDisagreement { k, .. } => *k,
            GeneratorConfig::SinglePeaked { lambdas, .. }
            | GeneratorConfig::SinglePeakedRounded { lambdas, .. } => lambdas.len(),
            GeneratorConfig::PeakLinear => 12,
            GeneratorConfig::ProjectSymmetry { k } => 3 * k,
            GeneratorConfig::SignSymmetry { k } => 2 * k,
            GeneratorConfig::CyclicRanking => 4,
            GeneratorConfig::ConcentratedVsDistributed { .. } => 12,
            GeneratorConfig::Biennial { k } => 3 * k,
            GeneratorConfig::TriangleSplit { k, .. } => 2 + 6 * k,
        }
    }
}

/// A generator configuration plus the battery-wide wrapping steps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryConfig {
    #[serde(flatten)]
    pub generator: GeneratorConfig,
    #[serde(default = "default_true")]
    pub alertness: bool,
    #[serde(default = "default_true")]
    pub shuffle: bool,
}

impl BatteryConfig {
    pub fn new(generator: GeneratorConfig) -> Self {
        BatteryConfig {
            generator,
            alertness: true,
            shuffle: true,
        }
    }

    pub fn default_for(kind: BatteryKind) -> Self {
        Self::new(GeneratorConfig::default_for(kind))
    }

    /// Without alertness checks or shuffling.
    pub fn bare(generator: GeneratorConfig) -> Self {
        BatteryConfig {
            generator,
            alertness: false,
            shuffle: false,
        }
    }

    pub fn battery_kind(&self) -> BatteryKind {
        self.generator.battery_kind()
    }

    /// Number of questions a session answers.
    pub fn battery_len(&self) -> usize {
        self.generator.question_count() + if self.alertness { 2 } else { 0 }
    }
}

/// Eligibility filter applied before generation.
pub fn check_eligibility(ideal: &IdealBudget, config: &GeneratorConfig) -> Result<(), GenError> {
    if config.requires_all_positive() {
        ideal.check_all_positive().map_err(GenError::Ineligible)?;
    }
    Ok(())
}

/// Runs the configured generator and returns its questions, unshuffled.
pub fn generate_questions(
    ideal: &IdealBudget,
    config: &GeneratorConfig,
    seed: u64,
) -> Result<Vec<Question>, GenError> {
    config.validate()?;
    check_eligibility(ideal, config)?;
    let p = ideal.peak();
    let questions = match config {
        GeneratorConfig::ModelDisagreement {
            model_a,
            model_b,
            k,
        } => gen_model_disagreement(p, model_a, model_b, *k, seed)?,
        GeneratorConfig::SinglePeaked {
            lambdas,
            avoid_peak,
        } => gen_convex_combinations(p, lambdas, false, *avoid_peak, seed)?,
        GeneratorConfig::SinglePeakedRounded {
            lambdas,
            avoid_peak,
        } => gen_convex_combinations(p, lambdas, true, *avoid_peak, seed)?,
        GeneratorConfig::PeakLinear => gen_peak_linear(p)?,
        GeneratorConfig::ProjectSymmetry { k } => gen_project_symmetry(p, *k, seed)?,
        GeneratorConfig::SignSymmetry { k } => gen_sign_symmetry(p, *k, seed)?,
        GeneratorConfig::CyclicRanking => gen_cyclic_asymmetry_ranking(p)?,
        GeneratorConfig::ConcentratedVsDistributed { fallback } => {
            let fallback = fallback.clone().unwrap_or_else(default_fallback_vectors);
            gen_concentrated_vs_distributed(p, &fallback)?
        }
        GeneratorConfig::Biennial { k } => gen_biennial(p, *k, seed)?,
        GeneratorConfig::TriangleSplit { k, split_rule } => {
            gen_triangle_split(p, *k, *split_rule, seed)?
        }
    };
    Ok(questions)
}

/// Builds the full battery a participant answers: generated questions,
/// alertness checks and shuffled option order, as configured.
pub fn build_battery(
    ideal: &IdealBudget,
    config: &BatteryConfig,
    seed: u64,
) -> Result<QuestionBattery, GenError> {
    let questions = generate_questions(ideal, &config.generator, seed)?;
    let mut battery = QuestionBattery {
        battery_kind: config.battery_kind(),
        seed,
        ideal: ideal.clone(),
        questions,
    };
    if config.alertness {
        battery = insert_alertness_checks(battery, ideal.peak(), seed)?;
    }
    if config.shuffle {
        battery = shuffle_option_order(battery, seed);
    }
    Ok(battery)
}

/// Identifier of the `index`-th generated question.
pub(crate) fn question_id(index: usize) -> String {
    format!("q{index:02}")
}

/// Validates each allocation, reporting the first failing option.
pub(crate) fn checked(
    options: impl IntoIterator<Item = Result<BudgetAllocation, DomainError>>,
) -> Result<Vec<BudgetAllocation>, GenError> {
    options
        .into_iter()
        .enumerate()
        .map(|(option, r)| r.map_err(|source| GenError::InvalidOptions { option, source }))
        .collect()
}
