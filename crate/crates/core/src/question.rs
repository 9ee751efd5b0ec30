//! Questions, their provenance and question batteries.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::amount::{Amount, Weight};
use crate::domain::{BudgetAllocation, IdealBudget};
use crate::utility::ModelKind;

/// The question batteries a poll can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatteryKind {
    ModelDisagreement,
    SinglePeaked,
    SinglePeakedRounded,
    PeakLinear,
    ProjectSymmetry,
    SignSymmetry,
    CyclicRanking,
    ConcentratedVsDistributed,
    Biennial,
    TriangleSplit,
}

impl BatteryKind {
    pub const ALL: [BatteryKind; 10] = [
        BatteryKind::ModelDisagreement,
        BatteryKind::SinglePeaked,
        BatteryKind::SinglePeakedRounded,
        BatteryKind::PeakLinear,
        BatteryKind::ProjectSymmetry,
        BatteryKind::SignSymmetry,
        BatteryKind::CyclicRanking,
        BatteryKind::ConcentratedVsDistributed,
        BatteryKind::Biennial,
        BatteryKind::TriangleSplit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BatteryKind::ModelDisagreement => "model_disagreement",
            BatteryKind::SinglePeaked => "single_peaked",
            BatteryKind::SinglePeakedRounded => "single_peaked_rounded",
            BatteryKind::PeakLinear => "peak_linear",
            BatteryKind::ProjectSymmetry => "project_symmetry",
            BatteryKind::SignSymmetry => "sign_symmetry",
            BatteryKind::CyclicRanking => "cyclic_ranking",
            BatteryKind::ConcentratedVsDistributed => "concentrated_vs_distributed",
            BatteryKind::Biennial => "biennial",
            BatteryKind::TriangleSplit => "triangle_split",
        }
    }

    pub fn generator(self) -> Generator {
        match self {
            BatteryKind::ModelDisagreement => Generator::ModelDisagreement,
            BatteryKind::SinglePeaked => Generator::ConvexCombination,
            BatteryKind::SinglePeakedRounded => Generator::RoundedConvexCombination,
            BatteryKind::PeakLinear => Generator::PeakLinear,
            BatteryKind::ProjectSymmetry => Generator::ProjectSymmetry,
            BatteryKind::SignSymmetry => Generator::SignSymmetry,
            BatteryKind::CyclicRanking => Generator::CyclicRanking,
            BatteryKind::ConcentratedVsDistributed => Generator::ConcentratedVsDistributed,
            BatteryKind::Biennial => Generator::Biennial,
            BatteryKind::TriangleSplit => Generator::TriangleSplit,
        }
    }
}

impl fmt::Display for BatteryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BatteryKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BatteryKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown battery kind `{s}`"))
    }
}

/// The question-construction algorithms, including alertness checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    ModelDisagreement,
    ConvexCombination,
    RoundedConvexCombination,
    PeakLinear,
    ProjectSymmetry,
    SignSymmetry,
    CyclicRanking,
    ConcentratedVsDistributed,
    Biennial,
    TriangleSplit,
    Alertness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionKind {
    Pairwise,
    Ranking,
    Biennial,
}

/// Two consecutive yearly allocations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BiennialOption {
    pub year1: BudgetAllocation,
    pub year2: BudgetAllocation,
}

impl BiennialOption {
    pub fn new(year1: BudgetAllocation, year2: BudgetAllocation) -> Self {
        BiennialOption { year1, year2 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuestionOptions {
    Allocations(Vec<BudgetAllocation>),
    Biennial(Vec<BiennialOption>),
}

impl QuestionOptions {
    pub fn len(&self) -> usize {
        match self {
            QuestionOptions::Allocations(v) => v.len(),
            QuestionOptions::Biennial(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Reorders so that new position `i` holds old position `order[i]`.
    pub(crate) fn permuted(&self, order: &[usize]) -> QuestionOptions {
        match self {
            QuestionOptions::Allocations(v) => {
                QuestionOptions::Allocations(order.iter().map(|&i| v[i]).collect())
            }
            QuestionOptions::Biennial(v) => {
                QuestionOptions::Biennial(order.iter().map(|&i| v[i]).collect())
            }
        }
    }
}

/// Which base vector a cyclic ranking question shifts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftDirection {
    /// One large gain offset by small losses.
    Pd,
    /// One large loss offset by small gains.
    Nd,
}

/// Generator parameters carried with every question.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: Generator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub models: Option<[ModelKind; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Weight>,
    /// Deviation magnitude X.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnitude: Option<Amount>,
    /// Magnitude level, 1 to 4.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u8>,
    /// Target issue index.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sub_poll: Option<u8>,
    /// Poll set (symmetry), base vector (triangle) or repetition index.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_index: Option<usize>,
    /// Extreme-vector pair for peak-linear questions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<ShiftDirection>,
    /// Triangle questions: +1 for `p + q`, -1 for `p - q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub fallback: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub screening: bool,
    /// Display position `i` shows generator option `order[i]`.
    #[serde(default)]
    pub order: Vec<usize>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl Provenance {
    pub fn new(generator: Generator) -> Self {
        Provenance {
            generator,
            models: None,
            lambda: None,
            magnitude: None,
            level: None,
            category: None,
            rotation: None,
            sub_poll: None,
            set_index: None,
            pair: None,
            direction: None,
            sign: None,
            fallback: false,
            screening: false,
            order: Vec::new(),
        }
    }

    /// Maps a displayed option index to the generator's index.
    pub fn to_generator_index(&self, display: usize) -> usize {
        self.order.get(display).copied().unwrap_or(display)
    }

    /// Maps a generator index to its displayed position.
    pub fn to_display_index(&self, generator: usize) -> usize {
        self.order
            .iter()
            .position(|&g| g == generator)
            .unwrap_or(generator)
    }
}

/// One elicitation unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub kind: QuestionKind,
    pub options: QuestionOptions,
    pub provenance: Provenance,
    #[serde(default)]
    pub is_alertness: bool,
}

impl Question {
    pub fn pairwise(
        id: impl Into<String>,
        a: BudgetAllocation,
        b: BudgetAllocation,
        provenance: Provenance,
    ) -> Self {
        Question {
            id: id.into(),
            kind: QuestionKind::Pairwise,
            options: QuestionOptions::Allocations(vec![a, b]),
            provenance,
            is_alertness: false,
        }
    }

    pub fn ranking(
        id: impl Into<String>,
        options: Vec<BudgetAllocation>,
        provenance: Provenance,
    ) -> Self {
        Question {
            id: id.into(),
            kind: QuestionKind::Ranking,
            options: QuestionOptions::Allocations(options),
            provenance,
            is_alertness: false,
        }
    }

    pub fn biennial(
        id: impl Into<String>,
        a: BiennialOption,
        b: BiennialOption,
        provenance: Provenance,
    ) -> Self {
        Question {
            id: id.into(),
            kind: QuestionKind::Biennial,
            options: QuestionOptions::Biennial(vec![a, b]),
            provenance,
            is_alertness: false,
        }
    }

    pub fn option_count(&self) -> usize {
        self.options.len()
    }

    /// Allocation options in display order (pairwise and ranking questions).
    pub fn allocations(&self) -> Option<&[BudgetAllocation]> {
        match &self.options {
            QuestionOptions::Allocations(v) => Some(v),
            QuestionOptions::Biennial(_) => None,
        }
    }

    /// Biennial options in display order.
    pub fn biennial_options(&self) -> Option<&[BiennialOption]> {
        match &self.options {
            QuestionOptions::Biennial(v) => Some(v),
            QuestionOptions::Allocations(_) => None,
        }
    }

    /// Allocation option by generator index.
    pub fn generator_allocation(&self, generator_index: usize) -> Option<BudgetAllocation> {
        let display = self.provenance.to_display_index(generator_index);
        self.allocations()?.get(display).copied()
    }

    /// Biennial option by generator index.
    pub fn generator_biennial(&self, generator_index: usize) -> Option<BiennialOption> {
        let display = self.provenance.to_display_index(generator_index);
        self.biennial_options()?.get(display).copied()
    }

    /// Every allocation the question contains.
    pub fn all_allocations(&self) -> Vec<BudgetAllocation> {
        match &self.options {
            QuestionOptions::Allocations(v) => v.clone(),
            QuestionOptions::Biennial(v) => v.iter().flat_map(|o| [o.year1, o.year2]).collect(),
        }
    }
}

/// The ordered questions generated for one participant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionBattery {
    pub battery_kind: BatteryKind,
    pub seed: u64,
    pub ideal: IdealBudget,
    pub questions: Vec<Question>,
}

impl QuestionBattery {
    pub fn len(&self) -> usize {
        self.questions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.questions.is_empty()
    }

    pub fn question(&self, id: &str) -> Option<&Question> {
        self.questions.iter().find(|q| q.id == id)
    }

    /// Questions that are not alertness checks.
    pub fn experimental(&self) -> impl Iterator<Item = &Question> {
        self.questions.iter().filter(|q| !q.is_alertness)
    }
}
