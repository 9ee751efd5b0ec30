//! Consistency statistics over response records and report rendering.
//!
//! Every analysis ignores alertness checks and compares answers in generator
//! option order, so display shuffling never affects the results.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::response::ResponseRecord;

mod biennial;
pub mod format;
mod lambda;
mod matrix;
mod pairwise;
mod peak_linear;
mod ranking;
mod report;
mod symmetry;
mod transitivity;
mod triangle;

pub use biennial::{biennial_consistency, BiennialResult, SubPollCounts};
pub use format::{parse_csv, percent, CsvCell, PercentStyle, ReportFormat, Table};
pub use lambda::{consistency_by_lambda, convex_rates, LambdaRow};
pub use matrix::{
    classify, preference_matrices, preference_matrix, MatrixCell, MatrixClass, PreferenceMatrix,
};
pub use pairwise::{
    disagreement_rates, metric_preferences, pairwise_consistency, threshold_summary,
    MetricPreferences, ThresholdSummary,
};
pub use peak_linear::{peak_linear_consistency, PeakLinearResult};
pub use ranking::{ranking_consistency, RankingSummary};
pub use report::{analyze_all, render_report, ConsistencyReport};
pub use symmetry::{symmetry_consistency, SymmetryMode, SymmetrySummary};
pub use transitivity::{
    majority_winner, transitivity_cycle_detect, transitivity_summary, PollWinner, TransitivityRow,
};
pub use triangle::{triangle_summary, TriangleSummary};

/// Thresholds, in percent, used by the threshold tables.
pub const THRESHOLDS: [usize; 5] = [60, 70, 80, 90, 100];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("no usable responses")]
    EmptyResponseSet,
    #[error("participant {participant_id} has no baseline answer for pair {pair:?}")]
    MissingBaseline {
        participant_id: String,
        pair: [usize; 2],
    },
    #[error("participant {participant_id}: set {set_index} has {found} of {expected} answers")]
    IncompleteSet {
        participant_id: String,
        set_index: usize,
        expected: usize,
        found: usize,
    },
    #[error("participant {participant_id}: question {question_id} has a malformed ranking")]
    MalformedRanking {
        participant_id: String,
        question_id: String,
    },
    #[error("participant {participant_id}: preference matrix has {found} of 12 cells")]
    IncompleteMatrix {
        participant_id: String,
        found: usize,
    },
    #[error("incomplete model triple: {0}")]
    IncompleteTriple(String),
    #[error("question {question_id} lacks provenance field `{field}`")]
    MissingProvenance {
        question_id: String,
        field: &'static str,
    },
    #[error(transparent)]
    UnsupportedFormat(#[from] format::UnsupportedFormat),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    /// Drop answers where a synthetic respondent broke an exact tie.
    #[serde(default)]
    pub skip_tie_broken: bool,
}

/// `consistent` out of `total`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rate {
    pub consistent: usize,
    pub total: usize,
}

impl Rate {
    pub fn new(consistent: usize, total: usize) -> Self {
        Rate { consistent, total }
    }

    pub fn add(&mut self, consistent: bool) {
        self.total += 1;
        if consistent {
            self.consistent += 1;
        }
    }

    /// At least `pct` percent, compared exactly.
    pub fn at_least(&self, pct: usize) -> bool {
        self.total > 0 && self.consistent * 100 >= pct * self.total
    }

    pub fn complement(&self) -> Rate {
        Rate::new(self.total - self.consistent, self.total)
    }

    pub fn is_perfect(&self) -> bool {
        self.total > 0 && self.consistent == self.total
    }

    pub fn to_f64(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.consistent as f64 / self.total as f64
        }
    }
}

impl std::ops::AddAssign for Rate {
    fn add_assign(&mut self, rhs: Rate) {
        self.consistent += rhs.consistent;
        self.total += rhs.total;
    }
}

/// Non-alertness records, optionally without tie-broken answers.
pub(crate) fn usable<'a>(
    records: &'a [ResponseRecord],
    options: &AnalysisOptions,
) -> impl Iterator<Item = &'a ResponseRecord> + 'a {
    let skip = options.skip_tie_broken;
    records
        .iter()
        .filter(move |r| !r.is_alertness && !(skip && r.tie_broken))
}

pub(crate) fn by_participant<'a>(
    records: impl Iterator<Item = &'a ResponseRecord>,
) -> BTreeMap<&'a str, Vec<&'a ResponseRecord>> {
    let mut out: BTreeMap<&str, Vec<&ResponseRecord>> = BTreeMap::new();
    for r in records {
        out.entry(r.participant_id.as_str()).or_default().push(r);
    }
    out
}

pub(crate) fn require<T: Copy>(
    value: Option<T>,
    record: &ResponseRecord,
    field: &'static str,
) -> Result<T, AnalysisError> {
    value.ok_or_else(|| AnalysisError::MissingProvenance {
        question_id: record.question_id.clone(),
        field,
    })
}

/// Count of participants meeting each threshold.
pub(crate) fn threshold_counts<'a>(rates: impl Iterator<Item = &'a Rate> + Clone) -> [usize; 5] {
    THRESHOLDS.map(|t| rates.clone().filter(|r| r.at_least(t)).count())
}

pub(crate) fn threshold_header(first: &str, last: &str) -> Vec<String> {
    let mut h = vec![first.to_string()];
    h.extend(THRESHOLDS.iter().map(|&t| {
        if t == 100 {
            "100%".to_string()
        } else {
            format!("over {t}%")
        }
    }));
    h.push(last.to_string());
    h
}

/// Issue labels used in report headings.
pub(crate) fn issue_label(i: usize) -> char {
    (b'A' + i as u8) as char
}
