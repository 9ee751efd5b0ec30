use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::question::Generator;
use crate::response::ResponseRecord;

use super::format::{percent, PercentStyle, Table};
use super::{
    by_participant, require, threshold_counts, threshold_header, AnalysisError, AnalysisOptions,
    Rate,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryMode {
    Project,
    Sign,
}

impl SymmetryMode {
    pub fn generator(self) -> Generator {
        match self {
            SymmetryMode::Project => Generator::ProjectSymmetry,
            SymmetryMode::Sign => Generator::SignSymmetry,
        }
    }

    /// Questions per symmetric set.
    pub fn set_size(self) -> usize {
        match self {
            SymmetryMode::Project => 3,
            SymmetryMode::Sign => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SymmetryMode::Project => "Project symmetry",
            SymmetryMode::Sign => "Sign symmetry",
        }
    }
}

/// Per-participant share of symmetric sets answered identically.
///
/// With `skip_tie_broken`, sets containing a tie-broken answer are dropped.
pub fn symmetry_consistency(
    records: &[ResponseRecord],
    mode: SymmetryMode,
    options: &AnalysisOptions,
) -> Result<BTreeMap<String, Rate>, AnalysisError> {
    let relevant = records
        .iter()
        .filter(|r| !r.is_alertness && r.provenance.generator == mode.generator());
    let mut out = BTreeMap::new();
    for (pid, recs) in by_participant(relevant) {
        let mut sets: BTreeMap<usize, Vec<&ResponseRecord>> = BTreeMap::new();
        for r in recs {
            sets.entry(require(r.provenance.set_index, r, "set_index")?)
                .or_default()
                .push(r);
        }
        let mut rate = Rate::default();
        for (set_index, set) in sets {
            if set.len() != mode.set_size() {
                return Err(AnalysisError::IncompleteSet {
                    participant_id: pid.to_string(),
                    set_index,
                    expected: mode.set_size(),
                    found: set.len(),
                });
            }
            if options.skip_tie_broken && set.iter().any(|r| r.tie_broken) {
                continue;
            }
            let first = set[0].generator_choice();
            rate.add(first.is_some() && set.iter().all(|r| r.generator_choice() == first));
        }
        if rate.total > 0 {
            out.insert(pid.to_string(), rate);
        }
    }
    if out.is_empty() {
        return Err(AnalysisError::EmptyResponseSet);
    }
    Ok(out)
}

/// Threshold counts for one symmetry mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetrySummary {
    pub mode: SymmetryMode,
    pub counts: [usize; 5],
    pub participants: usize,
}

impl SymmetrySummary {
    pub fn from_rates(mode: SymmetryMode, rates: &BTreeMap<String, Rate>) -> Self {
        SymmetrySummary {
            mode,
            counts: threshold_counts(rates.values()),
            participants: rates.len(),
        }
    }
}

pub(crate) fn symmetry_table(id: &str, rows: &[SymmetrySummary]) -> Table {
    let mut t = Table::with_header(id, "Symmetry consistency", threshold_header("Symmetry", "Participants"));
    for s in rows {
        let mut row = vec![s.mode.label().to_string()];
        row.extend(s.counts.iter().map(|&c| {
            format!("{}% ({c})", percent(c, s.participants, PercentStyle::TruncTrim(2)))
        }));
        row.push(s.participants.to_string());
        t.push(row);
    }
    t
}
