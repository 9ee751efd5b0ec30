use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::domain::ISSUES;
use crate::generators::MAGNITUDE_LEVELS;
use crate::question::Generator;
use crate::response::ResponseRecord;

use super::format::{percent, PercentStyle, Table};
use super::{by_participant, issue_label, require, AnalysisError, AnalysisOptions};

const LEVELS: usize = MAGNITUDE_LEVELS as usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixCell {
    /// Preferred the concentrated loss.
    Concentrated,
    /// Preferred the distributed loss.
    Distributed,
}

impl MatrixCell {
    pub fn symbol(self) -> &'static str {
        match self {
            MatrixCell::Concentrated => "C",
            MatrixCell::Distributed => "D",
        }
    }
}

/// Answers to the concentrated-versus-distributed battery, one row per
/// issue and one column per magnitude level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceMatrix {
    pub participant_id: String,
    pub cells: [[MatrixCell; LEVELS]; ISSUES],
    pub magnitudes: [[Amount; LEVELS]; ISSUES],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixClass {
    /// Every row holds a single preference.
    FullyConsistent,
    /// Exactly one cell disagrees with the rest of its row.
    OneCellTolerant,
    /// Each row switches preference at most once as the magnitude grows.
    Monotone,
    Other,
}

impl MatrixClass {
    pub const ALL: [MatrixClass; 4] = [
        MatrixClass::FullyConsistent,
        MatrixClass::OneCellTolerant,
        MatrixClass::Monotone,
        MatrixClass::Other,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MatrixClass::FullyConsistent => "Fully consistent",
            MatrixClass::OneCellTolerant => "One-cell tolerant",
            MatrixClass::Monotone => "Monotone",
            MatrixClass::Other => "Other",
        }
    }
}

/// Builds one participant's matrix from their records.
pub fn preference_matrix(
    participant_id: &str,
    records: &[&ResponseRecord],
) -> Result<PreferenceMatrix, AnalysisError> {
    let mut cells = [[None; LEVELS]; ISSUES];
    let mut magnitudes = [[Amount::ZERO; LEVELS]; ISSUES];
    for r in records {
        let category = require(r.provenance.category, r, "category")?;
        let level = require(r.provenance.level, r, "level")? as usize;
        if category >= ISSUES || !(1..=LEVELS).contains(&level) {
            return Err(AnalysisError::MissingProvenance {
                question_id: r.question_id.clone(),
                field: "level",
            });
        }
        let cell = match r.generator_choice() {
            Some(0) => MatrixCell::Concentrated,
            Some(_) => MatrixCell::Distributed,
            None => continue,
        };
        cells[category][level - 1] = Some(cell);
        magnitudes[category][level - 1] = r.provenance.magnitude.unwrap_or_default();
    }
    let found = cells.iter().flatten().filter(|c| c.is_some()).count();
    if found != ISSUES * LEVELS {
        return Err(AnalysisError::IncompleteMatrix {
            participant_id: participant_id.to_string(),
            found,
        });
    }
    Ok(PreferenceMatrix {
        participant_id: participant_id.to_string(),
        cells: cells.map(|row| row.map(|c| c.expect("counted"))),
        magnitudes,
    })
}

/// Matrices for every participant with concentrated-versus-distributed
/// answers. Tie-broken answers are kept even with `skip_tie_broken`, since
/// a matrix needs every cell.
pub fn preference_matrices(
    records: &[ResponseRecord],
    _options: &AnalysisOptions,
) -> Result<Vec<PreferenceMatrix>, AnalysisError> {
    let relevant = records
        .iter()
        .filter(|r| !r.is_alertness && r.provenance.generator == Generator::ConcentratedVsDistributed);
    let out = by_participant(relevant)
        .into_iter()
        .map(|(pid, recs)| preference_matrix(pid, &recs))
        .collect::<Result<Vec<_>, _>>()?;
    if out.is_empty() {
        return Err(AnalysisError::EmptyResponseSet);
    }
    Ok(out)
}

impl PreferenceMatrix {
    fn row_is_constant(row: &[MatrixCell; LEVELS]) -> bool {
        row.iter().all(|&c| c == row[0])
    }

    /// Whether every row, ordered by magnitude, changes preference at most
    /// once.
    pub fn is_monotone(&self) -> bool {
        (0..ISSUES).all(|i| {
            let mut order: Vec<usize> = (0..LEVELS).collect();
            order.sort_by_key(|&l| (self.magnitudes[i][l], l));
            let changes = order
                .windows(2)
                .filter(|w| self.cells[i][w[0]] != self.cells[i][w[1]])
                .count();
            changes <= 1
        })
    }
}

pub fn classify(m: &PreferenceMatrix) -> MatrixClass {
    if m.cells.iter().all(PreferenceMatrix::row_is_constant) {
        return MatrixClass::FullyConsistent;
    }
    let minority: usize = m
        .cells
        .iter()
        .map(|row| {
            let c = row.iter().filter(|&&c| c == MatrixCell::Concentrated).count();
            c.min(LEVELS - c)
        })
        .sum();
    if minority == 1 {
        MatrixClass::OneCellTolerant
    } else if m.is_monotone() {
        MatrixClass::Monotone
    } else {
        MatrixClass::Other
    }
}

pub(crate) fn class_table(id: &str, matrices: &[PreferenceMatrix]) -> Table {
    let mut counts: BTreeMap<MatrixClass, usize> = BTreeMap::new();
    for m in matrices {
        *counts.entry(classify(m)).or_default() += 1;
    }
    let n = matrices.len();
    let mut t = Table::new(
        id,
        "Concentrated versus distributed: matrix classes",
        &["Class", "Participants", "Share"],
    );
    for class in MatrixClass::ALL {
        let c = counts.get(&class).copied().unwrap_or(0);
        t.push(vec![
            class.label().to_string(),
            c.to_string(),
            format!("{}%", percent(c, n, PercentStyle::RoundTrim(1))),
        ]);
    }
    let monotone = matrices.iter().filter(|m| m.is_monotone()).count();
    t.push(vec![
        "Monotone (any class)".to_string(),
        monotone.to_string(),
        format!("{}%", percent(monotone, n, PercentStyle::RoundTrim(1))),
    ]);
    t
}

pub(crate) fn matrix_table(id: &str, matrices: &[PreferenceMatrix]) -> Table {
    let mut header = vec!["Participant / issue".to_string()];
    header.extend((1..=LEVELS).map(|l| format!("Level {l}")));
    let mut t = Table::with_header(id, "Preference matrices (C concentrated, D distributed)", header);
    for m in matrices {
        for (i, row) in m.cells.iter().enumerate() {
            let mut out = vec![format!("{} {}", m.participant_id, issue_label(i))];
            out.extend(row.iter().map(|c| c.symbol().to_string()));
            t.push(out);
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use MatrixCell::{Concentrated as C, Distributed as D};

    fn matrix(cells: [[MatrixCell; 4]; 3]) -> PreferenceMatrix {
        PreferenceMatrix {
            participant_id: "x".into(),
            cells,
            magnitudes: [[1, 2, 3, 4].map(Amount::from_points); 3],
        }
    }

    #[test]
    fn classes() {
        assert_eq!(classify(&matrix([[C; 4], [D; 4], [C; 4]])), MatrixClass::FullyConsistent);
        assert_eq!(
            classify(&matrix([[C, D, C, C], [D; 4], [C; 4]])),
            MatrixClass::OneCellTolerant
        );
        assert_eq!(
            classify(&matrix([[C, C, D, D], [D, D, D, C], [C; 4]])),
            MatrixClass::Monotone
        );
        assert_eq!(classify(&matrix([[C, D, C, D], [D; 4], [C; 4]])), MatrixClass::Other);
    }

    #[test]
    fn monotonicity_follows_magnitude() {
        let mut m = matrix([[C, D, C, D], [D; 4], [C; 4]]);
        assert!(!m.is_monotone());
        m.magnitudes[0] = [2, 1, 3, 4].map(Amount::from_points);
        assert!(!m.is_monotone());
        m.magnitudes[0] = [1, 4, 2, 5].map(Amount::from_points);
        assert!(m.is_monotone());
    }
}
