use crate::question::Generator;
use crate::response::ResponseRecord;

use super::format::{percent, PercentStyle, Table};
use super::{by_participant, usable, AnalysisError, AnalysisOptions, Rate};

/// Screening outcome and split-option share for the triangle battery.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TriangleSummary {
    pub participants: usize,
    /// Chose the balancing allocation in a screening question.
    pub screened_out: usize,
    /// Split-option answers among participants who passed screening.
    pub split: Rate,
}

pub fn triangle_summary(
    records: &[ResponseRecord],
    options: &AnalysisOptions,
) -> Result<TriangleSummary, AnalysisError> {
    let relevant = usable(records, options).filter(|r| r.provenance.generator == Generator::TriangleSplit);
    let mut out = TriangleSummary::default();
    for (_, recs) in by_participant(relevant) {
        out.participants += 1;
        let failed = recs
            .iter()
            .any(|r| r.provenance.screening && r.generator_choice() == Some(1));
        if failed {
            out.screened_out += 1;
            continue;
        }
        for r in recs.iter().filter(|r| !r.provenance.screening) {
            if let Some(c) = r.generator_choice() {
                out.split.add(c == 1);
            }
        }
    }
    if out.participants == 0 {
        return Err(AnalysisError::EmptyResponseSet);
    }
    Ok(out)
}

impl TriangleSummary {
    pub fn to_table(&self, id: &str) -> Table {
        let mut t = Table::new(id, "Concentrated versus split changes", &["Measure", "Count", "Share"]);
        t.push(vec![
            "Participants".into(),
            self.participants.to_string(),
            "100%".into(),
        ]);
        t.push(vec![
            "Screened out".into(),
            self.screened_out.to_string(),
            format!(
                "{}%",
                percent(self.screened_out, self.participants, PercentStyle::RoundTrim(1))
            ),
        ]);
        t.push(vec![
            "Split option chosen".into(),
            format!("{}/{}", self.split.consistent, self.split.total),
            format!(
                "{}%",
                percent(self.split.consistent, self.split.total, PercentStyle::RoundTrim(1))
            ),
        ]);
        t
    }
}
