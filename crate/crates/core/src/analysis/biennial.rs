use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::question::Generator;
use crate::response::ResponseRecord;

use super::format::{percent, PercentStyle, Table};
use super::{require, usable, AnalysisError, AnalysisOptions};

/// One participant's answers within one sub-poll.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SubPollCounts {
    /// Answers choosing the first (ideal-containing) option.
    pub first: usize,
    pub total: usize,
}

impl SubPollCounts {
    /// Share of answers on the participant's majority side.
    pub fn level(&self) -> Ratio<usize> {
        Ratio::new(self.first.max(self.total - self.first), self.total)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BiennialResult {
    pub sub_polls: BTreeMap<u8, BTreeMap<String, SubPollCounts>>,
}

pub fn biennial_consistency(
    records: &[ResponseRecord],
    options: &AnalysisOptions,
) -> Result<BiennialResult, AnalysisError> {
    let mut out = BiennialResult::default();
    for r in usable(records, options).filter(|r| r.provenance.generator == Generator::Biennial) {
        let sub_poll = require(r.provenance.sub_poll, r, "sub_poll")?;
        let Some(choice) = r.generator_choice() else {
            continue;
        };
        let c = out
            .sub_polls
            .entry(sub_poll)
            .or_default()
            .entry(r.participant_id.clone())
            .or_default();
        c.total += 1;
        if choice == 0 {
            c.first += 1;
        }
    }
    if out.sub_polls.is_empty() {
        return Err(AnalysisError::EmptyResponseSet);
    }
    Ok(out)
}

/// Option labels for each sub-poll, first option first.
pub(crate) fn option_labels(sub_poll: u8) -> [&'static str; 2] {
    match sub_poll {
        1 => ["Ideal Year 1", "Random"],
        2 => ["Ideal Year 2", "Balanced Year 2"],
        3 => ["Ideal Year 1", "Balanced Year 1"],
        _ => ["First option", "Second option"],
    }
}

/// Cumulative thresholds, in percent.
pub const BIENNIAL_THRESHOLDS: [usize; 3] = [50, 75, 100];

impl BiennialResult {
    pub fn sub_poll_table(&self, id: &str, sub_poll: u8) -> Option<Table> {
        let counts = self.sub_polls.get(&sub_poll)?;
        let [l0, l1] = option_labels(sub_poll);
        let mut t = Table::new(
            id,
            format!("Sub-poll {sub_poll}"),
            &["Consistency", "Users", l0, l1],
        );
        let mut buckets: BTreeMap<Ratio<usize>, (usize, SubPollCounts)> = BTreeMap::new();
        for c in counts.values().filter(|c| c.total > 0) {
            let b = buckets.entry(c.level()).or_default();
            b.0 += 1;
            b.1.first += c.first;
            b.1.total += c.total;
        }
        let mut all = (0, SubPollCounts::default());
        let share = |c: SubPollCounts| {
            [
                format!("{}%", percent(c.first, c.total, PercentStyle::RoundFixed(2))),
                format!("{}%", percent(c.total - c.first, c.total, PercentStyle::RoundFixed(2))),
            ]
        };
        for (level, (users, c)) in &buckets {
            all.0 += users;
            all.1.first += c.first;
            all.1.total += c.total;
            let mut row = vec![
                format!("{}%", percent(*level.numer(), *level.denom(), PercentStyle::RoundTrim(0))),
                users.to_string(),
            ];
            row.extend(share(*c));
            t.push(row);
        }
        let mut row = vec!["Total".to_string(), all.0.to_string()];
        row.extend(share(all.1));
        t.push(row);
        Some(t)
    }

    pub fn cumulative_table(&self, id: &str) -> Table {
        let mut header = vec!["Sub-poll".to_string()];
        header.extend(BIENNIAL_THRESHOLDS.iter().map(|&t| {
            if t == 100 {
                "100%".to_string()
            } else {
                format!("over {t}%")
            }
        }));
        header.push("Participants".to_string());
        let mut t = Table::with_header(id, "Biennial consistency, cumulative", header);
        for (sub_poll, counts) in &self.sub_polls {
            let n = counts.len();
            let mut row = vec![format!("Sub-poll {sub_poll}")];
            row.extend(BIENNIAL_THRESHOLDS.iter().map(|&th| {
                let c = counts
                    .values()
                    .filter(|c| c.total > 0 && c.level() * 100 >= Ratio::from_integer(th))
                    .count();
                format!("{}% ({c})", percent(c, n, PercentStyle::RoundFixed(2)))
            }));
            row.push(n.to_string());
            t.push(row);
        }
        t
    }
}
