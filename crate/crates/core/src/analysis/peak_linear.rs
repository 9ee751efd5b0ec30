use std::collections::{BTreeMap, BTreeSet};

use crate::amount::Weight;
use crate::question::Generator;
use crate::response::ResponseRecord;

use super::format::{percent, PercentStyle, Table};
use super::{by_participant, issue_label, require, AnalysisError, AnalysisOptions, Rate};

/// Agreement between each blended question and the unblended question for the
/// same pair of extremes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PeakLinearResult {
    pub cells: BTreeMap<(Weight, [usize; 2]), Rate>,
    pub per_participant: BTreeMap<String, Rate>,
}

pub fn peak_linear_consistency(
    records: &[ResponseRecord],
    options: &AnalysisOptions,
) -> Result<PeakLinearResult, AnalysisError> {
    let relevant = records
        .iter()
        .filter(|r| !r.is_alertness && r.provenance.generator == Generator::PeakLinear);
    let mut out = PeakLinearResult::default();
    for (pid, recs) in by_participant(relevant) {
        let mut baseline: BTreeMap<[usize; 2], &ResponseRecord> = BTreeMap::new();
        for r in recs.iter().filter(|r| r.provenance.lambda.is_none()) {
            baseline.insert(require(r.provenance.pair, r, "pair")?, r);
        }
        let mut rate = Rate::default();
        for r in recs.iter().filter(|r| r.provenance.lambda.is_some()) {
            let pair = require(r.provenance.pair, r, "pair")?;
            let lambda = require(r.provenance.lambda, r, "lambda")?;
            let base = baseline.get(&pair).ok_or_else(|| AnalysisError::MissingBaseline {
                participant_id: pid.to_string(),
                pair,
            })?;
            if options.skip_tie_broken && (base.tie_broken || r.tie_broken) {
                continue;
            }
            let same = r.generator_choice().is_some() && r.generator_choice() == base.generator_choice();
            out.cells.entry((lambda, pair)).or_default().add(same);
            rate.add(same);
        }
        if rate.total > 0 {
            out.per_participant.insert(pid.to_string(), rate);
        }
    }
    if out.cells.is_empty() {
        return Err(AnalysisError::EmptyResponseSet);
    }
    Ok(out)
}

impl PeakLinearResult {
    pub fn lambdas(&self) -> Vec<Weight> {
        self.cells.keys().map(|k| k.0).collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn pairs(&self) -> Vec<[usize; 2]> {
        self.cells.keys().map(|k| k.1).collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn by_lambda(&self, lambda: Weight) -> Rate {
        let mut total = Rate::default();
        for (_, r) in self.cells.iter().filter(|(k, _)| k.0 == lambda) {
            total += *r;
        }
        total
    }

    pub fn by_pair(&self, pair: [usize; 2]) -> Rate {
        let mut total = Rate::default();
        for (_, r) in self.cells.iter().filter(|(k, _)| k.1 == pair) {
            total += *r;
        }
        total
    }

    pub fn overall(&self) -> Rate {
        let mut total = Rate::default();
        for r in self.cells.values() {
            total += *r;
        }
        total
    }

    pub fn to_table(&self, id: &str) -> Table {
        let pairs = self.pairs();
        let mut header = vec!["Percentile (λ)".to_string()];
        header.extend(
            pairs
                .iter()
                .map(|p| format!("{} vs. {}", issue_label(p[0]), issue_label(p[1]))),
        );
        header.push("Average Consistency".to_string());
        let mut t = Table::with_header(id, "Peak-linear consistency", header);
        let cell = |r: Rate| {
            format!(
                "{}% ({}/{})",
                percent(r.consistent, r.total, PercentStyle::RoundTrim(0)),
                r.consistent,
                r.total
            )
        };
        for lambda in self.lambdas() {
            let mut row = vec![format!("{}% (λ={lambda})", lambda.hundredths())];
            row.extend(
                pairs
                    .iter()
                    .map(|&p| cell(self.cells.get(&(lambda, p)).copied().unwrap_or_default())),
            );
            row.push(cell(self.by_lambda(lambda)));
            t.push(row);
        }
        let mut row = vec!["All percentiles".to_string()];
        row.extend(pairs.iter().map(|&p| cell(self.by_pair(p))));
        row.push(cell(self.overall()));
        t.push(row);
        t
    }
}
