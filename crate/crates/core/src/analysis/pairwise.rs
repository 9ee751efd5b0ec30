use std::collections::BTreeMap;

use crate::question::Generator;
use crate::response::ResponseRecord;
use crate::utility::ModelKind;

use super::format::{percent, PercentStyle, Table};
use super::{
    by_participant, require, threshold_counts, threshold_header, usable, AnalysisError,
    AnalysisOptions, Rate,
};

/// Per-participant rate of answers for which `consistent` returns `true`.
/// Records for which it returns `None` are ignored.
pub fn pairwise_consistency<F>(
    records: &[ResponseRecord],
    options: &AnalysisOptions,
    consistent: F,
) -> Result<BTreeMap<String, Rate>, AnalysisError>
where
    F: Fn(&ResponseRecord) -> Option<bool>,
{
    let mut out: BTreeMap<String, Rate> = BTreeMap::new();
    for (pid, recs) in by_participant(usable(records, options)) {
        let mut rate = Rate::default();
        for r in recs {
            if let Some(c) = consistent(r) {
                rate.add(c);
            }
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

/// For every model pair, each participant's rate of choosing the first
/// model's option.
pub fn disagreement_rates(
    records: &[ResponseRecord],
    options: &AnalysisOptions,
) -> Result<BTreeMap<[ModelKind; 2], BTreeMap<String, Rate>>, AnalysisError> {
    let mut out: BTreeMap<[ModelKind; 2], BTreeMap<String, Rate>> = BTreeMap::new();
    for r in usable(records, options) {
        if r.provenance.generator != Generator::ModelDisagreement {
            continue;
        }
        let models = require(r.provenance.models, r, "models")?;
        let Some(choice) = r.generator_choice() else {
            continue;
        };
        out.entry(models)
            .or_default()
            .entry(r.participant_id.clone())
            .or_default()
            .add(choice == 0);
    }
    if out.is_empty() {
        return Err(AnalysisError::EmptyResponseSet);
    }
    Ok(out)
}

pub(crate) fn model_label(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::L1 => "L1",
        ModelKind::L2 => "L2",
        ModelKind::Leontief => "Leontief",
        ModelKind::WeightedAsymmetric => "Weighted asymmetric",
        ModelKind::MonotoneAsymmetric => "Monotone asymmetric",
    }
}

/// How many participants favour each side of a comparison at each threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdSummary {
    pub label_a: String,
    pub label_b: String,
    pub a_counts: [usize; 5],
    pub b_counts: [usize; 5],
    pub participants: usize,
}

/// Threshold counts from per-participant rates of favouring side A.
pub fn threshold_summary(
    rates: &BTreeMap<String, Rate>,
    label_a: &str,
    label_b: &str,
) -> Result<ThresholdSummary, AnalysisError> {
    if rates.is_empty() {
        return Err(AnalysisError::EmptyResponseSet);
    }
    let complements: Vec<Rate> = rates.values().map(Rate::complement).collect();
    Ok(ThresholdSummary {
        label_a: label_a.to_string(),
        label_b: label_b.to_string(),
        a_counts: threshold_counts(rates.values()),
        b_counts: threshold_counts(complements.iter()),
        participants: rates.len(),
    })
}

impl ThresholdSummary {
    pub fn total_counts(&self) -> [usize; 5] {
        std::array::from_fn(|i| self.a_counts[i] + self.b_counts[i])
    }

    pub fn to_table(&self, id: &str) -> Table {
        let (a, b, n) = (&self.label_a, &self.label_b, self.participants);
        let mut t = Table::with_header(
            id,
            format!("{a} versus {b}"),
            threshold_header("Comparison", "Participants"),
        );
        let cell = |c: usize| format!("{}% ({c})", percent(c, n, PercentStyle::RoundTrim(1)));
        for (label, counts) in [
            (format!("{a} over {b}"), self.a_counts),
            (format!("{b} over {a}"), self.b_counts),
            (format!("Total {a} vs {b}"), self.total_counts()),
        ] {
            let mut row = vec![label];
            row.extend(counts.iter().map(|&c| cell(c)));
            row.push(n.to_string());
            t.push(row);
        }
        t
    }
}

/// Majority and strong preferences for each side of a comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricPreferences {
    pub label_a: String,
    pub label_b: String,
    pub preferred_a: usize,
    pub preferred_b: usize,
    pub ties: usize,
    pub strong_a: usize,
    pub strong_b: usize,
    pub participants: usize,
}

/// Share of strong preference, in percent.
pub const STRONG_PREFERENCE: usize = 80;

pub fn metric_preferences(
    rates: &BTreeMap<String, Rate>,
    label_a: &str,
    label_b: &str,
) -> MetricPreferences {
    let mut m = MetricPreferences {
        label_a: label_a.to_string(),
        label_b: label_b.to_string(),
        preferred_a: 0,
        preferred_b: 0,
        ties: 0,
        strong_a: 0,
        strong_b: 0,
        participants: rates.len(),
    };
    for r in rates.values() {
        let against = r.total - r.consistent;
        match r.consistent.cmp(&against) {
            std::cmp::Ordering::Greater => m.preferred_a += 1,
            std::cmp::Ordering::Less => m.preferred_b += 1,
            std::cmp::Ordering::Equal => m.ties += 1,
        }
        if r.at_least(STRONG_PREFERENCE) {
            m.strong_a += 1;
        }
        if r.complement().at_least(STRONG_PREFERENCE) {
            m.strong_b += 1;
        }
    }
    m
}

impl MetricPreferences {
    pub fn to_table(&self, id: &str) -> Table {
        let (a, b, n) = (&self.label_a, &self.label_b, self.participants);
        let mut t = Table::new(id, format!("Preferences, {a} versus {b}"), &["Preference", "Participants", "Share"]);
        for (label, c) in [
            (format!("Preferred {a}"), self.preferred_a),
            (format!("Preferred {b}"), self.preferred_b),
            ("Ties".to_string(), self.ties),
            (format!("Strong preference for {a}"), self.strong_a),
            (format!("Strong preference for {b}"), self.strong_b),
        ] {
            t.push(vec![
                label,
                c.to_string(),
                format!("{}%", percent(c, n, PercentStyle::RoundTrim(0))),
            ]);
        }
        t
    }
}
