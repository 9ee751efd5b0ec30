use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::question::BatteryKind;
use crate::response::{ResponseHeader, ResponseRecord};

use super::biennial::biennial_consistency;
use super::format::{tables_to_csv, tables_to_markdown, ReportFormat, Table};
use super::lambda::{consistency_by_lambda, lambda_table};
use super::matrix::{class_table, matrix_table, preference_matrices};
use super::pairwise::{disagreement_rates, metric_preferences, model_label, threshold_summary};
use super::peak_linear::peak_linear_consistency;
use super::ranking::{ranking_consistency, RankingSummary};
use super::symmetry::{symmetry_consistency, symmetry_table, SymmetryMode, SymmetrySummary};
use super::transitivity::{transitivity_summary, transitivity_table};
use super::triangle::triangle_summary;
use super::{AnalysisError, AnalysisOptions};

/// Every statistic that applies to a response set, as rendered tables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    /// Participants whose answers were analysed.
    pub participants: usize,
    /// Participants left out because their session did not complete.
    pub excluded: Vec<String>,
    pub tables: Vec<Table>,
}

/// Runs every analysis that applies to the battery kinds present.
///
/// Participants listed in `header` with a state other than `completed` are
/// left out.
pub fn analyze_all(
    records: &[ResponseRecord],
    header: Option<&ResponseHeader>,
    options: &AnalysisOptions,
) -> Result<ConsistencyReport, AnalysisError> {
    let excluded: BTreeSet<&str> = header
        .map(|h| {
            h.participants
                .iter()
                .filter(|p| p.state != "completed")
                .map(|p| p.participant_id.as_str())
                .collect()
        })
        .unwrap_or_default();
    let mut by_kind: BTreeMap<BatteryKind, Vec<ResponseRecord>> = BTreeMap::new();
    let mut participants = BTreeSet::new();
    for r in records {
        if excluded.contains(r.participant_id.as_str()) || r.is_alertness {
            continue;
        }
        participants.insert(r.participant_id.as_str());
        by_kind.entry(r.battery_kind).or_default().push(r.clone());
    }
    if by_kind.is_empty() {
        return Err(AnalysisError::EmptyResponseSet);
    }
    let mut tables = Vec::new();
    let mut symmetry_rows = Vec::new();
    for (kind, recs) in &by_kind {
        match kind {
            BatteryKind::ModelDisagreement => {
                let rates = disagreement_rates(recs, options)?;
                for (models, per) in &rates {
                    let (a, b) = (model_label(models[0]), model_label(models[1]));
                    let id = format!("{}_vs_{}", models[0], models[1]);
                    tables.push(threshold_summary(per, a, b)?.to_table(&format!("thresholds_{id}")));
                    tables.push(metric_preferences(per, a, b).to_table(&format!("preferences_{id}")));
                }
                let rows = transitivity_summary(&rates);
                if !rows.is_empty() {
                    tables.push(transitivity_table("transitivity", &rows));
                }
            }
            BatteryKind::SinglePeaked | BatteryKind::SinglePeakedRounded => {
                let rows = consistency_by_lambda(recs, options)?;
                let title = if *kind == BatteryKind::SinglePeaked {
                    "Consistency by λ"
                } else {
                    "Consistency by λ, rounded to multiples of 5"
                };
                tables.push(lambda_table(&format!("lambda_{kind}"), title, &rows));
            }
            BatteryKind::PeakLinear => {
                tables.push(peak_linear_consistency(recs, options)?.to_table("peak_linear"));
            }
            BatteryKind::ProjectSymmetry | BatteryKind::SignSymmetry => {
                let mode = if *kind == BatteryKind::ProjectSymmetry {
                    SymmetryMode::Project
                } else {
                    SymmetryMode::Sign
                };
                let rates = symmetry_consistency(recs, mode, options)?;
                symmetry_rows.push(SymmetrySummary::from_rates(mode, &rates));
            }
            BatteryKind::CyclicRanking => {
                let counts = ranking_consistency(recs, options)?;
                tables.push(RankingSummary::from_counts(&counts).to_table("ranking"));
            }
            BatteryKind::ConcentratedVsDistributed => {
                let matrices = preference_matrices(recs, options)?;
                tables.push(class_table("matrix_classes", &matrices));
                tables.push(matrix_table("preference_matrices", &matrices));
            }
            BatteryKind::Biennial => {
                let result = biennial_consistency(recs, options)?;
                for &sub_poll in result.sub_polls.keys() {
                    if let Some(t) = result.sub_poll_table(&format!("biennial_sub_poll_{sub_poll}"), sub_poll) {
                        tables.push(t);
                    }
                }
                tables.push(result.cumulative_table("biennial_cumulative"));
            }
            BatteryKind::TriangleSplit => {
                tables.push(triangle_summary(recs, options)?.to_table("triangle"));
            }
        }
    }
    if !symmetry_rows.is_empty() {
        tables.push(symmetry_table("symmetry", &symmetry_rows));
    }
    if !excluded.is_empty() {
        let mut t = Table::new("excluded", "Excluded participants", &["Participant", "State"]);
        for p in header.map(|h| h.participants.as_slice()).unwrap_or_default() {
            if excluded.contains(p.participant_id.as_str()) {
                t.push(vec![p.participant_id.clone(), p.state.clone()]);
            }
        }
        tables.push(t);
    }
    Ok(ConsistencyReport {
        participants: participants.len(),
        excluded: excluded.into_iter().map(str::to_string).collect(),
        tables,
    })
}

pub fn render_report(report: &ConsistencyReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => tables_to_markdown(&report.tables),
        ReportFormat::Csv => tables_to_csv(&report.tables),
    }
}
