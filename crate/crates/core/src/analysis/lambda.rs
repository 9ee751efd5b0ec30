use std::collections::BTreeMap;

use crate::amount::Weight;
use crate::question::Generator;
use crate::response::ResponseRecord;

use super::format::{percent, PercentStyle, Table};
use super::{pairwise_consistency, require, usable, AnalysisError, AnalysisOptions, Rate};

fn is_convex(r: &ResponseRecord) -> bool {
    matches!(
        r.provenance.generator,
        Generator::ConvexCombination | Generator::RoundedConvexCombination
    )
}

/// Pooled consistency of convex-combination answers at one λ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LambdaRow {
    pub lambda: Weight,
    pub rate: Rate,
}

/// Consistency of convex-combination answers grouped by λ. Repeated λ values
/// are pooled into one row.
pub fn consistency_by_lambda(
    records: &[ResponseRecord],
    options: &AnalysisOptions,
) -> Result<Vec<LambdaRow>, AnalysisError> {
    let mut by_lambda: BTreeMap<Weight, Rate> = BTreeMap::new();
    for r in usable(records, options).filter(|r| is_convex(r)) {
        let lambda = require(r.provenance.lambda, r, "lambda")?;
        if let Some(choice) = r.generator_choice() {
            by_lambda.entry(lambda).or_default().add(choice == 1);
        }
    }
    if by_lambda.is_empty() {
        return Err(AnalysisError::EmptyResponseSet);
    }
    Ok(by_lambda
        .into_iter()
        .map(|(lambda, rate)| LambdaRow { lambda, rate })
        .collect())
}

/// Per-participant share of convex-combination answers that pick the blend.
pub fn convex_rates(
    records: &[ResponseRecord],
    options: &AnalysisOptions,
) -> Result<BTreeMap<String, Rate>, AnalysisError> {
    pairwise_consistency(records, options, |r| {
        is_convex(r).then(|| r.generator_choice() == Some(1))
    })
}

pub(crate) fn lambda_table(id: &str, title: &str, rows: &[LambdaRow]) -> Table {
    let mut t = Table::new(id, title, &["λ", "Average Consistency (%)", "Total Pairs"]);
    for row in rows {
        t.push(vec![
            row.lambda.to_string(),
            percent(row.rate.consistent, row.rate.total, PercentStyle::RoundFixed(2)),
            row.rate.total.to_string(),
        ]);
    }
    t
}
