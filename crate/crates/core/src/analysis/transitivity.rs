use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::utility::ModelKind;

use super::format::Table;
use super::pairwise::model_label;
use super::{AnalysisError, Rate};

/// Majority outcome of one head-to-head poll; `None` on an even split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PollWinner {
    pub models: [ModelKind; 2],
    pub winner: Option<ModelKind>,
}

/// Winner from the rate of answers favouring `models[0]`.
pub fn majority_winner(models: [ModelKind; 2], rate: &Rate) -> PollWinner {
    let against = rate.total - rate.consistent;
    let winner = match rate.consistent.cmp(&against) {
        std::cmp::Ordering::Greater => Some(models[0]),
        std::cmp::Ordering::Less => Some(models[1]),
        std::cmp::Ordering::Equal => None,
    };
    PollWinner { models, winner }
}

/// Detects a preference cycle across three head-to-head polls on three
/// models. Returns the cycle `[a, b, c]` (a beats b, b beats c, c beats a)
/// or `None` when the majorities are transitive.
pub fn transitivity_cycle_detect(
    polls: &[PollWinner],
) -> Result<Option<[ModelKind; 3]>, AnalysisError> {
    if polls.len() != 3 {
        return Err(AnalysisError::IncompleteTriple(format!(
            "expected 3 polls, found {}",
            polls.len()
        )));
    }
    let models: BTreeSet<ModelKind> = polls.iter().flat_map(|p| p.models).collect();
    let pairs: BTreeSet<[ModelKind; 2]> = polls
        .iter()
        .map(|p| {
            let mut m = p.models;
            m.sort();
            m
        })
        .collect();
    if models.len() != 3 || pairs.len() != 3 || polls.iter().any(|p| p.models[0] == p.models[1]) {
        return Err(AnalysisError::IncompleteTriple(
            "polls must cover every pair of three distinct models".into(),
        ));
    }
    let mut beats: BTreeMap<ModelKind, ModelKind> = BTreeMap::new();
    for p in polls {
        let winner = p.winner.ok_or_else(|| {
            AnalysisError::IncompleteTriple(format!(
                "{} versus {} has no majority",
                p.models[0], p.models[1]
            ))
        })?;
        let loser = if winner == p.models[0] { p.models[1] } else { p.models[0] };
        if beats.insert(winner, loser).is_some() {
            return Ok(None);
        }
    }
    let a = *models.iter().next().expect("three models");
    let b = beats[&a];
    let c = beats[&b];
    Ok(Some([a, b, c]))
}

/// Transitivity counts for one model triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitivityRow {
    pub models: [ModelKind; 3],
    pub participants: usize,
    pub transitive: usize,
    pub cyclic: usize,
    pub undecided: usize,
}

fn lookup(
    rates: &BTreeMap<[ModelKind; 2], BTreeMap<String, Rate>>,
    a: ModelKind,
    b: ModelKind,
) -> Option<([ModelKind; 2], &BTreeMap<String, Rate>)> {
    rates
        .get(&[a, b])
        .map(|r| ([a, b], r))
        .or_else(|| rates.get(&[b, a]).map(|r| ([b, a], r)))
}

/// For every model triple whose three polls were all run, classifies each
/// participant who answered all three.
pub fn transitivity_summary(
    rates: &BTreeMap<[ModelKind; 2], BTreeMap<String, Rate>>,
) -> Vec<TransitivityRow> {
    let models: Vec<ModelKind> = rates
        .keys()
        .flat_map(|k| *k)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut out = Vec::new();
    for i in 0..models.len() {
        for j in i + 1..models.len() {
            for k in j + 1..models.len() {
                let (a, b, c) = (models[i], models[j], models[k]);
                let (Some(ab), Some(bc), Some(ca)) =
                    (lookup(rates, a, b), lookup(rates, b, c), lookup(rates, c, a))
                else {
                    continue;
                };
                let mut row = TransitivityRow {
                    models: [a, b, c],
                    participants: 0,
                    transitive: 0,
                    cyclic: 0,
                    undecided: 0,
                };
                for (pid, r1) in ab.1 {
                    let (Some(r2), Some(r3)) = (bc.1.get(pid), ca.1.get(pid)) else {
                        continue;
                    };
                    row.participants += 1;
                    let polls = [
                        majority_winner(ab.0, r1),
                        majority_winner(bc.0, r2),
                        majority_winner(ca.0, r3),
                    ];
                    match transitivity_cycle_detect(&polls) {
                        Ok(Some(_)) => row.cyclic += 1,
                        Ok(None) => row.transitive += 1,
                        Err(_) => row.undecided += 1,
                    }
                }
                if row.participants > 0 {
                    out.push(row);
                }
            }
        }
    }
    out
}

pub(crate) fn transitivity_table(id: &str, rows: &[TransitivityRow]) -> Table {
    let mut t = Table::new(
        id,
        "Transitivity of model preferences",
        &["Models", "Participants", "Transitive", "Cyclic", "Undecided"],
    );
    for r in rows {
        t.push(vec![
            r.models.map(model_label).join(", "),
            r.participants.to_string(),
            r.transitive.to_string(),
            r.cyclic.to_string(),
            r.undecided.to_string(),
        ]);
    }
    t
}
