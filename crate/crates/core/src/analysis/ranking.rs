use std::collections::BTreeMap;

use crate::question::{Generator, QuestionKind};
use crate::response::ResponseRecord;

use super::format::{percent, PercentStyle, Table};
use super::{by_participant, AnalysisError, AnalysisOptions};

const RELATIONS: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

fn position(ranking: &[usize], option: usize) -> usize {
    ranking.iter().position(|&o| o == option).expect("validated permutation")
}

/// Number of option pairs (out of three) whose relative order is the same in
/// every ranking the participant gave.
///
/// With `skip_tie_broken`, participants with any tie-broken ranking are
/// dropped.
pub fn ranking_consistency(
    records: &[ResponseRecord],
    options: &AnalysisOptions,
) -> Result<BTreeMap<String, usize>, AnalysisError> {
    let relevant = records.iter().filter(|r| {
        !r.is_alertness
            && r.provenance.generator == Generator::CyclicRanking
            && r.question_kind == QuestionKind::Ranking
    });
    let mut out = BTreeMap::new();
    for (pid, recs) in by_participant(relevant) {
        let mut rankings = Vec::with_capacity(recs.len());
        for r in &recs {
            let ranking = r.generator_answer.ranking().filter(|v| {
                let mut sorted = v.to_vec();
                sorted.sort_unstable();
                sorted == [0, 1, 2]
            });
            match ranking {
                Some(v) => rankings.push(v),
                None => {
                    return Err(AnalysisError::MalformedRanking {
                        participant_id: pid.to_string(),
                        question_id: r.question_id.clone(),
                    })
                }
            }
        }
        if rankings.len() < 2 {
            return Err(AnalysisError::IncompleteSet {
                participant_id: pid.to_string(),
                set_index: 0,
                expected: 2,
                found: rankings.len(),
            });
        }
        if options.skip_tie_broken && recs.iter().any(|r| r.tie_broken) {
            continue;
        }
        let consistent = RELATIONS
            .iter()
            .filter(|[a, b]| {
                let above = |v: &[usize]| position(v, *a) < position(v, *b);
                let first = above(rankings[0]);
                rankings.iter().all(|v| above(v) == first)
            })
            .count();
        out.insert(pid.to_string(), consistent);
    }
    if out.is_empty() {
        return Err(AnalysisError::EmptyResponseSet);
    }
    Ok(out)
}

/// Participants consistent in at least one, at least two, and all three
/// pairwise relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankingSummary {
    pub over_one_third: usize,
    pub over_two_thirds: usize,
    pub all: usize,
    pub participants: usize,
}

impl RankingSummary {
    pub fn from_counts(counts: &BTreeMap<String, usize>) -> Self {
        let at_least = |k: usize| counts.values().filter(|&&c| c >= k).count();
        RankingSummary {
            over_one_third: at_least(1),
            over_two_thirds: at_least(2),
            all: at_least(3),
            participants: counts.len(),
        }
    }

    pub fn to_table(&self, id: &str) -> Table {
        let mut t = Table::new(
            id,
            "Ranking consistency",
            &["", "over 1/3", "over 2/3", "3/3 consistent"],
        );
        let counts = [self.over_one_third, self.over_two_thirds, self.all];
        let mut row = vec!["Number of Participants".to_string()];
        row.extend(counts.iter().map(|c| c.to_string()));
        t.push(row);
        let mut row = vec!["Percentage".to_string()];
        row.extend(counts.iter().map(|&c| {
            format!("{}%", percent(c, self.participants, PercentStyle::TruncFixed(1)))
        }));
        t.push(row);
        t
    }
}
