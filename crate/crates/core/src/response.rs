//! Response records and their newline-delimited JSON encoding.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::question::{BatteryKind, Provenance, Question, QuestionKind};

/// A chosen option index or a full ranking (best first), both as option
/// indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Choice(usize),
    Ranking(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnswerError {
    #[error("a {0:?} question needs a single choice")]
    ExpectedChoice(QuestionKind),
    #[error("a ranking question needs a ranking")]
    ExpectedRanking,
    #[error("option {index} does not exist; the question has {count} options")]
    OutOfRange { index: usize, count: usize },
    #[error("a ranking must list every option exactly once")]
    NotAPermutation,
}

impl Answer {
    /// Checks that the answer's shape fits the question.
    pub fn validate(&self, question: &Question) -> Result<(), AnswerError> {
        let count = question.option_count();
        match (question.kind, self) {
            (QuestionKind::Ranking, Answer::Ranking(r)) => {
                if let Some(&index) = r.iter().find(|&&i| i >= count) {
                    return Err(AnswerError::OutOfRange { index, count });
                }
                let mut seen = vec![false; count];
                for &i in r {
                    if std::mem::replace(&mut seen[i], true) {
                        return Err(AnswerError::NotAPermutation);
                    }
                }
                if r.len() != count {
                    return Err(AnswerError::NotAPermutation);
                }
                Ok(())
            }
            (QuestionKind::Ranking, Answer::Choice(_)) => Err(AnswerError::ExpectedRanking),
            (kind, Answer::Ranking(_)) => Err(AnswerError::ExpectedChoice(kind)),
            (_, Answer::Choice(i)) if *i >= count => Err(AnswerError::OutOfRange { index: *i, count }),
            (_, Answer::Choice(_)) => Ok(()),
        }
    }

    /// Maps displayed option indices back to generator indices.
    pub fn to_generator(&self, provenance: &Provenance) -> Answer {
        match self {
            Answer::Choice(i) => Answer::Choice(provenance.to_generator_index(*i)),
            Answer::Ranking(r) => {
                Answer::Ranking(r.iter().map(|&i| provenance.to_generator_index(i)).collect())
            }
        }
    }

    pub fn choice(&self) -> Option<usize> {
        match self {
            Answer::Choice(i) => Some(*i),
            Answer::Ranking(_) => None,
        }
    }

    pub fn ranking(&self) -> Option<&[usize]> {
        match self {
            Answer::Ranking(r) => Some(r),
            Answer::Choice(_) => None,
        }
    }
}

/// One answer to one question.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub participant_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
    pub question_id: String,
    pub battery_kind: BatteryKind,
    pub question_kind: QuestionKind,
    pub provenance: Provenance,
    #[serde(default)]
    pub is_alertness: bool,
    /// As displayed.
    pub answer: Answer,
    /// Mapped back through the recorded option permutation.
    pub generator_answer: Answer,
    /// Set when a synthetic respondent broke an exact tie at random.
    #[serde(default, skip_serializing_if = "is_false")]
    pub tie_broken: bool,
    /// Milliseconds since the Unix epoch when the question was served.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub received_at: Option<u64>,
    /// Milliseconds since the Unix epoch when the answer arrived.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answered_at: Option<u64>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl ResponseRecord {
    pub fn new(
        participant_id: impl Into<String>,
        battery_kind: BatteryKind,
        question: &Question,
        answer: Answer,
    ) -> Self {
        let generator_answer = answer.to_generator(&question.provenance);
        ResponseRecord {
            participant_id: participant_id.into(),
            session_id: None,
            question_id: question.id.clone(),
            battery_kind,
            question_kind: question.kind,
            provenance: question.provenance.clone(),
            is_alertness: question.is_alertness,
            answer,
            generator_answer,
            tie_broken: false,
            received_at: None,
            answered_at: None,
        }
    }

    /// Generator-relative choice for pairwise and biennial questions.
    pub fn generator_choice(&self) -> Option<usize> {
        self.generator_answer.choice()
    }
}

/// Final state of a participant's session, listed in export headers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParticipantStatus {
    pub participant_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
    pub state: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Metadata written as the first line of a response stream.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseHeader {
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poll_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub battery_kind: Option<BatteryKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub participants: Vec<ParticipantStatus>,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    header: ResponseHeader,
}

#[derive(Debug, thiserror::Error)]
pub enum ResponseIoError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Writes an optional header line followed by one record per line.
pub fn write_ndjson<W: Write>(
    mut out: W,
    header: Option<&ResponseHeader>,
    records: &[ResponseRecord],
) -> Result<(), ResponseIoError> {
    if let Some(header) = header {
        let line = serde_json::to_string(&HeaderLine {
            header: header.clone(),
        })
        .map_err(|source| ResponseIoError::Parse { line: 1, source })?;
        writeln!(out, "{line}")?;
    }
    for (i, r) in records.iter().enumerate() {
        let line = serde_json::to_string(r)
            .map_err(|source| ResponseIoError::Parse { line: i + 2, source })?;
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a response stream; the header line is optional and blank lines are
/// skipped.
pub fn read_ndjson<R: BufRead>(
    input: R,
) -> Result<(Option<ResponseHeader>, Vec<ResponseRecord>), ResponseIoError> {
    let mut header = None;
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if header.is_none() && records.is_empty() && trimmed.starts_with("{\"header\"") {
            let h: HeaderLine = serde_json::from_str(trimmed)
                .map_err(|source| ResponseIoError::Parse { line: i + 1, source })?;
            header = Some(h.header);
            continue;
        }
        records.push(
            serde_json::from_str(trimmed)
                .map_err(|source| ResponseIoError::Parse { line: i + 1, source })?,
        );
    }
    Ok((header, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BudgetAllocation;
    use crate::question::{Generator, Provenance};

    fn question(kind: QuestionKind) -> Question {
        let p = BudgetAllocation::from_points([30, 30, 40]).unwrap();
        let q = BudgetAllocation::from_points([40, 30, 30]).unwrap();
        let mut prov = Provenance::new(Generator::CyclicRanking);
        prov.order = vec![2, 0, 1];
        match kind {
            QuestionKind::Ranking => Question::ranking("q00", vec![p, q, p], prov),
            _ => Question::pairwise("q00", p, q, prov),
        }
    }

    #[test]
    fn answer_validation() {
        let r = question(QuestionKind::Ranking);
        assert!(Answer::Ranking(vec![2, 0, 1]).validate(&r).is_ok());
        assert_eq!(
            Answer::Ranking(vec![0, 0, 1]).validate(&r),
            Err(AnswerError::NotAPermutation)
        );
        assert_eq!(Answer::Choice(0).validate(&r), Err(AnswerError::ExpectedRanking));
        let p = question(QuestionKind::Pairwise);
        assert_eq!(
            Answer::Choice(2).validate(&p),
            Err(AnswerError::OutOfRange { index: 2, count: 2 })
        );
    }

    #[test]
    fn generator_mapping() {
        let r = question(QuestionKind::Ranking);
        let rec = ResponseRecord::new("a", BatteryKind::CyclicRanking, &r, Answer::Ranking(vec![0, 1, 2]));
        assert_eq!(rec.generator_answer, Answer::Ranking(vec![2, 0, 1]));
    }

    #[test]
    fn ndjson_round_trip() {
        let r = question(QuestionKind::Pairwise);
        let rec = ResponseRecord::new("a", BatteryKind::PeakLinear, &r, Answer::Choice(1));
        let header = ResponseHeader {
            source: "test".into(),
            ..Default::default()
        };
        let mut buf = Vec::new();
        write_ndjson(&mut buf, Some(&header), std::slice::from_ref(&rec)).unwrap();
        let (h, recs) = read_ndjson(buf.as_slice()).unwrap();
        assert_eq!(h, Some(header));
        assert_eq!(recs, vec![rec]);
        let (h, recs) = read_ndjson("\n".as_bytes()).unwrap();
        assert!(h.is_none() && recs.is_empty());
    }
}
