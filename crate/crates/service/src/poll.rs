//! Poll and session state, rebuilt by applying events in order.

use std::collections::BTreeMap;

use budgetpoll_core::agents::battery_seed;
use budgetpoll_core::domain::{IdealBudget, IssueSet, Scope};
use budgetpoll_core::generators::{build_battery, BatteryConfig};
use budgetpoll_core::question::QuestionBattery;
use budgetpoll_core::response::ParticipantStatus;
use budgetpoll_core::{BatteryKind, Question, ResponseRecord};
use serde::{Deserialize, Serialize};

use crate::events::{Event, EventKind, EventLog};

/// Issue labels: a named preset or an explicit set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IssueSpec {
    Preset(Scope),
    Custom(IssueSet),
}

impl Default for IssueSpec {
    fn default() -> Self {
        IssueSpec::Preset(Scope::National)
    }
}

impl IssueSpec {
    pub fn issue_set(&self) -> IssueSet {
        match self {
            IssueSpec::Preset(Scope::National) => IssueSet::national(),
            IssueSpec::Preset(Scope::Municipal) => IssueSet::municipal(),
            IssueSpec::Custom(set) => set.clone(),
        }
    }
}

/// Body of a poll-creation request.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PollConfig {
    #[serde(flatten)]
    pub battery: BatteryConfig,
    #[serde(default)]
    pub issues: IssueSpec,
    /// Root seed; sampled when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl PollConfig {
    pub fn new(battery: BatteryConfig) -> Self {
        PollConfig {
            battery,
            issues: IssueSpec::default(),
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PollStatus {
    Open,
    Closed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poll {
    pub poll_id: String,
    pub config: PollConfig,
    pub seed: u64,
    pub status: PollStatus,
}

/// Public description of a poll.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PollView {
    pub poll_id: String,
    pub battery_kind: BatteryKind,
    pub battery_len: usize,
    pub requires_all_positive: bool,
    pub issues: IssueSet,
    pub status: PollStatus,
    pub seed: u64,
}

impl Poll {
    pub fn view(&self) -> PollView {
        PollView {
            poll_id: self.poll_id.clone(),
            battery_kind: self.config.battery.battery_kind(),
            battery_len: self.config.battery.battery_len(),
            requires_all_positive: self.config.battery.generator.requires_all_positive(),
            issues: self.config.issues.issue_set(),
            status: self.status,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionState {
    AwaitingIdeal,
    Active,
    Completed,
    Blocked,
    ScreenedOut,
}

impl SessionState {
    pub fn as_str(self) -> &'static str {
        match self {
            SessionState::AwaitingIdeal => "awaiting_ideal",
            SessionState::Active => "active",
            SessionState::Completed => "completed",
            SessionState::Blocked => "blocked",
            SessionState::ScreenedOut => "screened_out",
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(
            self,
            SessionState::Completed | SessionState::Blocked | SessionState::ScreenedOut
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Session {
    pub session_id: String,
    pub poll_id: String,
    pub participant_id: String,
    pub token: String,
    pub ideal: Option<IdealBudget>,
    pub battery: Option<QuestionBattery>,
    pub cursor: usize,
    pub state: SessionState,
    pub reason: Option<String>,
    /// Set once a screening answer balanced across years.
    pub screening_failed: bool,
    /// Question at the cursor and when it was first served.
    pub served: Option<(String, u64)>,
}

impl Session {
    pub fn current_question(&self) -> Option<&Question> {
        self.battery.as_ref()?.questions.get(self.cursor)
    }

    pub fn total(&self) -> usize {
        self.battery.as_ref().map_or(0, |b| b.len())
    }

    pub fn status(&self) -> ParticipantStatus {
        ParticipantStatus {
            participant_id: self.participant_id.clone(),
            session_id: Some(self.session_id.clone()),
            state: self.state.as_str().to_string(),
            reason: self.reason.clone(),
        }
    }
}

/// A poll with its sessions, records and log.
#[derive(Debug)]
pub struct PollState {
    pub poll: Poll,
    pub sessions: BTreeMap<String, Session>,
    /// Session ids in creation order.
    pub session_order: Vec<String>,
    /// Response records in submission order.
    pub records: Vec<ResponseRecord>,
    pub log: EventLog,
}

impl PollState {
    pub fn new(poll: Poll, log: EventLog) -> Self {
        PollState {
            poll,
            sessions: BTreeMap::new(),
            session_order: Vec::new(),
            records: Vec::new(),
            log,
        }
    }

    /// Rebuilds a poll from its events; the first must be `poll_created`.
    pub fn replay(log: EventLog) -> Result<Self, String> {
        let events = log.events().to_vec();
        let first = events.first().ok_or("empty event log")?;
        let EventKind::PollCreated {
            poll_id,
            config,
            seed,
        } = &first.kind
        else {
            return Err("event log does not start with poll_created".into());
        };
        let poll = Poll {
            poll_id: poll_id.clone(),
            config: (**config).clone(),
            seed: *seed,
            status: PollStatus::Open,
        };
        let mut state = PollState::new(poll, log);
        for e in &events[1..] {
            state.apply(e)?;
        }
        Ok(state)
    }

    pub fn session_mut(&mut self, session_id: &str) -> Result<&mut Session, String> {
        self.sessions
            .get_mut(session_id)
            .ok_or_else(|| format!("unknown session `{session_id}`"))
    }

    /// Applies one event. Every state change goes through here, both live
    /// and on replay.
    pub fn apply(&mut self, e: &Event) -> Result<(), String> {
        let sid = e.session_id.as_deref();
        let need_sid = || sid.ok_or_else(|| format!("event {} lacks a session id", e.seq));
        match &e.kind {
            EventKind::PollCreated { .. } => return Err("duplicate poll_created".into()),
            EventKind::PollClosed => self.poll.status = PollStatus::Closed,
            EventKind::SessionStarted {
                participant_id,
                token,
            } => {
                let sid = need_sid()?.to_string();
                self.session_order.push(sid.clone());
                self.sessions.insert(
                    sid.clone(),
                    Session {
                        session_id: sid,
                        poll_id: self.poll.poll_id.clone(),
                        participant_id: participant_id.clone(),
                        token: token.clone(),
                        ideal: None,
                        battery: None,
                        cursor: 0,
                        state: SessionState::AwaitingIdeal,
                        reason: None,
                        screening_failed: false,
                        served: None,
                    },
                );
            }
            EventKind::IdealAccepted { ideal, .. } => {
                let config = self.poll.config.battery.clone();
                let poll_seed = self.poll.seed;
                let s = self.session_mut(need_sid()?)?;
                let ideal = IdealBudget::new(s.participant_id.clone(), *ideal).map_err(|e| e.to_string())?;
                let battery = build_battery(&ideal, &config, battery_seed(poll_seed, &s.participant_id))
                    .map_err(|e| e.to_string())?;
                s.ideal = Some(ideal);
                s.battery = Some(battery);
                s.cursor = 0;
                s.state = SessionState::Active;
            }
            EventKind::ScreenedOut { reason } => {
                let s = self.session_mut(need_sid()?)?;
                s.state = SessionState::ScreenedOut;
                s.reason = Some(reason.clone());
            }
            EventKind::QuestionServed { question_id } => {
                let s = self.session_mut(need_sid()?)?;
                s.served = Some((question_id.clone(), e.timestamp));
            }
            EventKind::AnswerSubmitted {
                question_id,
                answer,
            } => {
                let s = self.session_mut(need_sid()?)?;
                let battery = s.battery.as_ref().ok_or("answer before ideal")?;
                let q = battery
                    .questions
                    .get(s.cursor)
                    .filter(|q| &q.id == question_id)
                    .ok_or_else(|| format!("answer to `{question_id}` is out of order"))?;
                let mut record = ResponseRecord::new(
                    s.participant_id.clone(),
                    battery.battery_kind,
                    q,
                    answer.clone(),
                );
                record.session_id = Some(s.session_id.clone());
                record.received_at = s
                    .served
                    .as_ref()
                    .filter(|(id, _)| id == question_id)
                    .map(|(_, t)| *t);
                record.answered_at = Some(e.timestamp);
                if q.provenance.screening && record.generator_choice() == Some(1) {
                    s.screening_failed = true;
                }
                s.cursor += 1;
                s.served = None;
                self.records.push(record);
            }
            EventKind::Blocked { reason } => {
                let s = self.session_mut(need_sid()?)?;
                s.state = SessionState::Blocked;
                s.reason = Some(reason.clone());
            }
            EventKind::Completed => {
                self.session_mut(need_sid()?)?.state = SessionState::Completed;
            }
        }
        Ok(())
    }

    /// Appends an event and applies it.
    pub fn record(&mut self, session_id: Option<&str>, kind: EventKind) -> Result<Event, crate::ServiceError> {
        let event = self.log.append(session_id, kind)?;
        self.apply(&event)
            .map_err(|e| crate::ServiceError::Storage(std::io::Error::other(e)))?;
        Ok(event)
    }

    pub fn statuses(&self) -> Vec<ParticipantStatus> {
        self.session_order
            .iter()
            .map(|id| self.sessions[id].status())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use budgetpoll_core::generators::GeneratorConfig;

    #[test]
    fn config_accepts_flat_documents() {
        let c: PollConfig = serde_json::from_str(
            r#"{"kind": "concentrated_vs_distributed", "issues": "national", "seed": 3}"#,
        )
        .unwrap();
        assert!(c.battery.generator.requires_all_positive());
        assert_eq!(c.seed, Some(3));
        assert!(c.battery.alertness);
        let c: PollConfig = serde_json::from_str(r#"{"kind": "biennial", "k": 4, "alertness": false}"#).unwrap();
        assert_eq!(c.battery.generator, GeneratorConfig::Biennial { k: 4 });
        assert_eq!(c.battery.battery_len(), 12);
        let back: PollConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<PollConfig>(r#"{"kind": "unknown"}"#).is_err());
    }

    #[test]
    fn custom_issue_sets() {
        let c: PollConfig = serde_json::from_str(
            r#"{"kind": "peak_linear", "issues": {"names": ["a", "b", "c"], "scope": "municipal"}}"#,
        )
        .unwrap();
        assert_eq!(c.issues.issue_set().names()[2], "c");
    }
}
