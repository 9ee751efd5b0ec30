use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard, RwLock};

use budgetpoll_core::domain::{rescale, validate_allocation, BudgetAllocation, IdealBudget};
use budgetpoll_core::generators::{build_battery, check_eligibility};
use budgetpoll_core::question::{QuestionBattery, QuestionKind, QuestionOptions};
use budgetpoll_core::response::{write_ndjson, ResponseHeader};
use budgetpoll_core::agents::battery_seed;
use budgetpoll_core::{Amount, Answer, ResponseRecord};
use serde::{Deserialize, Serialize};

use crate::events::{EventKind, EventLog};
use crate::poll::{Poll, PollConfig, PollState, PollStatus, PollView, SessionState};
use crate::ServiceError;

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    /// Bearer token required by poll creation, closing and export.
    pub admin_token: String,
    /// Where event logs and the registry snapshot live; in memory when unset.
    pub data_dir: Option<PathBuf>,
}

impl ServiceConfig {
    pub fn in_memory(admin_token: impl Into<String>) -> Self {
        ServiceConfig {
            admin_token: admin_token.into(),
            data_dir: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub blocked: bool,
    pub sessions: BTreeSet<String>,
}

/// Participants across every poll.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Registry {
    pub participants: BTreeMap<String, RegistryEntry>,
}

impl Registry {
    pub fn is_blocked(&self, participant_id: &str) -> bool {
        self.participants
            .get(participant_id)
            .is_some_and(|e| e.blocked)
    }

    fn merge(&mut self, other: Registry) {
        for (pid, entry) in other.participants {
            let mine = self.participants.entry(pid).or_default();
            mine.blocked |= entry.blocked;
            mine.sessions.extend(entry.sessions);
        }
    }
}

/// Returned when a session starts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionTicket {
    pub session_id: String,
    pub token: String,
    pub state: SessionState,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealAccepted {
    pub state: SessionState,
    pub ideal: BudgetAllocation,
    pub total: usize,
}

/// A question as shown to a participant: no provenance, display order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuestionView {
    pub id: String,
    pub kind: QuestionKind,
    pub options: QuestionOptions,
    pub index: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum NextQuestion {
    Active { question: QuestionView },
    Completed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerAck {
    pub state: SessionState,
    pub cursor: usize,
    pub total: usize,
}

/// Comparable view of everything the service holds, used to check replay.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ServiceSnapshot {
    pub polls: Vec<PollSnapshot>,
    pub registry: Registry,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PollSnapshot {
    pub poll: Poll,
    pub sessions: Vec<SessionSnapshot>,
    pub records: Vec<ResponseRecord>,
    pub last_seq: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SessionSnapshot {
    pub session_id: String,
    pub participant_id: String,
    pub state: SessionState,
    pub cursor: usize,
    pub ideal: Option<BudgetAllocation>,
    pub battery: Option<QuestionBattery>,
    pub reason: Option<String>,
    pub screening_failed: bool,
}

/// The poll service. Operations on one poll are serialized; different polls
/// proceed in parallel. Lock order: poll, then registry.
pub struct PollService {
    config: ServiceConfig,
    polls: RwLock<BTreeMap<String, Arc<Mutex<PollState>>>>,
    session_index: RwLock<HashMap<String, String>>,
    registry: Mutex<Registry>,
    next_poll: AtomicU64,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

fn invalid_data(msg: String) -> ServiceError {
    ServiceError::Storage(std::io::Error::new(std::io::ErrorKind::InvalidData, msg))
}

const REGISTRY_FILE: &str = "registry.json";
const POLLS_DIR: &str = "polls";

impl PollService {
    /// Creates the service, replaying any logs under the data directory.
    pub fn open(config: ServiceConfig) -> Result<Self, ServiceError> {
        let service = PollService {
            config,
            polls: RwLock::new(BTreeMap::new()),
            session_index: RwLock::new(HashMap::new()),
            registry: Mutex::new(Registry::default()),
            next_poll: AtomicU64::new(1),
        };
        if let Some(dir) = service.config.data_dir.clone() {
            service.load(&dir)?;
        }
        Ok(service)
    }

    fn load(&self, dir: &Path) -> Result<(), ServiceError> {
        let polls_dir = dir.join(POLLS_DIR);
        std::fs::create_dir_all(&polls_dir)?;
        let mut paths: Vec<PathBuf> = std::fs::read_dir(&polls_dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "ndjson"))
            .collect();
        paths.sort();
        let mut registry = Registry::default();
        let mut max_id = 0;
        for path in paths {
            let state = PollState::replay(EventLog::open(&path)?)
                .map_err(|e| invalid_data(format!("{}: {e}", path.display())))?;
            if let Some(n) = state.poll.poll_id.strip_prefix("poll-").and_then(|n| n.parse().ok()) {
                max_id = max_id.max(n);
            }
            for s in state.sessions.values() {
                let entry = registry.participants.entry(s.participant_id.clone()).or_default();
                entry.sessions.insert(s.session_id.clone());
                entry.blocked |= s.state == SessionState::Blocked;
                self.session_index
                    .write()
                    .expect("index lock")
                    .insert(s.session_id.clone(), state.poll.poll_id.clone());
            }
            self.polls
                .write()
                .expect("poll lock")
                .insert(state.poll.poll_id.clone(), Arc::new(Mutex::new(state)));
        }
        let snapshot = dir.join(REGISTRY_FILE);
        if snapshot.exists() {
            let text = std::fs::read_to_string(&snapshot)?;
            let saved: Registry = serde_json::from_str(&text)
                .map_err(|e| invalid_data(format!("{}: {e}", snapshot.display())))?;
            registry.merge(saved);
        }
        *lock(&self.registry) = registry;
        self.next_poll.store(max_id + 1, Ordering::SeqCst);
        Ok(())
    }

    fn save_registry(&self, registry: &Registry) -> Result<(), ServiceError> {
        let Some(dir) = &self.config.data_dir else {
            return Ok(());
        };
        let tmp = dir.join(format!("{REGISTRY_FILE}.tmp"));
        let text = serde_json::to_string_pretty(registry).map_err(std::io::Error::other)?;
        std::fs::write(&tmp, text)?;
        std::fs::rename(&tmp, dir.join(REGISTRY_FILE))?;
        Ok(())
    }

    pub fn check_admin(&self, token: Option<&str>) -> Result<(), ServiceError> {
        match token {
            Some(t) if !self.config.admin_token.is_empty() && t == self.config.admin_token => Ok(()),
            _ => Err(ServiceError::Unauthorized),
        }
    }

    fn poll_handle(&self, poll_id: &str) -> Result<Arc<Mutex<PollState>>, ServiceError> {
        self.polls
            .read()
            .expect("poll lock")
            .get(poll_id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownPoll(poll_id.to_string()))
    }

    /// Locks the session's poll after checking the bearer token.
    fn with_session<R>(
        &self,
        session_id: &str,
        token: Option<&str>,
        f: impl FnOnce(&mut PollState) -> Result<R, ServiceError>,
    ) -> Result<R, ServiceError> {
        let poll_id = self
            .session_index
            .read()
            .expect("index lock")
            .get(session_id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(session_id.to_string()))?;
        let handle = self.poll_handle(&poll_id)?;
        let mut poll = lock(&handle);
        let session = &poll.sessions[session_id];
        if token != Some(session.token.as_str()) {
            return Err(ServiceError::Unauthorized);
        }
        f(&mut poll)
    }

    pub fn create_poll(&self, config: PollConfig) -> Result<PollView, ServiceError> {
        config
            .battery
            .generator
            .validate()
            .map_err(|e| ServiceError::InvalidConfig(e.to_string()))?;
        let seed = config.seed.unwrap_or_else(rand::random);
        let poll_id = format!("poll-{:04}", self.next_poll.fetch_add(1, Ordering::SeqCst));
        let mut log = match &self.config.data_dir {
            Some(dir) => {
                let polls_dir = dir.join(POLLS_DIR);
                std::fs::create_dir_all(&polls_dir)?;
                EventLog::create(&polls_dir.join(format!("{poll_id}.ndjson")))?
            }
            None => EventLog::in_memory(),
        };
        log.append(
            None,
            EventKind::PollCreated {
                poll_id: poll_id.clone(),
                config: Box::new(config.clone()),
                seed,
            },
        )?;
        let poll = Poll {
            poll_id: poll_id.clone(),
            config,
            seed,
            status: PollStatus::Open,
        };
        let view = poll.view();
        self.polls
            .write()
            .expect("poll lock")
            .insert(poll_id, Arc::new(Mutex::new(PollState::new(poll, log))));
        tracing::info!(poll_id = %view.poll_id, kind = %view.battery_kind, "poll created");
        Ok(view)
    }

    pub fn poll(&self, poll_id: &str) -> Result<PollView, ServiceError> {
        let handle = self.poll_handle(poll_id)?;
        let view = lock(&handle).poll.view();
        Ok(view)
    }

    pub fn close_poll(&self, poll_id: &str) -> Result<PollView, ServiceError> {
        let handle = self.poll_handle(poll_id)?;
        let mut poll = lock(&handle);
        if poll.poll.status == PollStatus::Open {
            poll.record(None, EventKind::PollClosed)?;
        }
        Ok(poll.poll.view())
    }

    pub fn start_session(&self, poll_id: &str, participant_id: &str) -> Result<SessionTicket, ServiceError> {
        let participant_id = participant_id.trim();
        if participant_id.is_empty() || participant_id.len() > 128 {
            return Err(ServiceError::ValidationFailed(
                "participant id must have 1 to 128 characters".into(),
            ));
        }
        let handle = self.poll_handle(poll_id)?;
        let mut poll = lock(&handle);
        if poll.poll.status == PollStatus::Closed {
            return Err(ServiceError::PollClosed(poll_id.to_string()));
        }
        let mut registry = lock(&self.registry);
        if registry.is_blocked(participant_id) {
            return Err(ServiceError::ParticipantBlocked(participant_id.to_string()));
        }
        if poll.sessions.values().any(|s| s.participant_id == participant_id) {
            return Err(ServiceError::DuplicateSession(participant_id.to_string()));
        }
        let session_id = format!("{poll_id}-s{:04}", poll.session_order.len() + 1);
        let token = format!("{:032x}", rand::random::<u128>());
        poll.record(
            Some(&session_id),
            EventKind::SessionStarted {
                participant_id: participant_id.to_string(),
                token: token.clone(),
            },
        )?;
        registry
            .participants
            .entry(participant_id.to_string())
            .or_default()
            .sessions
            .insert(session_id.clone());
        self.save_registry(&registry)?;
        self.session_index
            .write()
            .expect("index lock")
            .insert(session_id.clone(), poll_id.to_string());
        Ok(SessionTicket {
            session_id,
            token,
            state: SessionState::AwaitingIdeal,
        })
    }

    pub fn submit_ideal(
        &self,
        session_id: &str,
        token: Option<&str>,
        raw: &[Amount],
        use_rescale: bool,
    ) -> Result<IdealAccepted, ServiceError> {
        self.with_session(session_id, token, |poll| {
            let session = &poll.sessions[session_id];
            if lock(&self.registry).is_blocked(&session.participant_id) {
                return Err(ServiceError::ParticipantBlocked(session.participant_id.clone()));
            }
            if session.state != SessionState::AwaitingIdeal {
                return Err(ServiceError::SessionNotActive(
                    session.state.as_str(),
                    "awaiting_ideal",
                ));
            }
            let allocation = if use_rescale {
                rescale(raw)
            } else {
                validate_allocation(raw, false)
            }
            .map_err(|e| ServiceError::ValidationFailed(e.to_string()))?;
            let ideal = IdealBudget::new(session.participant_id.clone(), allocation)
                .map_err(|e| ServiceError::ValidationFailed(e.to_string()))?;
            let config = &poll.poll.config.battery;
            if let Err(e) = check_eligibility(&ideal, &config.generator) {
                let reason = e.to_string();
                poll.record(Some(session_id), EventKind::ScreenedOut { reason: reason.clone() })?;
                return Err(ServiceError::ScreenedOut(reason));
            }
            let battery = build_battery(&ideal, config, battery_seed(poll.poll.seed, &ideal.participant_id))
                .map_err(|e| ServiceError::GenerationExhausted(e.to_string()))?;
            poll.record(
                Some(session_id),
                EventKind::IdealAccepted {
                    raw: raw.to_vec(),
                    use_rescale,
                    ideal: allocation,
                },
            )?;
            Ok(IdealAccepted {
                state: SessionState::Active,
                ideal: allocation,
                total: battery.len(),
            })
        })
    }

    fn check_active(&self, poll: &PollState, session_id: &str) -> Result<(), ServiceError> {
        let session = &poll.sessions[session_id];
        if session.state == SessionState::Blocked || lock(&self.registry).is_blocked(&session.participant_id) {
            return Err(ServiceError::SessionBlocked);
        }
        Ok(())
    }

    pub fn next_question(&self, session_id: &str, token: Option<&str>) -> Result<NextQuestion, ServiceError> {
        self.with_session(session_id, token, |poll| {
            self.check_active(poll, session_id)?;
            let session = &poll.sessions[session_id];
            match session.state {
                SessionState::Completed => return Ok(NextQuestion::Completed),
                SessionState::Active => {}
                other => return Err(ServiceError::SessionNotActive(other.as_str(), "active")),
            }
            let q = session.current_question().expect("active session has a question").clone();
            let total = session.total();
            let index = session.cursor;
            if session.served.as_ref().map(|(id, _)| id) != Some(&q.id) {
                poll.record(
                    Some(session_id),
                    EventKind::QuestionServed {
                        question_id: q.id.clone(),
                    },
                )?;
            }
            Ok(NextQuestion::Active {
                question: QuestionView {
                    id: q.id,
                    kind: q.kind,
                    options: q.options,
                    index,
                    total,
                },
            })
        })
    }

    pub fn submit_answer(
        &self,
        session_id: &str,
        token: Option<&str>,
        question_id: &str,
        answer: Answer,
    ) -> Result<AnswerAck, ServiceError> {
        self.with_session(session_id, token, |poll| {
            self.check_active(poll, session_id)?;
            let session = &poll.sessions[session_id];
            let expected = match session.state {
                SessionState::Active => session.current_question().expect("active").clone(),
                SessionState::Completed => {
                    return Err(ServiceError::WrongQuestion {
                        expected: "none (session completed)".into(),
                        got: question_id.to_string(),
                    })
                }
                other => return Err(ServiceError::SessionNotActive(other.as_str(), "active")),
            };
            if expected.id != question_id {
                return Err(ServiceError::WrongQuestion {
                    expected: expected.id,
                    got: question_id.to_string(),
                });
            }
            answer.validate(&expected)?;
            let generator_choice = answer.to_generator(&expected.provenance).choice();
            poll.record(
                Some(session_id),
                EventKind::AnswerSubmitted {
                    question_id: question_id.to_string(),
                    answer,
                },
            )?;
            let session = &poll.sessions[session_id];
            let participant_id = session.participant_id.clone();
            let screening_failed = session.screening_failed;
            let next = session.current_question().cloned();
            if expected.is_alertness && generator_choice != Some(0) {
                poll.record(
                    Some(session_id),
                    EventKind::Blocked {
                        reason: "did not choose the ideal budget in an alertness check".into(),
                    },
                )?;
                let mut registry = lock(&self.registry);
                registry.participants.entry(participant_id.clone()).or_default().blocked = true;
                self.save_registry(&registry)?;
                tracing::info!(%session_id, %participant_id, "participant blocked");
            } else if screening_failed && !next.as_ref().is_some_and(|q| q.provenance.screening) {
                poll.record(
                    Some(session_id),
                    EventKind::ScreenedOut {
                        reason: "balanced the budget across years in screening".into(),
                    },
                )?;
            } else if next.is_none() {
                poll.record(Some(session_id), EventKind::Completed)?;
            }
            let session = &poll.sessions[session_id];
            Ok(AnswerAck {
                state: session.state,
                cursor: session.cursor,
                total: session.total(),
            })
        })
    }

    /// Header line plus every record of the poll, in submission order.
    pub fn export(&self, poll_id: &str) -> Result<String, ServiceError> {
        let handle = self.poll_handle(poll_id)?;
        let poll = lock(&handle);
        let header = ResponseHeader {
            source: "poll_service".into(),
            poll_id: Some(poll_id.to_string()),
            battery_kind: Some(poll.poll.config.battery.battery_kind()),
            seed: Some(poll.poll.seed),
            participants: poll.statuses(),
        };
        let mut buf = Vec::new();
        write_ndjson(&mut buf, Some(&header), &poll.records)
            .map_err(|e| ServiceError::Storage(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(buf).expect("json is utf-8"))
    }

    pub fn snapshot(&self) -> ServiceSnapshot {
        let polls = self.polls.read().expect("poll lock");
        let polls = polls
            .values()
            .map(|handle| {
                let p = lock(handle);
                PollSnapshot {
                    poll: p.poll.clone(),
                    sessions: p
                        .session_order
                        .iter()
                        .map(|id| {
                            let s = &p.sessions[id];
                            SessionSnapshot {
                                session_id: s.session_id.clone(),
                                participant_id: s.participant_id.clone(),
                                state: s.state,
                                cursor: s.cursor,
                                ideal: s.ideal.as_ref().map(|i| *i.peak()),
                                battery: s.battery.clone(),
                                reason: s.reason.clone(),
                                screening_failed: s.screening_failed,
                            }
                        })
                        .collect(),
                    records: p.records.clone(),
                    last_seq: p.log.last_seq(),
                }
            })
            .collect();
        ServiceSnapshot {
            polls,
            registry: lock(&self.registry).clone(),
        }
    }
}

/// Rescales raw inputs without touching any session.
pub fn rescale_preview(values: &[Amount]) -> Result<BudgetAllocation, ServiceError> {
    rescale(values).map_err(|e| ServiceError::ValidationFailed(e.to_string()))
}
