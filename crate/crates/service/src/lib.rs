//! Session-based poll service: poll creation, ideal-budget intake, question
//! sequencing with alertness enforcement, an append-only event log and
//! response export over HTTP.

mod error;
pub mod events;
pub mod http;
pub mod poll;
mod service;

pub use error::ServiceError;
pub use http::{router, serve};
pub use poll::{IssueSpec, PollConfig, PollStatus, PollView, SessionState};
pub use service::{
    rescale_preview, AnswerAck, IdealAccepted, NextQuestion, PollService, PollSnapshot,
    QuestionView, Registry, RegistryEntry, ServiceConfig, ServiceSnapshot, SessionSnapshot,
    SessionTicket,
};
