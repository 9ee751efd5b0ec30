use budgetpoll_core::response::AnswerError;

/// Every failure the service reports; each maps to one HTTP status.
#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("invalid poll configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown poll `{0}`")]
    UnknownPoll(String),
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("poll `{0}` is closed")]
    PollClosed(String),
    #[error("participant `{0}` is blocked")]
    ParticipantBlocked(String),
    #[error("session is blocked")]
    SessionBlocked,
    #[error("participant `{0}` already has a session in this poll")]
    DuplicateSession(String),
    #[error("screened out: {0}")]
    ScreenedOut(String),
    #[error("session is {0}, not {1}")]
    SessionNotActive(&'static str, &'static str),
    #[error("expected an answer to `{expected}`, got `{got}`")]
    WrongQuestion { expected: String, got: String },
    #[error("malformed answer: {0}")]
    MalformedAnswer(#[from] AnswerError),
    #[error("{0}")]
    ValidationFailed(String),
    #[error("could not generate questions: {0}")]
    GenerationExhausted(String),
    #[error("missing or invalid credentials")]
    Unauthorized,
    #[error("storage failure: {0}")]
    Storage(#[from] std::io::Error),
}

impl ServiceError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::InvalidConfig(_) => "invalid_config",
            ServiceError::UnknownPoll(_) => "unknown_poll",
            ServiceError::UnknownSession(_) => "unknown_session",
            ServiceError::PollClosed(_) => "poll_closed",
            ServiceError::ParticipantBlocked(_) => "participant_blocked",
            ServiceError::SessionBlocked => "session_blocked",
            ServiceError::DuplicateSession(_) => "duplicate_session",
            ServiceError::ScreenedOut(_) => "screened_out",
            ServiceError::SessionNotActive(..) => "session_not_active",
            ServiceError::WrongQuestion { .. } => "wrong_question",
            ServiceError::MalformedAnswer(_) => "malformed_answer",
            ServiceError::ValidationFailed(_) => "validation_failed",
            ServiceError::GenerationExhausted(_) => "generation_exhausted",
            ServiceError::Unauthorized => "unauthorized",
            ServiceError::Storage(_) => "storage",
        }
    }

    pub fn status(&self) -> u16 {
        match self {
            ServiceError::InvalidConfig(_)
            | ServiceError::MalformedAnswer(_)
            | ServiceError::ValidationFailed(_)
            | ServiceError::GenerationExhausted(_) => 422,
            ServiceError::UnknownPoll(_) | ServiceError::UnknownSession(_) => 404,
            ServiceError::PollClosed(_) => 410,
            ServiceError::ParticipantBlocked(_)
            | ServiceError::SessionBlocked
            | ServiceError::ScreenedOut(_) => 403,
            ServiceError::DuplicateSession(_)
            | ServiceError::SessionNotActive(..)
            | ServiceError::WrongQuestion { .. } => 409,
            ServiceError::Unauthorized => 401,
            ServiceError::Storage(_) => 500,
        }
    }
}
