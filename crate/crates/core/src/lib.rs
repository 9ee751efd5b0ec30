//! Preference elicitation for participatory budgeting.
//!
//! The crate builds structured question batteries from a participant's ideal
//! budget, answers them with synthetic respondents under formal utility
//! models, and computes the consistency statistics used to compare those
//! models against real responses.

pub mod agents;
pub mod amount;
pub mod analysis;
pub mod domain;
pub mod generators;
pub mod question;
pub mod response;
pub mod rng;
pub mod utility;

pub use amount::{Amount, Weight};
pub use domain::{
    deviation, rescale, rotate, validate_allocation, BudgetAllocation, DeviationVector,
    DomainError, IdealBudget, IssueSet, Scope, ISSUES,
};
pub use question::{
    BatteryKind, BiennialOption, Generator, Provenance, Question, QuestionBattery, QuestionKind,
    QuestionOptions,
};
pub use response::{Answer, ResponseRecord};
pub use utility::{distance_variant, evaluate, prefer, ModelKind, Preference, UtilityModel};
