use thiserror::Error;

use crate::model::{AuditState, Event, Scenario};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("event {event} is not defined under scenario {} ({audit:?})", scenario.name())]
    UndefinedEvent {
        event: Event,
        scenario: Scenario,
        audit: AuditState,
    },
    #[error("parameter {field} is not finite ({value})")]
    NonFinite { field: &'static str, value: f64 },
    #[error("parameter {field} = {value} is outside its admissible range")]
    Inadmissible { field: &'static str, value: f64 },
    #[error("audit probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("margin is not single-crossing over [{lo}, {hi}] ({changes} sign changes in sampled margins)")]
    NonMonotone { lo: f64, hi: f64, changes: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("{axis} axis: step must be positive (got {step})")]
    Step { axis: &'static str, step: f64 },
    #[error("{axis} axis: range [{min}, {max}] must lie within [0, 1] with min <= max")]
    Range { axis: &'static str, min: f64, max: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}
