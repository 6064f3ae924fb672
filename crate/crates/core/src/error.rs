use thiserror::Error;

use crate::context::{ContextParseError, ValidationErrors};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown game `{0}` (expected one of: ridge, lanes, maze)")]
    UnknownGame(String),

    #[error("invalid context{}: {errors}", env_suffix(*.env_index))]
    InvalidContext {
        env_index: Option<usize>,
        errors: ValidationErrors,
    },

    #[error(transparent)]
    Parse(#[from] ContextParseError),

    #[error("invalid action {action}{}: game `{game}` accepts 0..{alphabet}", env_suffix(*.env_index))]
    InvalidAction {
        env_index: Option<usize>,
        game: &'static str,
        action: u8,
        alphabet: u8,
    },

    #[error("step called after the episode ended; call reset first")]
    SteppedAfterDone,

    #[error("no active episode; call reset first")]
    NoActiveEpisode,

    #[error("episode context is not tracked in static-baseline mode")]
    ContextUnavailable,

    #[error("level generation failed{}: {detail}", env_suffix(*.env_index))]
    GenerationFailure { env_index: Option<usize>, detail: String },

    #[error("expected 1 or {expected} context options, got {got}")]
    ContextCountMismatch { got: usize, expected: usize },

    #[error("expected {expected} actions, got {got}")]
    ActionCountMismatch { got: usize, expected: usize },

    #[error("env index {index} out of range (num_envs = {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("num_envs must be at least 1")]
    NoEnvs,

    #[error("invalid configuration: {0}")]
    Config(String),
}

fn env_suffix(env_index: Option<usize>) -> String {
    match env_index {
        Some(i) => format!(" for env {i}"),
        None => String::new(),
    }
}

impl Error {
    /// Attach an environment index to errors that carry one.
    pub fn at_env(self, index: usize) -> Self {
        match self {
            Error::InvalidContext { errors, .. } => Error::InvalidContext {
                env_index: Some(index),
                errors,
            },
            Error::InvalidAction {
                game, action, alphabet, ..
            } => Error::InvalidAction {
                env_index: Some(index),
                game,
                action,
                alphabet,
            },
            Error::GenerationFailure { detail, .. } => Error::GenerationFailure {
                env_index: Some(index),
                detail,
            },
            other => other,
        }
    }
}

impl From<ValidationErrors> for Error {
    fn from(errors: ValidationErrors) -> Self {
        Error::InvalidContext {
            env_index: None,
            errors,
        }
    }
}
