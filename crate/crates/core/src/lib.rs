//! Procedurally generated grid games whose generation parameters are an
//! explicit, validated, per-environment context.
//!
//! * [`context`]: parameter schemas, specs, validation, per-episode realization
//! * [`games`]: the ridge, lanes, and maze generators and dynamics
//! * [`engine`]: single environments with seeded episodes
//! * [`vecenv`]: batched stepping with auto-reset and context reassignment
//! * [`curriculum`]: context samplers and a driver that records episode traces
//! * [`bench`]: overhead measurements for context tracking

pub mod bench;
pub mod context;
pub mod curriculum;
pub mod engine;
pub mod error;
pub mod games;
pub mod render;
pub mod rng;
pub mod vecenv;

pub use context::{
    parse_context, preset, schema_for, serialize_context, ContextSchema, ContextSpec, EpisodeContext, PresetMode,
    ResolvedContext,
};
pub use engine::{EngineMode, Env, Observation, StepResult};
pub use error::{Error, Result};
pub use games::{Action, GameId, TerminationCause};
pub use rng::RngStream;
pub use vecenv::{BatchStep, ExecMode, ObsBuffer, StepInfo, VecEnv};
