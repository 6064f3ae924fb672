//! Batched environments with auto-reset and per-env context reassignment.
//!
//! `vec_step` is defined as stepping env 0, 1, ..., N-1 in order. With the
//! `parallel` feature the envs are stepped on the rayon pool instead; envs
//! share nothing, so both orders give the same results.
//!
//! [`VecEnv::set_context_to`] validates eagerly and latches the new context
//! until that env's next reset. The running episode is never touched.

use std::sync::Arc;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::context::{schema_for, ContextSpec, EpisodeContext, ResolvedContext};
use crate::engine::{status_len, EngineMode, Env, Observation};
use crate::error::{Error, Result};
use crate::games::{Action, GameId, TerminationCause};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Per-env result of one batched step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepInfo {
    pub env_index: usize,
    pub termination_cause: TerminationCause,
    /// Return and length of the episode the step belonged to.
    pub episode_return: f64,
    pub episode_length: u32,
    /// Context of the finished episode, set on done steps of contextual envs.
    pub finished_context: Option<Arc<EpisodeContext>>,
}

impl StepInfo {
    pub fn done(&self) -> bool {
        self.termination_cause.is_done()
    }

    /// JSON object with keys in lexicographic order.
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "done": self.done(),
            "env_index": self.env_index,
            "episode_length": self.episode_length,
            "episode_return": self.episode_return,
            "termination_cause": self.termination_cause.as_str(),
        });
        if let Some(ctx) = &self.finished_context {
            v["episode_context"] = ctx.to_json();
        }
        v
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BatchStep {
    pub rewards: Vec<f64>,
    pub dones: Vec<bool>,
    pub infos: Vec<StepInfo>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObsShape {
    pub side: usize,
    pub status_len: usize,
}

/// Observations of all envs in flat buffers.
///
/// When every env has the same window side the tile buffer is one
/// contiguous `N * side * side` block; otherwise env `i`'s tiles start at
/// `tile_offsets[i]` and its shape is `shapes[i]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObsBuffer {
    pub tiles: Vec<u8>,
    pub status: Vec<f32>,
    pub shapes: Vec<ObsShape>,
    pub tile_offsets: Vec<usize>,
    pub status_offsets: Vec<usize>,
}

impl ObsBuffer {
    pub fn is_contiguous(&self) -> bool {
        self.shapes.windows(2).all(|w| w[0] == w[1])
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn tiles_of(&self, i: usize) -> &[u8] {
        let side = self.shapes[i].side;
        &self.tiles[self.tile_offsets[i]..self.tile_offsets[i] + side * side]
    }

    pub fn status_of(&self, i: usize) -> &[f32] {
        &self.status[self.status_offsets[i]..self.status_offsets[i] + self.shapes[i].status_len]
    }

    pub fn observation(&self, i: usize) -> Observation {
        Observation {
            tiles: self.tiles_of(i).to_vec(),
            side: self.shapes[i].side,
            status: self.status_of(i).to_vec(),
        }
    }

    fn gather(&mut self, envs: &[Env]) {
        let changed =
            self.shapes.len() != envs.len() || envs.iter().zip(&self.shapes).any(|(e, s)| e.obs_side() != s.side);
        if changed {
            self.shapes.clear();
            self.tile_offsets.clear();
            self.status_offsets.clear();
            let (mut t, mut s) = (0, 0);
            for e in envs {
                let shape = ObsShape {
                    side: e.obs_side(),
                    status_len: status_len(e.game()),
                };
                self.shapes.push(shape);
                self.tile_offsets.push(t);
                self.status_offsets.push(s);
                t += shape.side * shape.side;
                s += shape.status_len;
            }
            self.tiles.resize(t, 0);
            self.status.resize(s, 0.0);
        }
        for (i, e) in envs.iter().enumerate() {
            let t = self.tile_offsets[i];
            self.tiles[t..t + e.obs_tiles().len()].copy_from_slice(e.obs_tiles());
            let s = self.status_offsets[i];
            self.status[s..s + e.obs_status().len()].copy_from_slice(e.obs_status());
        }
    }

    /// Shape table as JSON: one `{"side", "status_len"}` object per env.
    pub fn shape_table_json(&self) -> Value {
        Value::Array(
            self.shapes
                .iter()
                .map(|s| json!({ "side": s.side, "status_len": s.status_len }))
                .collect(),
        )
    }
}

#[derive(Debug, Clone)]
pub struct VecEnv {
    game: GameId,
    master_seed: u64,
    envs: Vec<Env>,
    pending: Vec<Option<ResolvedContext>>,
    exec: ExecMode,
    obs: ObsBuffer,
    batch: BatchStep,
}

fn step_one(env: &mut Env, pending: &mut Option<ResolvedContext>, action: Action) -> Result<(f64, StepInfo)> {
    let r = env.step(action)?;
    let mut info = StepInfo {
        env_index: env.env_index(),
        termination_cause: r.cause,
        episode_return: r.episode_return,
        episode_length: r.episode_length,
        finished_context: None,
    };
    if r.done {
        info.finished_context = env.context_opt();
        if let Some(resolved) = pending.take() {
            env.set_resolved(resolved);
        }
        env.reset()?;
    }
    Ok((r.reward, info))
}

impl VecEnv {
    /// Builds `num_envs` contextual envs and resets each once.
    /// `context_options` holds one spec for all envs or one per env.
    pub fn new(game: GameId, num_envs: usize, context_options: &[ContextSpec], master_seed: u64) -> Result<Self> {
        Self::with_mode(game, num_envs, context_options, master_seed, EngineMode::Contextual)
    }

    pub fn with_mode(
        game: GameId,
        num_envs: usize,
        context_options: &[ContextSpec],
        master_seed: u64,
        mode: EngineMode,
    ) -> Result<Self> {
        if num_envs == 0 {
            return Err(Error::NoEnvs);
        }
        if context_options.len() != 1 && context_options.len() != num_envs {
            return Err(Error::ContextCountMismatch {
                got: context_options.len(),
                expected: num_envs,
            });
        }
        let schema = schema_for(game);
        let mut resolved = Vec::with_capacity(context_options.len());
        for (i, spec) in context_options.iter().enumerate() {
            resolved.push(schema.resolve(spec).map_err(|errors| Error::InvalidContext {
                env_index: Some(i),
                errors,
            })?);
        }
        let mut envs = Vec::with_capacity(num_envs);
        for i in 0..num_envs {
            let r = resolved[if resolved.len() == 1 { 0 } else { i }].clone();
            let mut env = Env::from_resolved(r, master_seed, i, mode);
            env.reset()?;
            envs.push(env);
        }
        let mut obs = ObsBuffer::default();
        obs.gather(&envs);
        Ok(Self {
            game,
            master_seed,
            envs,
            pending: vec![None; num_envs],
            exec: ExecMode::default(),
            obs,
            batch: BatchStep::default(),
        })
    }

    pub fn game(&self) -> GameId {
        self.game
    }

    pub fn num_envs(&self) -> usize {
        self.envs.len()
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn exec_mode(&self) -> ExecMode {
        self.exec
    }

    /// Chooses how `vec_step` runs. Without the `parallel` feature both
    /// modes step sequentially.
    pub fn set_exec_mode(&mut self, mode: ExecMode) {
        self.exec = mode;
    }

    pub fn env(&self, i: usize) -> Result<&Env> {
        self.envs.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.envs.len(),
        })
    }

    pub fn envs(&self) -> &[Env] {
        &self.envs
    }

    pub fn observations(&self) -> &ObsBuffer {
        &self.obs
    }

    /// Steps every env once. On a done step the env is reset before
    /// returning, so its observation is the next episode's first one.
    pub fn vec_step(&mut self, actions: &[Action]) -> Result<&BatchStep> {
        let n = self.envs.len();
        if actions.len() != n {
            return Err(Error::ActionCountMismatch {
                got: actions.len(),
                expected: n,
            });
        }
        for (i, a) in actions.iter().enumerate() {
            self.game.check_action(*a).map_err(|e| e.at_env(i))?;
        }
        let results: Vec<Result<(f64, StepInfo)>> = match self.exec {
            #[cfg(feature = "parallel")]
            ExecMode::Parallel => self
                .envs
                .par_iter_mut()
                .zip(self.pending.par_iter_mut())
                .zip(actions.par_iter())
                .map(|((env, pending), a)| step_one(env, pending, *a))
                .collect(),
            _ => self
                .envs
                .iter_mut()
                .zip(self.pending.iter_mut())
                .zip(actions)
                .map(|((env, pending), a)| step_one(env, pending, *a))
                .collect(),
        };
        let batch = &mut self.batch;
        batch.rewards.clear();
        batch.dones.clear();
        batch.infos.clear();
        for r in results {
            let (reward, info) = r?;
            batch.rewards.push(reward);
            batch.dones.push(info.done());
            batch.infos.push(info);
        }
        self.obs.gather(&self.envs);
        Ok(&self.batch)
    }

    /// Resets every env, consuming pending contexts.
    pub fn vec_reset(&mut self) -> Result<&ObsBuffer> {
        for (env, pending) in self.envs.iter_mut().zip(self.pending.iter_mut()) {
            if let Some(resolved) = pending.take() {
                env.set_resolved(resolved);
            }
            env.reset()?;
        }
        self.obs.gather(&self.envs);
        Ok(&self.obs)
    }

    /// Context of env `i`'s current episode.
    pub fn get_context(&self, i: usize) -> Result<Arc<EpisodeContext>> {
        self.env(i)?.context()
    }

    /// Validates `spec` and latches it for env `i`'s next episode,
    /// replacing any context already pending there.
    pub fn set_context_to(&mut self, i: usize, spec: &ContextSpec) -> Result<()> {
        let n = self.envs.len();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        let resolved = schema_for(self.game)
            .resolve(spec)
            .map_err(|errors| Error::InvalidContext {
                env_index: Some(i),
                errors,
            })?;
        self.pending[i] = Some(resolved);
        Ok(())
    }

    pub fn pending(&self, i: usize) -> Option<&ResolvedContext> {
        self.pending.get(i).and_then(|p| p.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_count_must_be_one_or_n() {
        let c = ContextSpec::new();
        assert!(matches!(
            VecEnv::new(GameId::Maze, 3, &[c.clone(), c.clone()], 0),
            Err(Error::ContextCountMismatch { got: 2, expected: 3 })
        ));
        assert!(matches!(
            VecEnv::new(GameId::Maze, 0, std::slice::from_ref(&c), 0),
            Err(Error::NoEnvs)
        ));
        let v = VecEnv::new(GameId::Maze, 4, &[c], 0).unwrap();
        let d = schema_for(GameId::Maze).defaults();
        assert!(v.envs().iter().all(|e| *e.resolved() == d));
    }

    #[test]
    fn invalid_spec_names_its_env() {
        let bad = ContextSpec::new().with("visibility", 99);
        let err = VecEnv::new(GameId::Maze, 2, &[ContextSpec::new(), bad], 0).unwrap_err();
        assert!(matches!(err, Error::InvalidContext { env_index: Some(1), .. }));
    }

    #[test]
    fn action_checks() {
        let mut v = VecEnv::new(GameId::Maze, 2, &[ContextSpec::new()], 0).unwrap();
        assert_eq!(
            v.vec_step(&[0]).unwrap_err(),
            Error::ActionCountMismatch { got: 1, expected: 2 }
        );
        assert!(matches!(
            v.vec_step(&[0, 4]).unwrap_err(),
            Error::InvalidAction { env_index: Some(1), .. }
        ));
    }

    #[test]
    fn ragged_batches_when_visibility_differs() {
        let specs = [
            ContextSpec::new().with("visibility", 2),
            ContextSpec::new().with("visibility", 3),
        ];
        let mut v = VecEnv::new(GameId::Maze, 2, &specs, 0).unwrap();
        let obs = v.observations();
        assert!(!obs.is_contiguous());
        assert_eq!(obs.tiles.len(), 25 + 49);
        assert_eq!(obs.tiles_of(1).len(), 49);
        v.set_context_to(1, &ContextSpec::new().with("visibility", 2)).unwrap();
        v.vec_reset().unwrap();
        assert!(v.observations().is_contiguous());
        assert_eq!(v.observations().tiles.len(), 50);
    }

    #[test]
    fn done_info_carries_context() {
        let spec = ContextSpec::new().with("max_episode_steps", 225);
        let mut v = VecEnv::new(GameId::Maze, 1, &[spec], 0).unwrap();
        let first = v.get_context(0).unwrap();
        for _ in 0..224 {
            assert!(!v.vec_step(&[0]).unwrap().dones[0]);
        }
        let b = v.vec_step(&[0]).unwrap().clone();
        assert!(b.dones[0]);
        let info = &b.infos[0];
        assert_eq!(info.termination_cause, TerminationCause::Timeout);
        assert_eq!(info.episode_length, 225);
        assert_eq!(info.finished_context.as_deref(), Some(&*first));
        let j = info.to_json();
        assert_eq!(j["episode_context"], first.to_json());
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.find("\"done\"").unwrap() < text.find("\"env_index\"").unwrap());
        assert_eq!(v.get_context(0).unwrap().episode_index, 1);
        assert_eq!(v.env(0).unwrap().episode_length(), 0);
    }

    #[test]
    fn index_checks() {
        let mut v = VecEnv::new(GameId::Lanes, 2, &[ContextSpec::new()], 0).unwrap();
        assert_eq!(
            v.get_context(2).unwrap_err(),
            Error::IndexOutOfRange { index: 2, len: 2 }
        );
        assert!(v.set_context_to(5, &ContextSpec::new()).is_err());
        let err = v
            .set_context_to(0, &ContextSpec::new().with("grid_width", 2))
            .unwrap_err();
        assert!(matches!(err, Error::InvalidContext { env_index: Some(0), .. }));
        assert!(v.pending(0).is_none());
    }
}
