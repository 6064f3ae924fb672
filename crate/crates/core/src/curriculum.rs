//! Context samplers and a driver that reassigns contexts at episode
//! boundaries and records one trace row per finished episode.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use crate::context::{schema_for, ContextSpec, EpisodeContext, ParamKind, SpecValue};
use crate::engine::Observation;
use crate::error::{Error, Result};
use crate::games::{Action, GameId, TerminationCause};
use crate::rng::RngStream;
use crate::vecenv::VecEnv;

/// Salt separating sampler streams from episode streams.
const SAMPLER_SALT: u64 = 0x5A3D_1E27_C0DE_0001;

#[derive(Debug, Clone, PartialEq)]
pub enum ContextSampler {
    Fixed(ContextSpec),
    /// Independent uniform draw per parameter over a closed interval
    /// (integers) or half-open interval (floats).
    UniformOver(BTreeMap<String, (f64, f64)>),
    /// `(episode threshold, spec)` stages; thresholds strictly increase
    /// from 0.
    Schedule(Vec<(u64, ContextSpec)>),
}

impl ContextSampler {
    /// Checks the sampler against `game`'s schema. For `UniformOver`, every
    /// corner of the box must validate.
    pub fn validate(&self, game: GameId) -> Result<()> {
        let schema = schema_for(game);
        let check = |spec: &ContextSpec| {
            schema.validate(spec).map_err(|errors| Error::InvalidContext {
                env_index: None,
                errors,
            })
        };
        match self {
            ContextSampler::Fixed(spec) => check(spec),
            ContextSampler::Schedule(stages) => {
                match stages.first() {
                    Some((0, _)) => {}
                    _ => return Err(Error::Config("schedule must start with a stage at episode 0".into())),
                }
                if stages.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return Err(Error::Config("schedule thresholds must strictly increase".into()));
                }
                stages.iter().try_for_each(|(_, s)| check(s))
            }
            ContextSampler::UniformOver(box_) => {
                for (name, (lo, hi)) in box_ {
                    let def = schema
                        .param(name)
                        .ok_or_else(|| Error::Config(format!("{name}: unknown parameter")))?;
                    if !matches!(def.kind, ParamKind::Int | ParamKind::Float) {
                        return Err(Error::Config(format!("{name}: only numeric parameters can be sampled")));
                    }
                    if lo > hi {
                        return Err(Error::Config(format!("{name}: interval [{lo}, {hi}] is inverted")));
                    }
                }
                let names: Vec<&String> = box_.keys().collect();
                let corners = 1usize << names.len().min(12);
                for mask in 0..corners {
                    let spec: ContextSpec = names
                        .iter()
                        .enumerate()
                        .map(|(i, n)| {
                            let (lo, hi) = box_[*n];
                            let v = if mask >> i & 1 == 1 { hi } else { lo };
                            (n.as_str(), corner_value(schema.param(n).unwrap().kind, v))
                        })
                        .collect();
                    check(&spec)?;
                }
                Ok(())
            }
        }
    }

    /// The spec for an env that has completed `episodes_completed` episodes.
    pub fn sample(&self, game: GameId, stream: &mut RngStream, episodes_completed: u64) -> ContextSpec {
        match self {
            ContextSampler::Fixed(spec) => spec.clone(),
            ContextSampler::Schedule(stages) => stages
                .iter()
                .rev()
                .find(|(t, _)| *t <= episodes_completed)
                .map(|(_, s)| s.clone())
                .unwrap_or_default(),
            ContextSampler::UniformOver(box_) => {
                let schema = schema_for(game);
                box_.iter()
                    .map(|(name, &(lo, hi))| {
                        let v = match schema.param(name).map(|d| d.kind) {
                            Some(ParamKind::Int) => SpecValue::Int(stream.uniform_int(lo as i64, hi as i64)),
                            _ => SpecValue::Float(stream.uniform_f64(lo, hi)),
                        };
                        (name.clone(), v)
                    })
                    .collect()
            }
        }
    }
}

fn sample_for(sampler: &ContextSampler, game: GameId, seed: u64, env: usize, completed: u64) -> ContextSpec {
    sampler.sample(
        game,
        &mut RngStream::derive(seed ^ SAMPLER_SALT, env as u64, completed),
        completed,
    )
}

fn corner_value(kind: ParamKind, v: f64) -> SpecValue {
    match kind {
        ParamKind::Int => SpecValue::Int(v as i64),
        _ => SpecValue::Float(v),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub env_index: usize,
    pub episode_index: u64,
    pub termination_cause: TerminationCause,
    pub episode_return: f64,
    pub episode_length: u32,
    pub context: Arc<EpisodeContext>,
}

pub struct CurriculumDriver {
    venv: VecEnv,
    sampler: ContextSampler,
    seed: u64,
    episodes_completed: Vec<u64>,
    steps_driven: u64,
    trace: Vec<TraceRecord>,
}

impl CurriculumDriver {
    /// Builds `num_envs` envs whose first contexts are drawn from `sampler`.
    pub fn new(game: GameId, num_envs: usize, sampler: ContextSampler, seed: u64) -> Result<Self> {
        sampler.validate(game)?;
        let specs: Vec<ContextSpec> = (0..num_envs).map(|i| sample_for(&sampler, game, seed, i, 0)).collect();
        let mut venv = VecEnv::new(game, num_envs, &specs, seed)?;
        for i in 0..num_envs {
            venv.set_context_to(i, &sample_for(&sampler, game, seed, i, 1))?;
        }
        Ok(Self {
            venv,
            sampler,
            seed,
            episodes_completed: vec![0; num_envs],
            steps_driven: 0,
            trace: Vec::new(),
        })
    }

    pub fn venv(&self) -> &VecEnv {
        &self.venv
    }

    pub fn venv_mut(&mut self) -> &mut VecEnv {
        &mut self.venv
    }

    pub fn episodes_completed(&self) -> &[u64] {
        &self.episodes_completed
    }

    pub fn steps_driven(&self) -> u64 {
        self.steps_driven
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    /// Steps all envs `total_steps` times with `policy`.
    ///
    /// Contexts latch until the next reset and `vec_step` resets finished
    /// envs immediately, so the context for an env's episode `k + 1` is
    /// sampled and latched as soon as episode `k` starts. Episode `k` thus
    /// always runs under the sampler's choice for `k` completed episodes.
    pub fn drive<P: FnMut(&Observation) -> Action>(
        &mut self,
        mut policy: P,
        total_steps: u64,
    ) -> Result<&[TraceRecord]> {
        let game = self.venv.game();
        let n = self.venv.num_envs();
        let mut actions = vec![0; n];
        for _ in 0..total_steps {
            let obs = self.venv.observations();
            for (i, a) in actions.iter_mut().enumerate() {
                *a = policy(&obs.observation(i));
            }
            let batch = self.venv.vec_step(&actions)?.clone();
            self.steps_driven += 1;
            for info in batch.infos.iter().filter(|i| i.done()) {
                let i = info.env_index;
                let context = info.finished_context.clone().ok_or(Error::ContextUnavailable)?;
                self.trace.push(TraceRecord {
                    env_index: i,
                    episode_index: context.episode_index,
                    termination_cause: info.termination_cause,
                    episode_return: info.episode_return,
                    episode_length: info.episode_length,
                    context,
                });
                self.episodes_completed[i] += 1;
                let next = self.episodes_completed[i] + 1;
                let spec = sample_for(&self.sampler, game, self.seed, i, next);
                self.venv.set_context_to(i, &spec)?;
            }
        }
        Ok(&self.trace)
    }
}

/// Column names of the trace CSV for `game`.
pub fn trace_header(game: GameId) -> Vec<String> {
    let schema = schema_for(game);
    let mut cols: Vec<String> = [
        "env_index",
        "episode_index",
        "termination_cause",
        "episode_return",
        "episode_length",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    cols.extend(schema.params.iter().map(|p| p.name.to_string()));
    cols.extend(schema.range_pairs().iter().map(|p| p.base.to_string()));
    cols
}

pub fn write_trace_csv<W: Write>(game: GameId, trace: &[TraceRecord], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trace_header(game))?;
    for r in trace {
        let mut row = vec![
            r.env_index.to_string(),
            r.episode_index.to_string(),
            r.termination_cause.as_str().to_string(),
            r.episode_return.to_string(),
            r.episode_length.to_string(),
        ];
        row.extend(r.context.resolved.values.iter().map(|v| v.to_string()));
        row.extend(r.context.realized.iter().map(|v| v.value.to_string()));
        w.write_record(&row)?;
    }
    w.flush()
}
