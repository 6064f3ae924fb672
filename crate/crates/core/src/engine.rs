//! Single environments.
//!
//! An [`Env`] owns a resolved context and plays episodes of one game. Each
//! reset derives a fresh [`RngStream`] from `(master_seed, env_index,
//! episode_index)`, realizes the episode context from it, and generates the
//! level from the same stream. In [`EngineMode::StaticBaseline`] the same
//! draws are made but no [`EpisodeContext`] is built or kept; it exists to
//! measure what context tracking costs.

use std::sync::Arc;

use crate::context::{realize, realize_values, schema_for, ContextSpec, EpisodeContext, ResolvedContext};
use crate::error::{Error, Result};
use crate::games::{self, Action, AgentState, GameId, GameParams, LevelLayout, TerminationCause};
use crate::render;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EngineMode {
    Contextual,
    StaticBaseline,
}

/// A windowed view centered on the agent plus a short status vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    /// Row-major `side * side` tile ids; 0 marks cells outside the level.
    pub tiles: Vec<u8>,
    pub side: usize,
    pub status: Vec<f32>,
}

impl Observation {
    pub fn tile(&self, col: usize, row: usize) -> u8 {
        self.tiles[row * self.side + col]
    }

    pub fn center(&self) -> u8 {
        self.tile(self.side / 2, self.side / 2)
    }
}

/// Length of the status vector for a game.
///
/// * ridge: grounded flag, `vx` and `vy` in tiles per tick, remaining-steps fraction
/// * lanes: on-log flag, progress toward the goal row, remaining-steps fraction
/// * maze: can-move-this-tick flag, remaining-steps fraction
pub fn status_len(game: GameId) -> usize {
    match game {
        GameId::Ridge => 4,
        GameId::Lanes => 3,
        GameId::Maze => 2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub reward: f64,
    pub done: bool,
    pub cause: TerminationCause,
    pub episode_return: f64,
    pub episode_length: u32,
}

#[derive(Debug, Clone)]
struct Episode {
    index: u64,
    ctx: Option<Arc<EpisodeContext>>,
    params: GameParams,
    level: LevelLayout,
    agent: AgentState,
    steps: u32,
    ret: f64,
    cause: TerminationCause,
}

#[derive(Debug, Clone)]
pub struct Env {
    game: GameId,
    mode: EngineMode,
    resolved: ResolvedContext,
    env_index: usize,
    master_seed: u64,
    episodes_started: u64,
    episode: Option<Episode>,
    obs_tiles: Vec<u8>,
    obs_status: Vec<f32>,
}

impl Env {
    /// Validates `spec` and builds a contextual env. No episode is active
    /// until [`Env::reset`].
    pub fn new(game: GameId, spec: &ContextSpec, master_seed: u64, env_index: usize) -> Result<Self> {
        let resolved = schema_for(game).resolve(spec).map_err(|errors| Error::InvalidContext {
            env_index: Some(env_index),
            errors,
        })?;
        Ok(Self::from_resolved(
            resolved,
            master_seed,
            env_index,
            EngineMode::Contextual,
        ))
    }

    pub fn from_resolved(resolved: ResolvedContext, master_seed: u64, env_index: usize, mode: EngineMode) -> Self {
        Self {
            game: resolved.game,
            mode,
            resolved,
            env_index,
            master_seed,
            episodes_started: 0,
            episode: None,
            obs_tiles: Vec::new(),
            obs_status: Vec::new(),
        }
    }

    pub fn game(&self) -> GameId {
        self.game
    }

    pub fn mode(&self) -> EngineMode {
        self.mode
    }

    pub fn env_index(&self) -> usize {
        self.env_index
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn resolved(&self) -> &ResolvedContext {
        &self.resolved
    }

    /// Replaces the resolved context; takes effect at the next reset.
    pub fn set_resolved(&mut self, resolved: ResolvedContext) {
        assert_eq!(resolved.game, self.game, "context for another game");
        self.resolved = resolved;
    }

    /// Episodes started so far; the next reset plays episode index
    /// `episodes_started()`.
    pub fn episodes_started(&self) -> u64 {
        self.episodes_started
    }

    pub fn reset(&mut self) -> Result<()> {
        let index = self.episodes_started;
        let mut stream = RngStream::derive(self.master_seed, self.env_index as u64, index);
        let schema = schema_for(self.game);
        let (ctx, params) = match self.mode {
            EngineMode::Contextual => {
                let ctx = realize(schema, &self.resolved, &mut stream, index);
                let params = GameParams::from_episode(&ctx);
                (Some(Arc::new(ctx)), params)
            }
            EngineMode::StaticBaseline => {
                let realized = realize_values(schema, &self.resolved.values, &mut stream);
                (
                    None,
                    GameParams::from_values(self.game, &self.resolved.values, &realized),
                )
            }
        };
        let level = games::generate_level(&params, &mut stream).map_err(|e| e.at_env(self.env_index))?;
        let agent = games::initial_agent(&params, &level);
        self.episodes_started += 1;
        self.episode = Some(Episode {
            index,
            ctx,
            params,
            level,
            agent,
            steps: 0,
            ret: 0.0,
            cause: TerminationCause::Running,
        });
        self.refresh_observation();
        Ok(())
    }

    pub fn step(&mut self, action: Action) -> Result<StepResult> {
        let ep = self.episode.as_mut().ok_or(Error::NoActiveEpisode)?;
        if ep.cause.is_done() {
            return Err(Error::SteppedAfterDone);
        }
        let (agent, reward, mut cause) =
            games::dynamics_step(&ep.level, &ep.agent, &ep.params, action).map_err(|e| e.at_env(self.env_index))?;
        ep.agent = agent;
        ep.steps += 1;
        ep.ret += reward;
        if cause == TerminationCause::Running && ep.steps >= ep.params.max_episode_steps() {
            cause = TerminationCause::Timeout;
        }
        ep.cause = cause;
        let result = StepResult {
            reward,
            done: cause.is_done(),
            cause,
            episode_return: ep.ret,
            episode_length: ep.steps,
        };
        self.refresh_observation();
        Ok(result)
    }

    fn episode(&self) -> Result<&Episode> {
        self.episode.as_ref().ok_or(Error::NoActiveEpisode)
    }

    /// The current episode's context; a cheap reference-counted handle.
    pub fn context(&self) -> Result<Arc<EpisodeContext>> {
        self.episode()?.ctx.clone().ok_or(Error::ContextUnavailable)
    }

    pub fn context_opt(&self) -> Option<Arc<EpisodeContext>> {
        self.episode.as_ref().and_then(|e| e.ctx.clone())
    }

    pub fn episode_index(&self) -> Result<u64> {
        Ok(self.episode()?.index)
    }

    pub fn params(&self) -> Result<&GameParams> {
        Ok(&self.episode()?.params)
    }

    pub fn level(&self) -> Result<&LevelLayout> {
        Ok(&self.episode()?.level)
    }

    pub fn agent(&self) -> Result<&AgentState> {
        Ok(&self.episode()?.agent)
    }

    pub fn episode_return(&self) -> f64 {
        self.episode.as_ref().map_or(0.0, |e| e.ret)
    }

    pub fn episode_length(&self) -> u32 {
        self.episode.as_ref().map_or(0, |e| e.steps)
    }

    pub fn termination(&self) -> TerminationCause {
        self.episode.as_ref().map_or(TerminationCause::Running, |e| e.cause)
    }

    pub fn visibility(&self) -> Result<usize> {
        Ok(self.episode()?.params.visibility())
    }

    /// Side of the current observation window.
    pub fn obs_side(&self) -> usize {
        self.episode.as_ref().map_or(0, |e| 2 * e.params.visibility() + 1)
    }

    pub fn obs_tiles(&self) -> &[u8] {
        &self.obs_tiles
    }

    pub fn obs_status(&self) -> &[f32] {
        &self.obs_status
    }

    pub fn observation(&self) -> Result<Observation> {
        self.episode()?;
        Ok(Observation {
            tiles: self.obs_tiles.clone(),
            side: self.obs_side(),
            status: self.obs_status.clone(),
        })
    }

    fn refresh_observation(&mut self) {
        let ep = self.episode.as_ref().expect("active episode");
        let v = ep.params.visibility() as i64;
        let side = (2 * v + 1) as usize;
        let (cx, cy) = games::agent_cell(&ep.level, &ep.agent);
        let tick = games::agent_tick(&ep.agent);
        self.obs_tiles.resize(side * side, 0);
        for dy in 0..side {
            let row = cy - v + dy as i64;
            for dx in 0..side {
                self.obs_tiles[dy * side + dx] = ep.level.tile(cx - v + dx as i64, row, tick);
            }
        }
        self.obs_status.clear();
        games::status(&ep.level, &ep.agent, &ep.params, &mut self.obs_status);
        let max = ep.params.max_episode_steps();
        self.obs_status.push((max - ep.steps.min(max)) as f32 / max as f32);
    }

    /// Full-level text rendering; see [`render::ascii`] for the legends.
    pub fn render_ascii(&self) -> Result<String> {
        let ep = self.episode()?;
        Ok(render::ascii(self.game, &ep.level, &ep.agent))
    }

    /// Full-level binary PPM (P6), `scale` pixels per tile.
    pub fn render_ppm(&self, scale: usize) -> Result<Vec<u8>> {
        let ep = self.episode()?;
        Ok(render::ppm(self.game, &ep.level, &ep.agent, scale))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{maze, ridge, Structure};

    fn env(game: GameId, spec: ContextSpec, seed: u64) -> Env {
        let mut e = Env::new(game, &spec, seed, 0).unwrap();
        e.reset().unwrap();
        e
    }

    #[test]
    fn observation_is_windowed_on_the_agent() {
        let e = env(GameId::Ridge, ContextSpec::new().with("visibility", 6), 3);
        let obs = e.observation().unwrap();
        assert_eq!(obs.side, 13);
        assert_eq!(obs.tiles.len(), 169);
        assert_eq!(obs.status.len(), status_len(GameId::Ridge));
        // The agent starts in column 0, so the left half is outside the level.
        assert_eq!(obs.tile(0, 6), games::OUT_OF_BOUNDS);
        assert_eq!(obs.center(), ridge::AIR);
        assert_eq!(obs.tile(6, 7), ridge::GROUND);
    }

    #[test]
    fn maze_center_is_the_start_tile() {
        for seed in 0..10 {
            let e = env(GameId::Maze, ContextSpec::new(), seed);
            assert_eq!(e.observation().unwrap().center(), maze::START);
        }
    }

    #[test]
    fn step_before_reset_and_after_done() {
        let mut e = Env::new(GameId::Maze, &ContextSpec::new(), 0, 0).unwrap();
        assert_eq!(e.step(0), Err(Error::NoActiveEpisode));
        let mut e = env(GameId::Maze, ContextSpec::new().with("max_episode_steps", 225), 0);
        let mut last = None;
        for _ in 0..225 {
            last = Some(e.step(maze::UP).unwrap());
        }
        let last = last.unwrap();
        assert!(last.done);
        assert_eq!(last.cause, TerminationCause::Timeout);
        assert_eq!(last.episode_length, 225);
        assert_eq!(e.step(maze::UP), Err(Error::SteppedAfterDone));
        assert!(matches!(e.step(9), Err(Error::SteppedAfterDone)));
        e.reset().unwrap();
        assert!(matches!(e.step(9), Err(Error::InvalidAction { action: 9, .. })));
    }

    #[test]
    fn maze_goal_step_rewards() {
        let spec = ContextSpec::new()
            .with("maze_dim_min", 5)
            .with("maze_dim_max", 5)
            .with("wall_removal_prob", 1.0);
        let mut e = env(GameId::Maze, spec, 0);
        let mut r = None;
        for a in [maze::RIGHT; 4].into_iter().chain([maze::DOWN; 4]) {
            r = Some(e.step(a).unwrap());
        }
        let r = r.unwrap();
        assert!(r.done);
        assert_eq!(r.cause, TerminationCause::Goal);
        assert!((r.reward - (10.0 - 0.01)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_range_realizes_and_builds() {
        let spec = ContextSpec::new()
            .with("min_num_sections", 3)
            .with("max_num_sections", 3);
        let e = env(GameId::Ridge, spec, 11);
        let ctx = e.context().unwrap();
        assert_eq!(ctx.realized("num_sections").unwrap().as_i64(), 3);
        assert_eq!(
            games::structure(GameId::Ridge, e.level().unwrap()),
            Structure::Sections(3)
        );
    }

    #[test]
    fn resets_produce_different_levels() {
        for game in GameId::ALL {
            let spec = match game {
                GameId::Ridge => ContextSpec::new().with("min_num_sections", 3),
                _ => ContextSpec::new(),
            };
            let mut e = Env::new(game, &spec, 5, 0).unwrap();
            let mut digests = std::collections::HashSet::new();
            for _ in 0..100 {
                e.reset().unwrap();
                digests.insert(e.level().unwrap().digest());
            }
            assert!(digests.len() >= 95, "{game}: {}", digests.len());
        }
    }

    #[test]
    fn static_baseline_plays_the_same_levels() {
        for game in GameId::ALL {
            let resolved = schema_for(game).defaults();
            let mut a = Env::from_resolved(resolved.clone(), 9, 2, EngineMode::Contextual);
            let mut b = Env::from_resolved(resolved, 9, 2, EngineMode::StaticBaseline);
            let mut s = RngStream::derive(1, 1, 1);
            for _ in 0..3 {
                a.reset().unwrap();
                b.reset().unwrap();
                assert_eq!(a.level().unwrap(), b.level().unwrap());
                for _ in 0..100 {
                    let act = s.index(game.num_actions() as usize) as u8;
                    let (ra, rb) = (a.step(act).unwrap(), b.step(act).unwrap());
                    assert_eq!(ra, rb);
                    assert_eq!(a.obs_tiles(), b.obs_tiles());
                    if ra.done {
                        break;
                    }
                }
            }
            assert_eq!(b.context(), Err(Error::ContextUnavailable));
        }
    }

    #[test]
    fn renders_are_stable() {
        let spec = ContextSpec::new().with("maze_dim_min", 9).with("maze_dim_max", 9);
        let e = env(GameId::Maze, spec, 0);
        let ppm = e.render_ppm(8).unwrap();
        assert!(ppm.starts_with(b"P6\n88 88\n255\n"));
        assert_eq!(ppm.len(), "P6\n88 88\n255\n".len() + 88 * 88 * 3);
        assert_eq!(e.render_ascii().unwrap(), e.render_ascii().unwrap());
    }
}
