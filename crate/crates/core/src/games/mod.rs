//! The three context-driven games.
//!
//! Each game supplies a typed view of its context (`*Params`), a level
//! generator, a one-tick dynamics function, and a solvability oracle. The
//! functions here dispatch on [`GameParams`] / [`AgentState`].

pub mod lanes;
pub mod maze;
pub mod ridge;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use crate::context::{EpisodeContext, ParamValue};
use crate::error::{Error, Result};
use crate::rng::RngStream;

pub type Action = u8;

/// Tile id for cells outside the level; shared by every game's alphabet.
pub const OUT_OF_BOUNDS: u8 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GameId {
    Ridge,
    Lanes,
    Maze,
}

impl GameId {
    pub const ALL: [GameId; 3] = [GameId::Ridge, GameId::Lanes, GameId::Maze];

    pub fn as_str(self) -> &'static str {
        match self {
            GameId::Ridge => "ridge",
            GameId::Lanes => "lanes",
            GameId::Maze => "maze",
        }
    }

    pub fn action_names(self) -> &'static [&'static str] {
        match self {
            GameId::Ridge => &["noop", "left", "right", "jump"],
            GameId::Lanes => &["noop", "up", "down", "left", "right"],
            GameId::Maze => &["up", "down", "left", "right"],
        }
    }

    pub fn num_actions(self) -> u8 {
        self.action_names().len() as u8
    }

    pub fn check_action(self, action: Action) -> Result<()> {
        if action < self.num_actions() {
            Ok(())
        } else {
            Err(Error::InvalidAction {
                env_index: None,
                game: self.as_str(),
                action,
                alphabet: self.num_actions(),
            })
        }
    }
}

impl fmt::Display for GameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GameId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ridge" => Ok(GameId::Ridge),
            "lanes" => Ok(GameId::Lanes),
            "maze" => Ok(GameId::Maze),
            other => Err(Error::UnknownGame(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TerminationCause {
    Running,
    Goal,
    Death,
    Timeout,
}

impl TerminationCause {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminationCause::Running => "running",
            TerminationCause::Goal => "goal",
            TerminationCause::Death => "death",
            TerminationCause::Timeout => "timeout",
        }
    }

    pub fn is_done(self) -> bool {
        self != TerminationCause::Running
    }
}

impl fmt::Display for TerminationCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Goal {
    Cell { col: usize, row: usize },
    Row(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoverKind {
    Vehicle,
    Log,
}

/// A row of movers that shifts rigidly along its row, wrapping around.
///
/// Speed is `speed_quarters / 4` tiles per tick. The row has moved
/// `(phase + speed_quarters * t) / 4` whole tiles after `t` ticks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MoverTrack {
    pub row: usize,
    pub direction: i8,
    pub speed_quarters: u32,
    pub phase: u32,
    pub kind: MoverKind,
    /// Occupied cells at zero shift.
    pub pattern: Vec<bool>,
}

impl MoverTrack {
    #[inline]
    pub fn raw_shift(&self, tick: u64) -> u64 {
        (self.phase as u64 + self.speed_quarters as u64 * tick) / 4
    }

    #[inline]
    pub fn occupied(&self, col: usize, tick: u64) -> bool {
        let w = self.pattern.len() as i64;
        let shift = (self.raw_shift(tick) % w as u64) as i64;
        let idx = (col as i64 - self.direction as i64 * shift).rem_euclid(w);
        self.pattern[idx as usize]
    }

    /// Pattern index that sits under `col` at `tick`.
    pub fn pattern_index(&self, col: usize, tick: u64) -> usize {
        let w = self.pattern.len() as i64;
        let shift = (self.raw_shift(tick) % w as u64) as i64;
        (col as i64 - self.direction as i64 * shift).rem_euclid(w) as usize
    }

    /// Signed whole-tile displacement of the row from `tick` to `tick + 1`.
    #[inline]
    pub fn carry(&self, tick: u64) -> i64 {
        self.direction as i64 * (self.raw_shift(tick + 1) - self.raw_shift(tick)) as i64
    }
}

/// A generated level. Row 0 is the top row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelLayout {
    pub width: usize,
    pub height: usize,
    /// Row-major static tiles; movers are overlaid by [`LevelLayout::tile`].
    pub tiles: Vec<u8>,
    pub start: (usize, usize),
    pub goal: Goal,
    pub movers: Vec<MoverTrack>,
    /// Ridge only: surface height (in tiles) of each column, `None` for gaps.
    pub surface: Vec<Option<u8>>,
}

impl LevelLayout {
    #[inline]
    pub fn static_tile(&self, col: usize, row: usize) -> u8 {
        self.tiles[row * self.width + col]
    }

    pub fn mover_for_row(&self, row: usize) -> Option<&MoverTrack> {
        self.movers.iter().find(|m| m.row == row)
    }

    /// Tile at `(col, row)` at `tick`, with movers overlaid; cells outside
    /// the level are [`OUT_OF_BOUNDS`].
    pub fn tile(&self, col: i64, row: i64, tick: u64) -> u8 {
        if col < 0 || row < 0 || col >= self.width as i64 || row >= self.height as i64 {
            return OUT_OF_BOUNDS;
        }
        let (c, r) = (col as usize, row as usize);
        if let Some(m) = self.mover_for_row(r) {
            if m.occupied(c, tick) {
                return match m.kind {
                    MoverKind::Vehicle => lanes::VEHICLE,
                    MoverKind::Log => lanes::LOG,
                };
            }
        }
        self.static_tile(c, r)
    }

    /// Stable 64-bit digest of the layout, for comparing levels.
    pub fn digest(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.hash(&mut h);
        h.finish()
    }
}

/// Typed, per-episode view of a context.
#[derive(Debug, Clone, PartialEq)]
pub enum GameParams {
    Ridge(ridge::RidgeParams),
    Lanes(lanes::LanesParams),
    Maze(maze::MazeParams),
}

impl GameParams {
    /// Builds the typed view from resolved values (schema order) and
    /// realized range values (range-pair order).
    pub fn from_values(game: GameId, resolved: &[ParamValue], realized: &[ParamValue]) -> Self {
        match game {
            GameId::Ridge => GameParams::Ridge(ridge::RidgeParams::from_values(resolved, realized)),
            GameId::Lanes => GameParams::Lanes(lanes::LanesParams::from_values(resolved, realized)),
            GameId::Maze => GameParams::Maze(maze::MazeParams::from_values(resolved, realized)),
        }
    }

    pub fn from_episode(ctx: &EpisodeContext) -> Self {
        let realized: Vec<ParamValue> = ctx.realized.iter().map(|r| r.value).collect();
        Self::from_values(ctx.resolved.game, &ctx.resolved.values, &realized)
    }

    pub fn game(&self) -> GameId {
        match self {
            GameParams::Ridge(_) => GameId::Ridge,
            GameParams::Lanes(_) => GameId::Lanes,
            GameParams::Maze(_) => GameId::Maze,
        }
    }

    pub fn max_episode_steps(&self) -> u32 {
        match self {
            GameParams::Ridge(p) => p.max_steps,
            GameParams::Lanes(p) => p.max_steps,
            GameParams::Maze(p) => p.max_steps,
        }
    }

    pub fn visibility(&self) -> usize {
        match self {
            GameParams::Ridge(p) => p.visibility,
            GameParams::Lanes(p) => p.visibility,
            GameParams::Maze(p) => p.visibility,
        }
    }

    /// `(goal reward, death penalty, step penalty)`.
    pub fn reward_terms(&self) -> (f64, f64, f64) {
        match self {
            GameParams::Ridge(p) => (p.completion_reward, p.death_penalty, p.step_penalty),
            GameParams::Lanes(p) => (p.goal_reward, p.death_penalty, p.step_penalty),
            GameParams::Maze(p) => (p.goal_reward, 0.0, p.step_penalty),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentState {
    Ridge(ridge::Agent),
    Lanes(lanes::Agent),
    Maze(maze::Agent),
}

pub fn generate_level(params: &GameParams, stream: &mut RngStream) -> Result<LevelLayout> {
    let level = match params {
        GameParams::Ridge(p) => ridge::generate(p, stream),
        GameParams::Lanes(p) => lanes::generate(p, stream),
        GameParams::Maze(p) => maze::generate(p, stream),
    };
    level.map_err(|detail| Error::GenerationFailure {
        env_index: None,
        detail,
    })
}

pub fn initial_agent(params: &GameParams, level: &LevelLayout) -> AgentState {
    match params {
        GameParams::Ridge(_) => AgentState::Ridge(ridge::Agent::at_start(level)),
        GameParams::Lanes(_) => AgentState::Lanes(lanes::Agent::at_start(level)),
        GameParams::Maze(_) => AgentState::Maze(maze::Agent::at_start(level)),
    }
}

/// Advances one tick. Returns the new state, the reward for the tick, and
/// whether the tick ended the episode (timeouts are the engine's concern).
pub fn dynamics_step(
    level: &LevelLayout,
    agent: &AgentState,
    params: &GameParams,
    action: Action,
) -> Result<(AgentState, f64, TerminationCause)> {
    params.game().check_action(action)?;
    Ok(match (params, agent) {
        (GameParams::Ridge(p), AgentState::Ridge(a)) => {
            let (a, r, c) = ridge::step(level, p, a, action);
            (AgentState::Ridge(a), r, c)
        }
        (GameParams::Lanes(p), AgentState::Lanes(a)) => {
            let (a, r, c) = lanes::step(level, p, a, action);
            (AgentState::Lanes(a), r, c)
        }
        (GameParams::Maze(p), AgentState::Maze(a)) => {
            let (a, r, c) = maze::step(level, p, a, action);
            (AgentState::Maze(a), r, c)
        }
        _ => panic!("agent state does not match game parameters"),
    })
}

/// Whether the level can be completed within the episode's step budget.
pub fn solvable(level: &LevelLayout, params: &GameParams) -> bool {
    match params {
        GameParams::Ridge(p) => ridge::solvable(level, p),
        GameParams::Lanes(p) => lanes::solvable(level, p),
        GameParams::Maze(p) => maze::solvable(level, p),
    }
}

/// The structural quantity each game's range pairs control, read back from
/// the layout: section count, `(road rows, water rows)`, or maze side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    Sections(usize),
    Lanes { road: usize, water: usize },
    MazeDim(usize),
}

pub fn structure(game: GameId, level: &LevelLayout) -> Structure {
    match game {
        GameId::Ridge => Structure::Sections(ridge::count_sections(level)),
        GameId::Lanes => Structure::Lanes {
            road: level.movers.iter().filter(|m| m.kind == MoverKind::Vehicle).count(),
            water: level.movers.iter().filter(|m| m.kind == MoverKind::Log).count(),
        },
        GameId::Maze => Structure::MazeDim(level.width - 2),
    }
}

/// Grid cell the observation window is centered on.
pub fn agent_cell(level: &LevelLayout, agent: &AgentState) -> (i64, i64) {
    match agent {
        AgentState::Ridge(a) => a.cell(level),
        AgentState::Lanes(a) => (a.col as i64, a.row as i64),
        AgentState::Maze(a) => (a.col as i64, a.row as i64),
    }
}

/// Current tick for mover overlays.
pub fn agent_tick(agent: &AgentState) -> u64 {
    match agent {
        AgentState::Lanes(a) => a.tick,
        _ => 0,
    }
}

/// Game-specific status values; the engine appends the remaining-steps
/// fraction.
pub fn status(level: &LevelLayout, agent: &AgentState, params: &GameParams, out: &mut Vec<f32>) {
    match (agent, params) {
        (AgentState::Ridge(a), _) => {
            out.push(a.grounded(level) as u8 as f32);
            out.push(a.vx as f32 / ridge::SUB as f32);
            out.push(a.vy as f32 / ridge::SUB as f32);
        }
        (AgentState::Lanes(a), _) => {
            let on_log = level
                .mover_for_row(a.row)
                .is_some_and(|m| m.kind == MoverKind::Log && m.occupied(a.col, a.tick));
            out.push(on_log as u8 as f32);
            out.push((level.height - 1 - a.row) as f32 / (level.height - 1) as f32);
        }
        (AgentState::Maze(a), GameParams::Maze(p)) => {
            out.push((a.tick % p.move_period as u64 == 0) as u8 as f32);
        }
        _ => {}
    }
}
