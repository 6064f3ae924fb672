//! Lanes: a crossing game. The agent starts on the bottom grass row and must
//! reach the top row, crossing road rows (avoid vehicles) and water rows
//! (stay on logs, which carry the agent).
//!
//! Layout, top to bottom: goal row, water rows, a grass median, road rows,
//! the start row. Each road and water row holds one [`MoverTrack`]; speeds
//! are quantized to quarter tiles per tick, so every row's motion repeats
//! after `4 * width` ticks.
//!
//! One tick: the agent moves (moves off the grid are no-ops), dies on a
//! vehicle or on open water, is carried by its log, then dies if a vehicle
//! moves onto it. Entering the goal row wins immediately.
//!
//! The generator first fixes a route (a start column and wait for the road
//! band, a median column and wait for the water band), keeps the route's
//! road cells free, and places a log under every water cell the route
//! uses. Water rows alternate direction so a route always fits.

use std::collections::HashSet;

use crate::context::{ContextSchema, ParamValue, ValidationError};
use crate::rng::RngStream;

use super::{Goal, LevelLayout, MoverKind, MoverTrack, TerminationCause};

pub const GRASS: u8 = 1;
pub const ROAD: u8 = 2;
pub const WATER: u8 = 3;
pub const VEHICLE: u8 = 4;
pub const LOG: u8 = 5;
pub const GOAL: u8 = 6;

pub const NOOP: u8 = 0;
pub const UP: u8 = 1;
pub const DOWN: u8 = 2;
pub const LEFT: u8 = 3;
pub const RIGHT: u8 = 4;

const MAX_EPISODE_STEPS: usize = 0;
const VISIBILITY: usize = 1;
const GOAL_REWARD: usize = 2;
const STEP_PENALTY: usize = 3;
const DEATH_PENALTY: usize = 4;
const CAN_MOVE_DOWN: usize = 5;
const MAX_ROAD: usize = 7;
const MAX_WATER: usize = 9;
const GRID_WIDTH: usize = 10;
const DENSITY: usize = 11;
const LOG_SPEED: usize = 14;
const LOG_LENGTH: usize = 15;
const LOGS_PER_ROW: usize = 16;

const ROUTE_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct LanesParams {
    pub max_steps: u32,
    pub visibility: usize,
    pub goal_reward: f64,
    pub step_penalty: f64,
    pub death_penalty: f64,
    pub can_move_down: bool,
    pub road_lanes: usize,
    pub water_lanes: usize,
    pub width: usize,
    pub vehicle_density: f64,
    pub vehicle_speed: f64,
    pub log_speed: f64,
    pub log_length: usize,
    pub logs_per_row: usize,
}

impl LanesParams {
    pub fn from_values(v: &[ParamValue], realized: &[ParamValue]) -> Self {
        Self {
            max_steps: v[MAX_EPISODE_STEPS].as_i64() as u32,
            visibility: v[VISIBILITY].as_i64() as usize,
            goal_reward: v[GOAL_REWARD].as_f64(),
            step_penalty: v[STEP_PENALTY].as_f64(),
            death_penalty: v[DEATH_PENALTY].as_f64(),
            can_move_down: v[CAN_MOVE_DOWN].as_bool(),
            road_lanes: realized[0].as_i64() as usize,
            water_lanes: realized[1].as_i64() as usize,
            width: v[GRID_WIDTH].as_i64() as usize,
            vehicle_density: v[DENSITY].as_f64(),
            vehicle_speed: realized[2].as_f64(),
            log_speed: v[LOG_SPEED].as_f64(),
            log_length: v[LOG_LENGTH].as_i64() as usize,
            logs_per_row: v[LOGS_PER_ROW].as_i64() as usize,
        }
    }

    pub fn height(&self) -> usize {
        self.road_lanes + self.water_lanes + 3
    }
}

/// Speed in quarter tiles per tick, at least one quarter and at most two
/// tiles.
pub fn quarters(speed: f64) -> u32 {
    ((speed * 4.0).round() as i64).clamp(1, 8) as u32
}

/// Longest generated route, in ticks: up to two widths of walking and
/// waiting before each band, plus one tick per row.
fn route_budget(width: i64, road: i64, water: i64) -> i64 {
    4 * width + road + water
}

pub fn cross_check(schema: &ContextSchema, v: &[ParamValue]) -> Vec<ValidationError> {
    let need = route_budget(v[GRID_WIDTH].as_i64(), v[MAX_ROAD].as_i64(), v[MAX_WATER].as_i64());
    if need > v[MAX_EPISODE_STEPS].as_i64() {
        vec![ValidationError::Infeasible {
            name: schema.params[MAX_EPISODE_STEPS].name.to_string(),
            reason: format!("crossing this grid may need up to {need} ticks"),
        }]
    } else {
        Vec::new()
    }
}

fn road_row(height: usize, k: usize) -> usize {
    height - 1 - k
}

fn water_row(water: usize, j: usize) -> usize {
    water + 1 - j
}

/// Water route from column `x` entering the band at tick `t`: pattern cells
/// that must hold a log, or `None` if the carry pushes the agent off the grid.
fn water_route(tracks: &[MoverTrack], mut x: i64, t: u64, width: i64) -> Option<Vec<usize>> {
    let mut cells = Vec::with_capacity(tracks.len());
    for (j, m) in tracks.iter().enumerate() {
        let tick = t + j as u64;
        cells.push(m.pattern_index(x as usize, tick));
        x += m.carry(tick);
        if !(0..width).contains(&x) {
            return None;
        }
    }
    Some(cells)
}

pub fn generate(p: &LanesParams, stream: &mut RngStream) -> Result<LevelLayout, String> {
    let w = p.width;
    let h = p.height();
    let period = 4 * w as u32;
    let xs = w / 2;

    let mut roads: Vec<MoverTrack> = (1..=p.road_lanes)
        .map(|k| MoverTrack {
            row: road_row(h, k),
            direction: if stream.chance(0.5) { 1 } else { -1 },
            speed_quarters: quarters(p.vehicle_speed),
            phase: stream.index(period as usize) as u32,
            kind: MoverKind::Vehicle,
            pattern: vec![false; w],
        })
        .collect();
    let first_dir: i8 = if stream.chance(0.5) { 1 } else { -1 };
    let mut waters: Vec<MoverTrack> = (1..=p.water_lanes)
        .map(|j| MoverTrack {
            row: water_row(p.water_lanes, j),
            direction: if j % 2 == 1 { first_dir } else { -first_dir },
            speed_quarters: quarters(p.log_speed),
            phase: stream.index(period as usize) as u32,
            kind: MoverKind::Log,
            pattern: vec![false; w],
        })
        .collect();

    // Road band: any column and wait works, since only free cells are needed.
    let xr = stream.index(w);
    let t0 = xr.abs_diff(xs) as u64 + stream.index(w) as u64;
    let mut keep_free: Vec<HashSet<usize>> = vec![HashSet::new(); roads.len()];
    for (k, m) in roads.iter().enumerate() {
        let t = t0 + k as u64;
        keep_free[k].insert(m.pattern_index(xr, t));
        keep_free[k].insert(m.pattern_index(xr, t + 1));
    }

    // Water band: random attempts, then a scan that always succeeds because
    // alternating rows keep the total drift within the grid.
    let t_median = t0 + p.road_lanes as u64 + 1;
    let mut route = None;
    for _ in 0..ROUTE_ATTEMPTS {
        let xw = stream.index(w);
        let t1 = t_median + xw.abs_diff(xr) as u64 + stream.index(w) as u64;
        route = water_route(&waters, xw as i64, t1, w as i64);
        if route.is_some() {
            break;
        }
    }
    if route.is_none() {
        let t1 = t_median + w as u64 - 1;
        route = (0..w).find_map(|xw| water_route(&waters, xw as i64, t1, w as i64));
    }
    let log_cells = route.ok_or_else(|| "no route across the water rows".to_string())?;

    let vehicles = ((p.vehicle_density * w as f64).round() as usize).min(w - 2);
    for (m, free) in roads.iter_mut().zip(&keep_free) {
        let mut open: Vec<usize> = (0..w).filter(|i| !free.contains(i)).collect();
        stream.shuffle(&mut open);
        for &i in open.iter().take(vehicles) {
            m.pattern[i] = true;
        }
    }
    for (m, &cell) in waters.iter_mut().zip(&log_cells) {
        let len = p.log_length.min(w);
        for n in 0..p.logs_per_row {
            let start = if n == 0 {
                cell + w - stream.index(len)
            } else {
                stream.index(w)
            };
            for d in 0..len {
                m.pattern[(start + d) % w] = true;
            }
        }
    }

    let mut tiles = vec![GRASS; w * h];
    tiles[..w].fill(GOAL);
    for m in roads.iter() {
        tiles[m.row * w..(m.row + 1) * w].fill(ROAD);
    }
    for m in waters.iter() {
        tiles[m.row * w..(m.row + 1) * w].fill(WATER);
    }
    let mut movers = waters;
    movers.append(&mut roads);
    Ok(LevelLayout {
        width: w,
        height: h,
        tiles,
        start: (xs, h - 1),
        goal: Goal::Row(0),
        movers,
        surface: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Agent {
    pub col: usize,
    pub row: usize,
    pub tick: u64,
}

impl Agent {
    pub fn at_start(level: &LevelLayout) -> Self {
        Self {
            col: level.start.0,
            row: level.start.1,
            tick: 0,
        }
    }
}

pub fn step(level: &LevelLayout, p: &LanesParams, agent: &Agent, action: u8) -> (Agent, f64, TerminationCause) {
    let t = agent.tick;
    let (mut c, mut r) = (agent.col as i64, agent.row as i64);
    match action {
        UP => r -= 1,
        DOWN if p.can_move_down => r += 1,
        LEFT => c -= 1,
        RIGHT => c += 1,
        _ => {}
    }
    if c < 0 || r < 0 || c >= level.width as i64 || r >= level.height as i64 {
        (c, r) = (agent.col as i64, agent.row as i64);
    }
    let mut cause = TerminationCause::Running;
    if r == 0 {
        cause = TerminationCause::Goal;
    } else if let Some(m) = level.mover_for_row(r as usize) {
        let hit = m.occupied(c as usize, t);
        match m.kind {
            MoverKind::Vehicle if hit => cause = TerminationCause::Death,
            MoverKind::Log if !hit => cause = TerminationCause::Death,
            MoverKind::Log => {
                c += m.carry(t);
                if c < 0 || c >= level.width as i64 {
                    c = c.clamp(0, level.width as i64 - 1);
                    cause = TerminationCause::Death;
                }
            }
            MoverKind::Vehicle => {
                if m.occupied(c as usize, t + 1) {
                    cause = TerminationCause::Death;
                }
            }
        }
    }
    let reward = p.step_penalty
        + match cause {
            TerminationCause::Goal => p.goal_reward,
            TerminationCause::Death => p.death_penalty,
            _ => 0.0,
        };
    let next = Agent {
        col: c as usize,
        row: r as usize,
        tick: t + 1,
    };
    (next, reward, cause)
}

/// Breadth-first search over (cell, tick mod period): can the goal row be
/// reached within the step budget?
pub fn solvable(level: &LevelLayout, p: &LanesParams) -> bool {
    let period = 4 * level.width as u64;
    let idx = |a: &Agent| ((a.row * level.width + a.col) as u64 * period + a.tick % period) as usize;
    let mut seen = vec![false; level.width * level.height * period as usize];
    let start = Agent::at_start(level);
    seen[idx(&start)] = true;
    let mut frontier = vec![start];
    for _ in 0..p.max_steps {
        let mut next = Vec::new();
        for a in &frontier {
            for action in 0..5 {
                let (b, _, cause) = step(level, p, a, action);
                match cause {
                    TerminationCause::Goal => return true,
                    TerminationCause::Running => {
                        let i = idx(&b);
                        if !seen[i] {
                            seen[i] = true;
                            next.push(b);
                        }
                    }
                    _ => {}
                }
            }
        }
        if next.is_empty() {
            return false;
        }
        frontier = next;
    }
    false
}
