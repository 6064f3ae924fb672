//! Maze: find the goal in a grid maze.
//!
//! `maze_dim` is the odd interior side; the layout adds a one-tile wall
//! border. Cells sit at odd coordinates. A recursive backtracker carves a
//! perfect maze from the top-left cell, then each interior wall tile is
//! removed independently with probability `wall_removal_prob`. The agent
//! moves one tile on ticks divisible by `move_period`.

use std::collections::VecDeque;

use crate::context::{ContextSchema, ParamValue, ValidationError};
use crate::rng::RngStream;

use super::{Goal, LevelLayout, TerminationCause};

pub const FLOOR: u8 = 1;
pub const WALL: u8 = 2;
pub const START: u8 = 3;
pub const GOAL: u8 = 4;

pub const UP: u8 = 0;
pub const DOWN: u8 = 1;
pub const LEFT: u8 = 2;
pub const RIGHT: u8 = 3;

const MAX_EPISODE_STEPS: usize = 0;
const VISIBILITY: usize = 1;
const GOAL_REWARD: usize = 2;
const STEP_PENALTY: usize = 3;
const MOVE_PERIOD: usize = 4;
const DIM_MAX: usize = 6;
const WALL_REMOVAL: usize = 7;
const GOAL_PLACEMENT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoalPlacement {
    FarCorner,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MazeParams {
    pub max_steps: u32,
    pub visibility: usize,
    pub goal_reward: f64,
    pub step_penalty: f64,
    pub move_period: u32,
    pub dim: usize,
    pub wall_removal_prob: f64,
    pub goal_placement: GoalPlacement,
}

impl MazeParams {
    pub fn from_values(v: &[ParamValue], realized: &[ParamValue]) -> Self {
        Self {
            max_steps: v[MAX_EPISODE_STEPS].as_i64() as u32,
            visibility: v[VISIBILITY].as_i64() as usize,
            goal_reward: v[GOAL_REWARD].as_f64(),
            step_penalty: v[STEP_PENALTY].as_f64(),
            move_period: v[MOVE_PERIOD].as_i64() as u32,
            dim: realized[0].as_i64() as usize,
            wall_removal_prob: v[WALL_REMOVAL].as_f64(),
            goal_placement: match v[GOAL_PLACEMENT].as_enum() {
                "random" => GoalPlacement::Random,
                _ => GoalPlacement::FarCorner,
            },
        }
    }
}

/// Every open tile reachable within `dim^2` moves, at one move per period.
pub fn cross_check(schema: &ContextSchema, v: &[ParamValue]) -> Vec<ValidationError> {
    let dim = v[DIM_MAX].as_i64();
    let need = v[MOVE_PERIOD].as_i64() * dim * dim;
    if need > v[MAX_EPISODE_STEPS].as_i64() {
        vec![ValidationError::Infeasible {
            name: schema.params[MAX_EPISODE_STEPS].name.to_string(),
            reason: format!("a {dim}x{dim} maze may need up to {need} ticks"),
        }]
    } else {
        Vec::new()
    }
}

pub fn generate(p: &MazeParams, stream: &mut RngStream) -> Result<LevelLayout, String> {
    let dim = p.dim;
    let size = dim + 2;
    let cells = dim.div_ceil(2);
    let mut tiles = vec![WALL; size * size];
    let at = |cx: usize, cy: usize| (2 * cy + 1) * size + 2 * cx + 1;

    let mut visited = vec![false; cells * cells];
    let mut stack = vec![(0usize, 0usize)];
    visited[0] = true;
    tiles[at(0, 0)] = FLOOR;
    let mut options = Vec::with_capacity(4);
    while let Some(&(cx, cy)) = stack.last() {
        options.clear();
        if cy > 0 && !visited[(cy - 1) * cells + cx] {
            options.push((cx, cy - 1));
        }
        if cy + 1 < cells && !visited[(cy + 1) * cells + cx] {
            options.push((cx, cy + 1));
        }
        if cx > 0 && !visited[cy * cells + cx - 1] {
            options.push((cx - 1, cy));
        }
        if cx + 1 < cells && !visited[cy * cells + cx + 1] {
            options.push((cx + 1, cy));
        }
        if options.is_empty() {
            stack.pop();
            continue;
        }
        let (nx, ny) = options[stream.index(options.len())];
        visited[ny * cells + nx] = true;
        tiles[at(nx, ny)] = FLOOR;
        tiles[(at(cx, cy) + at(nx, ny)) / 2] = FLOOR;
        stack.push((nx, ny));
    }

    if p.wall_removal_prob > 0.0 {
        for row in 1..=dim {
            for col in 1..=dim {
                let i = row * size + col;
                if tiles[i] == WALL && stream.chance(p.wall_removal_prob) {
                    tiles[i] = FLOOR;
                }
            }
        }
    }

    let start = (1, 1);
    let goal = match p.goal_placement {
        GoalPlacement::FarCorner => (dim, dim),
        GoalPlacement::Random => {
            let k = 1 + stream.index(cells * cells - 1);
            (2 * (k % cells) + 1, 2 * (k / cells) + 1)
        }
    };
    tiles[start.1 * size + start.0] = START;
    tiles[goal.1 * size + goal.0] = GOAL;
    Ok(LevelLayout {
        width: size,
        height: size,
        tiles,
        start,
        goal: Goal::Cell {
            col: goal.0,
            row: goal.1,
        },
        movers: Vec::new(),
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

fn open(level: &LevelLayout, col: usize, row: usize) -> bool {
    level.static_tile(col, row) != WALL
}

pub fn step(level: &LevelLayout, p: &MazeParams, agent: &Agent, action: u8) -> (Agent, f64, TerminationCause) {
    let mut a = *agent;
    if a.tick.is_multiple_of(p.move_period as u64) {
        let (c, r) = match action {
            UP => (a.col, a.row - 1),
            DOWN => (a.col, a.row + 1),
            LEFT => (a.col - 1, a.row),
            _ => (a.col + 1, a.row),
        };
        // The border is solid, so neighbours of an open tile are in bounds.
        if open(level, c, r) {
            (a.col, a.row) = (c, r);
        }
    }
    a.tick += 1;
    if matches!(level.goal, Goal::Cell { col, row } if (col, row) == (a.col, a.row)) {
        (a, p.step_penalty + p.goal_reward, TerminationCause::Goal)
    } else {
        (a, p.step_penalty, TerminationCause::Running)
    }
}

/// Moves on the shortest open path from start to goal, if any.
pub fn shortest_path(level: &LevelLayout) -> Option<usize> {
    let Goal::Cell { col: gc, row: gr } = level.goal else {
        return None;
    };
    let w = level.width;
    let mut dist = vec![usize::MAX; w * level.height];
    let start = level.start.1 * w + level.start.0;
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        if i == gr * w + gc {
            return Some(dist[i]);
        }
        let (c, r) = (i % w, i / w);
        for (nc, nr) in [(c, r - 1), (c, r + 1), (c - 1, r), (c + 1, r)] {
            let j = nr * w + nc;
            if open(level, nc, nr) && dist[j] == usize::MAX {
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
        }
    }
    None
}

/// Flood fill from the start; the goal must be reachable in time, given
/// that the first move happens on tick 0 and later ones every period.
pub fn solvable(level: &LevelLayout, p: &MazeParams) -> bool {
    match shortest_path(level) {
        Some(0) => true,
        Some(d) => ((d - 1) * p.move_period as usize + 1) as u64 <= p.max_steps as u64,
        None => false,
    }
}

/// Open tiles and the adjacencies between them, over the interior.
pub fn open_graph(level: &LevelLayout) -> (usize, usize) {
    let w = level.width;
    let (mut nodes, mut edges) = (0, 0);
    for r in 1..level.height - 1 {
        for c in 1..w - 1 {
            if open(level, c, r) {
                nodes += 1;
                edges += open(level, c + 1, r) as usize + open(level, c, r + 1) as usize;
            }
        }
    }
    (nodes, edges)
}
