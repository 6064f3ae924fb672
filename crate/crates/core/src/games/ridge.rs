//! Ridge: a side-scrolling platformer. The agent runs right across
//! `num_sections` platforms separated by gaps and wins on reaching the last
//! column.
//!
//! Positions are fixed point, [`SUB`] sub-units per tile, with `y` measured
//! upward from the level floor. One tick: ground input sets `vx` to
//! `-speed`, `0`, or `speed` (jump keeps `vx` and sets `vy`); airborne input
//! adds `±air_accel` to `vx`, clamped to `±speed`. The horizontal move comes
//! first and is cancelled if it would enter a column whose surface is above
//! the agent. Gravity is applied next, and the agent lands when it reaches
//! the surface of its column. Dropping below the floor kills the agent.
//!
//! Jump clearance is analysed for a running jump: walk right, jump, hold
//! right. After a jump the agent has risen `H(k) = k*J - g*k*(k+1)/2`
//! after `k` ticks. [`clears_at`] decides whether such a jump from some
//! takeoff point of one section lands on the next, and [`clearable`]
//! requires that for every sub-tile alignment the agent may arrive with.

use std::collections::HashMap;
use std::sync::{LazyLock, Mutex};

use crate::context::{ContextSchema, ParamValue, ValidationError};
use crate::rng::RngStream;

use super::{Goal, LevelLayout, TerminationCause, OUT_OF_BOUNDS};

pub const SUB: i64 = 256;
pub const MAX_TERRAIN: i64 = 6;
/// Empty rows kept above the highest possible platform.
const HEADROOM: usize = 6;

pub const AIR: u8 = 1;
pub const GROUND: u8 = 2;
pub const GOAL: u8 = 3;

pub const NOOP: u8 = 0;
pub const LEFT: u8 = 1;
pub const RIGHT: u8 = 2;
pub const JUMP: u8 = 3;

const MAX_EPISODE_STEPS: usize = 0;
const VISIBILITY: usize = 1;
const GRAVITY: usize = 2;
const COMPLETION_REWARD: usize = 3;
const STEP_PENALTY: usize = 4;
const DEATH_PENALTY: usize = 5;
const AGENT_SPEED: usize = 6;
const JUMP_IMPULSE: usize = 7;
const AIR_CONTROL: usize = 8;
const MAX_SECTIONS: usize = 11;
const GAP_MIN: usize = 12;
const GAP_MAX: usize = 13;
const LEN_MIN: usize = 14;
const LEN_MAX: usize = 15;
const HEIGHT_STEP: usize = 16;
const PROFILE: usize = 17;

/// Integer physics derived from the float parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Physics {
    pub speed: i64,
    pub jump: i64,
    pub gravity: i64,
    pub air_accel: i64,
}

impl Physics {
    pub fn new(agent_speed: f64, jump_impulse: f64, gravity: f64, air_control: f64) -> Self {
        Self {
            speed: ((agent_speed * SUB as f64).round() as i64).clamp(1, SUB),
            jump: ((jump_impulse * SUB as f64).round() as i64).max(1),
            gravity: ((gravity * SUB as f64).round() as i64).max(1),
            air_accel: (agent_speed * air_control * SUB as f64).round() as i64,
        }
    }

    fn from_values(v: &[ParamValue]) -> Self {
        Self::new(
            v[AGENT_SPEED].as_f64(),
            v[JUMP_IMPULSE].as_f64(),
            v[GRAVITY].as_f64(),
            v[AIR_CONTROL].as_f64(),
        )
    }

    /// Height gained `k` ticks after a grounded jump.
    #[inline]
    pub fn rise(&self, k: i64) -> i64 {
        k * self.jump - self.gravity * k * (k + 1) / 2
    }

    /// First tick after a jump at which the agent is `drop` below takeoff.
    fn ticks_to_drop(&self, drop: i64) -> i64 {
        let mut k = 1;
        while self.rise(k) > -drop {
            k += 1;
        }
        k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Flat,
    RandomWalk,
    Ascending,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeParams {
    pub max_steps: u32,
    pub visibility: usize,
    pub completion_reward: f64,
    pub step_penalty: f64,
    pub death_penalty: f64,
    pub physics: Physics,
    pub num_sections: usize,
    pub gap_min: i64,
    pub gap_max: i64,
    pub len_min: i64,
    pub len_max: i64,
    pub max_height_step: i64,
    pub profile: Profile,
}

impl RidgeParams {
    pub fn from_values(v: &[ParamValue], realized: &[ParamValue]) -> Self {
        Self {
            max_steps: v[MAX_EPISODE_STEPS].as_i64() as u32,
            visibility: v[VISIBILITY].as_i64() as usize,
            completion_reward: v[COMPLETION_REWARD].as_f64(),
            step_penalty: v[STEP_PENALTY].as_f64(),
            death_penalty: v[DEATH_PENALTY].as_f64(),
            physics: Physics::from_values(v),
            num_sections: realized[0].as_i64() as usize,
            gap_min: v[GAP_MIN].as_i64(),
            gap_max: v[GAP_MAX].as_i64(),
            len_min: v[LEN_MIN].as_i64(),
            len_max: v[LEN_MAX].as_i64(),
            max_height_step: v[HEIGHT_STEP].as_i64(),
            profile: match v[PROFILE].as_enum() {
                "flat" => Profile::Flat,
                "ascending" => Profile::Ascending,
                _ => Profile::RandomWalk,
            },
        }
    }
}

/// Whether a running jump clears a `gap`-tile gap onto a section `dh` tiles
/// higher, for an agent whose position is `align` sub-units past the
/// running lattice point nearest the edge (`0 <= align < speed`).
///
/// Takeoff points are `p = -speed + align - m*speed` relative to the edge,
/// each entered by a rightward step from inside the section.
pub fn clears_at(phys: &Physics, align: i64, gap: i64, dh: i64, len_from: i64, len_to: i64) -> bool {
    let spd = phys.speed;
    let target = dh * SUB;
    let start = gap * SUB;
    let end = start + len_to * SUB;
    // Flat landing tick: a jump must leave its own section before this.
    let flat_land = phys.ticks_to_drop(0);
    let m_max = (len_from * SUB - 2 * spd + align).div_euclid(spd);
    let mut m = 0;
    while m <= m_max && m < flat_land {
        let p = -spd + align - m * spd;
        let cross = (start - p + spd - 1).div_euclid(spd);
        if phys.rise(cross - 1) >= target {
            let mut k = cross;
            while phys.rise(k) > target {
                k += 1;
            }
            if p + k * spd < end {
                return true;
            }
        }
        m += 1;
    }
    false
}

type ClearKey = (Physics, i64, i64, i64, i64);

static CLEAR_CACHE: LazyLock<Mutex<HashMap<ClearKey, bool>>> = LazyLock::new(|| Mutex::new(HashMap::new()));

/// [`clears_at`] for every alignment. Results are memoized.
pub fn clearable(phys: &Physics, gap: i64, dh: i64, len_from: i64, len_to: i64) -> bool {
    let key = (*phys, gap, dh, len_from, len_to);
    if let Some(v) = CLEAR_CACHE.lock().unwrap().get(&key) {
        return *v;
    }
    let v = (0..phys.speed).all(|a| clears_at(phys, a, gap, dh, len_from, len_to));
    CLEAR_CACHE.lock().unwrap().insert(key, v);
    v
}

/// Widest gap a running jump clears onto level ground with unlimited
/// takeoff and landing room.
pub fn max_clear_gap(phys: &Physics) -> i64 {
    let mut gap = 0;
    while gap < 64 && (0..phys.speed).any(|a| clears_at(phys, a, gap + 1, 0, 64, 64)) {
        gap += 1;
    }
    gap
}

/// Upper bound on ticks for the canonical route through one section:
/// walk its length twice plus one tile, then fly.
fn section_ticks(phys: &Physics, len: i64) -> i64 {
    let walk = ((2 * len + 1) * SUB + phys.speed - 1) / phys.speed;
    walk + 2 + phys.ticks_to_drop(MAX_TERRAIN * SUB)
}

pub fn cross_check(schema: &ContextSchema, v: &[ParamValue]) -> Vec<ValidationError> {
    let name = |i: usize| schema.params[i].name.to_string();
    let mut errors = Vec::new();
    for (lo, hi) in [(GAP_MIN, GAP_MAX), (LEN_MIN, LEN_MAX)] {
        if v[lo].as_i64() > v[hi].as_i64() {
            errors.push(ValidationError::InvertedRange {
                lo_name: name(lo),
                hi_name: name(hi),
            });
        }
    }
    if !errors.is_empty() {
        return errors;
    }
    let phys = Physics::from_values(v);
    let len_min = v[LEN_MIN].as_i64();
    for gap in v[GAP_MIN].as_i64()..=v[GAP_MAX].as_i64() {
        if !clearable(&phys, gap, 0, len_min, len_min) {
            errors.push(ValidationError::Infeasible {
                name: name(GAP_MAX),
                reason: format!(
                    "a {gap}-tile gap between {len_min}-tile sections cannot be cleared with \
                     agent_speed, jump_impulse, and gravity as given (widest clearable gap: {})",
                    max_clear_gap(&phys)
                ),
            });
            return errors;
        }
    }
    let sections = v[MAX_SECTIONS].as_i64();
    let need = sections * section_ticks(&phys, v[LEN_MAX].as_i64());
    if need > v[MAX_EPISODE_STEPS].as_i64() {
        errors.push(ValidationError::Infeasible {
            name: name(MAX_EPISODE_STEPS),
            reason: format!("{sections} sections may need up to {need} ticks"),
        });
    }
    errors
}

/// Builds the tile grid for platforms of the given heights and lengths
/// separated by `gaps` (one fewer than sections).
pub fn layout(heights: &[i64], lens: &[i64], gaps: &[i64]) -> LevelLayout {
    let width = (lens.iter().sum::<i64>() + gaps.iter().sum::<i64>()) as usize;
    let height = MAX_TERRAIN as usize + HEADROOM;
    let mut surface = Vec::with_capacity(width);
    for (i, (&h, &len)) in heights.iter().zip(lens).enumerate() {
        surface.extend(std::iter::repeat_n(Some(h as u8), len as usize));
        if let Some(&g) = gaps.get(i) {
            surface.extend(std::iter::repeat_n(None, g as usize));
        }
    }
    let mut tiles = vec![AIR; width * height];
    for (col, s) in surface.iter().enumerate() {
        if let Some(h) = s {
            for row in height - *h as usize..height {
                tiles[row * width + col] = GROUND;
            }
        }
    }
    let goal_col = width - 1;
    let goal_row = height - 1 - heights[heights.len() - 1] as usize;
    tiles[goal_row * width + goal_col] = GOAL;
    LevelLayout {
        width,
        height,
        tiles,
        start: (0, height - 1 - heights[0] as usize),
        goal: Goal::Cell {
            col: goal_col,
            row: goal_row,
        },
        movers: Vec::new(),
        surface,
    }
}

pub fn generate(p: &RidgeParams, stream: &mut RngStream) -> Result<LevelLayout, String> {
    let phys = &p.physics;
    let n = p.num_sections;
    let mut lens = Vec::with_capacity(n);
    let mut heights = Vec::with_capacity(n);
    let mut gaps = Vec::with_capacity(n.saturating_sub(1));
    lens.push(stream.uniform_int(p.len_min, p.len_max));
    heights.push(stream.uniform_int(1, 3));
    for i in 1..n {
        let len = stream.uniform_int(p.len_min, p.len_max);
        let gap = stream.uniform_int(p.gap_min, p.gap_max);
        let step = p.max_height_step;
        let drawn = match p.profile {
            Profile::Flat => 0,
            Profile::RandomWalk => stream.uniform_int(-step, step),
            Profile::Ascending => stream.uniform_int(0, step),
        };
        let prev = heights[i - 1];
        let mut dh = (prev + drawn).clamp(1, MAX_TERRAIN) - prev;
        while !clearable(phys, gap, dh, lens[i - 1], len) {
            if dh == 0 {
                return Err(format!("gap of {gap} tiles is not clearable on level ground"));
            }
            dh -= dh.signum();
        }
        lens.push(len);
        gaps.push(gap);
        heights.push(prev + dh);
    }
    Ok(layout(&heights, &lens, &gaps))
}

/// Sections as `(first column, length, height)`, read back from the surface.
pub fn sections(level: &LevelLayout) -> Vec<(usize, usize, i64)> {
    let mut out: Vec<(usize, usize, i64)> = Vec::new();
    let mut prev_solid = false;
    for (col, s) in level.surface.iter().enumerate() {
        match s {
            Some(h) if prev_solid && out.last().unwrap().2 == *h as i64 => out.last_mut().unwrap().1 += 1,
            Some(h) => out.push((col, 1, *h as i64)),
            None => {}
        }
        prev_solid = s.is_some();
    }
    out
}

pub fn count_sections(level: &LevelLayout) -> usize {
    sections(level).len()
}

/// Sequential per-gap clearance, plus the canonical route's tick budget.
pub fn solvable(level: &LevelLayout, p: &RidgeParams) -> bool {
    let secs = sections(level);
    let mut ticks = 0;
    for (i, s) in secs.iter().enumerate() {
        ticks += section_ticks(&p.physics, s.1 as i64);
        if let Some(next) = secs.get(i + 1) {
            let gap = (next.0 - (s.0 + s.1)) as i64;
            if gap == 0 || !clearable(&p.physics, gap, next.2 - s.2, s.1 as i64, next.1 as i64) {
                return false;
            }
        }
    }
    ticks <= p.max_steps as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Agent {
    pub x: i64,
    pub y: i64,
    pub vx: i64,
    pub vy: i64,
}

impl Agent {
    pub fn at_start(level: &LevelLayout) -> Self {
        let h = level.surface[0].expect("first column is solid") as i64;
        Self {
            x: SUB / 2,
            y: h * SUB,
            vx: 0,
            vy: 0,
        }
    }

    #[inline]
    fn surface_at(level: &LevelLayout, x: i64) -> Option<i64> {
        level.surface[(x / SUB) as usize].map(|h| h as i64 * SUB)
    }

    pub fn grounded(&self, level: &LevelLayout) -> bool {
        self.y >= 0 && Self::surface_at(level, self.x) == Some(self.y)
    }

    pub fn cell(&self, level: &LevelLayout) -> (i64, i64) {
        let row = level.height as i64 - 1 - self.y.div_euclid(SUB);
        (self.x / SUB, row)
    }
}

pub fn step(level: &LevelLayout, p: &RidgeParams, agent: &Agent, action: u8) -> (Agent, f64, TerminationCause) {
    let phys = &p.physics;
    let mut a = *agent;
    let grounded = a.grounded(level);
    let dir = match action {
        LEFT => -1,
        RIGHT => 1,
        _ => 0,
    };
    let jumping = grounded && action == JUMP;
    if grounded {
        if jumping {
            a.vy = phys.jump;
        } else {
            a.vx = dir * phys.speed;
        }
    } else {
        a.vx = (a.vx + dir * phys.air_accel).clamp(-phys.speed, phys.speed);
    }

    let nx = a.x + a.vx;
    let blocked = nx < 0
        || nx >= level.width as i64 * SUB
        || (nx / SUB != a.x / SUB && Agent::surface_at(level, nx).is_some_and(|s| s > a.y));
    if blocked {
        a.vx = 0;
    } else {
        a.x = nx;
    }

    if grounded && !jumping {
        a.vy = 0;
    } else {
        a.vy -= phys.gravity;
        let ny = a.y + a.vy;
        match Agent::surface_at(level, a.x) {
            Some(s) if ny <= s && a.y >= s => {
                a.y = s;
                a.vy = 0;
            }
            _ => a.y = ny,
        }
    }

    let mut reward = p.step_penalty;
    let cause = if a.y < 0 {
        reward += p.death_penalty;
        TerminationCause::Death
    } else if matches!(level.goal, Goal::Cell { col, .. } if (a.x / SUB) as usize == col) {
        reward += p.completion_reward;
        TerminationCause::Goal
    } else {
        TerminationCause::Running
    };
    (a, reward, cause)
}

/// Tile id at a cell; a convenience for renderers and tests.
pub fn tile_name(tile: u8) -> &'static str {
    match tile {
        OUT_OF_BOUNDS => "out_of_bounds",
        AIR => "air",
        GROUND => "ground",
        GOAL => "goal",
        _ => "unknown",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{realize_values, schema_for, ContextSpec};
    use crate::games::GameId;

    fn params(spec: ContextSpec, sections: i64) -> RidgeParams {
        let r = schema_for(GameId::Ridge).resolve(&spec).unwrap();
        RidgeParams::from_values(&r.values, &[ParamValue::Int(sections)])
    }

    fn defaults() -> RidgeParams {
        params(ContextSpec::new(), 3)
    }

    /// Runs a running jump with the real dynamics: stand at `p - speed`,
    /// step right, jump, hold right. Returns the index of the section the
    /// agent first lands on, if any.
    fn simulate_jump(level: &LevelLayout, p: &RidgeParams, takeoff: i64) -> Option<usize> {
        let secs = sections(level);
        let h0 = secs[0].2;
        let mut a = Agent {
            x: takeoff - p.physics.speed,
            y: h0 * SUB,
            vx: 0,
            vy: 0,
        };
        assert!(a.grounded(level));
        let mut r = step(level, p, &a, RIGHT);
        assert_eq!(r.0.x, takeoff);
        r = step(level, p, &r.0, JUMP);
        for _ in 0..2000 {
            a = r.0;
            if r.2 != TerminationCause::Running {
                return secs
                    .iter()
                    .position(|s| (a.x / SUB) as usize >= s.0 && ((a.x / SUB) as usize) < s.0 + s.1)
                    .filter(|_| a.grounded(level));
            }
            if a.grounded(level) {
                let col = (a.x / SUB) as usize;
                return secs.iter().position(|s| col >= s.0 && col < s.0 + s.1);
            }
            if a.vx < p.physics.speed {
                // Hit a wall: outside the running-jump family.
                return None;
            }
            r = step(level, p, &a, RIGHT);
        }
        None
    }

    /// Brute force over every takeoff point with a given alignment.
    fn brute_clears_at(p: &RidgeParams, align: i64, gap: i64, dh: i64, lf: i64, lt: i64) -> bool {
        let h = 3;
        let level = layout(&[h, h + dh, 1], &[lf, lt, 8], &[gap, 6]);
        let edge = lf * SUB;
        let spd = p.physics.speed;
        let mut takeoff = edge - spd + align;
        let mut any = false;
        while takeoff - spd >= 0 {
            if simulate_jump(&level, p, takeoff) == Some(1) {
                any = true;
                break;
            }
            takeoff -= spd;
        }
        any
    }

    fn with_physics(s: f64, j: f64, g: f64, air: f64) -> RidgeParams {
        let mut p = defaults();
        p.physics = Physics::new(s, j, g, air);
        p
    }

    /// 50 physics combinations spanning the parameter bounds.
    fn physics_grid() -> Vec<RidgeParams> {
        let mut out = Vec::new();
        let speeds = [0.25, 0.3, 0.5, 0.75, 1.0];
        let jumps = [0.4, 0.8, 1.2];
        let gravities = [0.05, 0.08, 0.15];
        for (i, s) in speeds.iter().enumerate() {
            for (j, jmp) in jumps.iter().enumerate() {
                for (k, g) in gravities.iter().enumerate() {
                    let air = [0.0, 0.5][(i + j + k) % 2];
                    out.push(with_physics(*s, *jmp, *g, air));
                }
            }
        }
        for (s, j, g) in [
            (0.4, 0.6, 0.04),
            (0.6, 1.0, 0.1),
            (0.9, 1.5, 0.2),
            (0.35, 0.3, 0.02),
            (1.0, 0.5, 0.12),
        ] {
            out.push(with_physics(s, j, g, 1.0));
        }
        out
    }

    #[test]
    fn closed_form_matches_simulated_jumps() {
        let grid = physics_grid();
        assert_eq!(grid.len(), 50);
        for p in &grid {
            let spd = p.physics.speed;
            let stride = (spd / 6).max(1);
            for gap in 1..=6 {
                for dh in [-2, 0, 1, 2] {
                    for (lf, lt) in [(3, 3), (5, 4), (8, 8)] {
                        let mut align = 0;
                        while align < spd {
                            assert_eq!(
                                clears_at(&p.physics, align, gap, dh, lf, lt),
                                brute_clears_at(p, align, gap, dh, lf, lt),
                                "{:?} align {align} gap {gap} dh {dh} lens {lf}/{lt}",
                                p.physics
                            );
                            align += stride;
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn default_max_gap_matches_simulation() {
        let p = defaults();
        let closed = max_clear_gap(&p.physics);
        let mut simulated = 0;
        for gap in 1..=12 {
            if (0..p.physics.speed).any(|a| brute_clears_at(&p, a, gap, 0, 8, 8)) {
                simulated = gap;
            }
        }
        assert_eq!(closed, simulated);
        assert!(closed >= 3, "{closed}");
    }

    #[test]
    fn vertical_jump_without_air_control_returns_to_column() {
        let p = params(ContextSpec::new().with("air_control", 0.0), 1);
        let level = layout(&[2], &[6], &[]);
        let mut a = Agent::at_start(&level);
        a.x = 2 * SUB + SUB / 2;
        let col = a.x / SUB;
        let (mut a, _, _) = step(&level, &p, &a, JUMP);
        assert!(!a.grounded(&level));
        let mut peak = a.y;
        for _ in 0..200 {
            if a.grounded(&level) {
                break;
            }
            a = step(&level, &p, &a, NOOP).0;
            peak = peak.max(a.y);
            assert_eq!(a.x / SUB, col);
        }
        assert!(a.grounded(&level));
        assert!(peak > 2 * SUB);
    }

    #[test]
    fn falling_into_a_gap_is_death() {
        let p = defaults();
        let level = layout(&[2, 2], &[3, 3], &[3]);
        let mut a = Agent::at_start(&level);
        for _ in 0..500 {
            let (next, reward, cause) = step(&level, &p, &a, RIGHT);
            a = next;
            if cause == TerminationCause::Death {
                assert!((reward - (p.step_penalty + p.death_penalty)).abs() < 1e-12);
                return;
            }
            assert_eq!(cause, TerminationCause::Running);
        }
        panic!("never fell");
    }

    #[test]
    fn walls_block_horizontal_motion() {
        let p = defaults();
        let level = layout(&[1, 5], &[4, 4], &[0]);
        let mut a = Agent::at_start(&level);
        for _ in 0..100 {
            a = step(&level, &p, &a, RIGHT).0;
        }
        assert_eq!(a.x / SUB, 3);
        assert!(a.grounded(&level));
    }

    #[test]
    fn generated_levels_have_realized_section_count() {
        for n in 1..=10 {
            let mut p = defaults();
            p.num_sections = n;
            for seed in 0..20 {
                let level = generate(&p, &mut RngStream::derive(seed, 0, 0)).unwrap();
                assert_eq!(count_sections(&level), n);
                let secs = sections(&level);
                for w in secs.windows(2) {
                    let gap = (w[1].0 - w[0].0 - w[0].1) as i64;
                    assert!((p.gap_min..=p.gap_max).contains(&gap));
                }
                for s in &secs {
                    assert!((p.len_min..=p.len_max).contains(&(s.1 as i64)));
                }
                assert!(solvable(&level, &p));
            }
        }
    }

    #[test]
    fn four_sections_three_gaps() {
        let mut p = defaults();
        p.num_sections = 4;
        let level = generate(&p, &mut RngStream::derive(7, 1, 2)).unwrap();
        let secs = sections(&level);
        assert_eq!(secs.len(), 4);
        let gap_cols = level.surface.iter().filter(|s| s.is_none()).count() as i64;
        assert!(gap_cols >= 3 * p.gap_min);
    }

    #[test]
    fn generation_is_deterministic() {
        let p = defaults();
        let a = generate(&p, &mut RngStream::derive(1, 2, 3)).unwrap();
        let b = generate(&p, &mut RngStream::derive(1, 2, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cross_check_rejects_unclearable_gaps() {
        let schema = schema_for(GameId::Ridge);
        let spec = ContextSpec::new()
            .with("gap_min", 6)
            .with("gap_max", 6)
            .with("jump_impulse", 0.3)
            .with("gravity", 0.2);
        let err = schema.validate(&spec).unwrap_err();
        assert!(err.iter().any(|e| e.names() == ["gap_max"]), "{err}");
        let spec = ContextSpec::new().with("gap_min", 3).with("gap_max", 2);
        assert!(matches!(
            schema.validate(&spec).unwrap_err().0[0],
            ValidationError::InvertedRange { .. }
        ));
    }

    #[test]
    fn cross_check_rejects_short_budgets() {
        let schema = schema_for(GameId::Ridge);
        let spec = ContextSpec::new()
            .with("min_num_sections", 10)
            .with("max_num_sections", 10)
            .with("max_episode_steps", 100);
        let err = schema.validate(&spec).unwrap_err();
        assert!(err.iter().any(|e| e.names() == ["max_episode_steps"]), "{err}");
    }

    #[test]
    fn goal_reached_by_walking_on_one_section() {
        let mut p = defaults();
        p.num_sections = 1;
        let schema = schema_for(GameId::Ridge);
        let _ = realize_values(schema, &schema.defaults().values, &mut RngStream::derive(0, 0, 0));
        let level = generate(&p, &mut RngStream::derive(0, 0, 0)).unwrap();
        let mut a = Agent::at_start(&level);
        for _ in 0..200 {
            let (next, reward, cause) = step(&level, &p, &a, RIGHT);
            a = next;
            if cause == TerminationCause::Goal {
                assert!((reward - (p.step_penalty + p.completion_reward)).abs() < 1e-12);
                return;
            }
        }
        panic!("goal not reached");
    }
}
