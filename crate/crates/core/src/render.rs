//! Full-level renderings for inspection.
//!
//! ASCII legends (the agent is drawn as `@` in every game):
//!
//! | game  | glyphs |
//! |-------|--------|
//! | ridge | `.` air, `#` ground, `G` goal flag |
//! | lanes | `.` grass, `=` road, `~` water, `C` vehicle, `L` log, `G` goal row |
//! | maze  | `#` wall, `.` floor, `S` start, `G` goal |
//!
//! PPM output uses one fixed color per tile id.

use crate::games::{self, lanes, maze, ridge, AgentState, GameId, LevelLayout};

pub const AGENT_GLYPH: char = '@';
const AGENT_COLOR: [u8; 3] = [230, 40, 40];

pub fn glyph(game: GameId, tile: u8) -> char {
    match (game, tile) {
        (GameId::Ridge, ridge::AIR) => '.',
        (GameId::Ridge, ridge::GROUND) => '#',
        (GameId::Ridge, ridge::GOAL) => 'G',
        (GameId::Lanes, lanes::GRASS) => '.',
        (GameId::Lanes, lanes::ROAD) => '=',
        (GameId::Lanes, lanes::WATER) => '~',
        (GameId::Lanes, lanes::VEHICLE) => 'C',
        (GameId::Lanes, lanes::LOG) => 'L',
        (GameId::Lanes, lanes::GOAL) => 'G',
        (GameId::Maze, maze::FLOOR) => '.',
        (GameId::Maze, maze::WALL) => '#',
        (GameId::Maze, maze::START) => 'S',
        (GameId::Maze, maze::GOAL) => 'G',
        _ => ' ',
    }
}

pub fn color(game: GameId, tile: u8) -> [u8; 3] {
    match (game, tile) {
        (GameId::Ridge, ridge::AIR) => [170, 210, 240],
        (GameId::Ridge, ridge::GROUND) => [110, 80, 50],
        (GameId::Ridge, ridge::GOAL) => [250, 210, 40],
        (GameId::Lanes, lanes::GRASS) => [80, 170, 70],
        (GameId::Lanes, lanes::ROAD) => [70, 70, 70],
        (GameId::Lanes, lanes::WATER) => [40, 90, 200],
        (GameId::Lanes, lanes::VEHICLE) => [240, 140, 20],
        (GameId::Lanes, lanes::LOG) => [130, 90, 40],
        (GameId::Lanes, lanes::GOAL) => [250, 210, 40],
        (GameId::Maze, maze::FLOOR) => [225, 225, 215],
        (GameId::Maze, maze::WALL) => [40, 40, 60],
        (GameId::Maze, maze::START) => [120, 200, 120],
        (GameId::Maze, maze::GOAL) => [250, 210, 40],
        _ => [0, 0, 0],
    }
}

fn agent_at(level: &LevelLayout, agent: &AgentState) -> Option<(usize, usize)> {
    let (c, r) = games::agent_cell(level, agent);
    ((0..level.width as i64).contains(&c) && (0..level.height as i64).contains(&r)).then_some((c as usize, r as usize))
}

pub fn ascii(game: GameId, level: &LevelLayout, agent: &AgentState) -> String {
    let tick = games::agent_tick(agent);
    let me = agent_at(level, agent);
    let mut out = String::with_capacity((level.width + 1) * level.height);
    for row in 0..level.height {
        for col in 0..level.width {
            if me == Some((col, row)) {
                out.push(AGENT_GLYPH);
            } else {
                out.push(glyph(game, level.tile(col as i64, row as i64, tick)));
            }
        }
        out.push('\n');
    }
    out
}

pub fn ppm(game: GameId, level: &LevelLayout, agent: &AgentState, scale: usize) -> Vec<u8> {
    let scale = scale.max(1);
    let (w, h) = (level.width * scale, level.height * scale);
    let tick = games::agent_tick(agent);
    let me = agent_at(level, agent);
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.reserve(w * h * 3);
    for row in 0..level.height {
        let colors: Vec<[u8; 3]> = (0..level.width)
            .map(|col| {
                if me == Some((col, row)) {
                    AGENT_COLOR
                } else {
                    color(game, level.tile(col as i64, row as i64, tick))
                }
            })
            .collect();
        for _ in 0..scale {
            for c in &colors {
                for _ in 0..scale {
                    out.extend_from_slice(c);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{schema_for, ContextSpec, ParamValue};
    use crate::games::{maze::MazeParams, GameParams};
    use crate::rng::RngStream;

    #[test]
    fn open_five_by_five_maze() {
        let r = schema_for(GameId::Maze)
            .resolve(&ContextSpec::new().with("wall_removal_prob", 1.0))
            .unwrap();
        let p = MazeParams::from_values(&r.values, &[ParamValue::Int(5)]);
        let level = maze::generate(&p, &mut RngStream::derive(0, 0, 0)).unwrap();
        let agent = games::initial_agent(&GameParams::Maze(p), &level);
        let text = ascii(GameId::Maze, &level, &agent);
        let expected = "#######\n#@....#\n#.....#\n#.....#\n#.....#\n#....G#\n#######\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn ppm_header_and_size() {
        let level = ridge::layout(&[1, 2], &[5, 5], &[1]);
        let agent = AgentState::Ridge(ridge::Agent::at_start(&level));
        let img = ppm(GameId::Ridge, &level, &agent, 8);
        let header = format!("P6\n{} {}\n255\n", 11 * 8, level.height * 8);
        assert!(img.starts_with(header.as_bytes()));
        assert_eq!(img.len(), header.len() + 11 * 8 * level.height * 8 * 3);
    }

    #[test]
    fn every_tile_has_a_glyph() {
        for (game, tiles) in [(GameId::Ridge, 1..=3), (GameId::Lanes, 1..=6), (GameId::Maze, 1..=4)] {
            let glyphs: std::collections::HashSet<char> = tiles.map(|t| glyph(game, t)).collect();
            assert!(!glyphs.contains(&' '));
            assert!(!glyphs.contains(&AGENT_GLYPH));
        }
    }
}
