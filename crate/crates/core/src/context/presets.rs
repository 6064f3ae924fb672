//! Easy and hard presets, expressed as ordinary context specs.

use std::str::FromStr;

use super::ContextSpec;
use crate::games::GameId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetMode {
    Easy,
    Hard,
}

impl FromStr for PresetMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "easy" => Ok(PresetMode::Easy),
            "hard" => Ok(PresetMode::Hard),
            other => Err(format!("unknown preset `{other}` (expected easy or hard)")),
        }
    }
}

pub fn preset(game: GameId, mode: PresetMode) -> ContextSpec {
    use PresetMode::*;
    match (game, mode) {
        (GameId::Ridge, Easy) => ContextSpec::new()
            .with("min_num_sections", 2)
            .with("max_num_sections", 3)
            .with("gap_min", 1)
            .with("gap_max", 2)
            .with("section_len_min", 5)
            .with("section_len_max", 8)
            .with("max_height_step", 0)
            .with("terrain_profile", "flat"),
        (GameId::Ridge, Hard) => ContextSpec::new()
            .with("min_num_sections", 6)
            .with("max_num_sections", 10)
            .with("gap_min", 2)
            .with("gap_max", 4)
            .with("section_len_min", 3)
            .with("section_len_max", 5)
            .with("max_height_step", 2)
            .with("terrain_profile", "random_walk"),
        (GameId::Lanes, Easy) => ContextSpec::new()
            .with("min_road_lanes", 1)
            .with("max_road_lanes", 2)
            .with("min_water_lanes", 0)
            .with("max_water_lanes", 1)
            .with("grid_width", 9)
            .with("vehicle_density", 0.2),
        (GameId::Lanes, Hard) => ContextSpec::new()
            .with("min_road_lanes", 3)
            .with("max_road_lanes", 5)
            .with("min_water_lanes", 2)
            .with("max_water_lanes", 4)
            .with("grid_width", 15)
            .with("vehicle_density", 0.5)
            .with("vehicle_speed_min", 0.5)
            .with("vehicle_speed_max", 1.5),
        (GameId::Maze, Easy) => ContextSpec::new()
            .with("maze_dim_min", 5)
            .with("maze_dim_max", 9)
            .with("wall_removal_prob", 0.3),
        (GameId::Maze, Hard) => ContextSpec::new()
            .with("maze_dim_min", 15)
            .with("maze_dim_max", 25)
            .with("wall_removal_prob", 0.0)
            .with("max_episode_steps", 2000),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{schema_for, Category, Harder};

    #[test]
    fn presets_validate() {
        for game in GameId::ALL {
            for mode in [PresetMode::Easy, PresetMode::Hard] {
                let spec = preset(game, mode);
                assert!(schema_for(game).validate(&spec).is_ok(), "{game:?} {mode:?}");
            }
        }
    }

    #[test]
    fn hard_dominates_easy_on_map_complexity() {
        for game in GameId::ALL {
            let schema = schema_for(game);
            let easy = schema.resolve(&preset(game, PresetMode::Easy)).unwrap();
            let hard = schema.resolve(&preset(game, PresetMode::Hard)).unwrap();
            for (i, def) in schema.params.iter().enumerate() {
                if def.category != Category::MapComplexity {
                    continue;
                }
                let (e, h) = (easy.values[i].as_f64(), hard.values[i].as_f64());
                match def.harder {
                    Harder::WhenHigher => assert!(h >= e, "{}: {h} < {e}", def.name),
                    Harder::WhenLower => assert!(h <= e, "{}: {h} > {e}", def.name),
                    Harder::Neutral => {}
                }
            }
        }
    }

    #[test]
    fn maze_hard_range_strictly_above_easy() {
        let maze = schema_for(GameId::Maze);
        let easy = maze.resolve(&preset(GameId::Maze, PresetMode::Easy)).unwrap();
        let hard = maze.resolve(&preset(GameId::Maze, PresetMode::Hard)).unwrap();
        assert!(easy.get("maze_dim_max").unwrap().as_i64() < hard.get("maze_dim_min").unwrap().as_i64());
    }

    #[test]
    fn lanes_hard_has_more_lanes() {
        let e = preset(GameId::Lanes, PresetMode::Easy);
        let h = preset(GameId::Lanes, PresetMode::Hard);
        let get = |s: &ContextSpec| match s.get("max_road_lanes") {
            Some(crate::context::SpecValue::Int(v)) => *v,
            other => panic!("{other:?}"),
        };
        assert!(get(&h) > get(&e));
    }
}
