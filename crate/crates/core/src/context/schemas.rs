//! The shipped parameter tables. Parameter order is part of the schema
//! version: the game modules read values by position.

use std::sync::LazyLock;

use super::Category::*;
use super::{ContextSchema, Harder, ParamDef, ParamKind, ParamValue, RangeRole};
use crate::games::{lanes, maze, ridge, GameId};

pub const SCHEMA_VERSION: u32 = 1;

fn int(name: &'static str, lo: i64, hi: i64, default: i64) -> ParamDef {
    ParamDef {
        name,
        kind: ParamKind::Int,
        default: ParamValue::Int(default),
        bounds: Some((lo as f64, hi as f64)),
        enum_values: &[],
        category: GameMechanics,
        range_role: RangeRole::None,
        odd_only: false,
        harder: Harder::Neutral,
        description: "",
    }
}

fn float(name: &'static str, lo: f64, hi: f64, default: f64) -> ParamDef {
    ParamDef {
        kind: ParamKind::Float,
        default: ParamValue::Float(default),
        bounds: Some((lo, hi)),
        ..int(name, 0, 0, 0)
    }
}

fn boolean(name: &'static str, default: bool) -> ParamDef {
    ParamDef {
        kind: ParamKind::Bool,
        default: ParamValue::Bool(default),
        bounds: None,
        ..int(name, 0, 0, 0)
    }
}

fn choice(name: &'static str, values: &'static [&'static str], default: &'static str) -> ParamDef {
    ParamDef {
        kind: ParamKind::Enum,
        default: ParamValue::Enum(default),
        bounds: None,
        enum_values: values,
        ..int(name, 0, 0, 0)
    }
}

impl ParamDef {
    fn cat(mut self, category: super::Category) -> Self {
        self.category = category;
        self
    }
    fn harder(mut self, harder: Harder) -> Self {
        self.harder = harder;
        self
    }
    fn min_of(mut self, partner: &'static str) -> Self {
        self.range_role = RangeRole::MinOf(partner);
        self
    }
    fn max_of(mut self, partner: &'static str) -> Self {
        self.range_role = RangeRole::MaxOf(partner);
        self
    }
    fn odd(mut self) -> Self {
        self.odd_only = true;
        self
    }
    fn doc(mut self, text: &'static str) -> Self {
        self.description = text;
        self
    }
}

use Harder::{WhenHigher as Up, WhenLower as Down};

static RIDGE: LazyLock<ContextSchema> = LazyLock::new(|| {
    ContextSchema::new(
        GameId::Ridge,
        SCHEMA_VERSION,
        vec![
            int("max_episode_steps", 100, 5000, 1000).doc("episode length limit in ticks"),
            int("visibility", 1, 12, 5)
                .harder(Down)
                .doc("observation radius in tiles"),
            float("gravity", 0.02, 0.2, 0.08).doc("downward acceleration, tiles/tick^2"),
            float("completion_reward", 0.0, 100.0, 10.0)
                .cat(RewardStructure)
                .doc("reward for reaching the flag"),
            float("step_penalty", -1.0, 0.0, -0.01)
                .cat(RewardStructure)
                .doc("reward added every tick"),
            float("death_penalty", -100.0, 0.0, -1.0)
                .cat(RewardStructure)
                .doc("reward added on falling"),
            float("agent_speed", 0.25, 1.0, 0.3)
                .cat(AgentAttribute)
                .doc("run speed, tiles/tick"),
            float("jump_impulse", 0.3, 1.5, 0.8)
                .cat(AgentAttribute)
                .doc("upward speed at takeoff, tiles/tick"),
            float("air_control", 0.0, 1.0, 0.5)
                .cat(AgentAttribute)
                .doc("airborne acceleration as a fraction of agent_speed"),
            int("health", 1, 1, 1)
                .cat(AgentAttribute)
                .doc("reserved; all games use one-hit death"),
            int("min_num_sections", 1, 10, 1)
                .cat(MapComplexity)
                .harder(Up)
                .min_of("max_num_sections")
                .doc("lower bound on platform sections per level"),
            int("max_num_sections", 1, 10, 5)
                .cat(MapComplexity)
                .harder(Up)
                .max_of("min_num_sections")
                .doc("upper bound on platform sections per level"),
            int("gap_min", 1, 6, 1)
                .cat(MapComplexity)
                .harder(Up)
                .doc("narrowest gap between sections, tiles"),
            int("gap_max", 1, 6, 3)
                .cat(MapComplexity)
                .harder(Up)
                .doc("widest gap between sections, tiles"),
            int("section_len_min", 3, 8, 4)
                .cat(MapComplexity)
                .harder(Down)
                .doc("shortest section, tiles"),
            int("section_len_max", 3, 8, 7)
                .cat(MapComplexity)
                .harder(Down)
                .doc("longest section, tiles"),
            int("max_height_step", 0, 3, 1)
                .cat(MapComplexity)
                .harder(Up)
                .doc("largest height change between consecutive sections, tiles"),
            choice("terrain_profile", &["flat", "random_walk", "ascending"], "random_walk")
                .cat(GameSpecific)
                .doc("how section heights evolve along the level"),
        ],
        ridge::cross_check,
    )
});

static LANES: LazyLock<ContextSchema> = LazyLock::new(|| {
    ContextSchema::new(
        GameId::Lanes,
        SCHEMA_VERSION,
        vec![
            int("max_episode_steps", 50, 5000, 300).doc("episode length limit in ticks"),
            int("visibility", 1, 12, 4)
                .harder(Down)
                .doc("observation radius in tiles"),
            float("goal_reward", 0.0, 100.0, 10.0)
                .cat(RewardStructure)
                .doc("reward for reaching the far bank"),
            float("step_penalty", -1.0, 0.0, -0.01)
                .cat(RewardStructure)
                .doc("reward added every tick"),
            float("death_penalty", -100.0, 0.0, -1.0)
                .cat(RewardStructure)
                .doc("reward added on collision or drowning"),
            boolean("can_move_down", true)
                .cat(AgentAttribute)
                .doc("whether the agent may step backwards"),
            int("min_road_lanes", 0, 6, 1)
                .cat(MapComplexity)
                .harder(Up)
                .min_of("max_road_lanes")
                .doc("lower bound on road rows"),
            int("max_road_lanes", 0, 6, 3)
                .cat(MapComplexity)
                .harder(Up)
                .max_of("min_road_lanes")
                .doc("upper bound on road rows"),
            int("min_water_lanes", 0, 6, 0)
                .cat(MapComplexity)
                .harder(Up)
                .min_of("max_water_lanes")
                .doc("lower bound on water rows"),
            int("max_water_lanes", 0, 6, 2)
                .cat(MapComplexity)
                .harder(Up)
                .max_of("min_water_lanes")
                .doc("upper bound on water rows"),
            int("grid_width", 5, 21, 9)
                .cat(MapComplexity)
                .harder(Up)
                .doc("columns per row"),
            float("vehicle_density", 0.0, 0.8, 0.3)
                .cat(MapComplexity)
                .harder(Up)
                .doc("fraction of road cells occupied by vehicles"),
            float("vehicle_speed_min", 0.25, 2.0, 0.25)
                .cat(GameSpecific)
                .harder(Up)
                .min_of("vehicle_speed_max")
                .doc("lower bound on vehicle speed, tiles/tick (quantized to quarters)"),
            float("vehicle_speed_max", 0.25, 2.0, 1.0)
                .cat(GameSpecific)
                .harder(Up)
                .max_of("vehicle_speed_min")
                .doc("upper bound on vehicle speed, tiles/tick (quantized to quarters)"),
            float("log_speed", 0.25, 1.0, 0.5)
                .cat(GameSpecific)
                .harder(Up)
                .doc("log drift speed, tiles/tick (quantized to quarters)"),
            int("log_length", 1, 5, 3)
                .cat(GameSpecific)
                .harder(Down)
                .doc("tiles per log"),
            int("logs_per_row", 1, 4, 2)
                .cat(GameSpecific)
                .harder(Down)
                .doc("logs placed on each water row"),
        ],
        lanes::cross_check,
    )
});

static MAZE: LazyLock<ContextSchema> = LazyLock::new(|| {
    ContextSchema::new(
        GameId::Maze,
        SCHEMA_VERSION,
        vec![
            int("max_episode_steps", 50, 10000, 500).doc("episode length limit in ticks"),
            int("visibility", 1, 12, 5)
                .harder(Down)
                .doc("observation radius in tiles"),
            float("goal_reward", 0.0, 100.0, 10.0)
                .cat(RewardStructure)
                .doc("reward for reaching the goal"),
            float("step_penalty", -1.0, 0.0, -0.01)
                .cat(RewardStructure)
                .doc("reward added every tick"),
            int("move_period", 1, 4, 1)
                .cat(AgentAttribute)
                .harder(Up)
                .doc("the agent moves only on ticks divisible by this period"),
            int("maze_dim_min", 5, 25, 5)
                .odd()
                .cat(MapComplexity)
                .harder(Up)
                .min_of("maze_dim_max")
                .doc("lower bound on maze side length (odd, border excluded)"),
            int("maze_dim_max", 5, 25, 15)
                .odd()
                .cat(MapComplexity)
                .harder(Up)
                .max_of("maze_dim_min")
                .doc("upper bound on maze side length (odd, border excluded)"),
            float("wall_removal_prob", 0.0, 1.0, 0.1)
                .cat(MapComplexity)
                .harder(Down)
                .doc("probability each interior wall tile is removed after carving"),
            choice("goal_placement", &["far_corner", "random"], "far_corner")
                .cat(GameSpecific)
                .doc("where the goal cell is placed"),
        ],
        maze::cross_check,
    )
});

/// The static schema of a game.
pub fn schema_for(game: GameId) -> &'static ContextSchema {
    match game {
        GameId::Ridge => &RIDGE,
        GameId::Lanes => &LANES,
        GameId::Maze => &MAZE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_schema_covers_all_categories() {
        for game in GameId::ALL {
            let schema = schema_for(game);
            for cat in super::super::Category::ALL {
                assert!(
                    schema.params.iter().any(|p| p.category == cat),
                    "{game:?} lacks {cat:?}"
                );
            }
        }
    }

    #[test]
    fn at_least_thirty_parameters() {
        let total: usize = GameId::ALL.iter().map(|g| schema_for(*g).params.len()).sum();
        assert!(total >= 30, "{total}");
    }

    #[test]
    fn named_parameters_present() {
        let ridge = schema_for(GameId::Ridge);
        for name in ["min_num_sections", "max_num_sections", "air_control", "visibility"] {
            assert!(ridge.param(name).is_some(), "{name}");
        }
        let lanes = schema_for(GameId::Lanes);
        assert_eq!(
            lanes.param("min_road_lanes").unwrap().range_role,
            RangeRole::MinOf("max_road_lanes")
        );
        assert_eq!(
            lanes.param("max_road_lanes").unwrap().range_role,
            RangeRole::MaxOf("min_road_lanes")
        );
    }

    #[test]
    fn schemas_are_stable_across_calls() {
        assert!(std::ptr::eq(schema_for(GameId::Maze), schema_for(GameId::Maze)));
    }

    #[test]
    fn range_pairs_share_kind_and_bounds() {
        for game in GameId::ALL {
            let schema = schema_for(game);
            for pair in schema.range_pairs() {
                let (lo, hi) = (&schema.params[pair.lo], &schema.params[pair.hi]);
                assert_eq!(lo.kind, hi.kind);
                assert_eq!(lo.bounds, hi.bounds);
            }
        }
    }
}
