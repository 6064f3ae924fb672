mod common;

use common::{env_trajectory, random_actions, valid_spec};
use ctxgen::games::{self, GameParams};
use ctxgen::{EngineMode, Env, GameId};

#[test]
fn independent_envs_replay_identically() {
    for k in 0..100u64 {
        let game = GameId::ALL[(k % 3) as usize];
        let spec = valid_spec(game, k);
        let actions = random_actions(game, 200, k);
        let (a, ra) = env_trajectory(&mut Env::new(game, &spec, k * 31 + 7, 0).unwrap(), &actions);
        let (b, _) = env_trajectory(&mut Env::new(game, &spec, k * 31 + 7, 0).unwrap(), &actions);
        assert_eq!(a, b, "case {k}: {game:?} {spec:?}");
        assert!(ra.iter().all(|r| r.reward.is_finite()));
    }
}

#[test]
fn episodes_respect_the_step_limit_and_reward_bound() {
    for k in 0..60u64 {
        let game = GameId::ALL[(k % 3) as usize];
        let spec = valid_spec(game, 1000 + k);
        let mut env = Env::new(game, &spec, k, 0).unwrap();
        env.reset().unwrap();
        let max = env.params().unwrap().max_episode_steps();
        let (goal, death, step) = env.params().unwrap().reward_terms();
        let bound = goal.abs() + death.abs() + max as f64 * step.abs() + 1e-9;
        let mut sum = 0.0;
        for a in random_actions(game, 1500, k) {
            let r = env.step(a).unwrap();
            sum += r.reward;
            assert!(r.episode_length <= max);
            if r.done {
                assert!((r.episode_return - sum).abs() < 1e-9);
                assert!(r.episode_return.abs() <= bound, "{r:?} bound {bound}");
                sum = 0.0;
                env.reset().unwrap();
            }
        }
    }
}

#[test]
fn observation_side_follows_visibility() {
    for k in 0..30u64 {
        let game = GameId::ALL[(k % 3) as usize];
        let spec = valid_spec(game, 2000 + k);
        let mut env = Env::new(game, &spec, k, 0).unwrap();
        env.reset().unwrap();
        let v = env.visibility().unwrap();
        for a in random_actions(game, 50, k) {
            let obs = env.observation().unwrap();
            assert_eq!(obs.side, 2 * v + 1);
            assert_eq!(obs.tiles.len(), (2 * v + 1) * (2 * v + 1));
            if env.step(a).unwrap().done {
                env.reset().unwrap();
            }
        }
    }
}

#[test]
fn generator_is_a_function_of_its_stream() {
    for game in GameId::ALL {
        for seed in 0..20 {
            let mut a = Env::new(game, &valid_spec(game, seed), seed, 3).unwrap();
            let mut b = a.clone();
            a.reset().unwrap();
            b.reset().unwrap();
            assert_eq!(a.level().unwrap(), b.level().unwrap());
            assert_eq!(a.level().unwrap().digest(), b.level().unwrap().digest());
        }
    }
}

#[test]
fn static_baseline_matches_contextual_at_defaults() {
    for game in GameId::ALL {
        let resolved = ctxgen::schema_for(game).defaults();
        let actions = random_actions(game, 600, 5);
        let mut c = Env::from_resolved(resolved.clone(), 11, 2, EngineMode::Contextual);
        let mut s = Env::from_resolved(resolved, 11, 2, EngineMode::StaticBaseline);
        assert_eq!(env_trajectory(&mut c, &actions).0, env_trajectory(&mut s, &actions).0);
    }
}

#[test]
fn env_index_streams_are_independent_of_other_envs_resets() {
    let game = GameId::Maze;
    let spec = valid_spec(game, 3);
    let actions = random_actions(game, 300, 3);
    let (solo, _) = env_trajectory(&mut Env::new(game, &spec, 9, 0).unwrap(), &actions);

    let mut e0 = Env::new(game, &spec, 9, 0).unwrap();
    let mut e1 = Env::new(game, &spec, 9, 1).unwrap();
    e0.reset().unwrap();
    let mut interleaved = Vec::new();
    for (t, &a) in actions.iter().enumerate() {
        if t % 7 == 0 {
            e1.reset().unwrap();
        }
        let r = e0.step(a).unwrap();
        if r.done {
            e0.reset().unwrap();
        }
        common::push_step(&mut interleaved, e0.obs_tiles(), e0.obs_status(), r.reward, r.done);
    }
    assert_eq!(solo, interleaved);
}

#[test]
fn generated_levels_are_solvable_and_match_their_context() {
    for game in GameId::ALL {
        for k in 0..150u64 {
            let spec = valid_spec(game, 5000 + k);
            let mut env = Env::new(game, &spec, k, 0).unwrap();
            env.reset().unwrap();
            let ctx = env.context().unwrap();
            let level = env.level().unwrap();
            let params = GameParams::from_episode(&ctx);
            assert!(games::solvable(level, &params), "{game:?} {spec:?} seed {k}");
            let expected = match game {
                GameId::Ridge => games::Structure::Sections(ctx.realized("num_sections").unwrap().as_i64() as usize),
                GameId::Lanes => games::Structure::Lanes {
                    road: ctx.realized("road_lanes").unwrap().as_i64() as usize,
                    water: ctx.realized("water_lanes").unwrap().as_i64() as usize,
                },
                GameId::Maze => games::Structure::MazeDim(ctx.realized("maze_dim").unwrap().as_i64() as usize),
            };
            assert_eq!(games::structure(game, level), expected);
        }
    }
}
