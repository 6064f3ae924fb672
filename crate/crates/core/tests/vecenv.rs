mod common;

use std::sync::Arc;

use common::{action_matrix, env_trajectory, valid_spec, vec_trajectories};
use ctxgen::{ContextSpec, Env, ExecMode, GameId, VecEnv};

fn per_env_reference(game: GameId, specs: &[ContextSpec], seed: u64, actions: &[Vec<u8>]) -> Vec<Vec<u8>> {
    (0..actions[0].len())
        .map(|i| {
            let spec = &specs[if specs.len() == 1 { 0 } else { i }];
            let column: Vec<u8> = actions.iter().map(|a| a[i]).collect();
            env_trajectory(&mut Env::new(game, spec, seed, i).unwrap(), &column).0
        })
        .collect()
}

#[test]
fn batched_execution_equals_sequential_per_env_stepping() {
    for (k, n) in [2usize, 8, 64].into_iter().enumerate() {
        for game in GameId::ALL {
            let specs: Vec<ContextSpec> = (0..n).map(|i| valid_spec(game, (k * 1000 + i) as u64)).collect();
            let actions = action_matrix(game, n, 120, k as u64);
            let reference = per_env_reference(game, &specs, 17, &actions);
            for mode in [ExecMode::Sequential, ExecMode::Parallel] {
                let mut venv = VecEnv::new(game, n, &specs, 17).unwrap();
                venv.set_exec_mode(mode);
                assert_eq!(
                    vec_trajectories(&mut venv, &actions),
                    reference,
                    "{game:?} n={n} {mode:?}"
                );
            }
        }
    }
}

#[test]
fn set_context_to_never_touches_other_envs() {
    let game = GameId::Ridge;
    let n = 4;
    let actions = action_matrix(game, n, 400, 1);
    let mut plain = VecEnv::new(game, n, &[ContextSpec::new()], 5).unwrap();
    let baseline = vec_trajectories(&mut plain, &actions);

    let mut poked = VecEnv::new(game, n, &[ContextSpec::new()], 5).unwrap();
    let mut streams = vec![Vec::new(); n];
    for (t, a) in actions.iter().enumerate() {
        if t % 13 == 0 {
            let spec = valid_spec(game, t as u64);
            poked.set_context_to(2, &spec).unwrap();
        }
        let batch = poked.vec_step(a).unwrap().clone();
        let obs = poked.observations();
        for (i, stream) in streams.iter_mut().enumerate() {
            common::push_step(
                stream,
                obs.tiles_of(i),
                obs.status_of(i),
                batch.rewards[i],
                batch.dones[i],
            );
        }
    }
    for i in [0, 1, 3] {
        assert_eq!(streams[i], baseline[i], "env {i}");
    }
}

#[test]
fn episode_context_is_constant_and_matches_done_info() {
    for game in GameId::ALL {
        let n = 6;
        let mut venv = VecEnv::new(game, n, &[valid_spec(game, 1)], 3).unwrap();
        let actions = action_matrix(game, n, 800, 2);
        let mut live: Vec<Arc<_>> = (0..n).map(|i| venv.get_context(i).unwrap()).collect();
        let mut sides: Vec<usize> = (0..n).map(|i| venv.observations().shapes[i].side).collect();
        let mut finished = 0;
        for (t, a) in actions.iter().enumerate() {
            if t % 5 == 0 {
                venv.set_context_to(t % n, &valid_spec(game, t as u64)).unwrap();
            }
            let batch = venv.vec_step(a).unwrap().clone();
            for i in 0..n {
                let info = &batch.infos[i];
                if info.done() {
                    let ctx = info.finished_context.clone().unwrap();
                    assert_eq!(ctx, live[i]);
                    live[i] = venv.get_context(i).unwrap();
                    assert_eq!(live[i].episode_index, ctx.episode_index + 1);
                    sides[i] = venv.observations().shapes[i].side;
                    finished += 1;
                } else {
                    assert!(Arc::ptr_eq(&venv.get_context(i).unwrap(), &live[i]));
                    assert_eq!(venv.observations().shapes[i].side, sides[i]);
                }
            }
        }
        assert!(finished > 0);
    }
}

#[test]
fn broadcast_spec_gives_equal_resolved_contexts() {
    for game in GameId::ALL {
        let venv = VecEnv::new(game, 8, &[valid_spec(game, 9)], 0).unwrap();
        let first = venv.get_context(0).unwrap().resolved.clone();
        for i in 1..8 {
            assert_eq!(venv.get_context(i).unwrap().resolved, first);
        }
    }
}

#[test]
fn ragged_visibility_uses_per_env_shapes() {
    let specs = [
        ContextSpec::new().with("visibility", 2),
        ContextSpec::new().with("visibility", 5),
    ];
    let mut venv = VecEnv::new(GameId::Maze, 2, &specs, 0).unwrap();
    let obs = venv.vec_step(&[0, 0]).map(|_| ()).and(Ok(venv.observations())).unwrap();
    assert!(!obs.is_contiguous());
    assert_eq!(obs.tiles_of(0).len(), 25);
    assert_eq!(obs.tiles_of(1).len(), 121);
    let table = obs.shape_table_json();
    assert_eq!(table[1]["side"], 11);
}
