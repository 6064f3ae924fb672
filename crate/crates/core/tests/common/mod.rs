#![allow(dead_code)]

use ctxgen::{schema_for, Action, ContextSpec, Env, GameId, RngStream, StepResult, VecEnv};

pub fn random_actions(game: GameId, len: usize, seed: u64) -> Vec<Action> {
    let mut s = RngStream::derive(seed, 1 << 40, 0);
    (0..len)
        .map(|_| s.index(game.num_actions() as usize) as Action)
        .collect()
}

pub fn valid_spec(game: GameId, seed: u64) -> ContextSpec {
    let mut s = RngStream::derive(seed, 1 << 41, 0);
    schema_for(game)
        .random_valid_spec(&mut s, 0.5, 10_000)
        .expect("no valid spec found")
}

pub fn push_step(bytes: &mut Vec<u8>, tiles: &[u8], status: &[f32], reward: f64, done: bool) {
    bytes.extend_from_slice(tiles);
    for s in status {
        bytes.extend_from_slice(&s.to_le_bytes());
    }
    bytes.extend_from_slice(&reward.to_le_bytes());
    bytes.push(done as u8);
}

/// Serialized observation/reward/done stream of one env driven with
/// `actions`, resetting after every done step.
pub fn env_trajectory(env: &mut Env, actions: &[Action]) -> (Vec<u8>, Vec<StepResult>) {
    let mut bytes = Vec::new();
    let mut results = Vec::new();
    env.reset().unwrap();
    for &a in actions {
        let r = env.step(a).unwrap();
        if r.done {
            env.reset().unwrap();
        }
        push_step(&mut bytes, env.obs_tiles(), env.obs_status(), r.reward, r.done);
        results.push(r);
    }
    (bytes, results)
}

/// Per-env byte streams of a batched run; `actions[t][i]` is env i's action at step t.
pub fn vec_trajectories(venv: &mut VecEnv, actions: &[Vec<Action>]) -> Vec<Vec<u8>> {
    let n = venv.num_envs();
    let mut out = vec![Vec::new(); n];
    for a in actions {
        let batch = venv.vec_step(a).unwrap().clone();
        let obs = venv.observations();
        for (i, stream) in out.iter_mut().enumerate() {
            push_step(
                stream,
                obs.tiles_of(i),
                obs.status_of(i),
                batch.rewards[i],
                batch.dones[i],
            );
        }
    }
    out
}

pub fn action_matrix(game: GameId, n: usize, steps: usize, seed: u64) -> Vec<Vec<Action>> {
    let flat = random_actions(game, n * steps, seed);
    flat.chunks(n).map(|c| c.to_vec()).collect()
}
