use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use ctxgen::{ContextSpec, EngineMode, ExecMode, GameId, RngStream, VecEnv};

const NUM_ENVS: usize = 64;

fn actions(game: GameId, steps: usize) -> Vec<Vec<u8>> {
    let mut s = RngStream::derive(7, 0, 0);
    let k = game.num_actions() as usize;
    (0..steps)
        .map(|_| (0..NUM_ENVS).map(|_| s.index(k) as u8).collect())
        .collect()
}

fn vec_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("vec_step");
    group.throughput(Throughput::Elements(NUM_ENVS as u64));
    for game in GameId::ALL {
        let table = actions(game, 256);
        for (exec, exec_name) in [(ExecMode::Sequential, "sequential"), (ExecMode::Parallel, "parallel")] {
            for (mode, mode_name) in [
                (EngineMode::StaticBaseline, "static"),
                (EngineMode::Contextual, "contextual"),
            ] {
                let mut venv = VecEnv::with_mode(game, NUM_ENVS, &[ContextSpec::new()], 0, mode).unwrap();
                venv.set_exec_mode(exec);
                let id = BenchmarkId::new(format!("{}/{mode_name}", game.as_str()), exec_name);
                let mut t = 0;
                group.bench_function(id, |b| {
                    b.iter(|| {
                        t = (t + 1) % table.len();
                        venv.vec_step(&table[t]).unwrap().rewards.len()
                    })
                });
            }
        }
    }
    group.finish();
}

criterion_group!(benches, vec_step);
criterion_main!(benches);
