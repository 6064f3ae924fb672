//! Per-call cost of stepping with and without context tracking, and of
//! reading and assigning contexts.
//!
//! Each repetition times the four operations back to back, with the two
//! step modes interleaved in short chunks, so drift on the host hits all of
//! them alike. Reported figures are nanoseconds per env call: median and
//! minimum over repetitions.

use std::fmt::Write as _;
use std::hint::black_box;
use std::time::Instant;

use crate::context::ContextSpec;
use crate::engine::EngineMode;
use crate::error::{Error, Result};
use crate::games::{Action, GameId};
use crate::rng::RngStream;
use crate::vecenv::{ExecMode, VecEnv};

pub const MIN_STEPS_PER_ENV: usize = 1000;
pub const MIN_REPETITIONS: usize = 3;

pub const OPERATIONS: [&str; 4] = ["step_static", "step_contextual", "get_context", "set_context_to"];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub game: GameId,
    pub num_envs: usize,
    pub steps_per_env: usize,
    pub warmup_steps: usize,
    pub repetitions: usize,
    /// Spec assigned in the `set_context_to` measurement; `None` uses a
    /// small fixed-structure spec for the game.
    pub set_spec: Option<ContextSpec>,
    pub exec: ExecMode,
    pub seed: u64,
}

impl BenchConfig {
    pub fn new(game: GameId) -> Self {
        Self {
            game,
            num_envs: 64,
            steps_per_env: 10_000,
            warmup_steps: 500,
            repetitions: 5,
            set_spec: None,
            exec: ExecMode::default(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_envs == 0 {
            return Err(Error::NoEnvs);
        }
        if self.steps_per_env < MIN_STEPS_PER_ENV {
            return Err(Error::Config(format!(
                "steps_per_env must be at least {MIN_STEPS_PER_ENV}, got {}",
                self.steps_per_env
            )));
        }
        if self.repetitions < MIN_REPETITIONS {
            return Err(Error::Config(format!(
                "repetitions must be at least {MIN_REPETITIONS}, got {}",
                self.repetitions
            )));
        }
        Ok(())
    }
}

/// The spec used for `set_context_to` when none is configured.
pub fn default_set_spec(game: GameId) -> ContextSpec {
    match game {
        GameId::Ridge => ContextSpec::new()
            .with("min_num_sections", 1)
            .with("max_num_sections", 1),
        GameId::Lanes => ContextSpec::new().with("min_road_lanes", 1).with("max_road_lanes", 1),
        GameId::Maze => ContextSpec::new().with("maze_dim_min", 5).with("maze_dim_max", 5),
    }
}

/// Raw per-call timings, one entry per repetition for each operation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Samples {
    pub step_static: Vec<f64>,
    pub step_contextual: Vec<f64>,
    pub get_context: Vec<f64>,
    pub set_context_to: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpStats {
    pub operation: String,
    pub median_ns: f64,
    pub min_ns: f64,
    pub ratio_vs_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub game: GameId,
    pub num_envs: usize,
    pub steps_per_env: usize,
    pub repetitions: usize,
    pub exec: ExecMode,
    pub host: String,
    /// In [`OPERATIONS`] order.
    pub ops: Vec<OpStats>,
}

impl BenchReport {
    /// Median contextual step time over median static step time.
    pub fn step_overhead_ratio(&self) -> f64 {
        self.ops[1].ratio_vs_step
    }

    /// Median `get_context` time over median contextual step time.
    pub fn get_ratio(&self) -> f64 {
        self.ops[2].ratio_vs_step
    }

    /// Median `set_context_to` time over median contextual step time.
    pub fn set_ratio(&self) -> f64 {
        self.ops[3].ratio_vs_step
    }

    pub fn op(&self, name: &str) -> Option<&OpStats> {
        self.ops.iter().find(|o| o.operation == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Text,
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn min(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn host_description() -> String {
    let cpus = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    format!("{}-{} cpus={}", std::env::consts::OS, std::env::consts::ARCH, cpus)
}

/// Folds raw samples into a report. Pure, so identical samples give
/// identical reports.
pub fn summarize(config: &BenchConfig, samples: &Samples, host: String) -> BenchReport {
    let step_static = median(&samples.step_static);
    let step_ctx = median(&samples.step_contextual);
    let rows = [
        (&samples.step_static, 1.0),
        (&samples.step_contextual, step_ctx / step_static),
        (&samples.get_context, median(&samples.get_context) / step_ctx),
        (&samples.set_context_to, median(&samples.set_context_to) / step_ctx),
    ];
    let ops = OPERATIONS
        .iter()
        .zip(rows)
        .map(|(name, (xs, ratio))| OpStats {
            operation: name.to_string(),
            median_ns: median(xs),
            min_ns: min(xs),
            ratio_vs_step: ratio,
        })
        .collect();
    BenchReport {
        game: config.game,
        num_envs: config.num_envs,
        steps_per_env: config.steps_per_env,
        repetitions: config.repetitions,
        exec: config.exec,
        host,
        ops,
    }
}

fn action_table(game: GameId, len: usize, seed: u64) -> Vec<Action> {
    let mut s = RngStream::derive(seed, u64::MAX, 0);
    let k = game.num_actions() as usize;
    (0..len).map(|_| s.index(k) as Action).collect()
}

/// Runs `steps` batched steps and returns nanoseconds per env step.
fn time_steps(venv: &mut VecEnv, actions: &[Action], steps: usize) -> Result<f64> {
    let n = venv.num_envs();
    let start = Instant::now();
    for t in 0..steps {
        let off = (t * n) % (actions.len() - n + 1);
        black_box(venv.vec_step(&actions[off..off + n])?);
    }
    Ok(start.elapsed().as_nanos() as f64 / (steps * n) as f64)
}

/// Measures all four operations. Auto-resets are part of the step timings.
pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    let samples = collect_samples(config)?;
    Ok(summarize(config, &samples, host_description()))
}

pub fn collect_samples(config: &BenchConfig) -> Result<Samples> {
    config.validate()?;
    let n = config.num_envs;
    let game = config.game;
    let defaults = [ContextSpec::new()];
    let mut stat = VecEnv::with_mode(game, n, &defaults, config.seed, EngineMode::StaticBaseline)?;
    let mut ctx = VecEnv::with_mode(game, n, &defaults, config.seed, EngineMode::Contextual)?;
    stat.set_exec_mode(config.exec);
    ctx.set_exec_mode(config.exec);
    let set_spec = config.set_spec.clone().unwrap_or_else(|| default_set_spec(game));
    let mut setter = VecEnv::new(game, n, std::slice::from_ref(&set_spec), config.seed)?;
    setter.set_exec_mode(config.exec);

    let actions = action_table(game, n * 4096, config.seed);
    if config.warmup_steps > 0 {
        time_steps(&mut stat, &actions, config.warmup_steps)?;
        time_steps(&mut ctx, &actions, config.warmup_steps)?;
    }
    let ctx_calls = config.steps_per_env;
    let set_batches = (config.steps_per_env / 10).max(10);
    let chunk = (config.steps_per_env / 40).max(1);

    let mut s = Samples::default();
    for _ in 0..config.repetitions {
        // Alternate short static and contextual chunks (ABBA order) so host
        // drift within a repetition lands on both modes equally.
        let (mut t_stat, mut t_ctx) = (0.0, 0.0);
        let mut left = config.steps_per_env;
        let mut flip = false;
        while left > 0 {
            let k = chunk.min(left);
            if flip {
                t_ctx += time_steps(&mut ctx, &actions, k)? * k as f64;
                t_stat += time_steps(&mut stat, &actions, k)? * k as f64;
            } else {
                t_stat += time_steps(&mut stat, &actions, k)? * k as f64;
                t_ctx += time_steps(&mut ctx, &actions, k)? * k as f64;
            }
            flip = !flip;
            left -= k;
        }
        let steps = config.steps_per_env as f64;
        s.step_static.push(t_stat / steps);
        s.step_contextual.push(t_ctx / steps);

        let start = Instant::now();
        for _ in 0..ctx_calls {
            for i in 0..n {
                black_box(ctx.get_context(i)?);
            }
        }
        s.get_context
            .push(start.elapsed().as_nanos() as f64 / (ctx_calls * n) as f64);

        let mut elapsed = 0u128;
        for _ in 0..set_batches {
            let start = Instant::now();
            for i in 0..n {
                setter.set_context_to(i, black_box(&set_spec))?;
            }
            elapsed += start.elapsed().as_nanos();
            setter.vec_reset()?;
        }
        s.set_context_to.push(elapsed as f64 / (set_batches * n) as f64);
    }
    Ok(s)
}

pub fn emit_report(report: &BenchReport, format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            out.push_str("operation,median_ns,min_ns,ratio_vs_step\n");
            for o in &report.ops {
                let _ = writeln!(out, "{},{},{},{}", o.operation, o.median_ns, o.min_ns, o.ratio_vs_step);
            }
        }
        ReportFormat::Text => {
            let _ = writeln!(
                out,
                "game={} envs={} steps_per_env={} reps={} exec={:?} host={}",
                report.game.as_str(),
                report.num_envs,
                report.steps_per_env,
                report.repetitions,
                report.exec,
                report.host
            );
            let _ = writeln!(
                out,
                "{:<18} {:>12} {:>12} {:>10}",
                "operation", "median_ns", "min_ns", "ratio"
            );
            for o in &report.ops {
                let _ = writeln!(
                    out,
                    "{:<18} {:>12.1} {:>12.1} {:>9.1}%",
                    o.operation,
                    o.median_ns,
                    o.min_ns,
                    o.ratio_vs_step * 100.0
                );
            }
        }
    }
    out
}

/// Parses the CSV form of a report back into rows.
pub fn parse_csv(text: &str) -> Result<Vec<OpStats>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::Config(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["operation", "median_ns", "min_ns", "ratio_vs_step"] {
        return Err(Error::Config(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Config(e.to_string()))?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| Error::Config(format!("bad number {:?}", &rec[i])))
        };
        rows.push(OpStats {
            operation: rec[0].to_string(),
            median_ns: num(1)?,
            min_ns: num(2)?,
            ratio_vs_step: num(3)?,
        });
    }
    Ok(rows)
}
