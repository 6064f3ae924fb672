//! The `ctxgen` command line. [`run`] takes the argument list and output
//! streams and returns the process exit code: 0 on success, 1 for domain
//! errors (invalid contexts, failed generation, unreadable files), 2 for
//! usage errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use ctxgen::bench::{run_bench, BenchConfig, ReportFormat};
use ctxgen::context::from_json_object;
use ctxgen::curriculum::{write_trace_csv, ContextSampler, CurriculumDriver, TraceRecord};
use ctxgen::{parse_context, schema_for, Action, ContextSpec, Env, ExecMode, GameId, RngStream};

#[derive(Debug, Parser)]
#[command(
    name = "ctxgen",
    version,
    about = "Procedurally generated grid games with explicit generation contexts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print one game id per line.
    ListGames,
    /// Print a game's parameter table.
    Schema {
        game: GameId,
        /// Emit a JSON array of parameter definitions.
        #[arg(long)]
        json: bool,
    },
    /// Check a context file against a game's schema.
    Validate { game: GameId, context_file: PathBuf },
    /// Run one seeded env and print episode summaries.
    Rollout {
        game: GameId,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        steps: u64,
        #[arg(long)]
        context: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Policy::Random)]
        policy: Policy,
        #[arg(long, value_enum)]
        render: Option<Render>,
        /// Directory for rendered frames (required for ppm).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write finished episodes as a trace CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Drive a batch of envs through a context schedule and write the trace.
    CurriculumDemo {
        #[arg(long, default_value = "maze")]
        game: GameId,
        /// JSON array of {"after_episodes": n, "context": {...}} objects.
        #[arg(long)]
        stages: PathBuf,
        #[arg(long, default_value_t = 5000)]
        steps: u64,
        #[arg(long, default_value_t = 8)]
        envs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure step, get_context, and set_context_to costs.
    Bench {
        #[arg(long)]
        game: GameId,
        #[arg(long, default_value_t = 64)]
        envs: usize,
        #[arg(long, default_value_t = 10_000)]
        steps_per_env: usize,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 500)]
        warmup: usize,
        #[arg(long, value_enum)]
        exec: Option<Exec>,
        /// Emit CSV instead of a text table.
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Policy {
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Render {
    Ascii,
    Ppm,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Exec {
    Sequential,
    Parallel,
}

/// Failure of a subcommand, mapped to an exit code.
enum Failure {
    Usage(String),
    Domain(Vec<String>),
}

impl From<ctxgen::Error> for Failure {
    fn from(e: ctxgen::Error) -> Self {
        match e {
            ctxgen::Error::InvalidContext { errors, .. } => {
                Failure::Domain(errors.iter().map(|e| e.to_string()).collect())
            }
            other => Failure::Domain(vec![other.to_string()]),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(vec![e.to_string()])
    }
}

type Outcome = Result<(), Failure>;

pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match cli.command {
        Command::ListGames => list_games(out),
        Command::Schema { game, json } => schema(game, json, out),
        Command::Validate { game, context_file } => validate(game, &context_file, out),
        Command::Rollout {
            game,
            seed,
            steps,
            context,
            policy: Policy::Random,
            render,
            out: dir,
            trace,
        } => rollout(
            game,
            seed,
            steps,
            context.as_deref(),
            render,
            dir.as_deref(),
            trace.as_deref(),
            out,
        ),
        Command::CurriculumDemo {
            game,
            stages,
            steps,
            envs,
            seed,
            out: path,
        } => curriculum_demo(game, &stages, steps, envs, seed, &path, out),
        Command::Bench {
            game,
            envs,
            steps_per_env,
            reps,
            warmup,
            exec,
            csv,
        } => {
            let mut config = BenchConfig {
                num_envs: envs,
                steps_per_env,
                repetitions: reps,
                warmup_steps: warmup,
                ..BenchConfig::new(game)
            };
            if let Some(e) = exec {
                config.exec = match e {
                    Exec::Sequential => ExecMode::Sequential,
                    Exec::Parallel => ExecMode::Parallel,
                };
            }
            bench(&config, csv, out)
        }
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Domain(lines)) => {
            for l in lines {
                let _ = writeln!(err, "error: {l}");
            }
            1
        }
    }
}

fn list_games(out: &mut dyn Write) -> Outcome {
    for g in GameId::ALL {
        writeln!(out, "{}", g.as_str())?;
    }
    Ok(())
}

fn schema(game: GameId, json: bool, out: &mut dyn Write) -> Outcome {
    let schema = schema_for(game);
    if json {
        let defs: Vec<Value> = schema.params.iter().map(|p| p.to_json()).collect();
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&Value::Array(defs)).expect("schema serializes")
        )?;
        return Ok(());
    }
    writeln!(
        out,
        "{:<24} {:<6} {:>9} {:<22} category",
        "name", "kind", "default", "bounds"
    )?;
    for p in &schema.params {
        writeln!(
            out,
            "{:<24} {:<6} {:>9} {:<22} {}",
            p.name,
            p.kind.as_str(),
            p.default.to_string(),
            p.bounds_text(),
            p.category.as_str()
        )?;
    }
    Ok(())
}

fn read_context(path: &Path) -> Result<ContextSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Domain(vec![format!("{}: {e}", path.display())]))?;
    parse_context(&text).map_err(|e| Failure::Domain(vec![format!("{}: {e}", path.display())]))
}

fn validate(game: GameId, path: &Path, out: &mut dyn Write) -> Outcome {
    let spec = read_context(path)?;
    schema_for(game)
        .validate(&spec)
        .map_err(|errors| Failure::Domain(errors.iter().map(|e| e.to_string()).collect()))?;
    writeln!(out, "ok")?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn rollout(
    game: GameId,
    seed: u64,
    steps: u64,
    context: Option<&Path>,
    render: Option<Render>,
    dir: Option<&Path>,
    trace_path: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    if render == Some(Render::Ppm) && dir.is_none() {
        return Err(Failure::Usage("--render ppm requires --out DIR".into()));
    }
    if render.is_none() && dir.is_some() {
        return Err(Failure::Usage("--out requires --render".into()));
    }
    let spec = match context {
        Some(p) => read_context(p)?,
        None => ContextSpec::new(),
    };
    if let Some(d) = dir {
        fs::create_dir_all(d)?;
    }
    let mut env = Env::new(game, &spec, seed, 0)?;
    env.reset()?;
    let mut policy = RngStream::derive(seed, u64::MAX, 0);
    let mut trace: Vec<TraceRecord> = Vec::new();
    for t in 0..steps {
        match render {
            Some(Render::Ascii) => {
                let frame = env.render_ascii()?;
                match dir {
                    Some(d) => fs::write(d.join(format!("frame_{t:06}.txt")), frame)?,
                    None => write!(out, "step {t}\n{frame}")?,
                }
            }
            Some(Render::Ppm) => fs::write(dir.unwrap().join(format!("frame_{t:06}.ppm")), env.render_ppm(4)?)?,
            None => {}
        }
        let action = policy.index(game.num_actions() as usize) as Action;
        let r = env.step(action)?;
        if r.done {
            let ctx = env.context()?;
            let realized: Vec<String> = ctx.realized.iter().map(|v| format!("{}={}", v.name, v.value)).collect();
            writeln!(
                out,
                "episode {} cause={} return={} length={} {}",
                ctx.episode_index,
                r.cause.as_str(),
                r.episode_return,
                r.episode_length,
                realized.join(" ")
            )?;
            trace.push(TraceRecord {
                env_index: 0,
                episode_index: ctx.episode_index,
                termination_cause: r.cause,
                episode_return: r.episode_return,
                episode_length: r.episode_length,
                context: ctx,
            });
            env.reset()?;
        }
    }
    writeln!(
        out,
        "steps={steps} episodes_finished={} partial_length={}",
        trace.len(),
        env.episode_length()
    )?;
    if let Some(p) = trace_path {
        write_trace_csv(game, &trace, fs::File::create(p)?)?;
    }
    Ok(())
}

/// Parses a schedule file: a JSON array of `{after_episodes, context}`.
pub fn parse_stages(text: &str) -> Result<Vec<(u64, ContextSpec)>, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| format!("stages: {e}"))?;
    let Value::Array(items) = v else {
        return Err("stages: expected a JSON array".into());
    };
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let after = item
                .get("after_episodes")
                .and_then(Value::as_u64)
                .ok_or_else(|| format!("stages[{i}].after_episodes: expected a non-negative integer"))?;
            let ctx = item
                .get("context")
                .and_then(Value::as_object)
                .ok_or_else(|| format!("stages[{i}].context: expected an object"))?;
            let spec = from_json_object(ctx).map_err(|e| format!("stages[{i}].context: {e}"))?;
            Ok((after, spec))
        })
        .collect()
}

fn curriculum_demo(
    game: GameId,
    stages: &Path,
    steps: u64,
    envs: usize,
    seed: u64,
    path: &Path,
    out: &mut dyn Write,
) -> Outcome {
    let text = fs::read_to_string(stages).map_err(|e| Failure::Domain(vec![format!("{}: {e}", stages.display())]))?;
    let schedule = parse_stages(&text).map_err(|e| Failure::Domain(vec![e]))?;
    let sampler = ContextSampler::Schedule(schedule.clone());
    let mut driver = CurriculumDriver::new(game, envs, sampler, seed)?;
    let mut policy = RngStream::derive(seed, u64::MAX, 0);
    let k = game.num_actions() as usize;
    driver.drive(|_| policy.index(k) as Action, steps)?;
    write_trace_csv(game, driver.trace(), fs::File::create(path)?)?;
    for (s, (after, _)) in schedule.iter().enumerate() {
        let next = schedule.get(s + 1).map_or(u64::MAX, |n| n.0);
        let eps: Vec<&TraceRecord> = driver
            .trace()
            .iter()
            .filter(|r| (*after..next).contains(&r.episode_index))
            .collect();
        let goals = eps.iter().filter(|r| r.termination_cause.as_str() == "goal").count();
        writeln!(
            out,
            "stage {s} (from episode {after}): episodes={} goals={goals}",
            eps.len()
        )?;
    }
    writeln!(out, "trace: {} episodes -> {}", driver.trace().len(), path.display())?;
    Ok(())
}

fn bench(config: &BenchConfig, csv: bool, out: &mut dyn Write) -> Outcome {
    config.validate()?;
    let report = run_bench(config)?;
    let format = if csv { ReportFormat::Csv } else { ReportFormat::Text };
    write!(out, "{}", ctxgen::bench::emit_report(&report, format))?;
    Ok(())
}
