use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use relsep_core::cayley::{make_oracle, CayleyBall, OracleKind};
use relsep_core::cover::Cover;
use relsep_core::pipeline::{error_exit_code, run_pipeline, PipelineConfig, PresentationSource};
use relsep_core::presentation::{halve_with, HalvedPresentation, Presentation};
use relsep_core::relhom::HalfGroup;
use relsep_core::sampler::{sample, Family, ModelSpec};
use relsep_core::smallcancel::{asphericity_checks, check_metric, max_piece_length, parse_lambda};
use relsep_core::stats::{concentration_trial, k_angular_frequency_sweep, sc_frequency_trial};
use relsep_core::Error;

#[derive(Parser)]
#[command(name = "relsep", version, about = "Relator-separated presentations, covers, walls and cube complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random presentation.
    Sample(SampleArgs),
    /// Split every relator into two halves.
    Halve {
        input: PathBuf,
        /// Comma-separated split positions, one per relator.
        #[arg(long, value_delimiter = ',')]
        splits: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Max piece length and the C'(λ) check.
    CheckSc {
        input: PathBuf,
        #[arg(long, default_value = "1/6")]
        lambda: String,
        /// Check the half presentation of a halved file.
        #[arg(long)]
        halves: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Proper powers, conjugate coincidences and product collisions.
    AsphericalChecks {
        input: PathBuf,
        #[arg(long)]
        halves: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cayley ball of the half group.
    Ball {
        input: PathBuf,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value = "dehn")]
        oracle: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Materialized cover ball over the half-group ball.
    Cover {
        input: PathBuf,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        cover_radius: usize,
        #[arg(long, default_value = "dehn")]
        oracle: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cutsets and walls.
    Walls(StageArgs),
    /// Dual cube complex.
    Cubulate(StageArgs),
    /// Median, dimension, distance and growth checks.
    Verify(StageArgs),
    /// Monte Carlo suites.
    Stats(StatsArgs),
    /// Full run from a JSON config.
    Pipeline {
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, alias = "model", default_value = "density")]
    family: String,
    #[arg(long)]
    n: usize,
    /// Relator length (`k` for the angular families).
    #[arg(long, alias = "len", alias = "k")]
    l: usize,
    #[arg(long)]
    d: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StageArgs {
    input: PathBuf,
    #[arg(long)]
    ball_radius: usize,
    #[arg(long)]
    inner_radius: usize,
    #[arg(long)]
    margin: Option<usize>,
    #[arg(long, default_value = "dehn")]
    oracle: String,
    #[arg(long, default_value_t = 6)]
    wall_cap: usize,
    #[arg(long, default_value_t = 4)]
    max_dim: usize,
    #[arg(long, default_value_t = 3)]
    growth_n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Concentration,
    SmallCancellation,
    KAngular,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "theta")]
    family: String,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    l: usize,
    #[arg(long, default_value_t = 0.2)]
    d: f64,
    /// Chebyshev multiplier.
    #[arg(long, default_value_t = 3.0)]
    c: f64,
    #[arg(long, default_value = "1/6")]
    lambda: String,
    /// Generator counts of the angular sweep.
    #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
    ns: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn env_seed(seed: u64) -> Result<u64> {
    match std::env::var("RELSEP_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| Error::Config(format!("RELSEP_SEED={s:?} is not a u64")).into()),
        Err(_) => Ok(seed),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => print_stdout(text),
    }
}

/// A closed pipe on stdout is not an error.
fn print_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn oracle_kind(s: &str) -> Result<OracleKind> {
    Ok(s.parse()?)
}

fn lambda(s: &str) -> Result<Rational64> {
    parse_lambda(s).map_err(|e| Error::Config(e.to_string()).into())
}

fn load_target(input: &Path, halves: bool) -> Result<Presentation> {
    if halves {
        Ok(HalvedPresentation::load(input)?.half_presentation())
    } else {
        Ok(Presentation::load(input)?)
    }
}

fn stage_config(a: &StageArgs) -> Result<PipelineConfig> {
    Ok(PipelineConfig {
        model: None,
        presentation: Some(PresentationSource::Path(a.input.clone())),
        ball_radius: a.ball_radius,
        inner_radius: a.inner_radius,
        margin: a.margin,
        oracle: oracle_kind(&a.oracle)?,
        wall_cap: a.wall_cap,
        max_dim: a.max_dim,
        vertex_budget: relsep_core::cubecomplex::DEFAULT_VERTEX_BUDGET,
        growth_n: a.growth_n,
        out_dir: None,
        seed: None,
    })
}

/// Runs the pipeline and prints one artifact; the exit code follows the
/// pipeline's status.
fn stage(a: &StageArgs, artifact: &str) -> Result<u8> {
    let out = run_pipeline(&stage_config(a)?)?;
    for w in &out.report.warnings {
        eprintln!("warning: {w}");
    }
    for f in &out.report.falsifications {
        eprintln!("falsified: {f}");
    }
    match out.artifacts.get(artifact) {
        Some(body) => emit(body, a.out.as_deref())?,
        None => eprintln!("stopped at stage {:?} before {artifact}", out.report.stage),
    }
    Ok(out.exit_code() as u8)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Sample(a) => {
            let family: Family = a.family.parse()?;
            let spec = ModelSpec::new(family, a.n, a.l, a.d, env_seed(a.seed)?);
            spec.validate().map_err(|e| Error::Config(e.to_string()))?;
            emit(&pretty(&sample(&spec)?), a.out.as_deref())?;
        }
        Command::Halve { input, splits, out } => {
            let p = Presentation::load(&input)?;
            let splits = splits.unwrap_or_else(|| p.relators.iter().map(|r| r.len() / 2).collect());
            emit(&halve_with(&p, splits)?.to_json(), out.as_deref())?;
        }
        Command::CheckSc { input, lambda: l, halves, out } => {
            let p = load_target(&input, halves)?;
            let lam = lambda(&l)?;
            let report = max_piece_length(&p);
            let ok = check_metric(&p, lam);
            emit(
                &pretty(&serde_json::json!({ "lambda": l, "satisfied": ok, "pieces": report })),
                out.as_deref(),
            )?;
            if !ok {
                return Ok(3);
            }
        }
        Command::AsphericalChecks { input, halves, out } => {
            let p = load_target(&input, halves)?;
            let v = asphericity_checks(&p);
            emit(&pretty(&serde_json::json!({ "passed": v.is_empty(), "violations": v })), out.as_deref())?;
            if !v.is_empty() {
                return Ok(3);
            }
        }
        Command::Ball { input, radius, oracle, format, out } => {
            let hp = HalvedPresentation::load(&input)?;
            let o = make_oracle(oracle_kind(&oracle)?, &hp.half_presentation())?;
            let ball = CayleyBall::build(o.as_ref(), radius)?;
            let body = match format {
                Format::Json => ball.to_json(),
                Format::Dot => ball.to_dot(),
            };
            emit(&body, out.as_deref())?;
        }
        Command::Cover { input, radius, cover_radius, oracle, format, out } => {
            let hp = HalvedPresentation::load(&input)?;
            let o = make_oracle(oracle_kind(&oracle)?, &hp.half_presentation())?;
            let ball = Arc::new(CayleyBall::build(o.as_ref(), radius)?);
            let k = HalfGroup::new(&hp, o.as_ref(), Some(&ball));
            let cover = Cover::build(ball.clone(), &k, cover_radius)?;
            let body = match format {
                Format::Json => cover.to_json(),
                Format::Dot => cover.to_dot(),
            };
            emit(&body, out.as_deref())?;
        }
        Command::Walls(a) => return stage(&a, "walls.json"),
        Command::Cubulate(a) => return stage(&a, "complex.json"),
        Command::Verify(a) => return stage(&a, "report.json"),
        Command::Stats(a) => {
            let seed = env_seed(a.seed)?;
            let family: Family = a.family.parse()?;
            let spec = ModelSpec::new(family, a.n, a.l, a.d, seed);
            let body = match a.suite {
                Suite::Concentration => {
                    let r = concentration_trial(&spec, a.c, a.trials, seed)?;
                    let ok = r.all_within_bound();
                    emit(&pretty(&r), a.out.as_deref())?;
                    return Ok(if ok { 0 } else { 4 });
                }
                Suite::SmallCancellation => pretty(&sc_frequency_trial(&spec, lambda(&a.lambda)?, a.trials, seed)?),
                Suite::KAngular => pretty(&k_angular_frequency_sweep(a.l, a.d, &a.ns, lambda(&a.lambda)?, a.trials, seed)?),
            };
            emit(&body, a.out.as_deref())?;
        }
        Command::Pipeline { config, out } => {
            let mut cfg = PipelineConfig::load(&config)?;
            if let Ok(s) = std::env::var("RELSEP_SEED") {
                cfg.seed = Some(s.trim().parse().map_err(|_| Error::Config(format!("RELSEP_SEED={s:?} is not a u64")))?);
            }
            if out.is_some() {
                cfg.out_dir = out;
            }
            let result = run_pipeline(&cfg)?;
            for w in &result.report.warnings {
                eprintln!("warning: {w}");
            }
            for f in &result.report.falsifications {
                eprintln!("falsified: {f}");
            }
            match &cfg.out_dir {
                Some(dir) => result.write(dir)?,
                None => print_stdout(&result.artifacts["report.json"])?,
            }
            eprintln!("status: {:?} at stage {:?}", result.report.status, result.report.stage);
            return Ok(result.exit_code() as u8);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<Error>() {
                Some(err) => error_exit_code(err),
                None => 1,
            };
            ExitCode::from(code as u8)
        }
    }
}
