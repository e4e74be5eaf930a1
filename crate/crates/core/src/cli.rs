//! The `tpwa` command line: `fit`, `eval` and `gen`.
//!
//! Exit codes: 0 success, 1 bad input or flags, 2 infeasible instance or
//! out-of-domain query, 3 solver failure, 4 oracle budget exceeded.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::datagen::{gen_arctan_1d, gen_grid_pwa_with, gen_uid_grid, DEFAULT_POINTS_PER_AXIS};
use crate::error::TpwaError;
use crate::io;
use crate::model::{evaluate_model, FitConfig, OutOfDomainPolicy, DEFAULT_TOL};
use crate::oracle::naive_optimal_with;
use crate::oracle::OracleConfig;
use crate::template::TemplateSpec;
use crate::topdown::{fit_maximal, fit_optimal_with_progress};

#[derive(Parser, Debug)]
#[command(
    name = "tpwa",
    version,
    about = "Template-based piecewise affine regression"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a minimum-piece model to a data set.
    Fit(FitArgs),
    /// Evaluate a model at query points.
    Eval(EvalArgs),
    /// Write a synthetic data set.
    Gen {
        #[command(subcommand)]
        generator: Generator,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Mode {
    Optimal,
    Maximal,
    Naive,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Oob {
    Error,
    Nearest,
}

impl From<Oob> for OutOfDomainPolicy {
    fn from(o: Oob) -> Self {
        match o {
            Oob::Error => OutOfDomainPolicy::Error,
            Oob::Nearest => OutOfDomainPolicy::Nearest,
        }
    }
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    /// Model destination; stdout when omitted.
    #[arg(long, visible_alias = "out")]
    output: Option<PathBuf>,
    #[arg(long)]
    epsilon: f64,
    /// `rect`, `octagon` or `file:PATH`.
    #[arg(long, default_value = "rect")]
    template: String,
    #[arg(long, value_enum, default_value = "optimal")]
    mode: Mode,
    #[arg(long, default_value_t = 1)]
    cover_period: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Policy for plot points outside every region.
    #[arg(long, value_enum, default_value = "nearest")]
    oob: Oob,
    /// CSV of data points labeled with the piece that evaluates them.
    #[arg(long)]
    emit_plot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// JSON array of input vectors, or a data set file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "nearest")]
    oob: Oob,
}

#[derive(Subcommand, Debug)]
enum Generator {
    /// `atan(10 x) e^{-|x|}` on an even grid over [-1, 1].
    Arctan {
        #[arg(long, default_value_t = 11)]
        k: usize,
        #[arg(long, visible_alias = "output")]
        out: Option<PathBuf>,
    },
    /// Insulin-dependent glucose utilization on an n × n grid.
    Uid {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, num_args = 2, default_values_t = [0.0, 200.0], allow_negative_numbers = true)]
        x1_range: Vec<f64>,
        #[arg(long, num_args = 2, default_values_t = [0.0, 400.0], allow_negative_numbers = true)]
        x2_range: Vec<f64>,
        #[arg(long, visible_alias = "output")]
        out: Option<PathBuf>,
    },
    /// Random piecewise affine function on a box grid over [0, 1]^d.
    Gridpwa {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        cells: usize,
        #[arg(long, default_value_t = DEFAULT_POINTS_PER_AXIS)]
        points_per_axis: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, visible_alias = "output")]
        out: Option<PathBuf>,
        /// Also write the ground-truth model here.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
}

/// Failure of a command: a library error or a plain message (exit 1).
enum Failure {
    Lib(TpwaError),
    Usage(String),
}

impl From<TpwaError> for Failure {
    fn from(e: TpwaError) -> Self {
        Failure::Lib(e)
    }
}

pub fn exit_code(e: &TpwaError) -> i32 {
    match e {
        TpwaError::InfeasibleInstance { .. } | TpwaError::OutOfDomain => 2,
        TpwaError::SolverFailure(_)
        | TpwaError::NotIncompatible
        | TpwaError::InvalidCertificate => 3,
        TpwaError::BudgetExceeded { .. } => 4,
        _ => 1,
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Gen { generator } => cmd_gen(generator),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn init_logging() {
    let level = match std::env::var("TPWA_LOG").as_deref() {
        Ok("quiet") => log::LevelFilter::Off,
        Ok("info") => log::LevelFilter::Info,
        Ok("debug") => log::LevelFilter::Debug,
        _ => log::LevelFilter::Warn,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_template(spec: &str, d: usize) -> Result<TemplateSpec, Failure> {
    let t = match spec {
        "rect" | "rectangular" => TemplateSpec::rectangular(d),
        "octagon" => TemplateSpec::octagon(d),
        _ => match spec.strip_prefix("file:") {
            Some(path) => io::template_from_json(&read(Path::new(path))?)?,
            None => return Err(Failure::Usage(format!("unknown template \"{spec}\""))),
        },
    };
    if t.d() != d {
        return Err(TpwaError::DimensionMismatch {
            expected: d,
            got: t.d(),
        }
        .into());
    }
    Ok(t)
}

fn cmd_fit(a: FitArgs) -> Result<(), Failure> {
    let data = io::dataset_from_json(&read(&a.input)?)?;
    let template = parse_template(&a.template, data.d())?;
    let config = FitConfig {
        epsilon: a.epsilon,
        tol: a.tol,
        cover_period: a.cover_period,
        out_of_domain: a.oob.into(),
    };
    config.validate()?;

    let start = Instant::now();
    let (model, iterations) = match a.mode {
        Mode::Optimal => {
            let out = fit_optimal_with_progress(&template, &data, &config, &mut |p| {
                log::debug!(
                    "iteration {}: |S| = {}, frontier = {}, alpha = {:?}, beta = {:?}",
                    p.iteration,
                    p.confirmed,
                    p.frontier,
                    p.alpha,
                    p.beta
                )
            })?;
            (out.model, Some(out.stats.iterations))
        }
        Mode::Maximal => (fit_maximal(&template, &data, &config)?, None),
        Mode::Naive => {
            let oracle = OracleConfig {
                tol: config.tol,
                ..OracleConfig::default()
            };
            (
                naive_optimal_with(&template, &data, config.epsilon, &oracle)?,
                None,
            )
        }
    };
    let elapsed = start.elapsed().as_secs_f64();

    write_or_print(a.output.as_deref(), &io::model_to_json(&model))?;
    if let Some(path) = &a.emit_plot {
        let mut buf = Vec::new();
        io::write_plot_csv(&mut buf, &model, &data, config.out_of_domain)?;
        fs::write(path, buf)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let iterations = iterations.map_or_else(|| "n/a".to_string(), |n| n.to_string());
    let summary = format!(
        "q = {}, iterations = {iterations}, time = {elapsed:.3} s",
        model.q()
    );
    if a.output.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<(), Failure> {
    let model = io::model_from_json(&read(&a.model)?)?;
    let queries = io::query_points_from_json(&read(&a.input)?)?;
    let mut out = String::new();
    for x in &queries {
        let y = evaluate_model(&model, x, a.oob.into())?;
        let v = serde_json::Value::Array(
            y.iter()
                .map(|&f| {
                    serde_json::Number::from_f64(f).map_or(serde_json::Value::Null, Into::into)
                })
                .collect(),
        );
        out.push_str(&io::to_canonical_string(&v));
        out.push('\n');
    }
    print!("{out}");
    Ok(())
}

fn cmd_gen(g: Generator) -> Result<(), Failure> {
    match g {
        Generator::Arctan { k, out } => {
            write_or_print(out.as_deref(), &io::dataset_to_json(&gen_arctan_1d(k)?))
        }
        Generator::Uid {
            n,
            x1_range,
            x2_range,
            out,
        } => {
            let data = gen_uid_grid(n, (x1_range[0], x1_range[1]), (x2_range[0], x2_range[1]))?;
            write_or_print(out.as_deref(), &io::dataset_to_json(&data))
        }
        Generator::Gridpwa {
            d,
            cells,
            points_per_axis,
            noise,
            seed,
            out,
            truth,
        } => {
            let (data, model) = gen_grid_pwa_with(d, cells, points_per_axis, noise, seed)?;
            if let Some(path) = truth {
                write_or_print(Some(&path), &io::model_to_json(&model))?;
            }
            write_or_print(out.as_deref(), &io::dataset_to_json(&data))
        }
    }
}
