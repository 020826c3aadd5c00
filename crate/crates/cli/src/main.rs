use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use avflex::analysis::{circular_orbit_state, ErrorNorm};
use avflex::experiment::{
    emit_outputs, parse_config, run_experiment, ExperimentConfig, ExperimentOutcome, Scenario,
    CONFIG_KEYS,
};
use avflex::integrate::{step, Scheme, SchemeConfig, StepCounters};
use avflex::model::HamiltonianSystem;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "avflex",
    version,
    about = "Energy-preserving AVF integrators and their locally exact variants"
)]
#[command(after_long_help = config_help())]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence experiment and write results.csv, summary.json and plot.gp.
    Run(ExperimentArgs),
    /// Run a convergence experiment and print the JSON summary only.
    Converge(ExperimentArgs),
    /// Advance the scenario's initial state by single steps and dump them as JSON.
    Step(StepArgs),
}

#[derive(Args)]
struct Source {
    /// Built-in scenario (default fig1 when no config is given).
    #[arg(long, value_enum, conflicts_with = "config")]
    scenario: Option<ScenarioArg>,
    /// Configuration document (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fixed-point solver tolerance.
    #[arg(long)]
    solver_tol: Option<f64>,
    /// Seed for randomized test helpers; experiments are deterministic and ignore it.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    source: Source,
    /// Output directory (overrides output.dir; default ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Concurrent (scheme, h) cells.
    #[arg(long)]
    workers: Option<usize>,
    /// Error norm at t_end.
    #[arg(long, value_enum)]
    norm: Option<NormArg>,
}

#[derive(Args)]
struct StepArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value = "avf")]
    scheme: SchemeArg,
    /// Step size (default: the first ladder entry).
    #[arg(long)]
    h: Option<f64>,
    /// Number of steps to take.
    #[arg(long, default_value_t = 1)]
    steps: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Fig1,
    Fig2,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Phase,
    Position,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Avf,
    Lex,
    Slex,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Avf => Scheme::Avf,
            SchemeArg::Lex => Scheme::Lex,
            SchemeArg::Slex => Scheme::Slex,
        }
    }
}

fn config_help() -> String {
    let mut text = String::from("Configuration keys:\n");
    for (key, what) in CONFIG_KEYS {
        text.push_str(&format!("  {key:<22} {what}\n"));
    }
    text.push_str("\nExit status: 0 on success, 1 on configuration or output errors, 2 when some cells or fits failed.");
    text
}

/// Errors in this category exit with status 1.
struct ConfigError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for ConfigError {
    fn from(e: E) -> Self {
        ConfigError(e.into())
    }
}

fn load(source: &Source) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = match (&source.config, source.scenario) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        (None, Some(ScenarioArg::Fig2)) => ExperimentConfig::preset(Scenario::Fig2),
        (None, _) => ExperimentConfig::preset(Scenario::Fig1),
    };
    if let Some(tol) = source.solver_tol {
        cfg.solver.tol = tol;
    }
    if let Some(seed) = source.seed {
        eprintln!("seed {seed} (not used by experiments)");
    }
    Ok(cfg)
}

fn experiment(args: &ExperimentArgs) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = load(&args.source)?;
    if let Some(n) = args.workers {
        cfg.workers = n;
    }
    if let Some(norm) = args.norm {
        cfg.norm = match norm {
            NormArg::Phase => ErrorNorm::Phase,
            NormArg::Position => ErrorNorm::Position,
        };
    }
    if let Some(out) = &args.out {
        cfg.out_dir = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_table(outcome: &ExperimentOutcome) {
    eprintln!(
        "{:<5} {:>12} {:>12} {:>12} {:>10} {:>8} {:>8} {:>9}",
        "", "h", "h_scaled", "error", "drift", "grads", "hess", "wall ms"
    );
    for r in &outcome.records {
        let num = |x: Option<f64>| x.map(|v| format!("{v:.4e}")).unwrap_or_else(|| "-".into());
        eprintln!(
            "{:<5} {:>12.5e} {:>12} {:>12} {:>10} {:>8} {:>8} {:>9.1}",
            r.scheme.name(),
            r.h,
            num(r.h_scaled),
            num(r.error),
            r.energy_drift
                .map(|v| format!("{v:.1e}"))
                .unwrap_or_else(|| "-".into()),
            r.counters
                .map(|c| c.gradient_evals.to_string())
                .unwrap_or_else(|| "-".into()),
            r.counters
                .map(|c| c.hessian_evals.to_string())
                .unwrap_or_else(|| "-".into()),
            r.wall_time.as_secs_f64() * 1e3,
        );
        if let Some(f) = &r.failure {
            eprintln!("      failed: {f}");
        }
    }
    for rep in &outcome.reports {
        match (&rep.fit, &rep.fit_error) {
            (Some(fit), _) => eprintln!(
                "{} slope {:.3} (rms residual {:.1e})",
                rep.scheme, fit.slope, fit.residual
            ),
            (None, Some(e)) => eprintln!("{} slope unavailable: {e}", rep.scheme),
            (None, None) => {}
        }
    }
}

fn run(args: &ExperimentArgs, write_files: bool) -> Result<u8, ConfigError> {
    let cfg = experiment(args)?;
    let outcome = run_experiment(&cfg)?;
    print_table(&outcome);
    if write_files {
        let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
        let paths = emit_outputs(&cfg, &outcome, &dir)?;
        eprintln!(
            "wrote {}, {}, {}",
            paths.csv.display(),
            paths.json.display(),
            paths.gnuplot.display()
        );
    } else {
        print!("{}", avflex::experiment::render_summary(&cfg, &outcome));
    }
    Ok(outcome.exit_code() as u8)
}

fn single_steps(args: &StepArgs) -> Result<u8, ConfigError> {
    let cfg = load(&args.source)?;
    cfg.validate()?;
    let sweep = cfg.sweep_spec()?;
    let h = args.h.unwrap_or(sweep.ladder[0]);
    let sys = HamiltonianSystem::new(sweep.orbit.potential().clone());
    let scheme_cfg = SchemeConfig::new(args.scheme.into(), h, sweep.dgrad.clone())
        .with_solver(sweep.solver)
        .with_form(sweep.form);
    scheme_cfg.validate()?;
    let (mut y, _) = circular_orbit_state(&sweep.orbit);
    let e0 = sys.energy(&y)?;
    let mut dump = vec![serde_json::json!({ "step": 0, "state": y, "energy": e0 })];
    for k in 1..=args.steps {
        let mut counters = StepCounters::default();
        y = match step(&sys, &scheme_cfg, &y, h, &mut counters) {
            Ok(next) => next,
            Err(e) => {
                eprintln!("step {k} failed: {e}");
                println!("{}", serde_json::to_string_pretty(&dump)?);
                return Ok(2);
            }
        };
        let e = sys.energy(&y)?;
        dump.push(serde_json::json!({
            "step": k,
            "state": y,
            "energy": e,
            "energy_change": e - e0,
            "counters": counters,
        }));
    }
    println!("{}", serde_json::to_string_pretty(&dump)?);
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args, true),
        Command::Converge(args) => run(args, false),
        Command::Step(args) => single_steps(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(ConfigError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
