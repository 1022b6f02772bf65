use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rrd_core::auxiliary::{gordon_check, GordonCheckSpec, GordonReport};
use rrd_core::harness::{
    emit_report, format_g6, reproduce_table, run_experiment, theory_pair, ExperimentSpec, Mode, OutputFormat,
    ReportRow, TableId, TableOptions,
};
use rrd_core::primal::SolverConfig;
use rrd_core::problem::{proportional_count, ObjectiveSpec, ShapeConfig};
use rrd_core::theory::EpsilonConfig;
use rrd_core::{Error, Result};

#[derive(Parser)]
#[command(name = "rrd", version, about = "Random linearly constrained programs: limits, simulations, tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Lp,
    Gl,
    Bp,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Lower,
    Upper,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Primal,
    Aux,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(clap::Args)]
struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ProblemArgs {
    #[arg(long, value_enum, default_value = "lp")]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = 0.5)]
    alpha1: f64,
    /// One row per value; comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    alpha2: Vec<f64>,
    /// Signed fraction for the split objective; comma separated.
    #[arg(long, value_delimiter = ',')]
    beta: Vec<f64>,
    /// Coefficients of the general linear objective (whitespace or comma separated).
    #[arg(long)]
    c_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    eps1: f64,
    #[arg(long, default_value_t = 0.0)]
    eps5: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Large-n limits of ξ/√n.
    Theory {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_enum, default_value = "both")]
        side: SideArg,
        #[command(flatten)]
        output: Output,
    },
    /// Monte Carlo estimate of ξ/√n at finite n.
    Simulate {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_enum, default_value = "primal")]
        mode: ModeArg,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 50_000)]
        max_iter: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Sweep the columns of table 1 (α₂) or table 2 (β).
    Table {
        #[arg(long)]
        which: u8,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Report the auxiliary program instead of the direct solve.
        #[arg(long)]
        aux: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Estimate both sides of the comparison inequality.
    Gordon {
        #[arg(long, default_value_t = 30)]
        n: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        /// Threshold as a multiple of √n; defaults to the lower limit.
        #[arg(long, allow_hyphen_values = true)]
        offset: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        alpha1: f64,
        #[arg(long, default_value_t = 0.5)]
        alpha2: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0.07)]
        slack: f64,
        #[command(flatten)]
        output: Output,
    },
}

fn read_c_file(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("{}: not a number: {t:?}", path.display())))
        })
        .collect()
}

/// `(param, shape, objective)` rows requested by the problem flags.
fn problem_rows(p: &ProblemArgs, n: usize) -> Result<Vec<(f64, ShapeConfig, ObjectiveSpec)>> {
    let eps = EpsilonConfig {
        eps1_m: p.eps1,
        eps5_g: p.eps5,
    };
    eps.validate()?;
    let mut rows = Vec::new();
    match p.objective {
        ObjectiveArg::Lp | ObjectiveArg::Gl => {
            if !p.beta.is_empty() {
                return Err(Error::InvalidConfig("--beta applies to --objective bp only".into()));
            }
            let objective = match p.objective {
                ObjectiveArg::Gl => {
                    let path = p
                        .c_file
                        .as_deref()
                        .ok_or_else(|| Error::InvalidConfig("--objective gl needs --c-file".into()))?;
                    ObjectiveSpec::general_linear(read_c_file(path)?)?
                }
                _ => ObjectiveSpec::PurelyLinear,
            };
            for &a2 in &p.alpha2 {
                rows.push((a2, ShapeConfig::new(n, p.alpha1, a2), objective.clone()));
            }
        }
        ObjectiveArg::Bp => {
            if p.beta.is_empty() {
                return Err(Error::InvalidConfig("--objective bp needs --beta".into()));
            }
            if p.alpha2.len() != 1 {
                return Err(Error::InvalidConfig("sweep either --alpha2 or --beta, not both".into()));
            }
            for &beta in &p.beta {
                let shape = ShapeConfig::new(n, p.alpha1, p.alpha2[0]).with_beta(beta);
                let k = proportional_count(beta, n);
                rows.push((beta, shape, ObjectiveSpec::BpSplit { k }));
            }
        }
    }
    Ok(rows)
}

fn eps_of(p: &ProblemArgs) -> EpsilonConfig {
    EpsilonConfig {
        eps1_m: p.eps1,
        eps5_g: p.eps5,
    }
}

fn run_theory(problem: &ProblemArgs, side: SideArg, output: &Output) -> Result<()> {
    // theory does not depend on n; the general linear case takes it from c
    let n = match &problem.c_file {
        Some(path) if matches!(problem.objective, ObjectiveArg::Gl) => read_c_file(path)?.len().max(1),
        _ => 1,
    };
    let mut out = Vec::new();
    for (param, shape, objective) in problem_rows(problem, n)? {
        let mut spec = ExperimentSpec::new(Mode::TheoryOnly, shape, objective, 1, 0);
        spec.eps = eps_of(problem);
        spec.validate()?;
        let (lower, upper) = theory_pair(&spec)?;
        let value = match side {
            SideArg::Upper => upper,
            SideArg::Lower | SideArg::Both => lower,
        };
        let (theory_lower, theory_upper) = match side {
            SideArg::Lower => (lower, f64::NAN),
            SideArg::Upper => (f64::NAN, upper),
            SideArg::Both => (lower, upper),
        };
        out.push(ReportRow {
            param,
            n: 0,
            trials: 0,
            sim_mean: value,
            sim_std: 0.0,
            ci95: 0.0,
            theory_lower,
            theory_upper,
            excluded: 0,
        });
    }
    emit_report(&out, output.format.into(), output.out.as_deref())
}

#[allow(clippy::too_many_arguments)]
fn run_simulate(
    problem: &ProblemArgs,
    mode: ModeArg,
    n: usize,
    trials: usize,
    seed: u64,
    rho: f64,
    max_iter: usize,
    output: &Output,
) -> Result<()> {
    let solver = SolverConfig {
        rho,
        max_iter,
        ..Default::default()
    };
    let mode = match mode {
        ModeArg::Primal => Mode::PrimalSim,
        ModeArg::Aux => Mode::AuxSim,
    };
    let mut out = Vec::new();
    for (param, shape, objective) in problem_rows(problem, n)? {
        let mut spec = ExperimentSpec::new(mode, shape, objective, trials, seed);
        spec.eps = eps_of(problem);
        spec.solver = solver;
        let report = run_experiment(&spec)?;
        out.push(ReportRow::from_report(param, &report));
    }
    emit_report(&out, output.format.into(), output.out.as_deref())
}

const GORDON_HEADER: &str =
    "offset,n,trials,p_left,p_left_lo,p_left_hi,p_right,p_right_lo,p_right_hi,failures_left,failures_right,holds";

fn render_gordon(r: &GordonReport, n: usize, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let f = [
                format_g6(r.offset_level / (n as f64).sqrt()),
                n.to_string(),
                r.trials.to_string(),
                format_g6(r.p_left),
                format_g6(r.ci_left.0),
                format_g6(r.ci_left.1),
                format_g6(r.p_right),
                format_g6(r.ci_right.0),
                format_g6(r.ci_right.1),
                r.failures_left.to_string(),
                r.failures_right.to_string(),
                r.holds.to_string(),
            ];
            format!("{GORDON_HEADER}\n{}\n", f.join(","))
        }
    }
}

fn write_text(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io {
            path: p.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Theory { problem, side, output } => run_theory(&problem, side, &output),
        Command::Simulate {
            problem,
            mode,
            n,
            trials,
            seed,
            rho,
            max_iter,
            output,
        } => run_simulate(&problem, mode, n, trials, seed, rho, max_iter, &output),
        Command::Table {
            which,
            n,
            trials,
            seed,
            aux,
            output,
        } => {
            let opts = TableOptions {
                n,
                trials,
                seed,
                aux,
                ..Default::default()
            };
            let table = reproduce_table(TableId::from_number(which)?, &opts)?;
            emit_report(&table.report_rows(), output.format.into(), output.out.as_deref())
        }
        Command::Gordon {
            n,
            trials,
            offset,
            alpha1,
            alpha2,
            seed,
            slack,
            output,
        } => {
            let shape = ShapeConfig::new(n, alpha1, alpha2);
            shape.validate(true)?;
            let level = match offset {
                Some(v) => v,
                None => {
                    let spec = ExperimentSpec::new(Mode::TheoryOnly, shape, ObjectiveSpec::PurelyLinear, 1, 0);
                    theory_pair(&spec)?.0
                }
            };
            let mut spec = GordonCheckSpec::new(
                shape,
                ObjectiveSpec::PurelyLinear,
                level * (n as f64).sqrt(),
                trials,
            );
            spec.master_seed = seed;
            spec.slack = slack;
            let report = gordon_check(&spec)?;
            write_text(&render_gordon(&report, n, output.format.into()), output.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
