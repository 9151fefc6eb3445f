use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fct_advect::analysis::{max_stable_sigma, phase_dissipation_curve, BETA_INTERVALS};
use fct_advect::config::{parse_config, MIN_CELLS};
use fct_advect::error::{Error, Result};
use fct_advect::runner::run;
use fct_advect::schemes::{scheme_coefficients, SchemeName};
use fct_advect::solver::convergence_study;

#[derive(Parser)]
#[command(
    name = "fct-advect",
    version,
    about = "Flux-corrected finite-volume advection solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one problem and write its CSV and metadata files.
    Run(RunArgs),
    /// Max-norm errors and observed orders over a list of grid sizes.
    Converge(ConvergeArgs),
    /// Dissipation and phase error per wavenumber, or stability limits.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct ProblemFlags {
    /// Config file of `key = value` lines; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// cosine8, square, semi-ellipse or slotted-cylinder.
    #[arg(long)]
    ic: Option<String>,
    /// constant or rotation.
    #[arg(long)]
    velocity: Option<String>,
    /// 1 or 2; defaults to 1 for constant velocity and 2 for rotation.
    #[arg(long)]
    dim: Option<String>,
    /// c4, u5, c6, u7 or u9.
    #[arg(long)]
    scheme: Option<String>,
    /// Product-rule order: 2, 4 or 6.
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long = "t-final")]
    t_final: Option<String>,
    /// on, off or off-low.
    #[arg(long)]
    limiter: Option<String>,
    /// Cosine bump radius: a length, or a cell count with an `h` suffix.
    #[arg(long = "cosine-radius")]
    cosine_radius: Option<String>,
}

impl ProblemFlags {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        [
            ("ic", &self.ic),
            ("velocity", &self.velocity),
            ("dim", &self.dim),
            ("scheme", &self.scheme),
            ("order", &self.order),
            ("sigma", &self.sigma),
            ("t_final", &self.t_final),
            ("limiter", &self.limiter),
            ("cosine_radius", &self.cosine_radius),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
        .collect()
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    problem: ProblemFlags,
    /// Cells per dimension.
    #[arg(long)]
    n: Option<String>,
    /// Output directory.
    #[arg(long)]
    output: Option<String>,
    /// Write a snapshot every this many steps.
    #[arg(long = "dump-every")]
    dump_every: Option<String>,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    problem: ProblemFlags,
    /// Comma-separated grid sizes.
    #[arg(long, default_value = "32,64,128,256")]
    ns: String,
    /// CSV destination; stdout if omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Scheme for the dissipation/phase curve; all schemes with --stability.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long, default_value_t = 0.8)]
    sigma: f64,
    /// Number of wavenumbers in (0, pi].
    #[arg(long, default_value_t = BETA_INTERVALS)]
    samples: usize,
    /// Print the largest stable CFL number per scheme and dimension instead.
    #[arg(long)]
    stability: bool,
    /// Restrict --stability to one dimension.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn emit(csv: Option<&Path>, body: &str) -> Result<()> {
    match csv {
        Some(p) => std::fs::write(p, body).map_err(|e| Error::io(p, e)),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut overrides = args.problem.overrides();
    for (k, v) in [
        ("n", args.n),
        ("output", args.output),
        ("dump_every", args.dump_every),
    ] {
        if let Some(v) = v {
            overrides.push((k, v));
        }
    }
    let (config, warnings) = parse_config(args.problem.config.as_deref(), &overrides)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let report = run(&config)?;
    eprintln!(
        "{} steps to t = {}; min {:.6e}, max {:.6e}, drift {:.3e}; wrote {}",
        report.outcome.steps,
        report.outcome.time,
        report.min,
        report.max,
        report.drift,
        config.output.display()
    );
    Ok(())
}

fn parse_ns(text: &str) -> Result<Vec<usize>> {
    let ns = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::config("ns", format!("cannot parse '{}'", s.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    if ns.is_empty() || ns.iter().any(|&n| n < MIN_CELLS) {
        return Err(Error::config(
            "ns",
            format!("every N must be at least {MIN_CELLS}"),
        ));
    }
    Ok(ns)
}

fn cmd_converge(args: ConvergeArgs) -> Result<()> {
    let ns = parse_ns(&args.ns)?;
    let mut overrides = args.problem.overrides();
    overrides.push(("n", ns[0].to_string()));
    let (config, warnings) = parse_config(args.problem.config.as_deref(), &overrides)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let report = convergence_study(&config.problem()?, &config.settings(), &ns, config.t_final)?;
    let mut body = String::from("N,error,order\n");
    for r in report {
        let order = r.order.map(|o| format!("{o:.6}")).unwrap_or_default();
        body.push_str(&format!("{},{:.16e},{}\n", r.n, r.error, order));
    }
    emit(args.csv.as_deref(), &body)
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let scheme = args
        .scheme
        .as_deref()
        .map(|s| {
            s.parse::<SchemeName>()
                .map_err(|e| Error::config("scheme", e.to_string()))
        })
        .transpose()?;
    let mut body = String::new();
    if args.stability {
        let dims = match args.dim {
            None => vec![1, 2],
            Some(d @ (1 | 2)) => vec![d],
            Some(_) => return Err(Error::config("dim", "dim must be 1 or 2")),
        };
        body.push_str("scheme,D,sigma_max\n");
        let names = scheme.map_or(SchemeName::ALL.to_vec(), |s| vec![s]);
        for name in names {
            for &d in &dims {
                let s = max_stable_sigma(&scheme_coefficients(name), d);
                body.push_str(&format!("{name},{d},{s:.4}\n"));
            }
        }
    } else {
        let name = scheme.ok_or_else(|| Error::config("scheme", "missing required key"))?;
        if !(args.sigma > 0.0 && args.sigma.is_finite()) {
            return Err(Error::config("sigma", "sigma must be positive"));
        }
        if args.samples == 0 {
            return Err(Error::config("samples", "samples must be positive"));
        }
        body.push_str("beta,dissipation,phase_error\n");
        for m in phase_dissipation_curve(&scheme_coefficients(name), args.sigma, args.samples) {
            let phase = m
                .phase_error()
                .map(|p| format!("{p:.16e}"))
                .unwrap_or_default();
            body.push_str(&format!(
                "{:.16e},{:.16e},{}\n",
                m.beta, m.dissipation, phase
            ));
        }
    }
    emit(args.csv.as_deref(), &body)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Converge(a) => cmd_converge(a),
        Command::Analyze(a) => cmd_analyze(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
