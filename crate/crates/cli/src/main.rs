use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use abpauli::bsolver::{find_bound_state, BoundState, QuadGrid};
use abpauli::greenfn::{partial_wave_green, GreenFunction};
use abpauli::oracle::{radial_fd_ground_state, RadialBoundary, RadialGrid1D};
use abpauli::weakcoupling::{asymptotic_eigenvalues, compute_u, compute_w};
use abpauli::{Complex64, FluxAlpha, PolarPoint, SpectralParameter, SpinChannel};
use abpauli_cli::{checks, output, parse_config, run_sweep, RunConfig};
use clap::{Parser, Subcommand, ValueEnum};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "abpauli",
    version,
    about = "Green functions, bound states and weak-coupling asymptotics for the flux Pauli operator"
)]
struct Cli {
    /// Run configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for sweep files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Reserved; every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Residue, partial-wave, continuity, connection and product-expansion suites.
    CheckIdentities,
    /// Kernels at one pair of points.
    GreenEval {
        #[arg(long)]
        alpha: f64,
        /// Spectral parameter off [0, inf), e.g. `-1` or `-1+0.5i`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// `r,theta`
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// `r,theta`
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, default_value_t = 80)]
        m_max: usize,
    },
    /// Epsilon sweep from the config; writes CSV and JSON.
    Sweep,
    /// Bound states at one coupling.
    BsSolve {
        #[arg(long)]
        eps: f64,
    },
    /// Radial finite-difference ground state per spin.
    OracleRadial {
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Boundary::Maximal)]
        boundary: Boundary,
        #[arg(long, default_value_t = RadialGrid1D::default().r_min)]
        r_min: f64,
        #[arg(long, default_value_t = RadialGrid1D::default().r_max)]
        r_max: f64,
        #[arg(long, default_value_t = RadialGrid1D::default().count)]
        intervals: usize,
    },
    /// Coupling matrix U, and W(eps) at the asymptotic roots when --eps is given.
    Coupling {
        #[arg(long)]
        eps: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Boundary {
    Maximal,
    Friedrichs,
}

enum Failure {
    Config(String),
    Numeric(String),
}

impl From<abpauli::Error> for Failure {
    fn from(e: abpauli::Error) -> Self {
        Failure::Numeric(e.to_string())
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let Some(path) = &cli.config else {
        return Err(Failure::Config("this command needs --config".into()));
    };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn parse_point(s: &str) -> Result<PolarPoint, Failure> {
    let bad = || Failure::Config(format!("expected `r,theta`, got `{s}`"));
    let (r, t) = s.split_once(',').ok_or_else(bad)?;
    let r: f64 = r.trim().parse().map_err(|_| bad())?;
    let t: f64 = t.trim().parse().map_err(|_| bad())?;
    PolarPoint::new(r, t).map_err(|e| Failure::Config(e.to_string()))
}

fn show(z: Option<Complex64>) -> String {
    match z {
        Some(z) if z.im == 0.0 => format!("{:.12e}", z.re),
        Some(z) => format!("{:.12e} {:+.12e}i", z.re, z.im),
        None => "-".into(),
    }
}

fn cmd_checks() -> Result<(), Failure> {
    let results = checks::run_all();
    println!("{:<14} {:>6} {:>12} {:>10} {:>9}  result", "suite", "cases", "worst", "tol", "seconds");
    for r in &results {
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        println!("{:<14} {:>6} {:>12.3e} {:>10.1e} {:>9.3}  {verdict}", r.suite, r.cases, r.worst, r.tol, r.seconds);
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.pass).map(|r| r.suite).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Numeric(format!("failed suites: {}", failed.join(", "))))
    }
}

fn cmd_green(alpha: f64, z: &str, x: &str, x0: &str, m_max: usize) -> Result<(), Failure> {
    let alpha = FluxAlpha::new(alpha).map_err(|e| Failure::Config(e.to_string()))?;
    let zc = Complex64::from_str(z).map_err(|_| Failure::Config(format!("cannot parse z = `{z}`")))?;
    let zp = SpectralParameter::new(zc).map_err(|e| Failure::Config(e.to_string()))?;
    let (x, x0) = (parse_point(x)?, parse_point(x0)?);
    let g = GreenFunction::new(alpha, zp);
    println!("friedrichs     {}", show(Some(g.friedrichs(x, x0)?)));
    let pw = partial_wave_green(alpha, zp, x, x0, m_max)?;
    println!("partial_wave   {}  (tail <= {:.1e})", show(Some(pw.value)), pw.tail_bound);
    for spin in SpinChannel::BOTH {
        let l = spin.label();
        println!("pauli_{l:<8} {}", show(Some(g.pauli(spin, x, x0)?)));
        println!("regular_{l:<6} {}", show(Some(g.regular(spin, x, x0)?)));
        println!("leading_{l:<6} {}", show(Some(g.leading(spin, x, x0))));
    }
    Ok(())
}

fn cmd_sweep(cli: &Cli) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    let result = run_sweep(&cfg, cli.threads);
    let paths =
        output::write_outputs(&cfg, &result, &cli.out).map_err(|e| Failure::Numeric(format!("writing output: {e}")))?;
    for p in &paths {
        println!("wrote {}", p.display());
    }
    for (label, fit) in [("plus", &result.fit.plus), ("minus", &result.fit.minus)] {
        match fit {
            Some(f) => {
                println!("fit {label}: slope {:.6} r2 {:.8} over {} points ({})", f.slope, f.r2, f.points, f.source)
            }
            None => println!("fit {label}: -"),
        }
    }
    for row in result.rows.iter().filter(|r| r.failed()) {
        log::warn!("eps = {:e}: {}", row.eps, row.error.as_deref().unwrap_or(""));
    }
    if result.all_failed() {
        return Err(Failure::Numeric("every sweep row failed".into()));
    }
    Ok(())
}

fn cmd_bs(cli: &Cli, eps: f64) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    let bs = find_bound_state(cfg.alpha, eps, &cfg.potential, &cfg.numerics.search())?;
    for spin in SpinChannel::BOTH {
        match bs.get(spin) {
            BoundState::Found(z) => println!("{:<6} {z:.12e}", spin.label()),
            BoundState::NoEigenvalue => println!("{:<6} no eigenvalue", spin.label()),
        }
    }
    Ok(())
}

fn cmd_radial(
    cli: &Cli,
    eps: f64,
    boundary: Boundary,
    r_min: f64,
    r_max: f64,
    intervals: usize,
) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    let boundary = match boundary {
        Boundary::Maximal => RadialBoundary::Maximal,
        Boundary::Friedrichs => RadialBoundary::Friedrichs,
    };
    let grid = RadialGrid1D::new(r_min, r_max, intervals, boundary).map_err(|e| Failure::Config(e.to_string()))?;
    for spin in SpinChannel::BOTH {
        match radial_fd_ground_state(cfg.alpha, eps, cfg.potential.component(spin), spin, &grid)? {
            BoundState::Found(z) => println!("{:<6} {z:.12e}", spin.label()),
            BoundState::NoEigenvalue => println!("{:<6} no eigenvalue", spin.label()),
        }
    }
    Ok(())
}

fn cmd_coupling(cli: &Cli, eps: Option<f64>) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    let m = cfg.moments;
    println!("moments: plus {:.6e} minus {:.6e} l2^2 {:.6e} ok {}", m.m_plus, m.m_minus, m.l2_squared, m.assumption_ok);
    let u = compute_u(cfg.alpha, &cfg.potential)?;
    println!("U11 {}  U12 {}", show(Some(u.u[(0, 0)])), show(Some(u.u[(0, 1)])));
    println!("U21 {}  U22 {}", show(Some(u.u[(1, 0)])), show(Some(u.u[(1, 1)])));
    let Some(eps) = eps else { return Ok(()) };
    let asym = asymptotic_eigenvalues(cfg.alpha, eps, &u);
    let grid = QuadGrid::for_potential(&cfg.potential, cfg.numerics.grid())?;
    for spin in SpinChannel::BOTH {
        let (z, adm) = asym.get(spin);
        print!("{:<6} z_asym {} ({adm:?})", spin.label(), show(z));
        if let Some(z) = z {
            let zr = SpectralParameter::real(-z.norm())?;
            let w = compute_w(cfg.alpha, eps, zr, &cfg.potential, &grid)?;
            let k = spin.index();
            print!("  W{0}{0} {1}", k + 1, show(Some(w.effective()[(k, k)])));
        }
        println!();
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if cli.seed.is_some() {
        log::info!("--seed is reserved and has no effect");
    }
    let outcome = match &cli.command {
        Command::CheckIdentities => cmd_checks(),
        Command::GreenEval { alpha, z, x, x0, m_max } => cmd_green(*alpha, z, x, x0, *m_max),
        Command::Sweep => cmd_sweep(&cli),
        Command::BsSolve { eps } => cmd_bs(&cli, *eps),
        Command::OracleRadial { eps, boundary, r_min, r_max, intervals } => {
            cmd_radial(&cli, *eps, *boundary, *r_min, *r_max, *intervals)
        }
        Command::Coupling { eps } => cmd_coupling(&cli, *eps),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}
