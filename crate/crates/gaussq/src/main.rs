use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaussq::core::mcint::VegasConfig;
use gaussq::core::typicality::{pure_state_endpoint, sample_energy_constrained, scan_purity_cut, scan_purity_plane};
use gaussq::core::{log_negativity, steerability, Error as CoreError};
use gaussq::scan::{energy_curves, write_energy_curves, write_pure_endpoints, write_purity_cut, write_purity_plane};
use gaussq::{analyze, read_covmat, ThreadRunner};

const COLUMNS: &str = "\
Columns (all quantities dimensionless):
  purity-plane   mu_a,mu_b,class,prop_entangled,mean_EN
  purity-cut     mu_ab,prop_entangled,mean_EN
  energy-curves  E,mu,prop_ent,prop_ent_err,mean_EN,mean_EN_err,prop_steer,prop_steer_err,mean_G,mean_G_err
  pure-endpoint  E,prop_ent,mean_EN,prop_steer,mean_G

mu, mu_a, mu_b and mu_ab are purities in (0, 1]. E is half the trace of the
covariance matrix (vacuum has E = 1 per mode). mean_EN is the logarithmic
negativity in bits, mean_G the Gaussian steerability in nats. Proportions are
fractions in [0, 1]. Empty cells mark parameters with no physical state.
Columns ending in _err are Monte Carlo standard errors.

GAUSS_THREADS caps the number of worker threads.";

#[derive(Parser)]
#[command(name = "gaussq", version, about = "Typical correlations of random mixed Gaussian states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print invariants of a covariance matrix file (first line N, then 2N rows).
    ///
    /// Exit status 0 for physical states, 2 for non-physical matrices.
    Analyze { path: PathBuf },
    /// Write figure data as CSV.
    #[command(after_help = COLUMNS)]
    Scan {
        kind: ScanKind,
        #[command(flatten)]
        opts: ScanOpts,
    },
    /// Draw states from the energy-constrained ensemble as CSV rows.
    Sample {
        #[arg(long, default_value_t = 0.3)]
        mu: f64,
        #[arg(long = "E", default_value_t = 8.0)]
        energy: f64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScanKind {
    PurityPlane,
    PurityCut,
    EnergyCurves,
    PureEndpoint,
}

#[derive(Args)]
struct ScanOpts {
    /// Global purity for the purity-plane and purity-cut scans.
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    /// Energies for energy-curves and pure-endpoint, comma separated.
    #[arg(long = "E", value_delimiter = ',', default_value = "3,5,8,12")]
    energies: Vec<f64>,
    /// Points per purity axis.
    #[arg(long, default_value_t = 100)]
    grid: usize,
    /// Points of the global-purity grid for energy-curves.
    #[arg(long = "mu-grid", default_value_t = 50)]
    mu_grid: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Absolute tolerance of the inner quadratures.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// VEGAS evaluations per iteration.
    #[arg(long, default_value_t = 10_000)]
    evals: usize,
    /// VEGAS iterations.
    #[arg(long, default_value_t = 10)]
    iterations: usize,
}

enum Failure {
    Input(String),
    Numerical(String),
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Domain(_)
            | CoreError::InvalidConfig(_)
            | CoreError::Dimension { .. }
            | CoreError::ModeCount { .. }
            | CoreError::NotSymmetric { .. } => Failure::Input(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Input(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Analyze { path } => {
            let sigma = read_covmat(&path).map_err(|e| Failure::Input(e.to_string()))?;
            let report = analyze(&sigma)?;
            print!("{report}");
            Ok(if report.bona_fide { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Scan { kind, opts } => {
            if opts.grid == 0 || opts.mu_grid == 0 {
                return Err(Failure::Input("grid sizes must be positive".into()));
            }
            let out = output(&opts.out)?;
            match kind {
                ScanKind::PurityPlane => write_purity_plane(&scan_purity_plane(opts.mu, opts.grid, opts.tol)?, out)?,
                ScanKind::PurityCut => write_purity_cut(&scan_purity_cut(opts.mu, opts.grid, opts.tol)?, out)?,
                ScanKind::EnergyCurves => {
                    let cfg = VegasConfig {
                        seed: opts.seed,
                        evals_per_iter: opts.evals,
                        iterations: opts.iterations,
                        ..VegasConfig::default()
                    };
                    let rows = energy_curves(&opts.energies, opts.mu_grid, &cfg, opts.tol, &ThreadRunner::from_env())?;
                    write_energy_curves(&rows, out)?;
                }
                ScanKind::PureEndpoint => {
                    let rows = opts
                        .energies
                        .iter()
                        .map(|&e| pure_state_endpoint(e, opts.tol).map(|p| (e, p)))
                        .collect::<Result<Vec<_>, _>>()?;
                    write_pure_endpoints(&rows, out)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sample { mu, energy, count, seed, out } => {
            let set = sample_energy_constrained(mu, energy, count, seed)?;
            let mut w = csv::Writer::from_writer(output(&out)?);
            let mut header: Vec<String> =
                ["mu_a", "mu_b", "delta", "lambda_a", "lambda_b", "E_N", "G"].map(String::from).to_vec();
            header.extend((0..16).map(|k| format!("s{}{}", k / 4 + 1, k % 4 + 1)));
            w.write_record(&header)?;
            for s in &set.samples {
                let c = s.coords;
                let mut rec = vec![c.mu_a, c.mu_b, c.delta, s.local.lambda_a, s.local.lambda_b];
                rec.push(log_negativity(&c)?);
                rec.push(steerability(&c));
                rec.extend(s.sigma.entries().transpose().iter().copied());
                w.write_record(rec.iter().map(|v| v.to_string()))?;
            }
            w.flush()?;
            eprintln!("accepted {} of {} proposals", set.samples.len(), set.proposals);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
