use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use moq_core::moments::{MomentMethod, MomentQuery, DEFAULT_TOL};
use moq_core::sampling::SamplerKind;

use moq_cli::commands::{self, Quantity, SEED_ENV};
use moq_cli::config::DistributionSpec;
use moq_cli::verify::{self, Check, Fault, Settings, Target, DEFAULT_BUDGET};
use moq_cli::{exit, CliError};

#[derive(Parser)]
#[command(name = "moq", version, about = "Evaluate, sample and verify multi-parameter extended distributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate cdf, sf, pdf or hazard on a grid as CSV.
    Curve {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        quantity: Quantity,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        #[arg(long)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw samples, one per line after a commented header.
    Sample {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        sampler: SamplerKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute E[X^r].
    Moment {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, default_value = "auto")]
        method: MomentMethod,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Run the verification battery, or the checks that apply to one spec.
    Verify {
        /// `all` or a spec file.
        #[arg(default_value = "all")]
        target: String,
        /// Restrict to the named checks.
        #[arg(long = "check")]
        checks: Vec<Check>,
        /// Sample size for the statistical checks.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        fault: Option<Fault>,
    },
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn env_seed() -> Option<String> {
    std::env::var(SEED_ENV).ok()
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Curve {
            spec,
            quantity,
            lo,
            hi,
            step,
            out,
        } => {
            let ed = DistributionSpec::load(&spec)?.distribution()?;
            let mut buf = Vec::new();
            commands::curve(&ed, quantity, lo, hi, step, &mut buf)?;
            let mut w = output(out.as_deref())?;
            w.write_all(&buf)?;
            w.flush()?;
        }
        Command::Sample {
            spec,
            sampler,
            n,
            seed,
            out,
        } => {
            let spec = DistributionSpec::load(&spec)?;
            let ed = spec.distribution()?;
            let seed = commands::resolve_seed(seed, env_seed().as_deref(), spec.seed)?;
            let batch = commands::draw(&ed, sampler, n, seed)?;
            let mut w = output(out.as_deref())?;
            commands::write_samples(&batch, &mut w)?;
            w.flush()?;
        }
        Command::Moment { spec, r, method, tol } => {
            let ed = DistributionSpec::load(&spec)?.distribution()?;
            let result = commands::compute_moment(&ed, &MomentQuery::new(r, method, tol))?;
            println!("{}", commands::format_moment(&result));
        }
        Command::Verify {
            target,
            checks,
            budget,
            seed,
            fault,
        } => {
            if budget < 2 {
                return Err(CliError::Usage("--budget must be at least 2".into()));
            }
            let (target, spec_seed) = if target == "all" {
                (Target::Battery, None)
            } else {
                let spec = DistributionSpec::load(Path::new(&target))?;
                (Target::Distribution(spec.distribution()?), spec.seed)
            };
            let settings = Settings {
                budget,
                seed: commands::resolve_seed(seed, env_seed().as_deref(), spec_seed)?,
                fault,
            };
            let checks = if checks.is_empty() { Check::ALL.to_vec() } else { checks };
            let reports = verify::run(&checks, &target, &settings);
            print!("{}", verify::table(&reports));
            if !verify::all_passed(&reports) {
                let failed: Vec<&str> = reports
                    .iter()
                    .filter(|r| r.status == verify::Status::Fail)
                    .map(|r| r.check.name())
                    .collect();
                return Err(CliError::VerifyFailed(failed.join(", ")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { exit::OK as u8 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("moq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
