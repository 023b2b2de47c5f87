use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cagmps_cli::config::{ExperimentConfig, Overrides};
use cagmps_cli::{cmd_ed, cmd_fit_c, cmd_gates, cmd_run, CliError};

#[derive(Parser)]
#[command(name = "cagmps", version, about = "Grassmann MPS and Clifford-augmented GMPS ground states of fermion chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ground-state energies and bond entropies for each bond dimension and method.
    Run(ModelArgs),
    /// Fit S = (c/6) ln L + a + b/L to mid-chain entropies from a CSV.
    FitC {
        /// CSV with `L` and `mid_entropy` columns (and optionally `method`).
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate the Clifford gates and write the gate table.
    Gates {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact diagonalization: the lowest 16 eigenvalues (L <= 12).
    Ed(ModelArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Plain key=value file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// tv or tight-binding.
    #[arg(long)]
    model: Option<String>,
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long = "V")]
    v: Option<f64>,
    /// Comma-separated bond dimensions.
    #[arg(long)]
    chi: Option<String>,
    #[arg(long)]
    sweeps: Option<usize>,
    /// on, off or both.
    #[arg(long)]
    clifford: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// ed or high-chi.
    #[arg(long)]
    reference: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ModelArgs {
    fn resolve(self) -> Result<ExperimentConfig, CliError> {
        let file = match &self.config {
            Some(p) => Overrides::from_file(p)?,
            None => Overrides::default(),
        };
        let flags = Overrides {
            model: self.model,
            l: self.l,
            t: self.t,
            v: self.v,
            chi: self.chi,
            sweeps: self.sweeps,
            clifford: self.clifford,
            seed: self.seed,
            reference: self.reference,
            out: self.out,
        };
        ExperimentConfig::resolve(flags.over(file))
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => cmd_run(&args.resolve()?).map(drop),
        Command::FitC { input, out } => {
            for row in cmd_fit_c(&input, out.as_deref())? {
                eprintln!("{}: c = {:.4} (rms {:.2e}, {} points)", row.method, row.fit.c, row.fit.rms, row.points);
            }
            Ok(())
        }
        Command::Gates { out } => cmd_gates(out.as_deref()).map(drop),
        Command::Ed(mut args) => {
            // no reference energy here; the size limit is enforced by cmd_ed
            args.reference = Some("high-chi".into());
            let config = args.resolve()?;
            cmd_ed(&config.model, config.out.as_deref()).map(drop)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cagmps: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
