//! Command-line experiment runner: resolves a configuration, runs one
//! subcommand, and writes CSV with the resolved configuration as a comment
//! header.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{Command, ConfigLayer, ExperimentConfig};
pub use error::CliError;
use output::{write_csv, Table};
use verify::VerifyOptions;

#[derive(Debug, Parser)]
#[command(name = "cdma", version, about = "Large-system and Monte Carlo experiments for asynchronous CDMA")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Multiuser efficiency (scalar density or per-delay matrix solution)
    Efficiency,
    /// Constrained capacity and spectral efficiency at a fixed Eb/N0
    Capacity,
    /// Spectral efficiency against sinc bandwidth at unit load
    Figure2,
    /// Asynchronous and synchronous spectral efficiency against load
    Figure3,
    /// Finite-N simulation next to the large-system prediction
    Montecarlo,
    /// Symbol-asynchronous system against its modulo-chip reduction
    Theorem3,
    /// Run the property and identity checks
    Verify {
        /// Perturb the oscillating part of Q (negative control; the trace check must fail)
        #[arg(long)]
        inject_qbar_perturbation: bool,
    },
}

#[derive(Debug, Args, Default)]
pub struct Options {
    /// Flat TOML file of settings; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print the resolved settings and exit
    #[arg(long, global = true)]
    pub dump_config: bool,
    /// Output CSV path (stdout when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Frequency grid size
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// sinc:<alpha> | rrc:<rho> | table:<csv>
    #[arg(long, global = true)]
    pub waveform: Option<String>,
    /// Oversampling factor
    #[arg(long, global = true)]
    pub r: Option<usize>,
    /// Load: value, comma list, or start:step:stop
    #[arg(long, global = true)]
    pub beta: Option<String>,
    /// Relative sinc bandwidths: value, comma list, or start:step:stop
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    #[arg(long = "ebn0-db", global = true, allow_negative_numbers = true)]
    pub ebn0_db: Option<f64>,
    #[arg(long, global = true)]
    pub n0: Option<f64>,
    /// Spreading factor
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Number of users
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// uniform | zero
    #[arg(long, global = true)]
    pub delays: Option<String>,
    #[arg(long, global = true)]
    pub delay_atoms: Option<usize>,
    /// Comma list of equally likely powers
    #[arg(long, global = true)]
    pub powers: Option<String>,
    /// scalar | matrix
    #[arg(long, global = true)]
    pub solver: Option<String>,
    /// toeplitz | circulant
    #[arg(long, global = true)]
    pub matrix: Option<String>,
    /// Symbol window half-width for theorem3
    #[arg(long, global = true)]
    pub window: Option<usize>,
    /// Also report the chip-synchronous efficiency
    #[arg(long, global = true)]
    pub sync: bool,
    /// Run both solvers and compare
    #[arg(long, global = true)]
    pub cross_check: bool,
}

impl Options {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            waveform: self.waveform.clone(),
            r: self.r,
            beta: self.beta.clone(),
            alpha: self.alpha.clone(),
            ebn0_db: self.ebn0_db,
            n0: self.n0,
            grid: self.grid,
            delays: self.delays.clone(),
            delay_atoms: self.delay_atoms,
            powers: self.powers.clone(),
            solver: self.solver.clone(),
            sync: self.sync.then_some(true),
            cross_check: self.cross_check.then_some(true),
            n: self.n,
            k: self.k,
            trials: self.trials,
            window: self.window,
            matrix: self.matrix.clone(),
            seed: self.seed,
        }
    }
}

impl Cmd {
    fn kind(&self) -> Command {
        match self {
            Cmd::Efficiency => Command::Efficiency,
            Cmd::Capacity => Command::Capacity,
            Cmd::Figure2 => Command::Figure2,
            Cmd::Figure3 => Command::Figure3,
            Cmd::Montecarlo => Command::MonteCarlo,
            Cmd::Theorem3 => Command::Theorem3,
            Cmd::Verify { .. } => Command::Verify,
        }
    }
}

/// Runs a parsed invocation, writing CSV to `--out` or `stdout` and
/// diagnostics to `stderr`.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let cmd = cli.command.kind();
    let mut layers = Vec::new();
    if let Some(path) = &cli.options.config {
        layers.push(ConfigLayer::from_toml_file(path)?);
    }
    layers.push(cli.options.layer());
    let (cfg, resolved) = ExperimentConfig::resolve(cmd, &layers)?;
    if cli.options.dump_config {
        write!(stdout, "{}", cfg.to_toml())?;
        return Ok(());
    }

    let mut verify_failures = 0;
    let table: Table = match &cli.command {
        Cmd::Efficiency => commands::efficiency(&cfg, &resolved)?,
        Cmd::Capacity => commands::capacity(&cfg, &resolved)?,
        Cmd::Figure2 => commands::figure2(&cfg, &resolved)?,
        Cmd::Figure3 => commands::figure3(&cfg, &resolved)?,
        Cmd::Montecarlo => commands::montecarlo(&cfg, &resolved)?,
        Cmd::Theorem3 => commands::theorem3(&cfg, &resolved)?,
        Cmd::Verify { inject_qbar_perturbation } => {
            let props = verify::run_suite(VerifyOptions { inject_qbar_perturbation: *inject_qbar_perturbation });
            verify_failures = verify::failures(&props);
            verify::report(&props)
        }
    };
    for w in &table.warnings {
        writeln!(stderr, "warning: {w}")?;
    }
    for n in &table.notes {
        writeln!(stderr, "{n}")?;
    }
    match &cli.options.out {
        Some(path) => write_csv(BufWriter::new(File::create(path)?), cmd.name(), &cfg, &table)?,
        None => write_csv(&mut *stdout, cmd.name(), &cfg, &table)?,
    }
    if verify_failures > 0 {
        return Err(CliError::VerifyFailed(verify_failures));
    }
    Ok(())
}

/// Entry point shared by the binary: parses `args` and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let stderr = io::stderr();
    match run(&cli, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(()) => 0,
        // A closed downstream pipe (e.g. `| head`) is not a failure.
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
