use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eit_core::config::LoadedConfig;
use eit_core::run::{execute, Command, RunOptions};
use eit_core::Error;

#[derive(Parser)]
#[command(
    name = "eitsim",
    version,
    about = "Slow light, storage and stationary light pulses in a cold-atom fiber"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Steady-state probe transmission spectrum.
    Spectrum(Common),
    /// Fit effective 1D parameters to the inhomogeneous spectrum.
    Calibrate(Common),
    /// Gaussian pulse under a constant control.
    Slowlight(Common),
    /// Store and retrieve a pulse by switching the control.
    Storage(Common),
    /// Stationary light pulse with a counterpropagating control.
    Slp(Common),
    /// Run another command over a parameter grid.
    Sweep(Common),
    /// List or print shipped presets.
    Presets {
        /// Print this preset's TOML.
        name: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Layer the configuration over a shipped preset.
    #[arg(short, long)]
    preset: Option<String>,
    /// Output directory.
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
    #[arg(long, env = "EITSIM_THREADS")]
    threads: Option<usize>,
    /// Write field snapshots every N steps (0 disables).
    #[arg(long)]
    snapshot_stride: Option<usize>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 1,
        e if e.is_numerical() => 3,
        _ => 2,
    }
}

fn run(command: Command, c: Common) -> Result<(), Error> {
    let text = match &c.config {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?
        }
        None => String::new(),
    };
    if c.config.is_none() && c.preset.is_none() {
        return Err(Error::Config("pass --config and/or --preset".into()));
    }
    let loaded = LoadedConfig::parse(&text, c.preset.as_deref())?;
    std::fs::create_dir_all(&c.out)?;
    let opts = RunOptions {
        snapshot_stride: c.snapshot_stride,
        threads: c.threads,
    };
    let outcome = execute(command, &loaded, &c.out, &opts)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&outcome.summary).map_err(Error::from)?
    );
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Cmd::Spectrum(c) => (Command::Spectrum, c),
        Cmd::Calibrate(c) => (Command::Calibrate, c),
        Cmd::Slowlight(c) => (Command::Slowlight, c),
        Cmd::Storage(c) => (Command::Storage, c),
        Cmd::Slp(c) => (Command::Slp, c),
        Cmd::Sweep(c) => (Command::Sweep, c),
        Cmd::Presets { name } => {
            match name {
                None => eit_core::config::PRESETS.iter().for_each(|(n, _)| println!("{n}")),
                Some(n) => match eit_core::config::preset_text(&n) {
                    Some(t) => print!("{t}"),
                    None => {
                        eprintln!("error: unknown preset `{n}`");
                        return ExitCode::from(2);
                    }
                },
            }
            return ExitCode::SUCCESS;
        }
    };
    match run(command, common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
