use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};

use clap::{Parser, Subcommand, ValueEnum};

use taperline::experiments::{self, ConfigError, Format, RunConfig, RunError, RunOutput};

static STOP: AtomicBool = AtomicBool::new(false);

#[derive(Parser)]
#[command(name = "taperline", version, about = "Tapered-antenna scattering and entanglement transfer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; keys left out keep the paper preset.
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in parameter set.
    #[arg(long, global = true, value_enum)]
    preset: Option<Preset>,
    /// Output directory (overrides `output.directory`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed for the Monte Carlo (overrides `fig8.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated output formats.
    #[arg(long, global = true, value_delimiter = ',', value_enum)]
    format: Option<Vec<FormatArg>>,
}

#[derive(Subcommand)]
enum Command {
    /// Scattering coefficients of the configured antenna.
    Scatter,
    /// Reproduce one figure (4 to 8).
    Fig {
        #[arg(value_parser = clap::value_parser!(u8).range(4..=8))]
        number: u8,
    },
    /// Output entanglement for the configured antenna.
    Entangle,
    /// Coordinate descent on a stepwise profile.
    Optimize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Paper,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn load(cli: &Cli) -> Result<RunConfig, RunError> {
    let mut cfg = match (&cli.config, cli.preset) {
        (Some(path), _) => RunConfig::from_path(path)?,
        (None, Some(Preset::Paper)) => RunConfig::paper(),
        (None, None) => {
            return Err(ConfigError::Field { field: "--config".into(), message: "give --config <path> or --preset paper".into() }.into())
        }
    };
    if let Some(dir) = &cli.out {
        cfg.output.directory = dir.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.figures.fig8.seed = seed;
    }
    if let Some(formats) = &cli.format {
        cfg.output.formats = formats
            .iter()
            .map(|f| match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            })
            .collect();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<RunOutput, RunError> {
    let cfg = load(cli)?;
    let out = match cli.command {
        Command::Scatter => experiments::scatter(&cfg)?,
        Command::Fig { number } => experiments::run_figure(number, &cfg, &STOP)?,
        Command::Entangle => experiments::entangle(&cfg)?,
        Command::Optimize => experiments::optimize(&cfg)?,
    };
    for path in out.write(&cfg)? {
        println!("{}", path.display());
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // A second interrupt falls through to the default handler.
    let _ = ctrlc::set_handler(|| {
        if STOP.swap(true, Ordering::Relaxed) {
            std::process::exit(130);
        }
    });
    match run(&cli) {
        Ok(out) if out.partial => {
            eprintln!("interrupted; partial results written");
            ExitCode::from(130)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
