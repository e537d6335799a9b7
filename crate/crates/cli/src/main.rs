use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nvsinglet::{run, Command, IscMode, RunConfig, SpectrumKind};

#[derive(Parser)]
#[command(
    name = "nvsinglet",
    version,
    about = "NV-center singlet vibronic solver"
)]
struct Cli {
    /// JSON config; defaults are used for anything it leaves out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Dotted override such as `model.c2=0.85`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Derive F and C², fit Λ_e and print the parameter report.
    DeriveParams,
    /// Diagonalize and write labeled levels and coefficient sums.
    Solve,
    /// Photoluminescence or Huang-Rhys absorption spectrum.
    Spectrum {
        #[arg(value_enum)]
        kind: Kind,
    },
    /// Intersystem-crossing rate tables.
    Isc {
        #[arg(value_enum)]
        mode: Mode,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Pl,
    Abs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Rates,
    Scan,
    Lambda,
    Temperature,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.verb {
        Verb::DeriveParams => Command::DeriveParams,
        Verb::Solve => Command::Solve,
        Verb::Spectrum { kind: Kind::Pl } => Command::Spectrum(SpectrumKind::Pl),
        Verb::Spectrum { kind: Kind::Abs } => Command::Spectrum(SpectrumKind::Abs),
        Verb::Isc { mode } => Command::Isc(match mode {
            Mode::Rates => IscMode::Rates,
            Mode::Scan => IscMode::Scan,
            Mode::Lambda => IscMode::Lambda,
            Mode::Temperature => IscMode::Temperature,
        }),
    };
    let result = RunConfig::load(cli.config.as_deref(), &cli.overrides).and_then(|mut config| {
        if let Some(dir) = cli.out {
            config.output.dir = dir;
        }
        run(command, &config)
    });
    match result {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
