use std::{path::PathBuf, process};

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use relspec::{
    commands,
    config::{
        describe_defaults, resolve, AnalyzeConfig, CommandConfig, EvaluateConfig, ExpandConfig,
        PreprocessConfig, SynthConfig, TrainCmdConfig,
    },
    AppError,
};

#[derive(Parser)]
#[command(
    name = "relspec",
    version,
    about = "Dendrite Net relation spectra for EMG-to-force mapping"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// JSON config file; missing keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for output files (created if needed).
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Overrides the config's `seed` (ignored by commands without one).
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides one config key, e.g. `--set model.epochs=500`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic recording from a known polynomial system.
    Synth(Common),
    /// Filter, envelope and decimate a recording into a dataset.
    Preprocess(Common),
    /// Train a Dendrite Net on a dataset.
    Train(Common),
    /// Expand a trained model into its relation spectrum.
    Expand(Common),
    /// Cross-validate Dendrite Net against linear regression.
    Evaluate(Common),
    /// Cross-subject synergy and coupling over several spectra.
    Analyze(Common),
}

fn run<T: CommandConfig>(
    common: &Common,
    cmd: fn(&T, &std::path::Path) -> Result<Vec<PathBuf>, AppError>,
) -> Result<Vec<PathBuf>, AppError> {
    let cfg: T = resolve(common.config.as_deref(), &common.sets, common.seed)?;
    cmd(&cfg, &common.out_dir)
}

fn main() {
    let command = Cli::command()
        .mut_subcommand("synth", |c| {
            c.after_help(describe_defaults::<SynthConfig>())
        })
        .mut_subcommand("preprocess", |c| {
            c.after_help(describe_defaults::<PreprocessConfig>())
        })
        .mut_subcommand("train", |c| {
            c.after_help(describe_defaults::<TrainCmdConfig>())
        })
        .mut_subcommand("expand", |c| {
            c.after_help(describe_defaults::<ExpandConfig>())
        })
        .mut_subcommand("evaluate", |c| {
            c.after_help(describe_defaults::<EvaluateConfig>())
        })
        .mut_subcommand("analyze", |c| {
            c.after_help(describe_defaults::<AnalyzeConfig>())
        });
    let cli = Cli::from_arg_matches(&command.get_matches()).unwrap_or_else(|e| e.exit());

    let result = match &cli.command {
        Cmd::Synth(c) => run::<SynthConfig>(c, commands::synth),
        Cmd::Preprocess(c) => run::<PreprocessConfig>(c, commands::preprocess),
        Cmd::Train(c) => run::<TrainCmdConfig>(c, commands::train),
        Cmd::Expand(c) => run::<ExpandConfig>(c, commands::expand),
        Cmd::Evaluate(c) => run::<EvaluateConfig>(c, commands::evaluate),
        Cmd::Analyze(c) => run::<AnalyzeConfig>(c, commands::analyze),
    };
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
        }
        Err(e) => {
            eprintln!("relspec: {e}");
            process::exit(e.exit_code() as i32);
        }
    }
}
