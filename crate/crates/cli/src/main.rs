use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lcse_cli::config::ScenarioConfig;
use lcse_cli::{load_config, preset_config, presets, run, CliError};
use lcse_core::dynamics::ResonantVariant;

#[derive(Parser)]
#[command(
    name = "lcse",
    version,
    about = "Spin-1 condensate spin-exchange scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its artifacts.
    Run(RunArgs),
    /// List the built-in presets.
    Presets,
    /// Check a scenario file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `seed.rng_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `pulse.variant`.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Literal,
    Symmetrized,
}

fn run_command(args: RunArgs) -> Result<(), CliError> {
    let mut config: ScenarioConfig = match (&args.config, &args.preset) {
        (Some(path), _) => load_config(path)?,
        (None, Some(name)) => preset_config(name)?,
        (None, None) => unreachable!("clap requires one of --config or --preset"),
    };
    if let Some(seed) = args.seed {
        match config.seed.as_mut() {
            Some(s) => s.rng_seed = Some(seed),
            None => log::warn!(
                "--seed ignored: mode `{}` draws no random numbers",
                config.mode
            ),
        }
    }
    if let Some(v) = args.variant {
        let v = match v {
            VariantArg::Literal => ResonantVariant::PaperLiteral,
            VariantArg::Symmetrized => ResonantVariant::Symmetrized,
        };
        match config.pulse.as_mut() {
            Some(p) => p.variant = Some(v),
            None => log::warn!(
                "--variant ignored: mode `{}` has no resonant pulse",
                config.mode
            ),
        }
    }
    let out = args
        .out
        .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(config.name.as_deref().unwrap_or("lcse-out")));
    let manifest = run(&config, &out)?;
    println!(
        "{} run finished in {:.2} s; wrote {} files to {}",
        manifest.mode,
        manifest.wall_clock_seconds,
        manifest.outputs.len(),
        out.display()
    );
    for note in &manifest.notes {
        println!("  {note}");
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run_command(args),
        Command::Presets => {
            for p in presets::PRESETS {
                println!("{:<22} {}", p.name, p.summary);
            }
            Ok(())
        }
        Command::Validate { config } => {
            load_config(&config).map(|c| println!("ok: mode `{}`", c.mode))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
