use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use itlab::{CliError, CliResult, ExperimentConfig, ExperimentKind, Format};

#[derive(Parser)]
#[command(
    name = "itlab",
    version,
    about = "Free wavepacket experiments: exact, imaging-map and ensemble views"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one Gaussian packet with each configured method.
    Propagate(RunArgs),
    /// Imaging-map error against exact propagation over a range of times.
    ItConvergence(RunArgs),
    /// Classical trajectory ensemble against the quantum density.
    Ensemble(RunArgs),
    /// Two-packet density matrix and its detector time-average.
    Densmat(RunArgs),
    /// Straight tracks from isotropic emission in a cloud chamber.
    Mott(RunArgs),
    /// Correlations of a regularised EPR pair.
    Epr(RunArgs),
    /// Check a config file against the experiment it declares.
    ValidateConfig(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment configuration; defaults apply when omitted.
    #[arg(long, env = "ITLAB_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, env = "ITLAB_SEED")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, env = "ITLAB_OUT")]
    out: Option<PathBuf>,
    #[arg(long, env = "ITLAB_FORMAT", value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Override one config value, e.g. `--set epr.x0=10`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl RunArgs {
    fn load(&self) -> CliResult<ExperimentConfig> {
        let mut overrides = self.overrides.clone();
        if let Some(seed) = self.seed {
            overrides.push(format!("seed={seed}"));
        }
        let mut cfg = itlab::config::load(self.config.as_deref(), &overrides)?;
        if let Some(out) = &self.out {
            cfg.output.dir = out.clone();
        }
        if let Some(f) = &self.format {
            cfg.output.format = if f == "json" {
                Format::Json
            } else {
                Format::Csv
            };
        }
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    let (kind, args) = match cli.command {
        Command::Propagate(a) => (ExperimentKind::Propagate, a),
        Command::ItConvergence(a) => (ExperimentKind::ItConvergence, a),
        Command::Ensemble(a) => (ExperimentKind::Ensemble, a),
        Command::Densmat(a) => (ExperimentKind::Densmat, a),
        Command::Mott(a) => (ExperimentKind::Mott, a),
        Command::Epr(a) => (ExperimentKind::Epr, a),
        Command::ValidateConfig(a) => {
            let cfg = a.load()?;
            let kind = cfg
                .experiment
                .ok_or_else(|| CliError::Config("missing top-level key 'experiment'".into()))?;
            cfg.validate(kind)?;
            println!("config ok: {}", kind.name());
            return Ok(());
        }
    };
    let cfg = args.load()?;
    let manifest = itlab::run(kind, &cfg)?;
    for (key, value) in &manifest.summary {
        println!("{key} = {value}");
    }
    println!(
        "wrote {} file(s) to {} in {:.2} s",
        manifest.outputs.len() + 1,
        cfg.output.dir.display(),
        manifest.wall_time_s
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
