use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wofe3d_cli::{fixture, run_pipeline, run_stage, CliError, CliResult, PipelineConfig};

#[derive(Parser)]
#[command(name = "wofe3d", version, about = "Voxel weights-of-evidence prospectivity modeling")]
struct Cli {
    /// Pipeline configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the one in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for voxel computations.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage, or only `--stage NAME`.
    Run {
        #[arg(long)]
        stage: Option<String>,
    },
    /// Parse boreholes and faults, build the modeling space.
    Ingest,
    /// Interpolate categorical and assay models.
    Interp,
    /// Binarize training and build binary evidence masks.
    Evidence,
    /// Weight tables and evidence selection.
    Weights,
    /// Posterior and studentized posterior probability.
    Integrate,
    /// C-V fractal thresholds and classes.
    Threshold,
    /// P-V curves and intersections.
    Validate,
    /// VTK, charts, sections and the run report.
    Export,
    /// Write the synthetic test deposit to `--out`.
    Fixture {
        #[arg(long, default_value_t = fixture::DEFAULT_SEED)]
        seed: u64,
    },
}

fn load(cli: &Cli) -> CliResult<PipelineConfig> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::config(".", "--config is required"))?;
    let mut cfg = PipelineConfig::load(path)?;
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        // only fails when a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let stage = match &cli.command {
        Command::Fixture { seed } => {
            let dir = cli.out.clone().ok_or_else(|| CliError::config(".", "fixture needs --out DIR"))?;
            return fixture::generate(&dir, *seed);
        }
        Command::Run { stage: None } => {
            let report = run_pipeline(&load(&cli)?)?;
            print!("{report}");
            return Ok(());
        }
        Command::Run { stage: Some(s) } => s.clone(),
        Command::Ingest => "ingest".into(),
        Command::Interp => "interp".into(),
        Command::Evidence => "evidence".into(),
        Command::Weights => "weights".into(),
        Command::Integrate => "integrate".into(),
        Command::Threshold => "threshold".into(),
        Command::Validate => "validate".into(),
        Command::Export => "export".into(),
    };
    run_stage(&load(&cli)?, &stage)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut msg = format!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                if !msg.contains(&s.to_string()) {
                    msg.push_str(&format!("\n  caused by: {s}"));
                }
                src = s.source();
            }
            eprintln!("{msg}");
            ExitCode::FAILURE
        }
    }
}
