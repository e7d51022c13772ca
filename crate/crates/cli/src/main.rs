use bergman_lab::{execute, render, CliError, ExperimentConfig, Format};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bergman-lab", version, about = "Run weighted Bergman kernel experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Report path; overrides `output.path`. Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `output.format`.
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Worker threads; overrides BERGMAN_LAB_THREADS.
        #[arg(long, env = "BERGMAN_LAB_THREADS")]
        threads: Option<usize>,
    },
}

fn run(config: PathBuf, out: Option<PathBuf>, format: Option<FormatArg>, threads: Option<usize>) -> Result<bool, CliError> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let text = std::fs::read_to_string(&config)?;
    let cfg = ExperimentConfig::parse(&text)?;
    let format = match format {
        Some(FormatArg::Json) => Format::Json,
        Some(FormatArg::Csv) => Format::Csv,
        None => cfg.output.format,
    };
    let env = execute(&cfg)?;
    let body = render(&env, format)?;
    match out.or_else(|| cfg.output.path.as_ref().map(PathBuf::from)) {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    eprintln!(
        "{}: {} (tolerance {}, {:.2}s)",
        env.experiment,
        if env.passed { "pass" } else { "FAIL" },
        env.tolerance,
        env.runtime_seconds
    );
    Ok(env.passed)
}

fn main() -> ExitCode {
    let Command::Run {
        config,
        out,
        format,
        threads,
    } = Cli::parse().command;
    match run(config, out, format, threads) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
