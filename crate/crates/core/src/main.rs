use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qassert::assertions::{EvaluationConfig, DEFAULT_ALPHA};
use qassert::cli::{example, parse_circuit, render_report, run_program, ProgramConfig, ReportFormat, EXAMPLES};
use qassert::stats::DEFAULT_RESAMPLES;

#[derive(Parser)]
#[command(
    name = "qassert",
    version,
    about = "Run quantum circuits with statistical assertion checkpoints"
)]
struct Cli {
    #[command(flatten)]
    options: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Options {
    /// Shots per checkpoint, overriding the per-assertion defaults.
    #[arg(long, global = true)]
    shots: Option<u64>,
    #[arg(long, global = true, env = "QASSERT_SEED", default_value_t = 0)]
    seed: u64,
    /// Significance level for directives that do not set one.
    #[arg(long, global = true, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Monte Carlo resamples for product assertions on tables larger than 2x2.
    #[arg(long, global = true, default_value_t = DEFAULT_RESAMPLES)]
    resamples: usize,
    /// Evaluate product assertions with the add-one chi-square test.
    #[arg(long, global = true)]
    legacy_chisq: bool,
    #[arg(long, global = true, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Run a circuit file.
    Run { file: PathBuf },
    /// Run a built-in example.
    Example {
        name: String,
        /// Example parameter as KEY=VALUE (repeatable).
        #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
        params: Vec<(String, String)>,
        #[arg(long, value_name = "NAME")]
        inject_bug: Option<String>,
    },
    /// List built-in examples with their parameters and injectable bugs.
    ListExamples,
}

fn parse_param(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    Ok((k.to_owned(), v.to_owned()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = cli.options;
    let config = ProgramConfig {
        evaluation: EvaluationConfig {
            shots: o.shots,
            seed: o.seed,
            alpha: o.alpha,
            resamples: o.resamples,
            legacy_chisq: o.legacy_chisq,
        },
        format: o.format,
    };

    let (name, circuit) = match cli.command {
        Command::ListExamples => {
            for info in EXAMPLES {
                let params: Vec<String> = info.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!("{:<9} {}", info.name, info.summary);
                if !params.is_empty() {
                    println!("          params: {}", params.join(" "));
                }
                if !info.bugs.is_empty() {
                    println!("          bugs:   {}", info.bugs.join(" "));
                }
            }
            return ExitCode::SUCCESS;
        }
        Command::Run { file } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => return fatal(format!("{}: {e}", file.display())),
            };
            match parse_circuit(&text) {
                Ok(c) => (file.display().to_string(), c),
                Err(e) => return fatal(format!("{}: {e}", file.display())),
            }
        }
        Command::Example {
            name,
            params,
            inject_bug,
        } => {
            let params: BTreeMap<String, String> = params.into_iter().collect();
            match example(&name, &params, inject_bug.as_deref()) {
                Ok(c) => (name, c),
                Err(e) => return fatal(e.to_string()),
            }
        }
    };

    match run_program(&name, &circuit, &config) {
        Ok(report) => {
            print!("{}", render_report(&report, config.format));
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => fatal(e.to_string()),
    }
}

fn fatal(message: String) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}
