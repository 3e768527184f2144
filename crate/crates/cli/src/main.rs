use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use indlab_cli::config::{RunConfig, ScenarioConfig, TaskConfig};
use indlab_cli::{execute, explain, parse_config, CliError, Overrides};

#[derive(Parser)]
#[command(
    name = "indlab",
    version,
    about = "Independence, entropy and shattering experiments on shift spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration (or a named scenario) and write the report directory.
    Run {
        #[arg(long, value_name = "PATH", required_unless_present = "scenario")]
        config: Option<PathBuf>,
        /// Run a named scenario with its default settings instead of a config file.
        #[arg(long, conflicts_with = "config")]
        scenario: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "DIR", default_value = "indlab-out")]
        out: PathBuf,
        #[arg(long, value_name = "N")]
        budget_patterns: Option<usize>,
        #[arg(long, value_name = "N")]
        timeout_secs: Option<u64>,
    },
    /// Describe a report field.
    Explain { anchor: String },
    /// List the built-in scenarios.
    ListScenarios,
}

fn load(config: Option<PathBuf>, scenario: Option<String>) -> Result<RunConfig, CliError> {
    match (config, scenario) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)
        }
        (None, Some(name)) => {
            let s = ScenarioConfig::default_for(&name).ok_or_else(|| {
                let known: Vec<&str> = ScenarioConfig::names().iter().map(|(n, _)| *n).collect();
                CliError::Config(format!(
                    "unknown scenario {name:?}; known: {}",
                    known.join(", ")
                ))
            })?;
            Ok(RunConfig {
                system: Default::default(),
                family: Vec::new(),
                regions: Vec::new(),
                tasks: vec![TaskConfig::Scenario(s)],
                budgets: Default::default(),
                seed: 0,
            })
        }
        (None, None) => Err(CliError::Config(
            "either --config or --scenario is required".into(),
        )),
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            config,
            scenario,
            seed,
            out,
            budget_patterns,
            timeout_secs,
        } => {
            let mut cfg = match load(config, scenario) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            Overrides {
                seed,
                budget_patterns,
                timeout_secs,
            }
            .apply(&mut cfg);
            let env = match execute(&cfg) {
                Ok(env) => env,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            if let Err(e) = env.write(&out) {
                eprintln!("cannot write the report: {e}");
                return ExitCode::from(2);
            }
            for t in &env.tasks {
                let failed = t.assertions.iter().filter(|a| !a.holds).count();
                println!(
                    "task {:02} {:<28} {:?} ({} assertions, {failed} failed){}",
                    t.index,
                    t.task,
                    t.status,
                    t.assertions.len(),
                    t.error
                        .as_deref()
                        .map(|e| format!(": {e}"))
                        .unwrap_or_default()
                );
            }
            println!("report written to {}", out.display());
            let code = env.exit_code();
            // a timed-out worker may still be running; leave without joining it
            std::process::exit(code);
        }
        Command::Explain { anchor } => match explain::explain(&anchor) {
            Ok(text) => {
                println!("{anchor}: {text}");
                ExitCode::SUCCESS
            }
            Err(msg) => {
                eprintln!("{msg}");
                ExitCode::from(2)
            }
        },
        Command::ListScenarios => {
            for (name, about) in ScenarioConfig::names() {
                println!("{name:<18} {about}");
            }
            ExitCode::SUCCESS
        }
    }
}
