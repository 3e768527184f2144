//! Configuration-driven runner: parses a JSON run configuration, executes its tasks in
//! order and assembles a deterministic report.

pub mod config;
pub mod explain;
pub mod report;
pub mod tasks;

use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use config::{parse_config, RunConfig};
pub use report::{Envelope, Status, TaskRecord};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Command-line overrides applied on top of a configuration file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub budget_patterns: Option<usize>,
    pub timeout_secs: Option<u64>,
}

impl Overrides {
    pub fn apply(self, cfg: &mut RunConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(p) = self.budget_patterns {
            cfg.budgets.max_patterns = p;
        }
        if let Some(t) = self.timeout_secs {
            cfg.budgets.timeout_secs = t;
        }
    }
}

/// Runs every task of a validated configuration. Each task runs on a worker thread
/// with the configured timeout; after a timeout the remaining tasks are not started.
/// Task seeds are drawn in order from one generator seeded by the run seed.
pub fn execute(cfg: &RunConfig) -> Result<Envelope, CliError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let timeout = Duration::from_secs(cfg.budgets.timeout_secs);
    let mut records = Vec::with_capacity(cfg.tasks.len());
    for index in 0..cfg.tasks.len() {
        let seed = rng.next_u64();
        let (tx, rx) = mpsc::channel();
        let job = cfg.clone();
        thread::spawn(move || {
            let _ = tx.send(tasks::run_task(&job, index, seed));
        });
        match rx.recv_timeout(timeout) {
            Ok(rec) => records.push(rec),
            Err(mpsc::RecvTimeoutError::Timeout) => {
                let mut rec = TaskRecord::new(index, &tasks::task_name(&cfg.tasks[index]), seed);
                rec.status = Status::Timeout;
                rec.error = Some(format!("no result within {} s", cfg.budgets.timeout_secs));
                rec.elapsed = timeout;
                records.push(rec);
                break;
            }
            Err(mpsc::RecvTimeoutError::Disconnected) => {
                let mut rec = TaskRecord::new(index, &tasks::task_name(&cfg.tasks[index]), seed);
                rec.status = Status::Error;
                rec.error = Some("task panicked".into());
                records.push(rec);
            }
        }
    }
    let passed =
        records.len() == cfg.tasks.len() && records.iter().all(|r| r.status == Status::Pass);
    Ok(Envelope {
        tool: "indlab",
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        config: serde_json::to_value(cfg).expect("serializable config"),
        tasks: records,
        passed,
    })
}
