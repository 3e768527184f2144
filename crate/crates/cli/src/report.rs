//! Report envelope and its on-disk form: `report.json`, one CSV per table and a
//! `timings.json` sidecar holding everything that varies between runs.

use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::time::Duration;

use serde::Serialize;

use crate::CliError;

/// Direction in which a reported number bounds the quantity it estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Exact,
    Upper,
    Lower,
    Evidence,
}

impl Bound {
    fn as_str(self) -> &'static str {
        match self {
            Bound::Exact => "exact",
            Bound::Upper => "upper",
            Bound::Lower => "lower",
            Bound::Evidence => "evidence",
        }
    }
}

/// A number with its bound direction; values are kept as exact strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Quantity {
    pub value: String,
    pub bound: Bound,
}

pub fn q(value: impl Display, bound: Bound) -> Quantity {
    Quantity {
        value: value.to_string(),
        bound,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Column {
    pub name: String,
    /// `None` for labels and flags.
    pub bound: Option<Bound>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Columns given as `name` or `name:bound`.
    pub fn new(name: &str, columns: &[&str]) -> Self {
        let columns = columns
            .iter()
            .map(|c| match c.split_once(':') {
                Some((n, b)) => Column {
                    name: n.into(),
                    bound: Some(match b {
                        "exact" => Bound::Exact,
                        "upper" => Bound::Upper,
                        "lower" => Bound::Lower,
                        _ => Bound::Evidence,
                    }),
                },
                None => Column {
                    name: (*c).into(),
                    bound: None,
                },
            })
            .collect();
        Table {
            name: name.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
    Budget,
    Timeout,
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskRecord {
    pub index: usize,
    pub task: String,
    pub status: Status,
    pub seed: u64,
    pub summary: serde_json::Map<String, serde_json::Value>,
    pub assertions: Vec<Assertion>,
    pub tables: Vec<Table>,
    pub error: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
    /// Per-row wall-clock times, in the order of the first table's rows.
    #[serde(skip)]
    pub row_timings: Vec<Duration>,
}

impl TaskRecord {
    pub fn new(index: usize, task: &str, seed: u64) -> Self {
        TaskRecord {
            index,
            task: task.into(),
            status: Status::Pass,
            seed,
            summary: serde_json::Map::new(),
            assertions: Vec::new(),
            tables: Vec::new(),
            error: None,
            elapsed: Duration::ZERO,
            row_timings: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(
            key.into(),
            serde_json::to_value(value).expect("serializable summary"),
        );
    }

    pub fn check(&mut self, name: impl Into<String>, holds: bool) {
        self.assertions.push(Assertion {
            name: name.into(),
            holds,
        });
        if !holds && self.status == Status::Pass {
            self.status = Status::Fail;
        }
    }

    pub fn fail_with(&mut self, err: &indlab_core::Error) {
        self.status = if err.is_budget() {
            Status::Budget
        } else {
            Status::Error
        };
        self.error = Some(err.to_string());
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config: serde_json::Value,
    pub tasks: Vec<TaskRecord>,
    pub passed: bool,
}

impl Envelope {
    /// 0 pass, 1 assertion failure or task error, 3 budget or timeout.
    pub fn exit_code(&self) -> i32 {
        if self
            .tasks
            .iter()
            .any(|t| matches!(t.status, Status::Budget | Status::Timeout))
        {
            3
        } else if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable report");
        s.push('\n');
        s
    }

    /// Writes the report, the CSV tables and the timing sidecar into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json())?;
        for t in &self.tasks {
            for table in &t.tables {
                let path = dir.join(format!("task{:02}-{}.csv", t.index, table.name));
                let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
                let header: Vec<String> = table
                    .columns
                    .iter()
                    .map(|c| match c.bound {
                        Some(b) => format!("{}[{}]", c.name, b.as_str()),
                        None => c.name.clone(),
                    })
                    .collect();
                w.write_record(&header).map_err(csv_err)?;
                for row in &table.rows {
                    w.write_record(row).map_err(csv_err)?;
                }
                w.flush()?;
            }
        }
        let timings: Vec<serde_json::Value> = self
            .tasks
            .iter()
            .map(|t| {
                serde_json::json!({
                    "index": t.index,
                    "task": t.task,
                    "elapsed_ms": t.elapsed.as_millis() as u64,
                    "row_ms": t.row_timings.iter().map(|d| d.as_millis() as u64).collect::<Vec<_>>(),
                })
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&timings).expect("serializable timings");
        s.push('\n');
        fs::write(dir.join("timings.json"), s)?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}
