//! Report plumbing shared by the command-line front end.
//!
//! Verification reports themselves live next to the code that produces them
//! ([`crate::spreads::SpreadReport`], [`crate::parallelism::ParallelismReport`],
//! [`crate::suite::TheoremSuiteReport`]); they are pure functions of their
//! inputs. Everything wall-clock-dependent is collected here in [`RunMeta`],
//! which is emitted separately so report files stay byte-identical across
//! runs and worker counts.

use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

/// Non-deterministic run facts, kept out of the reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMeta {
    pub command: String,
    pub started_unix_ms: u128,
    pub duration_ms: u128,
    pub threads: usize,
    pub version: String,
}

/// Stopwatch producing a [`RunMeta`].
pub struct MetaTimer {
    command: String,
    started: SystemTime,
    clock: Instant,
}

impl MetaTimer {
    pub fn start(command: &str) -> Self {
        Self { command: command.to_string(), started: SystemTime::now(), clock: Instant::now() }
    }

    pub fn finish(self) -> RunMeta {
        RunMeta {
            command: self.command,
            started_unix_ms: self
                .started
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0),
            duration_ms: self.clock.elapsed().as_millis(),
            threads: rayon::current_num_threads(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Product-action / conjugation battery run by `clifford-check`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckBatteryReport {
    pub samples: u64,
    pub seed: u64,
    pub criteria: Vec<crate::suite::CriterionResult>,
    pub pass: bool,
}

/// One line in both representations, as dumped by `coords`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoordsEntry {
    pub pluecker: [f64; 6],
    pub x: [f64; 3],
    pub y: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoordsReport {
    pub lines: Vec<CoordsEntry>,
}

/// Writes a CSV sample dump: a header line followed by prebuilt rows.
pub fn write_csv<I>(path: &Path, header: &str, rows: I) -> std::io::Result<()>
where
    I: IntoIterator<Item = String>,
{
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    out.flush()
}
