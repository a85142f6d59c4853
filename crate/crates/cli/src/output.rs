//! Output directory: JSON reports carrying the config hash, CSV tables with
//! header rows, and a metadata file for everything non-deterministic.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::CliError;

pub struct Output {
    dir: PathBuf,
    command: &'static str,
    experiment: String,
    hash: String,
    seed: u64,
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(format!("output: {e}"))
}

impl Output {
    pub fn new(dir: PathBuf, command: &'static str, experiment: String, hash: String, seed: u64) -> Result<Self, CliError> {
        std::fs::create_dir_all(&dir).map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self { dir, command, experiment, hash, seed })
    }

    pub fn create(&self, name: &str) -> Result<BufWriter<File>, CliError> {
        File::create(self.dir.join(name)).map(BufWriter::new).map_err(io_err)
    }

    pub fn csv<H, I>(&self, name: &str, header: &[H], rows: I) -> Result<(), CliError>
    where
        H: AsRef<str>,
        I: Iterator<Item = Vec<String>>,
    {
        let mut w = csv::Writer::from_writer(self.create(name)?);
        w.write_record(header.iter().map(|h| h.as_ref())).map_err(io_err)?;
        for row in rows {
            w.write_record(&row).map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }

    /// `report.json`: deterministic for a given config and seed.
    pub fn report<T: Serialize>(&self, body: &T, claims_hold: bool) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Envelope<'a, T> {
            command: &'a str,
            experiment: &'a str,
            config_hash: &'a str,
            seed: u64,
            claims_hold: bool,
            report: &'a T,
        }
        let env = Envelope {
            command: self.command,
            experiment: &self.experiment,
            config_hash: &self.hash,
            seed: self.seed,
            claims_hold,
            report: body,
        };
        serde_json::to_writer_pretty(self.create("report.json")?, &env).map_err(io_err)
    }

    /// `metadata.json`: timestamps, runtime, thread count and version.
    pub fn metadata(&self, started: SystemTime, threads: usize) -> Result<(), CliError> {
        let secs = |t: SystemTime| t.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
        let now = SystemTime::now();
        let meta = serde_json::json!({
            "config_hash": self.hash,
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "started_unix": secs(started),
            "finished_unix": secs(now),
            "runtime_seconds": now.duration_since(started).map(|d| d.as_secs_f64()).unwrap_or(0.0),
            "threads": threads,
        });
        serde_json::to_writer_pretty(self.create("metadata.json")?, &meta).map_err(io_err)
    }
}
