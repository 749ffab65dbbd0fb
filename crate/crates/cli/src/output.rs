//! Rendering and run-directory persistence.

use std::collections::BTreeSet;
use std::fs;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::{ops, Cli, Command, Format, RunError};

/// Everything that determines a run's payload. Worker count and output
/// options are excluded on purpose.
#[derive(Debug, Serialize)]
pub struct ExperimentConfig<'a> {
    pub command: &'a Command,
    pub family: Option<&'a str>,
    pub spec: Option<String>,
    pub n: &'a [usize],
    pub m: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    #[serde(rename = "box")]
    pub bbox: Option<&'a str>,
}

impl<'a> ExperimentConfig<'a> {
    pub fn from_cli(cli: &'a Cli) -> Self {
        ExperimentConfig {
            command: &cli.cmd,
            family: cli.family.as_deref(),
            spec: cli.spec.as_ref().map(|p| p.display().to_string()),
            n: &cli.n,
            m: cli.m,
            trials: cli.trials,
            seed: cli.seed,
            bbox: cli.bbox.as_deref(),
        }
    }

    pub fn operation(&self) -> &'static str {
        match self.command {
            Command::Label { .. } => "label",
            Command::Count { .. } => "count",
            Command::Bound { .. } => "bound",
            Command::Lower { .. } => "lower",
            Command::Construct { .. } => "construct",
            Command::Wallpair { .. } => "wallpair",
            Command::VerifyFamily { .. } => "verify-family",
            Command::SepCheck { .. } => "sep-check",
        }
    }
}

#[derive(Debug, Serialize)]
struct RunRecord<'a> {
    config: &'a ExperimentConfig<'a>,
    started_unix_ms: u128,
    finished_unix_ms: u128,
    version: &'static str,
    exact_arithmetic: bool,
    payload_file: &'static str,
    payload_sha256: String,
    payload: &'a Value,
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

fn io_err(what: &str, e: std::io::Error) -> RunError {
    RunError::Config(format!("{what}: {e}"))
}

pub fn run(cli: &Cli) -> Result<String, RunError> {
    let config = ExperimentConfig::from_cli(cli);
    let started = now_ms();
    let payload = ops::dispatch(cli)?;
    let finished = now_ms();
    if let Some(out) = &cli.out {
        let config_json = serde_json::to_vec(&config).expect("config serializes");
        let digest = hex::encode(Sha256::digest(&config_json));
        let dir = out.join(format!("{}-{}", config.operation(), &digest[..12]));
        fs::create_dir_all(&dir).map_err(|e| io_err("cannot create run directory", e))?;
        let payload_bytes = serde_json::to_vec_pretty(&payload).expect("payload serializes");
        fs::write(dir.join("payload.json"), &payload_bytes).map_err(|e| io_err("cannot write payload", e))?;
        let record = RunRecord {
            config: &config,
            started_unix_ms: started,
            finished_unix_ms: finished,
            version: env!("CARGO_PKG_VERSION"),
            exact_arithmetic: true,
            payload_file: "payload.json",
            payload_sha256: hex::encode(Sha256::digest(&payload_bytes)),
            payload: &payload,
        };
        let manifest = serde_json::to_vec_pretty(&record).expect("record serializes");
        fs::write(dir.join("manifest.json"), manifest).map_err(|e| io_err("cannot write manifest", e))?;
    }
    Ok(render(&payload, cli.format))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn rows(payload: &Value) -> Vec<Map<String, Value>> {
    match payload {
        Value::Array(items) => items
            .iter()
            .map(|v| match v {
                Value::Object(m) => m.clone(),
                other => Map::from_iter([("value".to_string(), other.clone())]),
            })
            .collect(),
        Value::Object(m) => vec![m.clone()],
        other => vec![Map::from_iter([("value".to_string(), other.clone())])],
    }
}

fn columns(rows: &[Map<String, Value>]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut cols = Vec::new();
    for r in rows {
        for k in r.keys() {
            if seen.insert(k.clone()) {
                cols.push(k.clone());
            }
        }
    }
    cols
}

pub fn render(payload: &Value, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string(payload).expect("payload serializes")),
        Format::Table => {
            let rows = rows(payload);
            let cols = columns(&rows);
            if rows.len() == 1 {
                let width = cols.iter().map(String::len).max().unwrap_or(0);
                cols.iter()
                    .map(|c| format!("{c:<width$}  {}\n", scalar(&rows[0][c])))
                    .collect()
            } else {
                let cells: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| cols.iter().map(|c| r.get(c).map(scalar).unwrap_or_default()).collect())
                    .collect();
                let widths: Vec<usize> = cols
                    .iter()
                    .enumerate()
                    .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap_or(0))
                    .collect();
                let line = |vals: &[String]| -> String {
                    let parts: Vec<String> = vals.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect();
                    format!("{}\n", parts.join("  ").trim_end())
                };
                let mut out = line(&cols);
                for r in &cells {
                    out.push_str(&line(r));
                }
                out
            }
        }
        Format::Csv => {
            let rows = rows(payload);
            let cols = columns(&rows);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&cols).expect("in-memory csv");
            for r in &rows {
                w.write_record(cols.iter().map(|c| r.get(c).map(scalar).unwrap_or_default()))
                    .expect("in-memory csv");
            }
            String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn table_and_csv_rendering() {
        let v = json!([{"n": 3, "distinct": "8"}, {"n": 4, "distinct": "41"}]);
        assert_eq!(render(&v, Format::Csv), "distinct,n\n8,3\n41,4\n");
        assert_eq!(render(&v, Format::Table), "distinct  n\n8         3\n41        4\n");
        let one = json!({"value": "16", "m": 2});
        assert_eq!(render(&one, Format::Table), "m      2\nvalue  16\n");
    }
}
