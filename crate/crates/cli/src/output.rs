//! JSON-Lines envelopes, CSV curves and the timing sidecar.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    /// File stem suffix, e.g. `curves` → `spec-sweep.curves.csv`.
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Curve {
    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub subcommand: &'static str,
    /// Fully resolved config; no `auto` survives.
    pub config: ExperimentConfig,
    pub records: Vec<Value>,
    pub curves: Vec<Curve>,
    pub wall_clock_s: f64,
    pub threads: usize,
}

impl RunOutput {
    pub fn new(subcommand: &'static str, config: ExperimentConfig) -> Self {
        RunOutput {
            subcommand,
            config,
            records: Vec::new(),
            curves: Vec::new(),
            wall_clock_s: 0.0,
            threads: 0,
        }
    }

    /// Appends `payload` with a `kind` tag in front.
    pub fn push<T: Serialize>(&mut self, kind: &str, payload: &T) {
        let mut obj = serde_json::Map::new();
        obj.insert("kind".into(), json!(kind));
        match serde_json::to_value(payload).expect("record serializes") {
            Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("value".into(), other);
            }
        }
        self.records.push(Value::Object(obj));
    }

    pub fn header(&self) -> Value {
        json!({
            "kind": "header",
            "schema_version": SCHEMA_VERSION,
            "artifact_version": hyperlab::VERSION,
            "subcommand": self.subcommand,
            "config_hash": self.config.hash(),
            "config": self.config,
        })
    }

    /// Header line followed by one line per record.
    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for v in std::iter::once(self.header()).chain(self.records.iter().cloned()) {
            s.push_str(&serde_json::to_string(&v).expect("json"));
            s.push('\n');
        }
        s
    }
}

/// Writes `<cmd>.jsonl`, one CSV per curve and `<cmd>.timing.json`; returns
/// the paths written.
pub fn write_outputs(dir: &Path, out: &RunOutput) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: &str| -> std::io::Result<()> {
        let p = dir.join(name);
        std::fs::File::create(&p)?.write_all(body.as_bytes())?;
        written.push(p);
        Ok(())
    };
    put(format!("{}.jsonl", out.subcommand), &out.to_jsonl())?;
    for c in &out.curves {
        put(format!("{}.{}.csv", out.subcommand, c.name), &c.to_csv())?;
    }
    let timing = json!({
        "subcommand": out.subcommand,
        "config_hash": out.config.hash(),
        "wall_clock_s": out.wall_clock_s,
        "threads": out.threads,
    });
    put(format!("{}.timing.json", out.subcommand), &format!("{timing:#}\n"))?;
    Ok(written)
}

/// One row of the `report` summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub file: String,
    pub subcommand: String,
    pub map: String,
    pub config_hash: String,
    pub records: usize,
    pub headline: String,
}

pub fn summarize(file: &Path, text: &str) -> Result<ReportRow, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Value = serde_json::from_str(lines.next().ok_or("empty file")?).map_err(|e| e.to_string())?;
    if header["kind"] != "header" {
        return Err("first line is not a header".into());
    }
    let records: Vec<Value> = lines
        .map(|l| serde_json::from_str(l).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let sub = header["subcommand"].as_str().unwrap_or("?").to_string();
    let headline = headline(&sub, &records);
    Ok(ReportRow {
        file: file.display().to_string(),
        map: header["config"]["map"].as_str().unwrap_or("?").to_string(),
        config_hash: header["config_hash"].as_str().unwrap_or("").chars().take(12).collect(),
        records: records.len(),
        subcommand: sub,
        headline,
    })
}

fn headline(sub: &str, records: &[Value]) -> String {
    let first = |kind: &str| records.iter().find(|r| r["kind"] == kind);
    match sub {
        "lyapunov" => first("estimate").map(|r| format!("exponents {}", r["exponents"])),
        "hyptimes" => first("report").map(|r| {
            format!("c={} ℓ={} freq={} tail={}", r["c"], r["ell"], r["frequency_hat"], r["gap_tail_max"])
        }),
        "closing" => first("witness").map(|r| format!("period={} K={}", r["period"], r["overshoot"])),
        "spec-sweep" => first("curves").map(|r| {
            let limits: Vec<String> = r["curves"]
                .as_array()
                .into_iter()
                .flatten()
                .map(|c| format!("η={}:{}", c["eta"], c["limit_estimate"]))
                .collect();
            format!("max K/n at largest n {}", limits.join(" "))
        }),
        "recurrence" => first("fit").map(|r| format!("slope={} bounds={}", r["slope"], r["bounds"])),
        _ => None,
    }
    .unwrap_or_else(|| "-".into())
}

pub fn render_table(rows: &[ReportRow]) -> String {
    let cols = ["file", "subcommand", "map", "config", "records", "headline"];
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.file.clone(),
                r.subcommand.clone(),
                r.map.clone(),
                r.config_hash.clone(),
                r.records.to_string(),
                r.headline.clone(),
            ]
        })
        .collect();
    let mut width = cols.map(|c| c.chars().count());
    for row in &cells {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |items: Vec<&str>| {
        items
            .iter()
            .zip(width)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut s = line(cols.to_vec());
    s.push('\n');
    for row in &cells {
        s.push_str(&line(row.iter().map(String::as_str).collect()));
        s.push('\n');
    }
    s
}
