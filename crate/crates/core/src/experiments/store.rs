//! CSV result files, one per scenario id.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::sweep::{Row, RowEngine, SweepResult};
use super::{io_err, ExperimentError, Result};

pub const SCHEMA_VERSION: u32 = 1;

const COLUMNS: &str = "scenario_id,engine,scheme,N,X,P_dBm,SNR_dB,MI_bits,std_err,runtime_s";

pub fn result_path(dir: &Path, scenario_id: &str) -> PathBuf {
    dir.join(format!("{scenario_id}.csv"))
}

fn fmt(v: f64, digits: usize) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.digits$}")
    }
}

pub(crate) fn render(result: &SweepResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# schema_version: {SCHEMA_VERSION}");
    let _ = writeln!(out, "# scenario_id: {}", result.scenario_id);
    let _ = writeln!(out, "# scenario_sha256: {}", result.scenario_hash);
    let _ = writeln!(out, "# seed: {}", result.seed);
    let _ = writeln!(out, "# engine: {} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"));
    for e in &result.errors {
        let _ = writeln!(out, "# error: {}", e.replace('\n', " "));
    }
    out.push_str(COLUMNS);
    out.push('\n');
    for r in &result.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.scenario_id,
            r.engine.as_str(),
            r.scheme,
            r.n,
            r.x,
            fmt(r.p_dbm, 4),
            fmt(r.snr_db, 6),
            fmt(r.mi_bits, 6),
            fmt(r.std_err, 6),
            fmt(r.runtime_s, 3),
        );
    }
    out
}

/// Writes `<dir>/<scenario_id>.csv`, replacing an older file for the same id.
pub fn persist(result: &SweepResult, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = result_path(dir, &result.scenario_id);
    let tmp = path.with_extension("csv.tmp");
    std::fs::write(&tmp, render(result)).map_err(io_err(&tmp))?;
    std::fs::rename(&tmp, &path).map_err(io_err(&path))?;
    Ok(path)
}

pub fn load(path: &Path) -> Result<SweepResult> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(ExperimentError::NotFound(path.to_path_buf())),
        Err(e) => return Err(io_err(path)(e)),
    };
    let parse_err = |line: usize, message: String| ExperimentError::Parse { path: path.to_path_buf(), line, message };
    let mut result = SweepResult {
        scenario_id: String::new(),
        scenario_hash: String::new(),
        seed: 0,
        rows: Vec::new(),
        errors: Vec::new(),
    };
    let mut version = None;
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if let Some(meta) = line.strip_prefix("# ") {
            let (k, v) = meta.split_once(": ").unwrap_or((meta, ""));
            match k {
                "schema_version" => version = Some(v.to_string()),
                "scenario_id" => result.scenario_id = v.to_string(),
                "scenario_sha256" => result.scenario_hash = v.to_string(),
                "seed" => result.seed = v.parse().map_err(|_| parse_err(lineno, format!("bad seed {v:?}")))?,
                "error" => result.errors.push(v.to_string()),
                _ => {}
            }
            continue;
        }
        match version.as_deref() {
            Some(v) if v == SCHEMA_VERSION.to_string() => {}
            found => {
                return Err(ExperimentError::VersionMismatch {
                    path: path.to_path_buf(),
                    found: found.unwrap_or("none").to_string(),
                    expected: SCHEMA_VERSION,
                })
            }
        }
        if !header_seen {
            if line != COLUMNS {
                return Err(parse_err(lineno, format!("unexpected header {line:?}")));
            }
            header_seen = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(parse_err(lineno, format!("expected 10 fields, found {}", f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| parse_err(lineno, format!("bad number {s:?}")));
        let int = |s: &str| s.parse::<u32>().map_err(|_| parse_err(lineno, format!("bad integer {s:?}")));
        result.rows.push(Row {
            scenario_id: f[0].to_string(),
            engine: RowEngine::parse(f[1]).ok_or_else(|| parse_err(lineno, format!("unknown engine {:?}", f[1])))?,
            scheme: f[2].to_string(),
            n: int(f[3])?,
            x: int(f[4])?,
            p_dbm: num(f[5])?,
            snr_db: num(f[6])?,
            mi_bits: num(f[7])?,
            std_err: num(f[8])?,
            runtime_s: num(f[9])?,
        });
    }
    if version.is_none() {
        return Err(ExperimentError::VersionMismatch { path: path.to_path_buf(), found: "none".into(), expected: SCHEMA_VERSION });
    }
    Ok(result)
}
