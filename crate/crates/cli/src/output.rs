//! Result tables in CSV or JSON.

use crate::settings::{CliError, CliResult, Model};
use isocrit::Method;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

pub const HEADER: [&str; 12] = [
    "space", "N", "eta2", "kappa2", "regime", "index", "grid_value", "quantity", "value", "error", "method", "seed",
];

/// One table row; `None` fields are written empty (CSV) or `null` (JSON).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub space: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub eta2: Option<f64>,
    pub kappa2: Option<f64>,
    pub regime: Option<String>,
    pub index: Option<usize>,
    pub grid_value: Option<f64>,
    pub quantity: String,
    pub value: f64,
    pub error: f64,
    pub method: String,
    pub seed: Option<u64>,
}

/// Model columns shared by all rows of a table.
#[derive(Debug, Clone)]
pub struct RowBase {
    space: String,
    n: usize,
    eta2: Option<f64>,
    kappa2: Option<f64>,
    regime: Option<String>,
    seed: Option<u64>,
}

impl RowBase {
    pub fn from_model(m: &Model, seed: Option<u64>) -> Self {
        let p = m.get().params();
        RowBase {
            space: p.space.as_str().to_string(),
            n: p.n,
            eta2: Some(m.eta2()),
            kappa2: Some(m.kappa2()),
            regime: Some(p.regime.as_str().to_string()),
            seed,
        }
    }

    pub fn goi(n: usize, degenerate: bool) -> Self {
        RowBase {
            space: "goi".into(),
            n,
            eta2: None,
            kappa2: None,
            regime: Some(if degenerate { "boundary" } else { "nonboundary" }.into()),
            seed: None,
        }
    }

    pub fn row(&self, index: Option<usize>, grid: Option<f64>, quantity: &str, value: f64, error: f64, method: &str) -> Row {
        Row {
            space: self.space.clone(),
            n: self.n,
            eta2: self.eta2,
            kappa2: self.kappa2,
            regime: self.regime.clone(),
            index,
            grid_value: grid,
            quantity: quantity.to_string(),
            value,
            error,
            method: method.to_string(),
            seed: if method == Method::ClosedForm.as_str() || method == Method::Quadrature.as_str() {
                None
            } else {
                self.seed
            },
        }
    }
}

fn fmt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn fmt_f64(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else {
        v.to_string()
    }
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.space.clone(),
            r.n.to_string(),
            fmt(r.eta2),
            fmt(r.kappa2),
            r.regime.clone().unwrap_or_default(),
            r.index.map(|i| i.to_string()).unwrap_or_default(),
            fmt(r.grid_value),
            r.quantity.clone(),
            fmt_f64(r.value),
            fmt_f64(r.error),
            r.method.clone(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(value: &T, mut out: W) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

/// Write a table to `path` (or stdout) in the requested format.
pub fn emit(rows: &[Row], csv: bool, path: Option<&Path>) -> CliResult<()> {
    let sink: Box<dyn Write> = match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(std::io::BufWriter::new(std::fs::File::create(p)?))
        }
        None => Box::new(std::io::stdout().lock()),
    };
    if csv {
        write_csv(rows, sink)
    } else {
        write_json(rows, sink)
    }
}
