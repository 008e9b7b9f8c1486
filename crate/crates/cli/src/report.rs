//! CSV and manifest output. Numbers are written with 17 significant digits.

use std::fmt::Write as _;

use serde::Serialize;

use crate::config::{ExperimentConfig, Method};
use crate::experiment::{Derived, DiagSummary, PointOutcome, Rows};

/// `x` with 17 significant digits, enough to round-trip an `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn point_file_name(system: &str, p: &PointOutcome, index: usize) -> String {
    format!("{system}_{}_{index:03}.csv", p.method)
}

pub fn point_csv(p: &PointOutcome) -> Option<String> {
    let data = p.result.as_ref().ok()?;
    let mut s = String::new();
    let rows = match &data.rows {
        Rows::Trace(r) => {
            s.push_str("t,eps_sol,eps_norm\n");
            r
        }
        Rows::Phase(r) => {
            s.push_str("phi,R,eps_sol_rel\n");
            r
        }
    };
    for row in rows {
        let _ = writeln!(s, "{},{},{}", num(row[0]), num(row[1]), num(row[2]));
    }
    Some(s)
}

pub const SUMMARY_HEADER: &str =
    "point,method,area,dt,N_t,m_k,N_Cheby,eps_sol_max,eps_norm_max,k_max,wall_seconds,status";

/// One summary line. Failed points keep their identifying columns and
/// carry the reason in `status`.
pub fn summary_line(file: &str, p: &PointOutcome) -> String {
    let area = p.area.map(num).unwrap_or_default();
    let ident = format!("{file},{},{area},{}", p.method, num(p.dt));
    match &p.result {
        Ok(d) => {
            let n_t = if p.method == Method::Ito { d.diag.max_n_t } else { 0 };
            format!(
                "{ident},{n_t},{},{},{},{},{},{},ok",
                d.diag.max_m_k,
                d.diag.max_n_cheby,
                num(d.eps_sol_max),
                num(d.eps_norm_max),
                d.diag.max_k,
                num(p.wall_seconds)
            )
        }
        Err(e) => format!("{ident},,,,,,,{},failed: {}", num(p.wall_seconds), sanitize(e)),
    }
}

// keep the reason inside one CSV field
fn sanitize(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub file: String,
    pub method: Method,
    pub dt: f64,
    pub n_t: usize,
    pub area: Option<f64>,
    pub status: String,
    pub eps_sol_max: Option<f64>,
    pub eps_norm_max: Option<f64>,
    pub diagnostics: Option<DiagSummary>,
    pub wall_seconds: f64,
}

impl PointRecord {
    pub fn new(file: String, p: &PointOutcome) -> Self {
        let ok = p.result.as_ref().ok();
        Self {
            file,
            method: p.method,
            dt: p.dt,
            n_t: p.n_t,
            area: p.area,
            status: match &p.result {
                Ok(_) => "ok".into(),
                Err(e) => format!("failed: {e}"),
            },
            eps_sol_max: ok.map(|d| d.eps_sol_max),
            eps_norm_max: ok.map(|d| d.eps_norm_max),
            diagnostics: ok.map(|d| d.diag),
            wall_seconds: p.wall_seconds,
        }
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub threads: Option<usize>,
    /// The config file exactly as read.
    pub config_text: String,
    /// The config after defaults were filled in.
    pub config: ExperimentConfig,
    pub derived: Derived,
    pub points: Vec<PointRecord>,
    pub wall_seconds: f64,
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
