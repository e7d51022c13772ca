//! Report envelopes and plot tables.

use bergman_core::experiments::{DeltaPowerReport, RamadanovReport, RatioReport, ScalingReport};
use serde::Serialize;
use std::fmt::Write;

use crate::config::ExperimentConfig;
use crate::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiemannTable {
    pub minus_psi: Vec<f64>,
    /// Sup over the grid of `|F_j(z) - z|`.
    pub sup_deviation: Vec<f64>,
    pub decreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelValue {
    pub z: [f64; 2],
    pub w: [f64; 2],
    pub alpha: usize,
    pub beta: usize,
    pub value: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Payload {
    Ratio(RatioReport),
    DeltaPower(DeltaPowerReport),
    Scaling(ScalingReport),
    Riemann(RiemannTable),
    Ramadanov(RamadanovReport),
    Kernel(KernelValue),
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportEnvelope {
    pub schema: u32,
    pub version: String,
    pub experiment: String,
    pub config: ExperimentConfig,
    pub runtime_seconds: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub payload: Payload,
}

impl ReportEnvelope {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn payload_json(&self) -> String {
        serde_json::to_string(&self.payload).expect("reports always serialize")
    }
}

/// One plot-table row: key, numerator, denominator, target.
type Row = (f64, f64, f64, f64);

fn rows(payload: &Payload) -> Result<(&'static str, Vec<Row>), CliError> {
    let out = match payload {
        Payload::Ratio(r) => (
            "delta",
            r.deltas
                .iter()
                .zip(&r.numerators)
                .zip(&r.denominators)
                .map(|((d, n), m)| (*d, *n, *m, r.target))
                .collect(),
        ),
        Payload::Scaling(r) => {
            let target = r.target * std::f64::consts::PI;
            (
                "minus_psi",
                r.rows
                    .iter()
                    .map(|x| (x.minus_psi, x.scaled_diagonal, x.unweighted_scaled_diagonal, target))
                    .collect(),
            )
        }
        Payload::Riemann(t) => (
            "minus_psi",
            t.minus_psi
                .iter()
                .zip(&t.sup_deviation)
                .map(|(e, s)| (*e, *s, 1.0, 0.0))
                .collect(),
        ),
        Payload::Ramadanov(r) => (
            "j",
            r.js
                .iter()
                .zip(&r.values)
                .map(|(j, v)| (*j as f64, *v, r.target, 1.0))
                .collect(),
        ),
        Payload::DeltaPower(_) | Payload::Kernel(_) => {
            return Err(CliError::Config(
                "this experiment has no plot table; use `--format json`".into(),
            ))
        }
    };
    Ok(out)
}

fn num(x: f64) -> String {
    format!("{x:.11e}")
}

/// CSV with columns `delta (or j), numerator, denominator, ratio, target`, rows in input order.
pub fn emit_plot_table(payload: &Payload) -> Result<String, CliError> {
    let (key, rows) = rows(payload)?;
    if rows.is_empty() {
        return Err(CliError::Config("empty payload".into()));
    }
    let mut s = format!("{key},numerator,denominator,ratio,target\n");
    for (k, n, d, t) in rows {
        let k = if key == "j" { format!("{}", k as u64) } else { num(k) };
        writeln!(s, "{k},{},{},{},{}", num(n), num(d), num(n / d), num(t)).unwrap();
    }
    Ok(s)
}
