//! Report rows and their CSV / JSON / text serializations.
//!
//! Column order and key names are a stable interface tagged by
//! [`SCHEMA_VERSION`]. Floats are written in shortest round-trip form.

use std::io::Write;

use serde::Serialize;

use crate::bounds::Theorem;
use crate::convexity::ConvexityVerdict;
use crate::domain::BoundReport;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Holds,
    Violated,
    GateFailed,
    NotApplicable,
    InputError,
}

impl RowStatus {
    pub fn id(self) -> &'static str {
        match self {
            RowStatus::Holds => "holds",
            RowStatus::Violated => "violated",
            RowStatus::GateFailed => "gate_failed",
            RowStatus::NotApplicable => "not_applicable",
            RowStatus::InputError => "input_error",
        }
    }
}

/// One `(configuration, theorem)` outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub schema: u32,
    pub function: String,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub m: f64,
    pub lambda: f64,
    pub mu: f64,
    pub q: f64,
    pub theorem: Theorem,
    pub status: RowStatus,
    pub holds: bool,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub slack: Option<f64>,
    pub quad_error: Option<f64>,
    pub branch1: Option<f64>,
    pub branch2: Option<f64>,
    pub loose_rhs: Option<f64>,
    pub gate_holds: Option<bool>,
    pub gate_worst_violation: Option<f64>,
    pub gate_witness_x: Option<f64>,
    pub gate_witness_y: Option<f64>,
    pub gate_witness_t: Option<f64>,
    pub message: String,
}

/// Coordinates of one row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowKey {
    pub function: String,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub m: f64,
    pub lambda: f64,
    pub mu: f64,
    pub q: f64,
    pub theorem: Theorem,
}

impl ReportRow {
    pub fn new(key: RowKey, status: RowStatus) -> Self {
        ReportRow {
            schema: SCHEMA_VERSION,
            function: key.function,
            a: key.a,
            b: key.b,
            alpha: key.alpha,
            m: key.m,
            lambda: key.lambda,
            mu: key.mu,
            q: key.q,
            theorem: key.theorem,
            status,
            holds: false,
            lhs: None,
            rhs: None,
            slack: None,
            quad_error: None,
            branch1: None,
            branch2: None,
            loose_rhs: None,
            gate_holds: None,
            gate_worst_violation: None,
            gate_witness_x: None,
            gate_witness_y: None,
            gate_witness_t: None,
            message: String::new(),
        }
    }

    pub fn with_message(mut self, msg: impl Into<String>) -> Self {
        self.message = msg.into();
        self
    }

    pub fn with_gate(mut self, v: &ConvexityVerdict) -> Self {
        self.gate_holds = Some(v.holds);
        self.gate_worst_violation = Some(v.worst_violation);
        self.gate_witness_x = Some(v.witness.0);
        self.gate_witness_y = Some(v.witness.1);
        self.gate_witness_t = Some(v.witness.2);
        self
    }

    pub fn with_report(mut self, r: &BoundReport) -> Self {
        self.status = if r.holds { RowStatus::Holds } else { RowStatus::Violated };
        self.holds = r.holds;
        self.lhs = Some(r.lhs);
        self.rhs = Some(r.rhs);
        self.slack = Some(r.slack);
        self.quad_error = Some(r.quad_error);
        self.branch1 = r.branches.map(|b| b[0]);
        self.branch2 = r.branches.map(|b| b[1]);
        self.loose_rhs = r.loose_rhs;
        self
    }

    pub fn config_label(&self) -> String {
        format!(
            "{} [{}, {}] alpha={} m={} lambda={} mu={} q={} {}",
            self.function, self.a, self.b, self.alpha, self.m, self.lambda, self.mu, self.q, self.theorem
        )
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Unknown(format!("write failed: {e}"))
}

pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// A JSON array with one compact object per line.
pub fn write_json<W: Write>(rows: &[ReportRow], mut out: W) -> Result<()> {
    writeln!(out, "[").map_err(io_err)?;
    for (i, row) in rows.iter().enumerate() {
        let sep = if i + 1 == rows.len() { "" } else { "," };
        let line = serde_json::to_string(row).map_err(io_err)?;
        writeln!(out, "{line}{sep}").map_err(io_err)?;
    }
    writeln!(out, "]").map_err(io_err)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_else(|| "-".to_owned())
}

pub fn write_text<W: Write>(rows: &[ReportRow], mut out: W) -> Result<()> {
    for row in rows {
        let lines = [
            format!("config     {}", row.config_label()),
            format!("status     {}", row.status.id()),
            format!("holds      {}", row.holds),
            format!("lhs        {}", opt(row.lhs)),
            format!("rhs        {}", opt(row.rhs)),
            format!("slack      {}", opt(row.slack)),
            format!("quad_error {}", opt(row.quad_error)),
            format!("branches   {} {}", opt(row.branch1), opt(row.branch2)),
            format!(
                "gate       {} worst={} witness=({}, {}, {})",
                row.gate_holds.map(|h| h.to_string()).unwrap_or_else(|| "-".into()),
                opt(row.gate_worst_violation),
                opt(row.gate_witness_x),
                opt(row.gate_witness_y),
                opt(row.gate_witness_t)
            ),
        ];
        for l in lines {
            writeln!(out, "{l}").map_err(io_err)?;
        }
        if row.loose_rhs.is_some() {
            writeln!(out, "loose_rhs  {}", opt(row.loose_rhs)).map_err(io_err)?;
        }
        if !row.message.is_empty() {
            writeln!(out, "message    {}", row.message).map_err(io_err)?;
        }
    }
    Ok(())
}

/// Counts over a finished sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub holds: usize,
    pub violated: usize,
    pub gate_failed: usize,
    pub not_applicable: usize,
    pub input_error: usize,
    pub min_slack: Option<f64>,
    pub min_slack_config: Option<String>,
}

impl Summary {
    pub fn of(rows: &[ReportRow]) -> Self {
        let count = |s: RowStatus| rows.iter().filter(|r| r.status == s).count();
        let tightest = rows.iter().filter_map(|r| r.slack.map(|s| (s, r))).min_by(|x, y| x.0.total_cmp(&y.0));
        Summary {
            total: rows.len(),
            holds: count(RowStatus::Holds),
            violated: count(RowStatus::Violated),
            gate_failed: count(RowStatus::GateFailed),
            not_applicable: count(RowStatus::NotApplicable),
            input_error: count(RowStatus::InputError),
            min_slack: tightest.map(|t| t.0),
            min_slack_config: tightest.map(|t| t.1.config_label()),
        }
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "total          {}", self.total).map_err(io_err)?;
        writeln!(out, "holds          {}", self.holds).map_err(io_err)?;
        writeln!(out, "violated       {}", self.violated).map_err(io_err)?;
        writeln!(out, "gate_failed    {}", self.gate_failed).map_err(io_err)?;
        writeln!(out, "not_applicable {}", self.not_applicable).map_err(io_err)?;
        writeln!(out, "input_error    {}", self.input_error).map_err(io_err)?;
        writeln!(out, "min_slack      {}", opt(self.min_slack)).map_err(io_err)?;
        if let Some(c) = &self.min_slack_config {
            writeln!(out, "min_slack_at   {c}").map_err(io_err)?;
        }
        Ok(())
    }
}
