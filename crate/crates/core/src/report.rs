//! Flat-file encodings shared by the command-line verbs.
//!
//! JSON output is an envelope `{tool_version, config, rows}`. CSV output has a
//! header line and one row per record, with complex numbers written as
//! `re+imi` in a single cell. Floats use Rust's shortest round-trip formatting
//! in both encodings, so the two carry bit-identical values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundResult;
use crate::class::ClassSpec;
use crate::construct::{Seed, VerificationReport};
use crate::search::ConsistencyReport;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<C, R> {
    pub tool_version: String,
    pub config: C,
    pub rows: Vec<R>,
}

impl<C, R> Envelope<C, R> {
    pub fn new(config: C, rows: Vec<R>) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            config,
            rows,
        }
    }
}

/// `re+imi` / `re-imi`.
pub fn format_complex(c: Complex64) -> String {
    let sign = if c.im < 0.0 { '-' } else { '+' };
    format!("{}{}{}i", c.re, sign, c.im.abs())
}

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    if let Ok(x) = t.parse::<f64>() {
        return Ok(Complex64::new(x, 0.0));
    }
    t.parse::<Complex64>()
        .map_err(|_| format!("not a complex number: `{s}`"))
}

fn cell(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Header plus string cells; renders as CSV or as an aligned text table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = line.iter().map(|c| csv_escape(c)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_pretty(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = line
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

fn csv_escape(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

/// Class name and every parameter column, blank where a class lacks it.
const CLASS_COLUMNS: [&str; 9] = [
    "class", "k", "mean_order", "rule", "b1", "b2", "alpha", "lambda", "beta",
];

fn class_cells(spec: &ClassSpec) -> Vec<String> {
    let cp = spec.cesaro();
    let (mut b1, mut b2, mut alpha, mut lambda, mut beta) = (None, None, None, None, None);
    match spec {
        ClassSpec::Psi { psi, .. } => {
            b1 = Some(psi.b1());
            b2 = Some(psi.b2());
        }
        ClassSpec::Strong { params, .. } => {
            alpha = Some(params.alpha());
            lambda = Some(params.lambda());
        }
        ClassSpec::RealPart { params, .. } => {
            beta = Some(params.beta());
            lambda = Some(params.lambda());
        }
    }
    vec![
        spec.name().to_string(),
        cp.k().to_string(),
        cp.alpha().to_string(),
        cp.rule().to_string(),
        cell(b1),
        cell(b2),
        cell(alpha),
        cell(lambda),
        cell(beta),
    ]
}

/// One evaluated (or undefined) bound at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub spec: ClassSpec,
    pub formula_id: crate::bounds::FormulaId,
    pub prefactor: Option<f64>,
    pub core: Option<f64>,
    pub value: Option<f64>,
    /// `ok`, or `undefined (...)` with the reason.
    pub status: String,
}

impl BoundRow {
    pub fn from_result(
        spec: &ClassSpec,
        formula_id: crate::bounds::FormulaId,
        result: Result<BoundResult, crate::bounds::BoundError>,
    ) -> Self {
        match result {
            Ok(b) => Self {
                spec: spec.clone(),
                formula_id,
                prefactor: Some(b.prefactor),
                core: Some(b.core),
                value: Some(b.value),
                status: "ok".to_string(),
            },
            Err(e) => {
                let reason = match e {
                    crate::bounds::BoundError::IndexTooSmall { need, .. } => format!("k<{need}"),
                    other => other.to_string(),
                };
                Self {
                    spec: spec.clone(),
                    formula_id,
                    prefactor: None,
                    core: None,
                    value: None,
                    status: format!("undefined ({reason})"),
                }
            }
        }
    }
}

pub fn bounds_table(rows: &[BoundRow]) -> Table {
    let mut header: Vec<&str> = CLASS_COLUMNS.to_vec();
    header.extend(["formula_id", "prefactor", "core", "value", "status"]);
    let mut t = Table::new(&header);
    for r in rows {
        let mut cells = class_cells(&r.spec);
        cells.extend([
            r.formula_id.to_string(),
            cell(r.prefactor),
            cell(r.core),
            cell(r.value),
            r.status.clone(),
        ]);
        t.push(cells);
    }
    t
}

pub fn consistency_table(rows: &[ConsistencyReport]) -> Table {
    let mut header: Vec<&str> = CLASS_COLUMNS.to_vec();
    header.extend([
        "formula_id",
        "formula_value",
        "alternative_value",
        "oracle_max",
        "seed_kind",
        "seed_first",
        "seed_second",
        "exceedance",
        "verdict",
    ]);
    let mut t = Table::new(&header);
    for r in rows {
        let mut cells = class_cells(&r.class);
        let (first, second) = r.argmax_seed.pair();
        let kind = match r.argmax_seed {
            Seed::Schwarz { .. } => "schwarz",
            Seed::Caratheodory { .. } => "caratheodory",
        };
        cells.extend([
            r.formula_id.to_string(),
            cell(r.formula_value),
            cell(r.alternative_value),
            r.oracle_max.to_string(),
            kind.to_string(),
            format_complex(first),
            format_complex(second),
            r.exceedance.to_string(),
            r.verdict.as_str().to_string(),
        ]);
        t.push(cells);
    }
    t
}

pub fn verification_table(rows: &[VerificationReport]) -> Table {
    let mut header: Vec<&str> = CLASS_COLUMNS.to_vec();
    header.extend(["radius", "samples", "extremal_value", "threshold", "pass", "flags"]);
    let mut t = Table::new(&header);
    for r in rows {
        let mut cells = class_cells(&r.params);
        cells.extend([
            r.radius.to_string(),
            r.samples.to_string(),
            r.extremal_value.to_string(),
            r.threshold.to_string(),
            r.pass.to_string(),
            r.flags.join(";"),
        ]);
        t.push(cells);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub n: usize,
    pub coefficient: Complex64,
}

pub fn coefficient_table(rows: &[CoefficientRow]) -> Table {
    let mut t = Table::new(&["n", "coefficient"]);
    for r in rows {
        t.push(vec![r.n.to_string(), format_complex(r.coefficient)]);
    }
    t
}
