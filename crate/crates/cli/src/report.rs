//! Report rows and their CSV/JSON serialization.
//!
//! Numbers are written in scientific notation with six significant digits
//! (`7.68300e+00`) so that repeated runs produce byte-identical files; JSON
//! carries the same rounded values, with `null` for absent or non-finite
//! entries.

use std::fmt::Write as _;
use std::path::Path;

use errbar_core::metrology::{AxisReport, WidthReport};
use serde::{Serialize, Serializer};

use crate::CliError;

pub const CSV_HEADER: &str = "# uncert-report v1";

/// One scenario row; absent quantities are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub scenario_id: String,
    /// `joint`, `warped` or `smearing`.
    pub kind: &'static str,
    #[serde(serialize_with = "rounded")]
    pub eps1: Option<f64>,
    #[serde(serialize_with = "rounded")]
    pub eps2: Option<f64>,
    #[serde(flatten)]
    pub q: AxisColumns,
    #[serde(flatten, with = "p_prefix")]
    pub p: AxisColumns,
    #[serde(serialize_with = "rounded")]
    pub error_bar_product: Option<f64>,
    #[serde(serialize_with = "rounded")]
    pub resolution_product: Option<f64>,
    #[serde(serialize_with = "rounded")]
    pub bound_simple: Option<f64>,
    #[serde(serialize_with = "rounded")]
    pub bound_uffink: Option<f64>,
    #[serde(serialize_with = "rounded")]
    pub margin_simple: Option<f64>,
    #[serde(serialize_with = "rounded")]
    pub margin_uffink: Option<f64>,
    #[serde(serialize_with = "rounded")]
    pub tolerance: Option<f64>,
    pub pass: bool,
    pub note: String,
}

/// Per-axis columns, prefixed `q_` in the row.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AxisColumns {
    #[serde(rename = "q_overall", serialize_with = "rounded")]
    pub overall: Option<f64>,
    #[serde(rename = "q_resolution", serialize_with = "rounded")]
    pub resolution: Option<f64>,
    #[serde(rename = "q_error_bar", serialize_with = "rounded")]
    pub error_bar: Option<f64>,
    #[serde(rename = "q_error_bar_spread", serialize_with = "rounded")]
    pub error_bar_spread: Option<f64>,
    /// `delta=value` pairs along the calibration ladder, `;`-separated.
    #[serde(rename = "q_ladder")]
    pub ladder: String,
    #[serde(rename = "q_werner", serialize_with = "rounded")]
    pub werner: Option<f64>,
}

mod p_prefix {
    use serde::ser::{SerializeMap, Serializer};

    use super::{rounded_value, AxisColumns};

    pub fn serialize<S: Serializer>(a: &AxisColumns, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(6))?;
        m.serialize_entry("p_overall", &rounded_value(a.overall))?;
        m.serialize_entry("p_resolution", &rounded_value(a.resolution))?;
        m.serialize_entry("p_error_bar", &rounded_value(a.error_bar))?;
        m.serialize_entry("p_error_bar_spread", &rounded_value(a.error_bar_spread))?;
        m.serialize_entry("p_ladder", &a.ladder)?;
        m.serialize_entry("p_werner", &rounded_value(a.werner))?;
        m.end()
    }
}

pub const COLUMNS: [&str; 25] = [
    "scenario_id",
    "kind",
    "eps1",
    "eps2",
    "q_overall",
    "q_resolution",
    "q_error_bar",
    "q_error_bar_spread",
    "q_ladder",
    "q_werner",
    "p_overall",
    "p_resolution",
    "p_error_bar",
    "p_error_bar_spread",
    "p_ladder",
    "p_werner",
    "error_bar_product",
    "resolution_product",
    "bound_simple",
    "bound_uffink",
    "margin_simple",
    "margin_uffink",
    "tolerance",
    "pass",
    "note",
];

/// Six significant digits in scientific notation with a signed two-digit
/// exponent; `nan`, `inf` and `-inf` for non-finite values.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let v = if v == 0.0 { 0.0 } else { v };
    let s = format!("{v:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn rounded_value(v: Option<f64>) -> Option<f64> {
    v.filter(|x| x.is_finite()).map(|x| fmt_num(x).parse().expect("formatted number parses"))
}

fn rounded<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    rounded_value(*v).serialize(s)
}

fn cell(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

impl AxisColumns {
    pub fn from_report(a: &AxisReport) -> Self {
        let mut ladder = String::new();
        for (i, (d, v)) in a.error_bar.ladder.iter().enumerate() {
            if i > 0 {
                ladder.push(';');
            }
            let _ = write!(ladder, "{}={}", fmt_num(*d), fmt_num(*v));
        }
        AxisColumns {
            overall: Some(a.overall_width),
            resolution: Some(a.resolution_width),
            error_bar: Some(a.error_bar.value),
            error_bar_spread: Some(a.error_bar.spread),
            ladder,
            werner: a.werner_distance,
        }
    }

    fn cells(&self) -> [String; 6] {
        [
            cell(self.overall),
            cell(self.resolution),
            cell(self.error_bar),
            cell(self.error_bar_spread),
            self.ladder.clone(),
            cell(self.werner),
        ]
    }
}

impl ReportRow {
    pub fn from_width_report(id: String, kind: &'static str, r: &WidthReport) -> Self {
        ReportRow {
            scenario_id: id,
            kind,
            eps1: Some(r.eps.eps1),
            eps2: Some(r.eps.eps2),
            q: AxisColumns::from_report(&r.q),
            p: AxisColumns::from_report(&r.p),
            error_bar_product: Some(r.error_bar_product),
            resolution_product: Some(r.resolution_product),
            bound_simple: Some(r.bound_simple),
            bound_uffink: Some(r.bound_uffink),
            margin_simple: Some(r.margin_simple),
            margin_uffink: Some(r.margin_uffink),
            tolerance: Some(r.tolerance),
            pass: r.pass,
            note: r.note().to_string(),
        }
    }

    pub fn csv_line(&self) -> String {
        let mut cells = vec![self.scenario_id.clone(), self.kind.to_string(), cell(self.eps1), cell(self.eps2)];
        cells.extend(self.q.cells());
        cells.extend(self.p.cells());
        for v in [
            self.error_bar_product,
            self.resolution_product,
            self.bound_simple,
            self.bound_uffink,
            self.margin_simple,
            self.margin_uffink,
            self.tolerance,
        ] {
            cells.push(cell(v));
        }
        cells.push(self.pass.to_string());
        cells.push(self.note.clone());
        cells.join(",")
    }
}

pub fn csv_text(rows: &[ReportRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n{}\n", COLUMNS.join(","));
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

pub fn json_text(rows: &[ReportRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

/// Writes `report.csv` and `report.json` into `dir`, creating it if needed.
pub fn write_reports(dir: &Path, rows: &[ReportRow]) -> Result<(), CliError> {
    write_file(&dir.join("report.csv"), &csv_text(rows))?;
    write_file(&dir.join("report.json"), &json_text(rows))
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    let io = |e| CliError::Io { path: path.to_path_buf(), source: e };
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    std::fs::write(path, text).map_err(io)
}
