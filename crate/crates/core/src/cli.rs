//! Document-level operations behind the `cvsep` binary: input parsing,
//! analysis reports, boundary scans and output formatting.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::covariance::{self, CovarianceMatrix, SqueezeParams, StandardForm};
use crate::criteria::{
    analytic_bound, prep_eigensystem, separability_verdict, Classification, PrepEigenvalues, RayQuery,
};
use crate::duan::duan_root;
use crate::error::{Error, Result};
use crate::squeezing::{analytic_squeeze, boundary_identity};

/// Absolute asymmetry admitted in an input matrix before it is symmetrized.
pub const SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Separable = 0,
    Entangled = 1,
    Unphysical = 2,
    InputError = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputDocument {
    matrix: Option<Vec<Vec<f64>>>,
    standard_form: Option<StandardFormInput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StandardFormInput {
    a: f64,
    b: f64,
    c1: f64,
    c2: f64,
}

/// A parsed analysis input.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisInput {
    Matrix([[f64; 4]; 4]),
    StandardForm(StandardForm),
}

pub fn parse_input(text: &str) -> std::result::Result<(AnalysisInput, Value), InputError> {
    let echo: Value =
        serde_json::from_str(text).map_err(|e| InputError(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let doc: InputDocument =
        serde_json::from_value(echo.clone()).map_err(|e| InputError(format!("invalid document: {e}")))?;
    let input = match (doc.matrix, doc.standard_form) {
        (Some(_), Some(_)) => return Err(InputError("give either \"matrix\" or \"standard_form\", not both".into())),
        (None, None) => return Err(InputError("missing \"matrix\" or \"standard_form\"".into())),
        (Some(rows), None) => AnalysisInput::Matrix(parse_matrix(&rows)?),
        (None, Some(s)) => {
            let sf = StandardForm::new(s.a, s.b, s.c1, s.c2)
                .map_err(|e| InputError(format!("field \"standard_form\": {e}")))?;
            AnalysisInput::StandardForm(sf)
        }
    };
    Ok((input, echo))
}

fn parse_matrix(rows: &[Vec<f64>]) -> std::result::Result<[[f64; 4]; 4], InputError> {
    if rows.len() != 4 {
        return Err(InputError(format!("field \"matrix\": expected 4 rows, got {}", rows.len())));
    }
    let mut m = [[0.0; 4]; 4];
    for (i, row) in rows.iter().enumerate() {
        if row.len() != 4 {
            return Err(InputError(format!("field \"matrix\" row {i}: expected 4 entries, got {}", row.len())));
        }
        m[i].copy_from_slice(row);
    }
    for (i, j) in (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))) {
        if (m[i][j] - m[j][i]).abs() > SYMMETRY_TOL {
            return Err(InputError(format!(
                "field \"matrix\": entries ({i},{j}) = {} and ({j},{i}) = {} differ by more than {SYMMETRY_TOL}",
                m[i][j], m[j][i]
            )));
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub classification: Classification,
    pub separable: bool,
    pub det_margin: Option<f64>,
    pub weak_margin: Option<f64>,
}

/// Full analysis of one state: the standard form together with the
/// squeezers `(r₁, r₂)` that characterize it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: Value,
    pub standard_form: Option<StandardForm>,
    pub verdict: VerdictReport,
    pub t: Option<f64>,
    pub c1sq_max: Option<f64>,
    pub squeeze: Option<SqueezeParams>,
    pub prep: Option<PrepEigenvalues>,
    pub duan_root: Option<f64>,
}

impl AnalysisReport {
    pub fn exit_status(&self) -> ExitStatus {
        match self.verdict.classification {
            Classification::Separable | Classification::Boundary => ExitStatus::Separable,
            Classification::Entangled => ExitStatus::Entangled,
            Classification::Unphysical => ExitStatus::Unphysical,
        }
    }

    fn unphysical(input: Value, standard_form: Option<StandardForm>) -> Self {
        AnalysisReport {
            input,
            standard_form,
            verdict: VerdictReport {
                classification: Classification::Unphysical,
                separable: false,
                det_margin: None,
                weak_margin: None,
            },
            t: None,
            c1sq_max: None,
            squeeze: None,
            prep: None,
            duan_root: None,
        }
    }
}

/// Reduce, classify, squeeze, check the P-representation and solve for the
/// Duan root.
pub fn analyze(input: &AnalysisInput, echo: Value, tol: f64) -> AnalysisReport {
    let sf = match input {
        AnalysisInput::StandardForm(sf) => *sf,
        AnalysisInput::Matrix(rows) => {
            let Ok(v) = CovarianceMatrix::from_rows(*rows) else {
                return AnalysisReport::unphysical(echo, None);
            };
            if !covariance::uncertainty_check(&v, false, tol) {
                return AnalysisReport::unphysical(echo, covariance::to_standard_form(&v, tol).ok());
            }
            match covariance::to_standard_form(&v, tol) {
                Ok(sf) => sf,
                Err(_) => return AnalysisReport::unphysical(echo, None),
            }
        }
    };
    analyze_standard_form(&sf, echo, tol)
}

fn analyze_standard_form(sf: &StandardForm, echo: Value, tol: f64) -> AnalysisReport {
    let verdict = separability_verdict(sf, tol);
    if verdict.classification == Classification::Unphysical {
        let mut report = AnalysisReport::unphysical(echo, Some(*sf));
        report.verdict.det_margin = Some(verdict.det_margin);
        report.verdict.weak_margin = Some(verdict.weak_margin);
        return report;
    }
    // Physical states have a, b ≥ 1/2 up to the tolerance.
    let q = RayQuery::new(sf.a().max(0.5), sf.b().max(0.5), sf.t()).expect("physical ray");
    let r = analytic_squeeze(&q);
    let prep = prep_eigensystem(sf, &r, tol);
    let duan = if verdict.is_separable() { duan_root(sf, tol).ok() } else { None };
    AnalysisReport {
        input: echo,
        standard_form: Some(*sf),
        verdict: VerdictReport {
            classification: verdict.classification,
            separable: verdict.is_separable(),
            det_margin: Some(verdict.det_margin),
            weak_margin: Some(verdict.weak_margin),
        },
        t: Some(q.t()),
        c1sq_max: Some(analytic_bound(&q).0),
        squeeze: Some(r),
        prep: Some(prep),
        duan_root: duan,
    }
}

/// Parses and analyzes a document; parse failures map to [`ExitStatus::InputError`].
pub fn run_analyze(text: &str, tol: f64) -> std::result::Result<AnalysisReport, InputError> {
    let (input, echo) = parse_input(text)?;
    Ok(analyze(&input, echo, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub t: f64,
    pub c1_max: f64,
    pub c2_max: f64,
    pub r1: f64,
    pub r2: f64,
    pub identity_residual: f64,
}

pub const SCAN_HEADER: &str = "t,c1_max,c2_max,r1,r2,identity_residual";

/// Bound and squeezers on a uniform `t` grid over `[0, 1]`; `c1_max` and
/// `c2_max` are magnitudes `|c₁|`, `|c₂|`.
pub fn run_scan(a: f64, b: f64, steps: usize) -> Result<Vec<ScanRow>> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("scan needs at least 2 steps, got {steps}")));
    }
    RayQuery::new(a, b, 0.0)?;
    (0..steps)
        .map(|i| {
            let t = if i + 1 == steps { 1.0 } else { i as f64 / (steps - 1) as f64 };
            let q = RayQuery::new(a, b, t)?;
            let (c1sq, c2sq) = analytic_bound(&q);
            let r = analytic_squeeze(&q);
            let identity_residual = if t > 0.0 { boundary_identity(&q)?.residual() } else { 0.0 };
            Ok(ScanRow { t, c1_max: c1sq.sqrt(), c2_max: c2sq.sqrt(), r1: r.r1, r2: r.r2, identity_residual })
        })
        .collect()
}

/// Seventeen significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(SCAN_HEADER);
    out.push('\n');
    for r in rows {
        let cols = [r.t, r.c1_max, r.c2_max, r.r1, r.r2, r.identity_residual].map(fmt_float);
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

pub fn scan_text(a: f64, b: f64, rows: &[ScanRow]) -> String {
    let mut out = format!("separable bound and squeezers for a = {a}, b = {b}\n");
    let _ = writeln!(
        out,
        "{:>24} {:>24} {:>24} {:>24} {:>24} {:>24}",
        "t", "|c1|max", "|c2|max", "r1", "r2", "identity residual"
    );
    for r in rows {
        let cols = [r.t, r.c1_max, r.c2_max, r.r1, r.r2, r.identity_residual].map(fmt_float);
        let _ = writeln!(
            out,
            "{:>24} {:>24} {:>24} {:>24} {:>24} {:>24}",
            cols[0], cols[1], cols[2], cols[3], cols[4], cols[5]
        );
    }
    out
}

pub fn report_text(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let v = &report.verdict;
    let _ = writeln!(out, "verdict: {:?}{}", v.classification, if v.separable { " (separable)" } else { "" });
    if let Some(sf) = &report.standard_form {
        let _ = writeln!(
            out,
            "standard form: a = {}, b = {}, c1 = {}, c2 = {}",
            fmt_float(sf.a()),
            fmt_float(sf.b()),
            fmt_float(sf.c1()),
            fmt_float(sf.c2())
        );
    }
    if let (Some(d), Some(w)) = (v.det_margin, v.weak_margin) {
        let _ = writeln!(out, "margins: determinant {}, weak {}", fmt_float(d), fmt_float(w));
    }
    if let (Some(t), Some(r), Some(c)) = (report.t, report.squeeze, report.c1sq_max) {
        let _ = writeln!(out, "ray t = {}, largest separable c1^2 = {}", fmt_float(t), fmt_float(c));
        let _ = writeln!(out, "squeezers: r1 = {}, r2 = {}", fmt_float(r.r1), fmt_float(r.r2));
    }
    if let Some(p) = &report.prep {
        let _ = writeln!(
            out,
            "P-representation at squeezers: {} (min eigenvalue {})",
            if p.feasible { "feasible" } else { "infeasible" },
            fmt_float(p.min())
        );
    }
    if let Some(r) = report.duan_root {
        let _ = writeln!(out, "Duan root r1* = {}", fmt_float(r));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeReport {
    pub a: f64,
    pub b: f64,
    pub t: f64,
    pub r1: f64,
    pub r2: f64,
    pub c1sq_max: f64,
    pub c2sq_max: f64,
    pub identity_residual: Option<f64>,
}

pub fn run_squeeze(a: f64, b: f64, t: f64) -> Result<SqueezeReport> {
    let q = RayQuery::new(a, b, t)?;
    let r = analytic_squeeze(&q);
    let (c1sq_max, c2sq_max) = analytic_bound(&q);
    let identity_residual = if t > 0.0 { Some(boundary_identity(&q)?.residual()) } else { None };
    Ok(SqueezeReport { a, b, t, r1: r.r1, r2: r.r2, c1sq_max, c2sq_max, identity_residual })
}
