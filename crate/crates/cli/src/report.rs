//! Versioned JSON report envelope and its text rendering.
//!
//! Every report is `{command, schema_version, input_digest, payload}`. The
//! JSON form is authoritative; the text form is rendered from the same JSON
//! value so both carry identical numbers. `log_m` is always present;
//! `m_linear` is omitted when `exp(log_m)` is not a normal binary64.

use matchfactor::{
    BvnDecomposition, ClassificationReport, DenseMatrix, ExtremeClass, ExtremeKind, MatchingProfile,
    OracleResult, TrajectoryRecord, Variant,
};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::io::format_real;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Serialize)]
pub struct Envelope<P: Serialize> {
    pub command: String,
    pub schema_version: &'static str,
    pub input_digest: String,
    pub payload: P,
}

impl<P: Serialize> Envelope<P> {
    pub fn new(command: &str, input_digest: String, payload: P) -> Self {
        Self { command: command.to_string(), schema_version: SCHEMA_VERSION, input_digest, payload }
    }
}

/// SHA-256 over the canonical encoding of a matrix: the order as a
/// little-endian u64, then each entry's binary64 bits little-endian,
/// row-major. Dense and CSV files describing the same matrix share a digest.
pub fn matrix_digest(m: &DenseMatrix) -> String {
    let mut h = Sha256::new();
    h.update((m.n() as u64).to_le_bytes());
    for v in m.entries() {
        h.update(v.to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// SHA-256 of a parameter string, for commands without an input matrix.
pub fn params_digest(params: &str) -> String {
    hex::encode(Sha256::digest(params.as_bytes()))
}

#[derive(Debug, Serialize)]
pub struct ValidatePayload {
    pub n: usize,
    pub is_nonnegative: bool,
    pub is_bistochastic: bool,
    pub is_star_positive: bool,
    pub is_permutation: bool,
    pub is_star_permutation: bool,
    pub is_uniform: bool,
    pub is_star_uniform: bool,
    pub max_sum_residual: f64,
}

impl ValidatePayload {
    pub fn new(n: usize, r: &ClassificationReport) -> Self {
        Self {
            n,
            is_nonnegative: r.is_nonnegative,
            is_bistochastic: r.is_bistochastic,
            is_star_positive: r.is_star_positive,
            is_permutation: r.is_permutation,
            is_star_permutation: r.is_star_permutation,
            is_uniform: r.is_uniform,
            is_star_uniform: r.is_star_uniform,
            max_sum_residual: r.max_sum_residual,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FactorPayload {
    pub n: usize,
    pub variant: &'static str,
    pub lambdas: Vec<f64>,
    pub log_lambdas: Vec<f64>,
    pub log_m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_linear: Option<f64>,
    pub log_lower_bound: f64,
    pub log_upper_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proximity: Option<f64>,
}

impl FactorPayload {
    pub fn new(p: &MatchingProfile, proximity: Option<f64>) -> Self {
        Self {
            n: p.n,
            variant: match p.variant {
                Variant::Plain => "plain",
                Variant::Star => "star",
            },
            lambdas: p.lambdas.clone(),
            log_lambdas: p.log_lambdas.clone(),
            log_m: p.log_m,
            m_linear: p.m_linear_representable(),
            log_lower_bound: p.log_lower_bound,
            log_upper_bound: p.log_upper_bound,
            proximity,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ClassifyPayload {
    pub n: usize,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
    pub log_m: f64,
    pub proximity: f64,
}

pub fn kind_name(kind: ExtremeKind) -> &'static str {
    match kind {
        ExtremeKind::Permutation => "Permutation",
        ExtremeKind::Uniform => "Uniform",
        ExtremeKind::Interior => "Interior",
        ExtremeKind::Degenerate => "Degenerate",
    }
}

impl ClassifyPayload {
    pub fn new(n: usize, c: &ExtremeClass, proximity: f64) -> Self {
        Self {
            n,
            kind: kind_name(c.kind),
            permutation: c.permutation.as_ref().map(|p| p.map().to_vec()),
            log_m: c.log_m,
            proximity,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct GeneratePayload {
    pub kind: String,
    pub n: usize,
    pub seed: u64,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct TermPayload {
    pub weight: f64,
    pub permutation: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct DecomposePayload {
    pub n: usize,
    pub terms: Vec<TermPayload>,
    pub residual_mass: f64,
    pub term_bound: usize,
    pub max_recompose_error: f64,
}

impl DecomposePayload {
    pub fn new(d: &BvnDecomposition, term_bound: usize, max_recompose_error: f64) -> Self {
        Self {
            n: d.n,
            terms: d
                .terms
                .iter()
                .map(|(w, p)| TermPayload { weight: *w, permutation: p.map().to_vec() })
                .collect(),
            residual_mass: d.residual_mass,
            term_bound,
            max_recompose_error,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SamplePayload {
    pub t: usize,
    pub log_m: f64,
}

#[derive(Debug, Serialize)]
pub struct TrajectoryPayload {
    pub n: usize,
    pub log_lower_bound: f64,
    pub converged: bool,
    pub samples: Vec<SamplePayload>,
}

impl TrajectoryPayload {
    pub fn new(r: &TrajectoryRecord, log_lower_bound: f64) -> Self {
        Self {
            n: r.n,
            log_lower_bound,
            converged: r.converged,
            samples: r.samples.iter().map(|&(t, log_m)| SamplePayload { t, log_m }).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct OraclePayload {
    pub n: usize,
    pub min_log_m: f64,
    pub max_log_m: f64,
    pub argmin_is_uniform: bool,
    pub argmax_is_vertex: bool,
    pub points_scanned: usize,
    pub bound_violations: usize,
}

impl OraclePayload {
    pub fn new(n: usize, r: &OracleResult) -> Self {
        Self {
            n,
            min_log_m: r.min_log_m,
            max_log_m: r.max_log_m,
            argmin_is_uniform: r.argmin_is_uniform,
            argmax_is_vertex: r.argmax_is_vertex,
            points_scanned: r.points_scanned,
            bound_violations: r.bound_violations,
        }
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Number(num) => match (num.as_u64(), num.as_i64(), num.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (_, Some(i), _) => i.to_string(),
            (_, _, Some(f)) => format_real(f),
            _ => num.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Null => "null".into(),
        Value::Bool(b) => b.to_string(),
        other => other.to_string(),
    }
}

fn render(key: &str, v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            if !key.is_empty() {
                out.push_str(&format!("{pad}{key}:\n"));
            }
            let inner = if key.is_empty() { indent } else { indent + 1 };
            for (k, val) in map {
                render(k, val, inner, out);
            }
        }
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            let joined: Vec<String> = items.iter().map(scalar_text).collect();
            out.push_str(&format!("{pad}{key}: [{}]\n", joined.join(", ")));
        }
        Value::Array(items) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (i, item) in items.iter().enumerate() {
                render(&format!("[{i}]"), item, indent + 1, out);
            }
        }
        scalar => out.push_str(&format!("{pad}{key}: {}\n", scalar_text(scalar))),
    }
}

/// `key: value` lines, nested objects indented, reals at 17 significant
/// digits.
pub fn render_text(value: &Value) -> String {
    let mut out = String::new();
    render("", value, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use matchfactor::{matching_factor, uniform_matrix};

    #[test]
    fn digest_is_format_independent_and_stable() {
        let a = DenseMatrix::identity(2).unwrap();
        let b = crate::io::parse_csv("1,0\n0,1\n").unwrap();
        assert_eq!(matrix_digest(&a), matrix_digest(&b));
        assert_eq!(matrix_digest(&a).len(), 64);
        assert_ne!(matrix_digest(&a), matrix_digest(&uniform_matrix(2).unwrap()));
    }

    #[test]
    fn underflowed_linear_value_is_omitted() {
        let p = matching_factor(&uniform_matrix(120).unwrap()).unwrap();
        let json = serde_json::to_value(FactorPayload::new(&p, None)).unwrap();
        assert!(json.get("m_linear").is_none());
        assert!(json.get("log_m").unwrap().is_f64());

        let p = matching_factor(&uniform_matrix(2).unwrap()).unwrap();
        let json = serde_json::to_value(FactorPayload::new(&p, None)).unwrap();
        assert_eq!(json["m_linear"].as_f64(), Some(0.0625));
    }

    #[test]
    fn text_rendering_round_trips_numbers() {
        let p = matching_factor(&uniform_matrix(3).unwrap()).unwrap();
        let json = serde_json::to_value(Envelope::new("factor", "x".into(), FactorPayload::new(&p, Some(0.0))))
            .unwrap();
        let text = render_text(&json);
        let line = text.lines().find(|l| l.trim_start().starts_with("log_m:")).unwrap();
        let parsed: f64 = line.split(": ").nth(1).unwrap().parse().unwrap();
        assert_eq!(parsed, p.log_m);
        assert!(text.contains("command: factor"));
    }
}
