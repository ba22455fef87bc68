//! Report payloads and their schema check.
//!
//! Every number is serialized as an exact fraction string; byte-identical
//! output across runs comes from ordered maps and sorted factor lists.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;

use crate::detform::{ExpandedDet, FactoredDeterminant};
use crate::partition::Eta;
use crate::poly::MPoly;
use crate::scalar::Scalar;
use crate::Q;

pub fn q_str(v: &Q) -> String {
    v.to_string()
}

fn eta_strings(eta: &Eta) -> Vec<String> {
    let mut out = vec![q_str(&eta.level)];
    out.extend(eta.nat.iter().map(q_str));
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorReport {
    pub label: String,
    pub expression: String,
    pub exponent: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DetReport {
    pub family: String,
    pub params: BTreeMap<String, String>,
    /// Level followed by the restricted-Cartan coordinates.
    pub eta: Vec<String>,
    pub k: String,
    pub factors: Vec<FactorReport>,
    /// Lex-ordered monomial -> coefficient, `1` for the constant monomial.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expanded: Option<BTreeMap<String, String>>,
    pub poles: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyDetReport {
    #[serde(flatten)]
    pub det: DetReport,
    #[serde(rename = "gramDim")]
    pub gram_dim: usize,
    #[serde(rename = "match")]
    pub matches: bool,
    #[serde(rename = "constantRatio")]
    pub constant_ratio: Option<String>,
}

/// Monomial display for the `expanded` map: `1`, `h^2*j`, ...
pub fn mono_key(m: &crate::poly::Mono) -> String {
    let mut parts = Vec::new();
    for v in 0..3 {
        match m.0[v] {
            0 => {}
            1 => parts.push(crate::poly::MVARS[v].to_string()),
            e => parts.push(format!("{}^{}", crate::poly::MVARS[v], e)),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

pub fn expanded_map<S: Scalar>(p: &MPoly<S>) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for (m, c) in p.terms() {
        out.insert(mono_key(m), c.to_string());
    }
    if out.is_empty() {
        out.insert("1".into(), "0".into());
    }
    out
}

pub fn det_report(
    det: &FactoredDeterminant,
    params: &[(String, Q)],
    k: &Q,
    expanded: Option<&ExpandedDet>,
    poles: &[Q],
) -> DetReport {
    let mut factors: Vec<FactorReport> = det
        .factors
        .iter()
        .map(|f| FactorReport {
            label: f.label.clone(),
            expression: f.expr.to_string(),
            exponent: f.exponent,
        })
        .collect();
    factors.sort_by(|a, b| a.label.cmp(&b.label));
    DetReport {
        family: det.family.clone(),
        params: params.iter().map(|(n, v)| (n.clone(), q_str(v))).collect(),
        eta: eta_strings(&det.eta),
        k: q_str(k),
        factors,
        expanded: expanded.map(|e| expanded_map(&e.num)),
        poles: poles.iter().map(q_str).collect(),
    }
}

/// Structural validation of a serialized determinant report: field
/// presence and primitive types, with offending paths reported.
pub fn validate_det_report(value: &Value) -> Result<(), Vec<String>> {
    let mut bad = Vec::new();
    let obj = match value.as_object() {
        Some(o) => o,
        None => return Err(vec!["<root>: expected object".into()]),
    };
    for key in ["family", "k"] {
        match obj.get(key) {
            Some(Value::String(_)) => {}
            _ => bad.push(format!("{key}: expected string")),
        }
    }
    match obj.get("eta") {
        Some(Value::Array(a)) if a.iter().all(|v| v.is_string()) && !a.is_empty() => {}
        _ => bad.push("eta: expected nonempty array of strings".into()),
    }
    match obj.get("params") {
        Some(Value::Object(p)) if p.values().all(|v| v.is_string()) => {}
        _ => bad.push("params: expected object of strings".into()),
    }
    match obj.get("factors") {
        Some(Value::Array(fs)) => {
            for (i, f) in fs.iter().enumerate() {
                let Some(fo) = f.as_object() else {
                    bad.push(format!("factors[{i}]: expected object"));
                    continue;
                };
                for key in ["label", "expression"] {
                    if !fo.get(key).map_or(false, |v| v.is_string()) {
                        bad.push(format!("factors[{i}].{key}: expected string"));
                    }
                }
                if !fo.get("exponent").map_or(false, |v| v.is_i64()) {
                    bad.push(format!("factors[{i}].exponent: expected integer"));
                }
            }
        }
        _ => bad.push("factors: expected array".into()),
    }
    if let Some(exp) = obj.get("expanded") {
        match exp {
            Value::Object(m) if m.values().all(|v| v.is_string()) => {}
            Value::Null => {}
            _ => bad.push("expanded: expected object of strings".into()),
        }
    }
    match obj.get("poles") {
        Some(Value::Array(a)) if a.iter().all(|v| v.is_string()) => {}
        _ => bad.push("poles: expected array of strings".into()),
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}
