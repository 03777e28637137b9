//! JSON norm configurations and deterministic JSON output.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::measures::{ContinuousMeasure, DerivativePart, DiracTerm, VectorMeasure};
use crate::sobolev::{QuadPolicy, SobolevNorm};
use crate::solver::SolverOptions;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    pub p: f64,
    pub continuous: ContinuousMeasure,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub derivative_continuous: Vec<DerivativePart>,
    #[serde(default)]
    pub dirac: Vec<DiracTerm>,
    #[serde(default)]
    pub quadrature: QuadPolicy,
    #[serde(default)]
    pub solver: SolverOptions,
}

impl NormConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        NormConfig::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("config serializes"))
    }

    pub fn measure(&self) -> Result<VectorMeasure> {
        VectorMeasure::with_derivative_parts(self.continuous, self.derivative_continuous.clone(), self.dirac.clone())
    }

    pub fn norm(&self) -> Result<SobolevNorm> {
        SobolevNorm::with_policy(self.p, self.measure()?, self.quadrature)
    }
}

/// Compact JSON with sorted keys and every float written with 17
/// significant digits.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, &mut out);
    out
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().expect("f64 number")));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(&map[k], out);
            }
            out.push('}');
        }
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FAR_MASSES: &str = r#"{
        "p": 2,
        "continuous": {"kind": "lebesgue", "a": -1, "b": 1},
        "dirac": [{"c": 4, "k": 1, "A": 8}, {"c": 2, "k": 2, "A": 6}]
    }"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = NormConfig::from_json(FAR_MASSES).unwrap();
        assert_eq!(cfg.dirac.len(), 2);
        assert_eq!(cfg.solver, SolverOptions::default());
        assert_eq!(cfg.quadrature, QuadPolicy::default());
        assert_eq!(cfg.norm().unwrap().measure().d(), 5);
    }

    #[test]
    fn round_trips() {
        let cfg = NormConfig::from_json(FAR_MASSES).unwrap();
        let again = NormConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_json(), cfg.to_json());
        assert_eq!(again.solver.tol, 1e-9);
        let mut with_parts = cfg.clone();
        with_parts.derivative_continuous.push(DerivativePart {
            order: 1,
            measure: ContinuousMeasure::Lebesgue { a: 0.0, b: 1.0 },
        });
        assert_eq!(NormConfig::from_json(&with_parts.to_json()).unwrap(), with_parts);
    }

    #[test]
    fn rejects_unknown_fields() {
        let bad = FAR_MASSES.replace("\"p\": 2", "\"p\": 2, \"q\": 3");
        assert!(NormConfig::from_json(&bad).is_err());
        let bad_solver = FAR_MASSES.replace("\"p\": 2", "\"p\": 2, \"solver\": {\"tol\": 1e-9, \"max_iter\": 10, \"lp_grid\": 8, \"x\": 1}");
        assert!(NormConfig::from_json(&bad_solver).is_err());
        assert!(NormConfig::from_json("{").is_err());
    }

    #[test]
    fn canonical_output() {
        let v = serde_json::json!({"b": 1.5, "a": [1, -0.1, null], "c": "x\"y"});
        assert_eq!(
            canonical_json(&v),
            r#"{"a":[1,-1.0000000000000001e-1,null],"b":1.5000000000000000e0,"c":"x\"y"}"#
        );
    }
}
