//! Deterministic JSON and CSV writers for reports.
//!
//! JSON objects are written with sorted keys, two-space indentation and every
//! floating-point number in `{:.16e}` form (17 significant digits), so equal
//! inputs give byte-identical files.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

use crate::bifurcation::BranchPoint;
use crate::error::{Error, Result};

/// Value of the `specversion` field stamped on every report.
pub const SPEC_VERSION: &str = "1";

fn format_f64(x: f64) -> String {
    if x.is_finite() {
        // Avoid "-0.0000000000000000e0".
        let x = if x == 0.0 { 0.0 } else { x };
        format!("{x:.16e}")
    } else {
        "null".to_owned()
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_f64(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*k], indent + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Canonical text of a JSON value, with a trailing newline.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

/// Serializes `body` as an object tagged with `command` and `specversion`.
pub fn report_json<T: Serialize>(command: &str, body: &T) -> Result<String> {
    let mut v = serde_json::to_value(body).map_err(|e| Error::Serialize(e.to_string()))?;
    let Value::Object(map) = &mut v else {
        return Err(Error::Serialize("report body must be a JSON object".into()));
    };
    map.insert("command".into(), Value::String(command.into()));
    map.insert("specversion".into(), Value::String(SPEC_VERSION.into()));
    Ok(canonical_json(&v))
}

/// Branch points as CSV with header `r,lambda,x1..x8,residual` and LF line
/// endings.
pub fn branch_csv(points: &[BranchPoint]) -> String {
    let n = points.first().map_or(8, |p| p.x.len());
    let mut out = String::from("r,lambda");
    for i in 1..=n {
        let _ = write!(out, ",x{i}");
    }
    out.push_str(",residual\n");
    for p in points {
        let mut fields = vec![format_f64(p.r), format_f64(p.lambda)];
        fields.extend(p.x.iter().map(|&v| format_f64(v)));
        fields.push(format_f64(p.residual));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sorted_keys_and_float_format() {
        let v = json!({"b": 1.5, "a": [1, -0.0], "c": {"z": true, "y": null}});
        let s = canonical_json(&v);
        assert_eq!(
            s,
            "{\n  \"a\": [\n    1,\n    0.0000000000000000e0\n  ],\n  \"b\": 1.5000000000000000e0,\n  \"c\": {\n    \"y\": null,\n    \"z\": true\n  }\n}\n"
        );
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"], json!(1.5));
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::MIN_POSITIVE] {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn report_tags() {
        #[derive(Serialize)]
        struct Body {
            order: u64,
        }
        let s = report_json("group", &Body { order: 240 }).unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["specversion"], "1");
        assert_eq!(v["command"], "group");
        assert_eq!(v["order"], 240);
        assert!(report_json("x", &3).is_err());
    }

    #[test]
    fn csv_layout() {
        let p = BranchPoint {
            r: 0.5,
            lambda: -0.25,
            x: vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5],
            residual: 0.0,
        };
        let s = branch_csv(&[p]);
        let lines: Vec<&str> = s.split('\n').collect();
        assert_eq!(lines[0], "r,lambda,x1,x2,x3,x4,x5,x6,x7,x8,residual");
        assert_eq!(lines[1].split(',').count(), 11);
        assert!(lines[1].starts_with("5.0000000000000000e-1,-2.5000000000000000e-1,"));
        assert_eq!(lines[2], "");
        assert!(!s.contains('\r'));
    }
}
