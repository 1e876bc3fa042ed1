//! Deterministic JSON rendering: sorted keys (the underlying map is
//! ordered), two-space indentation, floats in %.17g form, non-finite
//! values as sentinel strings. Identical values render to identical bytes.

use num_complex::Complex64;
use serde_json::Value;

use crate::gfmt::g17;

/// Longest scalar array rendered on one line.
const INLINE_LIMIT: usize = 60;

/// A float as a JSON value: finite numbers stay numbers, non-finite ones
/// become the sentinel strings "inf", "-inf", "nan".
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::String(g17(x))
    }
}

/// A complex number as the two-element array [re, im].
pub fn complex(z: Complex64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

/// Render a JSON value to its canonical textual form, newline-terminated.
pub fn render(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "null".to_owned(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.to_string()
            } else if let Some(u) = n.as_u64() {
                u.to_string()
            } else {
                g17(n.as_f64().expect("number is one of i64, u64, f64"))
            }
        }
        Value::String(s) => serde_json::to_string(s).expect("string serialization"),
        _ => unreachable!("containers handled by write_value"),
    }
}

/// Scalar-only arrays short enough to stay on one line render inline.
fn inline_array(items: &[Value]) -> Option<String> {
    let mut parts = Vec::with_capacity(items.len());
    for item in items {
        match item {
            Value::Array(_) | Value::Object(_) => return None,
            other => parts.push(scalar(other)),
        }
    }
    let line = format!("[{}]", parts.join(", "));
    (line.len() <= INLINE_LIMIT).then_some(line)
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            if let Some(line) = inline_array(items) {
                out.push_str(&line);
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, item, indent + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&serde_json::to_string(key).expect("key serialization"));
                out.push_str(": ");
                write_value(out, item, indent + 1);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push('}');
        }
        other => out.push_str(&scalar(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_come_out_sorted() {
        let v = json!({"zeta": 1, "alpha": 2, "mid": {"b": 1, "a": 2}});
        let s = render(&v);
        let alpha = s.find("\"alpha\"").unwrap();
        let mid = s.find("\"mid\"").unwrap();
        let zeta = s.find("\"zeta\"").unwrap();
        assert!(alpha < mid && mid < zeta);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
    }

    #[test]
    fn floats_render_in_g17_form() {
        let s = render(&json!({"x": 0.1, "y": 2.0}));
        assert!(s.contains("\"x\": 0.10000000000000001"), "{s}");
        assert!(s.contains("\"y\": 2\n"), "{s}");
    }

    #[test]
    fn non_finite_becomes_sentinel_string() {
        let v = json!({"slope": num(f64::NEG_INFINITY), "bad": num(f64::NAN)});
        let s = render(&v);
        assert!(s.contains("\"slope\": \"-inf\""), "{s}");
        assert!(s.contains("\"bad\": \"nan\""), "{s}");
    }

    #[test]
    fn short_scalar_arrays_inline() {
        let s = render(&json!({"pair": [1.5, -2.0], "nested": [[1.0]]}));
        assert!(s.contains("\"pair\": [1.5, -2]"), "{s}");
        assert!(s.contains("\"nested\": [\n"), "{s}");
    }

    #[test]
    fn rendered_output_reparses_identically() {
        let v = json!({
            "a": [0.1, 1e17, 5e-324],
            "b": {"c": true, "d": null, "e": "str\"quote"},
            "n": 42
        });
        let back: Value = serde_json::from_str(&render(&v)).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn complex_renders_as_pair() {
        let s = render(&complex(Complex64::new(0.5, -1.0)));
        assert_eq!(s, "[0.5, -1]\n");
    }
}
