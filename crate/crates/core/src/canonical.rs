//! Canonical JSON text: object keys sorted, no insignificant whitespace,
//! floats printed with the shortest representation that round-trips.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub fn to_canonical_string<S: Serialize + ?Sized>(value: &S) -> Result<String, serde_json::Error> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&v, &mut out);
    Ok(out)
}

fn write_value(v: &Value, out: &mut String) {
    match v {
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
        other => out.push_str(&other.to_string()),
    }
}

/// Hex SHA-256 of the canonical form.
pub fn digest<S: Serialize + ?Sized>(value: &S) -> Result<String, serde_json::Error> {
    let text = to_canonical_string(value)?;
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}
