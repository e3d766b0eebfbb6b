//! Machine-readable result documents.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

/// A real number or `±inf`, serialized as a JSON number or the strings
/// `"inf"` / `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtReal(pub f64);

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v == f64::INFINITY {
            s.serialize_str("inf")
        } else if v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else {
            s.serialize_f64(v)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ExtReal;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, \"inf\" or \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
                Ok(ExtReal(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtReal, E> {
                match v {
                    "inf" => Ok(ExtReal(f64::INFINITY)),
                    "-inf" => Ok(ExtReal(f64::NEG_INFINITY)),
                    "nan" => Ok(ExtReal(f64::NAN)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str(if self.0 > 0.0 { "inf" } else { "-inf" })
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// `serialize_with` helper for `f64` fields that may be infinite.
pub fn serialize_ext<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    ExtReal(*v).serialize(s)
}

/// Serializes a slice of extended reals.
pub fn ext_vec(xs: impl IntoIterator<Item = f64>) -> Vec<ExtReal> {
    xs.into_iter().map(ExtReal).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub sha256: String,
    pub rows: usize,
    pub vars: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub tol: f64,
    pub orthant_cap: usize,
    pub max_iters: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub field: String,
    /// `input`, `numerical` or `size-cap`.
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub input: InputInfo,
    pub settings: Settings,
    /// Headline numbers of the command.
    pub values: BTreeMap<String, ExtReal>,
    /// Witnesses, certificates and other structured results.
    pub details: BTreeMap<String, Value>,
    pub log: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<Failure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl Report {
    pub fn new(command: &str, input: InputInfo, settings: Settings) -> Self {
        Report {
            command: command.to_string(),
            input,
            settings,
            values: BTreeMap::new(),
            details: BTreeMap::new(),
            log: Vec::new(),
            failures: Vec::new(),
            wall_time_ms: None,
        }
    }

    pub fn value(&mut self, key: &str, v: f64) {
        self.values.insert(key.to_string(), ExtReal(v));
    }

    pub fn detail(&mut self, key: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).expect("report details serialize");
        self.details.insert(key.to_string(), v);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.log.push(line.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let label = self.input.name.as_deref().unwrap_or(&self.input.path);
        out.push_str(&format!(
            "{} on {label} ({}x{}, sha256 {})\n",
            self.command,
            self.input.rows,
            self.input.vars,
            &self.input.sha256[..12.min(self.input.sha256.len())]
        ));
        let width = self.values.keys().map(String::len).max().unwrap_or(0);
        for (k, v) in &self.values {
            out.push_str(&format!("  {k:<width$}  {v}\n"));
        }
        for (k, v) in &self.details {
            out.push_str(&format!("  {k}: {}\n", compact(v)));
        }
        for line in &self.log {
            out.push_str(&format!("  - {line}\n"));
        }
        for f in &self.failures {
            out.push_str(&format!("  failed {}: {}\n", f.field, f.message));
        }
        if let Some(ms) = self.wall_time_ms {
            out.push_str(&format!("  wall time {ms:.1} ms\n"));
        }
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
