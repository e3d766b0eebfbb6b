//! JSON problem documents.
//!
//! ```json
//! {
//!   "name": "optional",
//!   "A": {"inf": [[...]], "sup": [[...]]},
//!   "b": {"mid": [...], "rad": [...]},
//!   "c": {"inf": [...], "sup": [...]},
//!   "D": {"mid": [[...]], "rad": [[...]]}
//! }
//! ```
//!
//! Each of `A`, `b`, `c`, `D` is given by endpoints or by midpoint and
//! radius. Serialization always writes endpoints.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::interval::{IntervalMatrix, IntervalVector};
use crate::problem::AvlpProblem;

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub name: Option<String>,
    pub description: Option<String>,
    pub problem: AvlpProblem,
}

/// Hex SHA-256 of the raw document bytes.
pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn parse_problem(path: &Path) -> Result<ProblemFile> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_problem_str(&text)
}

pub fn parse_problem_str(text: &str) -> Result<ProblemFile> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::Parse("top level must be an object".into()))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "name" | "description" | "A" | "b" | "c" | "D") {
            return Err(Error::Parse(format!("unknown key \"{key}\"")));
        }
    }
    let text_field = |key: &str| -> Result<Option<String>> {
        match obj.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(Error::Parse(format!("\"{key}\" must be a string"))),
        }
    };
    let a = matrix_field(obj, "A")?;
    let b = vector_field(obj, "b")?;
    let c = vector_field(obj, "c")?;
    let d = matrix_field(obj, "D")?;
    Ok(ProblemFile {
        name: text_field("name")?,
        description: text_field("description")?,
        problem: AvlpProblem::new(a, b, c, d)?,
    })
}

/// The document in endpoint form.
pub fn to_json(file: &ProblemFile) -> Value {
    let p = &file.problem;
    let mut obj = Map::new();
    if let Some(name) = &file.name {
        obj.insert("name".into(), json!(name));
    }
    if let Some(d) = &file.description {
        obj.insert("description".into(), json!(d));
    }
    obj.insert("A".into(), json!({"inf": rows(p.a().inf()), "sup": rows(p.a().sup())}));
    obj.insert("b".into(), json!({"inf": entries(p.b().inf()), "sup": entries(p.b().sup())}));
    obj.insert("c".into(), json!({"inf": entries(p.c().inf()), "sup": entries(p.c().sup())}));
    obj.insert("D".into(), json!({"inf": rows(p.d().inf()), "sup": rows(p.d().sup())}));
    Value::Object(obj)
}

pub fn to_json_string(file: &ProblemFile) -> String {
    serde_json::to_string_pretty(&to_json(file)).expect("finite numbers serialize")
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn entries(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

/// Picks `(first, second, is_mid_rad)` out of an `{inf, sup}` or `{mid, rad}` object.
fn endpoints<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<(&'a Value, &'a Value, bool)> {
    let field = obj
        .get(key)
        .ok_or_else(|| Error::Parse(format!("missing \"{key}\"")))?
        .as_object()
        .ok_or_else(|| Error::Parse(format!("\"{key}\" must be an object")))?;
    let has = |k: &str| field.contains_key(k);
    for k in field.keys() {
        if !matches!(k.as_str(), "inf" | "sup" | "mid" | "rad") {
            return Err(Error::Parse(format!("{key}: unknown key \"{k}\"")));
        }
    }
    match (has("inf") || has("sup"), has("mid") || has("rad")) {
        (true, false) => match (field.get("inf"), field.get("sup")) {
            (Some(lo), Some(hi)) => Ok((lo, hi, false)),
            _ => Err(Error::Parse(format!("{key}: both \"inf\" and \"sup\" are required"))),
        },
        (false, true) => match (field.get("mid"), field.get("rad")) {
            (Some(m), Some(r)) => Ok((m, r, true)),
            _ => Err(Error::Parse(format!("{key}: both \"mid\" and \"rad\" are required"))),
        },
        (true, true) => Err(Error::Parse(format!("{key}: mixes inf/sup with mid/rad"))),
        (false, false) => Err(Error::Parse(format!("{key}: expected inf/sup or mid/rad"))),
    }
}

fn number(v: &Value, at: impl Fn() -> String) -> Result<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(Error::Parse(format!("{}: expected a finite number", at()))),
    }
}

fn parse_vector(v: &Value, label: &str) -> Result<DVector<f64>> {
    let items = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("{label}: expected an array")))?;
    let xs = items
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, || format!("{label}[{}]", i + 1)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DVector::from_vec(xs))
}

fn parse_matrix(v: &Value, label: &str) -> Result<DMatrix<f64>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("{label}: expected an array of rows")))?;
    let mut data = Vec::new();
    let mut ncols = None;
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Parse(format!("{label} row {}: expected an array", i + 1)))?;
        match ncols {
            None => ncols = Some(row.len()),
            Some(n) if n != row.len() => {
                return Err(Error::dim(format!(
                    "{label} row {} has {} entries, row 1 has {n}",
                    i + 1,
                    row.len()
                )))
            }
            _ => {}
        }
        for (j, x) in row.iter().enumerate() {
            data.push(number(x, || format!("{label}[{},{}]", i + 1, j + 1))?);
        }
    }
    let ncols = ncols.unwrap_or(0);
    Ok(DMatrix::from_row_slice(rows.len(), ncols, &data))
}

fn matrix_field(obj: &Map<String, Value>, key: &str) -> Result<IntervalMatrix> {
    let (first, second, mid_rad) = endpoints(obj, key)?;
    let (n1, n2) = if mid_rad { ("mid", "rad") } else { ("inf", "sup") };
    let x = parse_matrix(first, &format!("{key}.{n1}"))?;
    let y = parse_matrix(second, &format!("{key}.{n2}"))?;
    if x.shape() != y.shape() {
        return Err(Error::dim(format!(
            "{key}: {n1} is {}x{} but {n2} is {}x{}",
            x.nrows(),
            x.ncols(),
            y.nrows(),
            y.ncols()
        )));
    }
    if mid_rad {
        for i in 0..y.nrows() {
            for j in 0..y.ncols() {
                if y[(i, j)] < 0.0 {
                    return Err(Error::Input(format!(
                        "{key}.rad[{},{}] = {} is negative",
                        i + 1,
                        j + 1,
                        y[(i, j)]
                    )));
                }
            }
        }
        IntervalMatrix::from_mid_rad(&x, &y)
    } else {
        IntervalMatrix::new(x, y)
    }
    .map_err(|e| with_label(key, e))
}

fn vector_field(obj: &Map<String, Value>, key: &str) -> Result<IntervalVector> {
    let (first, second, mid_rad) = endpoints(obj, key)?;
    let (n1, n2) = if mid_rad { ("mid", "rad") } else { ("inf", "sup") };
    let x = parse_vector(first, &format!("{key}.{n1}"))?;
    let y = parse_vector(second, &format!("{key}.{n2}"))?;
    if x.len() != y.len() {
        return Err(Error::dim(format!(
            "{key}: {n1} has {} entries but {n2} has {}",
            x.len(),
            y.len()
        )));
    }
    if mid_rad {
        if let Some((i, r)) = y.iter().enumerate().find(|(_, r)| **r < 0.0) {
            return Err(Error::Input(format!("{key}.rad[{}] = {r} is negative", i + 1)));
        }
        IntervalVector::from_mid_rad(&x, &y)
    } else {
        IntervalVector::new(x, y)
    }
    .map_err(|e| with_label(key, e))
}

fn with_label(key: &str, e: Error) -> Error {
    match e {
        Error::Input(msg) => Error::Input(format!("{key}: {msg}")),
        Error::Dimension(msg) => Error::Dimension(format!("{key}: {msg}")),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE1: &str = r#"{
        "name": "example 1",
        "A": {"mid": [[-1, 0], [1, 0], [0, 1], [0, 1]], "rad": [[0, 0], [0, 0], [0, 0], [1, 0]]},
        "b": {"inf": [3, 3, 0, 3], "sup": [3, 3, 0, 3]},
        "c": {"inf": [0, 1], "sup": [0, 1]},
        "D": {"inf": [[0, 0], [0, 0], [1, 0], [0, 0]], "sup": [[0, 0], [0, 0], [1, 0], [0, 0]]}
    }"#;

    #[test]
    fn parses_example1() {
        let f = parse_problem_str(EXAMPLE1).unwrap();
        assert_eq!(f.problem.nrows(), 4);
        assert_eq!(f.problem.nvars(), 2);
        assert_eq!(f.name.as_deref(), Some("example 1"));
        assert_eq!(f.problem.a().get(3, 0).inf, -1.0);
    }

    #[test]
    fn round_trip_is_lossless() {
        let f = parse_problem_str(EXAMPLE1).unwrap();
        let text = to_json_string(&f);
        let g = parse_problem_str(&text).unwrap();
        assert_eq!(f, g);
        assert_eq!(text, to_json_string(&g));
    }

    #[test]
    fn zero_radius_matches_endpoints() {
        let mid = r#"{"A": {"mid": [[1.5]], "rad": [[0]]}, "b": {"mid": [2], "rad": [0]},
                      "c": {"mid": [1], "rad": [0]}, "D": {"mid": [[0]], "rad": [[0]]}}"#;
        let ends = r#"{"A": {"inf": [[1.5]], "sup": [[1.5]]}, "b": {"inf": [2], "sup": [2]},
                       "c": {"inf": [1], "sup": [1]}, "D": {"inf": [[0]], "sup": [[0]]}}"#;
        assert_eq!(parse_problem_str(mid).unwrap(), parse_problem_str(ends).unwrap());
    }

    #[test]
    fn negative_d_names_entry() {
        let text = r#"{"A": {"mid": [[1, 1]], "rad": [[0, 0]]}, "b": {"mid": [2], "rad": [0]},
                       "c": {"mid": [1, 1], "rad": [0, 0]}, "D": {"mid": [[0, -0.1]], "rad": [[0, 0]]}}"#;
        let err = parse_problem_str(text).unwrap_err();
        assert!(err.to_string().contains("D[1,2]"), "{err}");
    }

    #[test]
    fn malformed_documents() {
        let bad_entry = r#"{"A": {"inf": [[1, "x"]], "sup": [[1, 1]]}, "b": {"inf": [1], "sup": [1]},
                            "c": {"inf": [1, 1], "sup": [1, 1]}, "D": {"inf": [[0, 0]], "sup": [[0, 0]]}}"#;
        let err = parse_problem_str(bad_entry).unwrap_err();
        assert!(err.to_string().contains("A.inf[1,2]"), "{err}");
        let ragged = r#"{"A": {"inf": [[1, 1], [1]], "sup": [[1, 1], [1]]}, "b": {"inf": [1, 1], "sup": [1, 1]},
                         "c": {"inf": [1, 1], "sup": [1, 1]}, "D": {"inf": [[0, 0], [0, 0]], "sup": [[0, 0], [0, 0]]}}"#;
        let err = parse_problem_str(ragged).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
        let crossed = r#"{"A": {"inf": [[2]], "sup": [[1]]}, "b": {"inf": [1], "sup": [1]},
                          "c": {"inf": [1], "sup": [1]}, "D": {"inf": [[0]], "sup": [[0]]}}"#;
        let err = parse_problem_str(crossed).unwrap_err();
        assert!(err.to_string().contains("A:"), "{err}");
        assert!(matches!(parse_problem_str("[1]"), Err(Error::Parse(_))));
        assert!(matches!(parse_problem_str("{"), Err(Error::Parse(_))));
        let missing = r#"{"A": {"inf": [[1]], "sup": [[1]]}, "b": {"inf": [1], "sup": [1]}, "c": {"inf": [1], "sup": [1]}}"#;
        assert!(parse_problem_str(missing).unwrap_err().to_string().contains("\"D\""));
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
