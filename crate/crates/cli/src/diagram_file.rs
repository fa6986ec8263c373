//! JSON diagram files.
//!
//! ```json
//! {"free_loops": 0,
//!  "vertices": [{"id": 0, "label": "G", "shading0": 0}],
//!  "edges": [[[0, 0], [0, 3]], [[0, 1], [0, 2]]]}
//! ```
//!
//! A label is `"G"` or three coefficients over `(e, P1, P2)`, each a number or
//! a `[re, im]` pair. `shading0` is the shading of the region at slot 0.

use serde_json::{json, Value};
use skeinlab::skein::{Diagram, End, Label, Vertex};
use skeinlab::twobox::Side;
use skeinlab::Scalar;

use crate::report::num;

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{0}")]
    Syntax(#[from] serde_json::Error),
    #[error("at {at}: {msg}")]
    Schema { at: String, msg: String },
    #[error("{0}")]
    Diagram(#[from] skeinlab::Error),
}

fn schema(at: impl Into<String>, msg: impl Into<String>) -> FileError {
    FileError::Schema {
        at: at.into(),
        msg: msg.into(),
    }
}

fn uint(v: &Value, at: &str) -> Result<usize, FileError> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| schema(at, "expected a nonnegative integer"))
}

fn coeff(v: &Value, at: &str) -> Result<Scalar, FileError> {
    if let Some(x) = v.as_f64() {
        return Ok(Scalar::new(x, 0.0));
    }
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(Scalar::new(re, im)),
            _ => Err(schema(at, "expected [re, im] numbers")),
        },
        _ => Err(schema(at, "expected a number or [re, im]")),
    }
}

fn label(v: &Value, at: &str) -> Result<Label, FileError> {
    match v {
        Value::String(s) if s == "G" => Ok(Label::Generator),
        Value::Array(a) if a.len() == 3 => {
            let c = [
                coeff(&a[0], &format!("{at}[0]"))?,
                coeff(&a[1], &format!("{at}[1]"))?,
                coeff(&a[2], &format!("{at}[2]"))?,
            ];
            Ok(Label::Box(c))
        }
        _ => Err(schema(at, "label must be \"G\" or [c_e, c_P1, c_P2]")),
    }
}

/// Parse a closed diagram from JSON text.
pub fn parse(text: &str) -> Result<Diagram, FileError> {
    let doc: Value = serde_json::from_str(text)?;
    let obj = doc.as_object().ok_or_else(|| schema("$", "expected an object"))?;
    for k in obj.keys() {
        if !matches!(k.as_str(), "free_loops" | "vertices" | "edges") {
            return Err(schema(format!("$.{k}"), "unknown field"));
        }
    }
    let loops = match obj.get("free_loops") {
        Some(v) => uint(v, "$.free_loops")?,
        None => 0,
    };
    let empty = Vec::new();
    let vs = match obj.get("vertices") {
        Some(v) => v.as_array().ok_or_else(|| schema("$.vertices", "expected an array"))?,
        None => &empty,
    };
    let mut slots: Vec<Option<Vertex>> = vec![None; vs.len()];
    for (i, v) in vs.iter().enumerate() {
        let at = format!("$.vertices[{i}]");
        let id = uint(
            v.get("id").ok_or_else(|| schema(&at, "missing id"))?,
            &format!("{at}.id"),
        )?;
        let lab = label(
            v.get("label").ok_or_else(|| schema(&at, "missing label"))?,
            &format!("{at}.label"),
        )?;
        let side = match v.get("shading0").map(|s| s.as_u64()) {
            None | Some(Some(0)) => Side::Plus,
            Some(Some(1)) => Side::Minus,
            _ => return Err(schema(format!("{at}.shading0"), "expected 0 or 1")),
        };
        let slot = slots
            .get_mut(id)
            .ok_or_else(|| schema(format!("{at}.id"), "ids must be 0..n-1"))?;
        if slot.is_some() {
            return Err(schema(format!("{at}.id"), "duplicate id"));
        }
        *slot = Some(Vertex::new(lab, side));
    }
    let vertices: Vec<Vertex> = slots.into_iter().map(|v| v.expect("ids are a permutation")).collect();
    let es = match obj.get("edges") {
        Some(v) => v.as_array().ok_or_else(|| schema("$.edges", "expected an array"))?,
        None => &empty,
    };
    let mut edges = Vec::with_capacity(es.len());
    for (i, e) in es.iter().enumerate() {
        let at = format!("$.edges[{i}]");
        let end = |x: Option<&Value>, j: usize| -> Result<(usize, usize), FileError> {
            let at = format!("{at}[{j}]");
            match x.and_then(|x| x.as_array()).map(|a| a.as_slice()) {
                Some([v, s]) => {
                    let (v, s) = (uint(v, &at)?, uint(s, &at)?);
                    if v >= vertices.len() || s > 3 {
                        return Err(schema(at, "no such vertex slot"));
                    }
                    Ok((v, s))
                }
                _ => Err(schema(at, "expected [vertex, slot]")),
            }
        };
        let pair = e
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| schema(&at, "expected two ends"))?;
        edges.push((end(pair.first(), 0)?, end(pair.get(1), 1)?));
    }
    Ok(Diagram::closed(vertices, &edges, loops)?)
}

fn coeff_value(z: Scalar) -> Value {
    if z.im == 0.0 {
        num(z.re)
    } else {
        Value::Array(vec![num(z.re), num(z.im)])
    }
}

/// Serialize a closed diagram; inverse of [`parse`].
pub fn to_value(d: &Diagram) -> Result<Value, FileError> {
    if !d.is_closed() {
        return Err(FileError::Diagram(skeinlab::Error::NotClosed));
    }
    let vertices: Vec<Value> = d
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let label = match &v.label {
                Label::Generator => json!("G"),
                Label::Box(c) => Value::Array(c.iter().map(|&z| coeff_value(z)).collect()),
            };
            json!({"id": i, "label": label, "shading0": if v.side == Side::Plus { 0 } else { 1 }})
        })
        .collect();
    let mut edges = Vec::new();
    for a in 0..d.n_darts() {
        let b = d.pairing[a];
        if a < b {
            let at = |x| match d.end(x) {
                End::V(v, s) => json!([v, s]),
                End::B(_) => unreachable!("closed diagram"),
            };
            edges.push(json!([at(a), at(b)]));
        }
    }
    Ok(json!({"free_loops": d.free_loops, "vertices": vertices, "edges": edges}))
}
