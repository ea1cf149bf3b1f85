//! Frame files and report serialization.
//!
//! Frame file (JSON):
//!
//! ```text
//! { "dim": n, "field": "real" | "complex", "labels": [...], "weights": [...],
//!   "vectors": [[...], ...] }
//! ```
//!
//! Complex entries are `[re, im]` pairs, real entries plain numbers.
//! `weights` may be omitted (counting measure) and so may `labels`
//! (`"1".."m"`). Vectors are stored unweighted. Every float written by this
//! module uses 17 significant digits, so files re-parse bit-exactly.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::frame::{Field, Frame, MeasureSpace, QuadratureRule};
use crate::numerics::{CVector, C64};

/// `%.17g`-style text for a finite `f64`. Negative zero keeps its sign.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0.0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if !(-4..17).contains(&exp) {
        let mut m = format!("{}.{}", &digits[..1], &digits[1..]);
        while m.ends_with('0') {
            m.pop();
        }
        if m.ends_with('.') {
            m.pop();
        }
        return format!("{sign}{m}e{exp}");
    }
    let (int_part, frac_part) = if exp >= 0 {
        let e = exp as usize;
        (digits[..=e].to_string(), digits[e + 1..].to_string())
    } else {
        (
            "0".to_string(),
            format!("{}{}", "0".repeat((-exp - 1) as usize), digits),
        )
    };
    let frac = frac_part.trim_end_matches('0');
    if frac.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac}")
    }
}

/// Rounded to 6 significant digits for human-readable output.
pub fn fmt_short(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let sci = format!("{x:.5e}");
        let (m, e) = sci.split_once('e').expect("exponent present");
        let m = if m.contains('.') {
            m.trim_end_matches('0').trim_end_matches('.')
        } else {
            m
        };
        format!("{m}e{e}")
    }
}

struct G17;

impl serde_json::ser::Formatter for G17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        writer.write_all(fmt_g17(value).as_bytes())
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        writer.write_all(fmt_g17(value as f64).as_bytes())
    }
}

/// Compact JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

/// A vector as it appears in files and reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum VectorRepr {
    Real(Vec<f64>),
    Complex(Vec<[f64; 2]>),
}

impl VectorRepr {
    pub fn encode(v: &CVector, field: Field) -> Self {
        match field {
            Field::Real => VectorRepr::Real(v.iter().map(|z| z.re).collect()),
            Field::Complex => VectorRepr::Complex(v.iter().map(|z| [z.re, z.im]).collect()),
        }
    }
}

#[derive(Serialize)]
struct FrameFileOut<'a> {
    dim: usize,
    field: Field,
    labels: &'a [String],
    weights: &'a [f64],
    vectors: Vec<VectorRepr>,
}

pub fn frame_to_json(f: &Frame) -> Result<String> {
    let out = FrameFileOut {
        dim: f.dim(),
        field: f.field(),
        labels: f.space().labels(),
        weights: f.space().weights(),
        vectors: f.vectors().iter().map(|v| VectorRepr::encode(v, f.field())).collect(),
    };
    to_json(&out)
}

fn bad(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Format(format!("{path}: {msg}"))
}

fn as_f64(v: &Value, path: &str) -> Result<f64> {
    let x = v
        .as_f64()
        .ok_or_else(|| bad(path, format!("expected a number, found {v}")))?;
    if !x.is_finite() {
        return Err(bad(path, "non-finite number"));
    }
    Ok(x)
}

fn label_text(v: &Value, path: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(bad(path, format!("expected a string or number label, found {other}"))),
    }
}

/// Parses a frame file. Syntax errors carry serde_json's line and column;
/// structural errors name the offending field.
pub fn parse_frame(text: &str) -> Result<Frame> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| Error::Format(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let obj = root.as_object().ok_or_else(|| bad("$", "expected a JSON object"))?;

    let dim = obj
        .get("dim")
        .ok_or_else(|| bad("dim", "missing"))?
        .as_u64()
        .ok_or_else(|| bad("dim", "expected a positive integer"))? as usize;
    let field = match obj.get("field") {
        None => Field::Real,
        Some(Value::String(s)) if s == "real" => Field::Real,
        Some(Value::String(s)) if s == "complex" => Field::Complex,
        Some(other) => return Err(bad("field", format!("expected \"real\" or \"complex\", found {other}"))),
    };
    let raw_vectors = obj
        .get("vectors")
        .ok_or_else(|| bad("vectors", "missing"))?
        .as_array()
        .ok_or_else(|| bad("vectors", "expected an array"))?;
    let m = raw_vectors.len();

    let labels = match obj.get("labels") {
        None => (1..=m).map(|i| i.to_string()).collect(),
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, v)| label_text(v, &format!("labels[{i}]")))
            .collect::<Result<Vec<_>>>()?,
        Some(_) => return Err(bad("labels", "expected an array")),
    };
    let weights = match obj.get("weights") {
        None | Some(Value::Null) => vec![1.0; labels.len()],
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, v)| as_f64(v, &format!("weights[{i}]")))
            .collect::<Result<Vec<_>>>()?,
        Some(_) => return Err(bad("weights", "expected an array")),
    };
    if labels.len() != m {
        return Err(bad("labels", format!("{} labels for {m} vectors", labels.len())));
    }
    if weights.len() != m {
        return Err(bad("weights", format!("{} weights for {m} vectors", weights.len())));
    }

    let mut vectors = Vec::with_capacity(m);
    for (i, raw) in raw_vectors.iter().enumerate() {
        let path = format!("vectors[{i}]");
        let entries = raw.as_array().ok_or_else(|| bad(&path, "expected an array"))?;
        if entries.len() != dim {
            return Err(bad(&path, format!("expected {dim} entries, found {}", entries.len())));
        }
        let v = entries
            .iter()
            .enumerate()
            .map(|(j, e)| parse_scalar(e, field, &format!("{path}[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        vectors.push(CVector::from_vec(v));
    }
    let space = MeasureSpace::new(labels, weights).map_err(|e| Error::Format(e.to_string()))?;
    Frame::new(space, dim, vectors, field).map_err(|e| Error::Format(e.to_string()))
}

fn parse_scalar(v: &Value, field: Field, path: &str) -> Result<C64> {
    match (field, v) {
        (Field::Real, Value::Number(_)) => Ok(C64::new(as_f64(v, path)?, 0.0)),
        (Field::Complex, Value::Array(pair)) if pair.len() == 2 => {
            Ok(C64::new(as_f64(&pair[0], path)?, as_f64(&pair[1], path)?))
        }
        // a bare number is accepted in complex files as a real entry
        (Field::Complex, Value::Number(_)) => Ok(C64::new(as_f64(v, path)?, 0.0)),
        (Field::Real, _) => Err(bad(path, format!("expected a real number, found {v}"))),
        (Field::Complex, _) => Err(bad(path, format!("expected an [re, im] pair, found {v}"))),
    }
}

pub fn read_frame(path: &std::path::Path) -> Result<Frame> {
    let text = std::fs::read_to_string(path)?;
    parse_frame(&text).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct MeasureSpaceFile {
    pub labels: Vec<String>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

pub fn quadrature_to_json(q: &QuadratureRule) -> Result<String> {
    to_json(&MeasureSpaceFile {
        labels: q.space.labels().to_vec(),
        nodes: q.nodes.clone(),
        weights: q.space.weights().to_vec(),
    })
}

/// Parses `"1,0,-2.5"` (real) or `"1:0,0:-1"` (complex `re:im` pairs).
pub fn parse_vector_arg(text: &str) -> Result<(CVector, Field)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Format(format!("vector {text:?}: empty component")));
    }
    let complex = parts.iter().any(|p| p.contains(':'));
    let parse = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::Format(format!("vector {text:?}: bad number {s:?}")))
    };
    let entries = parts
        .iter()
        .map(|p| match p.split_once(':') {
            Some((re, im)) => Ok(C64::new(parse(re)?, parse(im)?)),
            None => Ok(C64::new(parse(p)?, 0.0)),
        })
        .collect::<Result<Vec<_>>>()?;
    let field = if complex { Field::Complex } else { Field::Real };
    Ok((CVector::from_vec(entries), field))
}
