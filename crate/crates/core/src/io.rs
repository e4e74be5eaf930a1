//! Canonical JSON for data sets, templates and models, plus CSV plot data.
//!
//! Output keys are sorted and every float is written with 17 significant
//! digits, so reading a file and writing it back is byte-identical. `null`
//! stands for an unbounded (+∞) offset component.

use std::fmt::Write as _;
use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::data::{DataPoint, DataSet, IndexSet};
use crate::error::{Result, TpwaError};
use crate::model::{AffinePiece, OutOfDomainPolicy, PwaModel, DEFAULT_TOL};
use crate::template::{Offset, TemplateSpec};

fn bad(msg: impl Into<String>) -> TpwaError {
    TpwaError::InvalidInput(msg.into())
}

fn float(v: f64) -> Value {
    if v == f64::INFINITY {
        Value::Null
    } else {
        Number::from_f64(v)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
}

fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| float(x)).collect())
}

fn obj(entries: Vec<(&str, Value)>) -> Value {
    Value::Object(
        entries
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect::<Map<_, _>>(),
    )
}

/// Compact canonical text for `value`.
pub fn to_canonical_string(value: &Value) -> String {
    let mut out = String::new();
    emit(value, &mut out);
    out
}

fn emit(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                write!(out, "{i}").unwrap();
            } else if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else {
                write!(out, "{:.16e}", n.as_f64().unwrap_or(f64::NAN)).unwrap();
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, v) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                emit(v, out);
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
                emit(&map[k], out);
            }
            out.push('}');
        }
    }
}

fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| bad(format!("malformed JSON: {e}")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| bad(format!("missing field \"{key}\"")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| bad(format!("{what} must be a nonnegative integer")))
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| bad(format!("{what} must be a number")))
}

fn as_vec(v: &Value, what: &str) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what} must be an array")))?
        .iter()
        .map(|x| as_f64(x, what))
        .collect()
}

fn as_matrix(v: &Value, what: &str) -> Result<Vec<Vec<f64>>> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what} must be an array of arrays")))?
        .iter()
        .map(|r| as_vec(r, what))
        .collect()
}

pub fn dataset_to_value(data: &DataSet) -> Value {
    let points = data
        .points()
        .iter()
        .map(|p| obj(vec![("x", floats(&p.x)), ("y", floats(&p.y))]))
        .collect();
    obj(vec![
        ("d", data.d().into()),
        ("e", data.e().into()),
        ("points", Value::Array(points)),
    ])
}

pub fn dataset_to_json(data: &DataSet) -> String {
    to_canonical_string(&dataset_to_value(data)) + "\n"
}

pub fn dataset_from_value(v: &Value) -> Result<DataSet> {
    let points = field(v, "points")?
        .as_array()
        .ok_or_else(|| bad("\"points\" must be an array"))?
        .iter()
        .map(|p| {
            Ok(DataPoint::new(
                as_vec(field(p, "x")?, "x")?,
                as_vec(field(p, "y")?, "y")?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let data = DataSet::new(points)?;
    if let Some(d) = v.get("d") {
        let d = as_usize(d, "d")?;
        if d != data.d() {
            return Err(TpwaError::DimensionMismatch {
                expected: d,
                got: data.d(),
            });
        }
    }
    if let Some(e) = v.get("e") {
        let e = as_usize(e, "e")?;
        if e != data.e() {
            return Err(TpwaError::DimensionMismatch {
                expected: e,
                got: data.e(),
            });
        }
    }
    Ok(data)
}

pub fn dataset_from_json(text: &str) -> Result<DataSet> {
    dataset_from_value(&parse(text)?)
}

pub fn template_to_value(t: &TemplateSpec) -> Value {
    obj(vec![
        ("kind", Value::String(t.kind().name().into())),
        ("d", t.d().into()),
        (
            "components",
            Value::Array(t.components().iter().map(|c| floats(c)).collect()),
        ),
    ])
}

/// Accepts `{"kind", "d", "components"}` or a bare array of component rows.
pub fn template_from_value(v: &Value) -> Result<TemplateSpec> {
    if v.is_array() {
        return TemplateSpec::custom(as_matrix(v, "template components")?);
    }
    let components = as_matrix(field(v, "components")?, "template components")?;
    let kind = v.get("kind").and_then(Value::as_str).unwrap_or("custom");
    let t = match kind {
        "rectangular" | "octagon" => {
            let d = as_usize(field(v, "d")?, "d")?;
            let t = if kind == "rectangular" {
                TemplateSpec::rectangular(d)
            } else {
                TemplateSpec::octagon(d)
            };
            if t.components() != components.as_slice() {
                return Err(bad(format!("components do not match a {kind} template")));
            }
            t
        }
        "custom" => TemplateSpec::custom(components)?,
        other => return Err(bad(format!("unknown template kind \"{other}\""))),
    };
    Ok(t)
}

pub fn template_from_json(text: &str) -> Result<TemplateSpec> {
    template_from_value(&parse(text)?)
}

pub fn model_to_value(m: &PwaModel) -> Value {
    let pieces = m
        .pieces
        .iter()
        .map(|p| {
            obj(vec![
                ("A", Value::Array(p.a.iter().map(|r| floats(r)).collect())),
                ("b", floats(&p.b)),
                ("c", floats(p.offset.as_slice())),
                (
                    "support",
                    Value::Array(p.support.iter().map(Value::from).collect()),
                ),
            ])
        })
        .collect();
    obj(vec![
        ("template", template_to_value(&m.template)),
        ("epsilon", float(m.epsilon)),
        ("tol", float(m.tol)),
        ("d", m.d.into()),
        ("e", m.e.into()),
        ("pieces", Value::Array(pieces)),
    ])
}

pub fn model_to_json(m: &PwaModel) -> String {
    to_canonical_string(&model_to_value(m)) + "\n"
}

pub fn model_from_value(v: &Value) -> Result<PwaModel> {
    let template = template_from_value(field(v, "template")?)?;
    let epsilon = as_f64(field(v, "epsilon")?, "epsilon")?;
    let tol = match v.get("tol") {
        Some(t) => as_f64(t, "tol")?,
        None => DEFAULT_TOL,
    };
    let pieces = field(v, "pieces")?
        .as_array()
        .ok_or_else(|| bad("\"pieces\" must be an array"))?
        .iter()
        .map(|p| {
            let offset = field(p, "c")?
                .as_array()
                .ok_or_else(|| bad("\"c\" must be an array"))?
                .iter()
                .map(|c| {
                    if c.is_null() {
                        Ok(f64::INFINITY)
                    } else {
                        as_f64(c, "c")
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let support = match p.get("support") {
                Some(s) => IndexSet::new(
                    s.as_array()
                        .ok_or_else(|| bad("\"support\" must be an array"))?
                        .iter()
                        .map(|k| as_usize(k, "support index"))
                        .collect::<Result<Vec<_>>>()?,
                )?,
                None => IndexSet::empty(),
            };
            Ok(AffinePiece {
                a: as_matrix(field(p, "A")?, "A")?,
                b: as_vec(field(p, "b")?, "b")?,
                offset: Offset(offset),
                support,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let model = PwaModel::new(pieces, template, epsilon, tol)?;
    for (key, want) in [("d", model.d), ("e", model.e)] {
        if let Some(got) = v.get(key) {
            let got = as_usize(got, key)?;
            if got != want {
                return Err(TpwaError::DimensionMismatch {
                    expected: want,
                    got,
                });
            }
        }
    }
    Ok(model)
}

pub fn model_from_json(text: &str) -> Result<PwaModel> {
    model_from_value(&parse(text)?)
}

/// Query inputs: a JSON array of `x` vectors, or a data set whose `x` values
/// are used.
pub fn query_points_from_json(text: &str) -> Result<Vec<Vec<f64>>> {
    let v = parse(text)?;
    if v.is_array() {
        as_matrix(&v, "query points")
    } else {
        Ok(dataset_from_value(&v)?
            .points()
            .iter()
            .map(|p| p.x.clone())
            .collect())
    }
}

/// CSV with columns `x1..xd, y1..ye, piece`; `piece` is the 1-based index of
/// the piece that evaluates each data point.
pub fn write_plot_csv(
    out: &mut dyn Write,
    model: &PwaModel,
    data: &DataSet,
    policy: OutOfDomainPolicy,
) -> Result<()> {
    let io = |e: std::io::Error| bad(format!("write failed: {e}"));
    let mut header: Vec<String> = (1..=data.d()).map(|i| format!("x{i}")).collect();
    header.extend((1..=data.e()).map(|i| format!("y{i}")));
    header.push("piece".into());
    writeln!(out, "{}", header.join(",")).map_err(io)?;
    for p in data.points() {
        let piece = model.select_piece(&p.x, policy)? + 1;
        let row: Vec<String> = p.x.iter().chain(&p.y).map(|v| format!("{v}")).collect();
        writeln!(out, "{},{piece}", row.join(",")).map_err(io)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FitConfig;
    use crate::template::TemplateKind;
    use crate::topdown::fit_optimal;

    #[test]
    fn dataset_roundtrip() {
        let data = DataSet::from_xy(
            vec![vec![0.1, -2.0], vec![1e-300, 3.0]],
            vec![vec![1.0 / 3.0], vec![-0.0]],
        )
        .unwrap();
        let text = dataset_to_json(&data);
        let back = dataset_from_json(&text).unwrap();
        assert_eq!(back, data);
        assert_eq!(dataset_to_json(&back), text);
        assert!(text.starts_with("{\"d\":2,\"e\":1,\"points\":[{\"x\":[1.0000000000000001e-1,"));
    }

    #[test]
    fn model_roundtrip_is_byte_identical() {
        let xs: Vec<f64> = (0..9).map(|i| i as f64 / 8.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (3.0 * x).sin()).collect();
        let data = DataSet::from_scalar(&xs, &ys).unwrap();
        let model = fit_optimal(&TemplateSpec::octagon(1), &data, &FitConfig::new(0.05)).unwrap();
        let text = model_to_json(&model);
        let back = model_from_json(&text).unwrap();
        assert_eq!(model_to_json(&back), text);
        assert_eq!(back, model);
    }

    #[test]
    fn unbounded_offsets_are_null() {
        let piece = AffinePiece {
            a: vec![vec![1.0]],
            b: vec![0.0],
            offset: Offset::unbounded(2),
            support: IndexSet::empty(),
        };
        let m = PwaModel::new(vec![piece], TemplateSpec::rectangular(1), 0.0, DEFAULT_TOL).unwrap();
        let text = model_to_json(&m);
        assert!(text.contains("\"c\":[null,null]"));
        assert_eq!(model_from_json(&text).unwrap(), m);
    }

    #[test]
    fn templates_and_queries() {
        let t = template_from_json("[[1, 0], [0, 1], [-1, -1]]").unwrap();
        assert_eq!(t.h(), 3);
        assert_eq!(t.kind(), TemplateKind::Custom);
        let o = TemplateSpec::octagon(2);
        assert_eq!(template_from_value(&template_to_value(&o)).unwrap(), o);
        assert!(
            template_from_json("{\"kind\":\"rectangular\",\"d\":2,\"components\":[[1,0]]}")
                .is_err()
        );
        assert_eq!(
            query_points_from_json("[[1.5], [2]]").unwrap(),
            vec![vec![1.5], vec![2.0]]
        );
        assert!(dataset_from_json("{\"points\": 3}").is_err());
        assert!(dataset_from_json("not json").is_err());
    }
}
