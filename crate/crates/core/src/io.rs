//! JSON reading and writing of fans and bundles.
//!
//! A fan file has `dim`, `rays` and `max_cones`; a bundle file adds `rank`, `char` and
//! `filtrations`, or sets `filtrations` to `"cotangent"` / `"tangent"`. Integers may be JSON
//! numbers or decimal strings, field entries may also be `"p/q"` strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::klyachko::{cotangent_bundle, tangent_bundle, RayFiltration, Subspace, ToricVectorBundle};
use crate::lattice::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Fan(Fan),
    Bundle(ToricVectorBundle),
}

impl Input {
    pub fn fan(&self) -> &Fan {
        match self {
            Input::Fan(f) => f,
            Input::Bundle(b) => b.fan(),
        }
    }
}

fn err(context: &str, message: impl Into<String>) -> Error {
    Error::Parse { context: context.to_string(), message: message.into() }
}

fn field_of<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| err(key, "missing field"))
}

fn parse_int(v: &Value, ctx: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string().parse().expect("integer literal")),
        Value::String(s) => s.trim().parse().map_err(|_| err(ctx, format!("{s:?} is not a decimal integer"))),
        _ => Err(err(ctx, "expected an integer")),
    }
}

fn parse_usize(v: &Value, ctx: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| err(ctx, "expected a nonnegative integer"))
}

fn parse_rational(v: &Value, ctx: &str) -> Result<BigRational> {
    let text = match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        Value::String(s) => s.trim().to_string(),
        _ => return Err(err(ctx, "expected an integer or a \"p/q\" string")),
    };
    let bad = || err(ctx, format!("{text:?} is not a rational number"));
    match text.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(err(ctx, "zero denominator"));
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(text.parse().map_err(|_| bad())?)),
    }
}

fn array<'a>(v: &'a Value, ctx: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(ctx, "expected an array"))
}

pub fn fan_from_json(v: &Value) -> Result<Fan> {
    let obj = v.as_object().ok_or_else(|| err("$", "expected an object"))?;
    let dim = parse_usize(field_of(obj, "dim")?, "dim")?;
    let mut rays = Vec::new();
    for (i, r) in array(field_of(obj, "rays")?, "rays")?.iter().enumerate() {
        let ctx = format!("rays[{i}]");
        let coords = array(r, &ctx)?
            .iter()
            .enumerate()
            .map(|(k, x)| parse_int(x, &format!("{ctx}[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        rays.push(coords);
    }
    let mut cones = Vec::new();
    for (i, c) in array(field_of(obj, "max_cones")?, "max_cones")?.iter().enumerate() {
        let ctx = format!("max_cones[{i}]");
        let idx = array(c, &ctx)?
            .iter()
            .enumerate()
            .map(|(k, x)| {
                let j = parse_usize(x, &format!("{ctx}[{k}]"))?;
                if j >= rays.len() {
                    return Err(err(&format!("{ctx}[{k}]"), format!("ray index {j} out of range")));
                }
                Ok(j)
            })
            .collect::<Result<Vec<_>>>()?;
        cones.push(idx);
    }
    Fan::new(dim, rays, cones)
}

fn field_from_json(obj: &Map<String, Value>, flag: Option<u64>) -> Result<Field> {
    let file = match obj.get("char") {
        Some(v) => Some(v.as_u64().ok_or_else(|| err("char", "expected 0 or a prime"))?),
        None => None,
    };
    let c = match (file, flag) {
        (Some(a), Some(b)) if a != b => {
            return Err(err("char", format!("file says characteristic {a}, the command line says {b}")))
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => 0,
    };
    Field::from_characteristic(c)
}

fn filtration_from_json(v: &Value, field: Field, rank: usize, ctx: &str) -> Result<RayFiltration> {
    if v.is_null() {
        return RayFiltration::new(Subspace::zero(field, rank), 1, 0);
    }
    let obj = v.as_object().ok_or_else(|| err(ctx, "expected null or an object"))?;
    let bctx = format!("{ctx}.basis");
    let mut rows = Vec::new();
    for (i, row) in array(obj.get("basis").ok_or_else(|| err(&bctx, "missing field"))?, &bctx)?.iter().enumerate() {
        let rctx = format!("{bctx}[{i}]");
        let entries = array(row, &rctx)?;
        if entries.len() != rank {
            return Err(err(&rctx, format!("{} entries, expected {rank}", entries.len())));
        }
        let mut out = Vec::new();
        for (k, x) in entries.iter().enumerate() {
            let ectx = format!("{rctx}[{k}]");
            let q = parse_rational(x, &ectx)?;
            out.push(field.from_rational(&q).map_err(|e| err(&ectx, e.to_string()))?);
        }
        rows.push(out);
    }
    let step = match obj.get("step") {
        Some(s) => {
            let a = s.as_u64().ok_or_else(|| err(&format!("{ctx}.step"), "expected a positive integer"))?;
            u32::try_from(a).map_err(|_| err(&format!("{ctx}.step"), "step too large"))?
        }
        None => 1,
    };
    let shift = match obj.get("shift") {
        Some(s) => s.as_i64().ok_or_else(|| err(&format!("{ctx}.shift"), "expected an integer"))?,
        None => 0,
    };
    let subspace = Subspace::span(field, rank, rows).map_err(|e| err(&bctx, e.to_string()))?;
    RayFiltration::new(subspace, step, shift).map_err(|e| err(ctx, e.to_string()))
}

pub fn bundle_from_json(v: &Value, char_flag: Option<u64>) -> Result<ToricVectorBundle> {
    let obj = v.as_object().ok_or_else(|| err("$", "expected an object"))?;
    let fan = fan_from_json(v)?;
    let field = field_from_json(obj, char_flag)?;
    let filt = field_of(obj, "filtrations")?;
    let bundle = match filt {
        Value::String(s) if s == "cotangent" => cotangent_bundle(&fan, field)?,
        Value::String(s) if s == "tangent" => tangent_bundle(&fan, field)?,
        Value::String(s) => return Err(err("filtrations", format!("unknown constructor {s:?}"))),
        Value::Array(list) => {
            let rank = parse_usize(field_of(obj, "rank")?, "rank")?;
            if list.len() != fan.n_rays() {
                return Err(err("filtrations", format!("{} entries for {} rays", list.len(), fan.n_rays())));
            }
            let filtrations = list
                .iter()
                .enumerate()
                .map(|(j, f)| filtration_from_json(f, field, rank, &format!("filtrations[{j}]")))
                .collect::<Result<Vec<_>>>()?;
            ToricVectorBundle::new(fan, field, rank, filtrations)?
        }
        _ => return Err(err("filtrations", "expected an array or a constructor name")),
    };
    match obj.get("twist") {
        Some(t) => {
            let twist = array(t, "twist")?
                .iter()
                .enumerate()
                .map(|(j, x)| x.as_i64().ok_or_else(|| err(&format!("twist[{j}]"), "expected an integer")))
                .collect::<Result<Vec<_>>>()?;
            bundle.with_twist(twist)
        }
        None => Ok(bundle),
    }
}

/// Reads a fan, or a bundle when `filtrations` is present.
pub fn parse_input(text: &str, char_flag: Option<u64>) -> Result<Input> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| err(&format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    if v.get("filtrations").is_some() {
        Ok(Input::Bundle(bundle_from_json(&v, char_flag)?))
    } else {
        let fan = fan_from_json(&v)?;
        if let Some(obj) = v.as_object() {
            field_from_json(obj, char_flag)?;
        }
        Ok(Input::Fan(fan))
    }
}

fn int_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn scalar_json(s: &Scalar) -> Value {
    match s {
        Scalar::Rational(q) if q.is_integer() => int_json(q.numer()),
        Scalar::Rational(q) => json!(format!("{}/{}", q.numer(), q.denom())),
        Scalar::Mod { value, .. } => json!(value),
    }
}

pub fn fan_to_json(f: &Fan) -> Value {
    let rays: Vec<Value> = f.rays().iter().map(|r| Value::Array(r.iter().map(int_json).collect())).collect();
    let cones: Vec<Value> = f.cones().iter().map(|c| json!(c.rays())).collect();
    json!({ "dim": f.dim(), "rays": rays, "max_cones": cones })
}

pub fn bundle_to_json(b: &ToricVectorBundle) -> Value {
    let mut v = fan_to_json(b.fan());
    let obj = v.as_object_mut().expect("object");
    obj.insert("rank".into(), json!(b.rank()));
    obj.insert("char".into(), json!(b.field().characteristic()));
    let filtrations: Vec<Value> = b
        .filtrations()
        .iter()
        .map(|f| {
            if f.subspace.is_zero() && f.shift == 0 && f.step == 1 {
                return Value::Null;
            }
            let basis: Vec<Value> = f
                .subspace
                .basis_rows()
                .iter()
                .map(|row| Value::Array(row.iter().map(scalar_json).collect()))
                .collect();
            let mut m = Map::new();
            m.insert("basis".into(), Value::Array(basis));
            m.insert("step".into(), json!(f.step));
            if f.shift != 0 {
                m.insert("shift".into(), json!(f.shift));
            }
            Value::Object(m)
        })
        .collect();
    obj.insert("filtrations".into(), Value::Array(filtrations));
    if b.twist().iter().any(|&t| t != 0) {
        obj.insert("twist".into(), json!(b.twist()));
    }
    v
}

pub fn to_pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::example_1_5_bundle;
    use crate::fan::example_4_2_fan;

    #[test]
    fn round_trips() {
        let (b, _) = example_1_5_bundle(Field::Rational, 1).unwrap();
        let text = to_pretty(&bundle_to_json(&b));
        assert_eq!(parse_input(&text, None).unwrap(), Input::Bundle(b));
        let c = cotangent_bundle(&example_4_2_fan().unwrap(), Field::Prime(5)).unwrap();
        let text = to_pretty(&bundle_to_json(&c));
        assert_eq!(parse_input(&text, Some(5)).unwrap(), Input::Bundle(c.clone()));
        let n = c.normalize();
        assert_eq!(parse_input(&to_pretty(&bundle_to_json(&n)), None).unwrap(), Input::Bundle(n));
    }

    #[test]
    fn diagnostics() {
        let e = parse_input(r#"{"dim":2,"rays":[[1,0],[2,4]],"max_cones":[[0,1]]}"#, None).unwrap_err();
        assert!(e.to_string().contains("(2,4)"), "{e}");
        let e = parse_input(
            r#"{"dim":2,"rays":[[1,0],[0,1],[-1,-1]],"max_cones":[[0,1],[1,2],[0,2]],"rank":3,"filtrations":[{"basis":[["1","0"]]},null,null]}"#,
            None,
        )
        .unwrap_err();
        assert!(e.to_string().contains("filtrations[0].basis[0]"), "{e}");
        let e = parse_input(r#"{"dim":2,"rays":[[1,0],[0,1],[-1,-1]],"max_cones":[[0,1],[1,2],[0,2]],"char":5,"filtrations":"cotangent"}"#, Some(7)).unwrap_err();
        assert!(e.to_string().starts_with("char"));
        let ok = parse_input(r#"{"dim":2,"rays":[["1","0"],[0,1],[-1,-1]],"max_cones":[[0,1],[1,2],[0,2]],"rank":2,"filtrations":[{"basis":[["1/2","3"]]},null,null]}"#, None);
        assert!(ok.is_ok());
    }
}
