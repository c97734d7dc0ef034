//! JSON records with 17 significant digits per number.

use serde_json::{Map, Number, Value};

use hexcmc::assembly::{AssemblyParams, AssemblySolution};
use hexcmc::delaunay::{DelaunayKind, DelaunayParams};

use crate::CliError;

pub type Record = Map<String, Value>;

/// `x` in scientific notation with 16 digits after the point; non-finite
/// values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    match format!("{x:.16e}").parse::<Number>() {
        Ok(n) => Value::Number(n),
        Err(_) => Value::Null,
    }
}

pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s
}

pub fn parse(text: &str, what: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("{what}: {e}")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, CliError> {
    v.get(key).ok_or_else(|| CliError::Invalid(format!("missing field {key}")))
}

pub fn get_f64(v: &Value, key: &str) -> Result<f64, CliError> {
    field(v, key)?.as_f64().ok_or_else(|| CliError::Invalid(format!("field {key} is not a number")))
}

pub fn get_usize(v: &Value, key: &str) -> Result<usize, CliError> {
    field(v, key)?
        .as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| CliError::Invalid(format!("field {key} is not a count")))
}

pub fn get_str<'a>(v: &'a Value, key: &str) -> Result<&'a str, CliError> {
    field(v, key)?.as_str().ok_or_else(|| CliError::Invalid(format!("field {key} is not a string")))
}

pub fn kind_from_name(name: &str) -> Result<DelaunayKind, CliError> {
    match name {
        "unduloid" => Ok(DelaunayKind::Unduloid),
        "nodoid" => Ok(DelaunayKind::Nodoid),
        other => Err(CliError::Invalid(format!("not a Delaunay kind: {other}"))),
    }
}

pub fn delaunay(p: &DelaunayParams) -> Record {
    let mut m = Record::new();
    m.insert("kind".into(), p.kind.name().into());
    m.insert("r".into(), num(p.r));
    m.insert("Q".into(), num(p.Q));
    m.insert("R".into(), num(p.R));
    m.insert("S".into(), num(p.S));
    m.insert("q".into(), num(p.q));
    m.insert("s".into(), num(p.s));
    m
}

pub fn delaunay_from(v: &Value) -> Result<DelaunayParams, CliError> {
    let p = DelaunayParams {
        kind: kind_from_name(get_str(v, "kind")?)?,
        r: get_f64(v, "r")?,
        Q: get_f64(v, "Q")?,
        R: get_f64(v, "R")?,
        S: get_f64(v, "S")?,
        q: get_f64(v, "q")?,
        s: get_f64(v, "s")?,
    };
    p.validate().map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(p)
}

pub fn assembly(sol: &AssemblySolution) -> Record {
    let p = &sol.params;
    let mut m = Record::new();
    m.insert("kind".into(), "assembly".into());
    m.insert("r1".into(), num(p.r1));
    m.insert("r2".into(), num(p.r2));
    m.insert("Q0".into(), num(p.Q0));
    m.insert("R1".into(), num(p.R1));
    m.insert("R2".into(), num(p.R2));
    m.insert("S".into(), num(p.S()));
    m.insert("m_u".into(), p.m_u.into());
    m.insert("m_n".into(), p.m_n.into());
    m.insert("residual_norm".into(), num(sol.residual_norm));
    m.insert("side_chord".into(), num(sol.side_chord()));
    m.insert("diagonal_chord".into(), num(sol.diagonal_chord()));
    m.insert("mismatch".into(), num(sol.mismatch()));
    m.insert("unduloid".into(), Value::Object(delaunay(&sol.unduloid)));
    m.insert("nodoid".into(), Value::Object(delaunay(&sol.nodoid)));
    m
}

pub fn assembly_from(v: &Value) -> Result<AssemblySolution, CliError> {
    let params = AssemblyParams {
        r1: get_f64(v, "r1")?,
        r2: get_f64(v, "r2")?,
        Q0: get_f64(v, "Q0")?,
        R1: get_f64(v, "R1")?,
        R2: get_f64(v, "R2")?,
        m_u: get_usize(v, "m_u")?,
        m_n: get_usize(v, "m_n")?,
    };
    Ok(AssemblySolution {
        params,
        unduloid: delaunay_from(field(v, "unduloid")?)?,
        nodoid: delaunay_from(field(v, "nodoid")?)?,
        residual_norm: get_f64(v, "residual_norm")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_exactly() {
        for x in [2.0, 2.0 / 3f64.sqrt(), 1e-300, -0.1, 0.0, 123456.789e10] {
            let v = num(x);
            assert_eq!(v.as_f64(), Some(x));
            let text = serde_json::to_string(&v).unwrap();
            let mantissa = text.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.len(), 18, "{text}");
            let back: Value = serde_json::from_str(&text).unwrap();
            assert_eq!(back.as_f64(), Some(x));
        }
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(serde_json::to_string(&num(2.0)).unwrap(), "2.0000000000000000e+0");
    }

    #[test]
    fn delaunay_record_round_trips() {
        let p = DelaunayParams::trivial(DelaunayKind::Nodoid);
        let text = to_text(&Value::Object(delaunay(&p)));
        assert_eq!(delaunay_from(&parse(&text, "t").unwrap()).unwrap(), p);
    }
}
