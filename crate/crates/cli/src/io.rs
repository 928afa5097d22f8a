use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rug::{Complex, Float};
use serde_json::{json, Map, Value};

use sextic::dynamics::DynamicsState;
use sextic::exactnum::{decimal_digits, Poly};
use sextic::locus::PoleConfiguration;
use sextic::potential::{Pole, RationalPotential};
use sextic::quasi::{ExpSign, QuasiRationalFunction};

pub fn float_str(x: &Float) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.to_string_radix(10, Some(decimal_digits(x.prec())))
}

pub fn complex_json(z: &Complex) -> Value {
    json!({ "re": float_str(z.real()), "im": float_str(z.imag()) })
}

pub fn complex_list(zs: &[Complex]) -> Value {
    Value::Array(zs.iter().map(complex_json).collect())
}

/// Ascending coefficients.
pub fn poly_json(p: &Poly) -> Value {
    complex_list(p.coeffs())
}

/// JSON number, or null when not finite.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn parse_float(s: &str, prec: u32) -> Result<Float> {
    let p = Float::parse(s.trim()).map_err(|e| anyhow!("bad number {s:?}: {e}"))?;
    Ok(Float::with_val(prec, p))
}

fn value_float(v: &Value, prec: u32) -> Result<Float> {
    match v {
        Value::String(s) => parse_float(s, prec),
        Value::Number(n) => parse_float(&n.to_string(), prec),
        _ => bail!("expected a number or decimal string, got {v}"),
    }
}

/// Accepts `{"re","im"}`, a decimal string or a plain number.
pub fn value_complex(v: &Value, prec: u32) -> Result<Complex> {
    match v {
        Value::Object(m) => {
            let re = m.get("re").map(|x| value_float(x, prec)).transpose()?;
            let im = m.get("im").map(|x| value_float(x, prec)).transpose()?;
            let zero = Float::new(prec);
            Ok(Complex::with_val(prec, (re.unwrap_or(zero.clone()), im.unwrap_or(zero))))
        }
        _ => Ok(Complex::with_val(prec, value_float(v, prec)?)),
    }
}

/// Parses `a`, `a+bi`, `a-bi` or `bi`.
pub fn parse_complex(s: &str, prec: u32) -> Result<Complex> {
    let s = s.trim().replace(' ', "");
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex::with_val(prec, parse_float(&s, prec)?));
    };
    // split at the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        x => x,
    };
    Ok(Complex::with_val(prec, (parse_float(re, prec)?, parse_float(im, prec)?)))
}

fn get<'a>(m: &'a Value, key: &str) -> Result<&'a Value> {
    m.get(key).ok_or_else(|| anyhow!("missing field {key:?}"))
}

pub fn eps_json(e: ExpSign) -> Value {
    json!(e.value())
}

fn value_eps(v: &Value) -> Result<ExpSign> {
    match v {
        Value::String(s) if s == "minus" => Ok(ExpSign::Minus),
        Value::String(s) if s == "plus" => Ok(ExpSign::Plus),
        _ => v
            .as_i64()
            .and_then(ExpSign::from_i64)
            .ok_or_else(|| anyhow!("eps must be -1, 1, \"minus\" or \"plus\"")),
    }
}

pub fn potential_json(v: &RationalPotential, meta: Map<String, Value>) -> Value {
    let mut poly = Map::new();
    for (k, c) in v.poly_part.coeffs().iter().enumerate() {
        if c.is_zero() && k != 6 {
            continue;
        }
        let entry = if c.imag().is_zero() {
            Value::String(float_str(c.real()))
        } else {
            complex_json(c)
        };
        poly.insert(k.to_string(), entry);
    }
    let poles: Vec<Value> = v
        .poles
        .iter()
        .map(|p| {
            json!({
                "re": float_str(p.location.real()),
                "im": float_str(p.location.imag()),
                "mult": p.mult,
            })
        })
        .collect();
    let mut meta = meta;
    meta.insert("symmetric".into(), json!(v.symmetric));
    json!({
        "poly": poly,
        "ell": float_str(&v.ell),
        "poles": poles,
        "meta": meta,
    })
}

pub fn potential_from_json(v: &Value, prec: u32) -> Result<RationalPotential> {
    let poly = get(v, "poly")?.as_object().context("\"poly\" must be an object")?;
    let mut coeffs = Vec::new();
    for (k, c) in poly {
        let k: usize = k.parse().with_context(|| format!("bad power {k:?}"))?;
        if k > 6 {
            bail!("polynomial part has degree {k} > 6");
        }
        if coeffs.len() <= k {
            coeffs.resize(k + 1, Complex::new(prec));
        }
        coeffs[k] = value_complex(c, prec)?;
    }
    let poles = match v.get("poles") {
        None => Vec::new(),
        Some(p) => p
            .as_array()
            .context("\"poles\" must be an array")?
            .iter()
            .map(|e| {
                let mult = e.get("mult").and_then(Value::as_u64).unwrap_or(1);
                Ok(Pole {
                    location: value_complex(e, prec)?,
                    mult: u32::try_from(mult)?,
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let symmetric = v
        .get("meta")
        .and_then(|m| m.get("symmetric"))
        .and_then(Value::as_bool)
        .unwrap_or(false);
    Ok(RationalPotential {
        poly_part: Poly::from_coeffs(prec, coeffs),
        ell: match v.get("ell") {
            Some(e) => value_float(e, prec)?,
            None => Float::new(prec),
        },
        poles,
        symmetric,
    })
}

pub fn config_json(c: &PoleConfiguration) -> Value {
    let points: Vec<Value> = c
        .points
        .iter()
        .map(|(x, k)| json!({ "re": float_str(x.real()), "im": float_str(x.imag()), "mult": k }))
        .collect();
    json!({
        "points": points,
        "nu": float_str(&c.nu),
        "ell": float_str(&c.ell),
        "symmetric": c.symmetric,
    })
}

/// A configuration file, or a potential `x^6 - nu x^2 + ...` read as one.
pub fn config_from_json(v: &Value, prec: u32) -> Result<PoleConfiguration> {
    if v.get("poly").is_some() {
        let pot = potential_from_json(v, prec)?;
        let c = pot.poly_part.coeffs();
        let nu = Float::with_val(prec, -c.get(2).map(|z| z.real().clone()).unwrap_or(Float::new(prec)));
        let points = pot.poles.iter().map(|p| (p.location.clone(), p.mult)).collect();
        return Ok(PoleConfiguration::new(points, nu, pot.ell, pot.symmetric));
    }
    let points = get(v, "points")?
        .as_array()
        .context("\"points\" must be an array")?
        .iter()
        .map(|e| {
            let mult = e.get("mult").and_then(Value::as_u64).unwrap_or(1);
            Ok((value_complex(e, prec)?, u32::try_from(mult)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PoleConfiguration::new(
        points,
        value_float(get(v, "nu")?, prec)?,
        match v.get("ell") {
            Some(e) => value_float(e, prec)?,
            None => Float::new(prec),
        },
        v.get("symmetric").and_then(Value::as_bool).unwrap_or(false),
    ))
}

pub fn psi_json(psi: &QuasiRationalFunction) -> Value {
    json!({
        "mu": float_str(&psi.mu),
        "eps": eps_json(psi.eps),
        "zeros": complex_list(&psi.zeros),
        "poles": complex_list(&psi.poles),
    })
}

/// A quasi-rational function file, or any report carrying one under `"psi"`.
pub fn psi_from_json(v: &Value, prec: u32) -> Result<QuasiRationalFunction> {
    let v = v.get("psi").unwrap_or(v);
    let list = |key: &str| -> Result<Vec<Complex>> {
        match v.get(key) {
            None => Ok(Vec::new()),
            Some(a) => a
                .as_array()
                .with_context(|| format!("{key:?} must be an array"))?
                .iter()
                .map(|z| value_complex(z, prec))
                .collect(),
        }
    };
    Ok(QuasiRationalFunction::new(
        value_float(get(v, "mu")?, prec)?,
        value_eps(get(v, "eps")?)?,
        list("zeros")?,
        list("poles")?,
    ))
}

pub fn state_json(s: &DynamicsState) -> Value {
    let points: Vec<Value> = s
        .points
        .iter()
        .map(|(z, g)| json!({ "re": float_str(z.real()), "im": float_str(z.imag()), "charge": g }))
        .collect();
    json!({ "t": num(s.t), "phase": complex_json(&s.phase), "points": points })
}

pub fn state_from_json(v: &Value, prec: u32) -> Result<DynamicsState> {
    let points = get(v, "points")?
        .as_array()
        .context("\"points\" must be an array")?
        .iter()
        .map(|e| {
            let g = e.get("charge").and_then(Value::as_i64).unwrap_or(1);
            Ok((value_complex(e, prec)?, i32::try_from(g)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let t = v.get("t").and_then(Value::as_f64).unwrap_or(0.0);
    let mut s = DynamicsState::new(points, t, prec)?;
    if let Some(p) = v.get("phase") {
        s.phase = value_complex(p, prec)?;
    }
    Ok(s)
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Pretty JSON with sorted keys, to `path` or stdout.
pub fn emit(value: &Value, path: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    #[test]
    fn complex_literals() {
        let cases = [
            ("1", 1.0, 0.0),
            ("-2.5", -2.5, 0.0),
            ("1+2i", 1.0, 2.0),
            ("1-2i", 1.0, -2.0),
            ("-i", 0.0, -1.0),
            ("3i", 0.0, 3.0),
            ("1e-3+1e+2i", 1e-3, 100.0),
        ];
        for (s, re, im) in cases {
            let z = parse_complex(s, P).unwrap();
            assert_eq!((z.real().to_f64(), z.imag().to_f64()), (re, im), "{s}");
        }
        assert!(parse_complex("1+xi", P).is_err());
    }

    #[test]
    fn decimal_strings_round_trip() {
        let x = Float::with_val(P, 2).sqrt() / 7;
        assert_eq!(parse_float(&float_str(&x), P).unwrap(), x);
        let tiny = Float::with_val(P, Float::with_val(P, 3).ln()) * Float::with_val(P, 1e-200);
        assert_eq!(parse_float(&float_str(&tiny), P).unwrap(), tiny);
    }

    #[test]
    fn potential_round_trip() {
        let nu = Float::with_val(P, 7) / 3;
        let mut v = RationalPotential::canonical(&nu, &Float::with_val(P, 1));
        v.poles.push(Pole {
            location: Complex::with_val(P, (Float::with_val(P, 2).sqrt(), Float::with_val(P, 1) / 3)),
            mult: 2,
        });
        let j = potential_json(&v, Map::new());
        let back = potential_from_json(&j, P).unwrap();
        assert_eq!(back.poly_part.coeffs(), v.poly_part.coeffs());
        assert_eq!(back.poles, v.poles);
        assert_eq!(back.ell, v.ell);
        assert_eq!(potential_json(&back, Map::new()), j);
    }
}
