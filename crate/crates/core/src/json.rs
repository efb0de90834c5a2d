//! JSON encoding for state files and reports.
//!
//! State file schema:
//!
//! ```json
//! {"n": 2, "mode": "float", "amplitudes": [[0.7071, 0.0], [0.0, 0.0], [0.0, 0.0], [0.7071, 0.0]]}
//! ```
//!
//! In `"exact"` mode each real and imaginary part is a rational string
//! `"p/q"` or `"p"` (JSON integers are also accepted). Floats are written
//! with 17 significant digits so they round-trip bit-exactly.

use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde_json::{json, Number, Value};

use crate::error::{Error, Result};
use crate::state_core::{Amplitudes, GaussianRational, Mode, StateVector};

/// A float as a JSON number with 17 significant digits; non-finite values
/// become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&format!("{x:.16e}")).expect("formatted float is a valid JSON number"))
}

pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p = BigInt::from_str(p).map_err(|_| bad())?;
    let q = BigInt::from_str(q).map_err(|_| bad())?;
    if q.is_positive() {
        Ok(BigRational::new(p, q))
    } else if q.is_negative() {
        Ok(BigRational::new(-p, -q))
    } else {
        Err(bad())
    }
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Float => "float",
        Mode::Exact => "exact",
    }
}

/// `[[re, im], ...]` in the encoding of the amplitudes' mode.
pub fn amplitudes_to_json(amplitudes: &Amplitudes) -> Value {
    let v: Vec<Value> = match amplitudes {
        Amplitudes::Float(v) => v.iter().map(|z| json!([num(z.re), num(z.im)])).collect(),
        Amplitudes::Exact(v) => v
            .iter()
            .map(|z| json!([rational_to_string(&z.re), rational_to_string(&z.im)]))
            .collect(),
    };
    Value::Array(v)
}

pub fn state_to_json(psi: &StateVector) -> Value {
    json!({ "n": psi.n(), "mode": mode_name(psi.mode()), "amplitudes": amplitudes_to_json(psi.amplitudes()) })
}

fn float_part(v: &Value) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Parse(format!("expected a finite number, found {v}")))
}

fn exact_part(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => {
            let s = n.to_string();
            let i =
                BigInt::from_str(&s).map_err(|_| Error::Parse(format!("exact amplitude `{s}` is not an integer")))?;
            Ok(BigRational::from_integer(i))
        }
        other => Err(Error::Parse(format!("expected a rational string, found {other}"))),
    }
}

fn pair(v: &Value) -> Result<(&Value, &Value)> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok((re, im)),
        _ => Err(Error::Parse(format!("amplitude must be [re, im], found {v}"))),
    }
}

pub fn state_from_value(v: &Value) -> Result<StateVector> {
    let n = v["n"]
        .as_u64()
        .ok_or_else(|| Error::Parse("missing or invalid `n`".into()))? as usize;
    if n == 0 || n >= usize::BITS as usize {
        return Err(Error::QubitCount(n));
    }
    let mode = match v.get("mode").and_then(Value::as_str).unwrap_or("float") {
        "float" => Mode::Float,
        "exact" => Mode::Exact,
        other => return Err(Error::Parse(format!("unknown mode `{other}`"))),
    };
    let amps = v["amplitudes"]
        .as_array()
        .ok_or_else(|| Error::Parse("missing `amplitudes` array".into()))?;
    if amps.len() != 1 << n {
        return Err(Error::SizeMismatch {
            expected: 1 << n,
            found: amps.len(),
        });
    }
    match mode {
        Mode::Float => {
            let v: Vec<Complex64> = amps
                .iter()
                .map(|a| {
                    let (re, im) = pair(a)?;
                    Ok(Complex64::new(float_part(re)?, float_part(im)?))
                })
                .collect::<Result<_>>()?;
            StateVector::from_float(v)
        }
        Mode::Exact => {
            let v: Vec<GaussianRational> = amps
                .iter()
                .map(|a| {
                    let (re, im) = pair(a)?;
                    Ok(Complex::new(exact_part(re)?, exact_part(im)?))
                })
                .collect::<Result<_>>()?;
            StateVector::from_exact(v)
        }
    }
}

pub fn state_from_str(s: &str) -> Result<StateVector> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    state_from_value(&v)
}
