//! Serde adapters for exact numbers.
//!
//! Integers travel as JSON integers (strings when they exceed 64 bits);
//! rationals travel as `"p/q"` strings. Integers are accepted wherever a
//! rational is expected.
//!
//! Use with `#[serde(with = "crate::exact")]`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

pub trait Exact: Sized {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self, String>;
}

impl Exact for BigInt {
    fn to_json(&self) -> Value {
        match i64::try_from(self) {
            Ok(x) => Value::from(x),
            Err(_) => Value::String(self.to_string()),
        }
    }

    fn from_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::Number(n) => n
                .as_i64()
                .map(BigInt::from)
                .or_else(|| n.as_u64().map(BigInt::from))
                .ok_or_else(|| format!("expected an integer, found {n}")),
            Value::String(s) => s
                .trim()
                .parse()
                .map_err(|_| format!("expected an integer, found {s:?}")),
            other => Err(format!("expected an integer, found {other}")),
        }
    }
}

impl Exact for BigRational {
    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn from_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(_) => BigInt::from_json(v).map(BigRational::from_integer),
            other => Err(format!("expected a rational \"p/q\", found {other}")),
        }
    }
}

impl<T: Exact> Exact for Vec<T> {
    fn to_json(&self) -> Value {
        Value::Array(self.iter().map(Exact::to_json).collect())
    }

    fn from_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::Array(items) => items.iter().map(T::from_json).collect(),
            other => Err(format!("expected an array, found {other}")),
        }
    }
}

impl<T: Exact> Exact for BTreeMap<String, T> {
    fn to_json(&self) -> Value {
        Value::Object(self.iter().map(|(k, v)| (k.clone(), v.to_json())).collect())
    }

    fn from_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::Object(items) => items
                .iter()
                .map(|(k, v)| T::from_json(v).map(|t| (k.clone(), t)))
                .collect(),
            other => Err(format!("expected an object, found {other}")),
        }
    }
}

impl<T: Exact> Exact for Option<T> {
    fn to_json(&self) -> Value {
        self.as_ref().map_or(Value::Null, Exact::to_json)
    }

    fn from_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::Null => Ok(None),
            other => T::from_json(other).map(Some),
        }
    }
}

pub fn serialize<T: Exact, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
    value.to_json().serialize(s)
}

pub fn deserialize<'de, T: Exact, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
    let v = Value::deserialize(d)?;
    T::from_json(&v).map_err(D::Error::custom)
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let bad = || format!("expected a rational \"p/q\", found {s:?}");
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q == BigInt::from(0) {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(p, q))
}
