//! Exact rational arithmetic helpers.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_biguint(v: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(v.clone()))
}

pub fn pow(base: &Rational, exp: i64) -> Rational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), (-exp) as usize)
    }
}

pub fn to_f64(v: &Rational) -> f64 {
    match (v.numer().to_f64(), v.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge operands: compare bit lengths first.
            let shift = v.numer().bits().max(v.denom().bits()) as i64 - 900;
            let shift = shift.max(0) as usize;
            let n = (v.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (v.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Exact square root, when `v` is the square of a rational.
pub fn sqrt_exact(v: &Rational) -> Option<Rational> {
    if v.is_negative() {
        return None;
    }
    if v.is_zero() {
        return Some(Rational::zero());
    }
    let n = v.numer().magnitude().sqrt();
    let d = v.denom().magnitude().sqrt();
    let candidate = Rational::new(BigInt::from(n), BigInt::from(d));
    (&candidate * &candidate == *v).then_some(candidate)
}

/// Formats `n/d` (or `n` for integers).
pub fn format(v: &Rational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Serde adapter storing a rational as the string `"n/d"`.
pub mod serde_string {
    use super::Rational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).ok_or_else(|| D::Error::custom(format!("not a rational: {s:?}")))
    }
}

/// Same as [`serde_string`] for vectors.
pub mod serde_string_vec {
    use super::Rational;
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&super::format(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| super::parse(s).ok_or_else(|| D::Error::custom(format!("not a rational: {s:?}"))))
            .collect()
    }
}
