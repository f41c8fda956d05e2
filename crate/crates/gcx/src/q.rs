//! small helpers around exact rationals

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn one() -> Q {
    Q::one()
}

pub fn zero() -> Q {
    Q::zero()
}

/// exact conversion of a finite float
pub fn from_f64(x: f64) -> Result<Q> {
    BigRational::from_float(x).ok_or_else(|| Error::Invalid(format!("non-finite weight {x}")))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// "p/q" or "p"
pub fn fmt(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational '{s}'"));
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| bad()),
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(a, b))
        }
    }
}

pub fn factorial(n: usize) -> Q {
    let mut r = BigInt::one();
    for i in 2..=n {
        r *= BigInt::from(i);
    }
    BigRational::from_integer(r)
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        for s in ["0", "-3", "7/2", "-1/6"] {
            assert_eq!(fmt(&parse(s).unwrap()), s);
        }
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert_eq!(from_f64(0.5).unwrap(), qf(1, 2));
    }
}
