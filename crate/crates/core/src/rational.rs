//! Exact rational scalars and their string encoding (`"num/den"`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// The scalar field used everywhere in the crate.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3/2"`, `"-4"` or `"0"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad_rational(s))?;
            let d: BigInt = d.trim().parse().map_err(|_| bad_rational(s))?;
            if d.is_zero() {
                return Err(bad_rational(s));
            }
            Q::new(n, d)
        }
        None => Q::from_integer(s.parse().map_err(|_| bad_rational(s))?),
    };
    Ok(parsed)
}

fn bad_rational(s: &str) -> Error {
    Error::Schema(format!("not a rational number: {s:?}"))
}

pub fn format_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn ceil_i64(x: &Q) -> i64 {
    to_i64(&x.ceil())
}

pub fn floor_i64(x: &Q) -> i64 {
    to_i64(&x.floor())
}

fn to_i64(x: &Q) -> i64 {
    i64::try_from(x.to_integer()).expect("integer part out of i64 range")
}

/// `s (s-1) ... (s-j+1) / j!` for integer `s` (possibly negative) and `j >= 0`.
pub fn binomial(s: i64, j: u32) -> Q {
    let mut acc = Q::one();
    for i in 0..j as i64 {
        acc = acc * q(s - i) / q(i + 1);
    }
    acc
}

pub fn factorial(k: u32) -> Q {
    (1..=k as i64).fold(Q::one(), |acc, i| acc * q(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("3/2").unwrap(), frac(3, 2));
        assert_eq!(parse_q("-4").unwrap(), q(-4));
        assert_eq!(parse_q("6/-4").unwrap(), frac(-3, 2));
        assert_eq!(format_q(&frac(-3, 2)), "-3/2");
        assert_eq!(format_q(&q(7)), "7");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn ceilings_of_negative_fractions() {
        assert_eq!(ceil_i64(&frac(-1, 2)), 0);
        assert_eq!(ceil_i64(&frac(1, 2)), 1);
        assert_eq!(floor_i64(&frac(-1, 2)), -1);
        assert_eq!(ceil_i64(&q(-3)), -3);
    }

    #[test]
    fn generalized_binomial() {
        assert_eq!(binomial(5, 2), q(10));
        assert_eq!(binomial(-1, 2), q(1));
        assert_eq!(binomial(-3, 1), q(-3));
        assert_eq!(binomial(1, 2), q(0));
        assert_eq!(binomial(7, 0), q(1));
    }
}
