//! Exact rational helpers and rendering.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// 2^(-e) as an exact rational.
pub fn pow2_neg(e: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << e)
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, i| acc * i)
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `num/den`, always with an explicit denominator.
pub fn exact(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::Invalid(format!("not a rational number: {text:?}"));
    let text = text.trim();
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

fn digits(x: &BigUint) -> i64 {
    x.to_string().len() as i64
}

fn pow10(e: u32) -> BigUint {
    BigUint::from(10u32).pow(e)
}

/// Decimal rendering with `sig` significant digits. Approximate by nature.
pub fn format_decimal(x: &Rational, sig: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let sig = sig.max(1);
    let neg = x.is_negative();
    let a = x.numer().abs().to_biguint().unwrap();
    let b = x.denom().to_biguint().unwrap();

    // find e with 10^e <= a/b < 10^(e+1)
    let mut e = digits(&a) - digits(&b);
    let below = |e: i64| {
        if e >= 0 {
            a < &b * pow10(e as u32)
        } else {
            &a * pow10((-e) as u32) < b
        }
    };
    if below(e) {
        e -= 1;
    }

    let s = sig as i64 - 1 - e;
    let (num, den) = if s >= 0 {
        (&a * pow10(s as u32), b.clone())
    } else {
        (a.clone(), &b * pow10((-s) as u32))
    };
    let (q, r) = num.div_rem(&den);
    let mut m = if r * 2u32 >= den { q + 1u32 } else { q };
    if m == pow10(sig as u32) {
        m /= 10u32;
        e += 1;
    }
    let ds = m.to_string();

    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if e >= -5 && e < sig as i64 {
        if e >= 0 {
            let int_len = (e + 1) as usize;
            out.push_str(&ds[..int_len]);
            let frac = ds[int_len..].trim_end_matches('0');
            if !frac.is_empty() {
                out.push('.');
                out.push_str(frac);
            }
        } else {
            out.push_str("0.");
            for _ in 0..(-e - 1) {
                out.push('0');
            }
            out.push_str(ds.trim_end_matches('0'));
        }
    } else {
        out.push_str(&ds[..1]);
        let frac = ds[1..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
        out.push_str(&format!("e{e}"));
    }
    out
}

pub fn floor_u64(x: &Rational) -> Option<u64> {
    x.floor().to_integer().to_u64()
}
