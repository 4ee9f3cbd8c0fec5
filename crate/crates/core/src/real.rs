//! Exact nonnegative reals of the form `Π b_i^{e_i}` with rational bases and
//! rational exponents, plus zero.
//!
//! Every value produced by the four lifting operators lives in this class:
//! rationals, k-th roots of rationals, and weighted geometric means of
//! rationals. Comparison is decided exactly by clearing exponent denominators
//! and comparing big rationals, so no floating point is ever trusted.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, nth_root_bounds, parse_rational, Rational};

#[derive(Clone, Debug)]
pub enum Real {
    Zero,
    /// base -> exponent; bases are positive and not 1, exponents nonzero.
    Product(BTreeMap<Rational, Rational>),
}

impl Real {
    pub fn zero() -> Self {
        Real::Zero
    }

    pub fn one() -> Self {
        Real::Product(BTreeMap::new())
    }

    /// Panics on negative input; use [`Real::try_from_rational`] for untrusted values.
    pub fn from_rational(q: &Rational) -> Self {
        Self::try_from_rational(q).expect("negative rational")
    }

    pub fn try_from_rational(q: &Rational) -> Result<Self> {
        if q.is_negative() {
            return Err(Error::OutOfUnitInterval(format_rational(q)));
        }
        Ok(Self::power(q, &Rational::one()))
    }

    /// `base^exp`, `base >= 0`.
    pub fn power(base: &Rational, exp: &Rational) -> Self {
        if base.is_zero() {
            return if exp.is_zero() { Real::one() } else { Real::Zero };
        }
        let mut m = BTreeMap::new();
        if !base.is_one() && !exp.is_zero() {
            m.insert(base.clone(), exp.clone());
        }
        Real::Product(m)
    }

    /// `q^(1/k)`.
    pub fn root(q: &Rational, k: u32) -> Self {
        Self::power(q, &Rational::new(BigInt::one(), BigInt::from(k)))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Real::Zero)
    }

    pub fn mul(&self, other: &Real) -> Real {
        match (self, other) {
            (Real::Zero, _) | (_, Real::Zero) => Real::Zero,
            (Real::Product(a), Real::Product(b)) => {
                let mut m = a.clone();
                for (base, e) in b {
                    let entry = m.entry(base.clone()).or_insert_with(Rational::zero);
                    *entry += e;
                    if entry.is_zero() {
                        m.remove(base);
                    }
                }
                Real::Product(m)
            }
        }
    }

    /// `self^e`. Zero raised to a positive power stays zero; panics for
    /// zero raised to a nonpositive power.
    pub fn pow(&self, e: &Rational) -> Real {
        match self {
            Real::Zero => {
                assert!(e.is_positive(), "0 raised to a nonpositive power");
                Real::Zero
            }
            Real::Product(m) => {
                if e.is_zero() {
                    return Real::one();
                }
                Real::Product(m.iter().map(|(b, x)| (b.clone(), x * e)).collect())
            }
        }
    }

    /// `self / other` for nonzero `other`.
    pub fn div(&self, other: &Real) -> Real {
        self.mul(&other.pow(&-Rational::one()))
    }

    /// The exact rational value, if all exponents are integers.
    pub fn to_rational(&self) -> Option<Rational> {
        match self {
            Real::Zero => Some(Rational::zero()),
            Real::Product(m) => {
                let mut acc = Rational::one();
                for (b, e) in m {
                    if !e.is_integer() {
                        return None;
                    }
                    acc *= pow_int(b, &e.to_integer());
                }
                Some(acc)
            }
        }
    }

    /// Dyadic bracket `lo <= self <= hi` with `hi - lo <= width`. Exact for
    /// rational values.
    pub fn bounds(&self, width: &Rational) -> (Rational, Rational) {
        if let Some(q) = self.to_rational() {
            return (q.clone(), q);
        }
        let Real::Product(m) = self else { unreachable!() };
        let d = m.values().fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
        let mut radicand = Rational::one();
        for (b, e) in m {
            radicand *= pow_int(b, &(e * Rational::from_integer(d.clone())).to_integer());
        }
        let k: u32 = d.try_into().expect("exponent denominator too large");
        nth_root_bounds(&radicand, k, width)
    }

    /// Midpoint of the bracket, for display.
    pub fn approx(&self, width: &Rational) -> Rational {
        let (lo, hi) = self.bounds(width);
        (lo + hi) / Rational::from_integer(BigInt::from(2))
    }
}

fn pow_int(b: &Rational, e: &BigInt) -> Rational {
    let n: i64 = e.try_into().expect("exponent too large");
    if n >= 0 {
        Pow::pow(b, n as u64)
    } else {
        Pow::pow(b.recip(), (-n) as u64)
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Real {}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Real::Zero, Real::Zero) => Ordering::Equal,
            (Real::Zero, _) => Ordering::Less,
            (_, Real::Zero) => Ordering::Greater,
            (Real::Product(_), Real::Product(_)) => {
                let Real::Product(ratio) = self.div(other) else {
                    unreachable!()
                };
                if ratio.is_empty() {
                    return Ordering::Equal;
                }
                let d = ratio.values().fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
                let dq = Rational::from_integer(d);
                let mut acc = Rational::one();
                for (b, e) in &ratio {
                    acc *= pow_int(b, &(e * &dq).to_integer());
                }
                acc.cmp(&Rational::one())
            }
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.to_rational() {
            return write!(f, "{}", format_rational(&q));
        }
        let Real::Product(m) = self else { unreachable!() };
        let parts: Vec<String> = m
            .iter()
            .map(|(b, e)| {
                if e.is_one() {
                    format_rational(b)
                } else {
                    format!("({})^({})", format_rational(b), format_rational(e))
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl FromStr for Real {
    type Err = Error;

    /// Accepts the [`Display`](fmt::Display) form: a rational, or factors
    /// `q` / `(q)^(e)` joined by `*`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if !t.contains('^') && !t.contains('*') {
            return Real::try_from_rational(&parse_rational(t)?);
        }
        let mut acc = Real::one();
        for factor in t.split('*') {
            let factor = factor.trim();
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (strip_parens(b)?, parse_rational(strip_parens(e)?)?),
                None => (factor, Rational::one()),
            };
            let base = parse_rational(base)?;
            if base.is_negative() || (base.is_zero() && !exp.is_positive()) {
                return Err(Error::Parse(format!("bad factor `{factor}`")));
            }
            acc = acc.mul(&Real::power(&base, &exp));
        }
        Ok(acc)
    }
}

fn strip_parens(s: &str) -> Result<&str> {
    let s = s.trim();
    s.strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected parenthesised `{s}`")))
}
