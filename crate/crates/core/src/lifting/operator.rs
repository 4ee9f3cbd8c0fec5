use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::rational::{check_unit, display_both, format_rational, to_decimal, Rational};
use crate::real::Real;
use crate::terms::Prob;

/// The convex-algebra structure `⊕_p` on `[0,1]` used to lift distances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LiftOperator {
    /// `p x + (1-p) y`
    Standard,
    /// `max(x, y)`
    Max,
    /// `(p x^k + (1-p) y^k)^(1/k)`, integer `k >= 1`
    PowerMean(u32),
    /// `x^p y^(1-p)`
    Geometric,
}

impl LiftOperator {
    pub fn all_families() -> [LiftOperator; 4] {
        [
            LiftOperator::Standard,
            LiftOperator::Max,
            LiftOperator::PowerMean(2),
            LiftOperator::Geometric,
        ]
    }

    /// Whether lift values are reported as exact rationals.
    pub fn is_exact_regime(&self) -> bool {
        matches!(
            self,
            LiftOperator::Standard | LiftOperator::Max | LiftOperator::PowerMean(1)
        )
    }

    /// `x ⊕_p y` on exact reals, without range checks.
    pub fn combine(&self, p: &Rational, x: &Real, y: &Real) -> Result<Real> {
        let q = Rational::one() - p;
        match *self {
            LiftOperator::Standard | LiftOperator::PowerMean(1) => {
                let (x, y) = (rational_of(x)?, rational_of(y)?);
                Ok(Real::from_rational(&(p * x + q * y)))
            }
            LiftOperator::Max => Ok(x.max(y).clone()),
            LiftOperator::PowerMean(k) => {
                let e = Rational::from_integer(BigInt::from(k));
                let (xk, yk) = (rational_of(&pow_nonneg(x, &e))?, rational_of(&pow_nonneg(y, &e))?);
                Ok(Real::root(&(p * xk + q * yk), k))
            }
            LiftOperator::Geometric => {
                if x.is_zero() || y.is_zero() {
                    Ok(Real::Zero)
                } else {
                    Ok(x.pow(p).mul(&y.pow(&q)))
                }
            }
        }
    }

    /// The n-ary homomorphic extension `⊕_i w_i x_i` over weighted values.
    /// Zero weights are ignored.
    pub fn fold(&self, cells: &[(Rational, Rational)]) -> Real {
        let live = cells.iter().filter(|(w, _)| !w.is_zero());
        match *self {
            LiftOperator::Standard | LiftOperator::PowerMean(1) => Real::from_rational(&live.map(|(w, x)| w * x).sum()),
            LiftOperator::Max => {
                Real::from_rational(&live.map(|(_, x)| x.clone()).max().unwrap_or_else(Rational::zero))
            }
            LiftOperator::PowerMean(k) => Real::root(&live.map(|(w, x)| w * Pow::pow(x, k)).sum(), k),
            LiftOperator::Geometric => {
                let mut acc = Real::one();
                for (w, x) in live {
                    if x.is_zero() {
                        return Real::Zero;
                    }
                    acc = acc.mul(&Real::power(x, w));
                }
                acc
            }
        }
    }
}

fn pow_nonneg(x: &Real, e: &Rational) -> Real {
    if x.is_zero() {
        Real::Zero
    } else {
        x.pow(e)
    }
}

fn rational_of(x: &Real) -> Result<Rational> {
    x.to_rational().ok_or_else(|| Error::NotRational(x.to_string()))
}

impl fmt::Display for LiftOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftOperator::Standard => f.write_str("standard"),
            LiftOperator::Max => f.write_str("max"),
            LiftOperator::PowerMean(k) => write!(f, "power:{k}"),
            LiftOperator::Geometric => f.write_str("geometric"),
        }
    }
}

impl FromStr for LiftOperator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "standard" => Ok(LiftOperator::Standard),
            "max" => Ok(LiftOperator::Max),
            "geometric" => Ok(LiftOperator::Geometric),
            other => {
                let k = other
                    .strip_prefix("power:")
                    .and_then(|k| k.parse::<u32>().ok())
                    .filter(|k| *k >= 1)
                    .ok_or_else(|| Error::UnknownOperator(other.to_string()))?;
                Ok(LiftOperator::PowerMean(k))
            }
        }
    }
}

/// A lifted distance: exact, or a rational enclosure of an irrational value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftValue {
    Exact(Rational),
    Approx { lo: Rational, hi: Rational },
}

impl LiftValue {
    pub fn from_real(op: LiftOperator, r: &Real, precision: &Rational) -> LiftValue {
        if op.is_exact_regime() {
            if let Some(q) = r.to_rational() {
                return LiftValue::Exact(q);
            }
        }
        let (lo, hi) = r.bounds(precision);
        LiftValue::Approx { lo, hi }
    }

    pub fn lo(&self) -> &Rational {
        match self {
            LiftValue::Exact(q) => q,
            LiftValue::Approx { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &Rational {
        match self {
            LiftValue::Exact(q) => q,
            LiftValue::Approx { hi, .. } => hi,
        }
    }

    pub fn width(&self) -> Rational {
        self.hi() - self.lo()
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.lo() <= q && q <= self.hi()
    }

    /// `self <= other` is not refuted by the enclosures.
    pub fn possibly_le(&self, other: &LiftValue) -> bool {
        self.lo() <= other.hi()
    }

    /// `self <= other` holds for every point of both enclosures.
    pub fn certainly_le(&self, other: &LiftValue) -> bool {
        self.hi() <= other.lo()
    }

    pub fn overlaps(&self, other: &LiftValue) -> bool {
        self.possibly_le(other) && other.possibly_le(self)
    }
}

impl fmt::Display for LiftValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftValue::Exact(q) => f.write_str(&display_both(q)),
            LiftValue::Approx { lo, hi } if lo == hi => f.write_str(&display_both(lo)),
            LiftValue::Approx { lo, hi } => {
                let mid = (lo + hi) / Rational::from_integer(BigInt::from(2));
                write!(
                    f,
                    "[{}, {}] (≈ {})",
                    format_rational(lo),
                    format_rational(hi),
                    to_decimal(&mid, 12)
                )
            }
        }
    }
}

/// `x ⊕_p y` for `x, y ∈ [0,1]` and `p ∈ (0,1)`.
pub fn oplus(op: LiftOperator, p: &Prob, x: &Rational, y: &Rational, precision: &Rational) -> Result<LiftValue> {
    if !p.is_interior() {
        return Err(Error::ProbOutOfRange(p.to_string(), "expected (0,1)"));
    }
    check_unit(x)?;
    check_unit(y)?;
    let r = op.combine(p.value(), &Real::from_rational(x), &Real::from_rational(y))?;
    Ok(LiftValue::from_real(op, &r, precision))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{default_precision, int, ratio};

    fn p(n: i64, d: i64) -> Prob {
        Prob::interior(ratio(n, d)).unwrap()
    }

    #[test]
    fn table_examples() {
        let w = default_precision();
        assert_eq!(
            oplus(LiftOperator::Standard, &p(1, 2), &ratio(1, 5), &ratio(2, 5), &w).unwrap(),
            LiftValue::Exact(ratio(3, 10))
        );
        for pp in [p(1, 3), p(1, 2), p(9, 10)] {
            assert_eq!(
                oplus(LiftOperator::Max, &pp, &ratio(7, 10), &ratio(7, 10), &w).unwrap(),
                LiftValue::Exact(ratio(7, 10))
            );
        }
        let g = oplus(LiftOperator::Geometric, &p(1, 2), &int(0), &int(1), &w).unwrap();
        assert_eq!(g, LiftValue::Approx { lo: int(0), hi: int(0) });
    }

    #[test]
    fn power_mean_one_matches_standard() {
        let w = default_precision();
        let a = oplus(LiftOperator::PowerMean(1), &p(1, 3), &ratio(1, 5), &ratio(1, 2), &w).unwrap();
        let b = oplus(LiftOperator::Standard, &p(1, 3), &ratio(1, 5), &ratio(1, 2), &w).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn power_mean_is_interval() {
        let w = default_precision();
        let v = oplus(LiftOperator::PowerMean(2), &p(1, 2), &int(0), &int(1), &w).unwrap();
        // sqrt(1/2)
        assert!(v.width() <= w);
        assert!(v.lo() * v.lo() <= ratio(1, 2) && v.hi() * v.hi() >= ratio(1, 2));
    }

    #[test]
    fn rejects_out_of_range() {
        let w = default_precision();
        assert!(oplus(LiftOperator::Standard, &p(1, 2), &int(2), &int(0), &w).is_err());
        assert!(oplus(
            LiftOperator::Standard,
            &Prob::new(int(1)).unwrap(),
            &int(0),
            &int(0),
            &w
        )
        .is_err());
    }

    #[test]
    fn tokens() {
        for t in ["standard", "max", "power:3", "geometric"] {
            assert_eq!(t.parse::<LiftOperator>().unwrap().to_string(), t);
        }
        for bad in ["power:0", "power:", "mean", "power:x"] {
            assert!(bad.parse::<LiftOperator>().is_err());
        }
    }

    #[test]
    fn fold_agrees_with_binary_combination() {
        let cells = [
            (ratio(1, 2), ratio(1, 5)),
            (ratio(1, 4), ratio(3, 5)),
            (ratio(1, 4), ratio(1, 10)),
        ];
        for op in [
            LiftOperator::Standard,
            LiftOperator::Max,
            LiftOperator::PowerMean(3),
            LiftOperator::Geometric,
        ] {
            // 1/2 a ⊕ (1/2 b ⊕ 1/2 c)
            let inner = op
                .combine(
                    &ratio(1, 2),
                    &Real::from_rational(&cells[1].1),
                    &Real::from_rational(&cells[2].1),
                )
                .unwrap();
            let outer = op
                .combine(&ratio(1, 2), &Real::from_rational(&cells[0].1), &inner)
                .unwrap();
            assert_eq!(op.fold(&cells), outer, "{op}");
        }
    }
}
