//! Exact rational helpers: parsing (fractions, decimals, scientific notation),
//! canonical formatting, decimal display, and bracketing of k-th roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `10^-digits`.
pub fn ten_pow_neg(digits: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(10u32).pow(digits))
}

/// Default interval width for irrational lift values.
pub fn default_precision() -> Rational {
    ten_pow_neg(12)
}

/// Parses `n`, `n/d`, `0.3`, `-2.5`, `1e-12`, `2.5E3` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::BadRational(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = t[i + 1..].parse().map_err(|_| bad())?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{whole}{frac}").parse().unwrap_or_else(|_| BigInt::zero());
    let scale = exp - frac.len() as i64;
    let ten = BigInt::from(10u32);
    let mut q = if scale >= 0 {
        Rational::from_integer(all * ten.pow(scale as u32))
    } else {
        Rational::new(all, ten.pow((-scale) as u32))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

/// Canonical text form: `num/den` in lowest terms, integers without a denominator.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

/// Renders a precision as `1e-N` when it is a negative power of ten.
pub fn format_precision(q: &Rational) -> String {
    if q.numer().is_one() {
        let mut d = q.denom().clone();
        let ten = BigInt::from(10u32);
        let mut n = 0u32;
        while d > BigInt::one() && (&d % &ten).is_zero() {
            d /= &ten;
            n += 1;
        }
        if d.is_one() && n > 0 {
            return format!("1e-{n}");
        }
    }
    format_rational(q)
}

/// Rounds to `digits` decimal places (half away from zero) and trims trailing zeros.
pub fn to_decimal(q: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = q.abs() * Rational::from_integer(scale.clone());
    let rounded = scaled.round().to_integer();
    let (whole, frac) = rounded.div_rem(&scale);
    let mut frac = format!("{:0>width$}", frac.to_string(), width = digits as usize);
    while frac.ends_with('0') {
        frac.pop();
    }
    let sign = if q.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac}")
    }
}

/// `1/4 (= 0.25)`.
pub fn display_both(q: &Rational) -> String {
    format!("{} (= {})", format_rational(q), to_decimal(q, 12))
}

/// Smallest multiple of `10^-digits` that is `>= q`.
pub fn ceil_decimal(q: &Rational, digits: u32) -> Rational {
    let scale = Rational::from_integer(BigInt::from(10u32).pow(digits));
    (q * &scale).ceil() / scale
}

pub fn in_unit_interval(q: &Rational) -> bool {
    !q.is_negative() && q <= &Rational::one()
}

pub fn check_unit(q: &Rational) -> Result<()> {
    if in_unit_interval(q) {
        Ok(())
    } else {
        Err(Error::OutOfUnitInterval(format_rational(q)))
    }
}

pub fn lcm_of_denominators<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Brackets `x^(1/k)` for `x >= 0` by dyadic rationals `lo <= root <= hi` with
/// `hi - lo <= width`. Returns `lo == hi` when the root is exactly dyadic.
pub fn nth_root_bounds(x: &Rational, k: u32, width: &Rational) -> (Rational, Rational) {
    assert!(!x.is_negative(), "root of a negative rational");
    assert!(k >= 1);
    if k == 1 || x.is_zero() || x.is_one() {
        return (x.clone(), x.clone());
    }
    // smallest m with 2^-m <= width
    let mut m = 0u32;
    let mut step = Rational::one();
    while &step > width {
        step /= int(2);
        m += 1;
    }
    let two_km = BigInt::one() << (k as usize * m as usize);
    let scaled = x.numer() * &two_km;
    let n = scaled.div_floor(x.denom());
    let r = n.nth_root(k);
    let denom = BigInt::one() << m as usize;
    let lo = Rational::new(r.clone(), denom.clone());
    let exact = Pow::pow(&r, k) * x.denom() == scaled;
    if exact {
        (lo.clone(), lo)
    } else {
        (lo, Rational::new(r + 1, denom))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("6/8").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("0.3").unwrap(), ratio(3, 10));
        assert_eq!(parse_rational("1").unwrap(), int(1));
        assert_eq!(parse_rational("1e-12").unwrap(), ten_pow_neg(12));
        assert_eq!(parse_rational("-2.5e1").unwrap(), int(-25));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        for bad in ["", "1/0", "a", "1.2.3", "e5", "--1"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn formats() {
        assert_eq!(format_rational(&ratio(2, 8)), "1/4");
        assert_eq!(format_rational(&int(1)), "1");
        assert_eq!(format_precision(&ten_pow_neg(12)), "1e-12");
        assert_eq!(format_precision(&ratio(1, 3)), "1/3");
        assert_eq!(display_both(&ratio(1, 4)), "1/4 (= 0.25)");
        assert_eq!(to_decimal(&ratio(1, 3), 4), "0.3333");
        assert_eq!(to_decimal(&ratio(2, 3), 4), "0.6667");
        assert_eq!(ceil_decimal(&ratio(1, 3), 2), ratio(34, 100));
    }

    #[test]
    fn root_brackets() {
        let w = default_precision();
        let (lo, hi) = nth_root_bounds(&int(2), 2, &w);
        assert!(&lo * &lo <= int(2) && &hi * &hi >= int(2));
        assert!(&hi - &lo <= w);
        let (lo, hi) = nth_root_bounds(&ratio(1, 4), 2, &w);
        assert_eq!(lo, ratio(1, 2));
        assert_eq!(hi, ratio(1, 2));
        let (lo, hi) = nth_root_bounds(&ratio(8, 27), 3, &w);
        // 2/3 is not dyadic, so the bracket is strict
        assert!(lo < ratio(2, 3) && ratio(2, 3) < hi);
    }
}
