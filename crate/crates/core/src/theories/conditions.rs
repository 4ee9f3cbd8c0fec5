//! Spot checks of the conditions on `⊕_p`: the convex-algebra laws,
//! monotonicity, and `lim_{λ→0} (x+λ) ⊕_p (y+λ) <= x ⊕_p y`.

use num_traits::{One, Zero};

use crate::lifting::LiftOperator;
use crate::rational::{display_both, format_rational, ten_pow_neg, Rational};
use crate::real::Real;
use crate::terms::Prob;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{law} fails for {op}: {detail}")]
pub struct ConditionFailure {
    pub law: &'static str,
    pub op: LiftOperator,
    pub detail: String,
}

type Check<T = ()> = std::result::Result<T, ConditionFailure>;

fn fail(law: &'static str, op: LiftOperator, detail: String) -> ConditionFailure {
    ConditionFailure { law, op, detail }
}

fn comb(op: LiftOperator, law: &'static str, p: &Rational, x: &Real, y: &Real) -> Check<Real> {
    op.combine(p, x, y).map_err(|e| fail(law, op, e.to_string()))
}

fn r(q: &Rational) -> Real {
    Real::from_rational(q)
}

/// Idempotency, skew commutativity and skew associativity at one sample,
/// compared exactly.
pub fn check_convex_laws(op: LiftOperator, p: &Prob, q: &Prob, x: &Rational, y: &Rational, z: &Rational) -> Check {
    let (p, q) = (p.value(), q.value());
    let one = Rational::one();
    let (rx, ry, rz) = (r(x), r(y), r(z));

    let idem = comb(op, "idempotency", p, &rx, &rx)?;
    if idem != rx {
        return Err(fail(
            "idempotency",
            op,
            format!("{0} ⊕_{1} {0} = {2}", format_rational(x), format_rational(p), idem),
        ));
    }

    let lhs = comb(op, "skew commutativity", p, &rx, &ry)?;
    let rhs = comb(op, "skew commutativity", &(&one - p), &ry, &rx)?;
    if lhs != rhs {
        return Err(fail("skew commutativity", op, format!("{lhs} != {rhs}")));
    }

    let pq = p * q;
    if pq < one {
        let law = "skew associativity";
        let inner = (&one - p) * q / (&one - &pq);
        let lhs = comb(op, law, q, &comb(op, law, p, &rx, &ry)?, &rz)?;
        let rhs = comb(op, law, &pq, &rx, &comb(op, law, &inner, &ry, &rz)?)?;
        if lhs != rhs {
            return Err(fail(
                law,
                op,
                format!("p = {}, q = {}: {lhs} != {rhs}", format_rational(p), format_rational(q)),
            ));
        }
    }
    Ok(())
}

/// `x ⊕_p y <= x' ⊕_p y'` for the componentwise ordered pairs.
pub fn check_monotone(op: LiftOperator, p: &Prob, a: (&Rational, &Rational), b: (&Rational, &Rational)) -> Check {
    let (x, x2) = if a.0 <= b.0 { (a.0, b.0) } else { (b.0, a.0) };
    let (y, y2) = if a.1 <= b.1 { (a.1, b.1) } else { (b.1, a.1) };
    let lo = comb(op, "monotonicity", p.value(), &r(x), &r(y))?;
    let hi = comb(op, "monotonicity", p.value(), &r(x2), &r(y2))?;
    if lo > hi {
        return Err(fail("monotonicity", op, format!("{lo} > {hi}")));
    }
    Ok(())
}

/// Tolerance for the limit check outside the exact regime.
pub fn limit_tolerance() -> Rational {
    ten_pow_neg(9)
}

/// Checks the limit condition along `λ = 10^-3, 10^-6, 10^-9, ...`, with
/// `x + λ` clamped to 1. The values must not increase as `λ` shrinks. In the
/// exact regime every step must satisfy `f(λ) <= f(0) + λ`; otherwise the
/// sequence is extended by factors of `10^-3` (down to `10^-300`) until the
/// upper bound of `f(λ)` is within the tolerance of `f(0)`. Returns the last
/// `λ` used.
pub fn check_limit(op: LiftOperator, p: &Prob, x: &Rational, y: &Rational) -> Check<Rational> {
    let law = "limit";
    let p = p.value();
    let one = Rational::one();
    let f = |l: &Rational| -> Check<Real> {
        let xl = (x + l).min(one.clone());
        let yl = (y + l).min(one.clone());
        comb(op, law, p, &r(&xl), &r(&yl))
    };
    let f0 = f(&Rational::zero())?;
    let tol = limit_tolerance();
    let width = ten_pow_neg(12);
    let f0_lo = f0.bounds(&width).0;
    let mut prev: Option<Real> = None;
    let mut exp = 3;
    loop {
        let l = ten_pow_neg(exp);
        let v = f(&l)?;
        if let Some(pv) = &prev {
            if &v > pv {
                return Err(fail(
                    law,
                    op,
                    format!("f(1e-{exp}) = {v} exceeds the previous term {pv}"),
                ));
            }
        }
        if op.is_exact_regime() {
            if v > r(&(&f0_lo + &l).min(one.clone())) {
                return Err(fail(law, op, format!("f(1e-{exp}) = {v} > f(0) + λ with f(0) = {f0}")));
            }
            if exp >= 9 {
                return Ok(l);
            }
        } else {
            let hi = v.bounds(&width).1;
            if hi <= &f0_lo + &tol && exp >= 9 {
                return Ok(l);
            }
            if exp >= 300 {
                return Err(fail(
                    law,
                    op,
                    format!(
                        "f(1e-{exp}) <= {} not within {} of f(0) = {f0}",
                        display_both(&hi),
                        format_rational(&tol)
                    ),
                ));
            }
        }
        prev = Some(v);
        exp += 3;
    }
}
