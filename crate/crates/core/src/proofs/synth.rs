//! Certificate synthesis: a coupling is turned into a finite derivation by
//! an interpolation chain between two common-shape terms, glued to the
//! original terms by convex-algebra equalities.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fuzzy::FuzzyRelation;
use crate::lifting::{lift, Coupling, LiftOperator, LiftValue};
use crate::proofs::bound::BoundTerm;
use crate::proofs::judgment::{pair_key, Context, Derivation, Judgment, RuleTag, Side};
use crate::rational::{ceil_decimal, ten_pow_neg, Rational};
use crate::real::Real;
use crate::terms::{ConvexTerm, NAryCombination, Prob, VarName};

fn name(s: &str) -> VarName {
    VarName::new(s).expect("valid name")
}

/// The axiom context over `x, y, w, z` with `d(x,w) = ε`, `d(y,z) = δ` and 1 elsewhere.
pub fn interp_context(eps: BoundTerm, delta: BoundTerm) -> Context {
    let mut dist = vec![vec![BoundTerm::one(); 4]; 4];
    dist[0][2] = eps;
    dist[1][3] = delta;
    Context {
        carrier: ["x", "y", "w", "z"].iter().map(|n| name(n)).collect(),
        dist,
    }
}

fn in_carrier(ctx: &Context, v: &VarName) -> Result<()> {
    if ctx.contains(v) {
        Ok(())
    } else {
        Err(Error::NotInCarrier(v.to_string()))
    }
}

/// Derivation of `e(a⃗) =_ε e(b⃗)` with `ε = ⊕_i p_i d(a_i, b_i)`.
pub fn interpolation_chain(
    op: LiftOperator,
    context: &FuzzyRelation,
    e: &NAryCombination,
    avec: &[VarName],
    bvec: &[VarName],
) -> Result<Derivation> {
    if avec.len() != e.len() || bvec.len() != e.len() {
        return Err(Error::Length(format!(
            "{} weights, {} left names, {} right names",
            e.len(),
            avec.len(),
            bvec.len()
        )));
    }
    let ctx = Context::from_fuzzy(context);
    let cells: Vec<(Rational, VarName, VarName)> = e
        .entries()
        .iter()
        .zip(avec.iter().zip(bvec))
        .map(|((p, _), (a, b))| (p.value().clone(), a.clone(), b.clone()))
        .collect();
    for (_, a, b) in &cells {
        in_carrier(&ctx, a)?;
        in_carrier(&ctx, b)?;
    }
    chain(op, &ctx, &cells)
}

fn assum(ctx: &Context, a: &VarName, b: &VarName) -> Derivation {
    let bound = ctx.entry(a, b).expect("names checked").clone();
    Derivation::leaf(
        RuleTag::Assum,
        Judgment::eps(
            ctx.clone(),
            ConvexTerm::Leaf(a.clone()),
            ConvexTerm::Leaf(b.clone()),
            bound,
        ),
    )
}

fn chain(op: LiftOperator, ctx: &Context, cells: &[(Rational, VarName, VarName)]) -> Result<Derivation> {
    let (p1, a1, b1) = &cells[0];
    if p1.is_one() || cells.len() == 1 {
        return Ok(assum(ctx, a1, b1));
    }
    if p1.is_zero() {
        return chain(op, ctx, &cells[1..]);
    }
    let rest = Rational::one() - p1;
    let tail: Vec<(Rational, VarName, VarName)> = cells[1..]
        .iter()
        .map(|(p, a, b)| (p / &rest, a.clone(), b.clone()))
        .collect();
    let sub = chain(op, ctx, &tail)?;
    let head = assum(ctx, a1, b1);

    let eps = head.conclusion.bound.clone().expect("assumption is quantitative");
    let delta = sub.conclusion.bound.clone().expect("chain is quantitative");
    let bound = BoundTerm::combine(p1.clone(), eps.clone(), delta.clone());
    let b_ctx = interp_context(eps.clone(), delta.clone());
    let p = Prob::interior(p1.clone())?;
    let node = |l: &str, r: &str| {
        ConvexTerm::Node(
            p.clone(),
            Box::new(ConvexTerm::Leaf(name(l))),
            Box::new(ConvexTerm::Leaf(name(r))),
        )
    };
    let axiom = Derivation::new(
        RuleTag::InterpAxiom,
        Judgment::eps(b_ctx, node("x", "y"), node("w", "z"), bound.clone()),
        Side {
            p: Some(p1.clone()),
            ..Side::default()
        },
        vec![],
    );

    let sigma = BTreeMap::from([
        (name("x"), ConvexTerm::Leaf(a1.clone())),
        (name("y"), sub.conclusion.lhs.clone()),
        (name("w"), ConvexTerm::Leaf(b1.clone())),
        (name("z"), sub.conclusion.rhs.clone()),
    ]);
    let lhs = ConvexTerm::Node(
        p.clone(),
        Box::new(sigma[&name("x")].clone()),
        Box::new(sigma[&name("y")].clone()),
    );
    let rhs = ConvexTerm::Node(
        p,
        Box::new(sigma[&name("w")].clone()),
        Box::new(sigma[&name("z")].clone()),
    );

    let mut witnesses = Vec::new();
    let mut premises = vec![axiom];
    if eps.eval(op)? < Real::one() {
        witnesses.push(pair_key(&name("x"), &name("w")));
        premises.push(head);
    }
    if delta.eval(op)? < Real::one() {
        witnesses.push(pair_key(&name("y"), &name("z")));
        premises.push(sub);
    }
    Ok(Derivation::new(
        RuleTag::Subst,
        Judgment::eps(ctx.clone(), lhs, rhs, bound),
        Side {
            sigma: Some(sigma),
            witnesses: Some(witnesses),
            ..Side::default()
        },
        premises,
    ))
}

/// Derivation of `s =_λ t` with `λ` the value of `gamma` under `op`.
pub fn synthesize(
    op: LiftOperator,
    context: &FuzzyRelation,
    s: &ConvexTerm,
    t: &ConvexTerm,
    gamma: &Coupling,
) -> Result<Derivation> {
    if gamma.left_marginal() != &s.denote() || gamma.right_marginal() != &t.denote() {
        return Err(Error::Marginal(
            "coupling marginals differ from the denoted terms".into(),
        ));
    }
    let ctx = Context::from_fuzzy(context);
    for v in s.vars().iter().chain(t.vars().iter()) {
        in_carrier(&ctx, v)?;
    }
    let cells: Vec<(Rational, VarName, VarName)> = gamma
        .mass()
        .iter()
        .map(|((a, b), w)| (w.clone(), a.clone(), b.clone()))
        .collect();
    let mid = chain(op, &ctx, &cells)?;
    let (u, v) = (mid.conclusion.lhs.clone(), mid.conclusion.rhs.clone());
    let bound = mid.conclusion.bound.clone().expect("chain is quantitative");
    let left = Derivation::leaf(RuleTag::CAEq, Judgment::eq(ctx.clone(), s.clone(), u));
    let right = Derivation::leaf(RuleTag::CAEq, Judgment::eq(ctx.clone(), v, t.clone()));
    Ok(Derivation::new(
        RuleTag::Congruence,
        Judgment::eps(ctx, s.clone(), t.clone(), bound),
        Side::default(),
        vec![left, mid, right],
    ))
}

/// Number of decimal digits whose unit does not exceed `precision`.
fn digits_for(precision: &Rational) -> u32 {
    let mut k = 0;
    while &ten_pow_neg(k) > precision {
        k += 1;
    }
    k
}

/// The bound a certificate claims for `value`: the value itself when exact,
/// otherwise the upper end rounded up to a decimal at the given precision.
pub fn claimed_bound(value: &LiftValue, precision: &Rational) -> Rational {
    match value {
        LiftValue::Exact(q) => q.clone(),
        LiftValue::Approx { hi, .. } => ceil_decimal(hi, digits_for(precision).max(1)).min(Rational::one()),
    }
}

/// A checkable proof of `s =_λ t` at the optimal `λ`: the synthesized
/// derivation for an optimal coupling, weakened to the claimed rational bound.
pub fn prove_lift(
    op: LiftOperator,
    context: &FuzzyRelation,
    s: &ConvexTerm,
    t: &ConvexTerm,
    precision: &Rational,
) -> Result<Derivation> {
    let r = lift(op, context, &s.denote(), &t.denote(), precision)?;
    let proof = synthesize(op, context, s, t, &r.coupling)?;
    let claimed = BoundTerm::leaf(claimed_bound(&r.value, precision));
    let conclusion = Judgment {
        bound: Some(claimed),
        ..proof.conclusion.clone()
    };
    Ok(Derivation::new(
        RuleTag::Weaken,
        conclusion,
        Side::default(),
        vec![proof],
    ))
}
