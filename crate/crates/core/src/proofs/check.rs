//! The certificate checker. It re-validates every side condition from the
//! certificate and the context alone and never consults a solver.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use crate::lifting::LiftOperator;
use crate::proofs::bound::BoundTerm;
use crate::proofs::judgment::{pair_key, Certificate, Context, Derivation, Judgment, RuleTag};
use crate::rational::Rational;
use crate::real::Real;
use crate::terms::{ConvexTerm, Prob, VarName};

/// Why a derivation was rejected, and where.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    /// Premise indices from the root to the offending node.
    pub path: Vec<usize>,
    pub rule: RuleTag,
    pub reason: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
        write!(f, "node /{} ({}): {}", path.join("/"), self.rule, self.reason)
    }
}

impl std::error::Error for Rejection {}

type Check = std::result::Result<(), String>;

/// Checks `deriv` under `op`. With `finite_mode`, any `InfRule` node is rejected.
pub fn check(op: LiftOperator, deriv: &Derivation, finite_mode: bool) -> std::result::Result<(), Rejection> {
    let mut path = Vec::new();
    walk(op, deriv, finite_mode, &mut path)
}

fn walk(op: LiftOperator, d: &Derivation, finite: bool, path: &mut Vec<usize>) -> std::result::Result<(), Rejection> {
    node(op, d, finite).map_err(|reason| Rejection {
        path: path.clone(),
        rule: d.rule,
        reason,
    })?;
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        walk(op, p, finite, path)?;
        path.pop();
    }
    Ok(())
}

fn node(op: LiftOperator, d: &Derivation, finite: bool) -> Check {
    well_formed(op, &d.conclusion)?;
    let c = &d.conclusion;
    match d.rule {
        RuleTag::Refl => {
            arity(d, 0)?;
            expect_eq(c)?;
            ensure(c.lhs == c.rhs, "sides are not syntactically equal")
        }
        RuleTag::SymEq => {
            arity(d, 1)?;
            expect_eq(c)?;
            let p = &d.premises[0].conclusion;
            expect_eq(p).map_err(|e| format!("premise: {e}"))?;
            same_context(c, p)?;
            ensure(p.lhs == c.rhs && p.rhs == c.lhs, "premise is not the flipped equation")
        }
        RuleTag::CAEq => {
            arity(d, 0)?;
            expect_eq(c)?;
            ensure(c.lhs.denote() == c.rhs.denote(), "sides denote different distributions")
        }
        RuleTag::Assum => {
            arity(d, 0)?;
            let (a, b) = match (c.lhs.as_leaf(), c.rhs.as_leaf()) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err("both sides must be context variables".into()),
            };
            let bound = eval(op, expect_eps(c)?)?;
            let entry = eval(op, c.context.entry(a, b).expect("checked by well_formed"))?;
            ensure(bound == entry, "bound differs from the context entry")
        }
        RuleTag::Top => {
            arity(d, 0)?;
            let bound = eval(op, expect_eps(c)?)?;
            ensure(bound >= Real::one(), "bound is below 1")
        }
        RuleTag::Weaken => {
            arity(d, 1)?;
            let p = &d.premises[0].conclusion;
            same_context(c, p)?;
            ensure(p.lhs == c.lhs && p.rhs == c.rhs, "premise has different terms")?;
            let delta = eval(op, expect_eps(c)?)?;
            let eps = eval(op, expect_eps(p).map_err(|e| format!("premise: {e}"))?)?;
            ensure(eps <= delta, "premise bound exceeds conclusion bound (δ ≥ ε violated)")
        }
        RuleTag::InterpAxiom => {
            arity(d, 0)?;
            interp_axiom(op, d)
        }
        RuleTag::Subst => subst(op, d),
        RuleTag::Congruence => {
            arity(d, 3)?;
            let (left, mid, right) = (
                &d.premises[0].conclusion,
                &d.premises[1].conclusion,
                &d.premises[2].conclusion,
            );
            for p in [left, mid, right] {
                same_context(c, p)?;
            }
            expect_eq(left).map_err(|e| format!("first premise: {e}"))?;
            expect_eq(right).map_err(|e| format!("third premise: {e}"))?;
            ensure(
                left.lhs == c.lhs,
                "first premise does not start at the conclusion's left side",
            )?;
            ensure(left.rhs == mid.lhs, "first and second premises do not chain")?;
            ensure(mid.rhs == right.lhs, "second and third premises do not chain")?;
            ensure(
                right.rhs == c.rhs,
                "third premise does not end at the conclusion's right side",
            )?;
            let lam = eval(op, expect_eps(mid).map_err(|e| format!("second premise: {e}"))?)?;
            ensure(
                eval(op, expect_eps(c)?)? == lam,
                "bound differs from the middle premise's bound",
            )
        }
        RuleTag::InfRule => {
            if finite {
                return Err("infinitary rule is not allowed in a finite proof".into());
            }
            ensure(!d.premises.is_empty(), "no premises")?;
            let mut least: Option<Real> = None;
            for p in &d.premises {
                let p = &p.conclusion;
                same_context(c, p)?;
                ensure(p.lhs == c.lhs && p.rhs == c.rhs, "premise has different terms")?;
                let v = eval(op, expect_eps(p)?)?;
                least = Some(match least {
                    Some(l) if l <= v => l,
                    _ => v,
                });
            }
            ensure(
                Some(eval(op, expect_eps(c)?)?) == least,
                "bound is not the infimum of the premise bounds",
            )
        }
    }
}

fn ensure(cond: bool, msg: &str) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

fn arity(d: &Derivation, n: usize) -> Check {
    if d.premises.len() == n {
        Ok(())
    } else {
        Err(format!("expected {n} premises, found {}", d.premises.len()))
    }
}

fn expect_eq(j: &Judgment) -> Check {
    ensure(j.bound.is_none(), "expected an equation, found a quantitative equation")
}

fn expect_eps(j: &Judgment) -> std::result::Result<&BoundTerm, String> {
    j.bound
        .as_ref()
        .ok_or_else(|| "expected a quantitative equation, found an equation".to_string())
}

fn eval(op: LiftOperator, b: &BoundTerm) -> std::result::Result<Real, String> {
    b.eval(op).map_err(|e| format!("bound {b} does not evaluate: {e}"))
}

fn same_context(c: &Judgment, p: &Judgment) -> Check {
    ensure(c.context == p.context, "premise context differs from the conclusion's")
}

/// Context shape and entries, term validity, variables within the carrier,
/// and the bound within `[0,1]`.
fn well_formed(op: LiftOperator, j: &Judgment) -> Check {
    let ctx = &j.context;
    ensure(!ctx.carrier.is_empty(), "empty context")?;
    ensure(ctx.is_square(), "context matrix is not square over the carrier")?;
    for (i, a) in ctx.carrier.iter().enumerate() {
        ensure(!ctx.carrier[..i].contains(a), "duplicate context variable")?;
    }
    for entry in ctx.dist.iter().flatten() {
        eval(op, entry).map_err(|e| format!("context entry: {e}"))?;
    }
    ensure(j.lhs.is_valid() && j.rhs.is_valid(), "term weight outside (0,1)")?;
    if let Some(v) = j.lhs.vars().union(&j.rhs.vars()).find(|v| !ctx.contains(v)) {
        return Err(format!("variable {v} is not in the context"));
    }
    if let Some(b) = &j.bound {
        ensure(eval(op, b)? <= Real::one(), "bound exceeds 1")?;
    }
    Ok(())
}

fn interp_axiom(op: LiftOperator, d: &Derivation) -> Check {
    let c = &d.conclusion;
    let p = d.side.p.clone().ok_or("missing weight p")?;
    let p = Prob::interior(p).map_err(|e| e.to_string())?;
    let names: Vec<VarName> = ["x", "y", "w", "z"]
        .iter()
        .map(|n| VarName::new(*n).expect("valid"))
        .collect();
    ensure(c.context.carrier == names, "context carrier must be x, y, w, z")?;
    let leaf = |v: &VarName| ConvexTerm::Leaf(v.clone());
    let lhs = ConvexTerm::Node(p.clone(), Box::new(leaf(&names[0])), Box::new(leaf(&names[1])));
    let rhs = ConvexTerm::Node(p.clone(), Box::new(leaf(&names[2])), Box::new(leaf(&names[3])));
    ensure(
        c.lhs == lhs && c.rhs == rhs,
        "conclusion is not x +_p y against w +_p z",
    )?;
    for i in 0..4 {
        for j in 0..4 {
            if (i, j) != (0, 2) && (i, j) != (1, 3) {
                let v = eval(op, &c.context.dist[i][j])?;
                if v != Real::one() {
                    return Err(format!("context entry ({}, {}) must be 1", names[i], names[j]));
                }
            }
        }
    }
    let eps = eval(op, &c.context.dist[0][2])?;
    let delta = eval(op, &c.context.dist[1][3])?;
    let expected = op.combine(p.value(), &eps, &delta).map_err(|e| e.to_string())?;
    ensure(
        eval(op, expect_eps(c)?)? == expected,
        "bound differs from ε ⊕_p δ of the context",
    )
}

fn subst(op: LiftOperator, d: &Derivation) -> Check {
    let c = &d.conclusion;
    ensure(!d.premises.is_empty(), "missing main premise")?;
    let main = &d.premises[0].conclusion;
    let sigma: &BTreeMap<VarName, ConvexTerm> = d.side.sigma.as_ref().ok_or("missing substitution")?;
    let b_ctx: &Context = &main.context;
    let keys: Vec<&VarName> = sigma.keys().collect();
    let mut carrier: Vec<&VarName> = b_ctx.carrier.iter().collect();
    carrier.sort();
    ensure(keys == carrier, "substitution is not total on the premise context")?;
    for t in sigma.values() {
        ensure(t.is_valid(), "substituted term has a weight outside (0,1)")?;
        if let Some(v) = t.vars().iter().find(|v| !c.context.contains(v)) {
            return Err(format!("substituted variable {v} is not in the conclusion context"));
        }
    }
    let lhs = main.lhs.substitute(sigma).map_err(|e| e.to_string())?;
    let rhs = main.rhs.substitute(sigma).map_err(|e| e.to_string())?;
    ensure(
        lhs == c.lhs && rhs == c.rhs,
        "conclusion is not the substitution instance of the premise",
    )?;
    match (&main.bound, &c.bound) {
        (None, None) => {}
        (Some(a), Some(b)) => ensure(eval(op, a)? == eval(op, b)?, "bound differs from the premise's bound")?,
        _ => return Err("premise and conclusion kinds differ".into()),
    }

    // one witness per pair with d_B(b, b') < 1, in carrier order
    let mut required: Vec<(VarName, VarName, Real)> = Vec::new();
    for (i, a) in b_ctx.carrier.iter().enumerate() {
        for (j, b) in b_ctx.carrier.iter().enumerate() {
            let v = eval(op, &b_ctx.dist[i][j])?;
            if v < Real::one() {
                required.push((a.clone(), b.clone(), v));
            }
        }
    }
    let keys: Vec<String> = required.iter().map(|(a, b, _)| pair_key(a, b)).collect();
    let listed = d.side.witnesses.clone().unwrap_or_default();
    if let Some(k) = keys.iter().find(|k| !listed.contains(k)) {
        return Err(format!("σ-witness for pair {k} is missing"));
    }
    ensure(listed == keys, "witness list does not match the pairs with d_B < 1")?;
    ensure(
        d.premises.len() == 1 + keys.len(),
        "witness premises do not match the witness list",
    )?;
    for ((a, b, limit), w) in required.iter().zip(&d.premises[1..]) {
        let w = &w.conclusion;
        let key = pair_key(a, b);
        ensure(
            w.context == c.context,
            &format!("witness {key} is over a different context"),
        )?;
        ensure(
            w.lhs == sigma[a] && w.rhs == sigma[b],
            &format!("witness {key} does not relate σ({a}) and σ({b})"),
        )?;
        let bound = eval(op, expect_eps(w).map_err(|e| format!("witness {key}: {e}"))?)?;
        ensure(&bound <= limit, &format!("witness {key} bound exceeds d_B({a}, {b})"))?;
    }
    Ok(())
}

/// Outcome of checking a certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub judgment: Judgment,
    pub nodes: usize,
}

/// Checks the certificate against its header. When `space` is given, the
/// root context must be exactly that relation.
pub fn check_certificate(
    cert: &Certificate,
    space: Option<&Context>,
    finite_mode: bool,
) -> std::result::Result<Verdict, Rejection> {
    let root = &cert.derivation;
    let reject = |reason: String| Rejection {
        path: vec![],
        rule: root.rule,
        reason,
    };
    let op = cert.operator().map_err(|e| reject(e.to_string()))?;
    let precision = cert.precision().map_err(|e| reject(e.to_string()))?;
    if precision <= Rational::from_integer(0.into()) || precision >= Rational::one() {
        return Err(reject("declared precision must lie in (0,1)".into()));
    }
    if let Some(ctx) = space {
        if &root.conclusion.context != ctx {
            return Err(reject("root context differs from the supplied space".into()));
        }
    }
    check(op, root, finite_mode)?;
    Ok(Verdict {
        judgment: root.conclusion.clone(),
        nodes: root.size(),
    })
}
