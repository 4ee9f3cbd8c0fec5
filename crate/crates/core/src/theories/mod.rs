//! Axiom instances, satisfaction in finite models, operator conditions, and
//! the two-zeros countermodel for the pseudometric theory.

pub mod conditions;
pub mod model;
pub mod two_zeros;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fuzzy::FuzzyRelation;
use crate::lifting::LiftOperator;
use crate::rational::{check_unit, Rational};
use crate::real::Real;
use crate::terms::{ConvexTerm, Prob, VarName};

pub use conditions::{check_convex_laws, check_limit, check_monotone, ConditionFailure};
pub use model::{satisfies, LiftedModel, ModelFile, QuantitativeAlgebra, TableModel};
pub use two_zeros::{model_respects_finitary_rules, two_zeros_model, FinitaryReport, Point, RelationalModel};

/// `∀(B, d_B). lhs = rhs`, or `lhs =_ε rhs` when `bound` is present.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantEquation {
    pub context: FuzzyRelation,
    pub lhs: ConvexTerm,
    pub rhs: ConvexTerm,
    #[serde(default, with = "opt_real")]
    pub bound: Option<Real>,
}

mod opt_real {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Real>, s: S) -> std::result::Result<S::Ok, S::Error> {
        r.as_ref().map(|r| r.to_string()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Real>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| s.parse::<Real>())
            .transpose()
            .map_err(serde::de::Error::custom)
    }
}

impl QuantEquation {
    pub fn new(context: FuzzyRelation, lhs: ConvexTerm, rhs: ConvexTerm, bound: Option<Real>) -> Result<Self> {
        for v in lhs.vars().iter().chain(rhs.vars().iter()) {
            if !context.contains(v) {
                return Err(Error::NotInCarrier(v.to_string()));
            }
        }
        Ok(QuantEquation {
            context,
            lhs,
            rhs,
            bound,
        })
    }
}

impl fmt::Display for QuantEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.bound {
            None => write!(f, "{} = {}", self.lhs, self.rhs),
            Some(b) => write!(f, "{} =_{{{}}} {}", self.lhs, b, self.rhs),
        }
    }
}

fn names(ns: &[&str]) -> Vec<VarName> {
    ns.iter().map(|n| VarName::new(*n).expect("valid name")).collect()
}

/// The interpolative scheme instance `x +_p y =_{ε ⊕_p δ} w +_p z` over the
/// context with `d(x,w) = ε`, `d(y,z) = δ` and 1 elsewhere.
pub fn ica_axiom(op: LiftOperator, p: &Prob, eps: &Rational, delta: &Rational) -> Result<QuantEquation> {
    if !p.is_interior() {
        return Err(Error::ProbOutOfRange(p.to_string(), "expected (0,1)"));
    }
    check_unit(eps)?;
    check_unit(delta)?;
    let context = FuzzyRelation::from_fn(names(&["x", "y", "w", "z"]), |i, j| match (i, j) {
        (0, 2) => eps.clone(),
        (1, 3) => delta.clone(),
        _ => Rational::from_integer(1.into()),
    })?;
    let v = names(&["x", "y", "w", "z"]);
    let lhs = ConvexTerm::node(
        p.clone(),
        ConvexTerm::Leaf(v[0].clone()),
        ConvexTerm::Leaf(v[1].clone()),
    )?;
    let rhs = ConvexTerm::node(
        p.clone(),
        ConvexTerm::Leaf(v[2].clone()),
        ConvexTerm::Leaf(v[3].clone()),
    )?;
    let bound = op.combine(p.value(), &Real::from_rational(eps), &Real::from_rational(delta))?;
    QuantEquation::new(context, lhs, rhs, Some(bound))
}

/// `φ_ε`: `b2 =_ε b1` over the context with `d(b1,b2) = ε` and 1 elsewhere.
/// A model satisfies every `φ_ε` iff its distance is symmetric.
pub fn symmetry_equation(eps: &Rational) -> Result<QuantEquation> {
    check_unit(eps)?;
    let v = names(&["b1", "b2"]);
    let context = FuzzyRelation::from_fn(v.clone(), |i, j| {
        if (i, j) == (0, 1) {
            eps.clone()
        } else {
            Rational::from_integer(1.into())
        }
    })?;
    QuantEquation::new(
        context,
        ConvexTerm::Leaf(v[1].clone()),
        ConvexTerm::Leaf(v[0].clone()),
        Some(Real::from_rational(eps)),
    )
}
