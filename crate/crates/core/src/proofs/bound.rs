use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lifting::LiftOperator;
use crate::rational::{check_unit, format_rational, parse_rational, Rational};
use crate::real::Real;

/// A symbolic bound: rational leaves combined by `⊕_p`. Evaluation depends
/// on the operator, so the same tree certifies under any of the families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundTerm {
    Leaf(Rational),
    Combine {
        p: Rational,
        left: Box<BoundTerm>,
        right: Box<BoundTerm>,
    },
}

impl BoundTerm {
    pub fn leaf(q: Rational) -> Self {
        BoundTerm::Leaf(q)
    }

    pub fn one() -> Self {
        BoundTerm::Leaf(Rational::one())
    }

    pub fn combine(p: Rational, left: BoundTerm, right: BoundTerm) -> Self {
        BoundTerm::Combine {
            p,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn as_leaf(&self) -> Option<&Rational> {
        match self {
            BoundTerm::Leaf(q) => Some(q),
            BoundTerm::Combine { .. } => None,
        }
    }

    /// Exact value under `op`. Fails if a leaf or weight is out of range.
    pub fn eval(&self, op: LiftOperator) -> Result<Real> {
        match self {
            BoundTerm::Leaf(q) => {
                check_unit(q)?;
                Ok(Real::from_rational(q))
            }
            BoundTerm::Combine { p, left, right } => {
                if !p.is_positive() || p >= &Rational::one() {
                    return Err(Error::ProbOutOfRange(format_rational(p), "expected (0,1)"));
                }
                op.combine(p, &left.eval(op)?, &right.eval(op)?)
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            BoundTerm::Leaf(_) => 1,
            BoundTerm::Combine { left, right, .. } => 1 + left.size() + right.size(),
        }
    }
}

impl fmt::Display for BoundTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundTerm::Leaf(q) => f.write_str(&format_rational(q)),
            BoundTerm::Combine { p, left, right } => write!(f, "({left} ⊕_{{{}}} {right})", format_rational(p)),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BoundJson {
    Leaf(String),
    Combine {
        oplus: String,
        left: Box<BoundJson>,
        right: Box<BoundJson>,
    },
}

impl From<&BoundTerm> for BoundJson {
    fn from(b: &BoundTerm) -> Self {
        match b {
            BoundTerm::Leaf(q) => BoundJson::Leaf(format_rational(q)),
            BoundTerm::Combine { p, left, right } => BoundJson::Combine {
                oplus: format_rational(p),
                left: Box::new(left.as_ref().into()),
                right: Box::new(right.as_ref().into()),
            },
        }
    }
}

impl TryFrom<BoundJson> for BoundTerm {
    type Error = Error;
    fn try_from(b: BoundJson) -> Result<Self> {
        Ok(match b {
            BoundJson::Leaf(s) => BoundTerm::Leaf(parse_rational(&s)?),
            BoundJson::Combine { oplus, left, right } => {
                BoundTerm::combine(parse_rational(&oplus)?, (*left).try_into()?, (*right).try_into()?)
            }
        })
    }
}

impl Serialize for BoundTerm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BoundJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoundTerm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        BoundJson::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}
