use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::FuzzyRelation;
use crate::lifting::LiftOperator;
use crate::proofs::bound::BoundTerm;
use crate::rational::{format_precision, parse_rational, Rational};
use crate::terms::{ConvexTerm, VarName};

/// A context `(B, d_B)` whose entries are symbolic bounds. Contexts built
/// from a [`FuzzyRelation`] have rational leaves only; contexts of axiom
/// instances may carry composite bounds produced earlier in a proof.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Context {
    pub carrier: Vec<VarName>,
    pub dist: Vec<Vec<BoundTerm>>,
}

impl Context {
    pub fn from_fuzzy(d: &FuzzyRelation) -> Self {
        Context {
            carrier: d.carrier().to_vec(),
            dist: d
                .matrix()
                .iter()
                .map(|r| r.iter().cloned().map(BoundTerm::Leaf).collect())
                .collect(),
        }
    }

    pub fn index_of(&self, v: &VarName) -> Option<usize> {
        self.carrier.iter().position(|c| c == v)
    }

    pub fn contains(&self, v: &VarName) -> bool {
        self.index_of(v).is_some()
    }

    pub fn entry(&self, a: &VarName, b: &VarName) -> Option<&BoundTerm> {
        Some(&self.dist[self.index_of(a)?][self.index_of(b)?])
    }

    pub fn is_square(&self) -> bool {
        self.dist.len() == self.carrier.len() && self.dist.iter().all(|r| r.len() == self.carrier.len())
    }
}

/// `∀(B, d_B). lhs = rhs` when `bound` is `None`, otherwise `lhs =_bound rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub context: Context,
    pub lhs: ConvexTerm,
    pub rhs: ConvexTerm,
    pub bound: Option<BoundTerm>,
}

impl Judgment {
    pub fn eq(context: Context, lhs: ConvexTerm, rhs: ConvexTerm) -> Self {
        Judgment {
            context,
            lhs,
            rhs,
            bound: None,
        }
    }

    pub fn eps(context: Context, lhs: ConvexTerm, rhs: ConvexTerm, bound: BoundTerm) -> Self {
        Judgment {
            context,
            lhs,
            rhs,
            bound: Some(bound),
        }
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.bound {
            None => write!(f, "{} = {}", self.lhs, self.rhs),
            Some(b) => write!(f, "{} =_{{{}}} {}", self.lhs, b, self.rhs),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuleTag {
    Refl,
    SymEq,
    CAEq,
    Assum,
    Top,
    Weaken,
    InterpAxiom,
    Subst,
    Congruence,
    InfRule,
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Rule-specific data: the weight of an axiom instance, or the substitution
/// of a `Subst` step with the pairs its witness premises are keyed by.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Side {
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rational")]
    pub p: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<BTreeMap<VarName, ConvexTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<String>>,
}

/// Witness key for the pair `(b, b')`.
pub fn pair_key(a: &VarName, b: &VarName) -> String {
    format!("{a}|{b}")
}

mod opt_rational {
    use super::*;
    use crate::rational::format_rational;

    pub fn serialize<S: serde::Serializer>(q: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        q.as_ref().map(format_rational).serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_rational(&s))
            .transpose()
            .map_err(serde::de::Error::custom)
    }
}

/// A finite proof tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub rule: RuleTag,
    pub conclusion: Judgment,
    #[serde(default)]
    pub side: Side,
    #[serde(default)]
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn leaf(rule: RuleTag, conclusion: Judgment) -> Self {
        Derivation {
            rule,
            conclusion,
            side: Side::default(),
            premises: Vec::new(),
        }
    }

    pub fn new(rule: RuleTag, conclusion: Judgment, side: Side, premises: Vec<Derivation>) -> Self {
        Derivation {
            rule,
            conclusion,
            side,
            premises,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn count_rule(&self, rule: RuleTag) -> usize {
        usize::from(self.rule == rule) + self.premises.iter().map(|p| p.count_rule(rule)).sum::<usize>()
    }

    /// The node at `path` (premise indices from the root).
    pub fn at(&self, path: &[usize]) -> Option<&Derivation> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.premises.get(*i)?.at(rest),
        }
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Derivation> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.premises.get_mut(*i)?.at_mut(rest),
        }
    }

    /// Paths of all nodes in pre-order.
    pub fn paths(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for (i, p) in self.premises.iter().enumerate() {
            for mut sub in p.paths() {
                sub.insert(0, i);
                out.push(sub);
            }
        }
        out
    }
}

pub const EQUALITY_MODE: &str = "semantic-CA";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub operator: String,
    pub precision: String,
    pub equality_mode: String,
}

/// A derivation together with the operator and precision it is checked under.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub header: Header,
    pub derivation: Derivation,
}

impl Certificate {
    pub fn new(op: LiftOperator, precision: &Rational, derivation: Derivation) -> Self {
        Certificate {
            header: Header {
                operator: op.to_string(),
                precision: format_precision(precision),
                equality_mode: EQUALITY_MODE.to_string(),
            },
            derivation,
        }
    }

    pub fn operator(&self) -> Result<LiftOperator> {
        self.header.operator.parse()
    }

    pub fn precision(&self) -> Result<Rational> {
        parse_rational(&self.header.precision)
    }

    /// Canonical text: object keys sorted, rationals in lowest terms.
    pub fn to_canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("certificate serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cert: Certificate = serde_json::from_str(s)?;
        if cert.header.equality_mode != EQUALITY_MODE {
            return Err(Error::Parse(format!(
                "unsupported equality mode `{}`",
                cert.header.equality_mode
            )));
        }
        cert.operator()?;
        cert.precision()?;
        Ok(cert)
    }
}
