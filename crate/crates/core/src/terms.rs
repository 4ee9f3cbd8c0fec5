//! Convex-algebra terms over the binary signature `+_p`, n-ary convex
//! combinations, and their normal forms as finitely supported distributions.
//!
//! Text syntax:
//!
//! ```text
//! term  ::= name | "(" term "+_{" rational "}" term ")" | "[" entry ("," entry)* "]"
//! entry ::= rational name
//! ```
//!
//! The bracketed n-ary form is rewritten to a binary term when parsed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// An opaque, totally ordered variable (or carrier element) name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarName(String);

impl VarName {
    pub fn new(s: impl Into<String>) -> Result<Self> {
        let s = s.into();
        let ok = !s.is_empty()
            && s.chars()
                .all(|c| c.is_alphanumeric() || matches!(c, '_' | '\'' | '.' | '-'));
        if ok {
            Ok(VarName(s))
        } else {
            Err(Error::BadName(s))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for VarName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        VarName::new(s)
    }
}

impl Serialize for VarName {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for VarName {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        VarName::new(s).map_err(serde::de::Error::custom)
    }
}

/// Shorthand for tests and examples; panics on an invalid name.
pub fn var(s: &str) -> VarName {
    VarName::new(s).expect("valid variable name")
}

/// A probability in `[0,1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Prob(Rational);

impl Prob {
    pub fn new(q: Rational) -> Result<Self> {
        if q.is_negative() || q > Rational::one() {
            return Err(Error::ProbOutOfRange(format_rational(&q), "expected [0,1]"));
        }
        Ok(Prob(q))
    }

    /// A probability strictly inside `(0,1)`, as required for `+_p`.
    pub fn interior(q: Rational) -> Result<Self> {
        if !q.is_positive() || q >= Rational::one() {
            return Err(Error::ProbOutOfRange(format_rational(&q), "expected (0,1)"));
        }
        Ok(Prob(q))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn complement(&self) -> Prob {
        Prob(Rational::one() - &self.0)
    }

    pub fn is_interior(&self) -> bool {
        self.0.is_positive() && self.0 < Rational::one()
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConvexTerm {
    Leaf(VarName),
    Node(Prob, Box<ConvexTerm>, Box<ConvexTerm>),
}

impl ConvexTerm {
    pub fn leaf(v: VarName) -> Self {
        ConvexTerm::Leaf(v)
    }

    pub fn node(p: Prob, left: ConvexTerm, right: ConvexTerm) -> Result<Self> {
        if !p.is_interior() {
            return Err(Error::ProbOutOfRange(p.to_string(), "expected (0,1)"));
        }
        Ok(ConvexTerm::Node(p, Box::new(left), Box::new(right)))
    }

    /// True if every node probability lies in `(0,1)`.
    pub fn is_valid(&self) -> bool {
        match self {
            ConvexTerm::Leaf(_) => true,
            ConvexTerm::Node(p, l, r) => p.is_interior() && l.is_valid() && r.is_valid(),
        }
    }

    pub fn vars(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<VarName>) {
        match self {
            ConvexTerm::Leaf(v) => {
                out.insert(v.clone());
            }
            ConvexTerm::Node(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    pub fn as_leaf(&self) -> Option<&VarName> {
        match self {
            ConvexTerm::Leaf(v) => Some(v),
            ConvexTerm::Node(..) => None,
        }
    }

    /// The distribution `[t]`: total probability mass reaching each leaf variable.
    pub fn denote(&self) -> Distribution {
        let mut acc = BTreeMap::new();
        self.accumulate(&Rational::one(), &mut acc);
        Distribution { weights: acc }
    }

    fn accumulate(&self, mass: &Rational, acc: &mut BTreeMap<VarName, Rational>) {
        match self {
            ConvexTerm::Leaf(v) => {
                *acc.entry(v.clone()).or_insert_with(Rational::zero) += mass;
            }
            ConvexTerm::Node(p, l, r) => {
                l.accumulate(&(mass * p.value()), acc);
                r.accumulate(&(mass * (Rational::one() - p.value())), acc);
            }
        }
    }

    /// Leafwise replacement. Every variable of `self` must be mapped.
    pub fn substitute(&self, sigma: &BTreeMap<VarName, ConvexTerm>) -> Result<ConvexTerm> {
        match self {
            ConvexTerm::Leaf(v) => sigma.get(v).cloned().ok_or_else(|| Error::Unmapped(v.to_string())),
            ConvexTerm::Node(p, l, r) => Ok(ConvexTerm::Node(
                p.clone(),
                Box::new(l.substitute(sigma)?),
                Box::new(r.substitute(sigma)?),
            )),
        }
    }
}

impl fmt::Display for ConvexTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConvexTerm::Leaf(v) => write!(f, "{v}"),
            ConvexTerm::Node(p, l, r) => write!(f, "({l} +_{{{p}}} {r})"),
        }
    }
}

impl FromStr for ConvexTerm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.error("trailing input"));
        }
        Ok(t)
    }
}

impl Serialize for ConvexTerm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ConvexTerm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in `{}`", self.pos, self.src))
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> Result<()> {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            Ok(())
        } else {
            Err(self.error(&format!("expected `{tok}`")))
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn token(&mut self, stop: impl Fn(char) -> bool) -> &str {
        self.skip_ws();
        let start = self.pos;
        let len = self.rest().find(|c: char| stop(c)).unwrap_or(self.rest().len());
        self.pos += len;
        &self.src[start..start + len]
    }

    fn name(&mut self) -> Result<VarName> {
        let tok = self.token(|c| c.is_whitespace() || "()[],{}+".contains(c)).to_string();
        VarName::new(tok).map_err(|_| self.error("expected a variable name"))
    }

    fn term(&mut self) -> Result<ConvexTerm> {
        match self.peek() {
            Some('(') => {
                self.eat("(")?;
                let l = self.term()?;
                self.eat("+_{")?;
                let p = self.token(|c| c == '}').to_string();
                let p = Prob::interior(parse_rational(&p)?)?;
                self.eat("}")?;
                let r = self.term()?;
                self.eat(")")?;
                ConvexTerm::node(p, l, r)
            }
            Some('[') => {
                self.eat("[")?;
                let mut entries = Vec::new();
                loop {
                    let p = self.token(char::is_whitespace).to_string();
                    let p = Prob::new(parse_rational(&p)?)?;
                    let v = self.name()?;
                    entries.push((p, v));
                    match self.peek() {
                        Some(',') => self.eat(",")?,
                        Some(']') => {
                            self.eat("]")?;
                            break;
                        }
                        _ => return Err(self.error("expected `,` or `]`")),
                    }
                }
                Ok(NAryCombination::new(entries)?.to_binary())
            }
            Some(_) => Ok(ConvexTerm::Leaf(self.name()?)),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// An n-ary convex combination `Σ p_i x_i`; zero and one weights are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NAryCombination {
    entries: Vec<(Prob, VarName)>,
}

impl NAryCombination {
    pub fn new(entries: Vec<(Prob, VarName)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty("n-ary combination"));
        }
        let total: Rational = entries.iter().map(|(p, _)| p.value()).sum();
        if !total.is_one() {
            return Err(Error::WeightsNotNormalized(format_rational(&total)));
        }
        Ok(NAryCombination { entries })
    }

    pub fn entries(&self) -> &[(Prob, VarName)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Rewrites to a binary term by the three cases `p1 = 1`, `p1 = 0` and
    /// `0 < p1 < 1` (with the tail renormalized by `1 - p1`).
    pub fn to_binary(&self) -> ConvexTerm {
        binary_from(&self.entries)
    }

    /// The distribution `Σ p_i δ_{x_i}`.
    pub fn denote(&self) -> Distribution {
        let mut acc: BTreeMap<VarName, Rational> = BTreeMap::new();
        for (p, v) in &self.entries {
            if !p.value().is_zero() {
                *acc.entry(v.clone()).or_insert_with(Rational::zero) += p.value();
            }
        }
        Distribution { weights: acc }
    }
}

/// Free-function form of [`NAryCombination::to_binary`].
pub fn nary_to_binary(e: &NAryCombination) -> ConvexTerm {
    e.to_binary()
}

fn binary_from(entries: &[(Prob, VarName)]) -> ConvexTerm {
    let (p1, x1) = &entries[0];
    if p1.value().is_one() || entries.len() == 1 {
        return ConvexTerm::Leaf(x1.clone());
    }
    if p1.value().is_zero() {
        return binary_from(&entries[1..]);
    }
    let rest = Rational::one() - p1.value();
    let tail: Vec<(Prob, VarName)> = entries[1..]
        .iter()
        .map(|(p, v)| (Prob(p.value() / &rest), v.clone()))
        .collect();
    ConvexTerm::Node(
        p1.clone(),
        Box::new(ConvexTerm::Leaf(x1.clone())),
        Box::new(binary_from(&tail)),
    )
}

impl fmt::Display for NAryCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(p, v)| format!("{p} {v}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// A finitely supported probability distribution; only strictly positive
/// weights are stored.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Distribution {
    weights: BTreeMap<VarName, Rational>,
}

impl Distribution {
    /// Drops zero weights; rejects negative weights and totals other than 1.
    pub fn new(weights: BTreeMap<VarName, Rational>) -> Result<Self> {
        let mut kept = BTreeMap::new();
        let mut total = Rational::zero();
        for (v, w) in weights {
            if w.is_negative() || w > Rational::one() {
                return Err(Error::ProbOutOfRange(format_rational(&w), "expected [0,1]"));
            }
            total += &w;
            if !w.is_zero() {
                kept.insert(v, w);
            }
        }
        if !total.is_one() {
            return Err(Error::WeightsNotNormalized(format_rational(&total)));
        }
        Ok(Distribution { weights: kept })
    }

    pub fn dirac(v: VarName) -> Self {
        Distribution {
            weights: BTreeMap::from([(v, Rational::one())]),
        }
    }

    pub fn weight(&self, v: &VarName) -> Rational {
        self.weights.get(v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &VarName> {
        self.weights.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarName, &Rational)> {
        self.weights.iter()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &BTreeMap<VarName, Rational> {
        &self.weights
    }

    /// `(μ +_p ν)(x) = p μ(x) + (1-p) ν(x)`.
    pub fn combine(&self, other: &Distribution, p: &Prob) -> Result<Distribution> {
        if !p.is_interior() {
            return Err(Error::ProbOutOfRange(p.to_string(), "expected (0,1)"));
        }
        let q = Rational::one() - p.value();
        let mut acc: BTreeMap<VarName, Rational> = BTreeMap::new();
        for (v, w) in &self.weights {
            *acc.entry(v.clone()).or_insert_with(Rational::zero) += w * p.value();
        }
        for (v, w) in &other.weights {
            *acc.entry(v.clone()).or_insert_with(Rational::zero) += w * &q;
        }
        Ok(Distribution { weights: acc })
    }

    /// Support-ordered n-ary form `[μ(x1) x1, ...]`.
    pub fn to_nary(&self) -> NAryCombination {
        NAryCombination {
            entries: self.weights.iter().map(|(v, w)| (Prob(w.clone()), v.clone())).collect(),
        }
    }

    pub fn to_term(&self) -> ConvexTerm {
        self.to_nary().to_binary()
    }

    /// Pushforward along a variable renaming.
    pub fn map_vars(&self, f: impl Fn(&VarName) -> VarName) -> Distribution {
        let mut acc: BTreeMap<VarName, Rational> = BTreeMap::new();
        for (v, w) in &self.weights {
            *acc.entry(f(v)).or_insert_with(Rational::zero) += w;
        }
        Distribution { weights: acc }
    }
}

/// Free-function form of [`Distribution::combine`].
pub fn convex_combine(mu: &Distribution, nu: &Distribution, p: &Prob) -> Result<Distribution> {
    mu.combine(nu, p)
}

impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<&str, String> = self
            .weights
            .iter()
            .map(|(v, w)| (v.as_str(), format_rational(w)))
            .collect();
        m.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        let mut weights = BTreeMap::new();
        for (k, v) in raw {
            let name = VarName::new(k).map_err(serde::de::Error::custom)?;
            let w = parse_rational(&v).map_err(serde::de::Error::custom)?;
            weights.insert(name, w);
        }
        Distribution::new(weights).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn p(n: i64, d: i64) -> Prob {
        Prob::new(ratio(n, d)).unwrap()
    }

    fn leaf(s: &str) -> ConvexTerm {
        ConvexTerm::Leaf(var(s))
    }

    fn node(n: i64, d: i64, l: ConvexTerm, r: ConvexTerm) -> ConvexTerm {
        ConvexTerm::node(p(n, d), l, r).unwrap()
    }

    fn dist(pairs: &[(&str, i64, i64)]) -> Distribution {
        Distribution::new(pairs.iter().map(|(v, n, d)| (var(v), ratio(*n, *d))).collect()).unwrap()
    }

    #[test]
    fn nary_cases() {
        let e = NAryCombination::new(vec![(p(1, 1), var("x1")), (p(0, 1), var("x2"))]).unwrap();
        assert_eq!(e.to_binary(), leaf("x1"));

        let e = NAryCombination::new(vec![(p(1, 2), var("x1")), (p(1, 2), var("x2"))]).unwrap();
        assert_eq!(e.to_binary(), node(1, 2, leaf("x1"), leaf("x2")));

        let e = NAryCombination::new(vec![(p(1, 2), var("a")), (p(1, 4), var("b")), (p(1, 4), var("c"))]).unwrap();
        let expected = node(1, 2, leaf("a"), node(1, 2, leaf("b"), leaf("c")));
        assert_eq!(e.to_binary(), expected);
        assert_eq!(expected.denote(), e.denote());

        let e = NAryCombination::new(vec![(p(0, 1), var("a")), (p(1, 3), var("b")), (p(2, 3), var("c"))]).unwrap();
        assert_eq!(e.to_binary(), node(1, 3, leaf("b"), leaf("c")));
    }

    #[test]
    fn nary_errors() {
        assert_eq!(NAryCombination::new(vec![]), Err(Error::Empty("n-ary combination")));
        assert!(matches!(
            NAryCombination::new(vec![(p(1, 2), var("a"))]),
            Err(Error::WeightsNotNormalized(_))
        ));
    }

    #[test]
    fn denote_examples() {
        assert_eq!(node(1, 2, leaf("x"), leaf("x")).denote(), dist(&[("x", 1, 1)]));
        assert_eq!(
            node(1, 3, leaf("x"), leaf("y")).denote(),
            dist(&[("x", 1, 3), ("y", 2, 3)])
        );
        let t = node(1, 2, leaf("a"), node(1, 2, leaf("a"), leaf("b")));
        assert_eq!(t.denote(), dist(&[("a", 3, 4), ("b", 1, 4)]));
    }

    #[test]
    fn combine_examples() {
        let x = dist(&[("x", 1, 1)]);
        let y = dist(&[("y", 1, 1)]);
        assert_eq!(x.combine(&x, &p(1, 2)).unwrap(), x);
        assert_eq!(x.combine(&y, &p(1, 3)).unwrap(), dist(&[("x", 1, 3), ("y", 2, 3)]));
        let ab = dist(&[("a", 1, 2), ("b", 1, 2)]);
        let b = dist(&[("b", 1, 1)]);
        assert_eq!(ab.combine(&b, &p(1, 2)).unwrap(), dist(&[("a", 1, 4), ("b", 3, 4)]));
        assert!(x.combine(&y, &p(1, 1)).is_err());
        assert!(x.combine(&y, &p(0, 1)).is_err());
    }

    #[test]
    fn substitute_examples() {
        let ab = node(1, 2, leaf("a"), leaf("b"));
        let sigma = BTreeMap::from([(var("x"), ab.clone())]);
        assert_eq!(leaf("x").substitute(&sigma).unwrap(), ab);

        let t = node(1, 2, leaf("x"), leaf("y"));
        let id: BTreeMap<_, _> = t.vars().into_iter().map(|v| (v.clone(), ConvexTerm::Leaf(v))).collect();
        assert_eq!(t.substitute(&id).unwrap(), t);

        let sigma = BTreeMap::from([(var("x"), leaf("a")), (var("y"), leaf("a"))]);
        assert_eq!(t.substitute(&sigma).unwrap().denote(), dist(&[("a", 1, 1)]));

        let partial = BTreeMap::from([(var("x"), leaf("a"))]);
        assert_eq!(t.substitute(&partial), Err(Error::Unmapped("y".into())));
    }

    #[test]
    fn distribution_normalizes_zeros() {
        let d = Distribution::new(BTreeMap::from([(var("a"), int(1)), (var("b"), int(0))])).unwrap();
        assert_eq!(d.len(), 1);
        assert!(Distribution::new(BTreeMap::from([(var("a"), ratio(1, 2))])).is_err());
    }

    #[test]
    fn text_form() {
        let t: ConvexTerm = "(a +_{1/3} (b +_{1/2} c))".parse().unwrap();
        assert_eq!(t.to_string(), "(a +_{1/3} (b +_{1/2} c))");
        let n: ConvexTerm = "[1/2 a, 1/4 b, 1/4 c]".parse().unwrap();
        assert_eq!(n.to_string(), "(a +_{1/2} (b +_{1/2} c))");
        assert!("(a +_{1} b)".parse::<ConvexTerm>().is_err());
        assert!("(a +_{1/2} b".parse::<ConvexTerm>().is_err());
        assert!("a b".parse::<ConvexTerm>().is_err());
        assert!("[1/2 a]".parse::<ConvexTerm>().is_err());
    }

    #[test]
    fn distribution_json() {
        let d = dist(&[("a", 1, 4), ("x", 3, 4)]);
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"a":"1/4","x":"3/4"}"#);
        let back: Distribution = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<Distribution>(r#"{"a":"1/4"}"#).is_err());
    }
}
