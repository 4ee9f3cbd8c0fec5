//! Finite fuzzy relations `d: A×A → [0,1]` with exact rational entries.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{check_unit, format_rational, parse_rational, Rational};
use crate::terms::VarName;

/// Largest `|dst|^|src|` for which maps are enumerated.
pub const ENUMERATION_GUARD: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzyRelation {
    carrier: Vec<VarName>,
    index: BTreeMap<VarName, usize>,
    dist: Vec<Vec<Rational>>,
}

impl FuzzyRelation {
    /// `dist[i][j]` is `d(carrier[i], carrier[j])`.
    pub fn new(carrier: Vec<VarName>, dist: Vec<Vec<Rational>>) -> Result<Self> {
        let n = carrier.len();
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!("expected {n}x{n}")));
        }
        for q in dist.iter().flatten() {
            check_unit(q)?;
        }
        let mut index = BTreeMap::new();
        for (i, v) in carrier.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateName(v.to_string()));
            }
        }
        Ok(FuzzyRelation { carrier, index, dist })
    }

    /// Builds a relation from a function on indices.
    pub fn from_fn(carrier: Vec<VarName>, f: impl Fn(usize, usize) -> Rational) -> Result<Self> {
        let n = carrier.len();
        let dist = (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect();
        Self::new(carrier, dist)
    }

    /// The discrete relation `d_1`: every entry is 1.
    pub fn discrete(carrier: Vec<VarName>) -> Result<Self> {
        if carrier.is_empty() {
            return Err(Error::Empty("carrier"));
        }
        Self::from_fn(carrier, |_, _| Rational::one())
    }

    pub fn carrier(&self) -> &[VarName] {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn index_of(&self, v: &VarName) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn contains(&self, v: &VarName) -> bool {
        self.index.contains_key(v)
    }

    pub fn at(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    /// `d(a, b)` by name.
    pub fn get(&self, a: &VarName, b: &VarName) -> Result<&Rational> {
        let i = self.index_of(a).ok_or_else(|| Error::NotInCarrier(a.to_string()))?;
        let j = self.index_of(b).ok_or_else(|| Error::NotInCarrier(b.to_string()))?;
        Ok(&self.dist[i][j])
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    /// Symmetric, zero on the diagonal, and `d(a,c) <= min(1, d(a,b) + d(b,c))`.
    pub fn is_pseudometric(&self) -> bool {
        let n = self.len();
        let one = Rational::one();
        for a in 0..n {
            if !self.dist[a][a].is_zero() {
                return false;
            }
            for b in 0..n {
                if self.dist[a][b] != self.dist[b][a] {
                    return false;
                }
                for c in 0..n {
                    let via = (&self.dist[a][b] + &self.dist[b][c]).min(one.clone());
                    if self.dist[a][c] > via {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// True if `f` (given as image indices) is 1-Lipschitz from `self` to `dst`.
    pub fn is_lipschitz_map(&self, dst: &FuzzyRelation, f: &[usize]) -> bool {
        let n = self.len();
        f.len() == n && (0..n).all(|i| (0..n).all(|j| dst.at(f[i], f[j]) <= self.at(i, j)))
    }
}

/// Free-function form of [`FuzzyRelation::is_pseudometric`].
pub fn is_pseudometric(d: &FuzzyRelation) -> bool {
    d.is_pseudometric()
}

pub fn check_guard(src_len: usize, dst_len: usize) -> Result<()> {
    let total = Pow::pow(BigInt::from(dst_len), src_len);
    if total > BigInt::from(ENUMERATION_GUARD) {
        return Err(Error::Guard(format!(
            "{dst_len}^{src_len} maps exceed {ENUMERATION_GUARD}"
        )));
    }
    Ok(())
}

/// All 1-Lipschitz maps `src → dst`, each given as the vector of image
/// indices. The condition is checked on every pair of the source carrier.
pub fn lipschitz_maps(src: &FuzzyRelation, dst: &FuzzyRelation) -> Result<Vec<Vec<usize>>> {
    lipschitz_maps_by(src, dst.len(), |i, j, a, b| dst.at(a, b) <= src.at(i, j))
}

/// Enumerates maps `src → {0..dst_len}` accepted pairwise by `ok(i, j, f(i), f(j))`,
/// by backtracking in source order. Results are in lexicographic order.
pub fn lipschitz_maps_by(
    src: &FuzzyRelation,
    dst_len: usize,
    ok: impl Fn(usize, usize, usize, usize) -> bool,
) -> Result<Vec<Vec<usize>>> {
    check_guard(src.len(), dst_len)?;
    let n = src.len();
    let mut out = Vec::new();
    let mut f = Vec::with_capacity(n);
    fn go(
        n: usize,
        dst_len: usize,
        f: &mut Vec<usize>,
        ok: &dyn Fn(usize, usize, usize, usize) -> bool,
        out: &mut Vec<Vec<usize>>,
    ) {
        let i = f.len();
        if i == n {
            out.push(f.clone());
            return;
        }
        for a in 0..dst_len {
            f.push(a);
            let fits = ok(i, i, a, a) && (0..i).all(|j| ok(i, j, a, f[j]) && ok(j, i, f[j], a));
            if fits {
                go(n, dst_len, f, ok, out);
            }
            f.pop();
        }
    }
    go(n, dst_len, &mut f, &ok, &mut out);
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct FuzzyJson {
    carrier: Vec<VarName>,
    dist: Vec<Vec<String>>,
}

impl Serialize for FuzzyRelation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FuzzyJson {
            carrier: self.carrier.clone(),
            dist: self
                .dist
                .iter()
                .map(|r| r.iter().map(format_rational).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FuzzyRelation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = FuzzyJson::deserialize(d)?;
        let dist = raw
            .dist
            .iter()
            .map(|row| row.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        FuzzyRelation::new(raw.carrier, dist).map_err(serde::de::Error::custom)
    }
}
