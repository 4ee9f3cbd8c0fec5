#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use liftcert::fuzzy::FuzzyRelation;
use liftcert::lifting::{Coupling, LiftOperator, LiftResult};
use liftcert::rational::Rational;
use liftcert::terms::{Distribution, VarName};
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn names(n: usize) -> Vec<VarName> {
    (0..n).map(|i| VarName::new(format!("v{i}")).unwrap()).collect()
}

/// Rational in [0,1] with denominator at most `max_den`.
pub fn unit(rng: &mut StdRng, max_den: i64) -> Rational {
    let d = rng.gen_range(1..=max_den);
    q(rng.gen_range(0..=d), d)
}

pub fn relation(rng: &mut StdRng, n: usize) -> FuzzyRelation {
    let m = (0..n).map(|_| (0..n).map(|_| unit(rng, 10)).collect()).collect();
    FuzzyRelation::new(names(n), m).unwrap()
}

/// Shortest-path closure (capped at 1) of a random symmetric matrix with
/// zero diagonal.
pub fn pseudometric(rng: &mut StdRng, n: usize) -> FuzzyRelation {
    let mut m = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = unit(rng, 10);
            m[i][j] = v.clone();
            m[j][i] = v;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = (&m[i][k] + &m[k][j]).min(Rational::one());
                if via < m[i][j] {
                    m[i][j] = via;
                }
            }
        }
    }
    FuzzyRelation::new(names(n), m).unwrap()
}

pub fn distribution(rng: &mut StdRng, carrier: &[VarName], max_support: usize) -> Distribution {
    let k = rng.gen_range(1..=max_support.min(carrier.len()));
    let mut chosen = BTreeSet::new();
    while chosen.len() < k {
        chosen.insert(rng.gen_range(0..carrier.len()));
    }
    let raw: Vec<i64> = chosen.iter().map(|_| rng.gen_range(1..=5)).collect();
    let total: i64 = raw.iter().sum();
    let w = chosen
        .iter()
        .zip(raw)
        .map(|(&i, r)| (carrier[i].clone(), q(r, total)))
        .collect();
    Distribution::new(w).unwrap()
}

/// All couplings reachable by greedily saturating cells in every order. Each
/// vertex of the transportation polytope is among them.
pub fn greedy_vertices(mu: &Distribution, nu: &Distribution) -> Vec<BTreeMap<(VarName, VarName), Rational>> {
    let rows: Vec<VarName> = mu.support().cloned().collect();
    let cols: Vec<VarName> = nu.support().cloned().collect();
    let s: Vec<Rational> = mu.weights().values().cloned().collect();
    let d: Vec<Rational> = nu.weights().values().cloned().collect();
    let mut seen = BTreeSet::new();
    let mut out = BTreeSet::new();
    fn go(
        s: Vec<Rational>,
        d: Vec<Rational>,
        x: BTreeMap<(usize, usize), Rational>,
        seen: &mut BTreeSet<(Vec<Rational>, Vec<Rational>, Vec<((usize, usize), Rational)>)>,
        out: &mut BTreeSet<Vec<((usize, usize), Rational)>>,
    ) {
        let key = (s.clone(), d.clone(), x.clone().into_iter().collect::<Vec<_>>());
        if !seen.insert(key) {
            return;
        }
        let mut done = true;
        for i in 0..s.len() {
            for j in 0..d.len() {
                if s[i].is_positive() && d[j].is_positive() {
                    done = false;
                    let m = s[i].clone().min(d[j].clone());
                    let (mut s2, mut d2, mut x2) = (s.clone(), d.clone(), x.clone());
                    s2[i] -= &m;
                    d2[j] -= &m;
                    *x2.entry((i, j)).or_insert_with(Rational::zero) += m;
                    go(s2, d2, x2, seen, out);
                }
            }
        }
        if done {
            out.insert(x.into_iter().collect());
        }
    }
    go(s, d, BTreeMap::new(), &mut seen, &mut out);
    out.into_iter()
        .map(|v| {
            v.into_iter()
                .map(|((i, j), w)| ((rows[i].clone(), cols[j].clone()), w))
                .collect()
        })
        .collect()
}

/// Objective of a coupling in a form that compares exactly or, for the
/// geometric mean, through logarithms.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleValue {
    /// The value itself (standard, max).
    Exact(Rational),
    /// `Σ w d^k`, the k-th power of the value.
    Power(u32, Rational),
    /// `Σ w ln d`, or `None` when some charged cell has distance 0.
    Log(Option<f64>),
}

pub fn objective(op: LiftOperator, d: &FuzzyRelation, cells: &BTreeMap<(VarName, VarName), Rational>) -> OracleValue {
    let live = cells
        .iter()
        .filter(|(_, w)| w.is_positive())
        .map(|((a, b), w)| (w, d.get(a, b).unwrap().clone()));
    match op {
        LiftOperator::Standard | LiftOperator::PowerMean(1) => OracleValue::Exact(live.map(|(w, c)| w * c).sum()),
        LiftOperator::Max => OracleValue::Exact(live.map(|(_, c)| c).max().unwrap()),
        LiftOperator::PowerMean(k) => OracleValue::Power(k, live.map(|(w, c)| w * Pow::pow(&c, k)).sum()),
        LiftOperator::Geometric => {
            let mut acc = 0.0;
            for (w, c) in live {
                if c.is_zero() {
                    return OracleValue::Log(None);
                }
                acc += w.to_f64().unwrap() * c.to_f64().unwrap().ln();
            }
            OracleValue::Log(Some(acc))
        }
    }
}

fn min_value(vals: Vec<OracleValue>) -> OracleValue {
    vals.into_iter()
        .reduce(|a, b| match (&a, &b) {
            (OracleValue::Exact(x), OracleValue::Exact(y)) | (OracleValue::Power(_, x), OracleValue::Power(_, y)) => {
                if y < x {
                    b
                } else {
                    a
                }
            }
            (OracleValue::Log(None), _) => a,
            (_, OracleValue::Log(None)) => b,
            (OracleValue::Log(Some(x)), OracleValue::Log(Some(y))) => {
                if y < x {
                    b
                } else {
                    a
                }
            }
            _ => unreachable!(),
        })
        .unwrap()
}

/// Brute-force optimum over greedy vertices.
pub fn oracle_lift(op: LiftOperator, d: &FuzzyRelation, mu: &Distribution, nu: &Distribution) -> OracleValue {
    min_value(greedy_vertices(mu, nu).iter().map(|g| objective(op, d, g)).collect())
}

/// Whether a solver result agrees with the oracle value: exactly for the
/// rational objectives, within `1e-9` on the log scale for the geometric mean.
pub fn agrees(r: &LiftResult, o: &OracleValue) -> bool {
    match o {
        OracleValue::Exact(v) => r.exact.to_rational().as_ref() == Some(v),
        OracleValue::Power(k, v) => r.exact.pow(&Rational::from_integer((*k).into())).to_rational().as_ref() == Some(v),
        OracleValue::Log(None) => r.exact.is_zero(),
        OracleValue::Log(Some(l)) => {
            let hi = r.value.hi().to_f64().unwrap();
            let lo = r.value.lo().to_f64().unwrap();
            let target = l.exp();
            lo - 1e-9 <= target && target <= hi + 1e-9
        }
    }
}

/// Whether `g` has the marginals of `mu` and `nu`, recomputed from its mass.
pub fn has_marginals(g: &Coupling, mu: &Distribution, nu: &Distribution) -> bool {
    let mut left: BTreeMap<VarName, Rational> = BTreeMap::new();
    let mut right: BTreeMap<VarName, Rational> = BTreeMap::new();
    for ((a, b), w) in g.mass() {
        if w.is_negative() {
            return false;
        }
        *left.entry(a.clone()).or_insert_with(Rational::zero) += w;
        *right.entry(b.clone()).or_insert_with(Rational::zero) += w;
    }
    left.retain(|_, w| !w.is_zero());
    right.retain(|_, w| !w.is_zero());
    &left == mu.weights() && &right == nu.weights()
}

/// A random coupling of `mu` and `nu`: a random convex combination of the
/// product coupling and a random greedy vertex.
pub fn random_coupling(rng: &mut StdRng, mu: &Distribution, nu: &Distribution) -> Coupling {
    let verts = greedy_vertices(mu, nu);
    let v = &verts[rng.gen_range(0..verts.len())];
    let t = q(rng.gen_range(0..=4), 4);
    let mut mass: BTreeMap<(VarName, VarName), Rational> = BTreeMap::new();
    for (a, wa) in mu.iter() {
        for (b, wb) in nu.iter() {
            let w = &t * wa * wb + (Rational::one() - &t) * v.get(&(a.clone(), b.clone())).cloned().unwrap_or_default();
            if !w.is_zero() {
                mass.insert((a.clone(), b.clone()), w);
            }
        }
    }
    Coupling::new(mass, mu.clone(), nu.clone()).unwrap()
}
pub mod mutations;
