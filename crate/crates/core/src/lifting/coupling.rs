use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::terms::{Distribution, Prob, VarName};

pub type Cell = (VarName, VarName);

/// A joint distribution on pairs whose marginals are `mu` and `nu`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coupling {
    mass: BTreeMap<Cell, Rational>,
    mu: Distribution,
    nu: Distribution,
}

impl Coupling {
    /// Validates both marginal equations exactly; zero masses are dropped.
    pub fn new(mass: BTreeMap<Cell, Rational>, mu: Distribution, nu: Distribution) -> Result<Self> {
        let mut kept = BTreeMap::new();
        let mut rows: BTreeMap<&VarName, Rational> = BTreeMap::new();
        let mut cols: BTreeMap<&VarName, Rational> = BTreeMap::new();
        for ((a, b), w) in &mass {
            if w.is_negative() {
                return Err(Error::Marginal(format!("negative mass at ({a},{b})")));
            }
            if w.is_zero() {
                continue;
            }
            *rows.entry(a).or_insert_with(Rational::zero) += w;
            *cols.entry(b).or_insert_with(Rational::zero) += w;
        }
        check_marginal(&rows, &mu, "left")?;
        check_marginal(&cols, &nu, "right")?;
        for (cell, w) in mass {
            if !w.is_zero() {
                kept.insert(cell, w);
            }
        }
        Ok(Coupling { mass: kept, mu, nu })
    }

    pub fn mass(&self) -> &BTreeMap<Cell, Rational> {
        &self.mass
    }

    pub fn get(&self, a: &VarName, b: &VarName) -> Rational {
        self.mass
            .get(&(a.clone(), b.clone()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn left_marginal(&self) -> &Distribution {
        &self.mu
    }

    pub fn right_marginal(&self) -> &Distribution {
        &self.nu
    }

    pub fn support(&self) -> impl Iterator<Item = &Cell> {
        self.mass.keys()
    }

    pub fn support_len(&self) -> usize {
        self.mass.len()
    }

    /// The independent product `μ × ν`.
    pub fn product(mu: &Distribution, nu: &Distribution) -> Coupling {
        let mut mass = BTreeMap::new();
        for (a, wa) in mu.iter() {
            for (b, wb) in nu.iter() {
                mass.insert((a.clone(), b.clone()), wa * wb);
            }
        }
        Coupling {
            mass,
            mu: mu.clone(),
            nu: nu.clone(),
        }
    }

    /// `γ1 +_p γ2`, a coupling of the mixed marginals.
    pub fn combine(&self, other: &Coupling, p: &Prob) -> Result<Coupling> {
        let mu = self.mu.combine(&other.mu, p)?;
        let nu = self.nu.combine(&other.nu, p)?;
        let q = p.complement();
        let mut mass: BTreeMap<Cell, Rational> = BTreeMap::new();
        for (c, w) in &self.mass {
            *mass.entry(c.clone()).or_insert_with(Rational::zero) += w * p.value();
        }
        for (c, w) in &other.mass {
            *mass.entry(c.clone()).or_insert_with(Rational::zero) += w * q.value();
        }
        Ok(Coupling { mass, mu, nu })
    }
}

fn check_marginal(sums: &BTreeMap<&VarName, Rational>, target: &Distribution, side: &str) -> Result<()> {
    for (v, w) in sums {
        if &target.weight(v) != w {
            return Err(Error::Marginal(format!(
                "{side} marginal at {v} is {} but expected {}",
                format_rational(w),
                format_rational(&target.weight(v))
            )));
        }
    }
    for (v, w) in target.iter() {
        if !sums.contains_key(v) {
            return Err(Error::Marginal(format!(
                "{side} marginal at {v} is 0 but expected {}",
                format_rational(w)
            )));
        }
    }
    Ok(())
}

pub fn product_coupling(mu: &Distribution, nu: &Distribution) -> Coupling {
    Coupling::product(mu, nu)
}

pub fn combine_couplings(g1: &Coupling, g2: &Coupling, p: &Prob) -> Result<Coupling> {
    g1.combine(g2, p)
}

#[derive(Serialize, Deserialize)]
struct CouplingJson {
    mass: BTreeMap<String, String>,
    mu: Distribution,
    nu: Distribution,
}

impl Serialize for Coupling {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CouplingJson {
            mass: self
                .mass
                .iter()
                .map(|((a, b), w)| (format!("{a}|{b}"), format_rational(w)))
                .collect(),
            mu: self.mu.clone(),
            nu: self.nu.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Coupling {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = CouplingJson::deserialize(d)?;
        let mut mass = BTreeMap::new();
        for (k, v) in raw.mass {
            let (a, b) = k
                .split_once('|')
                .ok_or_else(|| D::Error::custom(format!("bad cell key `{k}`")))?;
            let a = VarName::new(a).map_err(D::Error::custom)?;
            let b = VarName::new(b).map_err(D::Error::custom)?;
            mass.insert((a, b), parse_rational(&v).map_err(D::Error::custom)?);
        }
        Coupling::new(mass, raw.mu, raw.nu).map_err(D::Error::custom)
    }
}
