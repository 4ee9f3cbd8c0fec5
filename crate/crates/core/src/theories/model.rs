use std::collections::BTreeMap;
use std::fmt::Debug;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fuzzy::{lipschitz_maps_by, FuzzyRelation};
use crate::lifting::{lift, LiftOperator};
use crate::rational::{default_precision, format_rational, parse_rational, Rational};
use crate::real::Real;
use crate::terms::{ConvexTerm, Distribution, Prob, VarName};
use crate::theories::QuantEquation;

/// A finite quantitative algebra over the convex signature: a finite set of
/// interpretable elements, a distance, and the `+_p` operations.
pub trait QuantitativeAlgebra {
    type Elem: Clone + Debug + PartialEq;

    /// Elements an interpretation may choose from.
    fn elements(&self) -> &[Self::Elem];
    fn distance(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Real>;
    fn combine(&self, p: &Prob, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
}

fn eval_term<M: QuantitativeAlgebra>(m: &M, t: &ConvexTerm, env: &BTreeMap<&VarName, &M::Elem>) -> Result<M::Elem> {
    match t {
        ConvexTerm::Leaf(v) => env
            .get(v)
            .map(|e| (*e).clone())
            .ok_or_else(|| Error::Unmapped(v.to_string())),
        ConvexTerm::Node(p, l, r) => m.combine(p, &eval_term(m, l, env)?, &eval_term(m, r, env)?),
    }
}

/// Whether every 1-Lipschitz interpretation of the context into `m`
/// satisfies the (in)equation. Vacuously true when there is none.
pub fn satisfies<M: QuantitativeAlgebra>(m: &M, eq: &QuantEquation) -> Result<bool> {
    let elems = m.elements();
    let n = elems.len();
    let mut dist = vec![vec![Real::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            dist[i][j] = m.distance(&elems[i], &elems[j])?;
        }
    }
    let ctx = &eq.context;
    let bounds: Vec<Vec<Real>> = ctx
        .matrix()
        .iter()
        .map(|r| r.iter().map(Real::from_rational).collect())
        .collect();
    let maps = lipschitz_maps_by(ctx, n, |i, j, a, b| dist[a][b] <= bounds[i][j])?;
    for f in maps {
        let env: BTreeMap<&VarName, &M::Elem> = ctx.carrier().iter().zip(f.iter().map(|&k| &elems[k])).collect();
        let l = eval_term(m, &eq.lhs, &env)?;
        let r = eval_term(m, &eq.rhs, &env)?;
        let holds = match &eq.bound {
            None => l == r,
            Some(b) => &m.distance(&l, &r)? <= b,
        };
        if !holds {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A model given by its distance matrix and one operation table per weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableModel {
    space: FuzzyRelation,
    elems: Vec<usize>,
    ops: BTreeMap<Rational, Vec<Vec<usize>>>,
}

impl TableModel {
    pub fn new(space: FuzzyRelation, ops: BTreeMap<Rational, Vec<Vec<usize>>>) -> Result<Self> {
        let n = space.len();
        for (p, table) in &ops {
            Prob::interior(p.clone())?;
            if table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&k| k >= n)) {
                return Err(Error::Shape(format!(
                    "operation table for {} must be {n}x{n}",
                    format_rational(p)
                )));
            }
        }
        Ok(TableModel {
            elems: (0..n).collect(),
            space,
            ops,
        })
    }

    pub fn space(&self) -> &FuzzyRelation {
        &self.space
    }
}

impl QuantitativeAlgebra for TableModel {
    type Elem = usize;

    fn elements(&self) -> &[usize] {
        &self.elems
    }

    fn distance(&self, a: &usize, b: &usize) -> Result<Real> {
        Ok(Real::from_rational(self.space.at(*a, *b)))
    }

    fn combine(&self, p: &Prob, a: &usize, b: &usize) -> Result<usize> {
        let table = self
            .ops
            .get(p.value())
            .ok_or_else(|| Error::MissingOperation(p.to_string()))?;
        Ok(table[*a][*b])
    }
}

/// Distributions over a base relation with the lifted distance. Terms are
/// evaluated in the full convex algebra of distributions; interpretations
/// range over the given sample.
#[derive(Clone, Debug)]
pub struct LiftedModel {
    op: LiftOperator,
    base: FuzzyRelation,
    samples: Vec<Distribution>,
}

impl LiftedModel {
    pub fn new(op: LiftOperator, base: FuzzyRelation, samples: Vec<Distribution>) -> Result<Self> {
        for s in &samples {
            if let Some(v) = s.support().find(|v| !base.contains(v)) {
                return Err(Error::NotInCarrier(v.to_string()));
            }
        }
        Ok(LiftedModel { op, base, samples })
    }
}

impl QuantitativeAlgebra for LiftedModel {
    type Elem = Distribution;

    fn elements(&self) -> &[Distribution] {
        &self.samples
    }

    fn distance(&self, a: &Distribution, b: &Distribution) -> Result<Real> {
        Ok(lift(self.op, &self.base, a, b, &default_precision())?.exact)
    }

    fn combine(&self, p: &Prob, a: &Distribution, b: &Distribution) -> Result<Distribution> {
        a.combine(b, p)
    }
}

/// Model files accepted by the command line.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ModelFile {
    Table {
        space: FuzzyRelation,
        ops: BTreeMap<String, Vec<Vec<VarName>>>,
    },
    Lifted {
        operator: String,
        space: FuzzyRelation,
        samples: Vec<Distribution>,
    },
}

pub enum LoadedModel {
    Table(TableModel),
    Lifted(LiftedModel),
}

impl ModelFile {
    pub fn load(self) -> Result<LoadedModel> {
        match self {
            ModelFile::Table { space, ops } => {
                let mut tables = BTreeMap::new();
                for (p, rows) in ops {
                    let table = rows
                        .iter()
                        .map(|r| {
                            r.iter()
                                .map(|v| space.index_of(v).ok_or_else(|| Error::NotInCarrier(v.to_string())))
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<Vec<_>>>()?;
                    tables.insert(parse_rational(&p)?, table);
                }
                Ok(LoadedModel::Table(TableModel::new(space, tables)?))
            }
            ModelFile::Lifted {
                operator,
                space,
                samples,
            } => Ok(LoadedModel::Lifted(LiftedModel::new(
                operator.parse()?,
                space,
                samples,
            )?)),
        }
    }
}

impl LoadedModel {
    pub fn satisfies(&self, eq: &QuantEquation) -> Result<bool> {
        match self {
            LoadedModel::Table(m) => satisfies(m, eq),
            LoadedModel::Lifted(m) => satisfies(m, eq),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::terms::var;
    use crate::theories::{ica_axiom, symmetry_equation};

    fn example_model() -> TableModel {
        let space: FuzzyRelation =
            serde_json::from_str(r#"{"carrier":["a1","a2"],"dist":[["0.5","1"],["0.3","0"]]}"#).unwrap();
        TableModel::new(space, BTreeMap::new()).unwrap()
    }

    #[test]
    fn symmetry_fails_on_the_example_matrix() {
        assert!(!satisfies(&example_model(), &symmetry_equation(&ratio(3, 10)).unwrap()).unwrap());
        // at ε = 1/5 no interpretation separates the points asymmetrically
        assert!(satisfies(&example_model(), &symmetry_equation(&ratio(1, 5)).unwrap()).unwrap());
    }

    #[test]
    fn no_interpretation_means_satisfied() {
        // the context asks for self-distance 0, which no element of the model has
        let ctx = FuzzyRelation::from_fn(vec![var("u")], |_, _| int(0)).unwrap();
        let space = FuzzyRelation::discrete(vec![var("a"), var("b")]).unwrap();
        let m = TableModel::new(space, BTreeMap::new()).unwrap();
        let eq = QuantEquation::new(ctx, "u".parse().unwrap(), "u".parse().unwrap(), Some(Real::zero())).unwrap();
        assert!(satisfies(&m, &eq).unwrap());
    }

    #[test]
    fn lifted_model_satisfies_interpolative_instances() {
        let base = FuzzyRelation::from_fn(
            vec![var("a"), var("b")],
            |i, j| if i == j { int(0) } else { ratio(1, 2) },
        )
        .unwrap();
        let samples = vec![
            Distribution::dirac(var("a")),
            Distribution::dirac(var("b")),
            Distribution::new(BTreeMap::from([(var("a"), ratio(1, 2)), (var("b"), ratio(1, 2))])).unwrap(),
        ];
        for op in LiftOperator::all_families() {
            let m = LiftedModel::new(op, base.clone(), samples.clone()).unwrap();
            let p = Prob::interior(ratio(1, 3)).unwrap();
            let eq = ica_axiom(op, &p, &ratio(1, 4), &ratio(1, 2)).unwrap();
            assert!(satisfies(&m, &eq).unwrap(), "{op}");
        }
    }

    #[test]
    fn missing_operation() {
        let eq = ica_axiom(
            LiftOperator::Standard,
            &Prob::interior(ratio(1, 2)).unwrap(),
            &int(1),
            &int(1),
        )
        .unwrap();
        assert!(matches!(
            satisfies(&example_model(), &eq),
            Err(Error::MissingOperation(_))
        ));
    }
}
