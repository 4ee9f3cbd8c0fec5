//! Couplings, exact optimal-transport solvers and the generalized liftings.

pub mod bottleneck;
pub mod coupling;
pub mod operator;
pub mod transport;
pub mod vertices;

use std::collections::BTreeMap;

use num_traits::{One, Pow, Zero};

pub use coupling::{combine_couplings, product_coupling, Cell, Coupling};
pub use operator::{oplus, LiftOperator, LiftValue};
pub use vertices::{enumerate_vertices, VERTEX_GUARD};

use crate::error::{Error, Result};
use crate::fuzzy::FuzzyRelation;
use crate::rational::Rational;
use crate::real::Real;
use crate::terms::{Distribution, VarName};
use transport::{LogCost, TransportCost};

/// Optimal value of a lifting together with a coupling attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftResult {
    pub value: LiftValue,
    pub exact: Real,
    pub coupling: Coupling,
}

/// Minimizes `Σ γ·cost` over `Γ(μ, ν)`. Rows of `costs` follow `supp μ`,
/// columns follow `supp ν`, both in name order.
pub fn transportation_lp(costs: &[Vec<Rational>], mu: &Distribution, nu: &Distribution) -> Result<Coupling> {
    solve_generic(costs, mu, nu)
}

fn solve_generic<C: TransportCost>(costs: &[Vec<C>], mu: &Distribution, nu: &Distribution) -> Result<Coupling> {
    let rows: Vec<&VarName> = mu.support().collect();
    let cols: Vec<&VarName> = nu.support().collect();
    let supply: Vec<Rational> = mu.weights().values().cloned().collect();
    let demand: Vec<Rational> = nu.weights().values().cloned().collect();
    let x = transport::solve(costs, &supply, &demand)?;
    let mut mass = BTreeMap::new();
    for (i, row) in x.into_iter().enumerate() {
        for (j, w) in row.into_iter().enumerate() {
            if !w.is_zero() {
                mass.insert((rows[i].clone(), cols[j].clone()), w);
            }
        }
    }
    Coupling::new(mass, mu.clone(), nu.clone())
}

fn check_support(d: &FuzzyRelation, dist: &Distribution) -> Result<()> {
    match dist.support().find(|v| !d.contains(v)) {
        Some(v) => Err(Error::NotInCarrier(v.to_string())),
        None => Ok(()),
    }
}

/// `supp μ × supp ν` distance matrix.
fn distance_block(d: &FuzzyRelation, mu: &Distribution, nu: &Distribution) -> Result<Vec<Vec<Rational>>> {
    check_support(d, mu)?;
    check_support(d, nu)?;
    mu.support()
        .map(|a| nu.support().map(|b| d.get(a, b).cloned()).collect())
        .collect()
}

/// The homomorphic extension of `d` applied to `γ`, as an exact real.
pub fn evaluate_exact(op: LiftOperator, d: &FuzzyRelation, g: &Coupling) -> Result<Real> {
    let cells = g
        .mass()
        .iter()
        .map(|((a, b), w)| Ok((w.clone(), d.get(a, b)?.clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok(op.fold(&cells))
}

pub fn evaluate(op: LiftOperator, d: &FuzzyRelation, g: &Coupling, precision: &Rational) -> Result<LiftValue> {
    Ok(LiftValue::from_real(op, &evaluate_exact(op, d, g)?, precision))
}

/// `K^⊕(d)(μ, ν)` with an optimal coupling.
pub fn lift(
    op: LiftOperator,
    d: &FuzzyRelation,
    mu: &Distribution,
    nu: &Distribution,
    precision: &Rational,
) -> Result<LiftResult> {
    let block = distance_block(d, mu, nu)?;
    let coupling = match op {
        LiftOperator::Standard | LiftOperator::PowerMean(1) => transportation_lp(&block, mu, nu)?,
        LiftOperator::PowerMean(k) => {
            let costs: Vec<Vec<Rational>> = block
                .iter()
                .map(|r| r.iter().map(|c| Pow::pow(c, k)).collect())
                .collect();
            transportation_lp(&costs, mu, nu)?
        }
        LiftOperator::Geometric => {
            if block.iter().flatten().any(Zero::is_zero) {
                transportation_lp(&indicator(&block, |c| c.is_zero()), mu, nu)?
            } else {
                let costs: Vec<Vec<LogCost>> = block.iter().map(|r| r.iter().map(LogCost::ln).collect()).collect();
                solve_generic(&costs, mu, nu)?
            }
        }
        LiftOperator::Max => {
            let supply: Vec<Rational> = mu.weights().values().cloned().collect();
            let demand: Vec<Rational> = nu.weights().values().cloned().collect();
            let theta = bottleneck::min_threshold(&block, &supply, &demand);
            transportation_lp(&indicator(&block, |c| c <= &theta), mu, nu)?
        }
    };
    let exact = evaluate_exact(op, d, &coupling)?;
    Ok(LiftResult {
        value: LiftValue::from_real(op, &exact, precision),
        exact,
        coupling,
    })
}

/// Cost 0 where `free` holds, 1 elsewhere.
fn indicator(block: &[Vec<Rational>], free: impl Fn(&Rational) -> bool) -> Vec<Vec<Rational>> {
    block
        .iter()
        .map(|r| {
            r.iter()
                .map(|c| {
                    if free(c) {
                        <Rational as Zero>::zero()
                    } else {
                        Rational::one()
                    }
                })
                .collect()
        })
        .collect()
}
