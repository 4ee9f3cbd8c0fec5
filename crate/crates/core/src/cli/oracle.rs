//! Random instances cross-checked against brute-force vertex enumeration.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::Result;
use crate::fuzzy::FuzzyRelation;
use crate::lifting::{enumerate_vertices, evaluate_exact, lift, LiftOperator};
use crate::rational::{format_rational, Rational};
use crate::real::Real;
use crate::terms::{Distribution, VarName};

#[derive(Clone, Debug)]
pub struct Instance {
    pub space: FuzzyRelation,
    pub mu: Distribution,
    pub nu: Distribution,
}

fn random_unit(rng: &mut StdRng) -> Rational {
    let den: i64 = rng.gen_range(1..=10);
    Rational::new(rng.gen_range(0..=den).into(), den.into())
}

fn random_distribution(rng: &mut StdRng, names: &[VarName], max_support: usize) -> Distribution {
    let k = rng.gen_range(1..=max_support.min(names.len()));
    let mut pool: Vec<&VarName> = names.iter().collect();
    let mut raw = BTreeMap::new();
    for _ in 0..k {
        let v = pool.swap_remove(rng.gen_range(0..pool.len()));
        raw.insert(v.clone(), rng.gen_range(1..=6i64));
    }
    let total: i64 = raw.values().sum();
    let weights = raw
        .into_iter()
        .map(|(v, w)| (v, Rational::new(w.into(), total.into())))
        .collect();
    Distribution::new(weights).expect("normalized by construction")
}

/// A fuzzy relation on at most `max_carrier` points with entries of
/// denominator at most 10, and two distributions of support at most 4.
pub fn random_instance(seed: u64, max_carrier: usize) -> Instance {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_carrier.max(1));
    let names: Vec<VarName> = (0..n).map(|i| VarName::new(format!("a{i}")).expect("valid")).collect();
    let matrix: Vec<Vec<Rational>> = (0..n)
        .map(|_| (0..n).map(|_| random_unit(&mut rng)).collect())
        .collect();
    let space = FuzzyRelation::new(names.clone(), matrix).expect("valid by construction");
    let mu = random_distribution(&mut rng, &names, 4);
    let nu = random_distribution(&mut rng, &names, 4);
    Instance { space, mu, nu }
}

/// Result of one cross-check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleLine {
    pub op: LiftOperator,
    pub solver: Real,
    pub brute_force: Real,
    pub vertices: usize,
}

impl OracleLine {
    pub fn agrees(&self) -> bool {
        self.solver == self.brute_force
    }
}

/// Compares the solver optimum with the minimum over all vertices of the
/// transportation polytope, for every operator in `ops`.
pub fn cross_check(inst: &Instance, ops: &[LiftOperator], precision: &Rational) -> Result<Vec<OracleLine>> {
    let verts = enumerate_vertices(&inst.mu, &inst.nu)?;
    ops.iter()
        .map(|&op| {
            let solver = lift(op, &inst.space, &inst.mu, &inst.nu, precision)?.exact;
            let brute_force = verts
                .iter()
                .map(|g| evaluate_exact(op, &inst.space, g))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .min()
                .expect("polytope has a vertex");
            Ok(OracleLine {
                op,
                solver,
                brute_force,
                vertices: verts.len(),
            })
        })
        .collect()
}

/// Runs `count` seeded instances split over `jobs` threads. Output order
/// does not depend on `jobs`.
pub fn run_random(count: usize, seed: u64, jobs: usize, precision: &Rational) -> Vec<(u64, Result<Vec<OracleLine>>)> {
    let seeds: Vec<u64> = (0..count as u64).map(|i| seed.wrapping_add(i)).collect();
    let ops = LiftOperator::all_families();
    let chunk = seeds.len().div_ceil(jobs.max(1)).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|&sd| (sd, cross_check(&random_instance(sd, 4), &ops, precision)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("oracle worker panicked"))
            .collect()
    })
}

pub fn describe(line: &OracleLine) -> String {
    let show = |r: &Real| match r.to_rational() {
        Some(q) => format_rational(&q),
        None => r.to_string(),
    };
    format!(
        "{}: solver {} vs vertices {} over {} vertices: {}",
        line.op,
        show(&line.solver),
        show(&line.brute_force),
        line.vertices,
        if line.agrees() { "agree" } else { "MISMATCH" }
    )
}
