//! Brute-force vertex enumeration of the transportation polytope, used as an
//! oracle for the simplex and bottleneck solvers.
//!
//! A vertex is the unique solution of the marginal equations restricted to a
//! linearly independent cell set; in the bipartite row/column graph those
//! are exactly the forests. Every vertex is the solution of some spanning
//! tree, so trees (cell sets of size `m + n - 1` without cycles) are
//! enumerated, solved by leaf peeling, and kept when nonnegative.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lifting::coupling::Coupling;
use crate::rational::Rational;
use crate::terms::{Distribution, VarName};

/// Largest `|supp μ|·|supp ν|` accepted by [`enumerate_vertices`].
pub const VERTEX_GUARD: usize = 20;

pub fn enumerate_vertices(mu: &Distribution, nu: &Distribution) -> Result<Vec<Coupling>> {
    let rows: Vec<&VarName> = mu.support().collect();
    let cols: Vec<&VarName> = nu.support().collect();
    let (m, n) = (rows.len(), cols.len());
    if m * n > VERTEX_GUARD {
        return Err(Error::Guard(format!("{m}x{n} cells exceed {VERTEX_GUARD}")));
    }
    let supply: Vec<Rational> = rows.iter().map(|v| mu.weight(v)).collect();
    let demand: Vec<Rational> = cols.iter().map(|v| nu.weight(v)).collect();

    let mut solutions: BTreeSet<Vec<Rational>> = BTreeSet::new();
    let mut chosen = Vec::with_capacity(m + n - 1);
    let mut parent: Vec<usize> = (0..m + n).collect();
    spanning_trees(m, n, 0, &mut chosen, &mut parent, &mut |tree| {
        if let Some(x) = solve_tree(m, n, tree, &supply, &demand) {
            solutions.insert(x);
        }
    });

    solutions
        .into_iter()
        .map(|x| {
            let mut mass = BTreeMap::new();
            for (c, w) in x.into_iter().enumerate() {
                mass.insert((rows[c / n].clone(), cols[c % n].clone()), w);
            }
            Coupling::new(mass, mu.clone(), nu.clone())
        })
        .collect()
}

fn find(parent: &[usize], mut x: usize) -> usize {
    while parent[x] != x {
        x = parent[x];
    }
    x
}

fn spanning_trees(
    m: usize,
    n: usize,
    next: usize,
    chosen: &mut Vec<usize>,
    parent: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    let need = m + n - 1;
    if chosen.len() == need {
        visit(chosen);
        return;
    }
    if m * n - next < need - chosen.len() {
        return;
    }
    for c in next..m * n {
        let (i, j) = (c / n, m + c % n);
        let (ri, rj) = (find(parent, i), find(parent, j));
        if ri == rj {
            continue;
        }
        let saved = parent.clone();
        parent[ri] = rj;
        chosen.push(c);
        spanning_trees(m, n, c + 1, chosen, parent, visit);
        chosen.pop();
        *parent = saved;
    }
}

/// Unique solution on a spanning tree, or `None` if some cell goes negative.
fn solve_tree(m: usize, n: usize, tree: &[usize], supply: &[Rational], demand: &[Rational]) -> Option<Vec<Rational>> {
    let mut a = supply.to_vec();
    let mut b = demand.to_vec();
    let mut x = vec![Rational::zero(); m * n];
    let mut live: Vec<usize> = tree.to_vec();
    let mut degree = vec![0usize; m + n];
    for &c in &live {
        degree[c / n] += 1;
        degree[m + c % n] += 1;
    }
    while !live.is_empty() {
        let pos = live
            .iter()
            .position(|&c| degree[c / n] == 1 || degree[m + c % n] == 1)
            .expect("a tree has a leaf");
        let c = live.swap_remove(pos);
        let (i, j) = (c / n, c % n);
        let w = if degree[i] == 1 { a[i].clone() } else { b[j].clone() };
        if w.is_negative() {
            return None;
        }
        a[i] -= &w;
        b[j] -= &w;
        degree[i] -= 1;
        degree[m + j] -= 1;
        x[c] = w;
    }
    Some(x)
}
