//! Exact transportation simplex.
//!
//! The basis is a spanning tree of the bipartite row/column graph, started
//! from the northwest-corner solution. Entering and leaving cells follow
//! Bland's rule on the row-major cell index, so degenerate pivots cannot
//! cycle. Costs are generic: rationals for the additive objectives, and
//! [`LogCost`] (formal logarithms of positive rationals) for the geometric
//! objective, whose signs are decided exactly.

use std::collections::VecDeque;
use std::fmt::Debug;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::real::Real;

/// Costs need only an ordered additive group structure.
pub trait TransportCost: Clone + Debug {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn is_negative(&self) -> bool;
}

impl TransportCost for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn is_negative(&self) -> bool {
        num_traits::Signed::is_negative(self)
    }
}

/// `ln x` for a positive exact real `x`, kept symbolically: addition is
/// multiplication of the arguments, and `ln x < 0` iff `x < 1`.
#[derive(Clone, Debug)]
pub struct LogCost(Real);

impl LogCost {
    /// Panics for zero, whose logarithm is not finite.
    pub fn ln(x: &Rational) -> Self {
        assert!(!x.is_zero(), "logarithm of zero");
        LogCost(Real::from_rational(x))
    }
}

impl TransportCost for LogCost {
    fn zero() -> Self {
        LogCost(Real::one())
    }
    fn add(&self, other: &Self) -> Self {
        LogCost(self.0.mul(&other.0))
    }
    fn sub(&self, other: &Self) -> Self {
        LogCost(self.0.div(&other.0))
    }
    fn is_negative(&self) -> bool {
        self.0 < Real::one()
    }
}

const MAX_PIVOTS: usize = 1_000_000;

/// Minimizes `Σ cost[i][j] x[i][j]` subject to row sums `supply` and column
/// sums `demand` (equal totals), `x >= 0`. Returns an optimal basic solution.
pub fn solve<C: TransportCost>(
    cost: &[Vec<C>],
    supply: &[Rational],
    demand: &[Rational],
) -> Result<Vec<Vec<Rational>>> {
    let m = supply.len();
    let n = demand.len();
    if m == 0 || n == 0 {
        return Err(Error::Empty("marginal"));
    }
    if cost.len() != m || cost.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("cost matrix must be {m}x{n}")));
    }
    let total_s: Rational = supply.iter().sum();
    let total_d: Rational = demand.iter().sum();
    if total_s != total_d {
        return Err(Error::Marginal("supply and demand totals differ".into()));
    }

    let mut x = vec![vec![<Rational as Zero>::zero(); n]; m];
    let mut basic = vec![vec![false; n]; m];
    northwest_corner(supply, demand, &mut x, &mut basic);

    for _ in 0..MAX_PIVOTS {
        let (u, v) = potentials(cost, &basic);
        let entering = (0..m * n)
            .map(|c| (c / n, c % n))
            .find(|&(i, j)| !basic[i][j] && cost[i][j].sub(&u[i]).sub(&v[j]).is_negative());
        let Some((ei, ej)) = entering else {
            return Ok(x);
        };
        // Tree path from column ej back to row ei; signs alternate starting with minus.
        let path = tree_path(&basic, m + ej, ei);
        let minus: Vec<(usize, usize)> = path.iter().copied().step_by(2).collect();
        let theta = minus
            .iter()
            .map(|&(i, j)| x[i][j].clone())
            .min()
            .expect("cycle has a minus cell");
        let leaving = *minus
            .iter()
            .filter(|&&(i, j)| x[i][j] == theta)
            .min_by_key(|&&(i, j)| i * n + j)
            .expect("minimum is attained");
        for (k, &(i, j)) in path.iter().enumerate() {
            if k % 2 == 0 {
                x[i][j] -= &theta;
            } else {
                x[i][j] += &theta;
            }
        }
        x[ei][ej] += &theta;
        basic[leaving.0][leaving.1] = false;
        basic[ei][ej] = true;
    }
    Err(Error::Solver("pivot limit reached".into()))
}

fn northwest_corner(supply: &[Rational], demand: &[Rational], x: &mut [Vec<Rational>], basic: &mut [Vec<bool>]) {
    let (m, n) = (supply.len(), demand.len());
    let mut a = supply.to_vec();
    let mut b = demand.to_vec();
    let (mut i, mut j) = (0, 0);
    loop {
        let t = a[i].clone().min(b[j].clone());
        x[i][j] = t.clone();
        basic[i][j] = true;
        a[i] -= &t;
        b[j] -= &t;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if (a[i].is_zero() && i < m - 1) || j == n - 1 {
            i += 1;
        } else {
            j += 1;
        }
    }
}

/// Dual potentials with `u[0] = 0` and `u[i] + v[j] = cost[i][j]` on basic cells.
fn potentials<C: TransportCost>(cost: &[Vec<C>], basic: &[Vec<bool>]) -> (Vec<C>, Vec<C>) {
    let (m, n) = (basic.len(), basic[0].len());
    let mut u: Vec<Option<C>> = vec![None; m];
    let mut v: Vec<Option<C>> = vec![None; n];
    u[0] = Some(C::zero());
    let mut queue = VecDeque::from([0usize]);
    while let Some(node) = queue.pop_front() {
        if node < m {
            let i = node;
            for j in 0..n {
                if basic[i][j] && v[j].is_none() {
                    v[j] = Some(cost[i][j].sub(u[i].as_ref().unwrap()));
                    queue.push_back(m + j);
                }
            }
        } else {
            let j = node - m;
            for i in 0..m {
                if basic[i][j] && u[i].is_none() {
                    u[i] = Some(cost[i][j].sub(v[j].as_ref().unwrap()));
                    queue.push_back(i);
                }
            }
        }
    }
    let u = u.into_iter().map(|c| c.expect("basis spans all rows")).collect();
    let v = v.into_iter().map(|c| c.expect("basis spans all columns")).collect();
    (u, v)
}

/// Cells on the tree path between two nodes (rows are `0..m`, columns `m..m+n`).
fn tree_path(basic: &[Vec<bool>], from: usize, to: usize) -> Vec<(usize, usize)> {
    let (m, n) = (basic.len(), basic[0].len());
    let mut parent: Vec<Option<usize>> = vec![None; m + n];
    let mut seen = vec![false; m + n];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(node) = queue.pop_front() {
        if node == to {
            break;
        }
        let neighbours: Vec<usize> = if node < m {
            (0..n).filter(|&j| basic[node][j]).map(|j| m + j).collect()
        } else {
            (0..m).filter(|&i| basic[i][node - m]).collect()
        };
        for next in neighbours {
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some(node);
                queue.push_back(next);
            }
        }
    }
    let mut cells = Vec::new();
    let mut node = to;
    while node != from {
        let prev = parent[node].expect("basis is a spanning tree");
        let cell = if node < m { (node, prev - m) } else { (prev, node - m) };
        cells.push(cell);
        node = prev;
    }
    cells.reverse();
    cells
}

/// `Σ cost·x` for rational costs.
pub fn objective(cost: &[Vec<Rational>], x: &[Vec<Rational>]) -> Rational {
    cost.iter().flatten().zip(x.iter().flatten()).map(|(c, w)| c * w).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn running_instance() {
        // rows {a, b}, columns {b, c}
        let cost = vec![vec![ratio(1, 5), ratio(3, 5)], vec![int(0), ratio(3, 10)]];
        let x = solve(&cost, &[ratio(1, 2), ratio(1, 2)], &[ratio(1, 2), ratio(1, 2)]).unwrap();
        assert_eq!(objective(&cost, &x), ratio(1, 4));
        assert_eq!(x, vec![vec![ratio(1, 2), int(0)], vec![int(0), ratio(1, 2)]]);
    }

    #[test]
    fn degenerate_square() {
        // identity-cost assignment with ties everywhere
        let cost: Vec<Vec<Rational>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { int(0) } else { int(1) }).collect())
            .collect();
        let q = vec![ratio(1, 4); 4];
        let x = solve(&cost, &q, &q).unwrap();
        assert_eq!(objective(&cost, &x), int(0));
    }

    #[test]
    fn log_costs_minimize_products() {
        // minimize Π d^x: prefer the cell pair with the smaller product
        let d = [[ratio(1, 2), ratio(1, 10)], [ratio(1, 10), ratio(1, 2)]];
        let cost: Vec<Vec<LogCost>> = d.iter().map(|r| r.iter().map(LogCost::ln).collect()).collect();
        let half = [ratio(1, 2), ratio(1, 2)];
        let x = solve(&cost, &half, &half).unwrap();
        assert_eq!(x, vec![vec![int(0), ratio(1, 2)], vec![ratio(1, 2), int(0)]]);
    }

    #[test]
    fn rejects_unbalanced() {
        let cost = vec![vec![int(0)]];
        assert!(solve(&cost, &[int(1)], &[ratio(1, 2)]).is_err());
    }
}
