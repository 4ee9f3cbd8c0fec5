//! Bottleneck (∞-transport) threshold search.
//!
//! For a threshold `θ`, a coupling supported on cells with cost `<= θ` exists
//! iff the bipartite network source→rows→(allowed cells)→columns→sink carries
//! the full mass. Marginals are scaled by the LCM of their denominators so the
//! flow is integral and the decision is exact.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::rational::{lcm_of_denominators, Rational};

struct Network {
    cap: Vec<Vec<BigInt>>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Network {
            cap: vec![vec![BigInt::zero(); nodes]; nodes],
        }
    }

    /// Edmonds–Karp; the number of augmentations is independent of capacities.
    fn max_flow(&mut self, s: usize, t: usize) -> BigInt {
        let nodes = self.cap.len();
        let mut total = BigInt::zero();
        loop {
            let mut prev = vec![usize::MAX; nodes];
            prev[s] = s;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for v in 0..nodes {
                    if prev[v] == usize::MAX && self.cap[u][v].is_positive() {
                        prev[v] = u;
                        queue.push_back(v);
                    }
                }
            }
            if prev[t] == usize::MAX {
                return total;
            }
            let mut bottleneck: Option<BigInt> = None;
            let mut v = t;
            while v != s {
                let u = prev[v];
                let c = &self.cap[u][v];
                if bottleneck.as_ref().is_none_or(|b| c < b) {
                    bottleneck = Some(c.clone());
                }
                v = u;
            }
            let b = bottleneck.expect("path has an edge");
            let mut v = t;
            while v != s {
                let u = prev[v];
                self.cap[u][v] -= &b;
                self.cap[v][u] += &b;
                v = u;
            }
            total += b;
        }
    }
}

/// Whether some coupling of `supply`/`demand` lives on cells with `cost <= threshold`.
pub fn feasible(cost: &[Vec<Rational>], supply: &[Rational], demand: &[Rational], threshold: &Rational) -> bool {
    let (m, n) = (supply.len(), demand.len());
    let scale = Rational::from_integer(lcm_of_denominators(supply.iter().chain(demand.iter())));
    let (s, t) = (m + n, m + n + 1);
    let mut net = Network::new(m + n + 2);
    let total = scale.to_integer();
    for (i, w) in supply.iter().enumerate() {
        net.cap[s][i] = (w * &scale).to_integer();
    }
    for (j, w) in demand.iter().enumerate() {
        net.cap[m + j][t] = (w * &scale).to_integer();
    }
    for i in 0..m {
        for j in 0..n {
            if &cost[i][j] <= threshold {
                net.cap[i][m + j] = total.clone();
            }
        }
    }
    net.max_flow(s, t) == total
}

/// Smallest cost value `θ` (among the matrix entries) for which [`feasible`] holds.
pub fn min_threshold(cost: &[Vec<Rational>], supply: &[Rational], demand: &[Rational]) -> Rational {
    let mut values: Vec<Rational> = cost.iter().flatten().cloned().collect();
    values.sort();
    values.dedup();
    // the largest value admits every cell, so the product coupling is feasible
    let (mut lo, mut hi) = (0usize, values.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(cost, supply, demand, &values[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    values[lo].clone()
}
