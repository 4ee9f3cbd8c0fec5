//! The unit interval with two zeros, finitized on a grid, as a relational
//! structure `(C, {R_ε})`. Every finitary rule and every instance of the
//! pseudometric theory holds in it, yet `0` and `0'` are related at every
//! positive grid distance without being related at distance 0.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Point {
    Zero,
    ZeroPrime,
    /// `ε` for `0 < ε <= 1`
    Val(Rational),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Zero => f.write_str("0"),
            Point::ZeroPrime => f.write_str("0'"),
            Point::Val(q) => write!(f, "{}", format_rational(q)),
        }
    }
}

/// Carrier `{0, 0'} ∪ grid` with relations `R_ε` for `ε ∈ {0} ∪ grid`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationalModel {
    carrier: Vec<Point>,
    grid: Vec<Rational>,
}

pub fn two_zeros_model(grid: &[Rational]) -> Result<RelationalModel> {
    let mut g: Vec<Rational> = grid.to_vec();
    if let Some(bad) = g.iter().find(|q| !q.is_positive() || *q > &Rational::one()) {
        return Err(Error::OutOfUnitInterval(format!(
            "{} (grid values must lie in (0,1])",
            format_rational(bad)
        )));
    }
    g.sort();
    g.dedup();
    let mut carrier = vec![Point::Zero, Point::ZeroPrime];
    carrier.extend(g.iter().cloned().map(Point::Val));
    Ok(RelationalModel { carrier, grid: g })
}

/// The default grid `{1/2^i : i = 1..n}`.
pub fn dyadic_grid(n: u32) -> Vec<Rational> {
    (1..=n)
        .map(|i| Rational::new(1.into(), num_bigint::BigInt::from(2).pow(i)))
        .collect()
}

impl RelationalModel {
    pub fn carrier(&self) -> &[Point] {
        &self.carrier
    }

    pub fn grid(&self) -> &[Rational] {
        &self.grid
    }

    /// `0` followed by the grid.
    pub fn levels(&self) -> Vec<Rational> {
        std::iter::once(Rational::zero())
            .chain(self.grid.iter().cloned())
            .collect()
    }

    /// Membership `(a, b) ∈ R_ε`, defined for every `ε >= 0`.
    pub fn related(&self, eps: &Rational, a: &Point, b: &Point) -> bool {
        if a == b {
            return true;
        }
        if eps.is_zero() {
            return false;
        }
        let zero = |p: &Point| matches!(p, Point::Zero | Point::ZeroPrime);
        match (a, b) {
            (x, y) if zero(x) && zero(y) => true,
            (z, Point::Val(d)) | (Point::Val(d), z) if zero(z) => d <= eps,
            (Point::Val(d), Point::Val(l)) => (d - l).abs() <= *eps,
            _ => unreachable!(),
        }
    }

    pub fn relation(&self, eps: &Rational) -> BTreeSet<(usize, usize)> {
        let n = self.carrier.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.related(eps, &self.carrier[i], &self.carrier[j]))
            .collect()
    }

    /// The fuzzy relation `d_B` of the context: symmetric, zero on the
    /// diagonal, `d(0,0') = 1`, `d(z, ε) = ε`, `d(ε, δ) = |ε - δ|`.
    pub fn context_distance(&self, a: &Point, b: &Point) -> Rational {
        if a == b {
            return Rational::zero();
        }
        match (a, b) {
            (Point::Val(d), Point::Val(l)) => (d - l).abs(),
            (Point::Val(d), _) | (_, Point::Val(d)) => d.clone(),
            _ => Rational::one(),
        }
    }
}

/// Findings of [`model_respects_finitary_rules`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FinitaryReport {
    pub grid_size: usize,
    pub instances_checked: usize,
    /// `(0,0') ∈ R_ε` for every grid `ε`.
    pub close_at_every_level: bool,
    /// `(0,0') ∈ R_0`.
    pub related_at_zero: bool,
    pub violations: Vec<String>,
}

impl FinitaryReport {
    /// The model respects the checked finitary rules yet refutes `0 =_0 0'`.
    pub fn is_witness(&self) -> bool {
        self.violations.is_empty() && self.close_at_every_level && !self.related_at_zero
    }
}

impl fmt::Display for FinitaryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "grid size: {}", self.grid_size)?;
        writeln!(
            f,
            "rules checked: weakening, assumption, self-distance, symmetry, triangle (infinitary rule excluded)"
        )?;
        writeln!(f, "instances checked: {}", self.instances_checked)?;
        writeln!(f, "(0,0') in R_eps for every grid eps: {}", self.close_at_every_level)?;
        writeln!(f, "(0,0') in R_0: {}", self.related_at_zero)?;
        if self.violations.is_empty() {
            writeln!(f, "violations: none")?;
        } else {
            for v in &self.violations {
                writeln!(f, "violation: {v}")?;
            }
        }
        write!(
            f,
            "non-compactness witness: {}",
            if self.is_witness() {
                "yes (0 =_eps 0' at every grid eps, not at 0; only the infinitary rule bridges the gap)"
            } else {
                "no"
            }
        )
    }
}

/// Checks weakening closure, assumption instances, and the self-distance,
/// symmetry and triangle instances of the pseudometric theory, with
/// distances drawn from `samples` (plus 0 and the grid). Every violation is
/// reported; the infinitary rule is deliberately not checked.
pub fn model_respects_finitary_rules(m: &RelationalModel, samples: &[Rational]) -> FinitaryReport {
    let mut levels: Vec<Rational> = m.levels();
    levels.extend(
        samples
            .iter()
            .filter(|q| !q.is_negative() && *q <= &Rational::one())
            .cloned(),
    );
    levels.sort();
    levels.dedup();
    let c = m.carrier();
    let rels: Vec<BTreeSet<(usize, usize)>> = levels.iter().map(|e| m.relation(e)).collect();
    let mut report = FinitaryReport {
        grid_size: m.grid().len(),
        ..FinitaryReport::default()
    };
    let fail = |r: &mut FinitaryReport, msg: String| r.violations.push(msg);

    for (i, e) in levels.iter().enumerate() {
        for (j, d) in levels.iter().enumerate().skip(i) {
            report.instances_checked += 1;
            if !rels[i].is_subset(&rels[j]) {
                let msg = format!(
                    "weakening: R_{} not contained in R_{}",
                    format_rational(e),
                    format_rational(d)
                );
                fail(&mut report, msg);
            }
        }
    }
    for a in c {
        for b in c {
            report.instances_checked += 1;
            if !m.related(&m.context_distance(a, b), a, b) {
                let msg = format!(
                    "assumption: ({a},{b}) not in R_{}",
                    format_rational(&m.context_distance(a, b))
                );
                fail(&mut report, msg);
            }
        }
    }
    for a in 0..c.len() {
        report.instances_checked += 1;
        if !rels[0].contains(&(a, a)) {
            fail(&mut report, format!("self-distance: ({0},{0}) not in R_0", c[a]));
        }
    }
    for (k, e) in levels.iter().enumerate() {
        for &(a, b) in &rels[k] {
            report.instances_checked += 1;
            if !rels[k].contains(&(b, a)) {
                fail(
                    &mut report,
                    format!(
                        "symmetry: ({},{}) in R_{} but not its flip",
                        c[a],
                        c[b],
                        format_rational(e)
                    ),
                );
            }
        }
    }
    for (k1, e1) in levels.iter().enumerate() {
        for (k2, e2) in levels.iter().enumerate() {
            let sum = (e1 + e2).min(Rational::one());
            for &(a, b) in &rels[k1] {
                for &(b2, x) in &rels[k2] {
                    if b2 != b {
                        continue;
                    }
                    report.instances_checked += 1;
                    if !m.related(&sum, &c[a], &c[x]) {
                        fail(
                            &mut report,
                            format!(
                                "triangle: ({},{}) in R_{}, ({},{}) in R_{}, but not in R_{}",
                                c[a],
                                c[b],
                                format_rational(e1),
                                c[b],
                                c[x],
                                format_rational(e2),
                                format_rational(&sum)
                            ),
                        );
                    }
                }
            }
        }
    }
    let (z, zp) = (&Point::Zero, &Point::ZeroPrime);
    report.close_at_every_level = m.grid().iter().all(|e| m.related(e, z, zp));
    report.related_at_zero = m.related(&Rational::zero(), z, zp);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn memberships() {
        let m = two_zeros_model(&dyadic_grid(10)).unwrap();
        for e in m.grid() {
            assert!(m.related(e, &Point::Zero, &Point::ZeroPrime));
        }
        assert!(!m.related(&Rational::zero(), &Point::Zero, &Point::ZeroPrime));
        let (q, h) = (Point::Val(ratio(1, 4)), Point::Val(ratio(1, 2)));
        assert!(m.related(&ratio(1, 4), &q, &h));
        assert!(!m.related(&ratio(1, 8), &q, &h));
        assert!(m.related(&ratio(1, 4), &Point::ZeroPrime, &q));
        assert!(!m.related(&ratio(1, 8), &Point::Zero, &q));
    }

    #[test]
    fn report_is_a_witness() {
        let m = two_zeros_model(&dyadic_grid(10)).unwrap();
        let r = model_respects_finitary_rules(&m, &[ratio(3, 10)]);
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert!(r.is_witness());
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(two_zeros_model(&[Rational::zero()]).is_err());
        assert!(two_zeros_model(&[ratio(3, 2)]).is_err());
    }
}
