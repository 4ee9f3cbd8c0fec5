//! Systematic certificate mutations.

use liftcert::lifting::LiftOperator;
use liftcert::proofs::{BoundTerm, Derivation, RuleTag, Side};
use liftcert::rational::Rational;
use liftcert::real::Real;
use num_traits::One;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    BoundDecreased,
    PremiseDropped,
    WitnessRemoved,
    AxiomEntryAltered,
    InfRuleInserted,
}

pub const KINDS: [Kind; 5] = [
    Kind::BoundDecreased,
    Kind::PremiseDropped,
    Kind::WitnessRemoved,
    Kind::AxiomEntryAltered,
    Kind::InfRuleInserted,
];

/// Paths at which `kind` applies.
pub fn targets(op: LiftOperator, d: &Derivation, kind: Kind) -> Vec<Vec<usize>> {
    d.paths()
        .into_iter()
        .filter(|p| {
            let n = d.at(p).unwrap();
            match kind {
                Kind::BoundDecreased => n
                    .conclusion
                    .bound
                    .as_ref()
                    .is_some_and(|b| !b.eval(op).unwrap().is_zero()),
                Kind::PremiseDropped => !n.premises.is_empty(),
                Kind::WitnessRemoved => n.side.witnesses.as_ref().is_some_and(|w| !w.is_empty()),
                Kind::AxiomEntryAltered => n.rule == RuleTag::InterpAxiom,
                Kind::InfRuleInserted => n.conclusion.bound.is_some(),
            }
        })
        .collect()
}

fn halve(b: &BoundTerm, op: LiftOperator) -> BoundTerm {
    let v = b.eval(op).unwrap();
    // a rational strictly below v
    let (lo, _) = v.bounds(&Rational::new(1.into(), 1_000_000.into()));
    BoundTerm::leaf(lo / Rational::from_integer(2.into()))
}

/// Applies `kind` at `path` and returns the mutated derivation.
pub fn mutate(op: LiftOperator, d: &Derivation, kind: Kind, path: &[usize], variant: usize) -> Derivation {
    let mut m = d.clone();
    let n = m.at_mut(path).unwrap();
    match kind {
        Kind::BoundDecreased => {
            let b = n.conclusion.bound.clone().unwrap();
            n.conclusion.bound = Some(halve(&b, op));
        }
        Kind::PremiseDropped => {
            let i = variant % n.premises.len();
            n.premises.remove(i);
        }
        Kind::WitnessRemoved => {
            let ws = n.side.witnesses.as_mut().unwrap();
            let i = variant % ws.len();
            ws.remove(i);
            n.premises.remove(1 + i);
        }
        Kind::AxiomEntryAltered => {
            let ctx = &mut n.conclusion.context;
            if variant % 2 == 0 {
                // an entry that must be 1
                ctx.dist[1][0] = BoundTerm::leaf(Rational::new(1.into(), 2.into()));
            } else {
                // a new ε that moves ε ⊕_p δ, preferring one between the old ε
                // and 1 so that the enclosing substitution still accepts
                let p = n.side.p.clone().unwrap();
                let delta = ctx.dist[1][3].eval(op).unwrap();
                let old_eps = ctx.dist[0][2].eval(op).unwrap();
                let old = op.combine(&p, &old_eps, &delta).unwrap();
                let one = Rational::one();
                let above: Vec<Rational> = match old_eps.to_rational() {
                    Some(e) if e < one => (1..6)
                        .map(|k| &e + (&one - &e) / Rational::from_integer((1i64 << k).into()))
                        .collect(),
                    _ => vec![],
                };
                let eps = above
                    .into_iter()
                    .chain(
                        [(1, 1), (0, 1), (1, 2), (1, 3)]
                            .iter()
                            .map(|&(a, b)| Rational::new(a.into(), b.into())),
                    )
                    .find(|e| op.combine(&p, &Real::from_rational(e), &delta).unwrap() != old);
                match eps {
                    Some(e) => ctx.dist[0][2] = BoundTerm::leaf(e),
                    None => ctx.dist[1][0] = BoundTerm::leaf(Rational::new(1.into(), 2.into())),
                }
            }
        }
        Kind::InfRuleInserted => {
            let inner = n.clone();
            *n = Derivation::new(RuleTag::InfRule, inner.conclusion.clone(), Side::default(), vec![inner]);
        }
    }
    m
}
