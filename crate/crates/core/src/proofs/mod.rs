//! Judgments, finite derivations, synthesis of certificates from couplings,
//! and an independent checker.

pub mod bound;
pub mod check;
pub mod judgment;
pub mod synth;

pub use bound::BoundTerm;
pub use check::{check, check_certificate, Rejection, Verdict};
pub use judgment::{pair_key, Certificate, Context, Derivation, Header, Judgment, RuleTag, Side, EQUALITY_MODE};
pub use synth::{claimed_bound, interp_context, interpolation_chain, prove_lift, synthesize};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::FuzzyRelation;
    use crate::lifting::{lift, Coupling, LiftOperator};
    use crate::rational::{default_precision, int, ratio, Rational};
    use crate::real::Real;
    use crate::terms::{var, ConvexTerm, Distribution, NAryCombination, Prob};

    fn running() -> FuzzyRelation {
        FuzzyRelation::from_fn(vec![var("a"), var("b"), var("c")], |i, j| match (i, j) {
            (0, 1) => ratio(1, 5),
            (0, 2) => ratio(3, 5),
            (1, 1) => int(0),
            (1, 2) => ratio(3, 10),
            _ => int(1),
        })
        .unwrap()
    }

    fn term(s: &str) -> ConvexTerm {
        s.parse().unwrap()
    }

    fn half_half() -> NAryCombination {
        let h = Prob::new(ratio(1, 2)).unwrap();
        NAryCombination::new(vec![(h.clone(), var("x1")), (h, var("x2"))]).unwrap()
    }

    fn value(d: &Derivation, op: LiftOperator) -> Real {
        d.conclusion.bound.as_ref().unwrap().eval(op).unwrap()
    }

    #[test]
    fn assumption_node() {
        let ctx = Context::from_fuzzy(&running());
        let j = Judgment::eps(ctx, term("a"), term("b"), BoundTerm::leaf(ratio(1, 5)));
        assert!(check(
            LiftOperator::Standard,
            &Derivation::leaf(RuleTag::Assum, j.clone()),
            true
        )
        .is_ok());
        let wrong = Judgment {
            bound: Some(BoundTerm::leaf(ratio(1, 4))),
            ..j
        };
        assert!(check(LiftOperator::Standard, &Derivation::leaf(RuleTag::Assum, wrong), true).is_err());
    }

    #[test]
    fn weakening_cannot_decrease() {
        let ctx = Context::from_fuzzy(&running());
        let prem = Derivation::leaf(
            RuleTag::Top,
            Judgment::eps(ctx.clone(), term("a"), term("c"), BoundTerm::one()),
        );
        let down = Judgment::eps(ctx.clone(), term("a"), term("c"), BoundTerm::leaf(ratio(1, 8)));
        let d = Derivation::new(RuleTag::Weaken, down, Side::default(), vec![prem]);
        let r = check(LiftOperator::Standard, &d, true).unwrap_err();
        assert_eq!(r.path, Vec::<usize>::new());
        assert_eq!(r.rule, RuleTag::Weaken);

        // 1/4 weakened to 1/8 through a chain
        let chain = interpolation_chain(
            LiftOperator::Standard,
            &running(),
            &half_half(),
            &[var("a"), var("b")],
            &[var("b"), var("c")],
        )
        .unwrap();
        let down = Judgment {
            bound: Some(BoundTerm::leaf(ratio(1, 8))),
            ..chain.conclusion.clone()
        };
        let d = Derivation::new(RuleTag::Weaken, down, Side::default(), vec![chain]);
        assert!(check(LiftOperator::Standard, &d, true)
            .unwrap_err()
            .reason
            .contains("δ ≥ ε"));
    }

    #[test]
    fn axiom_instance_bound() {
        let ctx = interp_context(BoundTerm::leaf(ratio(1, 5)), BoundTerm::leaf(ratio(2, 5)));
        let p = Prob::interior(ratio(1, 2)).unwrap();
        let lhs = ConvexTerm::node(p.clone(), term("x"), term("y")).unwrap();
        let rhs = ConvexTerm::node(p, term("w"), term("z")).unwrap();
        let side = Side {
            p: Some(ratio(1, 2)),
            ..Side::default()
        };
        let mk = |b: Rational| {
            Derivation::new(
                RuleTag::InterpAxiom,
                Judgment::eps(ctx.clone(), lhs.clone(), rhs.clone(), BoundTerm::leaf(b)),
                side.clone(),
                vec![],
            )
        };
        assert!(check(LiftOperator::Standard, &mk(ratio(3, 10)), true).is_ok());
        assert!(check(LiftOperator::Standard, &mk(ratio(1, 4)), true).is_err());
        assert!(check(LiftOperator::Max, &mk(ratio(2, 5)), true).is_ok());
    }

    #[test]
    fn chain_examples() {
        let d = running();
        let single = NAryCombination::new(vec![(Prob::new(int(1)).unwrap(), var("x1"))]).unwrap();
        let base = interpolation_chain(LiftOperator::Standard, &d, &single, &[var("a")], &[var("b")]).unwrap();
        assert_eq!(base.rule, RuleTag::Assum);

        let c = interpolation_chain(
            LiftOperator::Standard,
            &d,
            &half_half(),
            &[var("a"), var("b")],
            &[var("b"), var("c")],
        )
        .unwrap();
        assert_eq!(value(&c, LiftOperator::Standard), Real::from_rational(&ratio(1, 4)));
        assert!(check(LiftOperator::Standard, &c, true).is_ok());

        let zero = FuzzyRelation::from_fn(vec![var("a"), var("b")], |_, _| int(0)).unwrap();
        for op in [LiftOperator::Standard, LiftOperator::Max, LiftOperator::PowerMean(3)] {
            let c = interpolation_chain(op, &zero, &half_half(), &[var("a"), var("b")], &[var("a"), var("b")]).unwrap();
            assert!(value(&c, op).is_zero());
            assert!(check(op, &c, true).is_ok());
        }

        assert!(interpolation_chain(LiftOperator::Standard, &d, &half_half(), &[var("a")], &[var("b")]).is_err());
        assert!(interpolation_chain(
            LiftOperator::Standard,
            &d,
            &half_half(),
            &[var("a"), var("q")],
            &[var("b"), var("c")]
        )
        .is_err());
    }

    #[test]
    fn running_instance_certificates() {
        let d = running();
        let (s, t) = (term("(a +_{1/2} b)"), term("(b +_{1/2} c)"));
        let w = default_precision();
        for (op, expected) in [(LiftOperator::Standard, ratio(1, 4)), (LiftOperator::Max, ratio(3, 10))] {
            let proof = prove_lift(op, &d, &s, &t, &w).unwrap();
            assert!(check(op, &proof, true).is_ok());
            assert_eq!(proof.conclusion.bound, Some(BoundTerm::leaf(expected)));
        }
        for op in [LiftOperator::PowerMean(2), LiftOperator::Geometric] {
            let proof = prove_lift(op, &d, &s, &t, &w).unwrap();
            assert!(check(op, &proof, true).is_ok(), "{op}");
        }
    }

    #[test]
    fn self_and_dirac_couplings() {
        let d = running();
        let g = Coupling::product(&Distribution::dirac(var("a")), &Distribution::dirac(var("a")));
        let proof = synthesize(LiftOperator::Standard, &d, &term("a"), &term("a"), &g).unwrap();
        assert_eq!(value(&proof, LiftOperator::Standard), Real::from_rational(&int(1)));
        let g = Coupling::product(&Distribution::dirac(var("a")), &Distribution::dirac(var("b")));
        let proof = synthesize(LiftOperator::Geometric, &d, &term("a"), &term("b"), &g).unwrap();
        assert_eq!(
            value(&proof, LiftOperator::Geometric),
            Real::from_rational(&ratio(1, 5))
        );
        assert!(synthesize(LiftOperator::Standard, &d, &term("a"), &term("c"), &g).is_err());
    }

    #[test]
    fn infinitary_rule_rejected_in_finite_mode() {
        let ctx = Context::from_fuzzy(&running());
        let top = Derivation::leaf(
            RuleTag::Top,
            Judgment::eps(ctx.clone(), term("a"), term("c"), BoundTerm::one()),
        );
        let inf = Derivation::new(
            RuleTag::InfRule,
            Judgment::eps(ctx, term("a"), term("c"), BoundTerm::one()),
            Side::default(),
            vec![top],
        );
        assert!(check(LiftOperator::Standard, &inf, false).is_ok());
        let r = check(LiftOperator::Standard, &inf, true).unwrap_err();
        assert_eq!(r.rule, RuleTag::InfRule);
    }

    #[test]
    fn certificate_json_is_byte_stable() {
        let d = running();
        let w = default_precision();
        let proof = prove_lift(
            LiftOperator::PowerMean(2),
            &d,
            &term("(a +_{1/2} b)"),
            &term("(b +_{1/2} c)"),
            &w,
        )
        .unwrap();
        let cert = Certificate::new(LiftOperator::PowerMean(2), &w, proof);
        let s = cert.to_canonical_json();
        let back = Certificate::from_json(&s).unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.to_canonical_json(), s);
        assert!(s.contains(r#""precision": "1e-12""#));
        assert!(check_certificate(&back, Some(&Context::from_fuzzy(&d)), true).is_ok());
    }

    #[test]
    fn any_coupling_is_a_proof() {
        let d = running();
        let mu = term("(a +_{1/2} b)").denote();
        let nu = term("(b +_{1/2} c)").denote();
        let g = Coupling::product(&mu, &nu);
        let w = default_precision();
        for op in LiftOperator::all_families() {
            let proof = synthesize(op, &d, &term("(a +_{1/2} b)"), &term("(b +_{1/2} c)"), &g).unwrap();
            assert!(check(op, &proof, true).is_ok());
            assert!(value(&proof, op) >= lift(op, &d, &mu, &nu, &w).unwrap().exact);
        }
    }
}
