//! Exhaustive checks over small state spaces, including hypotheses weaker
//! than truth plus monotonicity.

use knowop::enumeration::{
    count_operators, enumerate_filtered_tables, enumerate_tm_operators, universal_check, AxiomSet,
    CheckConfig, Target,
};
use knowop::operator::{satisfies, verify_claim, Axiom, Claim};

fn only(axioms: &[Axiom]) -> AxiomSet {
    axioms.iter().copied().collect()
}

fn check(states: usize, axioms: AxiomSet, target: Target) -> knowop::enumeration::TargetStats {
    let config = CheckConfig {
        allow_large: true,
        ..CheckConfig::new(states, axioms, vec![target])
    };
    let mut stats = universal_check(&config).unwrap();
    let t = stats.targets.remove(0);
    assert_eq!(t.total(), stats.operator_count);
    t
}

#[test]
fn theorem2_needs_only_truth() {
    for n in 1..=3 {
        let t = check(n, only(&[Axiom::Truth]), Target::Claim(Claim::Theorem2));
        assert_eq!((t.fail, t.not_applicable), (0, 0), "n={n}");
    }
}

#[test]
fn kk_refines_needs_only_truth() {
    for n in 1..=3 {
        let t = check(n, only(&[Axiom::Truth]), Target::Claim(Claim::KKRefines));
        assert_eq!((t.fail, t.not_applicable), (0, 0), "n={n}");
    }
}

#[test]
fn neg_k_omega_minimal_needs_only_monotonicity() {
    for n in 1..=2 {
        let t = check(
            n,
            only(&[Axiom::Monotonicity]),
            Target::Claim(Claim::NegKOmegaMin),
        );
        assert_eq!((t.fail, t.not_applicable), (0, 0), "n={n}");
    }
}

#[test]
fn unrestricted_tables_split_into_applicable_and_not() {
    let t = check(2, AxiomSet::empty(), Target::Claim(Claim::Theorem3));
    assert_eq!(t.total(), 256);
    assert_eq!(t.pass, 9);
    assert_eq!(t.fail, 0);
    assert_eq!(t.not_applicable, 247);
    assert!(t.not_applicable_fail > 0);
}

#[test]
fn remark1_holds_for_every_table() {
    let t = check(2, AxiomSet::empty(), Target::Claim(Claim::Remark1));
    assert_eq!(t.pass, 256);
}

#[test]
fn introspection_axioms_are_not_implied() {
    let ops: Vec<_> = enumerate_tm_operators(3).unwrap().collect();
    for axiom in [
        Axiom::Necessitation,
        Axiom::PositiveIntrospection,
        Axiom::NegativeIntrospection,
    ] {
        assert!(ops.iter().any(|k| !satisfies(k, axiom)), "{axiom:?}");
        assert!(ops.iter().any(|k| satisfies(k, axiom)), "{axiom:?}");
    }
}

#[test]
fn extra_axioms_filter_the_neighborhood_enumeration() {
    let axioms = AxiomSet::truth_monotone().with(Axiom::Necessitation);
    let from_neighborhoods = check(3, axioms, Target::Claim(Claim::Theorem3));
    let from_tables = enumerate_filtered_tables(3, axioms, true).unwrap().count() as u64;
    assert_eq!(from_neighborhoods.total(), from_tables);
    assert_eq!(from_neighborhoods.pass, from_tables);
}

#[test]
fn every_event_satisfies_kbound_and_theorem2() {
    for k in enumerate_tm_operators(3).unwrap() {
        for e in k.space().events().unwrap() {
            for claim in [Claim::Theorem2, Claim::KBound, Claim::NegKOmegaMin] {
                let r = verify_claim(&k, claim, Some(&e)).unwrap();
                assert!(r.applicable && r.holds, "{claim:?} at {e} for {k:?}");
            }
        }
    }
}

#[test]
fn operator_counts_follow_dedekind_numbers() {
    assert_eq!(count_operators(1).unwrap(), 2);
    assert_eq!(count_operators(2).unwrap(), 9);
    assert_eq!(count_operators(3).unwrap(), 216);
    assert_eq!(count_operators(4).unwrap(), 160_000);
}
