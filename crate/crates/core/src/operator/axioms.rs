//! Executable axiom checks.
//!
//! Every axiom reduces to a family of inclusions `lhs ⊆ rhs` indexed by one
//! event or a pair of events; a single visitor enumerates those obligations
//! and both the boolean fast path and the reporting path share it.

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use serde::Serialize;

use super::{KnowledgeOperator, StateRef};
use crate::set::{first_state, Event};

pub const DEFAULT_COUNTEREXAMPLE_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Axiom {
    Truth,
    Monotonicity,
    Necessitation,
    PositiveIntrospection,
    NegativeIntrospection,
    WeakAdditivity,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [
        Axiom::Truth,
        Axiom::Monotonicity,
        Axiom::Necessitation,
        Axiom::PositiveIntrospection,
        Axiom::NegativeIntrospection,
        Axiom::WeakAdditivity,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Axiom::Truth => "truth",
            Axiom::Monotonicity => "mono",
            Axiom::Necessitation => "nec",
            Axiom::PositiveIntrospection => "pi",
            Axiom::NegativeIntrospection => "ni",
            Axiom::WeakAdditivity => "wadd",
        }
    }

    /// The inclusion the axiom asserts, in formula syntax.
    pub fn statement(self) -> &'static str {
        match self {
            Axiom::Truth => "K E <= E",
            Axiom::Monotonicity => "E <= F implies K E <= K F",
            Axiom::Necessitation => "K Omega == Omega",
            Axiom::PositiveIntrospection => "K E <= K K E",
            Axiom::NegativeIntrospection => "~K E <= K ~K E",
            Axiom::WeakAdditivity => "K E | K F <= K (E | F)",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Axiom {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        Ok(match key.as_str() {
            "truth" | "t" => Axiom::Truth,
            "mono" | "monotonicity" | "monotone" | "m" => Axiom::Monotonicity,
            "nec" | "necessitation" | "n" => Axiom::Necessitation,
            "pi" | "positiveintrospection" | "4" => Axiom::PositiveIntrospection,
            "ni" | "negativeintrospection" | "5" => Axiom::NegativeIntrospection,
            "wadd" | "weakadditivity" => Axiom::WeakAdditivity,
            _ => return Err(format!("unknown axiom {s:?}")),
        })
    }
}

/// One violated inclusion: `lhs ⊄ rhs` for the given event(s).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub events: Vec<Event>,
    pub lhs: Event,
    pub rhs: Event,
    pub state: Option<StateRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub holds: bool,
    /// Total number of violated obligations, including those beyond the cap.
    pub violations: usize,
    pub counterexamples: Vec<AxiomViolation>,
}

/// Visits `(events, lhs, rhs)` for every inclusion the axiom requires.
/// Monotonicity is checked on covering pairs `(E, E ∪ {ω})` only: any
/// `E ⊆ F` is joined by a chain of covering steps, so inclusion along each
/// step gives inclusion for the pair.
fn for_each_obligation<F>(k: &KnowledgeOperator, axiom: Axiom, mut visit: F)
where
    F: FnMut(&[u32], u32, u32) -> ControlFlow<()>,
{
    let full = k.omega_mask();
    let n = k.space().len();
    let _ = (|| -> ControlFlow<()> {
        match axiom {
            Axiom::Truth => {
                for e in 0..=full {
                    visit(&[e], k.image(e), e)?;
                }
            }
            Axiom::Monotonicity => {
                for e in 0..=full {
                    let ke = k.image(e);
                    for w in 0..n {
                        let bit = 1 << w;
                        if e & bit == 0 {
                            let f = e | bit;
                            visit(&[e, f], ke, k.image(f))?;
                        }
                    }
                }
            }
            Axiom::Necessitation => visit(&[full], full, k.image(full))?,
            Axiom::PositiveIntrospection => {
                for e in 0..=full {
                    let ke = k.image(e);
                    visit(&[e], ke, k.image(ke))?;
                }
            }
            Axiom::NegativeIntrospection => {
                for e in 0..=full {
                    let not_ke = full & !k.image(e);
                    visit(&[e], not_ke, k.image(not_ke))?;
                }
            }
            Axiom::WeakAdditivity => {
                for e in 0..=full {
                    let ke = k.image(e);
                    for f in e + 1..=full {
                        visit(&[e, f], ke | k.image(f), k.image(e | f))?;
                    }
                }
            }
        }
        ControlFlow::Continue(())
    })();
}

/// Boolean check without witnesses; stops at the first violation.
pub fn satisfies(k: &KnowledgeOperator, axiom: Axiom) -> bool {
    let mut ok = true;
    for_each_obligation(k, axiom, |_, lhs, rhs| {
        if lhs & !rhs != 0 {
            ok = false;
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    ok
}

pub fn check_axiom(k: &KnowledgeOperator, axiom: Axiom) -> AxiomReport {
    check_axiom_capped(k, axiom, DEFAULT_COUNTEREXAMPLE_CAP)
}

/// Full check, recording at most `cap` counterexamples (at least one is
/// always kept so a failing report is never empty).
pub fn check_axiom_capped(k: &KnowledgeOperator, axiom: Axiom, cap: usize) -> AxiomReport {
    let cap = cap.max(1);
    let space = k.space();
    let event = |m: u32| space.event_from_mask(m).expect("mask in range");
    let mut violations = 0;
    let mut counterexamples = Vec::new();
    for_each_obligation(k, axiom, |events, lhs, rhs| {
        let extra = lhs & !rhs;
        if extra != 0 {
            violations += 1;
            if counterexamples.len() < cap {
                counterexamples.push(AxiomViolation {
                    events: events.iter().map(|&m| event(m)).collect(),
                    lhs: event(lhs),
                    rhs: event(rhs),
                    state: first_state(extra).map(|i| StateRef::new(space, i)),
                });
            }
        }
        ControlFlow::Continue(())
    });
    AxiomReport {
        axiom,
        holds: violations == 0,
        violations,
        counterexamples,
    }
}

/// Monotonicity straight from the definition: every pair `E ⊆ F`.
pub fn is_monotone_all_pairs(k: &KnowledgeOperator) -> bool {
    let full = k.omega_mask();
    (0..=full).all(|e| {
        (0..=full)
            .filter(|f| e & !f == 0)
            .all(|f| k.image(e) & !k.image(f) == 0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::StateSpace;

    fn ab() -> StateSpace {
        StateSpace::new(["a", "b"]).unwrap()
    }

    /// `∅→∅, {a}→∅, {b}→{b}, Ω→{a}`: truthful, not monotone.
    fn truth_only(s: &StateSpace) -> KnowledgeOperator {
        KnowledgeOperator::from_masks(s, vec![0b00, 0b00, 0b10, 0b01]).unwrap()
    }

    #[test]
    fn identity_satisfies_everything() {
        for n in 1..=3 {
            let id = KnowledgeOperator::identity(&StateSpace::standard(n).unwrap());
            for axiom in Axiom::ALL {
                let report = check_axiom(&id, axiom);
                assert!(report.holds, "{axiom}");
                assert!(report.counterexamples.is_empty());
            }
        }
    }

    #[test]
    fn trivial_fails_necessitation() {
        let s = ab();
        let report = check_axiom(&KnowledgeOperator::trivial(&s), Axiom::Necessitation);
        assert!(!report.holds);
        assert_eq!(report.counterexamples.len(), 1);
        let v = &report.counterexamples[0];
        assert!(v.rhs.is_empty());
        assert!(v.lhs.is_omega());
    }

    #[test]
    fn truth_only_table_fails_monotonicity_at_b_omega() {
        let s = ab();
        let k = truth_only(&s);
        assert!(check_axiom(&k, Axiom::Truth).holds);
        let report = check_axiom(&k, Axiom::Monotonicity);
        assert!(!report.holds);
        assert_eq!(report.violations, 1);
        let v = &report.counterexamples[0];
        assert_eq!(
            v.events,
            vec![s.event_from_names(["b"]).unwrap(), s.omega()]
        );
        assert_eq!(v.state.as_ref().unwrap().label, "b");
        assert!(!is_monotone_all_pairs(&k));
    }

    #[test]
    fn cap_limits_counterexamples() {
        let s = StateSpace::standard(3).unwrap();
        let k = KnowledgeOperator::constant(&s.omega());
        let report = check_axiom_capped(&k, Axiom::Truth, 3);
        assert_eq!(report.violations, 7);
        assert_eq!(report.counterexamples.len(), 3);
        let report = check_axiom_capped(&k, Axiom::Truth, 0);
        assert_eq!(report.counterexamples.len(), 1);
        assert_eq!(report.holds, report.counterexamples.is_empty());
    }

    #[test]
    fn parse_axiom_names() {
        assert_eq!("truth".parse::<Axiom>().unwrap(), Axiom::Truth);
        assert_eq!("Mono".parse::<Axiom>().unwrap(), Axiom::Monotonicity);
        assert_eq!(
            "negative-introspection".parse::<Axiom>().unwrap(),
            Axiom::NegativeIntrospection
        );
        assert!("foo".parse::<Axiom>().is_err());
    }

    #[test]
    fn covering_check_agrees_with_all_pairs_exhaustively() {
        for n in 1..=3usize {
            let s = StateSpace::standard(n).unwrap();
            let events = 1usize << n;
            let total = events.pow(events as u32);
            for code in 0..total {
                let mut c = code;
                let table = (0..events)
                    .map(|_| {
                        let m = (c % events) as u32;
                        c /= events;
                        m
                    })
                    .collect();
                let k = KnowledgeOperator::from_masks(&s, table).unwrap();
                assert_eq!(
                    satisfies(&k, Axiom::Monotonicity),
                    is_monotone_all_pairs(&k)
                );
            }
        }
    }

    #[test]
    fn covering_check_agrees_with_all_pairs_sampled_n4() {
        use rand::{Rng, SeedableRng};
        let s = StateSpace::standard(4).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let mut monotone = 0;
        for i in 0..1000 {
            // Half the samples are perturbed monotone operators so both
            // verdicts are exercised.
            let table: Vec<u32> = if i % 2 == 0 {
                (0..16).map(|_| rng.random_range(0..16)).collect()
            } else {
                let keep: u32 = rng.random_range(0..16);
                let mut t: Vec<u32> = (0..16).map(|e| e & keep).collect();
                let j = rng.random_range(0..16);
                t[j] = rng.random_range(0..16);
                t
            };
            let k = KnowledgeOperator::from_masks(&s, table).unwrap();
            let fast = satisfies(&k, Axiom::Monotonicity);
            assert_eq!(fast, is_monotone_all_pairs(&k));
            monotone += fast as usize;
        }
        assert!(monotone > 0);
    }
}
