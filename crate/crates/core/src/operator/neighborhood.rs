//! Minimal-neighborhood form of truthful monotone operators.
//!
//! `ω ∈ KE` iff some listed neighborhood of `ω` is contained in `E`.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::axioms::{check_axiom, Axiom};
use super::KnowledgeOperator;
use crate::error::{Error, Result};
use crate::set::{Event, StateSpace, MAX_ENUMERABLE_STATES};

/// For each state, an antichain of events containing it. Lists are kept
/// sorted by canonical event index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodSystem {
    space: StateSpace,
    neighborhoods: Vec<Vec<Event>>,
}

impl NeighborhoodSystem {
    pub fn new(space: &StateSpace, neighborhoods: Vec<Vec<Event>>) -> Result<Self> {
        if neighborhoods.len() != space.len() {
            return Err(Error::WrongArity {
                expected: space.len(),
                found: neighborhoods.len(),
            });
        }
        let mut sorted = Vec::with_capacity(neighborhoods.len());
        for (w, mut list) in neighborhoods.into_iter().enumerate() {
            let violation = |event: &Event, reason| Error::InvariantViolation {
                state: space.label(w).to_owned(),
                event: event.to_string(),
                reason,
            };
            for n in &list {
                if n.space() != space {
                    return Err(Error::SpaceMismatch);
                }
                if !n.contains(w) {
                    return Err(violation(n, "does not contain its state"));
                }
            }
            list.sort_by_key(Event::mask);
            for (i, n) in list.iter().enumerate() {
                if list[i + 1..].iter().any(|m| n.mask() & !m.mask() == 0) {
                    return Err(violation(n, "is contained in another neighborhood"));
                }
            }
            sorted.push(list);
        }
        Ok(Self {
            space: space.clone(),
            neighborhoods: sorted,
        })
    }

    /// Neighborhoods from raw masks; used by generators that already
    /// guarantee the invariants.
    pub(crate) fn from_masks(space: &StateSpace, lists: &[Vec<u32>]) -> Result<Self> {
        let lists = lists
            .iter()
            .map(|l| l.iter().map(|&m| space.event_from_mask(m)).collect())
            .collect::<Result<Vec<Vec<Event>>>>()?;
        Self::new(space, lists)
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn of(&self, state: usize) -> &[Event] {
        &self.neighborhoods[state]
    }

    /// Expands to the operator table.
    pub fn to_operator(&self) -> KnowledgeOperator {
        assert!(self.space.len() <= MAX_ENUMERABLE_STATES);
        let masks: Vec<Vec<u32>> = self
            .neighborhoods
            .iter()
            .map(|l| l.iter().map(Event::mask).collect())
            .collect();
        let table = (0..=self.space.full_mask())
            .map(|e| {
                masks.iter().enumerate().fold(0, |acc, (w, list)| {
                    if list.iter().any(|&n| n & !e == 0) {
                        acc | 1 << w
                    } else {
                        acc
                    }
                })
            })
            .collect();
        KnowledgeOperator::from_masks(&self.space, table).expect("table has full arity")
    }

    /// Recovers the minimal neighborhoods of a truthful monotone operator:
    /// `N(ω)` is the set of minimal events `E` with `ω ∈ KE`.
    pub fn from_operator(k: &KnowledgeOperator) -> Result<Self> {
        let truth = check_axiom(k, Axiom::Truth);
        if !truth.holds {
            return Err(Error::NotTruthful(Box::new(truth)));
        }
        let mono = check_axiom(k, Axiom::Monotonicity);
        if !mono.holds {
            return Err(Error::NotMonotone(Box::new(mono)));
        }
        let space = k.space();
        let n = space.len();
        let mut lists = vec![Vec::new(); n];
        for e in 0..=space.full_mask() {
            let ke = k.image(e);
            for (w, list) in lists.iter_mut().enumerate() {
                if ke & 1 << w == 0 {
                    continue;
                }
                // Upward closure makes one-step removal sufficient.
                let minimal = (0..n)
                    .filter(|&x| e & 1 << x != 0)
                    .all(|x| k.image(e & !(1 << x)) & 1 << w == 0);
                if minimal {
                    list.push(e);
                }
            }
        }
        Self::from_masks(space, &lists)
    }
}

impl KnowledgeOperator {
    pub fn from_neighborhoods(ns: &NeighborhoodSystem) -> KnowledgeOperator {
        ns.to_operator()
    }

    pub fn to_neighborhoods(&self) -> Result<NeighborhoodSystem> {
        NeighborhoodSystem::from_operator(self)
    }
}

impl Serialize for NeighborhoodSystem {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.space.len()))?;
        for (w, list) in self.neighborhoods.iter().enumerate() {
            map.serialize_entry(self.space.label(w), list)?;
        }
        map.end()
    }
}
