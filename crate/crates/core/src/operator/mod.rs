//! Knowledge operators as explicit tables over the event algebra.

mod axioms;
mod claims;
mod neighborhood;

use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Serialize, Serializer};

pub use axioms::{
    check_axiom, check_axiom_capped, is_monotone_all_pairs, satisfies, Axiom, AxiomReport,
    AxiomViolation, DEFAULT_COUNTEREXAMPLE_CAP,
};
pub use claims::{
    verify_claim, verify_claim_with, Claim, ClaimFailure, ClaimOptions, ClaimReport, TraceEntry,
};
pub use neighborhood::NeighborhoodSystem;

use crate::error::{Error, Result};
use crate::set::{Event, StateSpace, MAX_ENUMERABLE_STATES};

/// A state referenced from a report; serialized as its label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateRef {
    pub index: usize,
    pub label: String,
}

impl StateRef {
    pub(crate) fn new(space: &StateSpace, index: usize) -> Self {
        Self {
            index,
            label: space.label(index).to_owned(),
        }
    }
}

impl Serialize for StateRef {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label)
    }
}

/// Total map from events to events, stored as a table indexed by the
/// canonical event order.
#[derive(Clone)]
pub struct KnowledgeOperator {
    space: StateSpace,
    table: Vec<u32>,
}

impl KnowledgeOperator {
    pub fn from_table(space: &StateSpace, images: &[Event]) -> Result<Self> {
        if images.iter().any(|e| e.space() != space) {
            return Err(Error::SpaceMismatch);
        }
        Self::from_masks(space, images.iter().map(Event::mask).collect())
    }

    pub fn from_masks(space: &StateSpace, table: Vec<u32>) -> Result<Self> {
        if space.len() > MAX_ENUMERABLE_STATES {
            return Err(Error::TooManyStates {
                requested: space.len(),
                limit: MAX_ENUMERABLE_STATES,
            });
        }
        if table.len() != space.event_count() {
            return Err(Error::WrongArity {
                expected: space.event_count(),
                found: table.len(),
            });
        }
        let full = space.full_mask();
        if table.iter().any(|&m| m & !full != 0) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self {
            space: space.clone(),
            table,
        })
    }

    /// `KE = E`.
    pub fn identity(space: &StateSpace) -> Self {
        Self::build(space, |e| e)
    }

    /// `KE = ∅`.
    pub fn trivial(space: &StateSpace) -> Self {
        Self::build(space, |_| 0)
    }

    /// `KE = C` for a fixed event `C`.
    pub fn constant(event: &Event) -> Self {
        Self::build(event.space(), |_| event.mask())
    }

    fn build(space: &StateSpace, f: impl Fn(u32) -> u32) -> Self {
        assert!(space.len() <= MAX_ENUMERABLE_STATES);
        Self {
            space: space.clone(),
            table: (0..=space.full_mask()).map(f).collect(),
        }
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub(crate) fn table_mut(&mut self) -> &mut [u32] {
        &mut self.table
    }

    /// Image of an event given by mask.
    #[inline]
    pub fn image(&self, event: u32) -> u32 {
        self.table[event as usize]
    }

    pub fn omega_mask(&self) -> u32 {
        self.space.full_mask()
    }

    pub fn apply(&self, event: &Event) -> Result<Event> {
        if event.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(event.with_bits(self.image(event.mask())))
    }

    pub fn images(&self) -> Vec<Event> {
        self.table
            .iter()
            .map(|&m| {
                self.space
                    .event_from_mask(m)
                    .expect("table entries are in range")
            })
            .collect()
    }

    /// `K_self E ⊆ K_other E` for every event.
    pub fn refined_by(&self, other: &KnowledgeOperator) -> Result<bool> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(self
            .table
            .iter()
            .zip(&other.table)
            .all(|(&a, &b)| a & !b == 0))
    }

    /// Applies a word over `K` and `~` to `event`, rightmost symbol first.
    /// Whitespace is ignored, so `"K~K"` and `"K ~ K"` agree.
    pub fn introspect(&self, event: &Event, word: &str) -> Result<Event> {
        if event.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        let mut ops = Vec::new();
        for (pos, ch) in word.char_indices() {
            match ch {
                'K' | '~' => ops.push(ch),
                c if c.is_whitespace() => {}
                _ => return Err(Error::BadWord(pos)),
            }
        }
        let full = self.omega_mask();
        let bits = ops.iter().rev().fold(event.mask(), |m, op| match op {
            'K' => self.image(m),
            _ => full & !m,
        });
        Ok(event.with_bits(bits))
    }
}

impl PartialEq for KnowledgeOperator {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.table == other.table
    }
}

impl Eq for KnowledgeOperator {}

impl Hash for KnowledgeOperator {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.table.hash(state);
    }
}

impl fmt::Debug for KnowledgeOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (e, &k) in self.table.iter().enumerate() {
            map.entry(
                &self.space.event_from_mask(e as u32).unwrap(),
                &self.space.event_from_mask(k).unwrap(),
            );
        }
        map.finish()
    }
}

impl Serialize for KnowledgeOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.images())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn ab() -> StateSpace {
        StateSpace::new(["a", "b"]).unwrap()
    }

    #[test]
    fn apply_identity_and_trivial() {
        let s = ab();
        let a = s.event_from_names(["a"]).unwrap();
        assert_eq!(KnowledgeOperator::identity(&s).apply(&a).unwrap(), a);
        assert!(KnowledgeOperator::trivial(&s)
            .apply(&s.omega())
            .unwrap()
            .is_empty());
        let other = StateSpace::new(["x", "y"]).unwrap();
        assert!(matches!(
            KnowledgeOperator::identity(&s).apply(&other.omega()),
            Err(Error::SpaceMismatch)
        ));
    }

    #[test]
    fn from_table_cases() {
        let s = StateSpace::new(["a"]).unwrap();
        let k = KnowledgeOperator::from_table(&s, &[s.empty(), s.omega()]).unwrap();
        assert_eq!(k, KnowledgeOperator::identity(&s));
        let k = KnowledgeOperator::from_table(&s, &[s.empty(), s.empty()]).unwrap();
        assert_eq!(k, KnowledgeOperator::trivial(&s));
        assert!(matches!(
            KnowledgeOperator::from_table(&s, &[s.empty()]),
            Err(Error::WrongArity {
                expected: 2,
                found: 1
            })
        ));
        let other = StateSpace::new(["z"]).unwrap();
        assert!(matches!(
            KnowledgeOperator::from_table(&s, &[s.empty(), other.omega()]),
            Err(Error::SpaceMismatch)
        ));
    }

    #[test]
    fn introspection_words() {
        let s = ab();
        let id = KnowledgeOperator::identity(&s);
        assert!(id.introspect(&s.omega(), "K~K").unwrap().is_empty());
        let a = s.event_from_names(["a"]).unwrap();
        let triv = KnowledgeOperator::trivial(&s);
        assert!(triv.introspect(&a, "~K").unwrap().is_omega());
        assert_eq!(id.introspect(&a, "").unwrap(), a);
        assert!(matches!(id.introspect(&a, "K~x"), Err(Error::BadWord(2))));
    }

    #[test]
    fn refinement_order() {
        let s = ab();
        let id = KnowledgeOperator::identity(&s);
        let triv = KnowledgeOperator::trivial(&s);
        assert!(triv.refined_by(&id).unwrap());
        assert!(!id.refined_by(&triv).unwrap());
    }
}
