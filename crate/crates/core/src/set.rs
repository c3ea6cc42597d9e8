//! Finite state spaces and the powerset algebra of events over them.
//!
//! Events are bitmasks over state indices, state 0 being the least
//! significant bit. The index of an event in the canonical enumeration is
//! its mask, so `∅` comes first and `Ω` last.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Hard ceiling on the number of states in a space.
pub const MAX_STATES: usize = 24;
/// Largest space whose events may be materialized as a sequence.
pub const MAX_ENUMERABLE_STATES: usize = 20;

/// Ordered, finite set of named states.
#[derive(Clone)]
pub struct StateSpace {
    labels: Arc<[String]>,
}

impl StateSpace {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyLabelList);
        }
        if labels.len() > MAX_STATES {
            return Err(Error::TooManyStates {
                requested: labels.len(),
                limit: MAX_STATES,
            });
        }
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::EmptyLabel(i));
            }
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self {
            labels: labels.into(),
        })
    }

    /// A space of `n` states labelled `a`, `b`, `c`, ...
    pub fn standard(n: usize) -> Result<Self> {
        if n > MAX_STATES {
            return Err(Error::TooManyStates {
                requested: n,
                limit: MAX_STATES,
            });
        }
        Self::new((0..n).map(|i| char::from(b'a' + i as u8).to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, state: usize) -> &str {
        &self.labels[state]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Mask with every state set.
    pub fn full_mask(&self) -> u32 {
        mask_of_len(self.len())
    }

    /// Number of events, `2^n`.
    pub fn event_count(&self) -> usize {
        1 << self.len()
    }

    pub fn empty(&self) -> Event {
        Event {
            space: self.clone(),
            bits: 0,
        }
    }

    pub fn omega(&self) -> Event {
        Event {
            space: self.clone(),
            bits: self.full_mask(),
        }
    }

    pub fn singleton(&self, state: usize) -> Event {
        assert!(state < self.len(), "state index {state} out of range");
        Event {
            space: self.clone(),
            bits: 1 << state,
        }
    }

    pub fn event_from_mask(&self, bits: u32) -> Result<Event> {
        if bits & !self.full_mask() != 0 {
            return Err(Error::SpaceMismatch);
        }
        Ok(Event {
            space: self.clone(),
            bits,
        })
    }

    pub fn event_from_names<I, S>(&self, labels: I) -> Result<Event>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut bits = 0;
        for label in labels {
            let label = label.as_ref();
            let i = self
                .index_of(label)
                .ok_or_else(|| Error::UnknownLabel(label.to_owned()))?;
            bits |= 1 << i;
        }
        Ok(Event {
            space: self.clone(),
            bits,
        })
    }

    /// Parses an event literal: `{a,b}`, `{}`, `Omega` or `Empty`.
    pub fn parse_event(&self, text: &str) -> Result<Event> {
        let text = text.trim();
        match text {
            "Omega" => return Ok(self.omega()),
            "Empty" => return Ok(self.empty()),
            _ => {}
        }
        let inner = text
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or(Error::ParseError {
                position: 0,
                expected: vec!["'{'".into(), "'Omega'".into(), "'Empty'".into()],
            })?;
        if inner.trim().is_empty() {
            return Ok(self.empty());
        }
        self.event_from_names(inner.split(',').map(str::trim))
    }

    /// Every event in canonical order (binary encoding, state 0 least
    /// significant).
    pub fn events(&self) -> Result<Vec<Event>> {
        if self.len() > MAX_ENUMERABLE_STATES {
            return Err(Error::TooManyStates {
                requested: self.len(),
                limit: MAX_ENUMERABLE_STATES,
            });
        }
        Ok((0..=self.full_mask())
            .map(|bits| Event {
                space: self.clone(),
                bits,
            })
            .collect())
    }
}

impl PartialEq for StateSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

impl Eq for StateSpace {}

impl fmt::Debug for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("StateSpace").field(&self.labels).finish()
    }
}

pub(crate) fn mask_of_len(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Index of the lowest set bit.
pub(crate) fn first_state(bits: u32) -> Option<usize> {
    (bits != 0).then(|| bits.trailing_zeros() as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetOp {
    Union,
    Intersect,
    Difference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Subseteq,
    ProperSubset,
    Equals,
    Disjoint,
}

/// Verdict of a relation between two events. The witness, when present, is
/// a state that refutes the relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<usize>,
}

impl Verdict {
    pub fn pass() -> Self {
        Self {
            holds: true,
            witness: None,
        }
    }

    pub fn fail(witness: Option<usize>) -> Self {
        Self {
            holds: false,
            witness,
        }
    }
}

/// Mask-level relation check shared by events and the formula evaluator.
pub(crate) fn relate_masks(lhs: u32, rhs: u32, rel: Relation) -> Verdict {
    match rel {
        Relation::Subseteq => match first_state(lhs & !rhs) {
            None => Verdict::pass(),
            w => Verdict::fail(w),
        },
        Relation::ProperSubset => {
            if lhs & !rhs != 0 {
                Verdict::fail(first_state(lhs & !rhs))
            } else if lhs == rhs {
                Verdict::fail(None)
            } else {
                Verdict::pass()
            }
        }
        Relation::Equals => match first_state(lhs ^ rhs) {
            None => Verdict::pass(),
            w => Verdict::fail(w),
        },
        Relation::Disjoint => match first_state(lhs & rhs) {
            None => Verdict::pass(),
            w => Verdict::fail(w),
        },
    }
}

/// A subset of a state space.
#[derive(Clone, PartialEq, Eq)]
pub struct Event {
    space: StateSpace,
    bits: u32,
}

impl Event {
    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    /// Bit `i` is set when state `i` is a member. Also the event's index in
    /// the canonical order.
    pub fn mask(&self) -> u32 {
        self.bits
    }

    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn contains(&self, state: usize) -> bool {
        state < 32 && self.bits & (1 << state) != 0
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_omega(&self) -> bool {
        self.bits == self.space.full_mask()
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.space.len()).filter(move |&i| self.contains(i))
    }

    pub fn labels(&self) -> Vec<&str> {
        self.members().map(|i| self.space.label(i)).collect()
    }

    pub(crate) fn with_bits(&self, bits: u32) -> Event {
        Event {
            space: self.space.clone(),
            bits,
        }
    }

    fn same_space(&self, other: &Event) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn complement(&self) -> Event {
        self.with_bits(self.space.full_mask() & !self.bits)
    }

    pub fn combine(&self, other: &Event, op: SetOp) -> Result<Event> {
        self.same_space(other)?;
        let bits = match op {
            SetOp::Union => self.bits | other.bits,
            SetOp::Intersect => self.bits & other.bits,
            SetOp::Difference => self.bits & !other.bits,
        };
        Ok(self.with_bits(bits))
    }

    pub fn union(&self, other: &Event) -> Result<Event> {
        self.combine(other, SetOp::Union)
    }

    pub fn intersect(&self, other: &Event) -> Result<Event> {
        self.combine(other, SetOp::Intersect)
    }

    pub fn difference(&self, other: &Event) -> Result<Event> {
        self.combine(other, SetOp::Difference)
    }

    pub fn relate(&self, other: &Event, rel: Relation) -> Result<Verdict> {
        self.same_space(other)?;
        Ok(relate_masks(self.bits, other.bits, rel))
    }

    pub fn is_subset(&self, other: &Event) -> Result<bool> {
        Ok(self.relate(other, Relation::Subseteq)?.holds)
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels().join(","))
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Event {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.labels())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> StateSpace {
        StateSpace::new(["a", "b"]).unwrap()
    }

    #[test]
    fn make_space_errors() {
        assert_eq!(ab().len(), 2);
        assert!(matches!(
            StateSpace::new(["a", "a"]),
            Err(Error::DuplicateLabel(l)) if l == "a"
        ));
        assert!(matches!(
            StateSpace::new(Vec::<String>::new()),
            Err(Error::EmptyLabelList)
        ));
        assert!(matches!(
            StateSpace::new(["a", ""]),
            Err(Error::EmptyLabel(1))
        ));
        let labels: Vec<String> = (0..25).map(|i| format!("s{i}")).collect();
        assert!(matches!(
            StateSpace::new(labels),
            Err(Error::TooManyStates { requested: 25, .. })
        ));
        assert_eq!(StateSpace::standard(24).unwrap().label(23), "x");
    }

    #[test]
    fn events_from_names() {
        let s = ab();
        assert_eq!(s.event_from_names(["a"]).unwrap().mask(), 0b01);
        assert!(s.event_from_names::<_, &str>([]).unwrap().is_empty());
        assert_eq!(s.event_from_names(["a", "a"]).unwrap().len(), 1);
        assert!(matches!(
            s.event_from_names(["c"]),
            Err(Error::UnknownLabel(l)) if l == "c"
        ));
    }

    #[test]
    fn combine_and_complement() {
        let s = ab();
        let a = s.event_from_names(["a"]).unwrap();
        let b = s.event_from_names(["b"]).unwrap();
        assert_eq!(a.union(&b).unwrap(), s.omega());
        assert_eq!(s.omega().difference(&a).unwrap(), b);
        assert!(a.intersect(&b).unwrap().is_empty());
        assert_eq!(a.complement(), b);
        assert_eq!(s.omega().complement(), s.empty());
        assert_eq!(s.empty().complement(), s.omega());

        let other = StateSpace::new(["x", "y"]).unwrap();
        assert!(matches!(a.union(&other.omega()), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn spaces_with_equal_labels_are_compatible() {
        let a = ab().event_from_names(["a"]).unwrap();
        let b = ab().event_from_names(["b"]).unwrap();
        assert!(a.union(&b).unwrap().is_omega());
    }

    #[test]
    fn relations_and_witnesses() {
        let s = ab();
        let a = s.event_from_names(["a"]).unwrap();
        let b = s.event_from_names(["b"]).unwrap();
        let o = s.omega();
        assert_eq!(a.relate(&o, Relation::Subseteq).unwrap(), Verdict::pass());
        assert_eq!(
            o.relate(&a, Relation::Subseteq).unwrap(),
            Verdict::fail(Some(1))
        );
        assert!(a.relate(&b, Relation::Disjoint).unwrap().holds);
        assert!(a.relate(&o, Relation::ProperSubset).unwrap().holds);
        assert!(!o.relate(&o, Relation::ProperSubset).unwrap().holds);
        assert!(!a.relate(&b, Relation::Equals).unwrap().holds);
    }

    #[test]
    fn canonical_order() {
        let s = ab();
        let events = s.events().unwrap();
        let shown: Vec<String> = events.iter().map(|e| e.to_string()).collect();
        assert_eq!(shown, ["{}", "{a}", "{b}", "{a,b}"]);
        assert_eq!(StateSpace::new(["a"]).unwrap().events().unwrap().len(), 2);

        let abc = StateSpace::new(["a", "b", "c"]).unwrap();
        let events = abc.events().unwrap();
        assert_eq!(events.len(), 8);
        let ac = abc.event_from_names(["a", "c"]).unwrap();
        assert_eq!(events.iter().position(|e| *e == ac), Some(5));

        let big = StateSpace::standard(21).unwrap();
        assert!(matches!(big.events(), Err(Error::TooManyStates { .. })));
    }

    #[test]
    fn literals() {
        let s = ab();
        assert_eq!(s.parse_event("{a, b}").unwrap(), s.omega());
        assert_eq!(s.parse_event("{}").unwrap(), s.empty());
        assert_eq!(s.parse_event("Omega").unwrap(), s.omega());
        assert_eq!(s.parse_event("{b}").unwrap().to_string(), "{b}");
        assert!(s.parse_event("a").is_err());
    }

    #[test]
    fn algebra_laws_exhaustive() {
        for n in 1..=3 {
            let s = StateSpace::standard(n).unwrap();
            let events = s.events().unwrap();
            assert_eq!(events.len(), 1 << n);
            for e in &events {
                assert_eq!(e.complement().complement(), *e);
                assert!(e.union(&e.complement()).unwrap().is_omega());
                assert!(e.intersect(&e.complement()).unwrap().is_empty());
                assert!(events.contains(&e.complement()));
                for f in &events {
                    assert_eq!(
                        e.difference(f).unwrap(),
                        e.intersect(&f.complement()).unwrap()
                    );
                    assert!(events.contains(&e.union(f).unwrap()));
                }
            }
        }
    }
}
