//! Textual formula language over events and knowledge operators.

mod ast;
mod parser;

use std::collections::BTreeMap;

pub use ast::{Assertion, BinaryRel, Expr, Stage, UnaryRel};
pub use parser::{is_reserved, parse_assertion, parse_expr};

use crate::error::{Error, Result};
use crate::operator::KnowledgeOperator;
use crate::set::{first_state, relate_masks, Event, Relation, StateSpace, Verdict};

/// A state space with named events and one or more (staged) operators.
#[derive(Debug, Clone)]
pub struct Model {
    space: StateSpace,
    events: BTreeMap<String, Event>,
    operators: BTreeMap<Stage, KnowledgeOperator>,
}

impl Model {
    pub fn new(space: &StateSpace) -> Self {
        Self {
            space: space.clone(),
            events: BTreeMap::new(),
            operators: BTreeMap::new(),
        }
    }

    /// Single-operator model answering bare `K`.
    pub fn with_operator(k: &KnowledgeOperator) -> Self {
        let mut m = Self::new(k.space());
        m.operators.insert(Stage::Default, k.clone());
        m
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn define_event(&mut self, name: &str, event: Event) -> Result<()> {
        if !parser::is_identifier(name) || is_reserved(name) || self.events.contains_key(name) {
            return Err(Error::InvalidName(name.to_owned()));
        }
        if event.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        self.events.insert(name.to_owned(), event);
        Ok(())
    }

    pub fn set_operator(&mut self, stage: Stage, k: KnowledgeOperator) -> Result<()> {
        if k.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        self.operators.insert(stage, k);
        Ok(())
    }

    pub fn events(&self) -> &BTreeMap<String, Event> {
        &self.events
    }

    pub fn operators(&self) -> &BTreeMap<Stage, KnowledgeOperator> {
        &self.operators
    }

    /// Bare `K` resolves to the default operator, or to the only operator
    /// of a single-stage model.
    pub fn operator(&self, stage: Stage) -> Result<&KnowledgeOperator> {
        let found = match stage {
            Stage::Default => self.operators.get(&Stage::Default).or_else(|| {
                if self.operators.len() == 1 {
                    self.operators.values().next()
                } else {
                    None
                }
            }),
            s => self.operators.get(&s),
        };
        found.ok_or_else(|| Error::UnknownStage(stage.to_string()))
    }

    fn eval_mask(&self, expr: &Expr) -> Result<u32> {
        let full = self.space.full_mask();
        Ok(match expr {
            Expr::Name(n) => self
                .events
                .get(n)
                .ok_or_else(|| Error::UnboundName(n.clone()))?
                .mask(),
            Expr::Omega => full,
            Expr::Empty => 0,
            Expr::Literal(labels) => self.space.event_from_names(labels)?.mask(),
            Expr::Know(stage, child) => {
                let k = self.operator(*stage)?;
                k.image(self.eval_mask(child)?)
            }
            Expr::Not(child) => full & !self.eval_mask(child)?,
            Expr::Diff(l, r) => self.eval_mask(l)? & !self.eval_mask(r)?,
            Expr::And(l, r) => self.eval_mask(l)? & self.eval_mask(r)?,
            Expr::Or(l, r) => self.eval_mask(l)? | self.eval_mask(r)?,
        })
    }

    pub fn eval_expr(&self, expr: &Expr) -> Result<Event> {
        self.space.event_from_mask(self.eval_mask(expr)?)
    }

    /// Truth value of an assertion; the witness is a state refuting it
    /// where one exists (`!<=` and `nonempty` have none).
    pub fn eval_assertion(&self, assertion: &Assertion) -> Result<Verdict> {
        Ok(match assertion {
            Assertion::Unary(rel, e) => {
                let m = self.eval_mask(e)?;
                match rel {
                    UnaryRel::Empty => match first_state(m) {
                        None => Verdict::pass(),
                        w => Verdict::fail(w),
                    },
                    UnaryRel::Nonempty if m != 0 => Verdict::pass(),
                    UnaryRel::Nonempty => Verdict::fail(None),
                }
            }
            Assertion::Binary(rel, l, r) => {
                let (l, r) = (self.eval_mask(l)?, self.eval_mask(r)?);
                match rel {
                    BinaryRel::Subseteq => relate_masks(l, r, Relation::Subseteq),
                    BinaryRel::Equals => relate_masks(l, r, Relation::Equals),
                    BinaryRel::ProperSubset => relate_masks(l, r, Relation::ProperSubset),
                    BinaryRel::Disjoint => relate_masks(l, r, Relation::Disjoint),
                    BinaryRel::NotSubseteq if l & !r != 0 => Verdict::pass(),
                    BinaryRel::NotSubseteq => Verdict::fail(None),
                }
            }
        })
    }
}
