//! Finite-model workbench for set-theoretic knowledge operators.
//!
//! A [`KnowledgeOperator`] maps events (subsets of a finite [`StateSpace`])
//! to events. The crate checks the usual epistemic axioms on such operators,
//! verifies the introspection claims that follow from Truth and
//! Monotonicity, enumerates every truthful monotone operator on small spaces,
//! evaluates a small formula language, and models staged learning.

pub mod dynamics;
pub mod enumeration;
pub mod error;
pub mod formula;
pub mod operator;
pub mod set;

pub use error::{Error, Result};
pub use formula::{parse_assertion, parse_expr, Assertion, Expr, Model, Stage};
pub use operator::{
    check_axiom, verify_claim, Axiom, AxiomReport, Claim, ClaimReport, KnowledgeOperator,
    NeighborhoodSystem,
};
pub use set::{Event, Relation, SetOp, StateSpace, Verdict};
