//! Verifiers for the static claims about truthful, monotone operators.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::axioms::{satisfies, Axiom, DEFAULT_COUNTEREXAMPLE_CAP};
use super::{KnowledgeOperator, StateRef};
use crate::error::{Error, Result};
use crate::set::{first_state, Event};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Claim {
    /// `¬KΩ = Ω \ KΩ`.
    Remark1,
    /// `¬KE ⊆ E` only for `E = Ω`.
    Theorem2,
    /// `K¬KΩ = ∅`.
    Theorem3,
    /// The two inclusion chains for a given `E ≠ Ω`.
    Eq1,
    /// `KE ⊆ E ∩ KΩ`.
    KBound,
    /// `¬KΩ ⊆ ¬KE`.
    NegKOmegaMin,
    /// `K(KΩ ∪ ¬KΩ) = KΩ`.
    IntrospectionSame,
    /// `KKΩ ⊆ KΩ`.
    KKRefines,
}

impl Claim {
    pub const ALL: [Claim; 8] = [
        Claim::Remark1,
        Claim::Theorem2,
        Claim::Theorem3,
        Claim::Eq1,
        Claim::KBound,
        Claim::NegKOmegaMin,
        Claim::IntrospectionSame,
        Claim::KKRefines,
    ];

    /// Hypotheses under which the claim is a theorem.
    pub fn requires(self) -> &'static [Axiom] {
        match self {
            Claim::Remark1 | Claim::IntrospectionSame => &[],
            Claim::Theorem2 | Claim::KKRefines => &[Axiom::Truth],
            Claim::NegKOmegaMin => &[Axiom::Monotonicity],
            Claim::Theorem3 | Claim::Eq1 | Claim::KBound => &[Axiom::Truth, Axiom::Monotonicity],
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Claim::Remark1 => "remark1",
            Claim::Theorem2 => "thm2",
            Claim::Theorem3 => "thm3",
            Claim::Eq1 => "eq1",
            Claim::KBound => "kbound",
            Claim::NegKOmegaMin => "negkomega",
            Claim::IntrospectionSame => "introspection",
            Claim::KKRefines => "kk",
        }
    }

    /// Whether the claim quantifies over events when none is supplied.
    fn quantified(self) -> bool {
        matches!(self, Claim::Theorem2 | Claim::KBound | Claim::NegKOmegaMin)
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Claim {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        Ok(match key.as_str() {
            "remark1" | "r1" => Claim::Remark1,
            "thm2" | "theorem2" | "t2" => Claim::Theorem2,
            "thm3" | "theorem3" | "t3" => Claim::Theorem3,
            "eq1" => Claim::Eq1,
            "kbound" => Claim::KBound,
            "negkomega" | "negkomegamin" => Claim::NegKOmegaMin,
            "introspection" | "introspectionsame" => Claim::IntrospectionSame,
            "kk" | "kkrefines" => Claim::KKRefines,
            _ => return Err(format!("unknown claim {s:?}")),
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ClaimOptions {
    /// Evaluate even when the claim's hypotheses fail.
    pub forced: bool,
    pub max_counterexamples: usize,
}

impl Default for ClaimOptions {
    fn default() -> Self {
        Self {
            forced: false,
            max_counterexamples: DEFAULT_COUNTEREXAMPLE_CAP,
        }
    }
}

impl ClaimOptions {
    pub fn forced() -> Self {
        Self {
            forced: true,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub name: String,
    pub event: Event,
}

/// A failed condition of a claim. `event` is the instance of `E` it failed
/// for, when the claim is stated per event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimFailure {
    pub condition: String,
    pub event: Option<Event>,
    pub state: Option<StateRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimReport {
    pub claim: Claim,
    /// All hypotheses of the claim hold for the operator.
    pub applicable: bool,
    pub missing_axioms: Vec<Axiom>,
    /// False when the claim was skipped because it is not applicable.
    pub evaluated: bool,
    pub holds: bool,
    pub event: Option<Event>,
    pub trace: Vec<TraceEntry>,
    pub failures: Vec<ClaimFailure>,
}

pub fn verify_claim(
    k: &KnowledgeOperator,
    claim: Claim,
    event: Option<&Event>,
) -> Result<ClaimReport> {
    verify_claim_with(k, claim, event, &ClaimOptions::default())
}

pub fn verify_claim_with(
    k: &KnowledgeOperator,
    claim: Claim,
    event: Option<&Event>,
    opts: &ClaimOptions,
) -> Result<ClaimReport> {
    if let Some(e) = event {
        if e.space() != k.space() {
            return Err(Error::SpaceMismatch);
        }
    }
    if claim == Claim::Eq1 {
        match event {
            None => return Err(Error::MissingParameter("Eq1")),
            Some(e) if e.is_omega() => return Err(Error::EIsOmega),
            _ => {}
        }
    }
    let missing_axioms: Vec<Axiom> = claim
        .requires()
        .iter()
        .copied()
        .filter(|&a| !satisfies(k, a))
        .collect();
    let applicable = missing_axioms.is_empty();
    let mut report = ClaimReport {
        claim,
        applicable,
        missing_axioms,
        evaluated: false,
        holds: false,
        event: event.cloned(),
        trace: Vec::new(),
        failures: Vec::new(),
    };
    if !applicable && !opts.forced {
        return Ok(report);
    }
    let mut eval = Evaluator {
        k,
        trace: Vec::new(),
        failures: Vec::new(),
        violations: 0,
        cap: opts.max_counterexamples.max(1),
    };
    eval.run(claim, event.map(Event::mask));
    report.evaluated = true;
    report.holds = eval.violations == 0;
    report.trace = eval.trace;
    report.failures = eval.failures;
    Ok(report)
}

struct Evaluator<'a> {
    k: &'a KnowledgeOperator,
    trace: Vec<TraceEntry>,
    failures: Vec<ClaimFailure>,
    violations: usize,
    cap: usize,
}

impl Evaluator<'_> {
    fn ev(&self, m: u32) -> Event {
        self.k.space().event_from_mask(m).expect("mask in range")
    }

    fn record(&mut self, name: &str, m: u32) -> u32 {
        let event = self.ev(m);
        self.trace.push(TraceEntry {
            name: name.to_owned(),
            event,
        });
        m
    }

    fn fail(&mut self, condition: &str, event: Option<u32>, state: Option<usize>) {
        self.violations += 1;
        if self.failures.len() < self.cap {
            let space = self.k.space();
            self.failures.push(ClaimFailure {
                condition: condition.to_owned(),
                event: event.map(|m| self.ev(m)),
                state: state.map(|i| StateRef::new(space, i)),
            });
        }
    }

    /// Records a failure unless `lhs ⊆ rhs`.
    fn subset(&mut self, condition: &str, event: Option<u32>, lhs: u32, rhs: u32) {
        if lhs & !rhs != 0 {
            self.fail(condition, event, first_state(lhs & !rhs));
        }
    }

    fn equal(&mut self, condition: &str, event: Option<u32>, lhs: u32, rhs: u32) {
        if lhs != rhs {
            self.fail(condition, event, first_state(lhs ^ rhs));
        }
    }

    fn run(&mut self, claim: Claim, event: Option<u32>) {
        let k = self.k;
        let full = k.omega_mask();
        let not = |m: u32| full & !m;
        let k_omega = k.image(full);

        if claim.quantified() {
            match event {
                Some(e) => self.run_at(claim, e, true),
                None => {
                    self.record("K Omega", k_omega);
                    self.record("~K Omega", not(k_omega));
                    for e in 0..=full {
                        self.run_at(claim, e, false);
                    }
                }
            }
            return;
        }

        match claim {
            Claim::Remark1 => {
                let k_omega = self.record("K Omega", k_omega);
                let complement = self.record("~K Omega", not(k_omega));
                let relative = self.record("Omega \\ K Omega", full & !k_omega);
                self.equal("~K Omega == Omega \\ K Omega", None, complement, relative);
            }
            Claim::Theorem3 => {
                let k_omega = self.record("K Omega", k_omega);
                let unknown = self.record("~K Omega", not(k_omega));
                let known_unknown = self.record("K ~K Omega", k.image(unknown));
                if known_unknown != 0 {
                    self.fail("empty(K ~K Omega)", None, first_state(known_unknown));
                }
            }
            Claim::Eq1 => {
                let e = event.expect("checked by caller");
                let not_e = self.record("~E", not(e));
                let ke = self.record("K E", k.image(e));
                let not_ke = self.record("~K E", not(ke));
                let k_not_e = self.record("K ~E", k.image(not_e));
                let k_not_ke = self.record("K ~K E", k.image(not_ke));
                let at = Some(e);
                self.subset("K ~E <= ~E", at, k_not_e, not_e);
                self.subset("~E <= ~K E", at, not_e, not_ke);
                if not_ke & !e == 0 {
                    self.fail("~K E !<= E", at, None);
                }
                self.subset("K ~E <= K ~K E", at, k_not_e, k_not_ke);
                self.subset("K ~K E <= ~K E", at, k_not_ke, not_ke);
            }
            Claim::IntrospectionSame => {
                let k_omega = self.record("K Omega", k_omega);
                let not_k_omega = self.record("~K Omega", not(k_omega));
                let tautology = self.record("K Omega | ~K Omega", k_omega | not_k_omega);
                let image = self.record("K (K Omega | ~K Omega)", k.image(tautology));
                self.equal("K (K Omega | ~K Omega) == K Omega", None, image, k_omega);
            }
            Claim::KKRefines => {
                let k_omega = self.record("K Omega", k_omega);
                let kk_omega = self.record("K K Omega", k.image(k_omega));
                self.subset("K K Omega <= K Omega", None, kk_omega, k_omega);
            }
            Claim::Theorem2 | Claim::KBound | Claim::NegKOmegaMin => unreachable!(),
        }
    }

    /// Per-event body of the quantified claims.
    fn run_at(&mut self, claim: Claim, e: u32, traced: bool) {
        let k = self.k;
        let full = k.omega_mask();
        let ke = k.image(e);
        let k_omega = k.image(full);
        let at = Some(e);
        match claim {
            Claim::Theorem2 => {
                if traced {
                    self.record("K E", ke);
                    self.record("~K E", full & !ke);
                }
                // ¬KE ⊆ E must force E = Ω.
                if (full & !ke) & !e == 0 && e != full {
                    self.fail("~K E <= E implies E == Omega", at, first_state(full & !e));
                }
            }
            Claim::KBound => {
                if traced {
                    self.record("K E", ke);
                    self.record("K Omega", k_omega);
                    self.record("E & K Omega", e & k_omega);
                }
                self.subset("K E <= E & K Omega", at, ke, e & k_omega);
            }
            Claim::NegKOmegaMin => {
                if traced {
                    self.record("~K Omega", full & !k_omega);
                    self.record("~K E", full & !ke);
                }
                self.subset("~K Omega <= ~K E", at, full & !k_omega, full & !ke);
            }
            _ => unreachable!(),
        }
    }
}
