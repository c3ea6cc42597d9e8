//! Staged knowledge: refinement-ordered operator sequences and learning.
//!
//! Stage `s + 1` refines stage `s` when `K_s E ⊆ K_{s+1} E` for every event.
//! [`learn`] builds the least truthful monotone refinement of an operator
//! that knows the given facts.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{parse_assertion, parse_expr, Model, Stage};
use crate::operator::{check_axiom, satisfies, Axiom, KnowledgeOperator, StateRef, TraceEntry};
use crate::set::{first_state, Event};

/// After learning, the agent knows at least `learned` of `event`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LearningFact {
    event: Event,
    learned: Event,
}

impl LearningFact {
    pub fn new(event: Event, learned: Event) -> Result<Self> {
        if event.space() != learned.space() {
            return Err(Error::SpaceMismatch);
        }
        if learned.is_empty() {
            return Err(Error::InvalidFact("learned knowledge is empty"));
        }
        if !learned.is_subset(&event)? {
            return Err(Error::InvalidFact(
                "learned knowledge is not contained in the event",
            ));
        }
        Ok(Self { event, learned })
    }

    /// Learning `event` in full.
    pub fn whole(event: Event) -> Result<Self> {
        Self::new(event.clone(), event)
    }

    pub fn event(&self) -> &Event {
        &self.event
    }

    pub fn learned(&self) -> &Event {
        &self.learned
    }
}

fn require_tm(k: &KnowledgeOperator) -> Result<()> {
    for axiom in [Axiom::Truth, Axiom::Monotonicity] {
        let report = check_axiom(k, axiom);
        if !report.holds {
            return Err(Error::AxiomViolation(Box::new(report)));
        }
    }
    Ok(())
}

/// `K1 F = K0 F ∪ ⋃ {A : (E, A) a fact with E ⊆ F}`.
pub fn learn(k0: &KnowledgeOperator, facts: &[LearningFact]) -> Result<KnowledgeOperator> {
    require_tm(k0)?;
    if facts.iter().any(|f| f.event.space() != k0.space()) {
        return Err(Error::SpaceMismatch);
    }
    let table = k0
        .table()
        .iter()
        .enumerate()
        .map(|(f, &k)| {
            facts
                .iter()
                .filter(|fact| fact.event.mask() & !(f as u32) == 0)
                .fold(k, |acc, fact| acc | fact.learned.mask())
        })
        .collect();
    KnowledgeOperator::from_masks(k0.space(), table)
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementViolation {
    /// The pair of stages `(stage, stage + 1)` that fails.
    pub stage: usize,
    pub event: Event,
    pub state: StateRef,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementReport {
    pub valid: bool,
    pub violations: usize,
    pub counterexamples: Vec<RefinementViolation>,
}

pub fn validate_refinement(stages: &[KnowledgeOperator]) -> Result<RefinementReport> {
    validate_refinement_capped(stages, crate::operator::DEFAULT_COUNTEREXAMPLE_CAP)
}

pub fn validate_refinement_capped(
    stages: &[KnowledgeOperator],
    cap: usize,
) -> Result<RefinementReport> {
    if stages.len() < 2 {
        return Err(Error::TooFewStages);
    }
    let space = stages[0].space();
    if stages.iter().any(|k| k.space() != space) {
        return Err(Error::SpaceMismatch);
    }
    let mut violations = 0;
    let mut counterexamples = Vec::new();
    for (s, pair) in stages.windows(2).enumerate() {
        for (e, (&before, &after)) in pair[0].table().iter().zip(pair[1].table()).enumerate() {
            if let Some(w) = first_state(before & !after) {
                violations += 1;
                if counterexamples.len() < cap.max(1) {
                    counterexamples.push(RefinementViolation {
                        stage: s,
                        event: space.event_from_mask(e as u32)?,
                        state: StateRef::new(space, w),
                    });
                }
            }
        }
    }
    Ok(RefinementReport {
        valid: violations == 0,
        violations,
        counterexamples,
    })
}

/// A sequence of stage operators together with the facts learned at each
/// transition.
#[derive(Debug, Clone)]
pub struct LearningScenario {
    stages: Vec<KnowledgeOperator>,
    facts: Vec<Vec<LearningFact>>,
}

impl LearningScenario {
    /// Folds [`learn`] over the transitions, starting from `k0`.
    pub fn from_learning(
        k0: KnowledgeOperator,
        transitions: Vec<Vec<LearningFact>>,
    ) -> Result<Self> {
        if transitions.len() + 1 > 10 {
            return Err(Error::UnknownStage(format!("K{}", transitions.len())));
        }
        let mut stages = vec![k0];
        for facts in &transitions {
            let next = learn(stages.last().expect("nonempty"), facts)?;
            stages.push(next);
        }
        Ok(Self {
            stages,
            facts: transitions,
        })
    }

    /// Stages given directly, without recorded facts.
    pub fn from_stages(stages: Vec<KnowledgeOperator>) -> Result<Self> {
        if stages.len() < 2 {
            return Err(Error::TooFewStages);
        }
        if stages.len() > 10 {
            return Err(Error::UnknownStage(format!("K{}", stages.len() - 1)));
        }
        if stages.iter().any(|k| k.space() != stages[0].space()) {
            return Err(Error::SpaceMismatch);
        }
        let facts = vec![Vec::new(); stages.len() - 1];
        Ok(Self { stages, facts })
    }

    pub fn stages(&self) -> &[KnowledgeOperator] {
        &self.stages
    }

    /// Facts learned between stage `s` and `s + 1`.
    pub fn facts(&self, s: usize) -> &[LearningFact] {
        &self.facts[s]
    }

    pub fn validate(&self) -> Result<RefinementReport> {
        validate_refinement(&self.stages)
    }

    /// A model binding the stages to `K0`, `K1`, ...
    pub fn model(&self) -> Model {
        let mut model = Model::new(self.stages[0].space());
        for (i, k) in self.stages.iter().enumerate() {
            model
                .set_operator(Stage::Index(i as u8), k.clone())
                .expect("stages share the space");
        }
        model
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SubClaim {
    pub statement: &'static str,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LearningReport {
    pub event: Event,
    pub applicable: bool,
    pub not_applicable_because: Vec<String>,
    /// Applicable and every sub-claim holds.
    pub holds: bool,
    pub claims: Vec<SubClaim>,
    pub trace: Vec<TraceEntry>,
}

/// Derivation steps, in order, for learning a previously unknown `E`.
const LEARNING_CLAIMS: &[&str] = &[
    "K0 E <= E & K0 Omega",
    "K0 E == {}",
    "~K0 E == Omega",
    "E <= ~K0 Omega",
    "K0 E <= K1 E",
    "K1 E <= K1 ~K0 Omega",
    "nonempty(K1 ~K0 Omega)",
    "K1 ~K0 Omega <= K1 Omega & ~K0 Omega",
    "empty(K1 ~K1 Omega)",
    "K1 K1 Omega <= K1 Omega",
    "K1 (K1 Omega | ~K1 Omega) == K1 Omega",
];

const LEARNING_TRACE: &[&str] = &[
    "E & K0 Omega",
    "K0 E",
    "K1 E",
    "K0 Omega",
    "~K0 Omega",
    "K1 ~K0 Omega",
    "K1 Omega",
    "~K1 Omega",
    "K1 ~K1 Omega",
];

/// Checks the consequences of learning an event `E` unknown at stage 0.
///
/// Applicable when both operators are truthful and monotone,
/// `E ∩ K0Ω = ∅` and `K1E ≠ ∅`; the sub-claims are evaluated either way.
pub fn verify_learning_claims(
    k0: &KnowledgeOperator,
    k1: &KnowledgeOperator,
    event: &Event,
) -> Result<LearningReport> {
    if k0.space() != k1.space() || event.space() != k0.space() {
        return Err(Error::SpaceMismatch);
    }
    let mut model = Model::new(k0.space());
    model.set_operator(Stage::Index(0), k0.clone())?;
    model.set_operator(Stage::Index(1), k1.clone())?;
    model.define_event("E", event.clone())?;

    let mut reasons = Vec::new();
    for (name, k) in [("K0", k0), ("K1", k1)] {
        for axiom in [Axiom::Truth, Axiom::Monotonicity] {
            if !satisfies(k, axiom) {
                reasons.push(format!("{name} violates {axiom}"));
            }
        }
    }
    let eval = |text: &str| -> Event {
        model
            .eval_expr(&parse_expr(text).expect("fixed expression"))
            .expect("names are bound")
    };
    if !eval("E & K0 Omega").is_empty() {
        reasons.push("E & K0 Omega is nonempty".into());
    }
    if eval("K1 E").is_empty() {
        reasons.push("K1 E is empty".into());
    }

    let claims: Vec<SubClaim> = LEARNING_CLAIMS
        .iter()
        .map(|&statement| {
            let a = parse_assertion(statement).expect("fixed assertion");
            SubClaim {
                statement,
                holds: model.eval_assertion(&a).expect("names are bound").holds,
            }
        })
        .collect();
    let trace = LEARNING_TRACE
        .iter()
        .map(|&name| TraceEntry {
            name: name.to_owned(),
            event: eval(name),
        })
        .collect();
    let applicable = reasons.is_empty();
    Ok(LearningReport {
        event: event.clone(),
        applicable,
        not_applicable_because: reasons,
        holds: applicable && claims.iter().all(|c| c.holds),
        claims,
        trace,
    })
}

/// Concrete scenarios used in tests and documentation.
pub mod fixtures {
    use super::*;
    use crate::operator::NeighborhoodSystem;
    use crate::set::StateSpace;

    /// Three states, nothing known at stage 0, then `{a}` is learned in full.
    /// Returns the scenario and the learned event.
    pub fn learn_a() -> (LearningScenario, Event) {
        let space = StateSpace::new(["a", "b", "c"]).expect("valid labels");
        let a = space.event_from_names(["a"]).expect("known label");
        let fact = LearningFact::whole(a.clone()).expect("nonempty");
        let scenario =
            LearningScenario::from_learning(KnowledgeOperator::trivial(&space), vec![vec![fact]])
                .expect("trivial operator is truthful and monotone");
        (scenario, a)
    }

    /// Ten states `a..j`. Stage 0 knows exactly `a..e` (each state knows
    /// itself); learning `f`, `g`, `h` yields a stage 1 that knows `a..h`.
    /// So `K1 ~K0 Ω = {f,g,h}` sits inside `K1 Ω ∩ ~K0 Ω`, while `i`, `j`
    /// stay unknown and `K1 ~K1 Ω = ∅`. Returns the scenario and `{f,g,h}`.
    pub fn staged_regions() -> (LearningScenario, Event) {
        let space = StateSpace::standard(10).expect("ten states");
        let lists: Vec<Vec<Event>> = (0..10)
            .map(|w| {
                if w < 5 {
                    vec![space.singleton(w)]
                } else {
                    vec![]
                }
            })
            .collect();
        let k0 = NeighborhoodSystem::new(&space, lists)
            .expect("singletons contain their state")
            .to_operator();
        let facts = (5..8)
            .map(|w| LearningFact::whole(space.singleton(w)).expect("nonempty"))
            .collect();
        let learned = space
            .event_from_names(["f", "g", "h"])
            .expect("known labels");
        let scenario = LearningScenario::from_learning(k0, vec![facts]).expect("valid stage 0");
        (scenario, learned)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::StateSpace;

    fn abc() -> StateSpace {
        StateSpace::new(["a", "b", "c"]).unwrap()
    }

    fn trace<'r>(r: &'r LearningReport, name: &str) -> &'r Event {
        &r.trace.iter().find(|t| t.name == name).unwrap().event
    }

    #[test]
    fn refinement_cases() {
        let s = abc();
        let id = KnowledgeOperator::identity(&s);
        let triv = KnowledgeOperator::trivial(&s);
        assert!(
            validate_refinement(&[triv.clone(), id.clone()])
                .unwrap()
                .valid
        );
        let r = validate_refinement(&[id.clone(), triv]).unwrap();
        assert!(!r.valid);
        assert!(!r.counterexamples[0].event.is_empty());
        assert!(matches!(
            validate_refinement(&[id]),
            Err(Error::TooFewStages)
        ));
    }

    #[test]
    fn learn_from_trivial() {
        let s = abc();
        let a = s.event_from_names(["a"]).unwrap();
        let k1 = learn(
            &KnowledgeOperator::trivial(&s),
            &[LearningFact::new(a.clone(), a.clone()).unwrap()],
        )
        .unwrap();
        for e in s.events().unwrap() {
            let expected = if e.contains(0) { a.clone() } else { s.empty() };
            assert_eq!(k1.apply(&e).unwrap(), expected, "at {e}");
        }
    }

    #[test]
    fn learn_above_identity_is_identity() {
        let s = abc();
        let id = KnowledgeOperator::identity(&s);
        let e = s.event_from_names(["a", "b"]).unwrap();
        let fact = LearningFact::new(e, s.event_from_names(["b"]).unwrap()).unwrap();
        assert_eq!(learn(&id, &[fact]).unwrap(), id);
    }

    #[test]
    fn invalid_facts() {
        let s = abc();
        let a = s.event_from_names(["a"]).unwrap();
        assert!(matches!(
            LearningFact::new(a.clone(), s.empty()),
            Err(Error::InvalidFact(_))
        ));
        assert!(matches!(
            LearningFact::new(a, s.omega()),
            Err(Error::InvalidFact(_))
        ));
    }

    #[test]
    fn learn_rejects_non_monotone_stage0() {
        let s = StateSpace::new(["a", "b"]).unwrap();
        let k0 = KnowledgeOperator::from_masks(&s, vec![0, 0, 2, 1]).unwrap();
        let fact = LearningFact::whole(s.omega()).unwrap();
        match learn(&k0, &[fact]) {
            Err(Error::AxiomViolation(r)) => assert_eq!(r.axiom, Axiom::Monotonicity),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn three_state_fixture() {
        let (scenario, a) = fixtures::learn_a();
        assert!(scenario.validate().unwrap().valid);
        let [k0, k1] = scenario.stages() else {
            panic!("two stages")
        };
        let r = verify_learning_claims(k0, k1, &a).unwrap();
        assert!(r.applicable, "{:?}", r.not_applicable_because);
        assert!(r.holds, "{:?}", r.claims);
        assert!(trace(&r, "~K0 Omega").is_omega());
        assert_eq!(trace(&r, "K1 ~K0 Omega"), &a);
        assert_eq!(trace(&r, "K1 Omega"), &a);
        assert_eq!(trace(&r, "~K1 Omega").labels(), ["b", "c"]);
        assert!(trace(&r, "K1 ~K1 Omega").is_empty());
    }

    #[test]
    fn identity_stages_are_not_applicable() {
        let s = abc();
        let id = KnowledgeOperator::identity(&s);
        let r = verify_learning_claims(&id, &id, &s.omega()).unwrap();
        assert!(!r.applicable);
        assert!(!r.holds);
        assert!(r.not_applicable_because[0].contains("K0 Omega"));
    }

    #[test]
    fn staged_regions_fixture() {
        let (scenario, learned) = fixtures::staged_regions();
        assert!(scenario.validate().unwrap().valid);
        let k0 = &scenario.stages()[0];
        let k1 = &scenario.stages()[1];
        let r = verify_learning_claims(k0, k1, &learned).unwrap();
        assert!(r.holds, "{:?} {:?}", r.not_applicable_because, r.claims);
        assert_eq!(trace(&r, "K0 Omega").labels(), ["a", "b", "c", "d", "e"]);
        assert_eq!(
            trace(&r, "K1 Omega").labels(),
            ["a", "b", "c", "d", "e", "f", "g", "h"]
        );
        assert_eq!(trace(&r, "K1 ~K0 Omega"), &learned);
        assert_eq!(trace(&r, "~K1 Omega").labels(), ["i", "j"]);
        assert!(trace(&r, "K1 ~K1 Omega").is_empty());
    }

    #[test]
    fn scenario_model_binds_stages() {
        let (scenario, _) = fixtures::learn_a();
        let model = scenario.model();
        let holds = |t: &str| {
            model
                .eval_assertion(&parse_assertion(t).unwrap())
                .unwrap()
                .holds
        };
        assert!(holds("K1 ~K0 Omega <= K1 Omega & ~K0 Omega"));
        assert!(holds("empty(K1 ~K1 Omega)"));
        assert!(holds("K0 Omega == {}"));
    }

    #[test]
    fn folding_multiple_transitions() {
        let s = abc();
        let t =
            |names: &[&str]| vec![LearningFact::whole(s.event_from_names(names).unwrap()).unwrap()];
        let scenario = LearningScenario::from_learning(
            KnowledgeOperator::trivial(&s),
            vec![t(&["a"]), t(&["b", "c"])],
        )
        .unwrap();
        assert_eq!(scenario.stages().len(), 3);
        assert!(scenario.validate().unwrap().valid);
        assert_eq!(scenario.facts(1).len(), 1);
        let k2 = &scenario.stages()[2];
        assert_eq!(k2.apply(&s.omega()).unwrap(), s.omega());
        assert!(k2
            .apply(&s.event_from_names(["b"]).unwrap())
            .unwrap()
            .is_empty());
    }
}
