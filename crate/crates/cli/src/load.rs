//! Model and scenario files.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use knowop::dynamics::{LearningFact, LearningScenario};
use knowop::formula::{Model, Stage};
use knowop::operator::{check_axiom_capped, Axiom, AxiomReport, NeighborhoodSystem};
use knowop::{Event, KnowledgeOperator, StateSpace};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{line}:{column}: {message}", path.display())]
    Schema {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
}

/// A position in the document named by its object keys, used to point
/// semantic errors at a line.
#[derive(Clone, Default)]
struct Location(Vec<String>);

impl Location {
    fn at(&self, key: impl fmt::Display) -> Location {
        let mut keys = self.0.clone();
        keys.push(key.to_string());
        Location(keys)
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("document");
        }
        f.write_str(&self.0.join("."))
    }
}

struct Source<'a> {
    path: &'a Path,
    text: &'a str,
}

impl Source<'_> {
    /// Finds the line and column of the last key of `loc` by scanning for
    /// each quoted key in turn. Array indices are skipped.
    fn position(&self, loc: &Location) -> (usize, usize) {
        let mut offset = 0;
        for key in &loc.0 {
            if key.parse::<usize>().is_ok() {
                continue;
            }
            let quoted = format!("\"{key}\"");
            if let Some(found) = self.text[offset..].find(&quoted) {
                offset += found;
            }
        }
        let before = &self.text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        (line, column)
    }

    fn error(&self, loc: &Location, message: impl fmt::Display) -> LoadError {
        let (line, column) = self.position(loc);
        LoadError::Schema {
            path: self.path.to_owned(),
            line,
            column,
            message: format!("{loc}: {message}"),
        }
    }

    fn parse<T: for<'de> Deserialize<'de>>(&self) -> Result<T, LoadError> {
        serde_json::from_str(self.text).map_err(|e| LoadError::Schema {
            path: self.path.to_owned(),
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()).to_owned(),
        })
    }
}

/// serde_json appends " at line L column C", which the error already carries.
fn strip_position(message: &str) -> &str {
    message
        .rsplit_once(" at line ")
        .map_or(message, |(head, _)| head)
}

/// An event as a list of state labels, or a string: a literal such as
/// `"{a,b}"`, `"Omega"`, `"Empty"`, or the name of a declared event.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawEvent {
    Labels(Vec<String>),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum RawOperator {
    Table(Vec<RawEvent>),
    Neighborhoods(BTreeMap<String, Vec<RawEvent>>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    states: Vec<String>,
    #[serde(default)]
    events: BTreeMap<String, RawEvent>,
    operator: Option<RawOperator>,
    #[serde(default)]
    operators: BTreeMap<String, RawOperator>,
    #[serde(default)]
    assertions: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFact {
    event: RawEvent,
    learned: Option<RawEvent>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    states: Vec<String>,
    #[serde(default)]
    events: BTreeMap<String, RawEvent>,
    operator: RawOperator,
    #[serde(default)]
    facts: Vec<RawFact>,
    #[serde(default)]
    transitions: Vec<Vec<RawFact>>,
    #[serde(default)]
    assertions: Vec<String>,
}

pub struct LoadedModel {
    pub model: Model,
    pub assertions: Vec<String>,
    /// Every axiom checked on every operator, keyed by stage.
    pub axioms: BTreeMap<Stage, Vec<AxiomReport>>,
}

pub struct LoadedScenario {
    pub scenario: LearningScenario,
    pub events: BTreeMap<String, Event>,
    pub assertions: Vec<String>,
}

fn read(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_owned(),
        source,
    })
}

struct Resolver<'a> {
    src: &'a Source<'a>,
    space: StateSpace,
    events: BTreeMap<String, Event>,
}

impl<'a> Resolver<'a> {
    fn new(src: &'a Source<'a>, states: &[String]) -> Result<Self, LoadError> {
        let space =
            StateSpace::new(states).map_err(|e| src.error(&Location::default().at("states"), e))?;
        Ok(Self {
            src,
            space,
            events: BTreeMap::new(),
        })
    }

    fn define_events(&mut self, raw: &BTreeMap<String, RawEvent>) -> Result<(), LoadError> {
        let loc = Location::default().at("events");
        for (name, value) in raw {
            let event = self.event(value, &loc.at(name), false)?;
            self.events.insert(name.clone(), event);
        }
        Ok(())
    }

    fn event(&self, raw: &RawEvent, loc: &Location, names: bool) -> Result<Event, LoadError> {
        let result = match raw {
            RawEvent::Labels(labels) => self.space.event_from_names(labels),
            RawEvent::Text(text) => match self.events.get(text.trim()) {
                Some(e) if names => Ok(e.clone()),
                _ => self.space.parse_event(text),
            },
        };
        result.map_err(|e| self.src.error(loc, e))
    }

    fn operator(&self, raw: &RawOperator, loc: &Location) -> Result<KnowledgeOperator, LoadError> {
        match raw {
            RawOperator::Table(entries) => {
                let loc = loc.at("table");
                let images = entries
                    .iter()
                    .enumerate()
                    .map(|(i, entry)| self.event(entry, &loc.at(i), false))
                    .collect::<Result<Vec<_>, _>>()?;
                KnowledgeOperator::from_table(&self.space, &images)
                    .map_err(|e| self.src.error(&loc, e))
            }
            RawOperator::Neighborhoods(map) => {
                let loc = loc.at("neighborhoods");
                let mut lists = vec![Vec::new(); self.space.len()];
                for (label, sets) in map {
                    let state = self.space.index_of(label).ok_or_else(|| {
                        self.src
                            .error(&loc.at(label), format!("unknown state {label:?}"))
                    })?;
                    lists[state] = sets
                        .iter()
                        .enumerate()
                        .map(|(i, s)| self.event(s, &loc.at(label).at(i), false))
                        .collect::<Result<_, _>>()?;
                }
                NeighborhoodSystem::new(&self.space, lists)
                    .map(|ns| ns.to_operator())
                    .map_err(|e| self.src.error(&loc, e))
            }
        }
    }
}

pub fn load_model(path: &Path, max_counterexamples: usize) -> Result<LoadedModel, LoadError> {
    let text = read(path)?;
    let src = Source { path, text: &text };
    let raw: RawModel = src.parse()?;
    let mut r = Resolver::new(&src, &raw.states)?;
    r.define_events(&raw.events)?;

    let root = Location::default();
    let mut operators = Vec::new();
    if let Some(op) = &raw.operator {
        operators.push((Stage::Default, r.operator(op, &root.at("operator"))?));
    }
    for (tag, op) in &raw.operators {
        let loc = root.at("operators").at(tag);
        let stage: Stage = tag.parse().map_err(|e| src.error(&loc, e))?;
        if operators.iter().any(|(s, _)| *s == stage) {
            return Err(src.error(&loc, format!("operator {stage} defined twice")));
        }
        operators.push((stage, r.operator(op, &loc)?));
    }
    if operators.is_empty() {
        return Err(src.error(&root, "expected \"operator\" or \"operators\""));
    }

    let mut model = Model::new(&r.space);
    for (name, event) in &r.events {
        model
            .define_event(name, event.clone())
            .map_err(|e| src.error(&root.at("events").at(name), e))?;
    }
    let mut axioms = BTreeMap::new();
    for (stage, k) in operators {
        let reports = Axiom::ALL
            .iter()
            .map(|&a| check_axiom_capped(&k, a, max_counterexamples))
            .collect();
        axioms.insert(stage, reports);
        model
            .set_operator(stage, k)
            .map_err(|e| src.error(&root, e))?;
    }
    Ok(LoadedModel {
        model,
        assertions: raw.assertions,
        axioms,
    })
}

pub fn load_scenario(path: &Path) -> Result<LoadedScenario, LoadError> {
    let text = read(path)?;
    let src = Source { path, text: &text };
    let raw: RawScenario = src.parse()?;
    let mut r = Resolver::new(&src, &raw.states)?;
    r.define_events(&raw.events)?;

    let root = Location::default();
    let k0 = r.operator(&raw.operator, &root.at("operator"))?;
    let (key, groups) = match (raw.facts.is_empty(), raw.transitions.is_empty()) {
        (_, true) => ("facts", vec![raw.facts]),
        (true, false) => ("transitions", raw.transitions),
        (false, false) => {
            return Err(src.error(
                &root.at("transitions"),
                "give either \"facts\" or \"transitions\", not both",
            ))
        }
    };
    let mut transitions = Vec::new();
    for (t, group) in groups.iter().enumerate() {
        let mut facts = Vec::new();
        for (i, fact) in group.iter().enumerate() {
            let loc = if key == "facts" {
                root.at(key).at(i)
            } else {
                root.at(key).at(t).at(i)
            };
            let event = r.event(&fact.event, &loc.at("event"), true)?;
            let built = match &fact.learned {
                Some(a) => LearningFact::new(event, r.event(a, &loc.at("learned"), true)?),
                None => LearningFact::whole(event),
            };
            facts.push(built.map_err(|e| src.error(&loc, e))?);
        }
        transitions.push(facts);
    }
    let scenario = LearningScenario::from_learning(k0, transitions)
        .map_err(|e| src.error(&root.at("operator"), e))?;
    Ok(LoadedScenario {
        scenario,
        events: r.events,
        assertions: raw.assertions,
    })
}
