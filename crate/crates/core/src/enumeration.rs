//! Exhaustive and randomized generation of knowledge operators.
//!
//! A table decomposes per state as `N(ω) = {E : ω ∈ KE}`. Truth says every
//! member of `N(ω)` contains `ω`; Monotonicity says `N(ω)` is upward closed.
//! So a truthful monotone operator is a choice, for each state, of an
//! upward-closed family over the `n − 1` other states, and there are
//! `D(n−1)^n` of them where `D` counts monotone families (Dedekind numbers).

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::operator::{
    check_axiom_capped, satisfies, verify_claim_with, Axiom, AxiomReport, Claim, ClaimOptions,
    ClaimReport, KnowledgeOperator, NeighborhoodSystem, DEFAULT_COUNTEREXAMPLE_CAP,
};
use crate::set::StateSpace;

/// Monotone families over a `k`-element set, including the empty family,
/// for `k = 0..=3`.
pub const DEDEKIND: [u64; 4] = [2, 3, 6, 20];
/// Largest space enumerated through neighborhoods.
pub const MAX_EXHAUSTIVE_STATES: usize = 4;
/// Largest space for brute-force tables without the override.
pub const MAX_TABLE_STATES: usize = 2;
/// Largest space for brute-force tables with the override.
pub const MAX_TABLE_STATES_OVERRIDE: usize = 3;
/// Largest space the random sampler accepts.
pub const MAX_SAMPLE_STATES: usize = 16;

fn too_many(n: usize, limit: usize) -> Error {
    Error::TooManyStates {
        requested: n,
        limit,
    }
}

#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct AxiomSet(u8);

impl AxiomSet {
    pub const fn empty() -> Self {
        AxiomSet(0)
    }

    pub fn truth_monotone() -> Self {
        Self::from_iter([Axiom::Truth, Axiom::Monotonicity])
    }

    fn bit(axiom: Axiom) -> u8 {
        1 << Axiom::ALL.iter().position(|&a| a == axiom).unwrap()
    }

    pub fn with(self, axiom: Axiom) -> Self {
        AxiomSet(self.0 | Self::bit(axiom))
    }

    pub fn contains(self, axiom: Axiom) -> bool {
        self.0 & Self::bit(axiom) != 0
    }

    pub fn is_superset(self, other: AxiomSet) -> bool {
        other.0 & !self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Axiom> {
        Axiom::ALL.into_iter().filter(move |&a| self.contains(a))
    }

    pub fn admits(self, k: &KnowledgeOperator) -> bool {
        self.iter().all(|a| satisfies(k, a))
    }
}

impl FromIterator<Axiom> for AxiomSet {
    fn from_iter<I: IntoIterator<Item = Axiom>>(iter: I) -> Self {
        iter.into_iter().fold(AxiomSet::empty(), AxiomSet::with)
    }
}

impl FromStr for AxiomSet {
    type Err = String;

    /// Comma-separated axiom names; `none` or an empty string is the empty set.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() || s.trim().eq_ignore_ascii_case("none") {
            return Ok(AxiomSet::empty());
        }
        s.split(',').map(str::parse::<Axiom>).collect()
    }
}

impl fmt::Debug for AxiomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for AxiomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(Axiom::short_name).collect();
        if names.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&names.join(","))
        }
    }
}

impl Serialize for AxiomSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// Upward-closed families over the lattice `2^k`, each as a bitmask over
/// lattice elements, generated from their antichains of minimal elements.
fn upward_closed_families(k: usize) -> Vec<u32> {
    let size = 1usize << k;
    let mut families = Vec::new();
    let mut antichain = Vec::new();
    fn grow(x: usize, size: usize, antichain: &mut Vec<usize>, out: &mut Vec<u32>) {
        if x == size {
            let family = (0..size)
                .filter(|&y| antichain.iter().any(|&a| a & !y == 0))
                .fold(0u32, |acc, y| acc | 1 << y);
            out.push(family);
            return;
        }
        grow(x + 1, size, antichain, out);
        let comparable = antichain.iter().any(|&a| a & !x == 0 || x & !a == 0);
        if !comparable {
            antichain.push(x);
            grow(x + 1, size, antichain, out);
            antichain.pop();
        }
    }
    grow(0, size, &mut antichain, &mut families);
    families
}

/// Inserts a set bit for `state` into a mask over the other states.
fn lift(x: u32, state: usize) -> u32 {
    let low = x & ((1 << state) - 1);
    let high = (x >> state) << (state + 1);
    low | high | 1 << state
}

/// Stream of every truthful monotone operator on `n` states.
///
/// Operators are ordered as an odometer over per-state family indices,
/// state 0 turning fastest.
pub struct TmOperators {
    space: StateSpace,
    /// `known_at[f]`: events `E` with `ω ∈ KE` under family `f`, as a mask
    /// over event indices, per state.
    known_at: Vec<Vec<u32>>,
    index: Vec<usize>,
    /// Number of low states the odometer turns; the rest stay fixed.
    free: usize,
    done: bool,
}

impl TmOperators {
    fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyLabelList);
        }
        if n > MAX_EXHAUSTIVE_STATES {
            return Err(too_many(n, MAX_EXHAUSTIVE_STATES));
        }
        let space = StateSpace::standard(n)?;
        let families = upward_closed_families(n - 1);
        debug_assert_eq!(families.len() as u64, DEDEKIND[n - 1]);
        let known_at = (0..n)
            .map(|w| {
                families
                    .iter()
                    .map(|&fam| {
                        (0..1u32 << (n - 1))
                            .filter(|&x| fam & 1 << x != 0)
                            .fold(0u32, |acc, x| acc | 1 << lift(x, w))
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            space,
            known_at,
            index: vec![0; n],
            free: n,
            done: false,
        })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    /// Number of family choices per state, `D(n−1)`.
    pub fn families_per_state(&self) -> usize {
        self.known_at[0].len()
    }

    /// Restricts the stream to operators whose last state uses family
    /// `outer`; the restricted streams partition the full one in order.
    fn with_outer(mut self, outer: usize) -> Self {
        let last = self.index.len() - 1;
        self.index[last] = outer;
        self.free = last;
        self.done = outer >= self.families_per_state();
        self
    }

    fn current(&self) -> KnowledgeOperator {
        let table = (0..self.space.event_count())
            .map(|e| {
                self.index.iter().enumerate().fold(0u32, |acc, (w, &f)| {
                    acc | ((self.known_at[w][f] >> e) & 1) << w
                })
            })
            .collect();
        KnowledgeOperator::from_masks(&self.space, table).expect("valid table")
    }
}

impl Iterator for TmOperators {
    type Item = KnowledgeOperator;

    fn next(&mut self) -> Option<KnowledgeOperator> {
        if self.done {
            return None;
        }
        let out = self.current();
        let radix = self.families_per_state();
        let mut w = 0;
        loop {
            if w == self.free {
                self.done = true;
                break;
            }
            self.index[w] += 1;
            if self.index[w] < radix {
                break;
            }
            self.index[w] = 0;
            w += 1;
        }
        Some(out)
    }
}

pub fn enumerate_tm_operators(n: usize) -> Result<TmOperators> {
    TmOperators::new(n)
}

/// Brute force over every total table, keeping those that satisfy `axioms`.
pub struct FilteredTables {
    axioms: AxiomSet,
    current: KnowledgeOperator,
    /// Entries below this index turn; the rest stay fixed.
    free: usize,
    done: bool,
}

impl FilteredTables {
    fn new(n: usize, axioms: AxiomSet, allow_large: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyLabelList);
        }
        let limit = if allow_large {
            MAX_TABLE_STATES_OVERRIDE
        } else {
            MAX_TABLE_STATES
        };
        if n > limit {
            return Err(too_many(n, limit));
        }
        let space = StateSpace::standard(n)?;
        let current = KnowledgeOperator::from_masks(&space, vec![0; space.event_count()])?;
        let free = current.table().len();
        Ok(Self {
            axioms,
            current,
            free,
            done: false,
        })
    }

    fn with_last_entry(mut self, image: u32) -> Self {
        let last = self.free - 1;
        self.current.table_mut()[last] = image;
        self.free = last;
        self.done = image > self.current.omega_mask();
        self
    }

    fn radix(&self) -> u32 {
        self.current.omega_mask() + 1
    }

    fn advance(&mut self) {
        let radix = self.radix();
        let free = self.free;
        let table = self.current.table_mut();
        for entry in table.iter_mut().take(free) {
            *entry += 1;
            if *entry < radix {
                return;
            }
            *entry = 0;
        }
        self.done = true;
    }
}

impl Iterator for FilteredTables {
    type Item = KnowledgeOperator;

    fn next(&mut self) -> Option<KnowledgeOperator> {
        while !self.done {
            let keep = self.axioms.admits(&self.current);
            let out = keep.then(|| self.current.clone());
            self.advance();
            if out.is_some() {
                return out;
            }
        }
        None
    }
}

pub fn enumerate_filtered_tables(
    n: usize,
    axioms: AxiomSet,
    allow_large: bool,
) -> Result<FilteredTables> {
    FilteredTables::new(n, axioms, allow_large)
}

/// Number of truthful monotone operators on `n` states, by streaming the
/// enumeration.
pub fn count_operators(n: usize) -> Result<u64> {
    Ok(enumerate_tm_operators(n)?.count() as u64)
}

/// Random truthful monotone operator, deterministic in `(n, seed)`.
///
/// Each state draws 0 to 3 events containing it uniformly at random; the
/// minimal ones become its neighborhoods. This favors sparse operators.
pub fn sample_tm_operator(n: usize, seed: u64) -> Result<KnowledgeOperator> {
    if n > MAX_SAMPLE_STATES {
        return Err(too_many(n, MAX_SAMPLE_STATES));
    }
    let space = StateSpace::standard(n)?;
    let full = space.full_mask();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lists = Vec::with_capacity(n);
    for w in 0..n {
        let draws = rng.random_range(0..=3);
        let candidates: Vec<u32> = (0..draws)
            .map(|_| (rng.random::<u32>() & full) | 1 << w)
            .collect();
        let mut minimal: Vec<u32> = candidates
            .iter()
            .copied()
            .filter(|&c| !candidates.iter().any(|&d| d != c && d & !c == 0))
            .collect();
        minimal.sort_unstable();
        minimal.dedup();
        lists.push(minimal);
    }
    Ok(NeighborhoodSystem::from_masks(&space, &lists)?.to_operator())
}

/// What a universal check evaluates on each operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Claim(Claim),
    Axiom(Axiom),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Claim(c) => f.write_str(c.short_name()),
            Target::Axiom(a) => f.write_str(a.short_name()),
        }
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<Claim>()
            .map(Target::Claim)
            .or_else(|_| s.parse::<Axiom>().map(Target::Axiom))
            .map_err(|_| format!("unknown claim or axiom {s:?}"))
    }
}

impl Serialize for Target {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Detail {
    Claim(ClaimReport),
    Axiom(AxiomReport),
}

#[derive(Debug, Clone)]
pub struct Counterexample {
    pub operator: KnowledgeOperator,
    /// Whether the operator met the target's hypotheses; `true` here means
    /// a genuine violation rather than a hypothesis-necessity witness.
    pub applicable: bool,
    pub detail: Detail,
}

impl Serialize for Counterexample {
    /// The model part uses the model-file schema so it can be reloaded.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Table<'a> {
            table: &'a KnowledgeOperator,
        }
        let mut s = serializer.serialize_struct("Counterexample", 4)?;
        s.serialize_field("states", self.operator.space().labels())?;
        s.serialize_field(
            "operator",
            &Table {
                table: &self.operator,
            },
        )?;
        s.serialize_field("applicable", &self.applicable)?;
        s.serialize_field("report", &self.detail)?;
        s.end()
    }
}

/// Per-target tallies. `pass + fail + not_applicable` equals the number of
/// operators checked; `fail` counts operators that meet the hypotheses but
/// violate the conclusion.
#[derive(Debug, Clone, Serialize)]
pub struct TargetStats {
    pub target: Target,
    pub pass: u64,
    pub fail: u64,
    pub not_applicable: u64,
    /// Not-applicable operators on which forced evaluation fails.
    pub not_applicable_fail: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl TargetStats {
    fn new(target: Target) -> Self {
        Self {
            target,
            pass: 0,
            fail: 0,
            not_applicable: 0,
            not_applicable_fail: 0,
            counterexamples: Vec::new(),
        }
    }

    fn merge(&mut self, other: TargetStats, cap: usize) {
        self.pass += other.pass;
        self.fail += other.fail;
        self.not_applicable += other.not_applicable;
        self.not_applicable_fail += other.not_applicable_fail;
        let room = cap.saturating_sub(self.counterexamples.len());
        self.counterexamples
            .extend(other.counterexamples.into_iter().take(room));
    }

    pub fn total(&self) -> u64 {
        self.pass + self.fail + self.not_applicable
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumerationStats {
    pub states: usize,
    pub axioms: AxiomSet,
    pub source: &'static str,
    pub operator_count: u64,
    pub targets: Vec<TargetStats>,
}

impl EnumerationStats {
    pub fn target(&self, target: Target) -> Option<&TargetStats> {
        self.targets.iter().find(|t| t.target == target)
    }

    /// No operator meeting a target's hypotheses violated it.
    pub fn all_hold(&self) -> bool {
        self.targets.iter().all(|t| t.fail == 0)
    }
}

#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub states: usize,
    pub axioms: AxiomSet,
    pub targets: Vec<Target>,
    pub max_counterexamples: usize,
    pub allow_large: bool,
    pub parallel: bool,
}

impl CheckConfig {
    pub fn new(states: usize, axioms: AxiomSet, targets: Vec<Target>) -> Self {
        Self {
            states,
            axioms,
            targets,
            max_counterexamples: DEFAULT_COUNTEREXAMPLE_CAP,
            allow_large: false,
            parallel: true,
        }
    }
}

/// Evaluates one target on one operator and tallies the result.
fn tally(stats: &mut TargetStats, k: &KnowledgeOperator, cap: usize) {
    let opts = ClaimOptions {
        forced: true,
        max_counterexamples: cap,
    };
    let (applicable, holds, detail) = match stats.target {
        Target::Axiom(a) => {
            if satisfies(k, a) {
                (true, true, None)
            } else {
                let report = check_axiom_capped(k, a, cap);
                (true, false, Some(Detail::Axiom(report)))
            }
        }
        Target::Claim(Claim::Eq1) => {
            let space = k.space();
            let mut first_failure = None;
            let mut applicable = true;
            for e in 0..space.full_mask() {
                let e = space.event_from_mask(e).expect("in range");
                let r = verify_claim_with(k, Claim::Eq1, Some(&e), &opts).expect("E is not Omega");
                applicable = r.applicable;
                if !r.holds {
                    first_failure = Some(r);
                    break;
                }
            }
            let holds = first_failure.is_none();
            (applicable, holds, first_failure.map(Detail::Claim))
        }
        Target::Claim(c) => {
            let r = verify_claim_with(k, c, None, &opts).expect("no parameter needed");
            (
                r.applicable,
                r.holds,
                (!r.holds).then_some(Detail::Claim(r)),
            )
        }
    };
    match (applicable, holds) {
        (true, true) => stats.pass += 1,
        (true, false) => stats.fail += 1,
        (false, h) => {
            stats.not_applicable += 1;
            if !h {
                stats.not_applicable_fail += 1;
            }
        }
    }
    if let Some(detail) = detail {
        if stats.counterexamples.len() < cap {
            stats.counterexamples.push(Counterexample {
                operator: k.clone(),
                applicable,
                detail,
            });
        }
    }
}

fn run_chunk<I>(operators: I, cfg: &CheckConfig, extra: AxiomSet) -> (u64, Vec<TargetStats>)
where
    I: Iterator<Item = KnowledgeOperator>,
{
    let cap = cfg.max_counterexamples.max(1);
    let mut count = 0;
    let mut stats: Vec<TargetStats> = cfg.targets.iter().map(|&t| TargetStats::new(t)).collect();
    for k in operators.filter(|k| extra.admits(k)) {
        count += 1;
        for s in &mut stats {
            tally(s, &k, cap);
        }
    }
    (count, stats)
}

fn merge_chunks(
    cfg: &CheckConfig,
    source: &'static str,
    chunks: Vec<(u64, Vec<TargetStats>)>,
) -> EnumerationStats {
    let cap = cfg.max_counterexamples.max(1);
    let mut stats = EnumerationStats {
        states: cfg.states,
        axioms: cfg.axioms,
        source,
        operator_count: 0,
        targets: cfg.targets.iter().map(|&t| TargetStats::new(t)).collect(),
    };
    for (count, chunk) in chunks {
        stats.operator_count += count;
        for (acc, part) in stats.targets.iter_mut().zip(chunk) {
            acc.merge(part, cap);
        }
    }
    stats
}

/// Runs every target on every operator admitted by `cfg.axioms`.
///
/// When the axioms include Truth and Monotonicity the operators come from
/// the neighborhood enumeration (up to 4 states); otherwise from brute-force
/// tables (up to 2 states, 3 with `allow_large`). Claims are evaluated in
/// forced mode so dropped hypotheses yield counterexamples. Chunks are
/// merged in enumeration order, so results do not depend on `parallel`.
pub fn universal_check(cfg: &CheckConfig) -> Result<EnumerationStats> {
    let n = cfg.states;
    let tm = AxiomSet::truth_monotone();
    if cfg.axioms.is_superset(tm) {
        let extra: AxiomSet = cfg.axioms.iter().filter(|&a| !tm.contains(a)).collect();
        let radix = enumerate_tm_operators(n)?.families_per_state();
        let chunk = |outer: usize| {
            let ops = enumerate_tm_operators(n)
                .expect("validated")
                .with_outer(outer);
            run_chunk(ops, cfg, extra)
        };
        let chunks: Vec<_> = if cfg.parallel {
            (0..radix).into_par_iter().map(chunk).collect()
        } else {
            (0..radix).map(chunk).collect()
        };
        Ok(merge_chunks(cfg, "neighborhoods", chunks))
    } else {
        let probe = enumerate_filtered_tables(n, cfg.axioms, cfg.allow_large)?;
        let radix = probe.radix();
        let chunk = |last: u32| {
            let ops = enumerate_filtered_tables(n, cfg.axioms, cfg.allow_large)
                .expect("validated")
                .with_last_entry(last);
            run_chunk(ops, cfg, AxiomSet::empty())
        };
        let chunks: Vec<_> = if cfg.parallel {
            (0..radix).into_par_iter().map(chunk).collect()
        } else {
            (0..radix).map(chunk).collect()
        };
        Ok(merge_chunks(cfg, "tables", chunks))
    }
}

/// Runs every target on `samples` random truthful monotone operators drawn
/// with seeds `seed, seed + 1, ...`.
pub fn sampled_check(
    states: usize,
    samples: u64,
    seed: u64,
    targets: &[Target],
    max_counterexamples: usize,
) -> Result<EnumerationStats> {
    let cfg = CheckConfig {
        max_counterexamples,
        ..CheckConfig::new(states, AxiomSet::truth_monotone(), targets.to_vec())
    };
    // Validate bounds once before fanning out.
    sample_tm_operator(states, seed)?;
    let chunks: Vec<_> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let k = sample_tm_operator(states, seed.wrapping_add(i)).expect("validated");
            run_chunk(std::iter::once(k), &cfg, AxiomSet::empty())
        })
        .collect();
    Ok(merge_chunks(&cfg, "sampled", chunks))
}
