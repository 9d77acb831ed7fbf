//! 1-safe Place/Transition nets.
//!
//! A [`Net`] stores its flow relation as per-node presets and postsets over
//! dense indices. Markings and steps are sorted index sets, so every
//! execution prints the same way on every run.

mod dp;
pub mod oracle;
mod parse;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use dp::dining_philosophers;
pub use oracle::{
    oracle_ltl_counterexample, oracle_search, LtlWitness, OracleError, Semantics, WitnessShape,
};
pub use parse::parse_net;

/// Identifiers that clash with auxiliary atom names in the ground-program
/// text format or with formula keywords.
pub const RESERVED_IDENTIFIERS: &[&str] = &[
    "idle", "el", "le", "nl", "il", "live", "not", "U", "R", "F", "G", "true", "false",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PlaceId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TransId(pub u32);

impl PlaceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TransId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    Place(PlaceId),
    Trans(TransId),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate identifier `{0}`")]
    DuplicateIdentifier(String),
    #[error("reserved identifier `{0}`")]
    ReservedIdentifier(String),
    #[error("arc endpoint `{0}` is not declared")]
    UndeclaredNode(String),
    #[error("arc `{0}` -> `{1}` connects two nodes of the same kind")]
    SameKindArc(String, String),
    #[error("duplicate arc `{0}` -> `{1}`")]
    DuplicateArc(String, String),
    #[error("transition `{0}` has an empty preset")]
    EmptyPreset(String),
    #[error("transition `{0}` has an empty postset")]
    EmptyPostset(String),
    #[error("initial marking names unknown place `{0}`")]
    UnknownInitialPlace(String),
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("transitions {0:?} do not form a step in this marking")]
    NotAStep(Vec<String>),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Set of marked places.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marking(BTreeSet<PlaceId>);

impl Marking {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, p: PlaceId) -> bool {
        self.0.contains(&p)
    }

    pub fn insert(&mut self, p: PlaceId) -> bool {
        self.0.insert(p)
    }

    pub fn remove(&mut self, p: PlaceId) -> bool {
        self.0.remove(&p)
    }

    pub fn iter(&self) -> impl Iterator<Item = PlaceId> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<PlaceId> for Marking {
    fn from_iter<I: IntoIterator<Item = PlaceId>>(iter: I) -> Self {
        Marking(iter.into_iter().collect())
    }
}

/// Set of transitions fired together.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step(BTreeSet<TransId>);

impl Step {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(t: TransId) -> Self {
        Step(BTreeSet::from([t]))
    }

    pub fn contains(&self, t: TransId) -> bool {
        self.0.contains(&t)
    }

    pub fn insert(&mut self, t: TransId) -> bool {
        self.0.insert(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = TransId> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<TransId> for Step {
    fn from_iter<I: IntoIterator<Item = TransId>>(iter: I) -> Self {
        Step(iter.into_iter().collect())
    }
}

/// Alternating sequence `M0 -S0-> M1 -S1-> ... Mn`.
///
/// Interleaving executions are the special case where no step holds more
/// than one transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepExecution {
    pub markings: Vec<Marking>,
    pub steps: Vec<Step>,
}

impl StepExecution {
    pub fn empty(m0: Marking) -> Self {
        StepExecution {
            markings: vec![m0],
            steps: Vec::new(),
        }
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn initial(&self) -> &Marking {
        &self.markings[0]
    }

    pub fn last(&self) -> &Marking {
        self.markings.last().expect("executions hold at least one marking")
    }

    pub fn push(&mut self, step: Step, next: Marking) {
        self.steps.push(step);
        self.markings.push(next);
    }

    pub fn is_interleaving(&self) -> bool {
        self.steps.iter().all(|s| s.len() <= 1)
    }

    /// Replays every step against `net`, checking both enabledness and the
    /// recorded successor marking.
    pub fn validate(&self, net: &Net) -> Result<(), NetError> {
        if self.markings.len() != self.steps.len() + 1 {
            return Err(NetError::InvalidParameter(format!(
                "{} markings for {} steps",
                self.markings.len(),
                self.steps.len()
            )));
        }
        for (i, step) in self.steps.iter().enumerate() {
            let next = net.fire_step(&self.markings[i], step)?;
            if next != self.markings[i + 1] {
                return Err(NetError::InvalidParameter(format!(
                    "step {i} leads to {} but the execution records {}",
                    net.marking_to_string(&next),
                    net.marking_to_string(&self.markings[i + 1])
                )));
            }
        }
        Ok(())
    }

    /// Same execution with empty steps removed.
    pub fn without_idle_steps(&self) -> StepExecution {
        let mut out = StepExecution::empty(self.markings[0].clone());
        for (i, s) in self.steps.iter().enumerate() {
            if !s.is_empty() {
                out.push(s.clone(), self.markings[i + 1].clone());
            }
        }
        out
    }
}

/// Result of [`Net::assert_one_safe`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SafetyReport {
    Safe { reachable: usize },
    /// Firing the last transition of `witness` from its final marking would
    /// put a second token on `place`.
    Unsafe {
        reachable: usize,
        witness: Vec<TransId>,
        place: PlaceId,
    },
    Inconclusive { explored: usize },
}

impl SafetyReport {
    pub fn is_one_safe(&self) -> bool {
        matches!(self, SafetyReport::Safe { .. })
    }
}

#[derive(Clone, Debug)]
pub struct Net {
    places: Vec<String>,
    transitions: Vec<String>,
    preset: Vec<Vec<PlaceId>>,
    postset: Vec<Vec<PlaceId>>,
    /// Transitions consuming from each place.
    consumers: Vec<Vec<TransId>>,
    /// Transitions producing into each place.
    producers: Vec<Vec<TransId>>,
    initial: Marking,
    index: HashMap<String, Node>,
}

/// Incremental construction with the same validation the parser applies.
#[derive(Debug, Default)]
pub struct NetBuilder {
    places: Vec<String>,
    transitions: Vec<String>,
    arcs: Vec<(String, String)>,
    initial: Vec<String>,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn place(&mut self, id: impl Into<String>) -> &mut Self {
        self.places.push(id.into());
        self
    }

    pub fn transition(&mut self, id: impl Into<String>) -> &mut Self {
        self.transitions.push(id.into());
        self
    }

    pub fn arc(&mut self, from: impl Into<String>, to: impl Into<String>) -> &mut Self {
        self.arcs.push((from.into(), to.into()));
        self
    }

    pub fn mark(&mut self, place: impl Into<String>) -> &mut Self {
        self.initial.push(place.into());
        self
    }

    pub fn build(&self) -> Result<Net, NetError> {
        let mut index = HashMap::new();
        for (i, p) in self.places.iter().enumerate() {
            check_identifier(p)?;
            if index.insert(p.clone(), Node::Place(PlaceId(i as u32))).is_some() {
                return Err(NetError::DuplicateIdentifier(p.clone()));
            }
        }
        for (i, t) in self.transitions.iter().enumerate() {
            check_identifier(t)?;
            if index.insert(t.clone(), Node::Trans(TransId(i as u32))).is_some() {
                return Err(NetError::DuplicateIdentifier(t.clone()));
            }
        }
        let mut preset = vec![Vec::new(); self.transitions.len()];
        let mut postset = vec![Vec::new(); self.transitions.len()];
        let mut seen = HashSet::new();
        for (from, to) in &self.arcs {
            let a = *index
                .get(from)
                .ok_or_else(|| NetError::UndeclaredNode(from.clone()))?;
            let b = *index
                .get(to)
                .ok_or_else(|| NetError::UndeclaredNode(to.clone()))?;
            if !seen.insert((from.clone(), to.clone())) {
                return Err(NetError::DuplicateArc(from.clone(), to.clone()));
            }
            match (a, b) {
                (Node::Place(p), Node::Trans(t)) => preset[t.index()].push(p),
                (Node::Trans(t), Node::Place(p)) => postset[t.index()].push(p),
                _ => return Err(NetError::SameKindArc(from.clone(), to.clone())),
            }
        }
        for (i, t) in self.transitions.iter().enumerate() {
            if preset[i].is_empty() {
                return Err(NetError::EmptyPreset(t.clone()));
            }
            if postset[i].is_empty() {
                return Err(NetError::EmptyPostset(t.clone()));
            }
            preset[i].sort();
            postset[i].sort();
        }
        let mut initial = Marking::new();
        for p in &self.initial {
            match index.get(p) {
                Some(Node::Place(id)) => {
                    initial.insert(*id);
                }
                _ => return Err(NetError::UnknownInitialPlace(p.clone())),
            }
        }
        let mut consumers = vec![Vec::new(); self.places.len()];
        let mut producers = vec![Vec::new(); self.places.len()];
        for t in 0..self.transitions.len() {
            for p in &preset[t] {
                consumers[p.index()].push(TransId(t as u32));
            }
            for p in &postset[t] {
                producers[p.index()].push(TransId(t as u32));
            }
        }
        Ok(Net {
            places: self.places.clone(),
            transitions: self.transitions.clone(),
            preset,
            postset,
            consumers,
            producers,
            initial,
            index,
        })
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

fn check_identifier(s: &str) -> Result<(), NetError> {
    if !is_identifier(s) {
        return Err(NetError::InvalidParameter(format!("`{s}` is not an identifier")));
    }
    if s.starts_with('_') || RESERVED_IDENTIFIERS.contains(&s) {
        return Err(NetError::ReservedIdentifier(s.to_string()));
    }
    Ok(())
}

impl Net {
    pub fn places(&self) -> impl ExactSizeIterator<Item = PlaceId> {
        (0..self.places.len() as u32).map(PlaceId)
    }

    pub fn transitions(&self) -> impl ExactSizeIterator<Item = TransId> {
        (0..self.transitions.len() as u32).map(TransId)
    }

    pub fn num_places(&self) -> usize {
        self.places.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    /// Number of arcs in the flow relation.
    pub fn num_arcs(&self) -> usize {
        self.preset.iter().chain(&self.postset).map(Vec::len).sum()
    }

    pub fn place_name(&self, p: PlaceId) -> &str {
        &self.places[p.index()]
    }

    pub fn transition_name(&self, t: TransId) -> &str {
        &self.transitions[t.index()]
    }

    pub fn place(&self, name: &str) -> Result<PlaceId, NetError> {
        match self.index.get(name) {
            Some(Node::Place(p)) => Ok(*p),
            _ => Err(NetError::UnknownPlace(name.to_string())),
        }
    }

    pub fn transition(&self, name: &str) -> Result<TransId, NetError> {
        match self.index.get(name) {
            Some(Node::Trans(t)) => Ok(*t),
            _ => Err(NetError::UnknownTransition(name.to_string())),
        }
    }

    pub fn preset(&self, t: TransId) -> &[PlaceId] {
        &self.preset[t.index()]
    }

    pub fn postset(&self, t: TransId) -> &[PlaceId] {
        &self.postset[t.index()]
    }

    /// Transitions with `p` in their preset.
    pub fn consumers(&self, p: PlaceId) -> &[TransId] {
        &self.consumers[p.index()]
    }

    /// Transitions with `p` in their postset.
    pub fn producers(&self, p: PlaceId) -> &[TransId] {
        &self.producers[p.index()]
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.initial
    }

    /// Marking from place names.
    pub fn marking<'a>(
        &self,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<Marking, NetError> {
        names.into_iter().map(|n| self.place(n)).collect()
    }

    /// Step from transition names.
    pub fn step<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Result<Step, NetError> {
        names.into_iter().map(|n| self.transition(n)).collect()
    }

    pub fn enabled(&self, m: &Marking, t: TransId) -> bool {
        self.preset(t).iter().all(|p| m.contains(*p))
    }

    pub fn enabled_transitions(&self, m: &Marking) -> Vec<TransId> {
        self.transitions().filter(|t| self.enabled(m, *t)).collect()
    }

    /// `(m \ preset(t)) ∪ postset(t)`.
    pub fn fire(&self, m: &Marking, t: TransId) -> Result<Marking, NetError> {
        if !self.enabled(m, t) {
            return Err(NetError::NotEnabled(self.transition_name(t).to_string()));
        }
        let mut next = m.clone();
        for p in self.preset(t) {
            next.remove(*p);
        }
        for p in self.postset(t) {
            next.insert(*p);
        }
        Ok(next)
    }

    /// All members enabled and presets pairwise disjoint.
    pub fn is_step(&self, m: &Marking, s: &Step) -> bool {
        let mut consumed = HashSet::new();
        for t in s.iter() {
            if !self.enabled(m, t) {
                return false;
            }
            for p in self.preset(t) {
                if !consumed.insert(*p) {
                    return false;
                }
            }
        }
        true
    }

    pub fn fire_step(&self, m: &Marking, s: &Step) -> Result<Marking, NetError> {
        if !self.is_step(m, s) {
            return Err(NetError::NotAStep(
                s.iter().map(|t| self.transition_name(t).to_string()).collect(),
            ));
        }
        let mut next = m.clone();
        for t in s.iter() {
            for p in self.preset(t) {
                next.remove(*p);
            }
        }
        for t in s.iter() {
            for p in self.postset(t) {
                next.insert(*p);
            }
        }
        Ok(next)
    }

    pub fn deadlocked(&self, m: &Marking) -> bool {
        self.transitions().all(|t| !self.enabled(m, t))
    }

    /// Every non-empty set of enabled transitions with pairwise disjoint
    /// presets, in lexicographic order of declaration indices.
    pub fn enabled_steps(&self, m: &Marking) -> Vec<Step> {
        let enabled = self.enabled_transitions(m);
        let mut out = Vec::new();
        let mut current = Vec::new();
        let mut used = HashSet::new();
        self.collect_steps(&enabled, 0, &mut current, &mut used, &mut out);
        out
    }

    fn collect_steps(
        &self,
        enabled: &[TransId],
        from: usize,
        current: &mut Vec<TransId>,
        used: &mut HashSet<PlaceId>,
        out: &mut Vec<Step>,
    ) {
        for k in from..enabled.len() {
            let t = enabled[k];
            if self.preset(t).iter().any(|p| used.contains(p)) {
                continue;
            }
            current.push(t);
            used.extend(self.preset(t).iter().copied());
            out.push(current.iter().copied().collect());
            self.collect_steps(enabled, k + 1, current, used, out);
            for p in self.preset(t) {
                used.remove(p);
            }
            current.pop();
        }
    }

    /// Exhaustive interleaving exploration from the initial marking.
    pub fn assert_one_safe(&self, state_limit: usize) -> SafetyReport {
        self.assert_one_safe_from(&self.initial, state_limit)
    }

    pub fn assert_one_safe_from(&self, m0: &Marking, state_limit: usize) -> SafetyReport {
        let mut parent: HashMap<Marking, Option<(Marking, TransId)>> = HashMap::new();
        let mut queue = VecDeque::new();
        parent.insert(m0.clone(), None);
        queue.push_back(m0.clone());
        if state_limit == 0 {
            return SafetyReport::Inconclusive { explored: 0 };
        }
        while let Some(m) = queue.pop_front() {
            for t in self.transitions() {
                if !self.enabled(&m, t) {
                    continue;
                }
                let pre = self.preset(t);
                if let Some(p) = self
                    .postset(t)
                    .iter()
                    .find(|p| m.contains(**p) && !pre.contains(p))
                {
                    let mut witness = vec![t];
                    let mut cur = m.clone();
                    while let Some(Some((prev, via))) = parent.get(&cur) {
                        witness.push(*via);
                        cur = prev.clone();
                    }
                    witness.reverse();
                    return SafetyReport::Unsafe {
                        reachable: parent.len(),
                        witness,
                        place: *p,
                    };
                }
                let next = self.fire(&m, t).expect("enabled");
                if !parent.contains_key(&next) {
                    if parent.len() >= state_limit {
                        return SafetyReport::Inconclusive {
                            explored: parent.len(),
                        };
                    }
                    parent.insert(next.clone(), Some((m.clone(), t)));
                    queue.push_back(next);
                }
            }
        }
        SafetyReport::Safe {
            reachable: parent.len(),
        }
    }

    /// Every marking reachable from `m0` under the given semantics.
    pub fn reachable_markings(
        &self,
        m0: &Marking,
        semantics: Semantics,
        limit: usize,
    ) -> Option<HashSet<Marking>> {
        let mut seen = HashSet::from([m0.clone()]);
        let mut queue = VecDeque::from([m0.clone()]);
        while let Some(m) = queue.pop_front() {
            for s in self.successor_steps(&m, semantics) {
                let next = self.fire_step(&m, &s).expect("enumerated steps are valid");
                if seen.insert(next.clone()) {
                    if seen.len() > limit {
                        return None;
                    }
                    queue.push_back(next);
                }
            }
        }
        Some(seen)
    }

    pub(crate) fn successor_steps(&self, m: &Marking, semantics: Semantics) -> Vec<Step> {
        match semantics {
            Semantics::Step => self.enabled_steps(m),
            Semantics::Interleaving => self
                .enabled_transitions(m)
                .into_iter()
                .map(Step::single)
                .collect(),
        }
    }

    pub fn marking_names(&self, m: &Marking) -> Vec<String> {
        m.iter().map(|p| self.place_name(p).to_string()).collect()
    }

    pub fn step_names(&self, s: &Step) -> Vec<String> {
        s.iter().map(|t| self.transition_name(t).to_string()).collect()
    }

    pub fn marking_to_string(&self, m: &Marking) -> String {
        format!("{{{}}}", self.marking_names(m).join(", "))
    }

    pub fn step_to_string(&self, s: &Step) -> String {
        format!("{{{}}}", self.step_names(s).join(", "))
    }

    pub fn execution_to_string(&self, e: &StepExecution) -> String {
        let mut out = self.marking_to_string(&e.markings[0]);
        for (s, m) in e.steps.iter().zip(&e.markings[1..]) {
            out.push_str(&format!(" -{}-> {}", self.step_to_string(s), self.marking_to_string(m)));
        }
        out
    }

    /// Renders the net in the line-oriented net file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.places {
            out.push_str(&format!("place {p}\n"));
        }
        for t in &self.transitions {
            out.push_str(&format!("trans {t}\n"));
        }
        for t in self.transitions() {
            for p in self.preset(t) {
                out.push_str(&format!(
                    "arc {} {}\n",
                    self.place_name(*p),
                    self.transition_name(t)
                ));
            }
            for p in self.postset(t) {
                out.push_str(&format!(
                    "arc {} {}\n",
                    self.transition_name(t),
                    self.place_name(*p)
                ));
            }
        }
        for p in self.initial.iter() {
            out.push_str(&format!("init {}\n", self.place_name(p)));
        }
        out
    }
}

impl fmt::Display for Net {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
