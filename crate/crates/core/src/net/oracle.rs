//! Explicit-state bounded search, used as ground truth for the encodings.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Marking, Net, Step, StepExecution};
use crate::ltl::{Formula, Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Step,
    Interleaving,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Step => "step",
            Semantics::Interleaving => "interleaving",
        })
    }
}

impl FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "step" => Ok(Semantics::Step),
            "interleaving" => Ok(Semantics::Interleaving),
            other => Err(format!("unknown semantics `{other}`")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle budget exceeded after {explored} nodes")]
    BudgetExceeded { explored: usize },
}

/// Shortest execution of at most `bound` steps from one of `inits` to a
/// marking satisfying `goal`.
pub fn oracle_search(
    net: &Net,
    inits: &[Marking],
    goal: impl Fn(&Marking) -> bool,
    bound: usize,
    semantics: Semantics,
    budget: usize,
) -> Result<Option<StepExecution>, OracleError> {
    let mut parent: HashMap<Marking, Option<(Marking, Step)>> = HashMap::new();
    let mut queue = VecDeque::new();
    for m in inits {
        if parent.contains_key(m) {
            continue;
        }
        parent.insert(m.clone(), None);
        queue.push_back((m.clone(), 0usize));
    }
    while let Some((m, depth)) = queue.pop_front() {
        if goal(&m) {
            return Ok(Some(trace_back(&parent, m)));
        }
        if depth == bound {
            continue;
        }
        for s in net.successor_steps(&m, semantics) {
            let next = net.fire_step(&m, &s).expect("enumerated steps are valid");
            if parent.contains_key(&next) {
                continue;
            }
            if parent.len() >= budget {
                return Err(OracleError::BudgetExceeded {
                    explored: parent.len(),
                });
            }
            parent.insert(next.clone(), Some((m.clone(), s)));
            queue.push_back((next, depth + 1));
        }
    }
    Ok(None)
}

fn trace_back(parent: &HashMap<Marking, Option<(Marking, Step)>>, end: Marking) -> StepExecution {
    let mut markings = vec![end.clone()];
    let mut steps = Vec::new();
    let mut cur = end;
    while let Some(Some((prev, s))) = parent.get(&cur) {
        steps.push(s.clone());
        markings.push(prev.clone());
        cur = prev.clone();
    }
    markings.reverse();
    steps.reverse();
    StepExecution { markings, steps }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessShape {
    /// Ends in a dead marking.
    Deadlock,
    /// The final marking repeats marking `l`.
    Loop(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LtlWitness {
    pub execution: StepExecution,
    pub shape: WitnessShape,
}

/// Letters of the markings of `e` restricted to the atoms of `f`.
pub fn execution_letters(net: &Net, e: &StepExecution, f: &Formula) -> Vec<Letter> {
    let ap = f.atoms_of();
    e.markings
        .iter()
        .map(|m| {
            net.marking_names(m)
                .into_iter()
                .filter(|p| ap.contains(p))
                .collect()
        })
        .collect()
}

/// Word induced by an execution of the given shape, or `None` when the
/// shape does not fit the execution.
pub fn execution_word(
    net: &Net,
    e: &StepExecution,
    shape: WitnessShape,
    f: &Formula,
) -> Option<Word> {
    let letters = execution_letters(net, e, f);
    match shape {
        WitnessShape::Deadlock => Word::finite(f.atoms_of(), letters).ok(),
        WitnessShape::Loop(l) => Word::lasso(f.atoms_of(), letters, l).ok(),
    }
}

/// Shortest interleaving execution of at most `bound` steps from one of
/// `inits` that either deadlocks with a finite word satisfying `f`, or
/// loops back to an earlier marking with a lasso word satisfying `f`.
/// Among loops of the same length the smallest loop index wins.
pub fn oracle_ltl_counterexample(
    net: &Net,
    inits: &[Marking],
    f: &Formula,
    bound: usize,
    budget: usize,
) -> Result<Option<LtlWitness>, OracleError> {
    let mut explored = 0;
    for len in 0..=bound {
        for m0 in inits {
            let mut path = StepExecution::empty(m0.clone());
            if let Some(w) = paths_of_length(net, &mut path, len, f, budget, &mut explored)? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

fn paths_of_length(
    net: &Net,
    path: &mut StepExecution,
    len: usize,
    f: &Formula,
    budget: usize,
    explored: &mut usize,
) -> Result<Option<LtlWitness>, OracleError> {
    *explored += 1;
    if *explored > budget {
        return Err(OracleError::BudgetExceeded { explored: budget });
    }
    if path.len() == len {
        return Ok(check_witness(net, path, f));
    }
    let m = path.last().clone();
    for t in net.enabled_transitions(&m) {
        let next = net.fire(&m, t).expect("enabled");
        path.push(Step::single(t), next);
        let found = paths_of_length(net, path, len, f, budget, explored)?;
        path.steps.pop();
        path.markings.pop();
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

fn check_witness(net: &Net, e: &StepExecution, f: &Formula) -> Option<LtlWitness> {
    let n = e.len();
    let last = e.last();
    let mut shapes: Vec<WitnessShape> = (0..n)
        .filter(|&l| &e.markings[l] == last)
        .map(WitnessShape::Loop)
        .collect();
    if net.deadlocked(last) {
        shapes.insert(0, WitnessShape::Deadlock);
    }
    shapes.into_iter().find_map(|shape| {
        let word = execution_word(net, e, shape, f)?;
        word.eval(f).ok()?.then(|| LtlWitness {
            execution: e.clone(),
            shape,
        })
    })
}
