use serde::Serialize;
use thiserror::Error;

use super::{place_atom, trans_atom};
use crate::asp::{GroundAtom, StableModel};
use crate::net::{Marking, Net, NetError, Step, StepExecution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("decoded execution does not replay: {0}")]
    Replay(#[from] NetError),
    #[error("model is inconsistent with its counterexample shape: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "loop_at", rename_all = "snake_case")]
pub enum CexShape {
    /// The final marking equals marking `l`; the execution repeats from
    /// `l + 1` forever.
    Loop(usize),
    /// The final marking is dead.
    Deadlock,
    /// The final marking enables something and no loop was chosen.
    NonMaximal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub execution: StepExecution,
    pub shape: CexShape,
}

/// Markings and steps read off a model of the execution program, checked
/// by replaying every step.
pub fn decode_execution(
    model: &StableModel,
    net: &Net,
    n: usize,
) -> Result<StepExecution, DecodeError> {
    let marking = |i: usize| -> Marking {
        net.places()
            .filter(|p| model.contains(&place_atom(net, *p, i)))
            .collect()
    };
    let step = |i: usize| -> Step {
        net.transitions()
            .filter(|t| model.contains(&trans_atom(net, *t, i)))
            .collect()
    };
    let mut e = StepExecution::empty(marking(0));
    for i in 0..n {
        e.push(step(i), marking(i + 1));
    }
    e.validate(net)?;
    Ok(e)
}

/// Execution and shape of a model of the LTL program.
pub fn decode_counterexample(
    model: &StableModel,
    net: &Net,
    n: usize,
) -> Result<Counterexample, DecodeError> {
    let execution = decode_execution(model, net, n)?;
    let next: Vec<usize> = (1..=n)
        .filter(|j| model.contains(&GroundAtom::Nl(*j)))
        .collect();
    let shape = match next.as_slice() {
        [] => {
            if model.contains(&GroundAtom::Le) {
                return Err(DecodeError::Inconsistent("le without a loop target".into()));
            }
            if model.contains(&GroundAtom::Live) {
                CexShape::NonMaximal
            } else {
                CexShape::Deadlock
            }
        }
        [j] => {
            let l = j - 1;
            if !model.contains(&GroundAtom::Le) {
                return Err(DecodeError::Inconsistent("nl without le".into()));
            }
            if let Some(i) = (l + 1..=n).find(|i| !model.contains(&GroundAtom::Il(*i))) {
                return Err(DecodeError::Inconsistent(format!("il({i}) missing inside the loop")));
            }
            if execution.markings[l] != execution.markings[n] {
                return Err(DecodeError::Inconsistent(format!("marking {l} differs from marking {n}")));
            }
            if execution.steps[n - 1].is_empty() {
                return Err(DecodeError::Inconsistent("the last step is empty".into()));
            }
            CexShape::Loop(l)
        }
        _ => return Err(DecodeError::Inconsistent(format!("several loop targets {next:?}"))),
    };
    let dead = net.deadlocked(execution.last());
    if shape == CexShape::Deadlock && !dead {
        return Err(DecodeError::Inconsistent("no live atom but the last marking is not dead".into()));
    }
    if shape == CexShape::NonMaximal && dead {
        return Err(DecodeError::Inconsistent("live atom but the last marking is dead".into()));
    }
    Ok(Counterexample { execution, shape })
}
