//! Translations of bounded net problems into ground programs, and decoding
//! of their stable models.

mod condition;
mod decode;
mod execution;
mod ltl;

use thiserror::Error;

use crate::asp::{GroundAtom, GroundProgram, Rule};
use crate::net::{Net, PlaceId, TransId};

pub use condition::encode_condition;
pub use decode::{decode_counterexample, decode_execution, CexShape, Counterexample, DecodeError};
pub use execution::{
    encode_deadlock, encode_executions, encode_interleaving, encode_live, stage_atoms,
};
pub use ltl::{encode_ltl, visible_transitions};

/// Condition tag of the initial-marking condition.
pub const INITIAL_CONDITION: u32 = 0;
/// Condition tag of the reachability target.
pub const TARGET_CONDITION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("the bound must be at least 1")]
    ZeroBound,
    #[error("formula is not in positive normal form")]
    NotPnf,
    #[error("formula mentions `{0}`, which is not a place of the net")]
    UnknownPlace(String),
}

pub(crate) fn place_atom(net: &Net, p: PlaceId, i: usize) -> GroundAtom {
    GroundAtom::place(net.place_name(p), i)
}

pub(crate) fn trans_atom(net: &Net, t: TransId, i: usize) -> GroundAtom {
    GroundAtom::trans(net.transition_name(t), i)
}

/// Rewrites `prog` as if every atom failing `exists` were false: rules
/// needing such an atom are dropped, negative literals on it are removed,
/// and rules deriving it become constraints.
pub(crate) fn simplify_absent(
    prog: &GroundProgram,
    exists: impl Fn(&GroundAtom) -> bool,
) -> GroundProgram {
    let present: Vec<bool> = prog.atoms().iter().map(&exists).collect();
    let atoms = |ids: &[crate::asp::AtomId]| -> Vec<GroundAtom> {
        ids.iter().map(|a| prog.atom(*a).clone()).collect()
    };
    let keep = |ids: &[crate::asp::AtomId]| -> Vec<GroundAtom> {
        ids.iter()
            .filter(|a| present[a.index()])
            .map(|a| prog.atom(*a).clone())
            .collect()
    };
    let mut out = GroundProgram::new();
    for r in prog.rules() {
        if let Some(body) = r.body() {
            if body.pos.iter().any(|a| !present[a.index()]) {
                continue;
            }
        }
        match r {
            Rule::Normal { head, body } => {
                if present[head.index()] {
                    out.add_normal(prog.atom(*head).clone(), atoms(&body.pos), keep(&body.neg));
                } else {
                    out.add_constraint(atoms(&body.pos), keep(&body.neg));
                }
            }
            Rule::Choice { head, body } => {
                if present[head.index()] {
                    out.add_choice(prog.atom(*head).clone(), atoms(&body.pos), keep(&body.neg));
                }
            }
            Rule::Constraint(body) => out.add_constraint(atoms(&body.pos), keep(&body.neg)),
            Rule::Conflict(ids) => {
                let kept = keep(ids);
                if kept.len() >= 2 {
                    out.add_conflict(kept);
                }
            }
        }
    }
    out
}
