use std::collections::HashSet;

use super::{place_atom, trans_atom, EncodeError};
use crate::asp::{GroundAtom, GroundProgram};
use crate::net::{Marking, Net, TransId};

/// Step executions of `net` of at most `n` steps, idle steps first.
///
/// Rules are emitted time-major: the initial choices, then for each step
/// `i` the transition choices, effects, conflicts, frame axioms and the
/// idle rules.
pub fn encode_executions(net: &Net, n: usize) -> Result<GroundProgram, EncodeError> {
    if n == 0 {
        return Err(EncodeError::ZeroBound);
    }
    let mut prog = GroundProgram::new();
    for p in net.places() {
        prog.add_choice(place_atom(net, p, 0), [], []);
    }
    for i in 0..n {
        for t in net.transitions() {
            let pre = net.preset(t).iter().map(|p| place_atom(net, *p, i));
            prog.add_choice(trans_atom(net, t, i), pre, []);
        }
        for p in net.places() {
            for t in net.producers(p) {
                prog.add_normal(place_atom(net, p, i + 1), [trans_atom(net, *t, i)], []);
            }
        }
        let mut seen: HashSet<&[TransId]> = HashSet::new();
        for p in net.places() {
            let consumers = net.consumers(p);
            if consumers.len() >= 2 && seen.insert(consumers) {
                prog.add_conflict(consumers.iter().map(|t| trans_atom(net, *t, i)));
            }
        }
        for p in net.places() {
            let neg = net.consumers(p).iter().map(|t| trans_atom(net, *t, i));
            prog.add_normal(place_atom(net, p, i + 1), [place_atom(net, p, i)], neg);
        }
        let all = net.transitions().map(|t| trans_atom(net, t, i));
        prog.add_normal(GroundAtom::Idle(i), [], all);
        prog.add_constraint([GroundAtom::Idle(i + 1)], [GroundAtom::Idle(i)]);
    }
    Ok(prog)
}

/// At most one transition per step.
pub fn encode_interleaving(net: &Net, n: usize) -> GroundProgram {
    let mut prog = GroundProgram::new();
    if net.num_transitions() < 2 {
        return prog;
    }
    for i in 0..n {
        prog.add_conflict(net.transitions().map(|t| trans_atom(net, t, i)));
    }
    prog
}

/// `live :- preset(t)` at time `n`, one rule per distinct preset.
pub fn encode_live(net: &Net, n: usize) -> GroundProgram {
    let mut prog = GroundProgram::new();
    let mut seen = HashSet::new();
    for t in net.transitions() {
        if seen.insert(net.preset(t)) {
            let pre = net.preset(t).iter().map(|p| place_atom(net, *p, n));
            prog.add_normal(GroundAtom::Live, pre, []);
        }
    }
    prog
}

/// Live rules plus `:- live`.
pub fn encode_deadlock(net: &Net, n: usize) -> GroundProgram {
    let mut prog = encode_live(net, n);
    prog.add_constraint([GroundAtom::Live], []);
    prog
}

/// Removes place and transition atoms that cannot hold when the run starts
/// from exactly `m0`: only places of `m0` exist at time 0, a transition
/// exists at `i` when its whole preset does, and a place exists at `i+1`
/// when it existed at `i` or a producer exists at `i`. Absent atoms are
/// treated as false, which keeps the stable models of any program that
/// fixes the initial marking to `m0`, projected to the remaining atoms.
pub fn stage_atoms(prog: &GroundProgram, net: &Net, m0: &Marking, n: usize) -> GroundProgram {
    let mut place_exists = vec![vec![false; net.num_places()]; n + 1];
    let mut trans_exists = vec![vec![false; net.num_transitions()]; n];
    for p in m0.iter() {
        place_exists[0][p.index()] = true;
    }
    for i in 0..n {
        for t in net.transitions() {
            trans_exists[i][t.index()] = net.preset(t).iter().all(|p| place_exists[i][p.index()]);
        }
        for p in net.places() {
            place_exists[i + 1][p.index()] = place_exists[i][p.index()]
                || net.producers(p).iter().any(|t| trans_exists[i][t.index()]);
        }
    }
    let exists = |a: &GroundAtom| match a {
        GroundAtom::Place(name, i) => net
            .place(name)
            .map(|p| *i <= n && place_exists[*i][p.index()])
            .unwrap_or(true),
        GroundAtom::Trans(name, i) => net
            .transition(name)
            .map(|t| *i < n && trans_exists[*i][t.index()])
            .unwrap_or(true),
        _ => true,
    };
    super::simplify_absent(prog, exists)
}
