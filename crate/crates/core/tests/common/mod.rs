//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use stablebmc::asp::{enumerate, solve, GroundAtom, GroundProgram, SolverOptions, StableModel};
use stablebmc::check::{build_program, extensions_satisfy, CheckRequest, Query};
use stablebmc::encode::{
    decode_counterexample, decode_execution, encode_condition, encode_executions, encode_live,
    visible_transitions, CexShape, INITIAL_CONDITION, TARGET_CONDITION,
};
use stablebmc::ltl::{eval_cautious, Formula, Word};
use stablebmc::net::oracle::{execution_letters, execution_word};
use stablebmc::net::{
    oracle_ltl_counterexample, oracle_search, Marking, Net, NetBuilder, Semantics, StepExecution,
    WitnessShape,
};
use stablebmc::Condition;

/// Random program over atoms `a0 .. a{atoms-1}` mixing all four rule kinds.
pub fn random_program(rng: &mut StdRng, atoms: usize, rules: usize) -> GroundProgram {
    let atom = |rng: &mut StdRng| GroundAtom::plain(format!("a{}", rng.gen_range(0..atoms)));
    let mut p = GroundProgram::new();
    for _ in 0..rules {
        let npos = rng.gen_range(0..=2);
        let nneg = rng.gen_range(0..=2);
        let pos: Vec<_> = (0..npos).map(|_| atom(rng)).collect();
        let neg: Vec<_> = (0..nneg).map(|_| atom(rng)).collect();
        match rng.gen_range(0..10) {
            0..=4 => p.add_normal(atom(rng), pos, neg),
            5..=6 => p.add_choice(atom(rng), pos, neg),
            7..=8 => {
                if npos + nneg > 0 {
                    p.add_constraint(pos, neg)
                } else {
                    p.add_constraint([atom(rng)], [])
                }
            }
            _ => {
                let k = rng.gen_range(2..=3);
                let mut names: Vec<usize> = (0..atoms).collect();
                names.shuffle(rng);
                p.add_conflict(
                    names[..k.min(atoms)]
                        .iter()
                        .map(|i| GroundAtom::plain(format!("a{i}"))),
                );
            }
        }
    }
    p
}

/// Random net with every transition having nonempty preset and postset,
/// not necessarily safe.
pub fn random_net(rng: &mut StdRng, places: usize, transitions: usize) -> Net {
    let mut b = NetBuilder::new();
    for i in 0..places {
        b.place(format!("p{i}"));
    }
    for j in 0..transitions {
        let t = format!("t{j}");
        b.transition(&t);
        let k = rng.gen_range(1..=2.min(places));
        let pre = sample(rng, places, k);
        let k = rng.gen_range(1..=2.min(places));
        let post = sample(rng, places, k);
        for i in pre {
            b.arc(format!("p{i}"), &t);
        }
        for i in post {
            b.arc(&t, format!("p{i}"));
        }
    }
    for i in 0..places {
        if rng.gen_bool(0.4) {
            b.mark(format!("p{i}"));
        }
    }
    b.build().expect("generated nets are well formed")
}

fn sample(rng: &mut StdRng, n: usize, k: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v.truncate(k);
    v.sort();
    v
}

/// Random condition over the places of `net` with at most `depth` levels
/// of connectives.
pub fn random_condition(rng: &mut StdRng, net: &Net, depth: usize) -> Condition {
    if depth == 0 || rng.gen_bool(0.3) {
        let p = net.places().nth(rng.gen_range(0..net.num_places())).unwrap();
        return if rng.gen_bool(0.3) {
            Condition::not(Condition::Place(p))
        } else {
            Condition::Place(p)
        };
    }
    match rng.gen_range(0..3) {
        0 => Condition::not(random_condition(rng, net, depth - 1)),
        1 => Condition::and(
            random_condition(rng, net, depth - 1),
            random_condition(rng, net, depth - 1),
        ),
        _ => Condition::or(
            random_condition(rng, net, depth - 1),
            random_condition(rng, net, depth - 1),
        ),
    }
}

/// Random PNF formula of temporal/boolean nesting depth at most `depth`
/// over the place names of `net`.
pub fn random_pnf(rng: &mut StdRng, net: &Net, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..12) {
            0 => Formula::Top,
            1 => Formula::Bot,
            k => {
                let p = net.place_name(net.places().nth(rng.gen_range(0..net.num_places())).unwrap());
                if k % 3 == 0 {
                    Formula::not(Formula::atom(p))
                } else {
                    Formula::atom(p)
                }
            }
        };
    }
    let a = random_pnf(rng, net, depth - 1);
    let b = random_pnf(rng, net, depth - 1);
    match rng.gen_range(0..6) {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        2 | 3 => Formula::until(a, b),
        _ => Formula::release(a, b),
    }
}

/// Random net together with an initial condition from whose every marking
/// the net is 1-safe. Half of the conditions fix the declared initial
/// marking.
pub fn safe_instance(rng: &mut StdRng, max_places: usize, max_trans: usize) -> (Net, Condition) {
    loop {
        let places = rng.gen_range(2..=max_places);
        let trans = rng.gen_range(1..=max_trans);
        let net = random_net(rng, places, trans);
        let c0 = if rng.gen_bool(0.5) {
            Condition::exact(&net, net.initial_marking())
        } else {
            random_condition(rng, &net, 2)
        };
        let Ok(inits) = c0.markings(&net, 64) else { continue };
        if inits.is_empty() {
            continue;
        }
        if inits
            .iter()
            .all(|m| net.assert_one_safe_from(m, 10_000).is_one_safe())
        {
            return (net, c0);
        }
    }
}

/// Goal of a reachability instance; `None` asks for a deadlock.
pub fn goal(net: &Net, target: Option<&Condition>, m: &Marking) -> bool {
    match target {
        Some(c) => c.eval(m),
        None => net.deadlocked(m),
    }
}

fn request(net: &Net, query: Query, c0: &Condition, sem: Semantics) -> CheckRequest {
    let mut req = CheckRequest::new(net, query);
    req.initial = c0.clone();
    req.semantics = sem;
    req
}

/// Solves the bound-`n` reachability (or deadlock) program and compares
/// the outcome with explicit search. Returns whether a model exists.
pub fn reach_instance(
    net: &Net,
    c0: &Condition,
    target: Option<&Condition>,
    n: usize,
    sem: Semantics,
) -> Result<bool, String> {
    let query = match target {
        Some(c) => Query::Reach(c.clone()),
        None => Query::Deadlock,
    };
    let req = request(net, query, c0, sem);
    let prog = build_program(net, &req, n).map_err(|e| e.to_string())?;
    let model = solve(&prog, SolverOptions::default()).map_err(|e| e.to_string())?;
    let inits = c0.markings(net, 64).map_err(|e| e.to_string())?;
    let oracle = oracle_search(net, &inits, |m| goal(net, target, m), n, sem, 1_000_000)
        .map_err(|e| e.to_string())?;
    if model.is_some() != oracle.is_some() {
        return Err(format!(
            "bound {n} {sem}: solver {} but oracle {}\n{}",
            if model.is_some() { "found a model" } else { "found none" },
            match &oracle {
                Some(e) => net.execution_to_string(e),
                None => "found nothing".into(),
            },
            net.to_text()
        ));
    }
    if let Some(model) = model {
        let e = decode_execution(&model, net, n).map_err(|e| e.to_string())?;
        e.validate(net).map_err(|e| e.to_string())?;
        if !c0.eval(e.initial()) || !goal(net, target, e.last()) {
            return Err(format!("decoded execution misses C0 or C: {}", net.execution_to_string(&e)));
        }
        if sem == Semantics::Interleaving && !e.is_interleaving() {
            return Err("interleaving model fires a multi-transition step".into());
        }
    }
    Ok(oracle.is_some())
}

/// Outcome of one LTL instance.
#[derive(Debug, Default)]
pub struct LtlOutcome {
    pub models: usize,
    pub oracle_witness: bool,
}

/// Checks every model (up to `cap`) of the bound-`n` LTL program for `f`
/// against word evaluation, and that an explicit looping or deadlock
/// counterexample of length at most `n` implies a model.
pub fn ltl_instance(
    net: &Net,
    c0: &Condition,
    f: &Formula,
    n: usize,
    sem: Semantics,
    cap: usize,
) -> Result<LtlOutcome, String> {
    let phi = Formula::not(f.clone());
    let req = request(net, Query::Ltl(phi), c0, sem);
    assert_eq!(req.negated_formula().as_ref(), Some(f));
    let prog = build_program(net, &req, n).map_err(|e| e.to_string())?;
    let models = enumerate(&prog, cap, SolverOptions::default()).map_err(|e| e.to_string())?;
    let visible = visible_transitions(net, f).map_err(|e| e.to_string())?;
    let ctx = |msg: String, e: &StepExecution| {
        format!("{msg}\nformula {f}, bound {n}, {sem}\n{}\n{}", net.execution_to_string(e), net.to_text())
    };
    for model in &models {
        let cex = decode_counterexample(model, net, n).map_err(|e| e.to_string())?;
        let e = &cex.execution;
        if !c0.eval(e.initial()) {
            return Err(ctx("initial marking violates C0".into(), e));
        }
        if sem == Semantics::Interleaving && !e.is_interleaving() {
            return Err(ctx("multi-transition step under interleaving".into(), e));
        }
        if e.steps.iter().any(|s| visible.iter().filter(|t| s.contains(**t)).count() > 1) {
            return Err(ctx("step with two visible transitions".into(), e));
        }
        let holds = match cex.shape {
            CexShape::Loop(l) => execution_word(net, e, WitnessShape::Loop(l), f)
                .ok_or_else(|| ctx("loop does not close".into(), e))?
                .eval(f)
                .unwrap(),
            CexShape::Deadlock => execution_word(net, e, WitnessShape::Deadlock, f)
                .unwrap()
                .eval(f)
                .unwrap(),
            CexShape::NonMaximal => {
                let word = Word::finite(f.atoms_of(), execution_letters(net, e, f)).unwrap();
                eval_cautious(&word, f).unwrap()[0]
                    && extensions_satisfy(net, e, f, 200_000).unwrap() != Some(false)
            }
        };
        if !holds {
            return Err(ctx(format!("{:?} counterexample does not satisfy f", cex.shape), e));
        }
    }
    let inits = c0.markings(net, 64).map_err(|e| e.to_string())?;
    let witness = oracle_ltl_counterexample(net, &inits, f, n, 1_000_000).map_err(|e| e.to_string())?;
    if let Some(w) = &witness {
        if models.is_empty() {
            return Err(ctx(format!("oracle witness {:?} but no model", w.shape), &w.execution));
        }
    }
    Ok(LtlOutcome {
        models: models.len(),
        oracle_witness: witness.is_some(),
    })
}

fn sorted_models(p: &GroundProgram) -> Vec<StableModel> {
    let mut m = enumerate(p, usize::MAX, SolverOptions::default()).unwrap();
    m.sort();
    m
}

pub fn marking_at(net: &Net, model: &StableModel, i: usize) -> Marking {
    net.places()
        .filter(|p| model.contains(&GroundAtom::place(net.place_name(*p), i)))
        .collect()
}

/// Layering properties of the bound-`n` execution program with initial
/// condition `c0`: a target layer for `c` and a constraint on it keep
/// exactly the models satisfying `c`, and the live layer extends every
/// model uniquely.
pub fn check_layering(net: &Net, c0: &Condition, c: &Condition, n: usize) -> Result<(), String> {
    let mut base = encode_executions(net, n).map_err(|e| e.to_string())?;
    base.extend(&encode_condition(net, c0, INITIAL_CONDITION, 0));
    let base_models = sorted_models(&base);
    let expected: Vec<StableModel> = base_models
        .iter()
        .filter(|m| c.eval(&marking_at(net, m, n)))
        .cloned()
        .collect();

    let layered = base.clone().union(&encode_condition(net, c, TARGET_CONDITION, n));
    let base_atoms: BTreeSet<GroundAtom> = base.atoms().iter().cloned().collect();
    let mut projected: Vec<StableModel> = sorted_models(&layered)
        .into_iter()
        .map(|m| m.into_iter().filter(|a| base_atoms.contains(a)).collect())
        .collect();
    projected.sort();
    if projected != expected {
        return Err(format!("target layer keeps {} models, expected {}", projected.len(), expected.len()));
    }
    if let Some(m) = projected.iter().find(|m| !base.is_stable(m)) {
        return Err(format!("projection {m:?} is not stable for the base program"));
    }

    // a constraint is a filter
    if net.num_places() > 0 {
        let p = net.places().next().unwrap();
        let atom = GroundAtom::place(net.place_name(p), n);
        let mut constrained = base.clone();
        constrained.add_constraint([atom.clone()], []);
        let kept: Vec<StableModel> = base_models.iter().filter(|m| !m.contains(&atom)).cloned().collect();
        if sorted_models(&constrained) != kept {
            return Err("constraint does not act as a filter".into());
        }
    }

    let live = base.clone().union(&encode_live(net, n));
    let live_models = sorted_models(&live);
    if live_models.len() != base_models.len() {
        return Err("live layer changes the number of models".into());
    }
    for m in &live_models {
        let core: StableModel = m.iter().filter(|a| **a != GroundAtom::Live).cloned().collect();
        if !base_models.contains(&core) {
            return Err("live layer model does not extend a base model".into());
        }
        if m.contains(&GroundAtom::Live) == net.deadlocked(&marking_at(net, m, n)) {
            return Err("live disagrees with the last marking".into());
        }
    }
    Ok(())
}
