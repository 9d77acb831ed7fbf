//! Conflict-driven search for stable models.
//!
//! The program is translated to its Clark completion over atom and body
//! variables and searched with two-watched-literal propagation, first-UIP
//! clause learning, activity-based branching on atoms and Luby restarts.
//! Completion models that are not stable are cut off by an unfounded-set
//! check over the cyclic components of the positive dependency graph,
//! which adds loop clauses on demand. Every model is certified against the
//! reduct definition before it is returned.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use super::{AtomId, GroundProgram, Rule, StableModel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("solver budget of {budget} conflicts exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("solver produced an assignment that is not a stable model")]
    Uncertified,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolverOptions {
    /// Give up after this many conflicts.
    pub conflict_budget: Option<u64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub loop_clauses: u64,
    pub models: u64,
}

/// First stable model in search order.
pub fn solve(p: &GroundProgram, opts: SolverOptions) -> Result<Option<StableModel>, SolveError> {
    Solver::new(p, opts).next_model()
}

/// Up to `limit` distinct stable models, in search order.
pub fn enumerate(
    p: &GroundProgram,
    limit: usize,
    opts: SolverOptions,
) -> Result<Vec<StableModel>, SolveError> {
    let mut s = Solver::new(p, opts);
    let mut out = Vec::new();
    while out.len() < limit {
        match s.next_model()? {
            Some(m) => out.push(m),
            None => break,
        }
    }
    Ok(out)
}

type Lit = u32;

fn pos(v: usize) -> Lit {
    (v as u32) << 1
}

fn neg(v: usize) -> Lit {
    ((v as u32) << 1) | 1
}

fn var(l: Lit) -> usize {
    (l >> 1) as usize
}

fn not(l: Lit) -> Lit {
    l ^ 1
}

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;

/// Rule supporting an atom of a cyclic component: its body variable and
/// the positive body atoms inside the same component.
struct Support {
    body: usize,
    internal: Vec<usize>,
}

enum Unfounded {
    None,
    /// Loop clauses were added and their atoms set false.
    Falsified,
    Conflict(usize),
}

struct Component {
    atoms: Vec<usize>,
    /// Parallel to `atoms`.
    supports: Vec<Vec<Support>>,
}

pub struct Solver<'p> {
    program: &'p GroundProgram,
    opts: SolverOptions,
    num_atoms: usize,
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    phase: Vec<bool>,
    heap: Heap,
    seen: Vec<bool>,
    components: Vec<Component>,
    /// Component index and position of each atom in a cyclic component.
    component_of: Vec<Option<(usize, usize)>>,
    unsat: bool,
    luby_index: u32,
    conflicts_until_restart: u64,
    stats: SolveStats,
}

impl<'p> Solver<'p> {
    pub fn new(program: &'p GroundProgram, opts: SolverOptions) -> Self {
        let num_atoms = program.num_atoms();
        let mut bodies: HashMap<(Vec<usize>, Vec<usize>), usize> = HashMap::new();
        let mut body_lits: Vec<Vec<Lit>> = Vec::new();
        let mut rule_body: Vec<Option<usize>> = Vec::with_capacity(program.len());
        let mut occurrences = vec![0.0f64; num_atoms];
        for r in program.rules() {
            if let Some(h) = r.head() {
                occurrences[h.index()] += 1.0;
            }
            if let Rule::Conflict(atoms) = r {
                for a in atoms {
                    occurrences[a.index()] += 1.0;
                }
            }
            let b = match r {
                Rule::Normal { body, .. } | Rule::Choice { body, .. } => {
                    let mut key = (
                        body.pos.iter().map(|a| a.index()).collect::<Vec<_>>(),
                        body.neg.iter().map(|a| a.index()).collect::<Vec<_>>(),
                    );
                    key.0.sort_unstable();
                    key.1.sort_unstable();
                    for a in key.0.iter().chain(&key.1) {
                        occurrences[*a] += 1.0;
                    }
                    let next = num_atoms + body_lits.len();
                    let id = *bodies.entry(key.clone()).or_insert_with(|| {
                        body_lits.push(
                            key.0.iter().map(|a| pos(*a)).chain(key.1.iter().map(|a| neg(*a))).collect(),
                        );
                        next
                    });
                    Some(id)
                }
                Rule::Constraint(body) => {
                    for a in body.pos.iter().chain(&body.neg) {
                        occurrences[a.index()] += 1.0;
                    }
                    None
                }
                Rule::Conflict(_) => None,
            };
            rule_body.push(b);
        }
        let num_vars = num_atoms + body_lits.len();

        let mut s = Solver {
            program,
            opts,
            num_atoms,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            value: vec![UNDEF; num_vars],
            level: vec![0; num_vars],
            reason: vec![None; num_vars],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; num_vars],
            var_inc: 1.0,
            phase: vec![false; num_vars],
            heap: Heap::default(),
            seen: vec![false; num_vars],
            components: Vec::new(),
            component_of: vec![None; num_atoms],
            unsat: false,
            luby_index: 0,
            conflicts_until_restart: 0,
            stats: SolveStats::default(),
        };
        s.activity[..num_atoms].copy_from_slice(&occurrences);
        s.heap.resize(num_vars);
        for v in 0..num_atoms {
            s.heap.insert(v, &s.activity);
        }
        s.next_restart();

        // body definitions
        for (i, lits) in body_lits.iter().enumerate() {
            let b = num_atoms + i;
            let mut long = vec![pos(b)];
            for &l in lits {
                s.add_input_clause(vec![neg(b), l]);
                long.push(not(l));
            }
            s.add_input_clause(long);
        }
        // rules
        let mut supports: Vec<Vec<usize>> = vec![Vec::new(); num_atoms];
        for (r, b) in program.rules().iter().zip(&rule_body) {
            match r {
                Rule::Normal { head, .. } => {
                    let b = b.expect("normal rules have bodies");
                    s.add_input_clause(vec![neg(b), pos(head.index())]);
                    supports[head.index()].push(b);
                }
                Rule::Choice { head, .. } => {
                    supports[head.index()].push(b.expect("choice rules have bodies"));
                }
                Rule::Constraint(body) => {
                    let c = body
                        .pos
                        .iter()
                        .map(|a| neg(a.index()))
                        .chain(body.neg.iter().map(|a| pos(a.index())))
                        .collect();
                    s.add_input_clause(c);
                }
                Rule::Conflict(atoms) => {
                    for i in 0..atoms.len() {
                        for j in i + 1..atoms.len() {
                            s.add_input_clause(vec![neg(atoms[i].index()), neg(atoms[j].index())]);
                        }
                    }
                }
            }
        }
        // completion
        for (a, sup) in supports.iter_mut().enumerate() {
            sup.sort_unstable();
            sup.dedup();
            let mut c = vec![neg(a)];
            c.extend(sup.iter().map(|b| pos(*b)));
            s.add_input_clause(c);
        }
        s.build_components(&rule_body);
        if !s.unsat && s.propagate().is_some() {
            s.unsat = true;
        }
        s
    }

    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    fn build_components(&mut self, rule_body: &[Option<usize>]) {
        let n = self.num_atoms;
        let mut edges: Vec<Vec<usize>> = vec![Vec::new(); n];
        for r in self.program.rules() {
            if let (Some(h), Some(body)) = (r.head(), r.body()) {
                for a in &body.pos {
                    edges[h.index()].push(a.index());
                }
            }
        }
        let sccs = tarjan(&edges);
        let mut comp_id = vec![usize::MAX; n];
        for scc in sccs {
            let cyclic = scc.len() > 1 || edges[scc[0]].contains(&scc[0]);
            if !cyclic {
                continue;
            }
            let c = self.components.len();
            for (i, a) in scc.iter().enumerate() {
                comp_id[*a] = c;
                self.component_of[*a] = Some((c, i));
            }
            self.components.push(Component {
                supports: (0..scc.len()).map(|_| Vec::new()).collect(),
                atoms: scc,
            });
        }
        for (r, b) in self.program.rules().iter().zip(rule_body) {
            let (Some(h), Some(body), Some(b)) = (r.head(), r.body(), b) else {
                continue;
            };
            let Some((c, i)) = self.component_of[h.index()] else {
                continue;
            };
            let internal = body
                .pos
                .iter()
                .map(|a| a.index())
                .filter(|a| comp_id[*a] == c)
                .collect();
            self.components[c].supports[i].push(Support { body: *b, internal });
        }
    }

    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[var(l)];
        if l & 1 == 1 {
            -v
        } else {
            v
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = var(l);
        self.value[v] = if l & 1 == 1 { FALSE } else { TRUE };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Adds a clause while at decision level 0.
    fn add_input_clause(&mut self, mut c: Vec<Lit>) {
        if self.unsat {
            return;
        }
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] == not(w[1])) {
            return;
        }
        c.retain(|l| self.lit_value(*l) != FALSE || self.level[var(*l)] != 0);
        if c.iter().any(|l| self.lit_value(*l) == TRUE && self.level[var(*l)] == 0) {
            return;
        }
        match c.len() {
            0 => self.unsat = true,
            1 => {
                if self.lit_value(c[0]) == UNDEF {
                    self.enqueue(c[0], None);
                }
            }
            _ => {
                self.attach(c);
            }
        }
    }

    fn attach(&mut self, c: Vec<Lit>) -> usize {
        let id = self.clauses.len();
        self.watches[c[0] as usize].push(id);
        self.watches[c[1] as usize].push(id);
        self.clauses.push(c);
        id
    }

    /// Unit propagation; returns a conflicting clause.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let falsified = not(p);
            let mut ws = std::mem::take(&mut self.watches[falsified as usize]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let cid = ws[i];
                let c = &mut self.clauses[cid];
                if c[0] == falsified {
                    c.swap(0, 1);
                }
                let first = c[0];
                if lit_value_raw(&self.value, first) == TRUE {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.len() {
                    if lit_value_raw(&self.value, c[k]) != FALSE {
                        c.swap(1, k);
                        let w = c[1];
                        self.watches[w as usize].push(cid);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if lit_value_raw(&self.value, first) == FALSE {
                    conflict = Some(cid);
                    break;
                }
                self.enqueue(first, Some(cid));
                i += 1;
            }
            let rest = std::mem::replace(&mut self.watches[falsified as usize], ws);
            self.watches[falsified as usize].extend(rest);
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn backtrack(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for k in (lim..self.trail.len()).rev() {
            let v = var(self.trail[k]);
            self.phase[v] = self.value[v] == TRUE;
            self.value[v] = UNDEF;
            self.reason[v] = None;
            if v < self.num_atoms {
                self.heap.insert(v, &self.activity);
            }
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = self.trail.len();
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        if v < self.num_atoms {
            self.heap.increased(v, &self.activity);
        }
    }

    /// First-UIP analysis of a clause that is false at the current level.
    /// Returns the learnt clause (asserting literal first) and the
    /// backjump level.
    fn analyze(&mut self, conflict: usize) -> (Vec<Lit>, u32) {
        let current = self.decision_level();
        let mut learnt = vec![0];
        let mut pending = 0;
        let mut idx = self.trail.len();
        let mut clause = conflict;
        let mut p: Option<Lit> = None;
        loop {
            let lits = self.clauses[clause].clone();
            for &q in &lits {
                if Some(q) == p {
                    continue;
                }
                let v = var(q);
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                self.seen[v] = true;
                self.bump(v);
                if self.level[v] == current {
                    pending += 1;
                } else {
                    learnt.push(q);
                }
            }
            loop {
                idx -= 1;
                if self.seen[var(self.trail[idx])] {
                    break;
                }
            }
            let l = self.trail[idx];
            self.seen[var(l)] = false;
            pending -= 1;
            if pending == 0 {
                learnt[0] = not(l);
                break;
            }
            p = Some(l);
            clause = self.reason[var(l)].expect("implied literal at the conflict level");
        }
        for l in &learnt[1..] {
            self.seen[var(*l)] = false;
        }
        self.var_inc /= 0.95;
        let mut back = 0;
        if learnt.len() > 1 {
            let (k, lvl) = learnt[1..]
                .iter()
                .enumerate()
                .map(|(k, l)| (k + 1, self.level[var(*l)]))
                .max_by_key(|(_, lvl)| *lvl)
                .expect("nonempty");
            learnt.swap(1, k);
            back = lvl;
        }
        (learnt, back)
    }

    /// Learns from `conflict` and backjumps. Returns false when the
    /// conflict holds at level 0.
    fn resolve_conflict(&mut self, conflict: usize) -> Result<bool, SolveError> {
        self.stats.conflicts += 1;
        if let Some(budget) = self.opts.conflict_budget {
            if self.stats.conflicts > budget {
                return Err(SolveError::BudgetExceeded { budget });
            }
        }
        let top = self.clauses[conflict]
            .iter()
            .map(|l| self.level[var(*l)])
            .max()
            .unwrap_or(0);
        if top == 0 {
            return Ok(false);
        }
        self.backtrack(top);
        let (learnt, back) = self.analyze(conflict);
        self.backtrack(back);
        if learnt.len() == 1 {
            self.enqueue(learnt[0], None);
        } else {
            let l0 = learnt[0];
            let id = self.attach(learnt);
            self.enqueue(l0, Some(id));
        }
        self.conflicts_until_restart = self.conflicts_until_restart.saturating_sub(1);
        Ok(true)
    }

    /// Finds an unfounded set among the non-false atoms of a cyclic
    /// component and falsifies it through loop clauses.
    fn check_unfounded(&mut self) -> Unfounded {
        for c in 0..self.components.len() {
            let comp = &self.components[c];
            let n = comp.atoms.len();
            let mut supported = vec![false; n];
            let mut changed = true;
            while changed {
                changed = false;
                for i in 0..n {
                    if supported[i] || self.value[comp.atoms[i]] == FALSE {
                        continue;
                    }
                    let ok = comp.supports[i].iter().any(|s| {
                        self.value[s.body] != FALSE
                            && s.internal.iter().all(|a| {
                                let (_, j) = self.component_of[*a].expect("same component");
                                supported[j]
                            })
                    });
                    if ok {
                        supported[i] = true;
                        changed = true;
                    }
                }
            }
            let unfounded: Vec<usize> = (0..n)
                .filter(|&i| !supported[i] && self.value[comp.atoms[i]] != FALSE)
                .collect();
            if unfounded.is_empty() {
                continue;
            }
            let in_set: Vec<bool> = {
                let mut v = vec![false; n];
                for &i in &unfounded {
                    v[i] = true;
                }
                v
            };
            let mut external: Vec<usize> = Vec::new();
            for &i in &unfounded {
                for s in &comp.supports[i] {
                    let inside = s.internal.iter().any(|a| {
                        let (_, j) = self.component_of[*a].expect("same component");
                        in_set[j]
                    });
                    if !inside {
                        external.push(s.body);
                    }
                }
            }
            external.sort_unstable();
            external.dedup();
            let atoms: Vec<usize> = unfounded.iter().map(|&i| comp.atoms[i]).collect();
            return match self.add_loop_clauses(&atoms, &external) {
                Some(conflict) => Unfounded::Conflict(conflict),
                None => Unfounded::Falsified,
            };
        }
        Unfounded::None
    }

    fn add_loop_clauses(&mut self, atoms: &[usize], external: &[usize]) -> Option<usize> {
        // external bodies are all false here
        let mut ext: Vec<Lit> = external.iter().map(|b| pos(*b)).collect();
        ext.sort_by_key(|l| std::cmp::Reverse(self.level[var(*l)]));
        if ext.is_empty() && self.decision_level() > 0 {
            // the atoms can never be founded
            self.backtrack(0);
            for &a in atoms {
                self.stats.loop_clauses += 1;
                if self.value[a] == UNDEF {
                    self.enqueue(neg(a), None);
                } else if self.value[a] == TRUE {
                    self.unsat = true;
                    return None;
                }
            }
            return None;
        }
        for &a in atoms {
            self.stats.loop_clauses += 1;
            let mut c = vec![neg(a)];
            c.extend(ext.iter().copied());
            match self.value[a] {
                TRUE => {
                    if c.len() == 1 {
                        self.unsat = true;
                        return None;
                    }
                    // watch the two highest-level literals
                    c.sort_by_key(|l| std::cmp::Reverse(self.level[var(*l)]));
                    return Some(self.attach(c));
                }
                UNDEF => {
                    if c.len() == 1 {
                        self.enqueue(c[0], None);
                    } else {
                        let id = self.attach(c);
                        self.enqueue(neg(a), Some(id));
                    }
                }
                _ => {}
            }
        }
        None
    }

    fn next_restart(&mut self) {
        self.luby_index += 1;
        self.conflicts_until_restart = 100 * luby(self.luby_index);
    }

    fn pick_branch(&mut self) -> Option<usize> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.value[v] == UNDEF {
                return Some(v);
            }
        }
        None
    }

    /// Searches for the next stable model not yet returned.
    pub fn next_model(&mut self) -> Result<Option<StableModel>, SolveError> {
        loop {
            if self.unsat {
                return Ok(None);
            }
            if let Some(conflict) = self.propagate() {
                if !self.resolve_conflict(conflict)? {
                    self.unsat = true;
                }
                continue;
            }
            match self.check_unfounded() {
                Unfounded::Conflict(conflict) => {
                    if !self.resolve_conflict(conflict)? {
                        self.unsat = true;
                    }
                    continue;
                }
                Unfounded::Falsified => continue,
                Unfounded::None => {}
            }
            if self.conflicts_until_restart == 0 {
                self.stats.restarts += 1;
                self.backtrack(0);
                self.next_restart();
                continue;
            }
            match self.pick_branch() {
                Some(v) => {
                    self.stats.decisions += 1;
                    self.trail_lim.push(self.trail.len());
                    let l = if self.phase[v] { pos(v) } else { neg(v) };
                    self.enqueue(l, None);
                }
                None => return self.report_model().map(Some),
            }
        }
    }

    fn report_model(&mut self) -> Result<StableModel, SolveError> {
        let truth: Vec<bool> = self.value[..self.num_atoms].iter().map(|v| *v == TRUE).collect();
        if !self.program.certify(&truth) {
            return Err(SolveError::Uncertified);
        }
        self.stats.models += 1;
        let model = self.program.model_from_truth(&truth);
        // block this assignment of the decision atoms
        let block: Vec<Lit> = self.trail_lim.iter().map(|&k| not(self.trail[k])).collect();
        self.backtrack(0);
        self.add_input_clause(block);
        Ok(model)
    }

    /// Value of `a` in the current assignment, if decided.
    pub fn value_of(&self, a: AtomId) -> Option<bool> {
        match self.value[a.index()] {
            TRUE => Some(true),
            FALSE => Some(false),
            _ => None,
        }
    }
}

fn lit_value_raw(value: &[i8], l: Lit) -> i8 {
    let v = value[var(l)];
    if l & 1 == 1 {
        -v
    } else {
        v
    }
}

/// `luby(i)` for `i >= 1`: 1 1 2 1 1 2 4 ...
fn luby(i: u32) -> u64 {
    let mut i = i as u64;
    loop {
        let mut k = 1;
        while (1u64 << k) - 1 < i {
            k += 1;
        }
        if (1u64 << k) - 1 == i {
            return 1 << (k - 1);
        }
        i -= (1u64 << (k - 1)) - 1;
    }
}

/// Strongly connected components, iteratively.
fn tarjan(edges: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = edges.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if *next < edges[v].len() {
                let w = edges[v][*next];
                *next += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut scc = Vec::new();
                    loop {
                        let w = stack.pop().expect("on stack");
                        on_stack[w] = false;
                        scc.push(w);
                        if w == v {
                            break;
                        }
                    }
                    scc.sort_unstable();
                    out.push(scc);
                }
            }
        }
    }
    out
}

/// Max-heap of variables by activity, ties to the smaller index.
#[derive(Default)]
struct Heap {
    items: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl Heap {
    fn resize(&mut self, n: usize) {
        self.pos.resize(n, None);
    }

    fn better(a: usize, b: usize, act: &[f64]) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.pos[v].is_some() {
            return;
        }
        self.items.push(v);
        self.pos[v] = Some(self.items.len() - 1);
        self.up(self.items.len() - 1, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if let Some(i) = self.pos[v] {
            self.up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        if self.items.is_empty() {
            return None;
        }
        let top = self.items.swap_remove(0);
        self.pos[top] = None;
        if !self.items.is_empty() {
            self.pos[self.items[0]] = Some(0);
            self.down(0, act);
        }
        Some(top)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(self.items[i], self.items[parent], act) {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < self.items.len() && Self::better(self.items[l], self.items[best], act) {
                best = l;
            }
            if r < self.items.len() && Self::better(self.items[r], self.items[best], act) {
                best = r;
            }
            if best == i {
                return;
            }
            self.swap(i, best);
            i = best;
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.items.swap(i, j);
        self.pos[self.items[i]] = Some(i);
        self.pos[self.items[j]] = Some(j);
    }
}
