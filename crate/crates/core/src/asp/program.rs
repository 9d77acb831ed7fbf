use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use super::GroundAtom;

/// Set of true atoms.
pub type StableModel = BTreeSet<GroundAtom>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomId(pub u32);

impl AtomId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgramError {
    #[error("operation needs a normal program, found a {0} rule")]
    NotNormal(&'static str),
    #[error("operation needs a positive program")]
    NotPositive,
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: atom `{atom}` uses the reserved `_` prefix")]
    ReservedAtom { line: usize, atom: String },
    #[error("program has {atoms} atoms, over the brute-force cap of {cap}")]
    AtomCap { atoms: usize, cap: usize },
}

/// `pos, not neg` with duplicates removed, first occurrence kept.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Body {
    pub pos: Vec<AtomId>,
    pub neg: Vec<AtomId>,
}

impl Body {
    fn new(pos: Vec<AtomId>, neg: Vec<AtomId>) -> Self {
        Body {
            pos: dedup(pos),
            neg: dedup(neg),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }

    /// Body truth under an assignment of program atoms.
    pub fn holds(&self, truth: &[bool]) -> bool {
        self.pos.iter().all(|a| truth[a.index()]) && self.neg.iter().all(|a| !truth[a.index()])
    }
}

fn dedup(v: Vec<AtomId>) -> Vec<AtomId> {
    let mut seen = std::collections::HashSet::new();
    v.into_iter().filter(|a| seen.insert(*a)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// `h :- body.`
    Normal { head: AtomId, body: Body },
    /// `:- body.`
    Constraint(Body),
    /// `{h} :- body.`
    Choice { head: AtomId, body: Body },
    /// `:- 2 {a1, .., ak}.`
    Conflict(Vec<AtomId>),
}

impl Rule {
    fn kind(&self) -> &'static str {
        match self {
            Rule::Normal { .. } => "normal",
            Rule::Constraint(_) => "constraint",
            Rule::Choice { .. } => "choice",
            Rule::Conflict(_) => "conflict",
        }
    }

    pub fn head(&self) -> Option<AtomId> {
        match self {
            Rule::Normal { head, .. } | Rule::Choice { head, .. } => Some(*head),
            _ => None,
        }
    }

    pub fn body(&self) -> Option<&Body> {
        match self {
            Rule::Normal { body, .. } | Rule::Choice { body, .. } | Rule::Constraint(body) => {
                Some(body)
            }
            Rule::Conflict(_) => None,
        }
    }
}

/// Ground program over an interned atom table. Atoms enter the table only
/// through rules, so the table is exactly `Atoms(p)`.
#[derive(Clone, Debug, Default)]
pub struct GroundProgram {
    atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, AtomId>,
    rules: Vec<Rule>,
}

impl GroundProgram {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, a: GroundAtom) -> AtomId {
        if let Some(id) = self.index.get(&a) {
            return *id;
        }
        let id = AtomId(self.atoms.len() as u32);
        self.atoms.push(a.clone());
        self.index.insert(a, id);
        id
    }

    fn intern_all(&mut self, atoms: impl IntoIterator<Item = GroundAtom>) -> Vec<AtomId> {
        atoms.into_iter().map(|a| self.intern(a)).collect()
    }

    fn body(
        &mut self,
        pos: impl IntoIterator<Item = GroundAtom>,
        neg: impl IntoIterator<Item = GroundAtom>,
    ) -> Body {
        let pos = self.intern_all(pos);
        let neg = self.intern_all(neg);
        Body::new(pos, neg)
    }

    pub fn add_normal(
        &mut self,
        head: GroundAtom,
        pos: impl IntoIterator<Item = GroundAtom>,
        neg: impl IntoIterator<Item = GroundAtom>,
    ) {
        let head = self.intern(head);
        let body = self.body(pos, neg);
        self.rules.push(Rule::Normal { head, body });
    }

    pub fn add_fact(&mut self, head: GroundAtom) {
        self.add_normal(head, [], []);
    }

    pub fn add_constraint(
        &mut self,
        pos: impl IntoIterator<Item = GroundAtom>,
        neg: impl IntoIterator<Item = GroundAtom>,
    ) {
        let body = self.body(pos, neg);
        self.rules.push(Rule::Constraint(body));
    }

    pub fn add_choice(
        &mut self,
        head: GroundAtom,
        pos: impl IntoIterator<Item = GroundAtom>,
        neg: impl IntoIterator<Item = GroundAtom>,
    ) {
        let head = self.intern(head);
        let body = self.body(pos, neg);
        self.rules.push(Rule::Choice { head, body });
    }

    /// `:- 2 {atoms}`; duplicates are dropped.
    pub fn add_conflict(&mut self, atoms: impl IntoIterator<Item = GroundAtom>) {
        let atoms = dedup(self.intern_all(atoms));
        self.rules.push(Rule::Conflict(atoms));
    }

    /// Appends the rules of `other`, unifying shared atoms.
    pub fn extend(&mut self, other: &GroundProgram) {
        let map: Vec<AtomId> = other.atoms.iter().map(|a| self.intern(a.clone())).collect();
        let m = |a: &AtomId| map[a.index()];
        let mb = |b: &Body| Body {
            pos: b.pos.iter().map(m).collect(),
            neg: b.neg.iter().map(m).collect(),
        };
        for r in &other.rules {
            self.rules.push(match r {
                Rule::Normal { head, body } => Rule::Normal {
                    head: m(head),
                    body: mb(body),
                },
                Rule::Choice { head, body } => Rule::Choice {
                    head: m(head),
                    body: mb(body),
                },
                Rule::Constraint(body) => Rule::Constraint(mb(body)),
                Rule::Conflict(atoms) => Rule::Conflict(atoms.iter().map(m).collect()),
            });
        }
    }

    pub fn union(mut self, other: &GroundProgram) -> GroundProgram {
        self.extend(other);
        self
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id.index()]
    }

    pub fn atoms(&self) -> &[GroundAtom] {
        &self.atoms
    }

    pub fn lookup(&self, a: &GroundAtom) -> Option<AtomId> {
        self.index.get(a).copied()
    }

    pub fn is_normal(&self) -> bool {
        self.rules.iter().all(|r| matches!(r, Rule::Normal { .. }))
    }

    pub fn is_positive(&self) -> bool {
        self.rules
            .iter()
            .all(|r| matches!(r, Rule::Normal { body, .. } if body.neg.is_empty()))
    }

    /// Rewrites choice, constraint and conflict rules into normal rules over
    /// fresh primed and fail-flag atoms.
    pub fn expand(&self) -> GroundProgram {
        let mut out = GroundProgram {
            atoms: self.atoms.clone(),
            index: self.index.clone(),
            rules: Vec::new(),
        };
        let mut next_fail = self
            .atoms
            .iter()
            .filter_map(|a| match a {
                GroundAtom::FailFlag(k) => Some(k + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let mut fresh_fail = |out: &mut GroundProgram| {
            let id = out.intern(GroundAtom::FailFlag(next_fail));
            next_fail += 1;
            id
        };
        let mut primed_done = std::collections::HashSet::new();
        for r in &self.rules {
            match r {
                Rule::Normal { .. } => out.rules.push(r.clone()),
                Rule::Constraint(body) => {
                    let f = fresh_fail(&mut out);
                    let mut neg = body.neg.clone();
                    neg.push(f);
                    out.rules.push(Rule::Normal {
                        head: f,
                        body: Body::new(body.pos.clone(), neg),
                    });
                }
                Rule::Choice { head, body } => {
                    let primed = out.intern(GroundAtom::primed(self.atom(*head).clone()));
                    let mut neg = body.neg.clone();
                    neg.push(primed);
                    out.rules.push(Rule::Normal {
                        head: *head,
                        body: Body::new(body.pos.clone(), neg),
                    });
                    if primed_done.insert(*head) {
                        out.rules.push(Rule::Normal {
                            head: primed,
                            body: Body::new(vec![], vec![*head]),
                        });
                    }
                }
                Rule::Conflict(atoms) => {
                    let f = fresh_fail(&mut out);
                    for i in 0..atoms.len() {
                        for j in i + 1..atoms.len() {
                            out.rules.push(Rule::Normal {
                                head: f,
                                body: Body::new(vec![atoms[i], atoms[j]], vec![f]),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// Gelfond-Lifschitz reduct of a normal program.
    pub fn reduct(&self, delta: &StableModel) -> Result<GroundProgram, ProgramError> {
        let mut out = GroundProgram {
            atoms: self.atoms.clone(),
            index: self.index.clone(),
            rules: Vec::new(),
        };
        for r in &self.rules {
            let Rule::Normal { head, body } = r else {
                return Err(ProgramError::NotNormal(r.kind()));
            };
            if body.neg.iter().any(|a| delta.contains(self.atom(*a))) {
                continue;
            }
            out.rules.push(Rule::Normal {
                head: *head,
                body: Body::new(body.pos.clone(), vec![]),
            });
        }
        Ok(out)
    }

    /// Least model of a positive program.
    pub fn least_model(&self) -> Result<StableModel, ProgramError> {
        if !self.is_positive() {
            return Err(ProgramError::NotPositive);
        }
        let rules: Vec<(AtomId, &[AtomId])> = self
            .rules
            .iter()
            .map(|r| match r {
                Rule::Normal { head, body } => (*head, body.pos.as_slice()),
                _ => unreachable!("checked positive"),
            })
            .collect();
        let truth = least_model_ids(self.atoms.len(), &rules);
        Ok(self.model_of(&truth, |_| true))
    }

    fn model_of(&self, truth: &[bool], keep: impl Fn(&GroundAtom) -> bool) -> StableModel {
        truth
            .iter()
            .enumerate()
            .filter(|(_, t)| **t)
            .map(|(i, _)| self.atoms[i].clone())
            .filter(|a| keep(a))
            .collect()
    }

    /// Whether `delta` is a stable model: the reduct of the expanded program
    /// with respect to `delta`, completed with the values its auxiliary
    /// atoms are forced to, has exactly that completion as least model.
    pub fn is_stable(&self, delta: &StableModel) -> bool {
        self.expand().is_stable_expanded(delta)
    }

    fn is_stable_expanded(&self, delta: &StableModel) -> bool {
        if delta.iter().any(|a| a.is_auxiliary() || self.lookup(a).is_none()) {
            return false;
        }
        let mut completed = delta.clone();
        for a in &self.atoms {
            if let GroundAtom::Primed(base) = a {
                if !delta.contains(base) {
                    completed.insert(a.clone());
                }
            }
        }
        let reduct = self.reduct(&completed).expect("expanded programs are normal");
        reduct.least_model().expect("reducts are positive") == completed
    }

    /// Fast stability check of an assignment to this program's atoms,
    /// without materializing the expansion.
    pub(crate) fn certify(&self, truth: &[bool]) -> bool {
        let mut positive: Vec<(AtomId, &[AtomId])> = Vec::new();
        for r in &self.rules {
            match r {
                Rule::Normal { head, body } => {
                    if body.neg.iter().all(|a| !truth[a.index()]) {
                        positive.push((*head, &body.pos));
                    }
                }
                // `h :- body, not h'` survives exactly when h is true
                Rule::Choice { head, body } => {
                    if truth[head.index()] && body.neg.iter().all(|a| !truth[a.index()]) {
                        positive.push((*head, &body.pos));
                    }
                }
                Rule::Constraint(body) => {
                    if body.holds(truth) {
                        return false;
                    }
                }
                Rule::Conflict(atoms) => {
                    if atoms.iter().filter(|a| truth[a.index()]).count() >= 2 {
                        return false;
                    }
                }
            }
        }
        least_model_ids(self.atoms.len(), &positive) == truth
    }

    pub fn model_from_truth(&self, truth: &[bool]) -> StableModel {
        self.model_of(truth, |_| true)
    }

    /// Every stable model, by testing all subsets of `Atoms(p)` that avoid
    /// auxiliary atoms. Exponential; for tests only.
    pub fn brute_force_models(&self, cap: usize) -> Result<Vec<StableModel>, ProgramError> {
        let candidates: Vec<&GroundAtom> =
            self.atoms.iter().filter(|a| !a.is_auxiliary()).collect();
        if candidates.len() > cap || candidates.len() >= 64 {
            return Err(ProgramError::AtomCap {
                atoms: candidates.len(),
                cap,
            });
        }
        let expanded = self.expand();
        let mut out = Vec::new();
        for bits in 0u64..(1u64 << candidates.len()) {
            let delta: StableModel = candidates
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, a)| (*a).clone())
                .collect();
            if expanded.is_stable_expanded(&delta) {
                out.push(delta);
            }
        }
        out.sort();
        Ok(out)
    }

    fn atom_list(&self, ids: &[AtomId]) -> String {
        ids.iter()
            .map(|a| self.atom(*a).to_string())
            .collect::<Vec<_>>()
            .join(", ")
    }

    fn body_text(&self, body: &Body) -> String {
        body.pos
            .iter()
            .map(|a| self.atom(*a).to_string())
            .chain(body.neg.iter().map(|a| format!("not {}", self.atom(*a))))
            .collect::<Vec<_>>()
            .join(", ")
    }

    pub fn rule_to_string(&self, r: &Rule) -> String {
        match r {
            Rule::Normal { head, body } if body.is_empty() => format!("{}.", self.atom(*head)),
            Rule::Normal { head, body } => {
                format!("{} :- {}.", self.atom(*head), self.body_text(body))
            }
            Rule::Constraint(body) => format!(":- {}.", self.body_text(body)),
            Rule::Choice { head, body } if body.is_empty() => format!("{{{}}}.", self.atom(*head)),
            Rule::Choice { head, body } => {
                format!("{{{}}} :- {}.", self.atom(*head), self.body_text(body))
            }
            Rule::Conflict(atoms) => format!(":- 2 {{{}}}.", self.atom_list(atoms)),
        }
    }

    /// One rule per line in the ground-program text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            out.push_str(&self.rule_to_string(r));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for GroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Counter-based least model of `head :- pos` rules.
pub(crate) fn least_model_ids(num_atoms: usize, rules: &[(AtomId, &[AtomId])]) -> Vec<bool> {
    let mut truth = vec![false; num_atoms];
    let mut missing: Vec<usize> = rules.iter().map(|(_, pos)| pos.len()).collect();
    let mut watch: Vec<Vec<usize>> = vec![Vec::new(); num_atoms];
    let mut queue = Vec::new();
    for (r, (head, pos)) in rules.iter().enumerate() {
        for a in pos.iter() {
            watch[a.index()].push(r);
        }
        if pos.is_empty() && !truth[head.index()] {
            truth[head.index()] = true;
            queue.push(*head);
        }
    }
    while let Some(a) = queue.pop() {
        for &r in &watch[a.index()] {
            missing[r] -= 1;
            let head = rules[r].0;
            if missing[r] == 0 && !truth[head.index()] {
                truth[head.index()] = true;
                queue.push(head);
            }
        }
    }
    truth
}

/// Parses the ground-program text format. `%` starts a comment.
pub fn parse_program(text: &str) -> Result<GroundProgram, ProgramError> {
    let mut p = GroundProgram::new();
    let mut pending = String::new();
    let mut start_line = 1;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('%').next().unwrap_or("");
        if pending.trim().is_empty() {
            pending.clear();
            start_line = i + 1;
        }
        pending.push_str(line);
        pending.push(' ');
        if line.trim_end().ends_with('.') {
            parse_rule(&pending, start_line, &mut p)?;
            pending.clear();
        }
    }
    if !pending.trim().is_empty() {
        return Err(ProgramError::Syntax {
            line: start_line,
            column: pending.trim_end().chars().count() + 1,
            message: "rule is not terminated by `.`".into(),
        });
    }
    Ok(p)
}

struct RuleLexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl RuleLexer {
    fn new(src: &str, line: usize) -> Self {
        RuleLexer {
            chars: src.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn err(&self, message: impl Into<String>) -> ProgramError {
        ProgramError::Syntax {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        let n = s.chars().count();
        if self.chars[self.pos..].iter().take(n).copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ProgramError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`")))
        }
    }

    fn is_ident_char(c: char) -> bool {
        c.is_ascii_alphanumeric() || c == '_'
    }

    fn ident(&mut self) -> Result<String, ProgramError> {
        self.skip_ws();
        let start = self.pos;
        match self.chars.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() || *c == '_' => {}
            _ => return Err(self.err("expected an atom")),
        }
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            let dotted = c == '.'
                && self
                    .chars
                    .get(self.pos + 1)
                    .is_some_and(|d| Self::is_ident_char(*d));
            if Self::is_ident_char(c) || dotted {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn number(&mut self) -> Result<String, ProgramError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn atom(&mut self) -> Result<GroundAtom, ProgramError> {
        let name = self.ident()?;
        if name.starts_with('_') {
            return Err(ProgramError::ReservedAtom {
                line: self.line,
                atom: name,
            });
        }
        let mut text = name;
        if self.chars.get(self.pos) == Some(&'(') {
            self.pos += 1;
            let mut args = vec![self.number()?];
            while self.eat(",") {
                args.push(self.number()?);
            }
            self.expect(")")?;
            text = format!("{text}({})", args.join(","));
        }
        Ok(GroundAtom::Plain(text))
    }

    /// Literals up to the closing `.`.
    fn body(&mut self) -> Result<(Vec<GroundAtom>, Vec<GroundAtom>), ProgramError> {
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        loop {
            self.skip_ws();
            let save = self.pos;
            let negated = self.eat("not")
                && self
                    .chars
                    .get(self.pos)
                    .is_some_and(|c| c.is_whitespace());
            if !negated {
                self.pos = save;
            }
            let a = self.atom()?;
            if negated {
                neg.push(a);
            } else {
                pos.push(a);
            }
            if !self.eat(",") {
                return Ok((pos, neg));
            }
        }
    }

    fn end(&mut self) -> Result<(), ProgramError> {
        self.expect(".")?;
        self.skip_ws();
        if self.pos != self.chars.len() {
            return Err(self.err("unexpected text after `.`"));
        }
        Ok(())
    }
}

fn parse_rule(src: &str, line: usize, p: &mut GroundProgram) -> Result<(), ProgramError> {
    let mut lx = RuleLexer::new(src, line);
    if lx.eat(":-") {
        if lx.eat("2") {
            lx.expect("{")?;
            let mut atoms = vec![lx.atom()?];
            while lx.eat(",") {
                atoms.push(lx.atom()?);
            }
            lx.expect("}")?;
            lx.end()?;
            p.add_conflict(atoms);
        } else {
            let (pos, neg) = lx.body()?;
            lx.end()?;
            p.add_constraint(pos, neg);
        }
        return Ok(());
    }
    let choice = lx.eat("{");
    let head = lx.atom()?;
    if choice {
        lx.expect("}")?;
    }
    let (pos, neg) = if lx.eat(":-") {
        lx.body()?
    } else {
        (vec![], vec![])
    };
    lx.end()?;
    if choice {
        p.add_choice(head, pos, neg);
    } else {
        p.add_normal(head, pos, neg);
    }
    Ok(())
}
