//! Bound iteration, verification and reporting shared by the command line
//! and the browser demo.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::asp::{GroundProgram, SolveError, SolveStats, Solver, SolverOptions};
use crate::condition::{Condition, ConditionError};
use crate::encode::{
    decode_counterexample, decode_execution, encode_condition, encode_deadlock,
    encode_executions, encode_interleaving, encode_live, encode_ltl, stage_atoms, CexShape,
    DecodeError, EncodeError, INITIAL_CONDITION, TARGET_CONDITION,
};
use crate::ltl::{eval_cautious, Formula, Word};
use crate::net::oracle::{execution_letters, execution_word};
use crate::net::{oracle_search, Marking, Net, OracleError, Semantics, StepExecution, WitnessShape};

pub const REPORT_SCHEMA: u32 = 1;

/// Largest number of candidate initial markings enumerated for the bound-0
/// oracle path.
const MARKING_LIMIT: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    /// A reachable dead marking.
    Deadlock,
    /// A reachable marking satisfying the condition.
    Reach(Condition),
    /// An execution violating the specification.
    Ltl(Formula),
}

impl Query {
    pub fn mode(&self) -> &'static str {
        match self {
            Query::Deadlock => "deadlock",
            Query::Reach(_) => "reach",
            Query::Ltl(_) => "ltl",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckRequest {
    pub query: Query,
    /// Initial-marking condition.
    pub initial: Condition,
    pub semantics: Semantics,
    pub min_bound: usize,
    pub max_bound: usize,
    pub solver_budget: Option<u64>,
    /// Node budget of the explicit-state searches.
    pub oracle_budget: usize,
    /// Create place and transition atoms only from the first step they can
    /// hold on. Needs an initial condition fixing a single marking.
    pub staged: bool,
}

impl CheckRequest {
    /// Request starting from the declared initial marking of `net`.
    pub fn new(net: &Net, query: Query) -> Self {
        CheckRequest {
            query,
            initial: Condition::exact(net, net.initial_marking()),
            semantics: Semantics::Step,
            min_bound: 1,
            max_bound: 10,
            solver_budget: None,
            oracle_budget: 1_000_000,
            staged: false,
        }
    }

    /// Formula handed to the encoder: the negated specification in PNF.
    pub fn negated_formula(&self) -> Option<Formula> {
        match &self.query {
            Query::Ltl(phi) => Some(Formula::not(phi.clone()).to_pnf()),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Condition(#[from] ConditionError),
    #[error("invalid request: {0}")]
    Request(String),
    #[error("counterexample failed verification: {0}")]
    Verification(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

impl CheckError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CheckError::Verification(_) | CheckError::Decode(_) => 4,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "COUNTEREXAMPLE")]
    Counterexample,
    #[serde(rename = "NO_CEX_WITHIN_BOUND")]
    NoCexWithinBound,
    #[serde(rename = "BUDGET_EXCEEDED")]
    BudgetExceeded,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Counterexample => "COUNTEREXAMPLE",
            Verdict::NoCexWithinBound => "NO_CEX_WITHIN_BOUND",
            Verdict::BudgetExceeded => "BUDGET_EXCEEDED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportCex {
    /// `reach`, `deadlock`, `loop` or `non_maximal`.
    pub shape: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loop_at: Option<usize>,
    /// Alternating marking and step name lists, starting and ending with a
    /// marking.
    pub execution: Vec<Vec<String>>,
    #[serde(skip)]
    pub raw: StepExecution,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub replay_ok: bool,
    pub oracle_semantics_ok: bool,
    /// The counterexample is a non-maximal prefix checked cautiously.
    pub cautious: bool,
    /// For cautious counterexamples: whether every maximal extension found
    /// by bounded search satisfies the formula. `None` when the search
    /// exceeded the oracle budget.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension_verified: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundStats {
    pub bound: usize,
    pub rules: usize,
    pub atoms: usize,
    #[serde(flatten)]
    pub solver: SolveStats,
    pub time_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub mode: &'static str,
    pub semantics: Semantics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negated_formula: Option<String>,
    pub min_bound: usize,
    pub max_bound: usize,
    pub verdict: Verdict,
    pub bound_found: Option<usize>,
    pub counterexample: Option<ReportCex>,
    pub verification: Option<Verification>,
    pub statistics: Vec<BoundStats>,
    pub total_time_ms: u64,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Counterexample => 0,
            Verdict::NoCexWithinBound => 1,
            Verdict::BudgetExceeded => 3,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Human-readable summary.
    pub fn to_text(&self, net: &Net) -> String {
        let mut out = format!("verdict: {}\n", self.verdict);
        out.push_str(&format!("mode: {} ({})\n", self.mode, self.semantics));
        if let Some(f) = &self.formula {
            out.push_str(&format!("specification: {f}\n"));
        }
        match self.bound_found {
            Some(n) => out.push_str(&format!("bound: {n}\n")),
            None => out.push_str(&format!("bounds tried: {}..{}\n", self.min_bound, self.max_bound)),
        }
        if let Some(cex) = &self.counterexample {
            match cex.loop_at {
                Some(l) => out.push_str(&format!("shape: loop back to marking {l}\n")),
                None => out.push_str(&format!("shape: {}\n", cex.shape)),
            }
            let e = &cex.raw;
            out.push_str(&format!("  M0 = {}\n", net.marking_to_string(&e.markings[0])));
            for (i, s) in e.steps.iter().enumerate() {
                out.push_str(&format!(
                    "  S{i} = {}\n  M{} = {}\n",
                    net.step_to_string(s),
                    i + 1,
                    net.marking_to_string(&e.markings[i + 1])
                ));
            }
        }
        if let Some(v) = &self.verification {
            out.push_str(&format!(
                "verification: replay {}, semantics {}",
                ok(v.replay_ok),
                ok(v.oracle_semantics_ok)
            ));
            if v.cautious {
                let ext = match v.extension_verified {
                    Some(true) => "all extensions checked",
                    Some(false) => "an extension violates the formula",
                    None => "extension check over budget",
                };
                out.push_str(&format!(", cautious ({ext})"));
            }
            out.push('\n');
        }
        let rules: usize = self.statistics.iter().map(|s| s.rules).max().unwrap_or(0);
        out.push_str(&format!(
            "largest program: {rules} rules; total time {} ms\n",
            self.total_time_ms
        ));
        out
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

/// Milliseconds since an arbitrary origin; always zero on targets without
/// a clock.
struct Clock {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Clock {
    fn start() -> Self {
        Clock {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    fn ms(&self) -> u64 {
        #[cfg(not(target_arch = "wasm32"))]
        {
            self.start.elapsed().as_millis() as u64
        }
        #[cfg(target_arch = "wasm32")]
        {
            0
        }
    }
}

/// Ground program for bound `n >= 1`.
pub fn build_program(net: &Net, req: &CheckRequest, n: usize) -> Result<GroundProgram, CheckError> {
    let mut prog = encode_executions(net, n)?;
    prog.extend(&encode_condition(net, &req.initial, INITIAL_CONDITION, 0));
    match &req.query {
        Query::Deadlock => prog.extend(&encode_deadlock(net, n)),
        Query::Reach(c) => prog.extend(&encode_condition(net, c, TARGET_CONDITION, n)),
        Query::Ltl(_) => {
            let f = req.negated_formula().expect("ltl query");
            prog.extend(&encode_live(net, n));
            prog.extend(&encode_ltl(net, &f, n)?);
        }
    }
    if req.semantics == Semantics::Interleaving {
        prog.extend(&encode_interleaving(net, n));
    }
    if req.staged {
        let m0 = req.initial.fixed_marking(net).ok_or_else(|| {
            CheckError::Request("staged atoms need an initial condition fixing one marking".into())
        })?;
        prog = stage_atoms(&prog, net, &m0, n);
    }
    Ok(prog)
}

fn validate(net: &Net, req: &CheckRequest) -> Result<(), CheckError> {
    if req.min_bound > req.max_bound {
        return Err(CheckError::Request(format!(
            "empty bound range {}..{}",
            req.min_bound, req.max_bound
        )));
    }
    if let Query::Ltl(phi) = &req.query {
        for a in phi.atoms_of() {
            if net.place(&a).is_err() {
                return Err(EncodeError::UnknownPlace(a).into());
            }
        }
    }
    if req.staged && req.initial.fixed_marking(net).is_none() {
        return Err(CheckError::Request(
            "staged atoms need an initial condition fixing one marking".into(),
        ));
    }
    Ok(())
}

/// Iterates the bounds of `req` and returns the first verified
/// counterexample, or why there is none.
pub fn run_check(net: &Net, req: &CheckRequest) -> Result<Report, CheckError> {
    run_check_with_program(net, req).map(|(r, _)| r)
}

/// Like [`run_check`], also returning the program of the last bound that
/// reached the solver.
pub fn run_check_with_program(
    net: &Net,
    req: &CheckRequest,
) -> Result<(Report, Option<GroundProgram>), CheckError> {
    validate(net, req)?;
    let clock = Clock::start();
    let f = req.negated_formula();
    let mut report = Report {
        schema: REPORT_SCHEMA,
        mode: req.query.mode(),
        semantics: req.semantics,
        formula: match &req.query {
            Query::Ltl(phi) => Some(phi.to_string()),
            _ => None,
        },
        negated_formula: f.as_ref().map(ToString::to_string),
        min_bound: req.min_bound,
        max_bound: req.max_bound,
        verdict: Verdict::NoCexWithinBound,
        bound_found: None,
        counterexample: None,
        verification: None,
        statistics: Vec::new(),
        total_time_ms: 0,
    };
    let mut last_program = None;
    let mut start = req.min_bound;
    if start == 0 {
        if matches!(req.query, Query::Ltl(_)) {
            start = 1;
        } else {
            match bound_zero(net, req)? {
                Some(found) => {
                    report.verdict = Verdict::Counterexample;
                    report.bound_found = Some(0);
                    report.counterexample = Some(found.0);
                    report.verification = Some(found.1);
                    report.total_time_ms = clock.ms();
                    return Ok((report, None));
                }
                None => start = 1,
            }
        }
    }
    for n in start..=req.max_bound {
        let bound_clock = Clock::start();
        let prog = build_program(net, req, n)?;
        let mut solver = Solver::new(
            &prog,
            SolverOptions {
                conflict_budget: req.solver_budget,
            },
        );
        let result = solver.next_model();
        report.statistics.push(BoundStats {
            bound: n,
            rules: prog.len(),
            atoms: prog.num_atoms(),
            solver: solver.stats(),
            time_ms: bound_clock.ms(),
        });
        let model = match result {
            Ok(m) => m,
            Err(SolveError::BudgetExceeded { .. }) => {
                report.verdict = Verdict::BudgetExceeded;
                last_program = Some(prog);
                break;
            }
            Err(SolveError::Uncertified) => {
                return Err(CheckError::Verification(
                    "solver returned an uncertified model".into(),
                ))
            }
        };
        drop(solver);
        last_program = Some(prog);
        let Some(model) = model else { continue };
        let (cex, verification) = match &req.query {
            Query::Ltl(_) => {
                let f = f.as_ref().expect("ltl query");
                let c = decode_counterexample(&model, net, n)?;
                let v = verify_ltl(net, req, &c.execution, c.shape, f)?;
                (report_cex(net, &c.execution, c.shape), v)
            }
            _ => {
                let e = decode_execution(&model, net, n)?;
                let v = verify_goal(net, req, &e)?;
                let shape = if req.query == Query::Deadlock {
                    CexShape::Deadlock
                } else {
                    CexShape::NonMaximal
                };
                let mut c = report_cex(net, &e, shape);
                if let Query::Reach(_) = req.query {
                    c.shape = "reach";
                }
                (c, v)
            }
        };
        report.verdict = Verdict::Counterexample;
        report.bound_found = Some(n);
        report.counterexample = Some(cex);
        report.verification = Some(verification);
        break;
    }
    report.total_time_ms = clock.ms();
    Ok((report, last_program))
}

fn goal_holds(net: &Net, query: &Query, m: &Marking) -> bool {
    match query {
        Query::Deadlock => net.deadlocked(m),
        Query::Reach(c) => c.eval(m),
        Query::Ltl(_) => unreachable!("ltl goals are formulas"),
    }
}

fn bound_zero(net: &Net, req: &CheckRequest) -> Result<Option<(ReportCex, Verification)>, CheckError> {
    let inits = req.initial.markings(net, MARKING_LIMIT)?;
    let found = oracle_search(
        net,
        &inits,
        |m| goal_holds(net, &req.query, m),
        0,
        req.semantics,
        req.oracle_budget.max(inits.len() + 1),
    )
    .map_err(|e| CheckError::Request(e.to_string()))?;
    Ok(found.map(|e| {
        let shape = if req.query == Query::Deadlock {
            CexShape::Deadlock
        } else {
            CexShape::NonMaximal
        };
        let mut c = report_cex(net, &e, shape);
        if let Query::Reach(_) = req.query {
            c.shape = "reach";
        }
        (
            c,
            Verification {
                replay_ok: true,
                oracle_semantics_ok: true,
                ..Verification::default()
            },
        )
    }))
}

fn report_cex(net: &Net, e: &StepExecution, shape: CexShape) -> ReportCex {
    let sorted = |mut names: Vec<String>| {
        names.sort();
        names
    };
    let mut execution = vec![sorted(net.marking_names(&e.markings[0]))];
    for (s, m) in e.steps.iter().zip(&e.markings[1..]) {
        execution.push(sorted(net.step_names(s)));
        execution.push(sorted(net.marking_names(m)));
    }
    let (shape, loop_at) = match shape {
        CexShape::Loop(l) => ("loop", Some(l)),
        CexShape::Deadlock => ("deadlock", None),
        CexShape::NonMaximal => ("non_maximal", None),
    };
    ReportCex {
        shape,
        loop_at,
        execution,
        raw: e.clone(),
    }
}

fn check_common(net: &Net, req: &CheckRequest, e: &StepExecution) -> Result<(), CheckError> {
    e.validate(net)
        .map_err(|err| CheckError::Verification(format!("replay failed: {err}")))?;
    if !req.initial.eval(e.initial()) {
        return Err(CheckError::Verification(
            "initial marking violates the initial condition".into(),
        ));
    }
    if req.semantics == Semantics::Interleaving && !e.is_interleaving() {
        return Err(CheckError::Verification(
            "interleaving run fires a step of several transitions".into(),
        ));
    }
    Ok(())
}

fn verify_goal(net: &Net, req: &CheckRequest, e: &StepExecution) -> Result<Verification, CheckError> {
    check_common(net, req, e)?;
    if !goal_holds(net, &req.query, e.last()) {
        return Err(CheckError::Verification(format!(
            "final marking {} does not satisfy the target",
            net.marking_to_string(e.last())
        )));
    }
    Ok(Verification {
        replay_ok: true,
        oracle_semantics_ok: true,
        ..Verification::default()
    })
}

fn verify_ltl(
    net: &Net,
    req: &CheckRequest,
    e: &StepExecution,
    shape: CexShape,
    f: &Formula,
) -> Result<Verification, CheckError> {
    check_common(net, req, e)?;
    let mut v = Verification {
        replay_ok: true,
        ..Verification::default()
    };
    let holds = match shape {
        CexShape::Loop(l) => eval_word(net, e, WitnessShape::Loop(l), f)?,
        CexShape::Deadlock => eval_word(net, e, WitnessShape::Deadlock, f)?,
        CexShape::NonMaximal => {
            v.cautious = true;
            let letters = execution_letters(net, e, f);
            let word = Word::finite(f.atoms_of(), letters)
                .map_err(|err| CheckError::Verification(err.to_string()))?;
            let ok = eval_cautious(&word, f)
                .map_err(|err| CheckError::Verification(err.to_string()))?[0];
            if ok {
                v.extension_verified = extensions_satisfy(net, e, f, req.oracle_budget)?;
                if v.extension_verified == Some(false) {
                    return Err(CheckError::Verification(
                        "a maximal extension of the cautious counterexample violates the formula"
                            .into(),
                    ));
                }
            }
            ok
        }
    };
    if !holds {
        return Err(CheckError::Verification(
            "the counterexample word does not satisfy the negated specification".into(),
        ));
    }
    v.oracle_semantics_ok = true;
    Ok(v)
}

fn eval_word(net: &Net, e: &StepExecution, shape: WitnessShape, f: &Formula) -> Result<bool, CheckError> {
    let word = execution_word(net, e, shape, f)
        .ok_or_else(|| CheckError::Verification("execution does not fit its shape".into()))?;
    word.eval(f)
        .map_err(|err| CheckError::Verification(err.to_string()))
}

/// Explores interleaving extensions of `e` up to the number of markings
/// reachable from its end, checking each one that closes a loop or ends in
/// a deadlock. `None` when the oracle budget runs out first.
pub fn extensions_satisfy(
    net: &Net,
    e: &StepExecution,
    f: &Formula,
    budget: usize,
) -> Result<Option<bool>, CheckError> {
    let Some(reach) = net.reachable_markings(e.last(), Semantics::Interleaving, budget) else {
        return Ok(None);
    };
    let depth = reach.len();
    let mut path = e.clone();
    let mut explored = 0;
    match extend(net, &mut path, e.len() + depth, f, budget, &mut explored) {
        Ok(ok) => Ok(Some(ok)),
        Err(OracleError::BudgetExceeded { .. }) => Ok(None),
    }
}

fn extend(
    net: &Net,
    path: &mut StepExecution,
    max_len: usize,
    f: &Formula,
    budget: usize,
    explored: &mut usize,
) -> Result<bool, OracleError> {
    *explored += 1;
    if *explored > budget {
        return Err(OracleError::BudgetExceeded { explored: budget });
    }
    let last = path.last().clone();
    if net.deadlocked(&last) {
        let word = execution_word(net, path, WitnessShape::Deadlock, f).expect("finite word");
        return Ok(word.eval(f).expect("atoms checked"));
    }
    let n = path.len();
    let closes: Vec<usize> = (0..n).filter(|&l| path.markings[l] == last).collect();
    if n > 0 && !path.steps[n - 1].is_empty() {
        for l in closes {
            let word = execution_word(net, path, WitnessShape::Loop(l), f).expect("lasso word");
            if !word.eval(f).expect("atoms checked") {
                return Ok(false);
            }
        }
    }
    if n >= max_len {
        return Ok(true);
    }
    for t in net.enabled_transitions(&last) {
        let next = net.fire(&last, t).expect("enabled");
        path.push(crate::net::Step::single(t), next);
        let ok = extend(net, path, max_len, f, budget, explored)?;
        path.steps.pop();
        path.markings.pop();
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Writes `dining_philosophers(k)` in the net file format.
pub fn gen_benchmark(k: usize) -> Result<String, crate::net::NetError> {
    crate::net::dining_philosophers(k).map(|n| n.to_text())
}
