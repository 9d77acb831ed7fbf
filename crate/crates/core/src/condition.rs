//! Boolean marking conditions over place atoms.

use thiserror::Error;

use crate::net::{Marking, Net, NetError, PlaceId};
use crate::syntax::{Cursor, SyntaxError, Tok};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConditionError {
    #[error("condition syntax: {0}")]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("condition needs {needed} candidate markings, over the limit of {limit}")]
    TooManyMarkings { needed: u128, limit: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    Place(PlaceId),
    Not(Box<Condition>),
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
}

impl Condition {
    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Condition) -> Self {
        Condition::Not(Box::new(c))
    }

    pub fn and(a: Condition, b: Condition) -> Self {
        Condition::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Condition, b: Condition) -> Self {
        Condition::Or(Box::new(a), Box::new(b))
    }

    /// Conjunction fixing every place of `net` to its value in `m`.
    pub fn exact(net: &Net, m: &Marking) -> Self {
        net.places()
            .map(|p| {
                if m.contains(p) {
                    Condition::Place(p)
                } else {
                    Condition::not(Condition::Place(p))
                }
            })
            .reduce(Condition::and)
            .expect("nets have at least one place")
    }

    pub fn eval(&self, m: &Marking) -> bool {
        match self {
            Condition::Place(p) => m.contains(*p),
            Condition::Not(c) => !c.eval(m),
            Condition::And(a, b) => a.eval(m) && b.eval(m),
            Condition::Or(a, b) => a.eval(m) || b.eval(m),
        }
    }

    /// The single marking the condition admits when it is a conjunction of
    /// literals mentioning every place once.
    pub fn fixed_marking(&self, net: &Net) -> Option<Marking> {
        let mut lits: Vec<Option<bool>> = vec![None; net.num_places()];
        if !self.collect_literals(&mut lits) {
            return None;
        }
        let mut m = Marking::new();
        for (i, v) in lits.into_iter().enumerate() {
            if v? {
                m.insert(PlaceId(i as u32));
            }
        }
        Some(m)
    }

    fn collect_literals(&self, lits: &mut [Option<bool>]) -> bool {
        let mut set = |p: PlaceId, v: bool| match lits[p.index()] {
            Some(_) => false,
            None => {
                lits[p.index()] = Some(v);
                true
            }
        };
        match self {
            Condition::Place(p) => set(*p, true),
            Condition::Not(c) => match **c {
                Condition::Place(p) => set(p, false),
                _ => false,
            },
            Condition::And(a, b) => a.collect_literals(lits) && b.collect_literals(lits),
            Condition::Or(..) => false,
        }
    }

    /// Every marking of `net` satisfying the condition, in index order.
    pub fn markings(&self, net: &Net, limit: usize) -> Result<Vec<Marking>, ConditionError> {
        if let Some(m) = self.fixed_marking(net) {
            return Ok(vec![m]);
        }
        let n = net.num_places();
        let needed = 1u128 << n.min(127);
        if n >= 64 || needed > limit as u128 {
            return Err(ConditionError::TooManyMarkings { needed, limit });
        }
        Ok((0u64..(1u64 << n))
            .map(|bits| {
                (0..n)
                    .filter(|i| bits >> i & 1 == 1)
                    .map(|i| PlaceId(i as u32))
                    .collect::<Marking>()
            })
            .filter(|m| self.eval(m))
            .collect())
    }

    pub fn display(&self, net: &Net) -> String {
        match self {
            Condition::Place(p) => net.place_name(*p).to_string(),
            Condition::Not(c) => format!("!{}", c.display(net)),
            Condition::And(a, b) => format!("({} & {})", a.display(net), b.display(net)),
            Condition::Or(a, b) => format!("({} | {})", a.display(net), b.display(net)),
        }
    }
}

/// Parses `!`, `&`, `|` and parentheses over place identifiers of `net`.
pub fn parse_condition(text: &str, net: &Net) -> Result<Condition, ConditionError> {
    let mut cur = Cursor::new(text)?;
    if cur.peek().is_none() {
        return Err(cur.error("empty condition").into());
    }
    let c = disjunction(&mut cur, net)?;
    cur.finish()?;
    Ok(c)
}

fn disjunction(cur: &mut Cursor, net: &Net) -> Result<Condition, ConditionError> {
    let mut c = conjunction(cur, net)?;
    while cur.peek() == Some(&Tok::Or) {
        cur.next();
        c = Condition::or(c, conjunction(cur, net)?);
    }
    Ok(c)
}

fn conjunction(cur: &mut Cursor, net: &Net) -> Result<Condition, ConditionError> {
    let mut c = literal(cur, net)?;
    while cur.peek() == Some(&Tok::And) {
        cur.next();
        c = Condition::and(c, literal(cur, net)?);
    }
    Ok(c)
}

fn literal(cur: &mut Cursor, net: &Net) -> Result<Condition, ConditionError> {
    let eof = cur.error("expected a condition, found end of input");
    match cur.next() {
        Some((_, Tok::Not)) => Ok(Condition::not(literal(cur, net)?)),
        Some((_, Tok::Ident(p))) => Ok(Condition::Place(net.place(&p)?)),
        Some((_, Tok::LParen)) => {
            let c = disjunction(cur, net)?;
            cur.expect(Tok::RParen)?;
            Ok(c)
        }
        Some((column, t)) => Err(SyntaxError {
            column,
            message: format!("expected a condition, found {}", t.describe()),
        }
        .into()),
        None => Err(eof.into()),
    }
}
