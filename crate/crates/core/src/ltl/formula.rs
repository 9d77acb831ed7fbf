use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{Cursor, SyntaxError, Tok};

/// LTL without next-time. Eventually, globally and implication are
/// desugared while parsing; `Top` and `Bot` are kept as constants so they
/// contribute no atomic propositions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Bot,
    Atom(String),
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Neg(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Self {
        Formula::Release(Box::new(a), Box::new(b))
    }

    /// `true U f`
    pub fn eventually(f: Formula) -> Self {
        Formula::until(Formula::Top, f)
    }

    /// `false R f`
    pub fn globally(f: Formula) -> Self {
        Formula::release(Formula::Bot, f)
    }

    /// `!a | b`
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::or(Formula::not(a), b)
    }

    /// Negation pushed down to the atoms.
    pub fn to_pnf(&self) -> Formula {
        self.pnf(false)
    }

    fn pnf(&self, negate: bool) -> Formula {
        use Formula::*;
        match (self, negate) {
            (Top, false) | (Bot, true) => Top,
            (Top, true) | (Bot, false) => Bot,
            (Atom(p), false) => Atom(p.clone()),
            (Atom(p), true) => Formula::not(Atom(p.clone())),
            (Neg(f), _) => f.pnf(!negate),
            (And(a, b), false) | (Or(a, b), true) => Formula::and(a.pnf(negate), b.pnf(negate)),
            (Or(a, b), false) | (And(a, b), true) => Formula::or(a.pnf(negate), b.pnf(negate)),
            (Until(a, b), false) | (Release(a, b), true) => {
                Formula::until(a.pnf(negate), b.pnf(negate))
            }
            (Release(a, b), false) | (Until(a, b), true) => {
                Formula::release(a.pnf(negate), b.pnf(negate))
            }
        }
    }

    /// Negations only directly above atoms.
    pub fn is_pnf(&self) -> bool {
        use Formula::*;
        match self {
            Top | Bot | Atom(_) => true,
            Neg(f) => matches!(**f, Atom(_)),
            And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => a.is_pnf() && b.is_pnf(),
        }
    }

    /// Place identifiers occurring in the formula.
    pub fn atoms_of(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        use Formula::*;
        match self {
            Top | Bot => {}
            Atom(p) => {
                out.insert(p.clone());
            }
            Neg(f) => f.collect_atoms(out),
            And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Number of syntax-tree nodes.
    pub fn size(&self) -> usize {
        use Formula::*;
        match self {
            Top | Bot | Atom(_) => 1,
            Neg(f) => 1 + f.size(),
            And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn depth(&self) -> usize {
        use Formula::*;
        match self {
            Top | Bot | Atom(_) => 0,
            Neg(f) => 1 + f.depth(),
            And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            Top | Bot | Atom(_) => vec![],
            Neg(f) => vec![f],
            And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => vec![a, b],
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        match self {
            Top => write!(f, "true"),
            Bot => write!(f, "false"),
            Atom(p) => write!(f, "{p}"),
            Neg(g) => write!(f, "!{g}"),
            And(a, b) => write!(f, "({a} & {b})"),
            Or(a, b) => write!(f, "({a} | {b})"),
            Until(a, b) => write!(f, "({a} U {b})"),
            Release(a, b) => write!(f, "({a} R {b})"),
        }
    }
}

/// Parses a formula. Binding strength from tightest: the prefix operators
/// `!`, `F`/`<>`, `G`/`[]`; then `&`; `|`; the right-associative `U` and
/// `R`; and finally right-associative `->`.
pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let mut cur = Cursor::new(text)?;
    if cur.peek().is_none() {
        return Err(cur.error("empty formula"));
    }
    let f = implication(&mut cur)?;
    cur.finish()?;
    Ok(f)
}

fn implication(cur: &mut Cursor) -> Result<Formula, SyntaxError> {
    let lhs = temporal(cur)?;
    if cur.peek() == Some(&Tok::Implies) {
        cur.next();
        let rhs = implication(cur)?;
        return Ok(Formula::implies(lhs, rhs));
    }
    Ok(lhs)
}

fn temporal(cur: &mut Cursor) -> Result<Formula, SyntaxError> {
    let lhs = disjunction(cur)?;
    match cur.peek() {
        Some(Tok::Until) => {
            cur.next();
            Ok(Formula::until(lhs, temporal(cur)?))
        }
        Some(Tok::Release) => {
            cur.next();
            Ok(Formula::release(lhs, temporal(cur)?))
        }
        _ => Ok(lhs),
    }
}

fn disjunction(cur: &mut Cursor) -> Result<Formula, SyntaxError> {
    let mut f = conjunction(cur)?;
    while cur.peek() == Some(&Tok::Or) {
        cur.next();
        f = Formula::or(f, conjunction(cur)?);
    }
    Ok(f)
}

fn conjunction(cur: &mut Cursor) -> Result<Formula, SyntaxError> {
    let mut f = unary(cur)?;
    while cur.peek() == Some(&Tok::And) {
        cur.next();
        f = Formula::and(f, unary(cur)?);
    }
    Ok(f)
}

fn unary(cur: &mut Cursor) -> Result<Formula, SyntaxError> {
    let col_err = cur.error("expected a formula, found end of input");
    match cur.next() {
        Some((_, Tok::Not)) => Ok(Formula::not(unary(cur)?)),
        Some((_, Tok::Eventually)) => Ok(Formula::eventually(unary(cur)?)),
        Some((_, Tok::Globally)) => Ok(Formula::globally(unary(cur)?)),
        Some((_, Tok::True)) => Ok(Formula::Top),
        Some((_, Tok::False)) => Ok(Formula::Bot),
        Some((_, Tok::Ident(p))) => Ok(Formula::Atom(p)),
        Some((_, Tok::LParen)) => {
            let f = implication(cur)?;
            cur.expect(Tok::RParen)?;
            Ok(f)
        }
        Some((col, t)) => Err(SyntaxError {
            column: col,
            message: format!("expected a formula, found {}", t.describe()),
        }),
        None => Err(col_err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Formula as F;

    fn a(p: &str) -> F {
        F::atom(p)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse_formula("[] !(cs1 & cs2)").unwrap(),
            F::globally(F::not(F::and(a("cs1"), a("cs2"))))
        );
        assert_eq!(
            parse_formula("a U b U c").unwrap(),
            F::until(a("a"), F::until(a("b"), a("c")))
        );
        let err = parse_formula("a U").unwrap_err();
        assert_eq!(err.column, 4);
    }

    #[test]
    fn precedence() {
        assert_eq!(
            parse_formula("a | b & !c").unwrap(),
            F::or(a("a"), F::and(a("b"), F::not(a("c"))))
        );
        assert_eq!(
            parse_formula("a | b U c").unwrap(),
            F::until(F::or(a("a"), a("b")), a("c"))
        );
        assert_eq!(
            parse_formula("a -> b -> c").unwrap(),
            F::implies(a("a"), F::implies(a("b"), a("c")))
        );
        assert_eq!(
            parse_formula("G (req -> F ack)").unwrap(),
            F::globally(F::implies(a("req"), F::eventually(a("ack"))))
        );
        assert_eq!(parse_formula("<>p").unwrap(), parse_formula("F p").unwrap());
        assert_eq!(parse_formula("true R false").unwrap(), F::release(F::Top, F::Bot));
    }

    #[test]
    fn parse_errors() {
        assert!(parse_formula("").is_err());
        assert_eq!(parse_formula("(a").unwrap_err().column, 3);
        assert_eq!(parse_formula("a b").unwrap_err().column, 3);
        assert_eq!(parse_formula("& a").unwrap_err().column, 1);
    }

    #[test]
    fn pnf_rewrites() {
        assert_eq!(F::not(F::not(a("p"))).to_pnf(), a("p"));
        assert_eq!(
            F::not(F::until(a("p"), a("q"))).to_pnf(),
            F::release(F::not(a("p")), F::not(a("q")))
        );
        assert_eq!(
            F::not(F::or(a("p"), a("q"))).to_pnf(),
            F::and(F::not(a("p")), F::not(a("q")))
        );
        assert_eq!(F::not(F::Top).to_pnf(), F::Bot);
        // !<>p5 = [] !p5
        assert_eq!(
            F::not(F::eventually(a("p5"))).to_pnf(),
            F::globally(F::not(a("p5")))
        );
    }

    #[test]
    fn pnf_is_linear() {
        let f = parse_formula("!(!(a U !b) R !(c & !(d | e)))").unwrap();
        let g = f.to_pnf();
        assert!(g.is_pnf());
        assert!(g.size() <= 2 * f.size());
    }

    #[test]
    fn atoms() {
        assert_eq!(
            parse_formula("[] !p5").unwrap().atoms_of(),
            BTreeSet::from(["p5".to_string()])
        );
        assert!(F::Top.atoms_of().is_empty());
        assert_eq!(
            parse_formula("(p U q) & !p").unwrap().atoms_of(),
            BTreeSet::from(["p".to_string(), "q".to_string()])
        );
    }

    #[test]
    fn display_parses_back() {
        let f = parse_formula("G (a -> F (b U !c)) R d").unwrap();
        assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }
}
