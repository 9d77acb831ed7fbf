use std::fmt;

/// Structured ground atom. The derived order is the canonical order used
/// for model output.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroundAtom {
    Place(String, usize),
    Trans(String, usize),
    Idle(usize),
    El(usize),
    Le,
    Nl(usize),
    Il(usize),
    Live,
    /// Non-atomic node `node` of condition number `cond` at `time`.
    Cond { cond: u32, node: u32, time: usize },
    /// Formula subformula `node` at `time`.
    Sub { node: u32, time: usize },
    /// Value of subformula `node` one position past the end of the bound.
    NextVal(u32),
    /// Helper atom of the release loop clause.
    LoopFlag(u32),
    /// Atom read from program text.
    Plain(String),
    /// Complement atom introduced for a choice head.
    Primed(Box<GroundAtom>),
    /// Self-blocking atom introduced for a constraint.
    FailFlag(u32),
}

impl GroundAtom {
    pub fn place(name: impl Into<String>, time: usize) -> Self {
        GroundAtom::Place(name.into(), time)
    }

    pub fn trans(name: impl Into<String>, time: usize) -> Self {
        GroundAtom::Trans(name.into(), time)
    }

    pub fn plain(name: impl Into<String>) -> Self {
        GroundAtom::Plain(name.into())
    }

    pub fn primed(a: GroundAtom) -> Self {
        GroundAtom::Primed(Box::new(a))
    }

    /// Atoms introduced by shorthand expansion.
    pub fn is_auxiliary(&self) -> bool {
        matches!(self, GroundAtom::Primed(_) | GroundAtom::FailFlag(_))
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GroundAtom::*;
        match self {
            Place(p, i) | Trans(p, i) => write!(f, "{p}({i})"),
            Idle(i) => write!(f, "idle({i})"),
            El(i) => write!(f, "el({i})"),
            Le => write!(f, "le"),
            Nl(i) => write!(f, "nl({i})"),
            Il(i) => write!(f, "il({i})"),
            Live => write!(f, "live"),
            Cond { cond, node, time } => write!(f, "_cond{cond}_{node}({time})"),
            Sub { node, time } => write!(f, "_sf{node}({time})"),
            NextVal(k) => write!(f, "_nx{k}"),
            LoopFlag(k) => write!(f, "_c{k}"),
            Plain(s) => write!(f, "{s}"),
            Primed(a) => write!(f, "_np_{a}"),
            FailFlag(k) => write!(f, "_fail_{k}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering() {
        assert_eq!(GroundAtom::place("p_3", 2).to_string(), "p_3(2)");
        assert_eq!(GroundAtom::Idle(0).to_string(), "idle(0)");
        assert_eq!(GroundAtom::Sub { node: 4, time: 1 }.to_string(), "_sf4(1)");
        assert_eq!(GroundAtom::NextVal(4).to_string(), "_nx4");
        assert_eq!(GroundAtom::LoopFlag(2).to_string(), "_c2");
        assert_eq!(
            GroundAtom::primed(GroundAtom::trans("t1", 0)).to_string(),
            "_np_t1(0)"
        );
        assert_eq!(GroundAtom::FailFlag(3).to_string(), "_fail_3");
        assert_eq!(
            GroundAtom::Cond { cond: 1, node: 0, time: 3 }.to_string(),
            "_cond1_0(3)"
        );
    }

    #[test]
    fn canonical_order_groups_kinds() {
        let mut v = [
            GroundAtom::Live,
            GroundAtom::trans("t1", 0),
            GroundAtom::place("p2", 0),
            GroundAtom::place("p1", 1),
            GroundAtom::place("p1", 0),
        ];
        v.sort();
        assert_eq!(
            v.iter().map(ToString::to_string).collect::<Vec<_>>(),
            ["p1(0)", "p1(1)", "p2(0)", "t1(0)", "live"]
        );
    }
}
