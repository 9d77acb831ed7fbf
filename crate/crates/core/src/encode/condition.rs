use super::place_atom;
use crate::asp::{GroundAtom, GroundProgram};
use crate::condition::Condition;
use crate::net::Net;

/// Rules keeping only the models whose marking at time `i` satisfies `c`.
///
/// Every non-atomic node gets an atom `Cond { cond: tag, node, time: i }`
/// with nodes numbered in post-order. The constraint comes first, then the
/// definitions from the root downwards.
pub fn encode_condition(net: &Net, c: &Condition, tag: u32, i: usize) -> GroundProgram {
    let mut prog = GroundProgram::new();
    let tree = Numbered::new(c);
    let root = node_atom(net, &tree, tag, i);
    prog.add_constraint([], [root]);
    define(net, &tree, tag, i, &mut prog);
    prog
}

/// Condition tree annotated with post-order ids.
struct Numbered<'a> {
    cond: &'a Condition,
    id: u32,
    children: Vec<Numbered<'a>>,
}

impl<'a> Numbered<'a> {
    fn new(c: &'a Condition) -> Self {
        let mut next = 0;
        Self::build(c, &mut next)
    }

    fn build(c: &'a Condition, next: &mut u32) -> Self {
        let children = match c {
            Condition::Place(_) => vec![],
            Condition::Not(a) => vec![Self::build(a, next)],
            Condition::And(a, b) | Condition::Or(a, b) => {
                vec![Self::build(a, next), Self::build(b, next)]
            }
        };
        let id = *next;
        *next += 1;
        Numbered {
            cond: c,
            id,
            children,
        }
    }
}

fn node_atom(net: &Net, node: &Numbered, tag: u32, i: usize) -> GroundAtom {
    match node.cond {
        Condition::Place(p) => place_atom(net, *p, i),
        _ => GroundAtom::Cond {
            cond: tag,
            node: node.id,
            time: i,
        },
    }
}

fn define(net: &Net, node: &Numbered, tag: u32, i: usize, prog: &mut GroundProgram) {
    let head = node_atom(net, node, tag, i);
    let kids: Vec<GroundAtom> = node
        .children
        .iter()
        .map(|k| node_atom(net, k, tag, i))
        .collect();
    match node.cond {
        Condition::Place(_) => return,
        Condition::Not(_) => prog.add_normal(head, [], kids),
        Condition::And(..) => prog.add_normal(head, kids, []),
        Condition::Or(..) => {
            for k in kids {
                prog.add_normal(head.clone(), [k], []);
            }
        }
    }
    for k in &node.children {
        define(net, k, tag, i, prog);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condition::parse_condition;
    use crate::net::tests::running;

    #[test]
    fn nested_condition() {
        let net = running();
        let c = parse_condition("p1 & (!p2 | p3)", &net).unwrap();
        // post-order: p1=0 p2=1 !p2=2 p3=3 |=4 &=5
        assert_eq!(
            encode_condition(&net, &c, 0, 2).to_text(),
            ":- not _cond0_5(2).\n\
             _cond0_5(2) :- p1(2), _cond0_4(2).\n\
             _cond0_4(2) :- _cond0_2(2).\n\
             _cond0_4(2) :- p3(2).\n\
             _cond0_2(2) :- not p2(2).\n"
        );
    }

    #[test]
    fn atomic_condition() {
        let net = running();
        let c = parse_condition("p4", &net).unwrap();
        assert_eq!(encode_condition(&net, &c, 1, 3).to_text(), ":- not p4(3).\n");
    }

    #[test]
    fn negated_disjunction() {
        let net = running();
        let c = parse_condition("!(p1 | p2)", &net).unwrap();
        let p = encode_condition(&net, &c, 0, 0);
        assert_eq!(p.len(), 4);
        assert_eq!(
            p.to_text(),
            ":- not _cond0_3(0).\n_cond0_3(0) :- not _cond0_2(0).\n_cond0_2(0) :- p1(0).\n_cond0_2(0) :- p2(0).\n"
        );
    }
}
