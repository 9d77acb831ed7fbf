use std::collections::BTreeSet;

use super::{trans_atom, EncodeError};
use crate::asp::{GroundAtom, GroundProgram};
use crate::ltl::Formula;
use crate::net::{Net, TransId};

/// Transitions whose firing changes the marking of a place named in `f`.
pub fn visible_transitions(net: &Net, f: &Formula) -> Result<Vec<TransId>, EncodeError> {
    let mut places = BTreeSet::new();
    for a in f.atoms_of() {
        places.insert(net.place(&a).map_err(|_| EncodeError::UnknownPlace(a.clone()))?);
    }
    Ok(net
        .transitions()
        .filter(|t| {
            places
                .iter()
                .any(|p| net.preset(*t).contains(p) != net.postset(*t).contains(p))
        })
        .collect())
}

/// Loop detection, visibility restriction and the evaluation rules for the
/// PNF formula `f` over a bound-`n` execution. Expects the live rules of
/// the same bound alongside.
pub fn encode_ltl(net: &Net, f: &Formula, n: usize) -> Result<GroundProgram, EncodeError> {
    if n == 0 {
        return Err(EncodeError::ZeroBound);
    }
    if !f.is_pnf() {
        return Err(EncodeError::NotPnf);
    }
    let visible = visible_transitions(net, f)?;
    let mut prog = GroundProgram::new();
    let place = |p: crate::net::PlaceId, i: usize| GroundAtom::place(net.place_name(p), i);

    for i in 0..n {
        prog.add_choice(GroundAtom::El(i), [], []);
    }
    prog.add_conflict((0..n).map(GroundAtom::El));
    for i in 0..n {
        for p in net.places() {
            prog.add_constraint([GroundAtom::El(i), place(p, i)], [place(p, n)]);
            prog.add_constraint([GroundAtom::El(i), place(p, n)], [place(p, i)]);
        }
    }
    for i in 0..n {
        prog.add_normal(GroundAtom::Le, [GroundAtom::El(i)], []);
        prog.add_normal(GroundAtom::Nl(i + 1), [GroundAtom::El(i)], []);
        prog.add_normal(GroundAtom::Il(i + 1), [GroundAtom::El(i)], []);
        prog.add_normal(GroundAtom::Il(i + 1), [GroundAtom::Il(i)], []);
    }
    prog.add_constraint([GroundAtom::Le, GroundAtom::Idle(n - 1)], []);
    if visible.len() >= 2 {
        for i in 0..n {
            prog.add_conflict(visible.iter().map(|t| trans_atom(net, *t, i)));
        }
    }

    let mut next = 0;
    let root = translate(net, f, n, &mut next, &mut prog)?;
    prog.add_constraint([], [sub(root, 0)]);
    Ok(prog)
}

fn sub(node: u32, time: usize) -> GroundAtom {
    GroundAtom::Sub { node, time }
}

/// Emits the rules of every subformula in post-order and returns the id of
/// `f`.
fn translate(
    net: &Net,
    f: &Formula,
    n: usize,
    next: &mut u32,
    prog: &mut GroundProgram,
) -> Result<u32, EncodeError> {
    let kids: Vec<u32> = f
        .children()
        .into_iter()
        .filter(|_| !matches!(f, Formula::Neg(_)))
        .map(|g| translate(net, g, n, next, prog))
        .collect::<Result<_, _>>()?;
    let k = *next;
    *next += 1;
    // value one position after i
    let after = |i: usize| if i < n { sub(k, i + 1) } else { GroundAtom::NextVal(k) };
    let place = |name: &str, i: usize| -> Result<GroundAtom, EncodeError> {
        net.place(name)
            .map(|_| GroundAtom::place(name, i))
            .map_err(|_| EncodeError::UnknownPlace(name.to_string()))
    };
    match f {
        Formula::Top => {
            for i in 0..=n {
                prog.add_fact(sub(k, i));
            }
        }
        Formula::Bot => {}
        Formula::Atom(p) => {
            for i in 0..=n {
                prog.add_normal(sub(k, i), [place(p, i)?], []);
            }
        }
        Formula::Neg(g) => {
            let Formula::Atom(p) = &**g else {
                return Err(EncodeError::NotPnf);
            };
            for i in 0..=n {
                prog.add_normal(sub(k, i), [], [place(p, i)?]);
            }
        }
        Formula::And(..) => {
            for i in 0..=n {
                prog.add_normal(sub(k, i), [sub(kids[0], i), sub(kids[1], i)], []);
            }
        }
        Formula::Or(..) => {
            for i in 0..=n {
                prog.add_normal(sub(k, i), [sub(kids[0], i)], []);
                prog.add_normal(sub(k, i), [sub(kids[1], i)], []);
            }
        }
        Formula::Until(..) => {
            let (f1, f2) = (kids[0], kids[1]);
            for i in 0..=n {
                prog.add_normal(sub(k, i), [sub(f2, i)], []);
                prog.add_normal(sub(k, i), [sub(f1, i), after(i)], []);
            }
            for j in 1..=n {
                prog.add_normal(GroundAtom::NextVal(k), [GroundAtom::Nl(j), sub(k, j)], []);
            }
        }
        Formula::Release(..) => {
            let (f1, f2) = (kids[0], kids[1]);
            for i in 0..=n {
                prog.add_normal(sub(k, i), [sub(f2, i), sub(f1, i)], []);
                prog.add_normal(sub(k, i), [sub(f2, i), after(i)], []);
            }
            prog.add_normal(sub(k, n), [sub(f2, n)], [GroundAtom::Live]);
            for j in 1..=n {
                prog.add_normal(GroundAtom::NextVal(k), [GroundAtom::Nl(j), sub(k, j)], []);
            }
            for j in 1..=n {
                prog.add_normal(GroundAtom::LoopFlag(k), [GroundAtom::Il(j)], [sub(f2, j)]);
            }
            prog.add_normal(GroundAtom::NextVal(k), [GroundAtom::Le], [GroundAtom::LoopFlag(k)]);
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asp::Rule;
    use crate::ltl::parse_formula;
    use crate::net::tests::running;

    fn pnf(s: &str) -> Formula {
        parse_formula(s).unwrap().to_pnf()
    }

    #[test]
    fn only_t5_is_visible_for_p5() {
        let net = running();
        let v = visible_transitions(&net, &pnf("G !p5")).unwrap();
        assert_eq!(v, vec![net.transition("t5").unwrap()]);
        let p = encode_ltl(&net, &pnf("G !p5"), 2).unwrap();
        // the only conflict rule is the loop-guess restriction
        let conflicts: Vec<String> = p
            .rules()
            .iter()
            .filter(|r| matches!(r, Rule::Conflict(_)))
            .map(|r| p.rule_to_string(r))
            .collect();
        assert_eq!(conflicts, [":- 2 {el(0), el(1)}."]);
    }

    #[test]
    fn loop_guess_shape() {
        let net = running();
        let text = encode_ltl(&net, &pnf("p1"), 3).unwrap().to_text();
        let head: Vec<&str> = text.lines().take(4).collect();
        assert_eq!(head, ["{el(0)}.", "{el(1)}.", "{el(2)}.", ":- 2 {el(0), el(1), el(2)}."]);
        assert!(text.contains(":- el(1), p3(1), not p3(3).\n"));
        assert!(text.contains(":- el(1), p3(3), not p3(1).\n"));
        assert!(text.contains(":- le, idle(2).\n"));
        assert!(text.ends_with(":- not _sf0(0).\n"));
    }

    #[test]
    fn release_rules() {
        let net = running();
        // false R !p5: Bot=0, !p5=1, R=2
        let text = encode_ltl(&net, &pnf("G !p5"), 1).unwrap().to_text();
        for rule in [
            "_sf1(0) :- not p5(0).",
            "_sf2(0) :- _sf1(0), _sf0(0).",
            "_sf2(0) :- _sf1(0), _sf2(1).",
            "_sf2(1) :- _sf1(1), _nx2.",
            "_sf2(1) :- _sf1(1), not live.",
            "_nx2 :- nl(1), _sf2(1).",
            "_c2 :- il(1), not _sf1(1).",
            "_nx2 :- le, not _c2.",
        ] {
            assert!(text.lines().any(|l| l == rule), "missing {rule}\n{text}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let net = running();
        assert_eq!(
            encode_ltl(&net, &parse_formula("!(p1 U p2)").unwrap(), 2).unwrap_err(),
            EncodeError::NotPnf
        );
        assert_eq!(
            encode_ltl(&net, &pnf("F q"), 2).unwrap_err(),
            EncodeError::UnknownPlace("q".into())
        );
        assert_eq!(encode_ltl(&net, &pnf("F p1"), 0).unwrap_err(), EncodeError::ZeroBound);
    }
}
