use std::collections::BTreeSet;

use thiserror::Error;

use super::Formula;

pub type Letter = BTreeSet<String>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("words need at least one letter")]
    Empty,
    #[error("letter {index} mentions `{atom}`, which is not an atomic proposition")]
    LetterOutsideAp { index: usize, atom: String },
    #[error("loop index {loop_at} is invalid for {len} letters")]
    LoopOutOfRange { loop_at: usize, len: usize },
    #[error("loop letter {loop_at} differs from the last letter")]
    LoopMismatch { loop_at: usize },
    #[error("formula atom `{0}` is not an atomic proposition of the word")]
    AtomOutsideAp(String),
    #[error("cannot compare a finite word with an infinite one")]
    MixedKinds,
}

/// A finite word `x0 .. xn`, or the lasso `x0 .. xn (x{l+1} .. xn)^ω` when
/// a loop index `l` is present. The letter at `l` repeats the last letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word {
    ap: BTreeSet<String>,
    letters: Vec<Letter>,
    loop_at: Option<usize>,
}

impl Word {
    pub fn finite(ap: BTreeSet<String>, letters: Vec<Letter>) -> Result<Self, WordError> {
        Self::new(ap, letters, None)
    }

    pub fn lasso(
        ap: BTreeSet<String>,
        letters: Vec<Letter>,
        loop_at: usize,
    ) -> Result<Self, WordError> {
        Self::new(ap, letters, Some(loop_at))
    }

    pub fn new(
        ap: BTreeSet<String>,
        letters: Vec<Letter>,
        loop_at: Option<usize>,
    ) -> Result<Self, WordError> {
        if letters.is_empty() {
            return Err(WordError::Empty);
        }
        for (index, letter) in letters.iter().enumerate() {
            if let Some(atom) = letter.iter().find(|a| !ap.contains(*a)) {
                return Err(WordError::LetterOutsideAp {
                    index,
                    atom: atom.clone(),
                });
            }
        }
        if let Some(l) = loop_at {
            let n = letters.len() - 1;
            if l >= n {
                return Err(WordError::LoopOutOfRange {
                    loop_at: l,
                    len: letters.len(),
                });
            }
            if letters[l] != letters[n] {
                return Err(WordError::LoopMismatch { loop_at: l });
            }
        }
        Ok(Word {
            ap,
            letters,
            loop_at,
        })
    }

    pub fn ap(&self) -> &BTreeSet<String> {
        &self.ap
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn loop_at(&self) -> Option<usize> {
        self.loop_at
    }

    pub fn is_infinite(&self) -> bool {
        self.loop_at.is_some()
    }

    /// Position following `i`, or `None` past the end of a finite word.
    fn succ(&self, i: usize) -> Option<usize> {
        let n = self.letters.len() - 1;
        if i < n {
            Some(i + 1)
        } else {
            self.loop_at.map(|l| l + 1)
        }
    }

    fn check_atoms(&self, f: &Formula) -> Result<(), WordError> {
        match f.atoms_of().into_iter().find(|a| !self.ap.contains(a)) {
            Some(a) => Err(WordError::AtomOutsideAp(a)),
            None => Ok(()),
        }
    }

    /// `w |= f`.
    pub fn eval(&self, f: &Formula) -> Result<bool, WordError> {
        self.check_atoms(f)?;
        Ok(self.table(f)[0])
    }

    /// Truth value of `f` at every stored position.
    pub fn eval_positions(&self, f: &Formula) -> Result<Vec<bool>, WordError> {
        self.check_atoms(f)?;
        Ok(self.table(f))
    }

    fn table(&self, f: &Formula) -> Vec<bool> {
        let len = self.letters.len();
        match f {
            Formula::Top => vec![true; len],
            Formula::Bot => vec![false; len],
            Formula::Atom(p) => self.letters.iter().map(|x| x.contains(p)).collect(),
            Formula::Neg(g) => self.table(g).into_iter().map(|v| !v).collect(),
            Formula::And(a, b) => zip_with(self.table(a), self.table(b), |x, y| x && y),
            Formula::Or(a, b) => zip_with(self.table(a), self.table(b), |x, y| x || y),
            Formula::Until(a, b) => {
                let (t1, t2) = (self.table(a), self.table(b));
                // least fixpoint of  v(i) = f2(i) | (f1(i) & v(i+1))
                self.fixpoint(vec![false; len], |i, next| t2[i] || (t1[i] && next))
            }
            Formula::Release(a, b) => {
                let (t1, t2) = (self.table(a), self.table(b));
                // greatest fixpoint of  v(i) = f2(i) & (f1(i) | v(i+1)),
                // vacuously true past the end of a finite word
                self.fixpoint(vec![true; len], |i, next| t2[i] && (t1[i] || next))
            }
        }
    }

    fn fixpoint(&self, mut v: Vec<bool>, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
        let beyond_end = v[0];
        loop {
            let mut changed = false;
            for i in (0..v.len()).rev() {
                let next = self.succ(i).map_or(beyond_end, |j| v[j]);
                let new = step(i, next);
                if new != v[i] {
                    v[i] = new;
                    changed = true;
                }
            }
            if !changed {
                return v;
            }
        }
    }

    /// Stutter-reduced normal form: `(stem, cycle)` for lassos with a
    /// primitive cycle and shortest stem, `(runs, [])` for finite words.
    fn canonical(&self) -> (Vec<Letter>, Vec<Letter>) {
        let Some(l) = self.loop_at else {
            return (collapse(&self.letters), Vec::new());
        };
        let stem = &self.letters[..=l];
        let body = &self.letters[l + 1..];
        let mut cycle = collapse(body);
        if cycle.len() > 1 && cycle.first() == cycle.last() {
            cycle.pop();
        }
        let period = (1..=cycle.len())
            .find(|p| cycle.len().is_multiple_of(*p) && (0..cycle.len()).all(|i| cycle[i] == cycle[i % p]))
            .unwrap_or(cycle.len());
        cycle.truncate(period);
        let mut stem = collapse(stem);
        if stem.last() == cycle.first() {
            stem.pop();
        }
        while !stem.is_empty() && stem.last() == cycle.last() {
            stem.pop();
            cycle.rotate_right(1);
        }
        (stem, cycle)
    }
}

fn zip_with(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

fn collapse(letters: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for x in letters {
        if out.last() != Some(x) {
            out.push(x.clone());
        }
    }
    out
}

/// Whether two words of the same kind agree after removing stuttering.
pub fn stuttering_equivalent(a: &Word, b: &Word) -> Result<bool, WordError> {
    if a.is_infinite() != b.is_infinite() {
        return Err(WordError::MixedKinds);
    }
    Ok(a.canonical() == b.canonical())
}

/// Under-approximates `f` on a finite prefix whose continuation is unknown:
/// a `true` answer at position `i` means every non-empty extension of the
/// suffix starting at `i` satisfies `f`. `f` must be in positive normal form.
pub fn eval_cautious(prefix: &Word, f: &Formula) -> Result<Vec<bool>, WordError> {
    prefix.check_atoms(f)?;
    Ok(cautious_table(prefix.letters(), f))
}

fn cautious_table(letters: &[Letter], f: &Formula) -> Vec<bool> {
    let len = letters.len();
    match f {
        Formula::Top => vec![true; len],
        Formula::Bot => vec![false; len],
        Formula::Atom(p) => letters.iter().map(|x| x.contains(p)).collect(),
        Formula::Neg(g) => match &**g {
            Formula::Atom(p) => letters.iter().map(|x| !x.contains(p)).collect(),
            // outside positive normal form nothing is certain
            _ => vec![false; len],
        },
        Formula::And(a, b) => zip_with(cautious_table(letters, a), cautious_table(letters, b), |x, y| {
            x && y
        }),
        Formula::Or(a, b) => zip_with(cautious_table(letters, a), cautious_table(letters, b), |x, y| {
            x || y
        }),
        Formula::Until(a, b) => {
            let (t1, t2) = (cautious_table(letters, a), cautious_table(letters, b));
            let mut v = vec![false; len];
            for i in (0..len).rev() {
                let next = i + 1 < len && v[i + 1];
                v[i] = t2[i] || (t1[i] && next);
            }
            v
        }
        Formula::Release(a, b) => {
            let (t1, t2) = (cautious_table(letters, a), cautious_table(letters, b));
            let mut v = vec![false; len];
            for i in (0..len).rev() {
                let next = i + 1 < len && v[i + 1];
                v[i] = t2[i] && (t1[i] || next);
            }
            v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_formula;

    fn ap(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn letters(spec: &[&[&str]]) -> Vec<Letter> {
        spec.iter().map(|l| ap(l)).collect()
    }

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn examples() {
        let w = Word::lasso(ap(&["p"]), letters(&[&["p"], &["p"]]), 0).unwrap();
        assert!(w.eval(&f("[] p")).unwrap());
        let w = Word::finite(ap(&["p"]), letters(&[&[], &["p"]])).unwrap();
        assert!(w.eval(&f("<> p")).unwrap());
        let w = Word::finite(ap(&["p", "q"]), letters(&[&["q"]])).unwrap();
        assert!(w.eval(&f("p R q")).unwrap());
    }

    #[test]
    fn finite_word_operators() {
        let w = Word::finite(ap(&["p", "q"]), letters(&[&["p"], &["p"], &["q"]])).unwrap();
        assert!(w.eval(&f("p U q")).unwrap());
        assert!(!w.eval(&f("[] p")).unwrap());
        assert!(w.eval(&f("<> [] q")).unwrap());
        // Finite words end: [] holds when the remaining letters all satisfy
        assert!(w.eval(&f("<> [] !p")).unwrap());
        let w = Word::finite(ap(&["p", "q"]), letters(&[&["p"], &["p"]])).unwrap();
        assert!(!w.eval(&f("p U q")).unwrap());
        assert!(w.eval(&f("q R p")).unwrap());
    }

    #[test]
    fn lasso_operators() {
        // p (q p)^ω: both hold infinitely often
        let w = Word::lasso(ap(&["p", "q"]), letters(&[&["p"], &["q"], &["p"]]), 0).unwrap();
        assert!(w.eval(&f("[] <> q")).unwrap());
        assert!(w.eval(&f("[] <> p")).unwrap());
        assert!(!w.eval(&f("<> [] p")).unwrap());
        assert!(!w.eval(&f("p U q & [] p")).unwrap());
        // p q^ω
        let w = Word::lasso(ap(&["p", "q"]), letters(&[&["p"], &["q"], &["q"]]), 1).unwrap();
        assert!(w.eval(&f("<> [] q")).unwrap());
        assert!(w.eval(&f("p U [] q")).unwrap());
        assert!(!w.eval(&f("[] <> p")).unwrap());
    }

    #[test]
    fn word_validation() {
        assert_eq!(Word::finite(ap(&[]), vec![]), Err(WordError::Empty));
        assert!(matches!(
            Word::finite(ap(&["p"]), letters(&[&["q"]])),
            Err(WordError::LetterOutsideAp { index: 0, .. })
        ));
        assert!(matches!(
            Word::lasso(ap(&["p"]), letters(&[&["p"], &[]]), 0),
            Err(WordError::LoopMismatch { .. })
        ));
        assert!(matches!(
            Word::lasso(ap(&["p"]), letters(&[&["p"]]), 0),
            Err(WordError::LoopOutOfRange { .. })
        ));
        let w = Word::finite(ap(&["p"]), letters(&[&["p"]])).unwrap();
        assert_eq!(w.eval(&f("q")), Err(WordError::AtomOutsideAp("q".into())));
    }

    #[test]
    fn stuttering() {
        let ab = ap(&["p", "q"]);
        let w1 = Word::finite(ab.clone(), letters(&[&["p"], &["p"], &["q"]])).unwrap();
        let w2 = Word::finite(ab.clone(), letters(&[&["p"], &["q"]])).unwrap();
        let w3 = Word::finite(ab.clone(), letters(&[&["q"], &["p"]])).unwrap();
        assert!(stuttering_equivalent(&w1, &w2).unwrap());
        assert!(!stuttering_equivalent(&w2, &w3).unwrap());

        let l1 = Word::lasso(ab.clone(), letters(&[&["p"], &["q"], &["q"]]), 1).unwrap();
        let l2 = Word::lasso(ab.clone(), letters(&[&["p"], &["q"], &["q"], &["q"]]), 2).unwrap();
        assert!(stuttering_equivalent(&l1, &l2).unwrap());
        // (p q)^ω written with different stems and unrolled cycles
        let l3 = Word::lasso(ab.clone(), letters(&[&["p"], &["q"], &["p"]]), 0).unwrap();
        let l4 = Word::lasso(
            ab.clone(),
            letters(&[&["p"], &["p"], &["q"], &["q"], &["p"], &["q"], &["p"], &["q"]]),
            3,
        )
        .unwrap();
        assert!(stuttering_equivalent(&l3, &l4).unwrap());
        assert!(!stuttering_equivalent(&l1, &l3).unwrap());
        assert_eq!(stuttering_equivalent(&w1, &l1), Err(WordError::MixedKinds));
    }

    #[test]
    fn cautious_evaluation() {
        let w = Word::finite(ap(&["p", "q"]), letters(&[&["p"], &["p"]])).unwrap();
        // p holds so far but the future may break it
        assert!(!eval_cautious(&w, &f("[] p")).unwrap()[0]);
        assert!(eval_cautious(&w, &f("<> p")).unwrap()[0]);
        assert!(eval_cautious(&w, &f("q R p")).unwrap() == vec![false, false]);
        let w = Word::finite(ap(&["p", "q"]), letters(&[&["p"], &["p", "q"]])).unwrap();
        assert!(eval_cautious(&w, &f("q R p")).unwrap()[0]);
    }
}
