mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use stablebmc::asp::{enumerate, solve, GroundAtom, GroundProgram, SolverOptions, StableModel};

fn all_models(p: &GroundProgram) -> Vec<StableModel> {
    let mut m = enumerate(p, usize::MAX, SolverOptions::default()).unwrap();
    m.sort();
    m
}

#[test]
fn solver_matches_brute_force_on_random_programs() {
    let mut rng = StdRng::seed_from_u64(7);
    for round in 0..1500 {
        let atoms = rng.gen_range(1..=12);
        let rules = rng.gen_range(0..=25);
        let p = common::random_program(&mut rng, atoms, rules);
        let expected = p.brute_force_models(22).unwrap();
        let got = all_models(&p);
        assert_eq!(got, expected, "round {round}\n{p}");
        for m in &got {
            assert!(p.is_stable(m));
        }
    }
}

#[test]
fn enumeration_is_deterministic() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..50 {
        let p = common::random_program(&mut rng, 10, 20);
        let a = enumerate(&p, usize::MAX, SolverOptions::default()).unwrap();
        let b = enumerate(&p, usize::MAX, SolverOptions::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            solve(&p, SolverOptions::default()).unwrap(),
            a.first().cloned()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Adding a constraint keeps exactly the models that satisfy it.
    #[test]
    fn constraints_filter_models(seed in any::<u64>(), pos in 0usize..8, neg in 0usize..8) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = common::random_program(&mut rng, 8, 14);
        let (a, b) = (format!("a{pos}"), format!("a{neg}"));
        let mut q = p.clone();
        q.add_constraint([GroundAtom::plain(&a)], [GroundAtom::plain(&b)]);
        let base = all_models(&p);
        let kept: Vec<StableModel> = base
            .into_iter()
            .map(|m| m.into_iter().collect::<StableModel>())
            .filter(|m| !(m.contains(&GroundAtom::plain(&a)) && !m.contains(&GroundAtom::plain(&b))))
            .collect();
        prop_assert_eq!(all_models(&q), kept);
    }

    /// Every solver model is stable and differs from every other.
    #[test]
    fn models_are_stable_and_distinct(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = common::random_program(&mut rng, 12, 25);
        let models = enumerate(&p, usize::MAX, SolverOptions::default()).unwrap();
        for (i, m) in models.iter().enumerate() {
            prop_assert!(p.is_stable(m));
            prop_assert!(!models[..i].contains(m));
        }
    }

    /// Text output parses back to a program with the same models.
    #[test]
    fn text_round_trip_keeps_models(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = common::random_program(&mut rng, 6, 10);
        let q = stablebmc::asp::parse_program(&p.to_text()).unwrap();
        prop_assert_eq!(q.to_text(), p.to_text());
        prop_assert_eq!(all_models(&q), all_models(&p));
    }
}
