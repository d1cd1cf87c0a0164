use ce_adversary::adversary::{max_budget, AdversaryState, Transcript};
use ce_adversary::game_core::{
    differences_from_utilities, is_correlated_equilibrium, remark1_certificate, Distribution,
    GameTable, Profile,
};
use ce_adversary::rational::{int, ratio, Rational};
use proptest::prelude::*;

fn game_strategy(n: usize) -> impl Strategy<Value = GameTable> {
    prop::collection::vec((-9i64..=9, 1i64..=4), n << n).prop_map(move |vals| {
        let mut it = vals.into_iter();
        GameTable::from_fn(n, |_, _| {
            let (a, b) = it.next().unwrap();
            ratio(a, b)
        })
        .unwrap()
    })
}

fn distribution_strategy(n: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0i64..=3, 1 << n)
        .prop_filter("some mass", |w| w.iter().any(|&x| x > 0))
        .prop_map(move |w| {
            let total: i64 = w.iter().sum();
            Distribution::new(
                n,
                w.into_iter()
                    .enumerate()
                    .map(|(k, x)| (k as u64, ratio(x, total))),
            )
            .unwrap()
        })
}

fn game_and_distribution() -> impl Strategy<Value = (GameTable, Distribution)> {
    (1usize..=3).prop_flat_map(|n| (game_strategy(n), distribution_strategy(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn negative_expected_regret_sum_is_a_real_violation((game, sigma) in game_and_distribution()) {
        let diff = differences_from_utilities(&game).unwrap();
        if let Some(cert) = remark1_certificate(&diff, &sigma).unwrap() {
            let verdict = is_correlated_equilibrium(&game, &sigma).unwrap();
            let found = verdict.certificate().expect("verifier must also reject");
            prop_assert!(found.value <= cert.value);
        }
    }

    #[test]
    fn verdict_ignores_affine_rescaling(
        (game, sigma) in game_and_distribution(),
        scale in 1i64..=5,
        shift in -5i64..=5,
    ) {
        let mut other = game.clone();
        for k in 0..other.num_profiles() {
            for i in 0..other.n() {
                let u = other.get(i, k).unwrap().clone();
                other.set(i, k, u * int(scale) + int(shift));
            }
        }
        let a = is_correlated_equilibrium(&game, &sigma).unwrap().is_equilibrium();
        let b = is_correlated_equilibrium(&other, &sigma).unwrap().is_equilibrium();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn final_game_agrees_with_every_answer(
        n in 6usize..=9,
        codes in prop::collection::vec(any::<u64>(), 0..=10),
        weights in prop::collection::vec(0i64..=4, 8),
    ) {
        let budget = max_budget(n);
        let mut adv = AdversaryState::new(n).unwrap();
        let mut transcript = Transcript::default();
        let mut answers: Vec<(Profile, Vec<Rational>)> = Vec::new();
        for code in codes.into_iter().take(budget) {
            let s = Profile(code & ((1 << n) - 1));
            let r = adv.process_query(s).unwrap();
            transcript.push_query(n, &r);
            answers.push((s, r.utilities));
        }
        // A distribution over a few profiles, some of them queried.
        let mut support: Vec<(u64, Rational)> = weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0)
            .map(|(k, &w)| ((k as u64 * 37) % (1 << n), int(w)))
            .collect();
        if support.is_empty() {
            support.push((0, int(1)));
        }
        support.sort_by_key(|(k, _)| *k);
        support.dedup_by_key(|(k, _)| *k);
        let total: Rational = support.iter().map(|(_, w)| w.clone()).sum();
        let x = Distribution::new(n, support.into_iter().map(|(k, w)| (k, w / &total))).unwrap();

        let known = transcript.known_differences().unwrap();
        let fin = adv.finalize(&x).unwrap();
        for (s, utilities) in &answers {
            for (i, u) in utilities.iter().enumerate() {
                prop_assert_eq!(fin.game.utility(i, *s), u);
            }
        }
        // Finalization only fills in; nothing already fixed changes.
        if let Some(known) = known {
            for (i, s, v) in known.assigned() {
                prop_assert_eq!(adv.diff().get(i, s), Some(v));
            }
        }
        prop_assert!(!is_correlated_equilibrium(&fin.game, &x).unwrap().is_equilibrium());
    }
}

#[test]
fn transcripts_round_trip_through_text() {
    let mut adv = AdversaryState::new(10).unwrap();
    let mut tr = Transcript::default();
    for code in [0u64, 1023, 5, 5, 700, 1] {
        let r = adv.process_query(Profile(code)).unwrap();
        tr.push_query(10, &r);
    }
    let fin = adv.finalize(&Distribution::uniform_all(10)).unwrap();
    tr.final_record = Some(ce_adversary::adversary::FinalRecord::new(&fin));
    let text = tr.to_json_lines();
    assert_eq!(text.lines().count(), 7);
    let back = Transcript::from_json_lines(&text).unwrap();
    assert_eq!(back, tr);
    assert_eq!(back.n(), Some(10));
}
