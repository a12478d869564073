use epm_core::game::{MonitoringStructure, Player};
use epm_core::random::random_strategy;
use epm_core::scalar::ratio;
use epm_core::scenarios::{
    classify_outcome, exact_payoff_with_tails, leave_by, responder, run_fixture, scenario_suite, stay_leave_actions,
    Check, Scenario, ScenarioParams, TailPolicy, Tails,
};
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tail() -> impl Strategy<Value = TailPolicy> {
    prop_oneof![
        Just(TailPolicy::Stay),
        Just(TailPolicy::LeaveNext),
        (0usize..3).prop_map(|delay| TailPolicy::Respond { delay }),
    ]
}

proptest! {
    #[test]
    fn winner_is_fixed_once_both_have_left(
        prefix in prop::collection::vec(0usize..2, 0..10),
        extension in prop::collection::vec(0usize..2, 0..6),
        one in tail(),
        two in tail(),
    ) {
        let tails = Tails::new(one, two);
        let o = classify_outcome(&prefix, tails);
        let decided = |n: Option<usize>| n.is_some_and(|n| n < prefix.len());
        if decided(o.n1) && decided(o.n2) {
            let mut longer = prefix.clone();
            longer.extend(&extension);
            prop_assert_eq!(classify_outcome(&longer, tails).winner, o.winner);
        }
    }

    #[test]
    fn winner_matches_the_definition(prefix in prop::collection::vec(0usize..2, 0..10)) {
        let o = classify_outcome(&prefix, Tails::STAY);
        let one_wins = match (o.n1, o.n2) {
            (Some(a), Some(b)) => b < a,
            (Some(_), None) => true,
            _ => false,
        };
        prop_assert_eq!(o.winner == Player::One, one_wins);
    }
}

#[test]
fn delayed_responder_concedes_nothing() {
    // payoff 0 for every x leaving by M whenever H >= M + k + 3
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 1..=3 {
        for bound in 0..=3 {
            let h = bound + k + 3;
            if h > 10 {
                continue;
            }
            let m = MonitoringStructure::delayed(stay_leave_actions(), h, Some(k), Some(k)).unwrap();
            let y = responder(Player::Two, &m).unwrap();
            for _ in 0..8 {
                let x = leave_by(&random_strategy(Player::One, &m, 3, &mut rng), &m, bound).unwrap();
                let v = exact_payoff_with_tails(&m, &x, &y, Tails::STAY).unwrap();
                assert!(v.is_zero(), "k {k}, M {bound}: payoff {v}");
            }
        }
    }
}

#[test]
fn first_scenario_with_delay_two_has_value_zero() {
    let params = ScenarioParams {
        delay: 2,
        horizon: Some(8),
        battery: 10,
        ..ScenarioParams::default()
    };
    let suite = scenario_suite(Scenario::Example1, &params).unwrap();
    let value = suite.iter().find(|f| f.name == "example1/value").unwrap();
    assert_eq!(value.game.horizon(), 8);
    let o = run_fixture(value).unwrap();
    assert_eq!(o.observed, vec![ratio(0, 1)]);
    for f in &suite {
        assert!(run_fixture(f).unwrap().passed(), "{}", f.name);
    }
}

#[test]
fn copycat_earns_exactly_one_half() {
    let suite = scenario_suite(Scenario::Example3, &ScenarioParams::default()).unwrap();
    let lower = suite.iter().find(|f| f.name == "example3/lower").unwrap();
    let Check::Payoffs { battery, .. } = &lower.check else {
        panic!("payoff fixture expected");
    };
    assert_eq!(battery.len(), 50);
    let o = run_fixture(lower).unwrap();
    assert!(o.observed.iter().all(|v| *v == ratio(1, 2)));
    let upper = suite.iter().find(|f| f.name == "example3/upper").unwrap();
    assert!(run_fixture(upper).unwrap().observed.iter().all(|v| *v == ratio(1, 1)));
}

#[test]
fn second_scenario_bounds() {
    let params = ScenarioParams {
        leave_by: Some(3),
        ..ScenarioParams::default()
    };
    let outcomes: Vec<_> = scenario_suite(Scenario::Example2, &params)
        .unwrap()
        .iter()
        .map(|f| run_fixture(f).unwrap())
        .collect();
    assert_eq!(outcomes.len(), 2);
    assert!(outcomes[0].observed.iter().all(Zero::is_zero));
    assert!(outcomes[1].observed.iter().all(|v| *v == ratio(1, 1)));
}

#[test]
fn stay_tails_let_a_last_moment_leave_beat_the_responder() {
    // without the leave-by restriction, leaving at the last own stage wins
    let m = MonitoringStructure::delayed(stay_leave_actions(), 6, Some(1), Some(1)).unwrap();
    let y = responder(Player::Two, &m).unwrap();
    let x = epm_core::scenarios::leave_at(Player::One, &m, 4).unwrap();
    assert_eq!(exact_payoff_with_tails(&m, &x, &y, Tails::STAY).unwrap(), ratio(1, 1));
    let respond = Tails::new(TailPolicy::Stay, TailPolicy::Respond { delay: 1 });
    assert!(exact_payoff_with_tails(&m, &x, &y, respond).unwrap().is_zero());
}
