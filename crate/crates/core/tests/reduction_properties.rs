use std::collections::BTreeMap;

use epm_core::game::{ActionSet, MonitoringKind, MonitoringStructure, Player, TruncatedGame};
use epm_core::random::{random_game, random_strategy, random_winning_set, standard_kinds};
use epm_core::reduction::{
    aux_payoff, aux_value, compare_values, lift, nature_transition, project, AuxGame, AuxHistory, AuxOptions,
    CompareOptions, Filler, SeededAnnouncer, StateSchedule,
};
use epm_core::scalar::ratio;
use epm_core::strategy::{payoff, snap_strategy};
use epm_core::Rational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pow(k: usize, e: usize) -> usize {
    k.pow(e as u32)
}

fn game(seed: u64, max_horizon: usize) -> TruncatedGame {
    random_game(2, max_horizon, &standard_kinds(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

/// Law of `s_n` given `s_0..s_{n-1}` and `b_0..b_{n-1}`, by summing the
/// probability of every length-`n` history.
fn oracle_transition(aux: &AuxGame, history: &AuxHistory) -> Vec<(usize, Rational)> {
    let m = aux.game().monitoring();
    let k = m.action_count();
    let schedule = aux.schedule();
    let n = history.announcements.len();
    let mut law: BTreeMap<usize, Rational> = BTreeMap::new();
    let mut total = Rational::zero();
    for h in 0..m.histories(n) {
        let mut p = Rational::one();
        let mut consistent = true;
        for j in 0..n {
            let prefix = h / pow(k, n - j);
            if schedule.state(j, prefix) != history.states[j] {
                consistent = false;
                break;
            }
            let atom = m.partition(j).atom_of_index(prefix);
            let point: Vec<Rational> = aux.grid(j).point(history.announcements[j][atom]);
            p *= &point[(h / pow(k, n - j - 1)) % k];
        }
        if !consistent || p.is_zero() {
            continue;
        }
        total += &p;
        *law.entry(schedule.state(n, h)).or_insert_with(Rational::zero) += p;
    }
    law.into_iter().map(|(s, p)| (s, p / &total)).collect()
}

/// Random announcements and states drawn along a sampled play, so that
/// every state has positive probability.
fn sampled_history(aux: &AuxGame, n: usize, rng: &mut ChaCha8Rng) -> AuxHistory {
    let m = aux.game().monitoring();
    let k = m.action_count();
    let mut h = 0usize;
    let mut history = AuxHistory {
        states: vec![0],
        announcements: Vec::new(),
    };
    for j in 0..n {
        let grid = aux.grid(j);
        let b: Vec<usize> = (0..m.partition(j).len()).map(|_| rng.gen_range(0..grid.len())).collect();
        let point: Vec<Rational> = grid.point(b[m.partition(j).atom_of_index(h)]);
        let support: Vec<usize> = (0..k).filter(|&a| !point[a].is_zero()).collect();
        h = h * k + support[rng.gen_range(0..support.len())];
        history.announcements.push(b);
        if j + 1 < n {
            history.states.push(aux.schedule().state(j + 1, h));
        }
    }
    history
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn nature_matches_enumeration(seed in any::<u64>(), eps in prop::sample::select(vec![(1, 1), (1, 2)])) {
        let g = game(seed, 4);
        let aux = AuxGame::build(&g, &ratio(eps.0, eps.1), 10_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for n in 1..=g.horizon() {
            let history = sampled_history(&aux, n, &mut rng);
            prop_assert_eq!(nature_transition(&aux, &history).unwrap(), oracle_transition(&aux, &history));
        }
    }

    #[test]
    fn states_reconstruct_and_project(seed in any::<u64>()) {
        let g = game(seed, 5);
        let m = g.monitoring();
        let k = m.action_count();
        let n = m.horizon();
        let schedule = StateSchedule::build(m).unwrap();
        for u in 0..m.histories(n) {
            let states: Vec<usize> = (0..=n).map(|j| schedule.state(j, u / pow(k, n - j))).collect();
            prop_assert_eq!(schedule.reconstruct(&states).unwrap(), u);
        }
        let aux = AuxGame::build(&g, &ratio(2, 1), 1000).unwrap();
        for stage in 0..n {
            for (p, atom) in m.partition(stage).atoms().iter().enumerate() {
                for &h in atom {
                    for j in 0..=stage {
                        prop_assert_eq!(aux.projection(stage, p, j), schedule.state(j, h / pow(k, stage - j)));
                    }
                }
            }
        }
    }

    #[test]
    fn filler_never_changes_the_value(seed in any::<u64>()) {
        let g = game(seed, 4);
        let aux = AuxGame::build(&g, &ratio(1, 2), 10_000).unwrap();
        let base = aux_value(&aux, &AuxOptions::default()).unwrap().value;
        let seeded = AuxOptions { filler: Filler::Seeded(seed), ..AuxOptions::default() };
        prop_assert_eq!(aux_value(&aux, &seeded).unwrap().value, base);
    }
}

#[test]
fn projected_payoff_equals_aux_payoff_on_blackwell() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 1..=4 {
        let m = MonitoringStructure::blackwell(ActionSet::numbered(2).unwrap(), n).unwrap();
        for round in 0..6 {
            let winning = random_winning_set(m.histories(n), 0.5, &mut rng);
            let g = TruncatedGame::new(m.clone(), winning).unwrap();
            let aux = AuxGame::build(&g, &ratio(1, 2), 10_000).unwrap();
            let y = snap_strategy(&random_strategy(Player::Two, &m, 7, &mut rng), aux.grids()).unwrap();
            let ys = lift(&y, &aux).unwrap();
            let x_star = SeededAnnouncer {
                player: Player::One,
                seed: rng.gen(),
            };
            let x = project(&x_star, &aux, &ys).unwrap();
            assert_eq!(
                payoff(&x, &y, &g).unwrap(),
                aux_payoff(&aux, &x_star, &ys).unwrap(),
                "N = {n}, round {round}"
            );
        }
    }
}

#[test]
fn sandwich_on_random_games() {
    for seed in 0..12 {
        let g = game(seed, 3);
        for eps in [ratio(1, 1), ratio(1, 2)] {
            let r = compare_values(&g, &eps, &CompareOptions::default()).unwrap();
            assert!(r.holds(), "seed {seed}, eps {eps}: {:?}", r.failures());
        }
    }
}

#[test]
fn non_minimal_revelation_keeps_the_value_on_a_small_case() {
    // revealing player two's stage-1 action only at the end instead of at stage 2
    let m = MonitoringStructure::build(MonitoringKind::Perfect, ActionSet::numbered(2).unwrap(), 3).unwrap();
    let g = TruncatedGame::from_predicate(m.clone(), |h| h[0] != h[1] || h[2] == 1);
    let eps = ratio(1, 2);
    let minimal = aux_value(&AuxGame::build(&g, &eps, 10_000).unwrap(), &AuxOptions::default()).unwrap();
    let schedule = StateSchedule::with_stages(&m, vec![Some(1), None, None]).unwrap();
    let late = AuxGame::with_schedule(&g, schedule, &eps, 10_000).unwrap();
    let late = aux_value(&late, &AuxOptions::default()).unwrap();
    assert_eq!(minimal.value, Rational::one());
    assert_eq!(late.value, minimal.value, "late {}", late.value);
}
