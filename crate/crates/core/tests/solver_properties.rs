use epm_core::game::{ActionSet, MonitoringStructure, TruncatedGame};
use epm_core::random::{random_game, random_winning_set, standard_kinds};
use epm_core::scalar::ratio;
use epm_core::solver::{
    brute_force_value, fictitious_play, sequence_form_value, LinearProgram, NormalForm, Relation, DEFAULT_MATRIX_CAP,
};
use epm_core::Rational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn game(seed: u64, max_horizon: usize) -> TruncatedGame {
    random_game(2, max_horizon, &standard_kinds(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

/// `min_x max_y` of the pure normal form, by a matrix LP: the value of the
/// game in which player one minimizes and player two maximizes.
fn swapped_value(g: &TruncatedGame) -> Rational {
    let nf = NormalForm::build(g, DEFAULT_MATRIX_CAP).unwrap();
    let (rows, cols) = (nf.rows(), nf.cols());
    // variables: p_0..p_rows, t (free); maximize -t
    let t = rows;
    let mut lp = LinearProgram::<Rational>::new(rows + 1);
    lp.set_free(t);
    lp.set_objective(t, -Rational::one());
    for j in 0..cols {
        let mut row: Vec<(usize, Rational)> =
            (0..rows).filter(|&i| nf.entry(i, j)).map(|i| (i, Rational::one())).collect();
        row.push((t, -Rational::one()));
        lp.add_row(row, Relation::Le, Rational::zero());
    }
    lp.add_row((0..rows).map(|i| (i, Rational::one())).collect(), Relation::Eq, Rational::one());
    -lp.maximize().unwrap().objective
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mixed_and_behavioral_values_agree(seed in any::<u64>()) {
        let g = game(seed, 4);
        let seq = sequence_form_value::<Rational>(&g).unwrap();
        let brute = brute_force_value::<Rational>(&g, DEFAULT_MATRIX_CAP).unwrap();
        prop_assert_eq!(&seq.value, &brute.value);
        prop_assert!(seq.max_gap().is_zero());
        prop_assert!(brute.max_gap().is_zero());
        prop_assert_eq!(&seq.certificate.lower, &seq.value);
        prop_assert_eq!(&seq.certificate.upper, &seq.value);
    }

    #[test]
    fn value_is_monotone_in_the_winning_set(seed in any::<u64>()) {
        let g = game(seed, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let extra = random_winning_set(g.winning().len(), 0.3, &mut rng);
        let wider: Vec<bool> = g.winning().iter().zip(&extra).map(|(a, b)| *a || *b).collect();
        let wider = g.with_winning(wider).unwrap();
        let v = sequence_form_value::<Rational>(&g).unwrap().value;
        let w = sequence_form_value::<Rational>(&wider).unwrap().value;
        prop_assert!(v <= w);
    }

    #[test]
    fn complement_swaps_the_roles(seed in any::<u64>()) {
        let g = game(seed, 3);
        let v = sequence_form_value::<Rational>(&g.complement()).unwrap().value;
        prop_assert_eq!(v, Rational::one() - swapped_value(&g));
    }

    #[test]
    fn float_mode_tracks_exact_mode(seed in any::<u64>()) {
        let g = game(seed, 4);
        let exact = sequence_form_value::<Rational>(&g).unwrap().value;
        let float = sequence_form_value::<f64>(&g).unwrap().value;
        prop_assert!((float - epm_core::Scalar::to_f64(&exact)).abs() < 1e-7);
    }
}

#[test]
fn complement_of_a_symmetric_game() {
    // simultaneous matching pennies: both sides have value 1/2
    let m = MonitoringStructure::blackwell(ActionSet::numbered(2).unwrap(), 2).unwrap();
    let g = TruncatedGame::from_predicate(m, |h| h[0] == h[1]);
    let v = sequence_form_value::<Rational>(&g).unwrap().value;
    let c = sequence_form_value::<Rational>(&g.complement()).unwrap().value;
    assert_eq!((v.clone(), c), (ratio(1, 2), Rational::one() - v));
}

#[test]
fn fictitious_play_brackets_the_value() {
    for seed in 0..20 {
        let g = game(seed, 4);
        let exact = epm_core::Scalar::to_f64(&sequence_form_value::<Rational>(&g).unwrap().value);
        let fp = fictitious_play(&g, 2000).unwrap();
        let c = &fp.report.certificate;
        assert!(c.lower <= exact + 1e-9 && exact <= c.upper + 1e-9, "seed {seed}: {exact} outside [{}, {}]", c.lower, c.upper);
        assert!(fp.gap_history.windows(2).all(|w| w[1].1 <= w[0].1));
    }
}
