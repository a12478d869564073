use alloc::vec;
use alloc::vec::Vec;

use super::space::SequenceSpace;
use crate::error::{bail, Result};
use crate::game::{MonitoringStructure, Player, TruncatedGame};
use crate::scalar::Scalar;
use crate::strategy::BehavioralStrategy;

/// `W(h)` times the probability the fixed strategy assigns to its own moves
/// along `h`, for every terminal history.
pub(crate) fn fixed_weights<T: Scalar>(
    g: &TruncatedGame,
    fixed: &BehavioralStrategy<T>,
) -> Vec<T> {
    let m = g.monitoring();
    let k = m.action_count();
    let owner = fixed.owner();
    let mut level = vec![T::one()];
    for n in 0..m.horizon() {
        let mut next = Vec::with_capacity(level.len() * k);
        if owner.owns(n) {
            let part = m.partition(n);
            for (h, w) in level.iter().enumerate() {
                for p in fixed.distribution(n, part.atom_of_index(h)) {
                    next.push(if w.is_zero() { T::zero() } else { w.clone() * p.clone() });
                }
            }
        } else {
            for w in &level {
                next.extend(core::iter::repeat_n(w.clone(), k));
            }
        }
        level = next;
    }
    for (w, win) in level.iter_mut().zip(g.winning()) {
        if !win {
            *w = T::zero();
        }
    }
    level
}

/// Optimal pure response of the opponent of `fixed`: player one maximizes
/// the winning probability, player two minimizes it. Ties go to the lowest
/// action.
pub fn best_response<T: Scalar>(
    g: &TruncatedGame,
    fixed: &BehavioralStrategy<T>,
) -> Result<(T, BehavioralStrategy<T>)> {
    let space = SequenceSpace::build(g.monitoring(), fixed.owner().opponent())?;
    best_response_in(g, fixed, &space)
}

pub(crate) fn best_response_in<T: Scalar>(
    g: &TruncatedGame,
    fixed: &BehavioralStrategy<T>,
    space: &SequenceSpace,
) -> Result<(T, BehavioralStrategy<T>)> {
    let m = g.monitoring();
    fixed.check_fits(m)?;
    if space.player() != fixed.owner().opponent() {
        bail!(Precondition, "response space belongs to the wrong player");
    }
    let choice = respond(g.monitoring(), &fixed_weights(g, fixed), space);
    let (value, choice) = choice;
    Ok((value, space.pure_strategy(m, &choice)?))
}

/// Backward induction over the responder's infosets, deepest first.
pub(crate) fn respond<T: Scalar>(
    m: &MonitoringStructure,
    weights: &[T],
    space: &SequenceSpace,
) -> (T, Vec<usize>) {
    let k = m.action_count();
    let maximize = space.player() == Player::One;
    let mut seq_value = vec![T::zero(); space.sequence_count()];
    for (h, w) in weights.iter().enumerate() {
        if !w.is_zero() {
            seq_value[space.terminal_sequence(h)] += w.clone();
        }
    }
    let infosets = space.infosets();
    let mut choice = vec![0usize; infosets.len()];
    for i in (0..infosets.len()).rev() {
        let mut best = 0;
        let mut best_v = seq_value[space.sequence(i, 0)].clone();
        for a in 1..k {
            let v = &seq_value[space.sequence(i, a)];
            let improves = if maximize {
                (v.clone() - best_v.clone()).is_strictly_positive()
            } else {
                (best_v.clone() - v.clone()).is_strictly_positive()
            };
            if improves {
                best = a;
                best_v = v.clone();
            }
        }
        choice[i] = best;
        seq_value[infosets[i].parent] += best_v;
    }
    (seq_value[0].clone(), choice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ActionSet;
    use crate::scalar::{ratio, Rational};
    use crate::strategy::payoff;

    fn matching() -> TruncatedGame {
        let m = MonitoringStructure::blackwell(ActionSet::numbered(2).unwrap(), 2).unwrap();
        TruncatedGame::from_predicate(m, |h| h[0] == h[1])
    }

    #[test]
    fn uniform_foil() {
        let g = matching();
        let y = BehavioralStrategy::<Rational>::uniform(Player::Two, g.monitoring());
        let (v, x) = best_response(&g, &y).unwrap();
        assert_eq!(v, ratio(1, 2));
        assert_eq!(payoff(&x, &y, &g).unwrap(), ratio(1, 2));
    }

    #[test]
    fn pure_opponent_is_matched() {
        let g = matching();
        let y = BehavioralStrategy::<Rational>::pure(Player::Two, g.monitoring(), |_, _| 1).unwrap();
        let (v, x) = best_response(&g, &y).unwrap();
        assert_eq!(v, ratio(1, 1));
        assert_eq!(x.distribution(0, 0), &[ratio(0, 1), ratio(1, 1)]);
    }

    #[test]
    fn minimizer_responds() {
        let g = matching();
        let x = BehavioralStrategy::<Rational>::from_fn(Player::One, g.monitoring(), |_, _| {
            vec![ratio(1, 3), ratio(2, 3)]
        })
        .unwrap();
        let (v, y) = best_response(&g, &x).unwrap();
        assert_eq!(v, ratio(1, 3));
        assert_eq!(payoff(&x, &y, &g).unwrap(), ratio(1, 3));
    }
}
