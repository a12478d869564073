use alloc::vec;
use alloc::vec::Vec;

use super::behavioral::BehavioralStrategy;
use crate::error::{bail, Result};
use crate::game::{MonitoringStructure, Player, TruncatedGame};
use crate::scalar::Scalar;

/// Law of the length-`N` play induced by a strategy pair, indexed by the
/// lexicographic history index.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayDistribution<T> {
    horizon: usize,
    probabilities: Vec<T>,
}

impl<T: Scalar> PlayDistribution<T> {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    pub fn probability(&self, history_index: usize) -> &T {
        &self.probabilities[history_index]
    }

    pub fn total(&self) -> T {
        self.probabilities.iter().fold(T::zero(), |a, p| a + p.clone())
    }

    /// Mass of the histories flagged in `mask`.
    pub fn measure(&self, mask: &[bool]) -> T {
        self.probabilities
            .iter()
            .zip(mask)
            .filter(|(_, &w)| w)
            .fold(T::zero(), |a, (p, _)| a + p.clone())
    }
}

pub(crate) fn check_pair<T: Scalar>(
    x: &BehavioralStrategy<T>,
    y: &BehavioralStrategy<T>,
    m: &MonitoringStructure,
) -> Result<()> {
    if x.owner() != Player::One || y.owner() != Player::Two {
        bail!(Precondition, "expected a player-1 strategy and a player-2 strategy, in that order");
    }
    x.check_fits(m)?;
    y.check_fits(m)
}

/// Probability of every length-`N` history when player one uses `x` and
/// player two uses `y`: the product of the movers' probabilities along it.
pub fn play_distribution<T: Scalar>(
    x: &BehavioralStrategy<T>,
    y: &BehavioralStrategy<T>,
    m: &MonitoringStructure,
) -> Result<PlayDistribution<T>> {
    check_pair(x, y, m)?;
    let k = m.action_count();
    let mut level = vec![T::one()];
    for n in 0..m.horizon() {
        let mover = if n % 2 == 0 { x } else { y };
        let partition = m.partition(n);
        let mut next = Vec::with_capacity(level.len() * k);
        for (h, mass) in level.iter().enumerate() {
            let dist = mover.distribution(n, partition.atom_of_index(h));
            for p in dist {
                next.push(if mass.is_zero() { T::zero() } else { mass.clone() * p.clone() });
            }
        }
        level = next;
    }
    Ok(PlayDistribution {
        horizon: m.horizon(),
        probabilities: level,
    })
}

/// Winning probability of player one under `(x, y)`.
pub fn payoff<T: Scalar>(
    x: &BehavioralStrategy<T>,
    y: &BehavioralStrategy<T>,
    g: &TruncatedGame,
) -> Result<T> {
    Ok(play_distribution(x, y, g.monitoring())?.measure(g.winning()))
}
