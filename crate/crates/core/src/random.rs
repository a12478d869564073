//! Seeded generators for games and strategies, used by tests, the
//! acceptance suite and the scenario batteries.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::game::{ActionSet, MonitoringKind, MonitoringStructure, Player, TruncatedGame};
use crate::scalar::{ratio, Rational};
use crate::strategy::BehavioralStrategy;

/// Integer weights drawn from `0..=denominator`, renormalized.
pub fn random_distribution<R: Rng + ?Sized>(k: usize, denominator: u32, rng: &mut R) -> Vec<Rational> {
    loop {
        let w: Vec<i64> = (0..k).map(|_| i64::from(rng.gen_range(0..=denominator))).collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.iter().map(|&x| ratio(x, total)).collect();
        }
    }
}

pub fn random_strategy<R: Rng + ?Sized>(
    owner: Player,
    m: &MonitoringStructure,
    denominator: u32,
    rng: &mut R,
) -> BehavioralStrategy<Rational> {
    let k = m.action_count();
    BehavioralStrategy::from_fn(owner, m, |_, _| random_distribution(k, denominator, rng))
        .expect("random distributions are valid")
}

pub fn random_pure_strategy<R: Rng + ?Sized>(
    owner: Player,
    m: &MonitoringStructure,
    rng: &mut R,
) -> BehavioralStrategy<Rational> {
    let k = m.action_count();
    BehavioralStrategy::pure(owner, m, |_, _| rng.gen_range(0..k)).expect("actions are in range")
}

/// Each history wins independently with probability `density`.
pub fn random_winning_set<R: Rng + ?Sized>(histories: usize, density: f64, rng: &mut R) -> Vec<bool> {
    (0..histories).map(|_| rng.gen_bool(density.clamp(0.0, 1.0))).collect()
}

/// The builders the random suites draw from.
pub fn standard_kinds() -> Vec<MonitoringKind> {
    alloc::vec![
        MonitoringKind::Perfect,
        MonitoringKind::Blackwell,
        MonitoringKind::Delayed { p1: Some(1), p2: Some(1) },
    ]
}

/// A game with `k` actions, horizon in `1..=max_horizon`, a builder drawn
/// from `kinds` and a winning set of random density.
pub fn random_game<R: Rng + ?Sized>(
    k: usize,
    max_horizon: usize,
    kinds: &[MonitoringKind],
    rng: &mut R,
) -> Result<TruncatedGame> {
    let horizon = rng.gen_range(1..=max_horizon.max(1));
    let kind = kinds.choose(rng).cloned().unwrap_or(MonitoringKind::Perfect);
    let m = MonitoringStructure::build(kind, ActionSet::numbered(k)?, horizon)?;
    let density = rng.gen_range(0.2..0.8);
    let winning = random_winning_set(m.histories(horizon), density, rng);
    TruncatedGame::new(m, winning)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn distributions_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let d = random_distribution(3, 4, &mut rng);
            assert_eq!(d.iter().sum::<Rational>(), Rational::one());
        }
    }

    #[test]
    fn games_are_reproducible() {
        let kinds = standard_kinds();
        let a = random_game(2, 4, &kinds, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = random_game(2, 4, &kinds, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }
}
