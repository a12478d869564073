use alloc::vec;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::game::{MonitoringStructure, Player};
use crate::scalar::Scalar;

/// Per-stage maps from information atoms to action distributions.
///
/// `tables[n][p]` is the distribution used at stage `n` on atom `p`; tables
/// of stages the owner does not play are empty.
#[derive(Debug, Clone, PartialEq)]
pub struct BehavioralStrategy<T> {
    owner: Player,
    actions: usize,
    tables: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> BehavioralStrategy<T> {
    /// Validates shape against `m` and that every distribution is a
    /// probability vector (exactly, or within tolerance for floats).
    pub fn new(owner: Player, m: &MonitoringStructure, tables: Vec<Vec<Vec<T>>>) -> Result<Self> {
        let horizon = m.horizon();
        let k = m.action_count();
        if tables.len() != horizon {
            bail!(Structural, "strategy has {} stages, horizon is {horizon}", tables.len());
        }
        for (n, table) in tables.iter().enumerate() {
            let expected = if owner.owns(n) { m.partition(n).len() } else { 0 };
            if table.len() != expected {
                bail!(
                    Structural,
                    "{owner} strategy: stage {n} has {} atoms, expected {expected}",
                    table.len()
                );
            }
            for (p, dist) in table.iter().enumerate() {
                check_distribution(dist, k).map_err(|e| {
                    crate::Error::Structural(alloc::format!("stage {n}, atom {p}: {e}"))
                })?;
            }
        }
        Ok(Self {
            owner,
            actions: k,
            tables,
        })
    }

    /// Assembles a strategy whose shape is already known to be valid.
    pub(crate) fn from_parts(owner: Player, actions: usize, tables: Vec<Vec<Vec<T>>>) -> Self {
        Self {
            owner,
            actions,
            tables,
        }
    }

    pub fn from_fn(
        owner: Player,
        m: &MonitoringStructure,
        mut f: impl FnMut(usize, usize) -> Vec<T>,
    ) -> Result<Self> {
        let tables = (0..m.horizon())
            .map(|n| {
                if owner.owns(n) {
                    (0..m.partition(n).len()).map(|p| f(n, p)).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        Self::new(owner, m, tables)
    }

    /// Pure strategy from a choice function `(stage, atom) -> action`.
    pub fn pure(
        owner: Player,
        m: &MonitoringStructure,
        mut choose: impl FnMut(usize, usize) -> usize,
    ) -> Result<Self> {
        let k = m.action_count();
        Self::from_fn(owner, m, |n, p| point_mass(k, choose(n, p)))
    }

    pub fn uniform(owner: Player, m: &MonitoringStructure) -> Self {
        let k = m.action_count();
        let u = vec![T::from_ratio(1, k as i64); k];
        let tables = (0..m.horizon())
            .map(|n| {
                if owner.owns(n) {
                    vec![u.clone(); m.partition(n).len()]
                } else {
                    Vec::new()
                }
            })
            .collect();
        Self {
            owner,
            actions: k,
            tables,
        }
    }

    pub fn owner(&self) -> Player {
        self.owner
    }

    pub fn horizon(&self) -> usize {
        self.tables.len()
    }

    pub fn action_count(&self) -> usize {
        self.actions
    }

    pub fn owned_stages(&self) -> impl Iterator<Item = usize> {
        self.owner.stages(self.tables.len())
    }

    #[inline]
    pub fn distribution(&self, stage: usize, atom: usize) -> &[T] {
        &self.tables[stage][atom]
    }

    pub fn stage_table(&self, stage: usize) -> &[Vec<T>] {
        &self.tables[stage]
    }

    pub fn tables(&self) -> &[Vec<Vec<T>>] {
        &self.tables
    }

    /// Checks that the strategy fits `m` (same horizon and atom counts).
    pub fn check_fits(&self, m: &MonitoringStructure) -> Result<()> {
        if self.horizon() != m.horizon() || self.actions != m.action_count() {
            bail!(Precondition, "strategy does not match the game's horizon or actions");
        }
        for n in self.owned_stages() {
            if self.tables[n].len() != m.partition(n).len() {
                bail!(Precondition, "strategy atom count differs from the partition at stage {n}");
            }
        }
        Ok(())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> BehavioralStrategy<U> {
        BehavioralStrategy {
            owner: self.owner,
            actions: self.actions,
            tables: self
                .tables
                .iter()
                .map(|t| t.iter().map(|d| d.iter().map(&f).collect()).collect())
                .collect(),
        }
    }

    pub fn to_f64(&self) -> BehavioralStrategy<f64> {
        self.map(|v| v.to_f64())
    }

    /// True when every distribution is a point mass.
    pub fn is_pure(&self) -> bool {
        self.tables
            .iter()
            .flatten()
            .all(|d| d.iter().filter(|p| !p.is_negligible()).count() == 1)
    }
}

pub(crate) fn point_mass<T: Scalar>(k: usize, action: usize) -> Vec<T> {
    let mut d = vec![T::zero(); k];
    d[action] = T::one();
    d
}

fn check_distribution<T: Scalar>(dist: &[T], k: usize) -> core::result::Result<(), &'static str> {
    if dist.len() != k {
        return Err("distribution length differs from the action count");
    }
    if dist.iter().any(|p| p.is_strictly_negative()) {
        return Err("negative probability");
    }
    let total = dist.iter().fold(T::zero(), |acc, p| acc + p.clone());
    let slack = if T::EXACT { T::zero() } else { T::from_ratio(1, 1_000_000_000_000) };
    if (total - T::one()).abs() > slack {
        return Err("probabilities do not sum to one");
    }
    Ok(())
}

/// `l1` distance between two distributions.
pub fn l1<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + (x.clone() - y.clone()).abs())
}

/// Sum over owned stages of the largest `l1` gap between the two
/// strategies' distributions on a common atom.
pub fn strategy_distance<T: Scalar>(
    s: &BehavioralStrategy<T>,
    t: &BehavioralStrategy<T>,
) -> Result<T> {
    if s.owner != t.owner {
        bail!(Precondition, "distance between strategies of different players");
    }
    if s.horizon() != t.horizon() || s.actions != t.actions {
        bail!(Precondition, "distance between strategies of different games");
    }
    let mut total = T::zero();
    for n in s.owned_stages() {
        if s.tables[n].len() != t.tables[n].len() {
            bail!(Precondition, "strategies disagree on the atoms of stage {n}");
        }
        let mut worst = T::zero();
        for (a, b) in s.tables[n].iter().zip(&t.tables[n]) {
            let d = l1(a, b);
            if d > worst {
                worst = d;
            }
        }
        total += worst;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ActionSet;
    use crate::scalar::{ratio, Rational};

    fn game(n: usize) -> MonitoringStructure {
        MonitoringStructure::blackwell(ActionSet::numbered(2).unwrap(), n).unwrap()
    }

    fn dist(p: (i64, i64), q: (i64, i64)) -> Vec<Rational> {
        vec![ratio(p.0, p.1), ratio(q.0, q.1)]
    }

    #[test]
    fn rejects_bad_distributions() {
        let m = game(2);
        let bad = BehavioralStrategy::<Rational>::from_fn(Player::One, &m, |_, _| dist((1, 2), (1, 3)));
        assert!(bad.is_err());
        let neg = BehavioralStrategy::<Rational>::from_fn(Player::One, &m, |_, _| dist((3, 2), (-1, 2)));
        assert!(neg.is_err());
        let wrong_len = BehavioralStrategy::<Rational>::from_fn(Player::One, &m, |_, _| vec![ratio(1, 1)]);
        assert!(wrong_len.is_err());
    }

    #[test]
    fn distance_examples() {
        let m = game(3);
        let a = BehavioralStrategy::<Rational>::pure(Player::One, &m, |_, _| 0).unwrap();
        assert_eq!(strategy_distance(&a, &a).unwrap(), ratio(0, 1));
        let b = BehavioralStrategy::<Rational>::pure(Player::One, &m, |n, _| if n == 0 { 1 } else { 0 }).unwrap();
        assert_eq!(strategy_distance(&a, &b).unwrap(), ratio(2, 1));
        // (1,0) vs (1/2,1/2) at stage 0; (1,0) vs (3/4,1/4) at one stage-2 atom
        let c = BehavioralStrategy::<Rational>::from_fn(Player::One, &m, |n, p| match (n, p) {
            (0, _) => dist((1, 2), (1, 2)),
            (2, 1) => dist((3, 4), (1, 4)),
            _ => dist((1, 1), (0, 1)),
        })
        .unwrap();
        assert_eq!(strategy_distance(&a, &c).unwrap(), ratio(3, 2));
    }

    #[test]
    fn distance_needs_same_owner() {
        let m = game(2);
        let a = BehavioralStrategy::<Rational>::uniform(Player::One, &m);
        let b = BehavioralStrategy::<Rational>::uniform(Player::Two, &m);
        assert!(matches!(strategy_distance(&a, &b), Err(crate::Error::Precondition(_))));
    }
}
