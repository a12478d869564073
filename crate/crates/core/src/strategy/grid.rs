use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::behavioral::{l1, BehavioralStrategy};
use crate::error::{bail, Result};
use crate::scalar::{Rational, Scalar};

/// Default cap on the number of points in a single grid.
pub const DEFAULT_GRID_CAP: usize = 200_000;

/// Finite `eps / 2^n`-dense subset of the simplex over `k` actions: all
/// distributions whose coordinates are multiples of `1 / K`, with `K` the
/// smallest integer such that `2 (k - 1) / K <= eps / 2^n`.
///
/// Points are stored as numerator vectors in ascending lexicographic order;
/// that order is the grid index used for tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexGrid {
    stage: usize,
    epsilon: Rational,
    denominator: u64,
    points: Vec<Vec<u64>>,
}

impl SimplexGrid {
    pub fn build(actions: usize, epsilon: &Rational, stage: usize, cap: usize) -> Result<Self> {
        if actions < 2 {
            bail!(Precondition, "grids need at least two actions");
        }
        if !epsilon.is_positive() {
            bail!(Precondition, "epsilon must be positive");
        }
        let scale = BigInt::from(2u8) * BigInt::from(actions - 1) * (BigInt::one() << stage);
        let needed = Rational::from_integer(scale) / epsilon;
        let (q, r) = needed.numer().div_rem(needed.denom());
        let den = if r.is_zero() { q } else { q + 1u8 };
        let den = den.max(BigInt::one());
        let Some(denominator) = den.to_u64() else {
            bail!(Size, "grid denominator {den} is too large; use a larger epsilon");
        };
        let size = compositions(denominator, actions);
        if size.is_none_or(|s| s > cap as u128) {
            bail!(
                Size,
                "grid for stage {stage} would hold more than {cap} points (denominator {denominator}); use a larger epsilon"
            );
        }
        let mut points = Vec::new();
        let mut current = vec![0u64; actions];
        enumerate(denominator, 0, &mut current, &mut points);
        Ok(Self {
            stage,
            epsilon: epsilon.clone(),
            denominator,
            points,
        })
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn numerators(&self, index: usize) -> &[u64] {
        &self.points[index]
    }

    /// Covering radius `eps / 2^n`.
    pub fn radius(&self) -> Rational {
        self.epsilon.clone() / Rational::from_integer(BigInt::one() << self.stage)
    }

    pub fn point<T: Scalar>(&self, index: usize) -> Vec<T> {
        let den = self.denominator as i64;
        self.points[index]
            .iter()
            .map(|&n| T::from_ratio(n as i64, den))
            .collect()
    }

    /// Nearest member in `l1`; ties go to the lowest index.
    pub fn nearest<T: Scalar>(&self, dist: &[T]) -> usize {
        let mut best = 0;
        let mut best_d: Option<T> = None;
        for i in 0..self.points.len() {
            let d = l1(dist, &self.point::<T>(i));
            if best_d.as_ref().is_none_or(|b| d < *b) {
                best = i;
                best_d = Some(d);
            }
        }
        best
    }

    /// Exact grid index of `dist`, if it is a member.
    pub fn locate(&self, dist: &[Rational]) -> Option<usize> {
        if dist.len() != self.points.first()?.len() {
            return None;
        }
        let den = Rational::from_integer(BigInt::from(self.denominator));
        let mut numerators = Vec::with_capacity(dist.len());
        for p in dist {
            let scaled = p * &den;
            if !scaled.is_integer() || scaled.is_negative() {
                return None;
            }
            numerators.push(scaled.to_integer().to_u64()?);
        }
        self.points.binary_search(&numerators).ok()
    }
}

fn compositions(total: u64, parts: usize) -> Option<u128> {
    // C(total + parts - 1, parts - 1)
    let mut acc: u128 = 1;
    for i in 1..parts as u128 {
        acc = acc.checked_mul(total as u128 + i)? / i;
    }
    Some(acc)
}

fn enumerate(remaining: u64, slot: usize, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if slot + 1 == current.len() {
        current[slot] = remaining;
        out.push(current.clone());
        return;
    }
    for v in 0..=remaining {
        current[slot] = v;
        enumerate(remaining - v, slot + 1, current, out);
    }
}

/// Grids `Δ_{ε,n}` for stages `0..horizon`.
pub fn build_grids(
    actions: usize,
    epsilon: &Rational,
    horizon: usize,
    cap: usize,
) -> Result<Vec<SimplexGrid>> {
    (0..horizon)
        .map(|n| SimplexGrid::build(actions, epsilon, n, cap))
        .collect()
}

fn grid_for(grids: &[SimplexGrid], stage: usize) -> Result<&SimplexGrid> {
    match grids.iter().find(|g| g.stage() == stage) {
        Some(g) => Ok(g),
        None => bail!(Precondition, "no grid supplied for stage {stage}"),
    }
}

/// Replaces every distribution by its nearest grid member.
pub fn snap_strategy<T: Scalar>(
    s: &BehavioralStrategy<T>,
    grids: &[SimplexGrid],
) -> Result<BehavioralStrategy<T>> {
    let mut tables: Vec<Vec<Vec<T>>> = vec![Vec::new(); s.horizon()];
    for n in s.owned_stages() {
        let grid = grid_for(grids, n)?;
        if grid.points.first().map(Vec::len) != Some(s.action_count()) {
            bail!(Precondition, "grid for stage {n} has the wrong number of actions");
        }
        tables[n] = s
            .stage_table(n)
            .iter()
            .map(|d| grid.point(grid.nearest(d)))
            .collect();
    }
    Ok(snapped(s, tables))
}

fn snapped<T: Scalar>(s: &BehavioralStrategy<T>, tables: Vec<Vec<Vec<T>>>) -> BehavioralStrategy<T> {
    // shape is inherited from `s`, and grid points are distributions
    BehavioralStrategy::from_parts(s.owner(), s.action_count(), tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn grid_examples() {
        let g = SimplexGrid::build(2, &ratio(2, 1), 0, DEFAULT_GRID_CAP).unwrap();
        assert_eq!(g.denominator(), 1);
        assert_eq!(g.len(), 2);
        assert_eq!(l1(&[ratio(1, 2), ratio(1, 2)], &g.point::<Rational>(0)), ratio(1, 1));

        let g = SimplexGrid::build(2, &ratio(1, 2), 1, DEFAULT_GRID_CAP).unwrap();
        assert_eq!(g.denominator(), 8);
        assert_eq!(g.len(), 9);
        assert_eq!(g.radius(), ratio(1, 4));

        let g = SimplexGrid::build(3, &ratio(1, 1), 0, DEFAULT_GRID_CAP).unwrap();
        assert_eq!(g.denominator(), 4);
        assert_eq!(g.len(), 15);
    }

    #[test]
    fn points_are_sorted_and_locatable() {
        let g = SimplexGrid::build(3, &ratio(1, 1), 1, DEFAULT_GRID_CAP).unwrap();
        assert!(g.points.windows(2).all(|w| w[0] < w[1]));
        for i in 0..g.len() {
            assert_eq!(g.locate(&g.point::<Rational>(i)), Some(i));
        }
        assert_eq!(g.locate(&[ratio(1, 3), ratio(1, 3), ratio(1, 3)]), None);
    }

    #[test]
    fn cap_and_bad_inputs() {
        assert!(matches!(
            SimplexGrid::build(3, &ratio(1, 1000), 4, 1000),
            Err(crate::Error::Size(_))
        ));
        assert!(SimplexGrid::build(2, &ratio(0, 1), 0, 10).is_err());
        assert!(SimplexGrid::build(1, &ratio(1, 1), 0, 10).is_err());
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let g = SimplexGrid::build(2, &ratio(2, 1), 0, DEFAULT_GRID_CAP).unwrap();
        assert_eq!(g.nearest(&[ratio(1, 2), ratio(1, 2)]), 0);
        assert_eq!(g.numerators(0), &[0, 1]);
    }
}
