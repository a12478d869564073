use alloc::vec;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::game::{action_at, prefix_index, MonitoringStructure, Player};
use crate::scalar::Scalar;
use crate::strategy::BehavioralStrategy;

/// One decision point of a player: an atom of the partition at one of the
/// player's stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Infoset {
    pub stage: usize,
    pub atom: usize,
    /// Sequence leading here; `0` is the empty sequence.
    pub parent: usize,
}

/// Information sets and sequences of one player, under perfect recall.
///
/// Sequence `0` is the empty sequence; infoset `i` owns sequences
/// `1 + i k .. 1 + (i + 1) k`. Infosets are numbered by stage, then atom,
/// so parents always precede children.
#[derive(Debug, Clone)]
pub struct SequenceSpace {
    player: Player,
    actions: usize,
    infosets: Vec<Infoset>,
    by_stage: Vec<Vec<usize>>,
    /// Sequence of every terminal history.
    terminal: Vec<usize>,
}

impl SequenceSpace {
    pub fn build(m: &MonitoringStructure, player: Player) -> Result<Self> {
        m.require_recall_for(player)?;
        let k = m.action_count();
        let horizon = m.horizon();
        let mut infosets = Vec::new();
        let mut by_stage = vec![Vec::new(); horizon];
        for n in player.stages(horizon) {
            let part = m.partition(n);
            for atom in 0..part.len() {
                let parent = if n < 2 {
                    0
                } else {
                    let h = part.members(atom)[0];
                    let prev = m.partition(n - 2).atom_of_index(prefix_index(h, n, n - 2, k));
                    let id = by_stage[n - 2][prev];
                    1 + id * k + action_at(h, n, n - 2, k)
                };
                by_stage[n].push(infosets.len());
                infosets.push(Infoset {
                    stage: n,
                    atom,
                    parent,
                });
            }
        }
        let last = player.stages(horizon).last();
        let terminal = (0..m.histories(horizon))
            .map(|h| match last {
                None => 0,
                Some(n) => {
                    let atom = m.partition(n).atom_of_index(prefix_index(h, horizon, n, k));
                    1 + by_stage[n][atom] * k + action_at(h, horizon, n, k)
                }
            })
            .collect();
        Ok(Self {
            player,
            actions: k,
            infosets,
            by_stage,
            terminal,
        })
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn infosets(&self) -> &[Infoset] {
        &self.infosets
    }

    pub fn sequence_count(&self) -> usize {
        1 + self.infosets.len() * self.actions
    }

    pub fn sequence(&self, infoset: usize, action: usize) -> usize {
        1 + infoset * self.actions + action
    }

    pub fn infoset_at(&self, stage: usize, atom: usize) -> usize {
        self.by_stage[stage][atom]
    }

    /// The player's last sequence along terminal history `h`.
    #[inline]
    pub fn terminal_sequence(&self, h: usize) -> usize {
        self.terminal[h]
    }

    /// Realization plan of a behavioral strategy.
    pub fn realization<T: Scalar>(&self, s: &BehavioralStrategy<T>) -> Vec<T> {
        let mut r = vec![T::zero(); self.sequence_count()];
        r[0] = T::one();
        for (i, info) in self.infosets.iter().enumerate() {
            let reach = r[info.parent].clone();
            for (a, p) in s.distribution(info.stage, info.atom).iter().enumerate() {
                r[self.sequence(i, a)] = reach.clone() * p.clone();
            }
        }
        r
    }

    /// Behavioral strategy of a realization plan. Infosets the plan never
    /// reaches get the uniform distribution.
    pub fn behavioral<T: Scalar>(
        &self,
        m: &MonitoringStructure,
        plan: &[T],
    ) -> Result<BehavioralStrategy<T>> {
        if plan.len() != self.sequence_count() {
            bail!(Precondition, "realization plan has the wrong length");
        }
        let k = self.actions;
        BehavioralStrategy::from_fn(self.player, m, |n, atom| {
            let i = self.by_stage[n][atom];
            let reach = plan[self.infosets[i].parent].clone();
            if !reach.is_strictly_positive() {
                return vec![T::from_ratio(1, k as i64); k];
            }
            let raw: Vec<T> = (0..k)
                .map(|a| {
                    let v = plan[self.sequence(i, a)].clone() / reach.clone();
                    if v.is_negative() { T::zero() } else { v }
                })
                .collect();
            if T::EXACT {
                raw
            } else {
                // renormalize float noise away
                let total = raw.iter().fold(T::zero(), |acc, v| acc + v.clone());
                raw.into_iter().map(|v| v / total.clone()).collect()
            }
        })
    }

    /// Pure strategy given by one action per infoset.
    pub fn pure_strategy<T: Scalar>(
        &self,
        m: &MonitoringStructure,
        choice: &[usize],
    ) -> Result<BehavioralStrategy<T>> {
        BehavioralStrategy::pure(self.player, m, |n, atom| choice[self.by_stage[n][atom]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ActionSet;
    use crate::scalar::{ratio, Rational};

    #[test]
    fn perfect_information_tree() {
        let m = MonitoringStructure::perfect(ActionSet::numbered(2).unwrap(), 4).unwrap();
        let one = SequenceSpace::build(&m, Player::One).unwrap();
        assert_eq!(one.infosets().len(), 1 + 4);
        assert_eq!(one.sequence_count(), 11);
        // stage-2 atom of history (1, 0) hangs under sequence "play 1 at stage 0"
        let info = one.infosets()[one.infoset_at(2, 2)];
        assert_eq!(info.parent, one.sequence(0, 1));
        let two = SequenceSpace::build(&m, Player::Two).unwrap();
        assert_eq!(two.sequence_count(), 1 + (2 + 8) * 2);
    }

    #[test]
    fn realization_round_trip() {
        let m = MonitoringStructure::blackwell(ActionSet::numbered(2).unwrap(), 4).unwrap();
        let space = SequenceSpace::build(&m, Player::One).unwrap();
        let x = BehavioralStrategy::<Rational>::from_fn(Player::One, &m, |n, p| {
            let q = ratio(1 + (n + p) as i64 % 3, 4);
            vec![q.clone(), ratio(1, 1) - q]
        })
        .unwrap();
        let plan = space.realization(&x);
        assert_eq!(space.behavioral(&m, &plan).unwrap(), x);
    }

    #[test]
    fn refuses_without_recall() {
        // stage 2 merges histories that differ in player one's own action
        let bad = MonitoringStructure::build(
            crate::game::MonitoringKind::Custom {
                stages: vec![
                    vec![vec![0]],
                    vec![vec![0, 1]],
                    vec![vec![0, 1, 2, 3]],
                    vec![(0..8).collect()],
                ],
            },
            ActionSet::numbered(2).unwrap(),
            3,
        )
        .unwrap();
        assert!(matches!(SequenceSpace::build(&bad, Player::One), Err(crate::Error::Model(_))));
        assert!(SequenceSpace::build(&bad, Player::Two).is_ok());
    }
}
