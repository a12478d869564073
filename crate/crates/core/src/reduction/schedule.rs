use alloc::vec;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::game::{action_at, decode, observation_stage, prefix_index, MonitoringStructure};

/// When each action is revealed by Nature in the auxiliary game.
///
/// `k(m)` is the first opposite-parity stage `n < N` at which the opponent
/// of the stage-`m` mover observes `a_m`. Actions without such a stage are
/// revealed after the last move, in the terminal group (indexed as stage
/// `N` below). `K_n` lists the stages revealed at `n`; the state `s_n` is the
/// tuple of their actions, encoded as an index in `A^{K_n}` with coordinates
/// in increasing stage order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSchedule {
    horizon: usize,
    actions: usize,
    observation: Vec<Option<usize>>,
    groups: Vec<Vec<usize>>,
    /// `codes[n][h]` is `f_n(h)` for every length-`n` history.
    codes: Vec<Vec<usize>>,
}

impl StateSchedule {
    /// Uses the minimal observation stages.
    pub fn build(m: &MonitoringStructure) -> Result<Self> {
        m.require_perfect_recall()?;
        let horizon = m.horizon();
        let mut stages = Vec::with_capacity(horizon);
        for m0 in 0..horizon {
            stages.push(observation_stage(m, m0)?.filter(|&n| n < horizon));
        }
        Self::assemble(m, stages)
    }

    /// Uses explicit revelation stages (`None` for terminal). Each must be
    /// later than the action, of opposite parity, and a stage at which the
    /// opponent actually observes it.
    pub fn with_stages(m: &MonitoringStructure, stages: Vec<Option<usize>>) -> Result<Self> {
        m.require_perfect_recall()?;
        let horizon = m.horizon();
        if stages.len() != horizon {
            bail!(Precondition, "{} revelation stages given for horizon {horizon}", stages.len());
        }
        let k = m.action_count();
        for (m0, s) in stages.iter().enumerate() {
            let Some(n) = *s else { continue };
            if n <= m0 || n % 2 == m0 % 2 || n >= horizon {
                bail!(Precondition, "stage {n} cannot reveal the action of stage {m0}");
            }
            let observed = m.partition(n).atoms().iter().all(|atom| {
                let a = action_at(atom[0], n, m0, k);
                atom.iter().all(|&h| action_at(h, n, m0, k) == a)
            });
            if !observed {
                bail!(Precondition, "the action of stage {m0} is not yet observed at stage {n}");
            }
        }
        Self::assemble(m, stages)
    }

    fn assemble(m: &MonitoringStructure, observation: Vec<Option<usize>>) -> Result<Self> {
        let horizon = m.horizon();
        let k = m.action_count();
        let mut groups = vec![Vec::new(); horizon + 1];
        for (m0, s) in observation.iter().enumerate() {
            groups[s.unwrap_or(horizon)].push(m0);
        }
        let codes = (0..=horizon)
            .map(|n| {
                (0..m.histories(n))
                    .map(|h| groups[n].iter().fold(0, |c, &j| c * k + action_at(h, n, j, k)))
                    .collect()
            })
            .collect();
        let schedule = Self {
            horizon,
            actions: k,
            observation,
            groups,
            codes,
        };
        schedule.check_reconstruction()?;
        Ok(schedule)
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// `k(m)`, or `None` when the action is revealed only at the end.
    pub fn revelation(&self, m: usize) -> Option<usize> {
        self.observation[m]
    }

    pub fn revelations(&self) -> &[Option<usize>] {
        &self.observation
    }

    /// `K_n` for `n < N`; `K_N` is the terminal group.
    pub fn group(&self, n: usize) -> &[usize] {
        &self.groups[n]
    }

    pub fn terminal_group(&self) -> &[usize] {
        &self.groups[self.horizon]
    }

    /// Number of states `|A|^{|K_n|}`.
    pub fn state_count(&self, n: usize) -> usize {
        self.actions.pow(self.groups[n].len() as u32)
    }

    /// `f_n` of the length-`n` history with index `h`.
    #[inline]
    pub fn state(&self, n: usize, h: usize) -> usize {
        self.codes[n][h]
    }

    /// The actions recorded in state `code` of stage `n`.
    pub fn state_actions(&self, n: usize, code: usize) -> Vec<usize> {
        decode(code, self.groups[n].len(), self.actions)
    }

    pub fn state_code(&self, n: usize, actions: &[usize]) -> Result<usize> {
        if actions.len() != self.groups[n].len() || actions.iter().any(|&a| a >= self.actions) {
            bail!(Precondition, "malformed state for stage {n}");
        }
        Ok(actions.iter().fold(0, |c, &a| c * self.actions + a))
    }

    /// `F`: the length-`N` history whose coordinates are read off the
    /// states `s_0, ..., s_N`.
    pub fn reconstruct(&self, states: &[usize]) -> Result<usize> {
        if states.len() != self.horizon + 1 {
            bail!(Precondition, "reconstruction needs states for stages 0..={}", self.horizon);
        }
        let mut u = vec![usize::MAX; self.horizon];
        for (n, &code) in states.iter().enumerate() {
            for (&m, a) in self.groups[n].iter().zip(self.state_actions(n, code)) {
                u[m] = a;
            }
        }
        Ok(u.iter().fold(0, |h, &a| h * self.actions + a))
    }

    /// Verifies `F(f_0(u|_0), ..., f_N(u)) = u` for every `u`.
    fn check_reconstruction(&self) -> Result<()> {
        let n = self.horizon;
        for u in 0..self.codes[n].len() {
            let states: Vec<usize> = (0..=n)
                .map(|j| self.codes[j][prefix_index(u, n, j, self.actions)])
                .collect();
            if self.reconstruct(&states)? != u {
                bail!(Invariant, "state reconstruction fails on history {u}");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ActionSet;

    fn two() -> ActionSet {
        ActionSet::numbered(2).unwrap()
    }

    #[test]
    fn schedules() {
        let pi = StateSchedule::build(&MonitoringStructure::perfect(two(), 4).unwrap()).unwrap();
        assert_eq!(pi.revelations(), &[Some(1), Some(2), Some(3), None]);
        let bw = StateSchedule::build(&MonitoringStructure::blackwell(two(), 4).unwrap()).unwrap();
        assert_eq!(bw.revelations(), &[Some(3), Some(2), None, None]);
        assert_eq!(bw.terminal_group(), &[2, 3]);
        let none = MonitoringStructure::build(crate::game::MonitoringKind::NoMonitoring, two(), 4).unwrap();
        let none = StateSchedule::build(&none).unwrap();
        assert!(none.revelations().iter().all(Option::is_none));
    }

    #[test]
    fn states_and_reconstruction() {
        let bw = StateSchedule::build(&MonitoringStructure::blackwell(two(), 4).unwrap()).unwrap();
        // h = (1, 0, 1): s_3 = (a_0) = 1
        assert_eq!(bw.state(3, 0b101), 1);
        assert_eq!(bw.state_actions(4, bw.state(4, 0b1011)), vec![1, 1]);
        assert_eq!(bw.reconstruct(&[0, 0, 0, 1, 3]).unwrap(), 0b1011);
    }

    #[test]
    fn explicit_stages_are_checked() {
        let m = MonitoringStructure::blackwell(two(), 4).unwrap();
        // a_0 is observed by player two at 3, so a later player-two stage is not available
        assert!(StateSchedule::with_stages(&m, vec![Some(1), Some(2), None, None]).is_err());
        assert!(StateSchedule::with_stages(&m, vec![None, None, None, None]).is_ok());
        assert!(StateSchedule::with_stages(&m, vec![Some(2), None, None, None]).is_err());
    }
}
