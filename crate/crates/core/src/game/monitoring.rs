use alloc::vec::Vec;

use super::history::{action_at, prefix_index, ActionSet, FiniteHistory, Player};
use super::partition::StagePartition;
use crate::error::{bail, Result};

/// Largest number of terminal histories `|A|^N` a monitoring structure may
/// enumerate. All checks are exhaustive, so this bounds their cost.
pub const MAX_HISTORIES: usize = 1 << 13;

/// How a monitoring structure was built; also the builder input.
///
/// Delays are attached to the player whose actions are delayed: in
/// `Delayed { p1, p2 }`, `p1` is the number of extra stages before player
/// one's actions become visible to player two. The action of stage `m` is
/// visible to the opponent at stage `n` iff `m + 1 + delay <= n`; `None`
/// means never.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonitoringKind {
    /// Every mover sees all previous actions.
    Perfect,
    /// Simultaneous pairs: player two at stage `2k+1` sees stages `< 2k`.
    Blackwell,
    Delayed { p1: Option<usize>, p2: Option<usize> },
    /// Per-stage delays; stages past the end of the list reuse the last entry.
    VariableDelay { delays: Vec<Option<usize>> },
    /// Stages are grouped into consecutive blocks; all actions of a block
    /// become public once the block is complete.
    Block { sizes: Vec<usize> },
    /// Each player sees only their own actions.
    NoMonitoring,
    /// Explicit atoms (history indices) per stage `0..N` or `0..=N`.
    Custom { stages: Vec<Vec<Vec<usize>>> },
}

impl MonitoringKind {
    pub fn name(&self) -> &'static str {
        match self {
            MonitoringKind::Perfect => "perfect",
            MonitoringKind::Blackwell => "blackwell",
            MonitoringKind::Delayed { .. } => "delayed",
            MonitoringKind::VariableDelay { .. } => "variable-delay",
            MonitoringKind::Block { .. } => "block",
            MonitoringKind::NoMonitoring => "no-monitoring",
            MonitoringKind::Custom { .. } => "custom",
        }
    }

    /// Whether the mover at stage `n` sees the action of stage `m < n`.
    /// Not defined for custom structures.
    fn observes(&self, n: usize, m: usize) -> bool {
        debug_assert!(m < n);
        if Player::mover(n) == Player::mover(m) {
            return true;
        }
        let delay = match self {
            MonitoringKind::Perfect => Some(0),
            MonitoringKind::Blackwell => {
                if n.is_multiple_of(2) {
                    Some(0)
                } else {
                    Some(1)
                }
            }
            MonitoringKind::Delayed { p1, p2 } => {
                if m.is_multiple_of(2) {
                    *p1
                } else {
                    *p2
                }
            }
            MonitoringKind::VariableDelay { delays } => {
                delays.get(m).or(delays.last()).copied().flatten()
            }
            MonitoringKind::Block { sizes } => {
                return block_end(sizes, m).is_some_and(|end| end <= n);
            }
            MonitoringKind::NoMonitoring => None,
            MonitoringKind::Custom { .. } => unreachable!("custom structures have no rule"),
        };
        delay.is_some_and(|d| m + 1 + d <= n)
    }

    /// A longer game, built with the same rule, in which actions that are
    /// unobserved by `horizon` can be checked for eventual observation.
    /// Block structures get one extra block after the listed ones. `None`
    /// for custom structures.
    pub(crate) fn lookahead(&self, horizon: usize) -> Option<(MonitoringKind, usize)> {
        let extra = match self {
            MonitoringKind::Perfect => 1,
            MonitoringKind::Blackwell => 3,
            MonitoringKind::Delayed { p1, p2 } => {
                2 + p1.unwrap_or(0).max(p2.unwrap_or(0))
            }
            MonitoringKind::VariableDelay { delays } => {
                2 + delays.iter().map(|d| d.unwrap_or(0)).max().unwrap_or(0)
            }
            MonitoringKind::Block { sizes } => {
                let end = sizes.iter().sum::<usize>().max(horizon);
                let mut sizes = sizes.clone();
                sizes.push(end + 2 - sizes.iter().sum::<usize>());
                return Some((MonitoringKind::Block { sizes }, end + 2));
            }
            MonitoringKind::NoMonitoring => 2,
            MonitoringKind::Custom { .. } => return None,
        };
        Some((self.clone(), horizon + extra))
    }
}

fn block_end(sizes: &[usize], m: usize) -> Option<usize> {
    let mut end = 0;
    for &s in sizes {
        end += s;
        if m < end {
            return Some(end);
        }
    }
    None
}

/// Information partitions `P_0, ..., P_N` of a game truncated at horizon `N`.
///
/// `P_n` for `n < N` is what the mover at stage `n` sees. `P_N` is the
/// information of player `N mod 2` after the last move; it only serves
/// observation-stage computations, nobody moves there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonitoringStructure {
    actions: ActionSet,
    horizon: usize,
    kind: MonitoringKind,
    partitions: Vec<StagePartition>,
}

impl MonitoringStructure {
    pub fn build(kind: MonitoringKind, actions: ActionSet, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            bail!(Precondition, "horizon must be at least 1");
        }
        let k = actions.len();
        match k.checked_pow(horizon as u32) {
            Some(c) if c <= MAX_HISTORIES => {}
            _ => bail!(
                Size,
                "{k}^{horizon} histories exceed the exhaustive-check cap of {MAX_HISTORIES}"
            ),
        }
        match &kind {
            MonitoringKind::Block { sizes } => {
                if sizes.contains(&0) {
                    bail!(Precondition, "block sizes must be positive");
                }
                if sizes.iter().sum::<usize>() < horizon {
                    bail!(Precondition, "block sizes must cover the horizon");
                }
            }
            MonitoringKind::VariableDelay { delays } if delays.is_empty() => {
                bail!(Precondition, "variable delay needs at least one entry");
            }
            _ => {}
        }
        let partitions = match &kind {
            MonitoringKind::Custom { stages } => custom_partitions(stages, k, horizon)?,
            _ => (0..=horizon)
                .map(|n| {
                    StagePartition::from_key(n, k.pow(n as u32), |h| {
                        (0..n)
                            .map(|m| kind.observes(n, m).then(|| action_at(h, n, m, k)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect(),
        };
        Ok(Self {
            actions,
            horizon,
            kind,
            partitions,
        })
    }

    pub fn perfect(actions: ActionSet, horizon: usize) -> Result<Self> {
        Self::build(MonitoringKind::Perfect, actions, horizon)
    }

    pub fn blackwell(actions: ActionSet, horizon: usize) -> Result<Self> {
        Self::build(MonitoringKind::Blackwell, actions, horizon)
    }

    pub fn delayed(
        actions: ActionSet,
        horizon: usize,
        p1: Option<usize>,
        p2: Option<usize>,
    ) -> Result<Self> {
        Self::build(MonitoringKind::Delayed { p1, p2 }, actions, horizon)
    }

    pub fn actions(&self) -> &ActionSet {
        &self.actions
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn kind(&self) -> &MonitoringKind {
        &self.kind
    }

    /// Partition at stage `n`, for `n <= horizon`.
    pub fn partition(&self, n: usize) -> &StagePartition {
        &self.partitions[n]
    }

    pub fn partitions(&self) -> &[StagePartition] {
        &self.partitions
    }

    /// Number of histories of length `n`.
    pub fn histories(&self, n: usize) -> usize {
        self.actions.count(n)
    }

    pub fn atom_of(&self, h: &FiniteHistory) -> Result<usize> {
        if h.stage() > self.horizon {
            bail!(Precondition, "history longer than the horizon");
        }
        self.partitions[h.stage()].atom_of(h, self.action_count())
    }

    /// Exhaustively verifies both perfect-recall conditions on all stages
    /// up to and including the horizon.
    pub fn check_perfect_recall(&self) -> PerfectRecallReport {
        match self.recall_violation(|_| true) {
            Some(v) => PerfectRecallReport::Violation(v),
            None => PerfectRecallReport::Ok,
        }
    }

    fn recall_violation(&self, include: impl Fn(usize) -> bool) -> Option<RecallViolation> {
        let k = self.action_count();
        for n in (2..=self.horizon).filter(|&n| include(n)) {
            let p = &self.partitions[n];
            for atom in p.atoms() {
                let first = atom[0];
                let own = action_at(first, n, n - 2, k);
                if let Some(&other) = atom.iter().find(|&&h| action_at(h, n, n - 2, k) != own) {
                    return Some(RecallViolation {
                        stage: n,
                        condition: RecallCondition::OwnActions,
                        first: FiniteHistory::from_index(first, n, k),
                        second: FiniteHistory::from_index(other, n, k),
                    });
                }
                let earlier = &self.partitions[n - 2];
                let coarse = earlier.atom_of_index(prefix_index(first, n, n - 2, k));
                if let Some(&other) = atom
                    .iter()
                    .find(|&&h| earlier.atom_of_index(prefix_index(h, n, n - 2, k)) != coarse)
                {
                    return Some(RecallViolation {
                        stage: n - 2,
                        condition: RecallCondition::NoForgetting,
                        first: FiniteHistory::from_index(first, n, k),
                        second: FiniteHistory::from_index(other, n, k),
                    });
                }
            }
        }
        None
    }

    pub fn has_perfect_recall(&self) -> bool {
        matches!(self.check_perfect_recall(), PerfectRecallReport::Ok)
    }

    pub(crate) fn require_perfect_recall(&self) -> Result<()> {
        report_violation(self.recall_violation(|_| true))
    }

    /// Perfect recall restricted to the stages at which `player` moves.
    pub(crate) fn require_recall_for(&self, player: Player) -> Result<()> {
        report_violation(self.recall_violation(|n| n < self.horizon && player.owns(n)))
    }
}

fn report_violation(v: Option<RecallViolation>) -> Result<()> {
    if let Some(v) = v {
        bail!(
            Model,
            "perfect recall fails ({:?}) at stage {} for histories {:?} and {:?}",
            v.condition,
            v.stage,
            v.first.actions(),
            v.second.actions()
        );
    }
    Ok(())
}

fn custom_partitions(
    stages: &[Vec<Vec<usize>>],
    k: usize,
    horizon: usize,
) -> Result<Vec<StagePartition>> {
    if stages.len() != horizon && stages.len() != horizon + 1 {
        bail!(
            Structural,
            "custom monitoring lists {} stages, expected {horizon} or {}",
            stages.len(),
            horizon + 1
        );
    }
    let mut partitions = Vec::with_capacity(horizon + 1);
    for (n, atoms) in stages.iter().enumerate() {
        partitions.push(StagePartition::from_atoms(n, k.pow(n as u32), atoms)?);
    }
    if partitions[0].len() != 1 {
        bail!(Structural, "the empty history must form a single atom");
    }
    if partitions.len() == horizon {
        // Final information: whatever was known two stages earlier plus the
        // mover's own last action.
        let n = horizon;
        let p = if n >= 2 {
            let earlier = &partitions[n - 2];
            StagePartition::from_key(n, k.pow(n as u32), |h| {
                (
                    earlier.atom_of_index(prefix_index(h, n, n - 2, k)),
                    action_at(h, n, n - 2, k),
                )
            })
        } else {
            StagePartition::from_key(n, k.pow(n as u32), |_| 0usize)
        };
        partitions.push(p);
    }
    Ok(partitions)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecallCondition {
    /// The mover at stage `n` must observe their own stage `n - 2` action.
    OwnActions,
    /// Histories indistinguishable at `n + 2` must be indistinguishable at `n`.
    NoForgetting,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecallViolation {
    pub stage: usize,
    pub condition: RecallCondition,
    pub first: FiniteHistory,
    pub second: FiniteHistory,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PerfectRecallReport {
    Ok,
    Violation(RecallViolation),
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sl() -> ActionSet {
        ActionSet::new(&["S", "L"]).unwrap()
    }

    #[test]
    fn perfect_stage_one_is_discrete() {
        let m = MonitoringStructure::perfect(sl(), 2).unwrap();
        assert_eq!(m.partition(1).len(), 2);
        assert!(m.partition(2).is_discrete());
        assert_eq!(m.partition(0).len(), 1);
    }

    #[test]
    fn blackwell_stage_one_is_a_single_atom() {
        let m = MonitoringStructure::blackwell(sl(), 2).unwrap();
        assert_eq!(m.partition(1).atoms(), &[vec![0, 1]]);
    }

    #[test]
    fn zero_delay_is_perfect() {
        for n in 1..=6 {
            let p = MonitoringStructure::perfect(sl(), n).unwrap();
            let d = MonitoringStructure::delayed(sl(), n, Some(0), Some(0)).unwrap();
            assert_eq!(p.partitions(), d.partitions());
        }
    }

    #[test]
    fn blackwell_is_delay_one_for_player_one_only() {
        for n in 1..=7 {
            let b = MonitoringStructure::blackwell(sl(), n).unwrap();
            let d = MonitoringStructure::delayed(sl(), n, Some(1), Some(0)).unwrap();
            assert_eq!(b.partitions(), d.partitions());
        }
    }

    #[test]
    fn atom_lookup() {
        let a = sl();
        let perfect = MonitoringStructure::perfect(a.clone(), 3).unwrap();
        let h = a.parse_history("SL").unwrap();
        let atom = perfect.atom_of(&h).unwrap();
        assert_eq!(perfect.partition(2).members(atom), &[h.index(2)]);

        let bw = MonitoringStructure::blackwell(a.clone(), 2).unwrap();
        let atom = bw.atom_of(&a.parse_history("S").unwrap()).unwrap();
        assert_eq!(bw.partition(1).members(atom), &[0, 1]);

        // single block of four stages: stage 2 mover only knows a_0
        let block =
            MonitoringStructure::build(MonitoringKind::Block { sizes: vec![4] }, a.clone(), 4)
                .unwrap();
        let atom = block.atom_of(&a.parse_history("SL").unwrap()).unwrap();
        let members: Vec<usize> = block.partition(2).members(atom).to_vec();
        let expect = vec![
            a.parse_history("SS").unwrap().index(2),
            a.parse_history("SL").unwrap().index(2),
        ];
        assert_eq!(members, expect);
    }

    #[test]
    fn block_sizes_must_cover() {
        let r = MonitoringStructure::build(MonitoringKind::Block { sizes: vec![2] }, sl(), 3);
        assert!(matches!(r, Err(crate::Error::Precondition(_))));
    }

    #[test]
    fn size_cap() {
        let r = MonitoringStructure::perfect(sl(), 14);
        assert!(matches!(r, Err(crate::Error::Size(_))));
    }

    #[test]
    fn custom_validates_and_fills_final_stage() {
        // perfect information written out by hand, N = 2
        let stages = vec![vec![vec![0]], vec![vec![0], vec![1]]];
        let m = MonitoringStructure::build(MonitoringKind::Custom { stages }, sl(), 2).unwrap();
        let p = MonitoringStructure::perfect(sl(), 2).unwrap();
        assert_eq!(m.partition(1), p.partition(1));
        assert_eq!(m.partition(2).len(), 2);
        assert!(m.has_perfect_recall());

        let bad = vec![vec![vec![0]], vec![vec![0, 1], vec![1]]];
        let r = MonitoringStructure::build(MonitoringKind::Custom { stages: bad }, sl(), 2);
        assert!(matches!(r, Err(crate::Error::Structural(_))));
    }

    #[test]
    fn builders_have_perfect_recall() {
        let a = sl();
        for n in 1..=8 {
            for kind in [
                MonitoringKind::Perfect,
                MonitoringKind::Blackwell,
                MonitoringKind::Delayed { p1: Some(1), p2: Some(2) },
                MonitoringKind::Delayed { p1: None, p2: Some(0) },
                MonitoringKind::NoMonitoring,
                MonitoringKind::Block { sizes: vec![3, 3, 3] },
                MonitoringKind::VariableDelay { delays: vec![Some(2), Some(0), Some(1)] },
            ] {
                let m = MonitoringStructure::build(kind.clone(), a.clone(), n).unwrap();
                assert_eq!(m.check_perfect_recall(), PerfectRecallReport::Ok, "{kind:?} N={n}");
            }
        }
    }

    #[test]
    fn merged_own_actions_violate_recall() {
        // stage 2 atoms merge histories differing in player one's a_0
        let stages = vec![vec![vec![0]], vec![vec![0, 1]], vec![vec![0, 2], vec![1, 3]]];
        let m = MonitoringStructure::build(MonitoringKind::Custom { stages }, sl(), 2).unwrap();
        match m.check_perfect_recall() {
            PerfectRecallReport::Violation(v) => {
                assert_eq!(v.condition, RecallCondition::OwnActions);
                assert_eq!(v.stage, 2);
                assert_ne!(v.first.actions()[0], v.second.actions()[0]);
            }
            PerfectRecallReport::Ok => panic!("violation not detected"),
        }
    }
}
