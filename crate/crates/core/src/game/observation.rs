//! When does the opponent learn the action of a given stage?
//!
//! The primary route follows the König-tree argument: for each action `a`
//! we grow the tree of observer-parity histories whose atom is still
//! compatible with both "stage `m` was `a`" and "stage `m` was not `a`". The
//! action is observed two stages after the deepest surviving node. A direct
//! scan over atoms gives the same answer under perfect recall and is kept as
//! an independent route.

use alloc::vec;
use alloc::vec::Vec;

use super::history::{action_at, Player};
use super::monitoring::MonitoringStructure;
use crate::error::{bail, Result};

/// Histories that keep the stage-`stage` action ambiguous between `action`
/// and its complement, grouped by length (observer parity only).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationTree {
    pub stage: usize,
    pub action: usize,
    /// `(length, history indices)` for each nonempty level, in increasing
    /// length. Lengths share the parity of the observer's stages.
    pub levels: Vec<(usize, Vec<usize>)>,
}

impl ObservationTree {
    pub fn build(m: &MonitoringStructure, stage: usize, action: usize) -> Result<Self> {
        let horizon = m.horizon();
        if stage >= horizon {
            bail!(Precondition, "stage {stage} is not below the horizon {horizon}");
        }
        let k = m.action_count();
        let ambiguous = |n: usize, h: usize| -> bool {
            if n <= stage {
                return true;
            }
            let members = m.partition(n).members(m.partition(n).atom_of_index(h));
            let mut hit = false;
            let mut miss = false;
            for &g in members {
                if action_at(g, n, stage, k) == action {
                    hit = true;
                } else {
                    miss = true;
                }
                if hit && miss {
                    return true;
                }
            }
            false
        };
        let root = (stage + 1) % 2;
        let mut levels = Vec::new();
        let mut current: Vec<usize> = (0..m.histories(root)).filter(|&h| ambiguous(root, h)).collect();
        let mut n = root;
        while !current.is_empty() {
            levels.push((n, current.clone()));
            if n + 2 > horizon {
                break;
            }
            let mut next = Vec::new();
            for &h in &current {
                for ext in 0..k * k {
                    let child = h * k * k + ext;
                    if ambiguous(n + 2, child) {
                        next.push(child);
                    }
                }
            }
            current = next;
            n += 2;
        }
        Ok(Self {
            stage,
            action,
            levels,
        })
    }

    /// Length of the deepest node, if any.
    pub fn depth(&self) -> Option<usize> {
        self.levels.last().map(|(n, _)| *n)
    }

    pub fn node_count(&self) -> usize {
        self.levels.iter().map(|(_, l)| l.len()).sum()
    }
}

/// First stage `n > m0` of opposite parity, `n <= N`, at which the mover's
/// atom determines the stage-`m0` action. Tree route; assumes perfect recall.
pub fn observation_stage(m: &MonitoringStructure, m0: usize) -> Result<Option<usize>> {
    let mut deepest = None;
    for a in 0..m.action_count() {
        let tree = ObservationTree::build(m, m0, a)?;
        deepest = deepest.max(tree.depth());
    }
    let n = match deepest {
        Some(d) => d + 2,
        // unreachable for |A| >= 2: levels below m0 are always ambiguous
        None => m0 + 1,
    };
    Ok((n <= m.horizon()).then_some(n))
}

/// Same quantity by scanning every atom of every opposite-parity stage.
pub fn observation_stage_by_scan(m: &MonitoringStructure, m0: usize) -> Result<Option<usize>> {
    if m0 >= m.horizon() {
        bail!(Precondition, "stage {m0} is not below the horizon {}", m.horizon());
    }
    let k = m.action_count();
    for n in (m0 + 1..=m.horizon()).step_by(2) {
        let separated = m.partition(n).atoms().iter().all(|atom| {
            let a = action_at(atom[0], n, m0, k);
            atom.iter().all(|&h| action_at(h, n, m0, k) == a)
        });
        if separated {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Observation stages for every stage below the horizon.
pub fn observation_table(m: &MonitoringStructure) -> Result<Vec<Option<usize>>> {
    (0..m.horizon()).map(|s| observation_stage(m, s)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpmStatus {
    /// Observed by the opponent at this stage, within the horizon.
    Observed(usize),
    /// Observed only past the horizon (found by re-running the builder on a
    /// longer horizon); eligible for terminal revelation.
    BeyondHorizon(usize),
    /// Not observed within the horizon nor within the builder lookahead.
    NotObserved,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpmEntry {
    pub stage: usize,
    pub observer: Player,
    pub status: EpmStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpmReport {
    pub terminal_revelation: bool,
    pub entries: Vec<EpmEntry>,
}

impl EpmReport {
    pub fn failures(&self) -> Vec<&EpmEntry> {
        self.entries
            .iter()
            .filter(|e| match e.status {
                EpmStatus::Observed(_) => false,
                EpmStatus::BeyondHorizon(_) => !self.terminal_revelation,
                EpmStatus::NotObserved => true,
            })
            .collect()
    }

    pub fn is_ok(&self) -> bool {
        self.failures().is_empty()
    }
}

/// Eventual perfect monitoring, read at finite horizon: every action must be
/// observed by the opponent at some stage `<= N`. With `terminal_revelation`,
/// actions that the builder reveals just past the horizon are accepted too.
pub fn check_epm(m: &MonitoringStructure, terminal_revelation: bool) -> Result<EpmReport> {
    let table = observation_table(m)?;
    let extended = match m.kind().lookahead(m.horizon()) {
        Some((kind, h)) if table.iter().any(Option::is_none) => {
            Some(MonitoringStructure::build(kind, m.actions().clone(), h)?)
        }
        _ => None,
    };
    let mut entries = vec![];
    for (stage, seen) in table.into_iter().enumerate() {
        let status = match seen {
            Some(n) => EpmStatus::Observed(n),
            None => match &extended {
                Some(ext) => match observation_stage(ext, stage)? {
                    Some(n) => EpmStatus::BeyondHorizon(n),
                    None => EpmStatus::NotObserved,
                },
                None => EpmStatus::NotObserved,
            },
        };
        entries.push(EpmEntry {
            stage,
            observer: Player::mover(stage).opponent(),
            status,
        });
    }
    Ok(EpmReport {
        terminal_revelation,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{ActionSet, MonitoringKind};

    fn sl() -> ActionSet {
        ActionSet::new(&["S", "L"]).unwrap()
    }

    #[test]
    fn blackwell_stages() {
        let m = MonitoringStructure::blackwell(sl(), 6).unwrap();
        assert_eq!(observation_stage(&m, 0).unwrap(), Some(3));
        assert_eq!(observation_stage(&m, 1).unwrap(), Some(2));
        assert_eq!(observation_stage_by_scan(&m, 0).unwrap(), Some(3));
        assert_eq!(observation_stage_by_scan(&m, 1).unwrap(), Some(2));
    }

    #[test]
    fn perfect_and_none() {
        let m = MonitoringStructure::perfect(sl(), 4).unwrap();
        assert_eq!(observation_stage(&m, 0).unwrap(), Some(1));
        let m = MonitoringStructure::build(MonitoringKind::NoMonitoring, sl(), 6).unwrap();
        assert_eq!(observation_stage(&m, 0).unwrap(), None);
        assert_eq!(observation_stage_by_scan(&m, 0).unwrap(), None);
    }

    #[test]
    fn tree_of_unobserved_action_reaches_the_horizon() {
        let m = MonitoringStructure::build(MonitoringKind::NoMonitoring, sl(), 5).unwrap();
        let t = ObservationTree::build(&m, 0, 0).unwrap();
        assert_eq!(t.depth(), Some(5));
        let m = MonitoringStructure::perfect(sl(), 5).unwrap();
        let t = ObservationTree::build(&m, 2, 1).unwrap();
        // ambiguity only up to length 1 (observer parity odd), gone at 3
        assert_eq!(t.depth(), Some(1));
    }

    #[test]
    fn epm_perfect_ok() {
        let m = MonitoringStructure::perfect(sl(), 4).unwrap();
        assert!(check_epm(&m, false).unwrap().is_ok());
    }

    #[test]
    fn epm_no_monitoring_fails_everywhere() {
        let m = MonitoringStructure::build(MonitoringKind::NoMonitoring, sl(), 6).unwrap();
        let r = check_epm(&m, true).unwrap();
        assert_eq!(r.failures().len(), 6);
        assert!(r.entries.iter().all(|e| e.status == EpmStatus::NotObserved));
    }

    #[test]
    fn epm_blackwell_truncation() {
        let m = MonitoringStructure::blackwell(sl(), 4).unwrap();
        let r = check_epm(&m, false).unwrap();
        let failed: Vec<usize> = r.failures().iter().map(|e| e.stage).collect();
        assert_eq!(failed, vec![2]);
        assert_eq!(r.entries[2].status, EpmStatus::BeyondHorizon(5));
        assert_eq!(r.entries[3].status, EpmStatus::Observed(4));
        assert!(check_epm(&m, true).unwrap().is_ok());
    }
}
