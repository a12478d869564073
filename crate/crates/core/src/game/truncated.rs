use alloc::vec;
use alloc::vec::Vec;

use super::history::{decode, FiniteHistory};
use super::monitoring::MonitoringStructure;
use crate::error::{bail, Result};

/// A game truncated at the monitoring horizon `N`: player one wins on the
/// length-`N` histories marked in the winning mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedGame {
    monitoring: MonitoringStructure,
    winning: Vec<bool>,
}

impl TruncatedGame {
    pub fn new(monitoring: MonitoringStructure, winning: Vec<bool>) -> Result<Self> {
        let expected = monitoring.histories(monitoring.horizon());
        if winning.len() != expected {
            bail!(
                Structural,
                "winning mask has {} entries, expected {expected}",
                winning.len()
            );
        }
        Ok(Self {
            monitoring,
            winning,
        })
    }

    /// Winning set given by a predicate on action sequences.
    pub fn from_predicate(
        monitoring: MonitoringStructure,
        mut wins: impl FnMut(&[usize]) -> bool,
    ) -> Self {
        let n = monitoring.horizon();
        let k = monitoring.action_count();
        let winning = (0..monitoring.histories(n))
            .map(|h| wins(&decode(h, n, k)))
            .collect();
        Self {
            monitoring,
            winning,
        }
    }

    pub fn from_histories(monitoring: MonitoringStructure, histories: &[FiniteHistory]) -> Result<Self> {
        let n = monitoring.horizon();
        let k = monitoring.action_count();
        let mut winning = vec![false; monitoring.histories(n)];
        for h in histories {
            if h.stage() != n {
                bail!(Structural, "winning history of length {} in a horizon-{n} game", h.stage());
            }
            h.validate(k)?;
            winning[h.index(k)] = true;
        }
        Ok(Self {
            monitoring,
            winning,
        })
    }

    pub fn monitoring(&self) -> &MonitoringStructure {
        &self.monitoring
    }

    pub fn horizon(&self) -> usize {
        self.monitoring.horizon()
    }

    pub fn action_count(&self) -> usize {
        self.monitoring.action_count()
    }

    pub fn winning(&self) -> &[bool] {
        &self.winning
    }

    #[inline]
    pub fn wins(&self, history_index: usize) -> bool {
        self.winning[history_index]
    }

    pub fn complement(&self) -> Self {
        Self {
            monitoring: self.monitoring.clone(),
            winning: self.winning.iter().map(|w| !w).collect(),
        }
    }

    pub fn with_winning(&self, winning: Vec<bool>) -> Result<Self> {
        Self::new(self.monitoring.clone(), winning)
    }
}
