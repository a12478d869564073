use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{bail, Result};

/// The two players. Player one moves at even stages, player two at odd ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn mover(stage: usize) -> Player {
        if stage.is_multiple_of(2) {
            Player::One
        } else {
            Player::Two
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    pub fn owns(self, stage: usize) -> bool {
        Player::mover(stage) == self
    }

    /// First stage at which this player moves.
    pub fn first_stage(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn stages(self, horizon: usize) -> impl Iterator<Item = usize> {
        (self.first_stage()..horizon).step_by(2)
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::One => f.write_str("player 1"),
            Player::Two => f.write_str("player 2"),
        }
    }
}

/// Ordered action alphabet. The order fixes the lexicographic enumeration of
/// histories, which every id and mask in the crate relies on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSet {
    labels: Vec<String>,
}

impl ActionSet {
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        if labels.len() < 2 {
            bail!(Structural, "an action set needs at least two actions");
        }
        let labels: Vec<String> = labels.iter().map(|l| l.as_ref().to_string()).collect();
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() {
                bail!(Structural, "empty action label");
            }
            if labels[..i].contains(l) {
                bail!(Structural, "duplicate action label {l:?}");
            }
        }
        Ok(Self { labels })
    }

    /// Actions named `0`, `1`, ..., `k-1`.
    pub fn numbered(k: usize) -> Result<Self> {
        let labels: Vec<String> = (0..k).map(|i| i.to_string()).collect();
        Self::new(&labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, action: usize) -> &str {
        &self.labels[action]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Number of histories of length `n`.
    pub fn count(&self, n: usize) -> usize {
        self.len().pow(n as u32)
    }

    /// Parses a history written as concatenated single-character labels
    /// (`"SLS"`) or, for longer labels, separated by spaces or commas.
    pub fn parse_history(&self, text: &str) -> Result<FiniteHistory> {
        let single = self.labels.iter().all(|l| l.chars().count() == 1);
        let mut actions = Vec::new();
        if single && !text.contains([' ', ',']) {
            for c in text.chars() {
                let mut buf = [0u8; 4];
                match self.index_of(c.encode_utf8(&mut buf)) {
                    Some(a) => actions.push(a),
                    None => bail!(Parse, "unknown action {c:?} in history {text:?}"),
                }
            }
        } else {
            for tok in text.split([' ', ',']).filter(|t| !t.is_empty()) {
                match self.index_of(tok) {
                    Some(a) => actions.push(a),
                    None => bail!(Parse, "unknown action {tok:?} in history {text:?}"),
                }
            }
        }
        Ok(FiniteHistory { actions })
    }

    pub fn format_history(&self, actions: &[usize]) -> String {
        let single = self.labels.iter().all(|l| l.chars().count() == 1);
        let sep = if single { "" } else { " " };
        let parts: Vec<&str> = actions.iter().map(|&a| self.label(a)).collect();
        parts.join(sep)
    }
}

/// A finite sequence of actions `(a_0, ..., a_{n-1})`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FiniteHistory {
    actions: Vec<usize>,
}

impl FiniteHistory {
    pub fn new(actions: Vec<usize>) -> Self {
        Self { actions }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Decodes the lexicographic index of a history of the given length.
    pub fn from_index(index: usize, stage: usize, actions: usize) -> Self {
        Self {
            actions: decode(index, stage, actions),
        }
    }

    pub fn stage(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    /// The initial segment of length `k`.
    pub fn prefix(&self, k: usize) -> FiniteHistory {
        Self {
            actions: self.actions[..k].to_vec(),
        }
    }

    pub fn extend(&self, action: usize) -> FiniteHistory {
        let mut actions = self.actions.clone();
        actions.push(action);
        Self { actions }
    }

    pub fn index(&self, actions: usize) -> usize {
        encode(&self.actions, actions)
    }

    pub fn validate(&self, actions: usize) -> Result<()> {
        if let Some(&bad) = self.actions.iter().find(|&&a| a >= actions) {
            bail!(Precondition, "action index {bad} out of range for {actions} actions");
        }
        Ok(())
    }
}

pub(crate) fn encode(history: &[usize], actions: usize) -> usize {
    history.iter().fold(0, |acc, &a| acc * actions + a)
}

pub(crate) fn decode(mut index: usize, stage: usize, actions: usize) -> Vec<usize> {
    let mut out = alloc::vec![0; stage];
    for slot in out.iter_mut().rev() {
        *slot = index % actions;
        index /= actions;
    }
    out
}

/// Action at stage `m` of the length-`n` history with index `index`.
#[inline]
pub(crate) fn action_at(index: usize, n: usize, m: usize, actions: usize) -> usize {
    (index / actions.pow((n - 1 - m) as u32)) % actions
}

/// Index of the length-`k` prefix of the length-`n` history `index`.
#[inline]
pub(crate) fn prefix_index(index: usize, n: usize, k: usize, actions: usize) -> usize {
    index / actions.pow((n - k) as u32)
}
