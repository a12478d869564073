use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::history::FiniteHistory;
use crate::error::{bail, Result};

/// Partition of the length-`stage` histories into information atoms.
///
/// Atom ids are canonical: atoms are numbered by their smallest member in
/// lexicographic order, and every atom's member list is sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StagePartition {
    stage: usize,
    atoms: Vec<Vec<usize>>,
    atom_index: Vec<usize>,
}

impl StagePartition {
    /// Groups the histories of length `stage` by an observation key.
    pub fn from_key<K: Ord>(
        stage: usize,
        count: usize,
        mut key: impl FnMut(usize) -> K,
    ) -> Self {
        let mut ids: BTreeMap<K, usize> = BTreeMap::new();
        let mut atoms: Vec<Vec<usize>> = Vec::new();
        let mut atom_index = vec![0; count];
        for h in 0..count {
            let next = atoms.len();
            let id = *ids.entry(key(h)).or_insert(next);
            if id == next {
                atoms.push(Vec::new());
            }
            atoms[id].push(h);
            atom_index[h] = id;
        }
        Self {
            stage,
            atoms,
            atom_index,
        }
    }

    /// Builds a partition from explicit atoms, checking that they are
    /// nonempty, disjoint and cover all `count` histories.
    pub fn from_atoms(stage: usize, count: usize, atoms: &[Vec<usize>]) -> Result<Self> {
        let mut owner: Vec<Option<usize>> = vec![None; count];
        for (id, atom) in atoms.iter().enumerate() {
            if atom.is_empty() {
                bail!(Structural, "stage {stage}: atom {id} is empty");
            }
            for &h in atom {
                if h >= count {
                    bail!(Structural, "stage {stage}: history index {h} out of range");
                }
                if let Some(prev) = owner[h] {
                    bail!(
                        Structural,
                        "stage {stage}: history {h} lies in atoms {prev} and {id}"
                    );
                }
                owner[h] = Some(id);
            }
        }
        if let Some(h) = owner.iter().position(Option::is_none) {
            bail!(Structural, "stage {stage}: history {h} is not covered by any atom");
        }
        let owner: Vec<usize> = owner.into_iter().map(|o| o.unwrap_or_default()).collect();
        // renumber canonically
        Ok(Self::from_key(stage, count, |h| owner[h]))
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Vec<usize>] {
        &self.atoms
    }

    pub fn members(&self, atom: usize) -> &[usize] {
        &self.atoms[atom]
    }

    /// Atom containing the history with lexicographic index `h`.
    #[inline]
    pub fn atom_of_index(&self, h: usize) -> usize {
        self.atom_index[h]
    }

    /// Atom containing `h`; `h` must have length equal to the stage.
    pub fn atom_of(&self, h: &FiniteHistory, actions: usize) -> Result<usize> {
        if h.stage() != self.stage {
            bail!(
                Precondition,
                "history of length {} queried in the stage-{} partition",
                h.stage(),
                self.stage
            );
        }
        h.validate(actions)?;
        Ok(self.atom_index[h.index(actions)])
    }

    /// True when every atom is a singleton.
    pub fn is_discrete(&self) -> bool {
        self.atoms.len() == self.atom_index.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_numbering() {
        let p = StagePartition::from_key(2, 4, |h| 3 - h / 2);
        assert_eq!(p.atoms(), &[vec![0, 1], vec![2, 3]]);
        assert_eq!(p.atom_of_index(3), 1);
    }

    #[test]
    fn explicit_atoms_validated() {
        assert!(StagePartition::from_atoms(1, 2, &[vec![0], vec![1]]).is_ok());
        let overlap = StagePartition::from_atoms(1, 2, &[vec![0, 1], vec![1]]);
        assert!(matches!(overlap, Err(crate::Error::Structural(_))));
        let gap = StagePartition::from_atoms(1, 2, &[vec![0]]);
        assert!(matches!(gap, Err(crate::Error::Structural(_))));
        let p = StagePartition::from_atoms(1, 2, &[vec![1], vec![0]]).unwrap();
        assert_eq!(p.members(0), &[0]);
    }

    #[test]
    fn atom_of_checks_length() {
        let p = StagePartition::from_key(2, 4, |_| 0);
        let h = FiniteHistory::new(vec![1]);
        assert!(matches!(p.atom_of(&h, 2), Err(crate::Error::Precondition(_))));
    }
}
