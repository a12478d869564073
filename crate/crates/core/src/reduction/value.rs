use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::aux::{advance, condition, AuxGame, Filter};
use super::strategies::LiftedStrategy;
use crate::error::{bail, Result};
use crate::game::Player;
use crate::scalar::Rational;

/// Grid member announced on atoms the filter gives no mass. Such atoms
/// cannot influence transitions or the payoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filler {
    Lowest,
    Seeded(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxOptions {
    /// Cap on distinct decision nodes (stage, filter) evaluated.
    pub node_cap: usize,
    /// Cap on the joint announcements tried at one node.
    pub combination_cap: usize,
    pub filler: Filler,
}

impl Default for AuxOptions {
    fn default() -> Self {
        Self {
            node_cap: 2_000_000,
            combination_cap: 1_000_000,
            filler: Filler::Lowest,
        }
    }
}

/// Counters describing a backward induction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuxStats {
    /// Distinct decision nodes per stage.
    pub nodes_per_stage: Vec<usize>,
    /// Largest filter support seen per stage.
    pub support_per_stage: Vec<usize>,
    pub memo_hits: usize,
    /// Joint announcements evaluated over all nodes.
    pub combinations: usize,
    /// Most atoms optimized jointly at one node.
    pub largest_component: usize,
}

impl AuxStats {
    pub fn decision_nodes(&self) -> usize {
        self.nodes_per_stage.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuxValueReport {
    pub value: Rational,
    /// Announcement chosen at the root, one grid index per atom.
    pub root_announcement: Vec<usize>,
    pub stats: AuxStats,
}

/// Backward induction over the auxiliary game. A decision node is summed up
/// by its stage and filter: transitions and the payoff depend on nothing
/// else, so equal filters share one memo entry.
#[derive(Debug)]
pub struct AuxSolver<'a> {
    aux: &'a AuxGame,
    options: AuxOptions,
    fixed: Option<&'a LiftedStrategy>,
    memo: BTreeMap<Filter, (Rational, Vec<usize>)>,
    stats: AuxStats,
}

impl<'a> AuxSolver<'a> {
    /// `fixed`, when given, plays its constant announcements for its owner
    /// and only the other player optimizes.
    pub fn new(aux: &'a AuxGame, options: AuxOptions, fixed: Option<&'a LiftedStrategy>) -> Self {
        let n = aux.horizon();
        Self {
            aux,
            options,
            fixed,
            memo: BTreeMap::new(),
            stats: AuxStats {
                nodes_per_stage: vec![0; n],
                support_per_stage: vec![0; n],
                ..AuxStats::default()
            },
        }
    }

    pub fn aux(&self) -> &'a AuxGame {
        self.aux
    }

    pub fn stats(&self) -> &AuxStats {
        &self.stats
    }

    pub fn fixed(&self) -> Option<&'a LiftedStrategy> {
        self.fixed
    }

    pub fn filler(&self, n: usize, atom: usize) -> usize {
        match self.options.filler {
            Filler::Lowest => 0,
            Filler::Seeded(seed) => {
                let mix = seed ^ ((n as u64) << 40) ^ (atom as u64);
                ChaCha8Rng::seed_from_u64(mix).gen_range(0..self.aux.grid(n).len())
            }
        }
    }

    pub fn solve(&mut self) -> Result<AuxValueReport> {
        let root = Filter::root();
        let value = self.value(&root)?;
        let root_announcement = if self.aux.horizon() == 0 {
            Vec::new()
        } else {
            self.announcement(&root)?
        };
        Ok(AuxValueReport {
            value,
            root_announcement,
            stats: self.stats.clone(),
        })
    }

    /// Optimal full announcement at a decision node.
    pub fn announcement(&mut self, filter: &Filter) -> Result<Vec<usize>> {
        if filter.stage >= self.aux.horizon() {
            bail!(Precondition, "no announcement after the last stage");
        }
        self.value(filter)?;
        Ok(self.memo[filter].1.clone())
    }

    pub fn value(&mut self, filter: &Filter) -> Result<Rational> {
        let n = filter.stage;
        let game = self.aux.game();
        if n == self.aux.horizon() {
            return Ok(filter
                .support
                .iter()
                .filter(|(h, _)| game.wins(*h))
                .map(|(_, p)| p)
                .sum());
        }
        if let Some((v, _)) = self.memo.get(filter) {
            self.stats.memo_hits += 1;
            return Ok(v.clone());
        }
        if self.memo.len() >= self.options.node_cap {
            bail!(
                Size,
                "auxiliary game needs more than {} decision nodes (per stage so far: {:?}, memo hits {})",
                self.options.node_cap,
                self.stats.nodes_per_stage,
                self.stats.memo_hits
            );
        }
        self.stats.nodes_per_stage[n] += 1;
        let support = &mut self.stats.support_per_stage[n];
        *support = (*support).max(filter.support.len());

        let mover = Player::mover(n);
        let (value, announcement) = match self.fixed.filter(|f| f.player() == mover) {
            Some(fixed) => {
                let b = fixed.announcement(n).to_vec();
                (self.continuation(filter, &|p| b[p])?, b)
            }
            None => self.optimize(filter, mover)?,
        };
        self.memo.insert(filter.clone(), (value.clone(), announcement));
        Ok(value)
    }

    /// Expected continuation value after announcing `b` at `filter`.
    fn continuation(&mut self, filter: &Filter, b: &dyn Fn(usize) -> usize) -> Result<Rational> {
        let mut total = Rational::zero();
        for (_, group) in advance(self.aux, filter, b) {
            let (mass, next) = condition(filter.stage + 1, group);
            total += mass * self.value(&next)?;
        }
        Ok(total)
    }

    fn optimize(&mut self, filter: &Filter, mover: Player) -> Result<(Rational, Vec<usize>)> {
        let n = filter.stage;
        let aux = self.aux;
        let k = aux.action_count();
        let part = aux.game().monitoring().partition(n);
        let schedule = aux.schedule();

        // Atoms whose next states can coincide must be optimized together.
        let supported: Vec<usize> = filter.atom_masses(aux).into_keys().collect();
        let slot: BTreeMap<usize, usize> = supported.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut parent: Vec<usize> = (0..supported.len()).collect();
        fn find(parent: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while parent[r] != r {
                r = parent[r];
            }
            parent[i] = r;
            r
        }
        let mut owner_of_state: BTreeMap<usize, usize> = BTreeMap::new();
        for (h, _) in &filter.support {
            let i = slot[&part.atom_of_index(*h)];
            for a in 0..k {
                let s = schedule.state(n + 1, h * k + a);
                match owner_of_state.get(&s) {
                    Some(&j) => {
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        if ri != rj {
                            parent[ri.max(rj)] = ri.min(rj);
                        }
                    }
                    None => {
                        owner_of_state.insert(s, i);
                    }
                }
            }
        }
        let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..supported.len() {
            let r = find(&mut parent, i);
            components.entry(r).or_default().push(supported[i]);
        }

        let grid_len = aux.grid(n).len();
        let mut announcement: Vec<usize> = (0..part.len()).map(|p| self.filler(n, p)).collect();
        let mut value = Rational::zero();
        for atoms in components.into_values() {
            self.stats.largest_component = self.stats.largest_component.max(atoms.len());
            let combos = u32::try_from(atoms.len())
                .ok()
                .and_then(|e| grid_len.checked_pow(e))
                .filter(|&c| c <= self.options.combination_cap);
            let Some(combos) = combos else {
                bail!(
                    Size,
                    "stage {n}: {} atoms with {grid_len} grid points each must be optimized jointly (cap {})",
                    atoms.len(),
                    self.options.combination_cap
                );
            };
            let sub = Filter {
                stage: n,
                support: filter
                    .support
                    .iter()
                    .filter(|(h, _)| atoms.binary_search(&part.atom_of_index(*h)).is_ok())
                    .cloned()
                    .collect(),
            };
            let mut best: Option<(Rational, usize)> = None;
            let mut choice = vec![0usize; part.len()];
            for c in 0..combos {
                let mut rest = c;
                for &p in atoms.iter().rev() {
                    choice[p] = rest % grid_len;
                    rest /= grid_len;
                }
                self.stats.combinations += 1;
                let v = self.continuation(&sub, &|p| choice[p])?;
                let better = match &best {
                    None => true,
                    Some((b, _)) => match mover {
                        Player::One => v > *b,
                        Player::Two => v < *b,
                    },
                };
                if better {
                    best = Some((v, c));
                }
            }
            let (v, c) = best.expect("grids are nonempty");
            let mut rest = c;
            for &p in atoms.iter().rev() {
                announcement[p] = rest % grid_len;
                rest /= grid_len;
            }
            value += v;
        }
        Ok((value, announcement))
    }
}

/// Value of the auxiliary game by backward induction.
pub fn aux_value(aux: &AuxGame, options: &AuxOptions) -> Result<AuxValueReport> {
    AuxSolver::new(aux, options.clone(), None).solve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{ActionSet, MonitoringStructure, TruncatedGame};
    use crate::scalar::ratio;

    fn matching(n: usize) -> TruncatedGame {
        let m = MonitoringStructure::blackwell(ActionSet::numbered(2).unwrap(), n).unwrap();
        TruncatedGame::from_predicate(m, |h| h[0] == h[1])
    }

    fn value(g: &TruncatedGame, eps: Rational) -> Rational {
        let aux = AuxGame::build(g, &eps, 10_000).unwrap();
        aux_value(&aux, &AuxOptions::default()).unwrap().value
    }

    #[test]
    fn matching_spot_values() {
        assert_eq!(value(&matching(2), ratio(1, 1)), ratio(1, 2));
        assert_eq!(value(&matching(2), ratio(2, 1)), ratio(0, 1));
        assert_eq!(value(&matching(2), ratio(1, 4)), ratio(1, 2));
    }

    #[test]
    fn trivial_sets() {
        let m = MonitoringStructure::blackwell(ActionSet::numbered(2).unwrap(), 3).unwrap();
        for eps in [ratio(2, 1), ratio(1, 2)] {
            assert_eq!(value(&TruncatedGame::from_predicate(m.clone(), |_| true), eps.clone()), ratio(1, 1));
            assert_eq!(value(&TruncatedGame::from_predicate(m.clone(), |_| false), eps), ratio(0, 1));
        }
    }

    #[test]
    fn filler_does_not_matter() {
        let g = matching(4);
        let aux = AuxGame::build(&g, &ratio(1, 2), 10_000).unwrap();
        let base = aux_value(&aux, &AuxOptions::default()).unwrap().value;
        for seed in 0..3 {
            let opts = AuxOptions {
                filler: Filler::Seeded(seed),
                ..AuxOptions::default()
            };
            assert_eq!(aux_value(&aux, &opts).unwrap().value, base);
        }
    }

    #[test]
    fn caps_report_sizes() {
        let m = MonitoringStructure::build(
            crate::game::MonitoringKind::NoMonitoring,
            ActionSet::numbered(2).unwrap(),
            4,
        )
        .unwrap();
        let g = TruncatedGame::from_predicate(m, |h| h[0] == h[3]);
        let aux = AuxGame::build(&g, &ratio(1, 4), 10_000).unwrap();
        let opts = AuxOptions {
            combination_cap: 100,
            ..AuxOptions::default()
        };
        assert!(matches!(aux_value(&aux, &opts), Err(crate::Error::Size(_))));
    }
}
