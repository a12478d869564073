use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::schedule::StateSchedule;
use crate::error::{bail, Result};
use crate::game::{prefix_index, TruncatedGame};
use crate::scalar::Rational;
use crate::strategy::{build_grids, SimplexGrid};
use num_traits::{One, Zero};

/// The auxiliary perfect-information game: at every stage Nature reveals a
/// state, then the mover announces one grid mixture per atom of their
/// partition. Nature draws the actions from those announcements and reveals
/// each one on its schedule.
///
/// Announcement sets `B_n` are never enumerated.
#[derive(Debug, Clone)]
pub struct AuxGame {
    game: TruncatedGame,
    schedule: StateSchedule,
    grids: Vec<SimplexGrid>,
    epsilon: Rational,
    /// `projections[n][p][j]` is `g_{n,j}(p)` for `j <= n`.
    projections: Vec<Vec<Vec<usize>>>,
}

impl AuxGame {
    pub fn build(game: &TruncatedGame, epsilon: &Rational, grid_cap: usize) -> Result<Self> {
        let schedule = StateSchedule::build(game.monitoring())?;
        Self::with_schedule(game, schedule, epsilon, grid_cap)
    }

    pub fn with_schedule(
        game: &TruncatedGame,
        schedule: StateSchedule,
        epsilon: &Rational,
        grid_cap: usize,
    ) -> Result<Self> {
        let m = game.monitoring();
        if schedule.horizon() != m.horizon() {
            bail!(Precondition, "schedule horizon differs from the game's");
        }
        let grids = build_grids(m.action_count(), epsilon, m.horizon(), grid_cap)?;
        let projections = projections(game, &schedule)?;
        Ok(Self {
            game: game.clone(),
            schedule,
            grids,
            epsilon: epsilon.clone(),
            projections,
        })
    }

    pub fn game(&self) -> &TruncatedGame {
        &self.game
    }

    pub fn schedule(&self) -> &StateSchedule {
        &self.schedule
    }

    pub fn grids(&self) -> &[SimplexGrid] {
        &self.grids
    }

    pub fn grid(&self, n: usize) -> &SimplexGrid {
        &self.grids[n]
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    pub fn horizon(&self) -> usize {
        self.game.horizon()
    }

    pub fn action_count(&self) -> usize {
        self.game.action_count()
    }

    pub fn atoms(&self, n: usize) -> usize {
        self.game.monitoring().partition(n).len()
    }

    /// `g_{n,j}(p)`: the stage-`j` state every history in atom `p` of `P_n`
    /// produces.
    pub fn projection(&self, n: usize, atom: usize, j: usize) -> usize {
        self.projections[n][atom][j]
    }

    /// Checks the shape of an announcement for stage `n`.
    pub fn check_announcement(&self, n: usize, b: &[usize]) -> Result<()> {
        if b.len() != self.atoms(n) {
            bail!(Precondition, "stage-{n} announcement covers {} atoms, expected {}", b.len(), self.atoms(n));
        }
        if let Some(&i) = b.iter().find(|&&i| i >= self.grids[n].len()) {
            bail!(Precondition, "grid index {i} out of range at stage {n}");
        }
        Ok(())
    }
}

/// `g_{n,j}` for all `j <= n < N`. Refuses when some atom mixes histories
/// with different states, which perfect recall rules out.
fn projections(game: &TruncatedGame, schedule: &StateSchedule) -> Result<Vec<Vec<Vec<usize>>>> {
    let m = game.monitoring();
    let k = m.action_count();
    let mut out = Vec::with_capacity(m.horizon());
    for n in 0..m.horizon() {
        let part = m.partition(n);
        let mut stage = Vec::with_capacity(part.len());
        for (p, atom) in part.atoms().iter().enumerate() {
            let first = atom[0];
            let states: Vec<usize> = (0..=n)
                .map(|j| schedule.state(j, prefix_index(first, n, j, k)))
                .collect();
            for &h in atom {
                for (j, &s) in states.iter().enumerate() {
                    if schedule.state(j, prefix_index(h, n, j, k)) != s {
                        bail!(
                            Model,
                            "atom {p} of stage {n} does not determine the stage-{j} state"
                        );
                    }
                }
            }
            stage.push(states);
        }
        out.push(stage);
    }
    Ok(out)
}

/// Conditional law of the hidden length-`n` history given what the
/// auxiliary game has revealed so far. Support is kept sorted by history
/// index, masses are positive and sum to one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Filter {
    pub stage: usize,
    pub support: Vec<(usize, Rational)>,
}

impl Filter {
    pub fn root() -> Self {
        Self {
            stage: 0,
            support: vec![(0, Rational::one())],
        }
    }

    /// Probability that the mover's atom at this stage is each atom.
    pub fn atom_masses(&self, aux: &AuxGame) -> BTreeMap<usize, Rational> {
        let part = aux.game.monitoring().partition(self.stage);
        let mut out = BTreeMap::new();
        for (h, p) in &self.support {
            *out.entry(part.atom_of_index(*h)).or_insert_with(Rational::zero) += p;
        }
        out
    }
}

/// An auxiliary-game history `(s_0, b_0, ..., s_{n-1}, b_{n-1}[, s_n])`.
/// States are state codes, announcements are per-atom grid indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct AuxHistory {
    pub states: Vec<usize>,
    pub announcements: Vec<Vec<usize>>,
}

impl AuxHistory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stage of the next announcement, if the history ends with a state.
    pub fn decision_stage(&self) -> Option<usize> {
        (self.states.len() == self.announcements.len() + 1).then_some(self.announcements.len())
    }
}

/// Extends a stage-`n` filter by the announcement `b` and groups the mass
/// of length-`n + 1` histories by their next state.
pub(crate) fn advance(
    aux: &AuxGame,
    filter: &Filter,
    b: &dyn Fn(usize) -> usize,
) -> BTreeMap<usize, Vec<(usize, Rational)>> {
    let n = filter.stage;
    let k = aux.action_count();
    let part = aux.game.monitoring().partition(n);
    let grid = aux.grid(n);
    let den = Rational::from_integer(grid.denominator().into());
    let mut out: BTreeMap<usize, Vec<(usize, Rational)>> = BTreeMap::new();
    for (h, mass) in &filter.support {
        let point = grid.numerators(b(part.atom_of_index(*h)));
        for (a, &num) in point.iter().enumerate() {
            if num == 0 {
                continue;
            }
            let next = h * k + a;
            let w = mass * Rational::from_integer(num.into()) / &den;
            out.entry(aux.schedule.state(n + 1, next)).or_default().push((next, w));
        }
    }
    out
}

/// Normalizes a group of masses into the filter for the next stage.
pub(crate) fn condition(stage: usize, mut group: Vec<(usize, Rational)>) -> (Rational, Filter) {
    group.sort_by_key(|(h, _)| *h);
    let total: Rational = group.iter().map(|(_, w)| w).sum();
    for (_, w) in group.iter_mut() {
        *w /= &total;
    }
    (
        total,
        Filter {
            stage,
            support: group,
        },
    )
}

/// Replays a history: the filter at the last stage whose state is known.
pub fn replay(aux: &AuxGame, history: &AuxHistory) -> Result<Filter> {
    let steps = history.announcements.len();
    if history.states.len() != steps && history.states.len() != steps + 1 {
        bail!(Precondition, "aux history has {} states and {steps} announcements", history.states.len());
    }
    if steps > aux.horizon() {
        bail!(Precondition, "aux history runs past the horizon");
    }
    if history.states.first().is_some_and(|&s| s != 0) {
        bail!(Conditioning, "stage-0 state must be empty");
    }
    let mut filter = Filter::root();
    for (n, b) in history.announcements.iter().enumerate() {
        aux.check_announcement(n, b)?;
        let mut groups = advance(aux, &filter, &|p| b[p]);
        filter = match history.states.get(n + 1) {
            Some(s) => match groups.remove(s) {
                Some(g) => condition(n + 1, g).1,
                None => bail!(Conditioning, "state {s} at stage {} has probability zero", n + 1),
            },
            // the last state is not known yet; keep the unconditioned law
            None => {
                let all: Vec<(usize, Rational)> = groups.into_values().flatten().collect();
                condition(n + 1, all).1
            }
        };
    }
    Ok(filter)
}

/// Nature's law of the stage-`n` state after `(s_0, b_0, ..., s_{n-1},
/// b_{n-1})`, as `(state, probability)` pairs in state order.
pub fn nature_transition(aux: &AuxGame, history: &AuxHistory) -> Result<Vec<(usize, Rational)>> {
    let n = history.announcements.len();
    if n == 0 || history.states.len() != n {
        bail!(Precondition, "a transition needs a history ending with an announcement");
    }
    let mut prefix = history.clone();
    let last = prefix.announcements.pop().expect("nonempty");
    let filter = replay(aux, &prefix)?;
    aux.check_announcement(n - 1, &last)?;
    Ok(advance(aux, &filter, &|p| last[p])
        .into_iter()
        .map(|(s, g)| (s, g.iter().map(|(_, w)| w).sum()))
        .collect())
}
