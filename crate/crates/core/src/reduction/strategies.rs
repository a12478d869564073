use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::aux::{advance, condition, replay, AuxGame, AuxHistory, Filter};
use super::value::{AuxOptions, AuxSolver, AuxValueReport};
use crate::error::{bail, Error, Result};
use crate::game::Player;
use crate::scalar::Rational;
use crate::strategy::BehavioralStrategy;

/// A pure strategy of the auxiliary game: an announcement (grid index per
/// atom) for every history ending with a state at one of the owner's stages.
pub trait AuxStrategy {
    fn player(&self) -> Player;

    fn announce(&self, aux: &AuxGame, history: &AuxHistory) -> Result<Vec<usize>>;
}

/// Announces the same thing whatever the history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedStrategy {
    player: Player,
    announcements: Vec<Vec<usize>>,
}

impl LiftedStrategy {
    pub fn player(&self) -> Player {
        self.player
    }

    /// Announcement at stage `n` (empty at the other player's stages).
    pub fn announcement(&self, n: usize) -> &[usize] {
        &self.announcements[n]
    }
}

impl AuxStrategy for LiftedStrategy {
    fn player(&self) -> Player {
        self.player
    }

    fn announce(&self, _aux: &AuxGame, history: &AuxHistory) -> Result<Vec<usize>> {
        match history.decision_stage() {
            Some(n) if self.player.owns(n) => Ok(self.announcements[n].clone()),
            _ => bail!(Precondition, "not a decision point of {}", self.player),
        }
    }
}

/// The constant auxiliary strategy announcing `s` everywhere. Every
/// distribution of `s` must be a grid member.
pub fn lift(s: &BehavioralStrategy<Rational>, aux: &AuxGame) -> Result<LiftedStrategy> {
    s.check_fits(aux.game().monitoring())?;
    let mut announcements = vec![Vec::new(); aux.horizon()];
    for n in s.owned_stages() {
        let grid = aux.grid(n);
        announcements[n] = s
            .stage_table(n)
            .iter()
            .enumerate()
            .map(|(p, d)| {
                grid.locate(d).ok_or_else(|| {
                    Error::Precondition(alloc::format!("stage {n}, atom {p}: distribution is not on the grid"))
                })
            })
            .collect::<Result<_>>()?;
    }
    Ok(LiftedStrategy {
        player: s.owner(),
        announcements,
    })
}

pub fn lift_player2(y: &BehavioralStrategy<Rational>, aux: &AuxGame) -> Result<LiftedStrategy> {
    if y.owner() != Player::Two {
        bail!(Precondition, "expected a player-two strategy");
    }
    lift(y, aux)
}

/// Pseudo-random pure strategy: the announcement is a deterministic
/// function of the seed and the whole history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededAnnouncer {
    pub player: Player,
    pub seed: u64,
}

impl AuxStrategy for SeededAnnouncer {
    fn player(&self) -> Player {
        self.player
    }

    fn announce(&self, aux: &AuxGame, history: &AuxHistory) -> Result<Vec<usize>> {
        let Some(n) = history.decision_stage().filter(|&n| self.player.owns(n)) else {
            bail!(Precondition, "not a decision point of {}", self.player);
        };
        // FNV-1a over the history
        let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ self.seed;
        let mut eat = |v: usize| {
            h ^= v as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        };
        for (i, s) in history.states.iter().enumerate() {
            eat(*s);
            if let Some(b) = history.announcements.get(i) {
                b.iter().for_each(|&x| eat(x));
                eat(usize::MAX);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(h);
        let len = aux.grid(n).len();
        Ok((0..aux.atoms(n)).map(|_| rng.gen_range(0..len)).collect())
    }
}

/// Optimal auxiliary strategy read off a backward induction. Histories of
/// probability zero get the filler.
#[derive(Debug)]
pub struct AuxPolicy<'a> {
    player: Player,
    solver: RefCell<AuxSolver<'a>>,
}

impl<'a> AuxPolicy<'a> {
    pub fn solver(&self) -> core::cell::Ref<'_, AuxSolver<'a>> {
        self.solver.borrow()
    }
}

impl AuxStrategy for AuxPolicy<'_> {
    fn player(&self) -> Player {
        self.player
    }

    fn announce(&self, aux: &AuxGame, history: &AuxHistory) -> Result<Vec<usize>> {
        let Some(n) = history.decision_stage().filter(|&n| self.player.owns(n)) else {
            bail!(Precondition, "not a decision point of {}", self.player);
        };
        let mut solver = self.solver.borrow_mut();
        if !core::ptr::eq(solver.aux(), aux) {
            bail!(Precondition, "policy belongs to another auxiliary game");
        }
        match replay(aux, history) {
            Ok(filter) => solver.announcement(&filter),
            Err(Error::Conditioning(_)) => Ok((0..aux.atoms(n)).map(|p| solver.filler(n, p)).collect()),
            Err(e) => Err(e),
        }
    }
}

/// Solves the auxiliary game, optionally against a fixed lifted strategy,
/// and returns the optimizing player's policy. Without `fixed`, the policy
/// is player one's.
pub fn aux_solve<'a>(
    aux: &'a AuxGame,
    fixed: Option<&'a LiftedStrategy>,
    options: &AuxOptions,
) -> Result<(AuxValueReport, AuxPolicy<'a>)> {
    let mut solver = AuxSolver::new(aux, options.clone(), fixed);
    let report = solver.solve()?;
    let player = fixed.map_or(Player::One, |f| f.player().opponent());
    Ok((
        report,
        AuxPolicy {
            player,
            solver: RefCell::new(solver),
        },
    ))
}

/// Base-game strategy of the owner of `strategy`: on atom `p` of `P_n`,
/// play what `strategy` announces for `p` after the auxiliary history
/// rebuilt from `p` (states `g_{n,j}(p)`, the opponent's announcements
/// taken from `opponent`, the owner's from `strategy` itself).
pub fn project(
    strategy: &dyn AuxStrategy,
    aux: &AuxGame,
    opponent: &LiftedStrategy,
) -> Result<BehavioralStrategy<Rational>> {
    let owner = strategy.player();
    if opponent.player() != owner.opponent() {
        bail!(Precondition, "projection needs the opponent's lifted strategy");
    }
    let m = aux.game().monitoring();
    let mut tables = vec![Vec::new(); aux.horizon()];
    for n in owner.stages(aux.horizon()) {
        let mut table = Vec::with_capacity(aux.atoms(n));
        for p in 0..aux.atoms(n) {
            let mut history = AuxHistory {
                states: vec![aux.projection(n, p, 0)],
                announcements: Vec::new(),
            };
            for j in 0..n {
                let b = if owner.owns(j) {
                    strategy.announce(aux, &history)?
                } else {
                    opponent.announcement(j).to_vec()
                };
                history.announcements.push(b);
                history.states.push(aux.projection(n, p, j + 1));
            }
            let b = strategy.announce(aux, &history)?;
            aux.check_announcement(n, &b)?;
            table.push(aux.grid(n).point::<Rational>(b[p]));
        }
        tables[n] = table;
    }
    BehavioralStrategy::new(owner, m, tables)
}

pub fn project_player1(
    x_star: &dyn AuxStrategy,
    aux: &AuxGame,
    y_lifted: &LiftedStrategy,
) -> Result<BehavioralStrategy<Rational>> {
    if x_star.player() != Player::One {
        bail!(Precondition, "expected a player-one auxiliary strategy");
    }
    project(x_star, aux, y_lifted)
}

/// Winning probability of player one in the auxiliary game, by enumerating
/// every history of positive probability.
pub fn aux_payoff(aux: &AuxGame, x_star: &dyn AuxStrategy, y_star: &dyn AuxStrategy) -> Result<Rational> {
    if x_star.player() != Player::One || y_star.player() != Player::Two {
        bail!(Precondition, "expected player one's and player two's strategies, in that order");
    }
    let mut history = AuxHistory {
        states: vec![0],
        announcements: Vec::new(),
    };
    payoff_from(aux, x_star, y_star, &mut history, &Filter::root())
}

fn payoff_from(
    aux: &AuxGame,
    x_star: &dyn AuxStrategy,
    y_star: &dyn AuxStrategy,
    history: &mut AuxHistory,
    filter: &Filter,
) -> Result<Rational> {
    let n = filter.stage;
    if n == aux.horizon() {
        let game = aux.game();
        return Ok(filter.support.iter().filter(|(h, _)| game.wins(*h)).map(|(_, p)| p).sum());
    }
    let mover = if n.is_multiple_of(2) { x_star } else { y_star };
    let b = mover.announce(aux, history)?;
    aux.check_announcement(n, &b)?;
    let mut total = Rational::zero();
    for (s, group) in advance(aux, filter, &|p| b[p]) {
        let (mass, next) = condition(n + 1, group);
        history.announcements.push(b.clone());
        history.states.push(s);
        let v = payoff_from(aux, x_star, y_star, history, &next);
        history.announcements.pop();
        history.states.pop();
        total += mass * v?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{ActionSet, MonitoringStructure, TruncatedGame};
    use crate::scalar::ratio;
    use crate::strategy::payoff;

    fn setup(eps: Rational) -> AuxGame {
        let m = MonitoringStructure::blackwell(ActionSet::numbered(2).unwrap(), 2).unwrap();
        let g = TruncatedGame::from_predicate(m, |h| h[0] == h[1]);
        AuxGame::build(&g, &eps, 1000).unwrap()
    }

    #[test]
    fn lifting_uniform_and_off_grid() {
        let aux = setup(ratio(1, 1));
        let m = aux.game().monitoring();
        let y = BehavioralStrategy::<Rational>::uniform(Player::Two, m);
        let lifted = lift_player2(&y, &aux).unwrap();
        assert_eq!(aux.grid(1).point::<Rational>(lifted.announcement(1)[0]), vec![ratio(1, 2), ratio(1, 2)]);
        let odd = BehavioralStrategy::<Rational>::from_fn(Player::Two, m, |_, _| vec![ratio(1, 3), ratio(2, 3)]).unwrap();
        assert!(matches!(lift_player2(&odd, &aux), Err(Error::Precondition(_))));
    }

    #[test]
    fn constant_announcement_projects_to_itself() {
        let aux = setup(ratio(1, 1));
        let m = aux.game().monitoring();
        let x = BehavioralStrategy::<Rational>::from_fn(Player::One, m, |_, _| vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        let y = BehavioralStrategy::<Rational>::uniform(Player::Two, m);
        let xs = lift(&x, &aux).unwrap();
        let ys = lift(&y, &aux).unwrap();
        assert_eq!(project_player1(&xs, &aux, &ys).unwrap(), x);
        assert_eq!(aux_payoff(&aux, &xs, &ys).unwrap(), payoff(&x, &y, aux.game()).unwrap());
    }

    #[test]
    fn coarse_best_response_round_trip() {
        let aux = setup(ratio(2, 1));
        let m = aux.game().monitoring();
        let y = BehavioralStrategy::<Rational>::pure(Player::Two, m, |_, _| 0).unwrap();
        let ys = lift(&y, &aux).unwrap();
        let (report, policy) = aux_solve(&aux, Some(&ys), &AuxOptions::default()).unwrap();
        assert_eq!(report.value, ratio(1, 1));
        let x = project_player1(&policy, &aux, &ys).unwrap();
        assert_eq!(payoff(&x, &y, aux.game()).unwrap(), report.value);
        assert_eq!(aux_payoff(&aux, &policy, &ys).unwrap(), report.value);
    }
}
