use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::outcome::{classify_outcome, first_leave, stay_leave_actions, tail_game, TailPolicy, Tails, LEAVE, STAY};
use crate::error::{bail, Error, Result};
use crate::game::{decode, MonitoringKind, MonitoringStructure, Player, TruncatedGame};
use crate::random::random_strategy;
use crate::scalar::{ratio, Rational};
use crate::solver::{best_response, sequence_form_value};
use crate::strategy::{payoff, BehavioralStrategy};

type Strategy = BehavioralStrategy<Rational>;

fn point(action: usize) -> Vec<Rational> {
    let mut d = vec![Rational::zero(); 2];
    d[action] = Rational::one();
    d
}

/// Pure strategy that stays until stage `t` and leaves at its first own
/// stage `>= t`. With `t` at or past the horizon it always stays.
pub fn leave_at(owner: Player, m: &MonitoringStructure, t: usize) -> Result<Strategy> {
    BehavioralStrategy::pure(owner, m, |n, _| if n >= t { LEAVE } else { STAY })
}

/// Plays `L` exactly when the atom proves that the opponent has already
/// left: every history in it contains an opponent `L`.
pub fn responder(owner: Player, m: &MonitoringStructure) -> Result<Strategy> {
    BehavioralStrategy::pure(owner, m, |n, p| {
        let knows = m
            .partition(n)
            .members(p)
            .iter()
            .all(|&h| first_leave(&decode(h, n, 2), owner.opponent()).is_some());
        if knows {
            LEAVE
        } else {
            STAY
        }
    })
}

/// Player one leaves at stage 0 with probability 1/2 and otherwise repeats
/// player two's previous action. Needs player one to see the previous stage.
pub fn copycat(m: &MonitoringStructure) -> Result<Strategy> {
    let mut tables = vec![Vec::new(); m.horizon()];
    for n in Player::One.stages(m.horizon()) {
        let part = m.partition(n);
        let mut table = Vec::with_capacity(part.len());
        for p in 0..part.len() {
            if n == 0 {
                table.push(vec![ratio(1, 2), ratio(1, 2)]);
                continue;
            }
            let last = |h: usize| h % 2;
            let members = part.members(p);
            let a = last(members[0]);
            if members.iter().any(|&h| last(h) != a) {
                bail!(Model, "player one does not see stage {} at stage {n}", n - 1);
            }
            table.push(point(a));
        }
        tables[n] = table;
    }
    BehavioralStrategy::new(Player::One, m, tables)
}

/// `s` with `L` forced on every atom of the owner's last stage `<= bound`,
/// so that the owner has left by then on every play.
pub fn leave_by(s: &Strategy, m: &MonitoringStructure, bound: usize) -> Result<Strategy> {
    let Some(t) = s.owned_stages().filter(|&n| n <= bound).last() else {
        bail!(Precondition, "{} has no stage at or before {bound}", s.owner());
    };
    let mut tables = s.tables().to_vec();
    tables[t].iter_mut().for_each(|d| *d = point(LEAVE));
    BehavioralStrategy::new(s.owner(), m, tables)
}

/// `s` with `S` on every own stage after `bound`: the owner leaves by
/// `bound` or never.
pub fn stay_after(s: &Strategy, m: &MonitoringStructure, bound: usize) -> Result<Strategy> {
    let mut tables = s.tables().to_vec();
    for n in s.owned_stages().filter(|&n| n > bound) {
        tables[n].iter_mut().for_each(|d| *d = point(STAY));
    }
    BehavioralStrategy::new(s.owner(), m, tables)
}

/// Winning set of the truncation in which player one must leave by `bound`:
/// a play wins when player one has left by then and wins with both players
/// staying after the horizon.
pub fn bounded_leave_game(m: &MonitoringStructure, bound: usize) -> Result<TruncatedGame> {
    if m.action_count() != 2 {
        bail!(Model, "stay/leave games have exactly two actions, got {}", m.action_count());
    }
    Ok(TruncatedGame::from_predicate(m.clone(), |h| {
        first_leave(h, Player::One).is_some_and(|n| n <= bound)
            && classify_outcome(h, Tails::STAY).player_one_wins()
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Both players see the opponent's actions after a delay.
    Example1,
    /// Nobody sees the opponent's actions.
    Example2,
    /// Player one sees player two's actions, player two sees nothing.
    Example3,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Example1, Scenario::Example2, Scenario::Example3];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Example1 => "example1",
            Scenario::Example2 => "example2",
            Scenario::Example3 => "example3",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown scenario {s:?} (expected example1, example2 or example3)")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioParams {
    /// Observation delay of the first scenario.
    pub delay: usize,
    pub horizon: Option<usize>,
    /// Leave-time bound of the restricted player.
    pub leave_by: Option<usize>,
    /// Random strategies per battery.
    pub battery: usize,
    pub seed: u64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            delay: 1,
            horizon: None,
            leave_by: None,
            battery: 50,
            seed: 0,
        }
    }
}

/// What a fixture asserts.
#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    /// The value of the game.
    Value,
    /// Payoff of `fixed` against every strategy of the battery.
    Payoffs { fixed: Strategy, battery: Vec<Strategy> },
    /// Best-response payoff against every strategy of the battery.
    BestResponses { battery: Vec<Strategy> },
}

impl Check {
    pub fn kind(&self) -> &'static str {
        match self {
            Check::Value => "value",
            Check::Payoffs { .. } => "payoffs",
            Check::BestResponses { .. } => "best-responses",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: String,
    pub summary: String,
    pub game: TruncatedGame,
    /// Tails encoded in the winning set.
    pub tails: Tails,
    pub check: Check,
    /// Every observed number must equal this.
    pub expected: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureOutcome {
    pub name: String,
    pub expected: Rational,
    pub observed: Vec<Rational>,
}

impl FixtureOutcome {
    pub fn mismatches(&self) -> usize {
        self.observed.iter().filter(|v| **v != self.expected).count()
    }

    pub fn passed(&self) -> bool {
        !self.observed.is_empty() && self.mismatches() == 0
    }
}

pub fn run_fixture(f: &Fixture) -> Result<FixtureOutcome> {
    let g = &f.game;
    let observed = match &f.check {
        Check::Value => vec![sequence_form_value::<Rational>(g)?.value],
        Check::Payoffs { fixed, battery } => battery
            .iter()
            .map(|b| match fixed.owner() {
                Player::One => payoff(fixed, b, g),
                Player::Two => payoff(b, fixed, g),
            })
            .collect::<Result<_>>()?,
        Check::BestResponses { battery } => battery
            .iter()
            .map(|b| best_response(g, b).map(|(v, _)| v))
            .collect::<Result<_>>()?,
    };
    Ok(FixtureOutcome {
        name: f.name.clone(),
        expected: f.expected.clone(),
        observed,
    })
}

fn rng(params: &ScenarioParams, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(params.seed ^ tag.rotate_left(32))
}

fn own_stages_upto(p: Player, bound: usize) -> impl Iterator<Item = usize> {
    (p.first_stage()..=bound).step_by(2)
}

/// Ready-to-run fixtures for one scenario.
pub fn scenario_suite(scenario: Scenario, params: &ScenarioParams) -> Result<Vec<Fixture>> {
    match scenario {
        Scenario::Example1 => example1(params),
        Scenario::Example2 => example2(params),
        Scenario::Example3 => example3(params),
    }
}

/// Leave bound and horizon of a scenario with defaults filled in.
fn window(scenario: Scenario, params: &ScenarioParams) -> Result<(usize, usize)> {
    let k = params.delay;
    // the responder of the first scenario needs k + 3 stages after the bound
    let slack = match scenario {
        Scenario::Example1 => k + 3,
        Scenario::Example2 | Scenario::Example3 => 3,
    };
    let (bound, horizon) = match (scenario, params.leave_by, params.horizon) {
        (_, Some(b), Some(h)) => (b, h),
        (Scenario::Example1, Some(b), None) => (b, b + slack),
        (Scenario::Example1, None, None) => (2, k + 5),
        (Scenario::Example2, b, None) => (b.unwrap_or(3), b.unwrap_or(3) + 4),
        (Scenario::Example2, None, Some(h)) => (3, h),
        (Scenario::Example3, Some(b), None) => (b, 6),
        (Scenario::Example3, None, h) => {
            let h = h.unwrap_or(6);
            match h.checked_sub(slack) {
                Some(b) => (b, h),
                None => bail!(Precondition, "horizon {h} is too short"),
            }
        }
        (Scenario::Example1, None, Some(h)) => match h.checked_sub(slack) {
            Some(b) => (b, h),
            None => bail!(Precondition, "horizon {h} leaves no room for delay {k}"),
        },
    };
    if horizon < bound + slack {
        bail!(
            Precondition,
            "horizon {horizon} is too short: leave bound {bound} needs at least {}",
            bound + slack
        );
    }
    Ok((bound, horizon))
}

impl ScenarioParams {
    /// The same parameters with `horizon` and `leave_by` made explicit.
    pub fn resolve(&self, scenario: Scenario) -> Result<Self> {
        let (bound, horizon) = window(scenario, self)?;
        Ok(Self {
            horizon: Some(horizon),
            leave_by: Some(bound),
            ..self.clone()
        })
    }
}

fn example1(params: &ScenarioParams) -> Result<Vec<Fixture>> {
    let k = params.delay;
    let (bound, horizon) = window(Scenario::Example1, params)?;
    let constant = MonitoringKind::Delayed { p1: Some(k), p2: Some(k) };
    // stage-dependent delays, different for the two players, never above k
    let variable = MonitoringKind::VariableDelay {
        delays: (0..horizon)
            .map(|m| {
                let j = (m / 2) % (k + 1);
                Some(if m % 2 == 0 { k - j } else { j })
            })
            .collect(),
    };
    let mut out = Vec::new();
    for (label, kind, tag) in [("example1", constant, 1), ("example1/variable-delay", variable, 2)] {
        let m = MonitoringStructure::build(kind, stay_leave_actions(), horizon)?;
        out.push(Fixture {
            name: format!("{label}/value"),
            summary: format!("value with player one leaving by stage {bound}, horizon {horizon}"),
            game: bounded_leave_game(&m, bound)?,
            tails: Tails::STAY,
            check: Check::Value,
            expected: Rational::zero(),
        });
        let mut battery: Vec<Strategy> = own_stages_upto(Player::One, bound)
            .map(|t| leave_at(Player::One, &m, t))
            .collect::<Result<_>>()?;
        let mut r = rng(params, tag);
        for _ in 0..params.battery {
            battery.push(leave_by(&random_strategy(Player::One, &m, 4, &mut r), &m, bound)?);
        }
        let tails = Tails::new(TailPolicy::Stay, TailPolicy::Respond { delay: k });
        out.push(Fixture {
            name: format!("{label}/responder"),
            summary: format!("responder against player-one strategies leaving by stage {bound}"),
            game: tail_game(&m, tails)?,
            tails,
            check: Check::Payoffs {
                fixed: responder(Player::Two, &m)?,
                battery,
            },
            expected: Rational::zero(),
        });
    }
    Ok(out)
}

fn example2(params: &ScenarioParams) -> Result<Vec<Fixture>> {
    let (bound, horizon) = window(Scenario::Example2, params)?;
    let m = MonitoringStructure::build(MonitoringKind::NoMonitoring, stay_leave_actions(), horizon)?;
    let g = tail_game(&m, Tails::STAY)?;
    let mut r = rng(params, 3);

    let mut xs: Vec<Strategy> = own_stages_upto(Player::One, bound)
        .map(|t| leave_at(Player::One, &m, t))
        .collect::<Result<_>>()?;
    for _ in 0..params.battery {
        xs.push(leave_by(&random_strategy(Player::One, &m, 4, &mut r), &m, bound)?);
    }
    let mut ys: Vec<Strategy> = own_stages_upto(Player::Two, bound)
        .chain([horizon])
        .map(|t| leave_at(Player::Two, &m, t))
        .collect::<Result<_>>()?;
    for _ in 0..params.battery {
        ys.push(stay_after(&random_strategy(Player::Two, &m, 4, &mut r), &m, bound)?);
    }
    Ok(vec![
        Fixture {
            name: "example2/lower".into(),
            summary: format!("player two leaving right after stage {bound} beats every x leaving by {bound}"),
            game: g.clone(),
            tails: Tails::STAY,
            check: Check::Payoffs {
                fixed: leave_at(Player::Two, &m, bound + 1)?,
                battery: xs,
            },
            expected: Rational::zero(),
        },
        Fixture {
            name: "example2/upper".into(),
            summary: format!("player one waiting past stage {bound} beats every y leaving by {bound} or never"),
            game: g,
            tails: Tails::STAY,
            check: Check::Payoffs {
                fixed: leave_at(Player::One, &m, bound + 1)?,
                battery: ys,
            },
            expected: Rational::one(),
        },
    ])
}

fn example3(params: &ScenarioParams) -> Result<Vec<Fixture>> {
    let (bound, horizon) = window(Scenario::Example3, params)?;
    let m = MonitoringStructure::build(
        MonitoringKind::Delayed { p1: None, p2: Some(0) },
        stay_leave_actions(),
        horizon,
    )?;
    let mut r = rng(params, 4);
    let arbitrary: Vec<Strategy> = (0..params.battery)
        .map(|_| random_strategy(Player::Two, &m, 4, &mut r))
        .collect();
    let mut bounded: Vec<Strategy> = own_stages_upto(Player::Two, bound)
        .chain([horizon])
        .map(|t| leave_at(Player::Two, &m, t))
        .collect::<Result<_>>()?;
    for _ in 0..params.battery {
        bounded.push(stay_after(&random_strategy(Player::Two, &m, 4, &mut r), &m, bound)?);
    }
    let copy_tails = Tails::new(TailPolicy::Respond { delay: 0 }, TailPolicy::Stay);
    Ok(vec![
        Fixture {
            name: "example3/lower".into(),
            summary: "the copycat strategy against random player-two strategies".into(),
            game: tail_game(&m, copy_tails)?,
            tails: copy_tails,
            check: Check::Payoffs {
                fixed: copycat(&m)?,
                battery: arbitrary,
            },
            expected: ratio(1, 2),
        },
        Fixture {
            name: "example3/upper".into(),
            summary: format!("best responses to player-two strategies leaving by stage {bound} or never"),
            game: tail_game(&m, Tails::STAY)?,
            tails: Tails::STAY,
            check: Check::BestResponses { battery: bounded },
            expected: Rational::one(),
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ScenarioParams {
        ScenarioParams {
            battery: 5,
            ..ScenarioParams::default()
        }
    }

    #[test]
    fn every_fixture_passes() {
        for s in Scenario::ALL {
            for f in scenario_suite(s, &small()).unwrap() {
                let o = run_fixture(&f).unwrap();
                assert!(o.passed(), "{}: {:?}", f.name, o.observed);
            }
        }
    }

    #[test]
    fn responder_leaves_once_informed() {
        let m = MonitoringStructure::delayed(stay_leave_actions(), 5, Some(1), Some(1)).unwrap();
        let y = responder(Player::Two, &m).unwrap();
        // at stage 3 player two sees stage 0 and its own stage 1
        let seen_leave = m.atom_of(&crate::game::FiniteHistory::new(vec![1, 0, 0])).unwrap();
        let seen_stay = m.atom_of(&crate::game::FiniteHistory::new(vec![0, 0, 1])).unwrap();
        assert_eq!(y.distribution(3, seen_leave), &point(LEAVE)[..]);
        assert_eq!(y.distribution(3, seen_stay), &point(STAY)[..]);
    }

    #[test]
    fn copycat_needs_observation() {
        let m = MonitoringStructure::build(MonitoringKind::NoMonitoring, stay_leave_actions(), 4).unwrap();
        assert!(matches!(copycat(&m), Err(Error::Model(_))));
    }

    #[test]
    fn parameters_are_validated() {
        let p = ScenarioParams {
            horizon: Some(5),
            leave_by: Some(2),
            delay: 1,
            ..small()
        };
        assert!(scenario_suite(Scenario::Example1, &p).is_err());
        assert!("example4".parse::<Scenario>().is_err());
        assert_eq!("example2".parse::<Scenario>().unwrap(), Scenario::Example2);
    }
}
