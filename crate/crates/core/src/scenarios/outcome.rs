use core::fmt;

use crate::error::{bail, Result};
use crate::game::{ActionSet, MonitoringStructure, Player, TruncatedGame};
use crate::scalar::Rational;
use crate::strategy::{payoff, BehavioralStrategy};

pub const STAY: usize = 0;
pub const LEAVE: usize = 1;

/// The action set `{S, L}`, in that order.
pub fn stay_leave_actions() -> ActionSet {
    ActionSet::new(&["S", "L"]).expect("two distinct labels")
}

/// How a player continues after the evaluated prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailPolicy {
    /// Never leaves after the prefix.
    Stay,
    /// Leaves at the first own stage after the prefix.
    LeaveNext,
    /// Leaves at the first own stage at which the opponent's first `L`
    /// is visible, `delay` stages after it was played (`m + 1 + delay <= n`).
    Respond { delay: usize },
}

impl fmt::Display for TailPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailPolicy::Stay => f.write_str("stay"),
            TailPolicy::LeaveNext => f.write_str("leave-next"),
            TailPolicy::Respond { delay } => write!(f, "respond(delay {delay})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tails {
    pub one: TailPolicy,
    pub two: TailPolicy,
}

impl Tails {
    pub const STAY: Tails = Tails {
        one: TailPolicy::Stay,
        two: TailPolicy::Stay,
    };

    pub fn new(one: TailPolicy, two: TailPolicy) -> Self {
        Self { one, two }
    }

    fn of(&self, p: Player) -> TailPolicy {
        match p {
            Player::One => self.one,
            Player::Two => self.two,
        }
    }
}

/// First leave times on the infinite play (`None` is never) and who wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LeaveStayOutcome {
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub winner: Player,
}

impl LeaveStayOutcome {
    fn new(n1: Option<usize>, n2: Option<usize>) -> Self {
        let one_wins = match (n1, n2) {
            (Some(a), Some(b)) => b < a,
            (Some(_), None) => true,
            (None, _) => false,
        };
        let winner = if one_wins { Player::One } else { Player::Two };
        Self { n1, n2, winner }
    }

    pub fn player_one_wins(&self) -> bool {
        self.winner == Player::One
    }
}

/// First stage `>= from` owned by `p`.
fn own_stage_from(p: Player, from: usize) -> usize {
    if Player::mover(from) == p {
        from
    } else {
        from + 1
    }
}

/// First stage owned by `p` at which `p` plays `L` in `prefix`.
pub fn first_leave(prefix: &[usize], p: Player) -> Option<usize> {
    (p.first_stage()..prefix.len())
        .step_by(2)
        .find(|&n| prefix[n] == LEAVE)
}

/// Leave times on the unique play that follows `prefix` and then the tails.
pub fn classify_outcome(prefix: &[usize], tails: Tails) -> LeaveStayOutcome {
    let h = prefix.len();
    let mut times = [first_leave(prefix, Player::One), first_leave(prefix, Player::Two)];
    let players = [Player::One, Player::Two];
    // fixed tails first, responders afterwards since they read the other time
    for respond_pass in [false, true] {
        for (i, &p) in players.iter().enumerate() {
            if times[i].is_some() {
                continue;
            }
            times[i] = match (tails.of(p), respond_pass) {
                (TailPolicy::Stay, false) => None,
                (TailPolicy::LeaveNext, false) => Some(own_stage_from(p, h)),
                (TailPolicy::Respond { delay }, true) => times[1 - i]
                    .map(|m| own_stage_from(p, h.max(m + 1 + delay))),
                _ => continue,
            };
        }
    }
    LeaveStayOutcome::new(times[0], times[1])
}

fn require_stay_leave(m: &MonitoringStructure) -> Result<()> {
    if m.action_count() != 2 {
        bail!(Model, "stay/leave games have exactly two actions, got {}", m.action_count());
    }
    Ok(())
}

/// The truncated game whose winning histories are the prefixes that player
/// one wins once both tails are appended.
pub fn tail_game(m: &MonitoringStructure, tails: Tails) -> Result<TruncatedGame> {
    require_stay_leave(m)?;
    Ok(TruncatedGame::from_predicate(m.clone(), |h| {
        classify_outcome(h, tails).player_one_wins()
    }))
}

/// Probability that player one wins the infinite game when `x` and `y` are
/// followed up to the horizon of `m` and the tails afterwards.
pub fn exact_payoff_with_tails(
    m: &MonitoringStructure,
    x: &BehavioralStrategy<Rational>,
    y: &BehavioralStrategy<Rational>,
    tails: Tails,
) -> Result<Rational> {
    payoff(x, y, &tail_game(m, tails)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: usize = STAY;
    const L: usize = LEAVE;

    #[test]
    fn winning_set_cases() {
        let o = classify_outcome(&[L, S], Tails::STAY);
        assert_eq!((o.n1, o.n2, o.winner), (Some(0), None, Player::One));
        let o = classify_outcome(&[S, L, L, S], Tails::STAY);
        assert_eq!((o.n1, o.n2, o.winner), (Some(2), Some(1), Player::One));
        let o = classify_outcome(&[S; 6], Tails::STAY);
        assert_eq!((o.n1, o.n2, o.winner), (None, None, Player::Two));
    }

    #[test]
    fn tails_fill_in_leave_times() {
        let respond = Tails::new(TailPolicy::Respond { delay: 0 }, TailPolicy::Stay);
        // player two leaves at the last stage, player one answers at 4
        let o = classify_outcome(&[S, S, S, L], respond);
        assert_eq!((o.n1, o.n2), (Some(4), Some(3)));
        assert!(o.player_one_wins());
        let late = Tails::new(TailPolicy::Stay, TailPolicy::Respond { delay: 2 });
        let o = classify_outcome(&[S, S, L, S], late);
        assert_eq!((o.n1, o.n2), (Some(2), Some(5)));
        assert!(!o.player_one_wins());
        let both = Tails::new(TailPolicy::Respond { delay: 0 }, TailPolicy::Respond { delay: 0 });
        assert_eq!(classify_outcome(&[S, S], both).n1, None);
        let next = Tails::new(TailPolicy::LeaveNext, TailPolicy::Respond { delay: 1 });
        let o = classify_outcome(&[S, S, S], next);
        assert_eq!((o.n1, o.n2), (Some(4), Some(7)));
    }

    #[test]
    fn three_actions_are_rejected() {
        let m = MonitoringStructure::perfect(ActionSet::numbered(3).unwrap(), 2).unwrap();
        assert!(matches!(tail_game(&m, Tails::STAY), Err(crate::Error::Model(_))));
    }
}
