use alloc::string::String;
use alloc::vec::Vec;

use super::aux::AuxGame;
use super::strategies::{aux_payoff, aux_solve, lift, project};
use super::value::{AuxOptions, AuxStats};
use crate::error::Result;
use crate::game::TruncatedGame;
use crate::scalar::Rational;
use num_traits::Signed;
use crate::solver::{best_response, sequence_form_value};
use crate::strategy::{payoff, snap_strategy, strategy_distance, BehavioralStrategy, DEFAULT_GRID_CAP};

/// How one player's snapped optimal strategy bounds the auxiliary value.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapChain {
    /// Distance between the optimal strategy and its snapped version.
    pub distance: Rational,
    /// Auxiliary value when the snapped strategy is announced throughout.
    pub aux_response: Rational,
    /// Base-game payoff of the projected auxiliary response.
    pub projected_payoff: Rational,
    /// The auxiliary payoff of that response, by enumerating the tree.
    pub enumerated_payoff: Rational,
    /// Base-game best response to the snapped strategy.
    pub base_response: Rational,
    pub snapped: BehavioralStrategy<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichCheck {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub epsilon: Rational,
    /// Exact value of the base game.
    pub value: Rational,
    /// Value of the auxiliary game.
    pub aux_value: Rational,
    pub aux_stats: AuxStats,
    /// Player two's snapped strategy: bounds the auxiliary value from above.
    pub upper: SnapChain,
    /// Player one's snapped strategy: bounds it from below.
    pub lower: SnapChain,
    pub checks: Vec<SandwichCheck>,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> Vec<&SandwichCheck> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompareOptions {
    pub grid_cap: usize,
    pub aux: AuxOptions,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            grid_cap: DEFAULT_GRID_CAP,
            aux: AuxOptions::default(),
        }
    }
}

fn chain(
    g: &TruncatedGame,
    aux: &AuxGame,
    optimal: &BehavioralStrategy<Rational>,
    options: &AuxOptions,
) -> Result<SnapChain> {
    let snapped = snap_strategy(optimal, aux.grids())?;
    let distance = strategy_distance(optimal, &snapped)?;
    let lifted = lift(&snapped, aux)?;
    let (report, policy) = aux_solve(aux, Some(&lifted), options)?;
    let response = project(&policy, aux, &lifted)?;
    let projected_payoff = if snapped.owner() == crate::game::Player::Two {
        payoff(&response, &snapped, g)?
    } else {
        payoff(&snapped, &response, g)?
    };
    // the enumeration is an independent route to the same number
    let enumerated = if snapped.owner() == crate::game::Player::Two {
        aux_payoff(aux, &policy, &lifted)?
    } else {
        aux_payoff(aux, &lifted, &policy)?
    };
    let (base_response, _) = best_response(g, &snapped)?;
    Ok(SnapChain {
        distance,
        aux_response: report.value,
        projected_payoff,
        enumerated_payoff: enumerated,
        base_response,
        snapped,
    })
}

/// Values the base game and its auxiliary game at `epsilon` and checks
/// every inequality in the chain linking them:
///
/// `v* <= aux(y~) = payoff(x, y~) <= BR(y~) <= v + d(y, y~)/2 <= v + eps`,
/// and symmetrically from below with player one's snapped strategy.
pub fn compare_values(
    g: &TruncatedGame,
    epsilon: &Rational,
    options: &CompareOptions,
) -> Result<SandwichReport> {
    let solved = sequence_form_value::<Rational>(g)?;
    let v = solved.value.clone();
    let aux = AuxGame::build(g, epsilon, options.grid_cap)?;
    let (aux_report, _) = aux_solve(&aux, None, &options.aux)?;
    let vs = aux_report.value.clone();
    let upper = chain(g, &aux, &solved.y, &options.aux)?;
    let lower = chain(g, &aux, &solved.x, &options.aux)?;

    let half = |d: &Rational| d / Rational::from_integer(2.into());
    let mut checks = Vec::new();
    let mut check = |name: &str, holds: bool| {
        checks.push(SandwichCheck {
            name: name.into(),
            holds,
        })
    };
    check("aux value <= aux response to lifted y", vs <= upper.aux_response);
    check("aux response to lifted y = its enumerated payoff", upper.aux_response == upper.enumerated_payoff);
    check("aux response to lifted y = projected payoff", upper.aux_response == upper.projected_payoff);
    check("projected payoff <= best response to snapped y", upper.projected_payoff <= upper.base_response);
    check(
        "best response to snapped y <= value + d/2",
        upper.base_response <= v.clone() + half(&upper.distance),
    );
    check("best response to snapped y <= value + eps", upper.base_response <= v.clone() + epsilon);
    check("aux value >= aux response to lifted x", vs >= lower.aux_response);
    check("aux response to lifted x = its enumerated payoff", lower.aux_response == lower.enumerated_payoff);
    check("aux response to lifted x = projected payoff", lower.aux_response == lower.projected_payoff);
    check("projected payoff >= best response to snapped x", lower.projected_payoff >= lower.base_response);
    check(
        "best response to snapped x >= value - d/2",
        lower.base_response >= v.clone() - half(&lower.distance),
    );
    check("best response to snapped x >= value - eps", lower.base_response >= v.clone() - epsilon);
    check("aux value - eps <= value", vs.clone() - epsilon <= v);
    check("value - eps <= aux value", v.clone() - epsilon <= vs);
    let spread = (v.clone() - vs.clone()).abs();
    check("|value - aux value| <= 2 eps", spread <= epsilon * Rational::from_integer(2.into()));

    Ok(SandwichReport {
        epsilon: epsilon.clone(),
        value: v,
        aux_value: vs,
        aux_stats: aux_report.stats,
        upper,
        lower,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{ActionSet, MonitoringStructure};
    use crate::scalar::ratio;

    #[test]
    fn matching_sandwich() {
        let m = MonitoringStructure::blackwell(ActionSet::numbered(2).unwrap(), 2).unwrap();
        let g = TruncatedGame::from_predicate(m, |h| h[0] == h[1]);
        let r = compare_values(&g, &ratio(1, 4), &CompareOptions::default()).unwrap();
        assert!(r.holds(), "{:?}", r.failures());
        assert_eq!(r.value, ratio(1, 2));
        assert_eq!(r.aux_value, ratio(1, 2));
    }

    #[test]
    fn empty_set() {
        let m = MonitoringStructure::blackwell(ActionSet::numbered(2).unwrap(), 3).unwrap();
        let g = TruncatedGame::from_predicate(m, |_| false);
        for eps in [ratio(2, 1), ratio(1, 2)] {
            let r = compare_values(&g, &eps, &CompareOptions::default()).unwrap();
            assert!(r.holds());
            assert_eq!((r.value, r.aux_value), (ratio(0, 1), ratio(0, 1)));
        }
    }
}
