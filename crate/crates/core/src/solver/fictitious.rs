use alloc::vec;
use alloc::vec::Vec;

use super::report::{certify, Method, ValueReport};
use super::response::respond;
use super::space::SequenceSpace;
use crate::error::{bail, Result};
use crate::game::{Player, TruncatedGame};

/// Outcome of a fictitious-play run.
#[derive(Debug, Clone, PartialEq)]
pub struct FictitiousPlayReport {
    /// Averaged strategies, the midpoint value estimate and their bounds.
    pub report: ValueReport<f64>,
    pub iterations: usize,
    /// `(iteration, smallest gap so far)` at powers of two and at the end.
    pub gap_history: Vec<(usize, f64)>,
}

fn weights(g: &TruncatedGame, space: &SequenceSpace, plan: &[f64]) -> Vec<f64> {
    g.winning()
        .iter()
        .enumerate()
        .map(|(h, &w)| if w { plan[space.terminal_sequence(h)] } else { 0.0 })
        .collect()
}

fn pure_plan(space: &SequenceSpace, choice: &[usize]) -> Vec<f64> {
    let mut plan = vec![0.0; space.sequence_count()];
    plan[0] = 1.0;
    for (i, info) in space.infosets().iter().enumerate() {
        plan[space.sequence(i, choice[i])] = plan[info.parent];
    }
    plan
}

/// Simultaneous fictitious play in realization-plan space: both players
/// best-respond to the opponent's running average, and the averages are
/// updated. The gap is the spread between the two best-response values.
pub fn fictitious_play(g: &TruncatedGame, iterations: usize) -> Result<FictitiousPlayReport> {
    if iterations == 0 {
        bail!(Precondition, "fictitious play needs at least one iteration");
    }
    let m = g.monitoring();
    let one = SequenceSpace::build(m, Player::One)?;
    let two = SequenceSpace::build(m, Player::Two)?;
    let uniform = |space: &SequenceSpace, p: Player| {
        space.realization(&crate::strategy::BehavioralStrategy::<f64>::uniform(p, m))
    };
    let mut avg_x = uniform(&one, Player::One);
    let mut avg_y = uniform(&two, Player::Two);
    let mut best_gap = f64::INFINITY;
    let mut history = Vec::new();
    for t in 1..=iterations {
        let (upper, bx) = respond(m, &weights(g, &two, &avg_y), &one);
        let (lower, by) = respond(m, &weights(g, &one, &avg_x), &two);
        best_gap = best_gap.min(upper - lower);
        if t.is_power_of_two() || t == iterations {
            history.push((t, best_gap));
        }
        let rate = 1.0 / (t as f64 + 1.0);
        for (a, p) in avg_x.iter_mut().zip(pure_plan(&one, &bx)) {
            *a += (p - *a) * rate;
        }
        for (a, p) in avg_y.iter_mut().zip(pure_plan(&two, &by)) {
            *a += (p - *a) * rate;
        }
    }
    let x = one.behavioral(m, &avg_x)?;
    let y = two.behavioral(m, &avg_y)?;
    let certificate = certify(g, &x, &y, &one, &two)?;
    let value = (certificate.lower + certificate.upper) / 2.0;
    Ok(FictitiousPlayReport {
        report: ValueReport {
            method: Method::FictitiousPlay,
            value,
            x,
            y,
            certificate,
        },
        iterations,
        gap_history: history,
    })
}
