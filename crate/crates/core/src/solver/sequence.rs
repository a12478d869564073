use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::lp::{LinearProgram, Relation};
use super::report::{certify, Method, ValueReport};
use super::space::SequenceSpace;
use crate::error::{bail, Result};
use crate::game::{Player, TruncatedGame};
use crate::scalar::Scalar;

/// Winning terminal histories counted per pair of terminal sequences; the
/// bilinear payoff is `sum r1[s1] r2[s2] count`.
fn payoff_pairs(g: &TruncatedGame, one: &SequenceSpace, two: &SequenceSpace) -> BTreeMap<(usize, usize), i64> {
    let mut pairs = BTreeMap::new();
    for (h, &w) in g.winning().iter().enumerate() {
        if w {
            *pairs
                .entry((one.terminal_sequence(h), two.terminal_sequence(h)))
                .or_insert(0) += 1;
        }
    }
    pairs
}

/// Rows `E r = e` of a player's realization-plan polytope, over variables
/// starting at `offset`.
fn add_flow<T: Scalar>(lp: &mut LinearProgram<T>, space: &SequenceSpace, offset: usize, k: usize) {
    lp.add_row(alloc::vec![(offset, T::one())], Relation::Eq, T::one());
    for (i, info) in space.infosets().iter().enumerate() {
        let mut row: Vec<(usize, T)> = (0..k)
            .map(|a| (offset + space.sequence(i, a), T::one()))
            .collect();
        row.push((offset + info.parent, -T::one()));
        lp.add_row(row, Relation::Eq, T::zero());
    }
}

/// Column `s` of `F^T q` for the opponent's flow matrix, with `q` starting
/// at `offset` (`q_0` for the root, `q_{i+1}` for infoset `i`).
fn dual_column<T: Scalar>(space: &SequenceSpace, s: usize, offset: usize, k: usize) -> Vec<(usize, T)> {
    let mut col = Vec::new();
    if s == 0 {
        col.push((offset, T::one()));
    } else {
        col.push((offset + 1 + (s - 1) / k, T::one()));
    }
    for (i, info) in space.infosets().iter().enumerate() {
        if info.parent == s {
            col.push((offset + 1 + i, -T::one()));
        }
    }
    col
}

/// Solves `max_x min_y` of the realization-plan bilinear form for the
/// given player. Returns the value and that player's plan.
fn solve_side<T: Scalar>(
    own: &SequenceSpace,
    other: &SequenceSpace,
    pairs: &BTreeMap<(usize, usize), i64>,
    k: usize,
) -> Result<(T, Vec<T>)> {
    let s_own = own.sequence_count();
    let q0 = s_own;
    let vars = s_own + 1 + other.infosets().len();
    let mut lp = LinearProgram::<T>::new(vars);
    for j in q0..vars {
        lp.set_free(j);
    }
    let maximizer = own.player() == Player::One;
    lp.set_objective(q0, if maximizer { T::one() } else { -T::one() });
    add_flow(&mut lp, own, 0, k);

    let mut by_other: BTreeMap<usize, Vec<(usize, T)>> = BTreeMap::new();
    for (&(s1, s2), &c) in pairs {
        let (mine, theirs) = if maximizer { (s1, s2) } else { (s2, s1) };
        by_other
            .entry(theirs)
            .or_default()
            .push((mine, T::from_ratio(-c, 1)));
    }
    for s in 0..other.sequence_count() {
        let mut row = dual_column::<T>(other, s, q0, k);
        if let Some(terms) = by_other.get(&s) {
            row.extend(terms.iter().cloned());
        }
        // maximizer: F^T q <= A^T r ; minimizer: E^T p >= A r
        let relation = if maximizer { Relation::Le } else { Relation::Ge };
        lp.add_row(row, relation, T::zero());
    }
    let sol = lp.maximize()?;
    let value = if maximizer { sol.objective } else { -sol.objective };
    Ok((value, sol.values[..s_own].to_vec()))
}

/// Exact value and optimal behavioral strategies via the sequence form.
/// Requires perfect recall for both players.
pub fn sequence_form_value<T: Scalar>(g: &TruncatedGame) -> Result<ValueReport<T>> {
    let m = g.monitoring();
    let k = m.action_count();
    let one = SequenceSpace::build(m, Player::One)?;
    let two = SequenceSpace::build(m, Player::Two)?;
    let pairs = payoff_pairs(g, &one, &two);
    let (v1, r1) = solve_side::<T>(&one, &two, &pairs, k)?;
    let (v2, r2) = solve_side::<T>(&two, &one, &pairs, k)?;
    if !v1.approx_eq(&v2) {
        bail!(Invariant, "sequence-form programs disagree: {} vs {}", v1.render(), v2.render());
    }
    let x = one.behavioral(m, &r1)?;
    let y = two.behavioral(m, &r2)?;
    let certificate = certify(g, &x, &y, &one, &two)?;
    if !certificate.lower.approx_eq(&v1) || !certificate.upper.approx_eq(&v1) {
        bail!(
            Invariant,
            "sequence-form strategies are not optimal: bounds {} and {} around {}",
            certificate.lower.render(),
            certificate.upper.render(),
            v1.render()
        );
    }
    Ok(ValueReport {
        method: Method::SequenceForm,
        value: v1,
        x,
        y,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{ActionSet, MonitoringStructure};
    use crate::scalar::{ratio, Rational};

    fn game(m: MonitoringStructure, f: impl FnMut(&[usize]) -> bool) -> TruncatedGame {
        TruncatedGame::from_predicate(m, f)
    }

    #[test]
    fn matching_values() {
        let a = ActionSet::numbered(2).unwrap();
        let bw = MonitoringStructure::blackwell(a.clone(), 2).unwrap();
        let r = sequence_form_value::<Rational>(&game(bw, |h| h[0] == h[1])).unwrap();
        assert_eq!(r.value, ratio(1, 2));
        assert_eq!(r.x.distribution(0, 0), &[ratio(1, 2), ratio(1, 2)]);
        let pi = MonitoringStructure::perfect(a, 2).unwrap();
        let r = sequence_form_value::<Rational>(&game(pi, |h| h[0] == h[1])).unwrap();
        assert_eq!(r.value, ratio(0, 1));
    }

    #[test]
    fn trivial_sets() {
        let m = MonitoringStructure::blackwell(ActionSet::numbered(2).unwrap(), 3).unwrap();
        assert_eq!(sequence_form_value::<Rational>(&game(m.clone(), |_| false)).unwrap().value, ratio(0, 1));
        assert_eq!(sequence_form_value::<Rational>(&game(m, |_| true)).unwrap().value, ratio(1, 1));
    }

    #[test]
    fn float_mode_agrees() {
        let m = MonitoringStructure::blackwell(ActionSet::numbered(3).unwrap(), 3).unwrap();
        let g = game(m, |h| (h[0] + h[1] + h[2]) % 3 == 0 || h[0] == 2);
        let exact = sequence_form_value::<Rational>(&g).unwrap().value;
        let float = sequence_form_value::<f64>(&g).unwrap().value;
        assert!((Scalar::to_f64(&exact) - float).abs() < 1e-9);
    }
}
