use alloc::vec;
use alloc::vec::Vec;

use super::lp::{LinearProgram, Relation};
use super::report::{certify, Method, ValueReport};
use super::space::SequenceSpace;
use crate::error::{bail, Result};
use crate::game::{MonitoringStructure, Player, TruncatedGame};
use crate::scalar::Scalar;

/// Default cap on `|rows| * |columns|` of a normal form.
pub const DEFAULT_MATRIX_CAP: usize = 1_000_000;

/// The normal form of a truncated game: pure strategies of both players and
/// the 0/1 payoff matrix.
///
/// A pure strategy picks one action per infoset. Strategies are numbered in
/// mixed radix over the infosets in (stage, atom) order, the first infoset
/// being the most significant digit, so the numbering is lexicographic in
/// (stage, atom, action).
#[derive(Debug, Clone)]
pub struct NormalForm {
    one: SequenceSpace,
    two: SequenceSpace,
    actions: usize,
    rows: usize,
    cols: usize,
    /// Row-major bits: `bits[i * words + j / 64]`.
    bits: Vec<u64>,
    words: usize,
}

fn count(k: usize, digits: usize) -> Option<usize> {
    k.checked_pow(u32::try_from(digits).ok()?)
}

fn digits(mut index: usize, k: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % k;
        index /= k;
    }
    out
}

fn play_out(m: &MonitoringStructure, sigma: &[usize], theta: &[usize], one: &SequenceSpace, two: &SequenceSpace) -> usize {
    let k = m.action_count();
    let mut h = 0;
    for n in 0..m.horizon() {
        let atom = m.partition(n).atom_of_index(h);
        let a = if n % 2 == 0 {
            sigma[one.infoset_at(n, atom)]
        } else {
            theta[two.infoset_at(n, atom)]
        };
        h = h * k + a;
    }
    h
}

impl NormalForm {
    pub fn build(g: &TruncatedGame, cap: usize) -> Result<Self> {
        let m = g.monitoring();
        let k = m.action_count();
        let one = SequenceSpace::build(m, Player::One)?;
        let two = SequenceSpace::build(m, Player::Two)?;
        let rows = count(k, one.infosets().len());
        let cols = count(k, two.infosets().len());
        let (rows, cols) = match (rows, cols) {
            (Some(r), Some(c)) if r.checked_mul(c).is_some_and(|e| e <= cap) => (r, c),
            _ => bail!(
                Size,
                "normal form would exceed {cap} entries ({} and {} infosets); use the sequence form",
                one.infosets().len(),
                two.infosets().len()
            ),
        };
        let words = cols.div_ceil(64);
        let mut bits = vec![0u64; rows * words];
        let thetas: Vec<Vec<usize>> = (0..cols).map(|j| digits(j, k, two.infosets().len())).collect();
        for i in 0..rows {
            let sigma = digits(i, k, one.infosets().len());
            for (j, theta) in thetas.iter().enumerate() {
                if g.wins(play_out(m, &sigma, theta, &one, &two)) {
                    bits[i * words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        Ok(Self {
            one,
            two,
            actions: k,
            rows,
            cols,
            bits,
            words,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    /// Per-infoset actions of player one's pure strategy `i`.
    pub fn row_strategy(&self, i: usize) -> Vec<usize> {
        digits(i, self.actions, self.one.infosets().len())
    }

    pub fn col_strategy(&self, j: usize) -> Vec<usize> {
        digits(j, self.actions, self.two.infosets().len())
    }

    /// Index of the terminal history induced by a pure strategy pair.
    pub fn induced_play(&self, m: &MonitoringStructure, i: usize, j: usize) -> usize {
        play_out(m, &self.row_strategy(i), &self.col_strategy(j), &self.one, &self.two)
    }

    /// Surviving rows and columns after iterated removal of duplicate and
    /// weakly dominated pure strategies. Removal of weakly dominated
    /// strategies keeps the value, and some optimal pair survives.
    pub fn reduce(&self) -> (Vec<usize>, Vec<usize>) {
        let mut row_alive = vec![true; self.rows];
        let mut col_alive = vec![true; self.cols];
        // column-major copy for column comparisons
        let rwords = self.rows.div_ceil(64);
        let mut cbits = vec![0u64; self.cols * rwords];
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.entry(i, j) {
                    cbits[j * rwords + i / 64] |= 1 << (i % 64);
                }
            }
        }
        let mask_of = |alive: &[bool], words: usize| {
            let mut mask = vec![0u64; words];
            for (i, a) in alive.iter().enumerate() {
                if *a {
                    mask[i / 64] |= 1 << (i % 64);
                }
            }
            mask
        };
        // is `a` contained in `b` on the masked coordinates
        let within = |a: &[u64], b: &[u64], mask: &[u64]| {
            a.iter().zip(b).zip(mask).all(|((x, y), m)| x & !y & m == 0)
        };
        loop {
            let mut changed = false;
            let cmask = mask_of(&col_alive, self.words);
            for i in 0..self.rows {
                if !row_alive[i] {
                    continue;
                }
                let ri = &self.bits[i * self.words..(i + 1) * self.words];
                let dominated = (0..self.rows).any(|i2| {
                    if i2 == i || !row_alive[i2] {
                        return false;
                    }
                    let r2 = &self.bits[i2 * self.words..(i2 + 1) * self.words];
                    within(ri, r2, &cmask) && (i2 < i || !within(r2, ri, &cmask))
                });
                if dominated {
                    row_alive[i] = false;
                    changed = true;
                }
            }
            let rmask = mask_of(&row_alive, rwords);
            for j in 0..self.cols {
                if !col_alive[j] {
                    continue;
                }
                let cj = &cbits[j * rwords..(j + 1) * rwords];
                let dominated = (0..self.cols).any(|j2| {
                    if j2 == j || !col_alive[j2] {
                        return false;
                    }
                    let c2 = &cbits[j2 * rwords..(j2 + 1) * rwords];
                    within(c2, cj, &rmask) && (j2 < j || !within(cj, c2, &rmask))
                });
                if dominated {
                    col_alive[j] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let keep = |alive: Vec<bool>| {
            alive
                .iter()
                .enumerate()
                .filter(|(_, a)| **a)
                .map(|(i, _)| i)
                .collect::<Vec<_>>()
        };
        (keep(row_alive), keep(col_alive))
    }

    /// Realization plan of a mixture over pure strategies of one player.
    fn mixed_plan<T: Scalar>(&self, player: Player, mixture: &[(usize, T)]) -> Vec<T> {
        let space = if player == Player::One { &self.one } else { &self.two };
        let mut plan = vec![T::zero(); space.sequence_count()];
        for (s, p) in mixture {
            if p.is_zero() {
                continue;
            }
            let choice = digits(*s, self.actions, space.infosets().len());
            // a pure plan reaches a sequence iff every choice on its path agrees
            let mut reach = vec![false; space.sequence_count()];
            reach[0] = true;
            for (i, info) in space.infosets().iter().enumerate() {
                let seq = space.sequence(i, choice[i]);
                reach[seq] = reach[info.parent];
            }
            plan[0] += p.clone();
            for (seq, r) in reach.iter().enumerate().skip(1) {
                if *r {
                    plan[seq] += p.clone();
                }
            }
        }
        plan
    }
}

/// Value of the matrix game by linear programming over mixed strategies,
/// converted to behavioral strategies through their realization plans.
pub fn brute_force_value<T: Scalar>(g: &TruncatedGame, cap: usize) -> Result<ValueReport<T>> {
    let nf = NormalForm::build(g, cap)?;
    brute_force_on(g, &nf)
}

pub(crate) fn brute_force_on<T: Scalar>(g: &TruncatedGame, nf: &NormalForm) -> Result<ValueReport<T>> {
    let (rows, cols) = nf.reduce();
    let entry = |i: usize, j: usize| if nf.entry(i, j) { T::one() } else { T::zero() };

    // player one: max v s.t. sum_i p_i R_ij >= v, sum p = 1
    let v = rows.len();
    let mut lp = LinearProgram::<T>::new(v + 1);
    lp.set_objective(v, T::one());
    for &j in &cols {
        let mut row: Vec<(usize, T)> = rows
            .iter()
            .enumerate()
            .filter(|(_, &i)| nf.entry(i, j))
            .map(|(a, &i)| (a, entry(i, j)))
            .collect();
        row.push((v, -T::one()));
        lp.add_row(row, Relation::Ge, T::zero());
    }
    lp.add_row((0..v).map(|a| (a, T::one())).collect(), Relation::Eq, T::one());
    let p = lp.maximize()?;

    // player two: max -w s.t. sum_j q_j R_ij <= w, sum q = 1
    let w = cols.len();
    let mut lp = LinearProgram::<T>::new(w + 1);
    lp.set_objective(w, -T::one());
    for &i in &rows {
        let mut row: Vec<(usize, T)> = cols
            .iter()
            .enumerate()
            .filter(|(_, &j)| nf.entry(i, j))
            .map(|(b, &j)| (b, entry(i, j)))
            .collect();
        row.push((w, -T::one()));
        lp.add_row(row, Relation::Le, T::zero());
    }
    lp.add_row((0..w).map(|b| (b, T::one())).collect(), Relation::Eq, T::one());
    let q = lp.maximize()?;

    let value = p.objective.clone();
    if !value.approx_eq(&-q.objective.clone()) {
        bail!(Invariant, "matrix game programs disagree");
    }
    let m = g.monitoring();
    let mix_x: Vec<(usize, T)> = rows.iter().zip(&p.values).map(|(&i, pi)| (i, pi.clone())).collect();
    let mix_y: Vec<(usize, T)> = cols.iter().zip(&q.values).map(|(&j, qj)| (j, qj.clone())).collect();
    let x = nf.one.behavioral(m, &nf.mixed_plan(Player::One, &mix_x))?;
    let y = nf.two.behavioral(m, &nf.mixed_plan(Player::Two, &mix_y))?;
    let certificate = certify(g, &x, &y, &nf.one, &nf.two)?;
    if !certificate.lower.approx_eq(&value) || !certificate.upper.approx_eq(&value) {
        bail!(Invariant, "behavioral conversion of the mixed optimum lost optimality");
    }
    Ok(ValueReport {
        method: Method::BruteForce,
        value,
        x,
        y,
        certificate,
    })
}
