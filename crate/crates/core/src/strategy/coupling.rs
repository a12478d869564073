use alloc::vec::Vec;

use rand::Rng;

use super::behavioral::BehavioralStrategy;
use super::play::check_pair;
use crate::error::Result;
use crate::game::MonitoringStructure;
use crate::scalar::Scalar;

/// Two plays sampled jointly, with the first stage at which they differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoupledPlayPair {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub divergence: Option<usize>,
}

/// One draw from a maximal coupling of `p` and `q`: the pair agrees with
/// probability `sum_a min(p_a, q_a)`; otherwise the two coordinates come
/// independently from the normalised excesses, whose supports are disjoint.
pub fn maximal_coupling<R: Rng + ?Sized>(p: &[f64], q: &[f64], rng: &mut R) -> (usize, usize) {
    let overlap: Vec<f64> = p.iter().zip(q).map(|(a, b)| a.min(*b)).collect();
    let shared: f64 = overlap.iter().sum();
    if rng.gen::<f64>() < shared {
        let a = draw(&overlap, shared, rng);
        return (a, a);
    }
    let excess_p: Vec<f64> = p.iter().zip(&overlap).map(|(a, o)| (a - o).max(0.0)).collect();
    let excess_q: Vec<f64> = q.iter().zip(&overlap).map(|(b, o)| (b - o).max(0.0)).collect();
    let tp: f64 = excess_p.iter().sum();
    let tq: f64 = excess_q.iter().sum();
    if tp <= 0.0 || tq <= 0.0 {
        // rounding left no excess mass
        let a = draw(&overlap, shared, rng);
        return (a, a);
    }
    (draw(&excess_p, tp, rng), draw(&excess_q, tq, rng))
}

fn draw<R: Rng + ?Sized>(weights: &[f64], total: f64, rng: &mut R) -> usize {
    let target = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = i;
            if target < acc {
                return i;
            }
        }
    }
    last
}

/// Samples an `(x, y)`-play and an `(x', y')`-play stage by stage, coupling
/// each stage's two conditional action laws maximally.
pub fn coupled_sample<T: Scalar, R: Rng + ?Sized>(
    x: &BehavioralStrategy<T>,
    y: &BehavioralStrategy<T>,
    x2: &BehavioralStrategy<T>,
    y2: &BehavioralStrategy<T>,
    m: &MonitoringStructure,
    rng: &mut R,
) -> Result<CoupledPlayPair> {
    check_pair(x, y, m)?;
    check_pair(x2, y2, m)?;
    let k = m.action_count();
    let (mut h1, mut h2) = (0usize, 0usize);
    let mut first = Vec::with_capacity(m.horizon());
    let mut second = Vec::with_capacity(m.horizon());
    let mut divergence = None;
    for n in 0..m.horizon() {
        let (s1, s2) = if n % 2 == 0 { (x, x2) } else { (y, y2) };
        let part = m.partition(n);
        let p: Vec<f64> = s1.distribution(n, part.atom_of_index(h1)).iter().map(Scalar::to_f64).collect();
        let q: Vec<f64> = s2.distribution(n, part.atom_of_index(h2)).iter().map(Scalar::to_f64).collect();
        let (a, b) = maximal_coupling(&p, &q, rng);
        if a != b && divergence.is_none() {
            divergence = Some(n);
        }
        first.push(a);
        second.push(b);
        h1 = h1 * k + a;
        h2 = h2 * k + b;
    }
    Ok(CoupledPlayPair {
        first,
        second,
        divergence,
    })
}
