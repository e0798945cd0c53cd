//! Shannon information carried by the local spin correlation.
//!
//! The mutual information of the local table is evaluated from its defining
//! sum, `Σ P log₂ P / (P₁ P₂)`, with `0·log 0 = 0`. For `x = a·b` this gives
//! `½(1+x)log₂(1+x) + ½(1−x)log₂(1−x)`: even in `x`, zero at `x = 0`, one
//! bit at `x = ±1`.

use serde::{Deserialize, Serialize};

use crate::direction::{Direction, Spin};
use crate::error::{Error, Result};
use crate::spin::{local_conditional, local_pair_dist, PairDist, Which, CELLS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoCurvePoint {
    pub x: f64,
    pub mutual_information_bits: f64,
    pub conditional_entropy_bits: f64,
}

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    // adding 0.0 turns −0.0 into 0.0 at p ∈ {0, 1}
    0.0 - (plogp(p) + plogp(1.0 - p)) + 0.0
}

/// Mutual information of the two variables of `d`, in bits.
pub fn mutual_information(d: &PairDist) -> f64 {
    let first = d.marginal(Which::First);
    let second = d.marginal(Which::Second);
    let mut total = 0.0;
    for (alpha, beta) in CELLS {
        let p = d.entry(alpha, beta);
        if p <= 0.0 {
            continue;
        }
        total += p * (p / (first.prob(alpha) * second.prob(beta))).log2();
    }
    // rounding can leave a tiny negative residue for independent tables
    total.max(0.0)
}

/// `H(A(b) | A(a))` in bits for the local correlation.
pub fn conditional_entropy(a: &Direction, b: &Direction) -> f64 {
    let marginal_a = local_pair_dist(a, b).marginal(Which::First);
    Spin::ALL
        .iter()
        .map(|&given| {
            let cond = local_conditional(a, b, given);
            marginal_a.prob(given) * binary_entropy(cond.plus)
        })
        .sum()
}

/// [`conditional_entropy`] as a function of `x = a·b`.
pub fn conditional_entropy_from_dot(x: f64) -> f64 {
    binary_entropy(0.5 * (1.0 + x))
}

/// Tabulates mutual information and conditional entropy on
/// `x = −1, −1 + step, …, 1`. The last point is always `x = 1`.
pub fn info_curve(step: f64) -> Result<Vec<InfoCurvePoint>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "step must lie in (0, 1], got {step}"
        )));
    }
    let ratio = 2.0 / step;
    let intervals = ratio.round();
    let xs: Vec<f64> = if (ratio - intervals).abs() < 1e-9 {
        let n = intervals as usize;
        (0..=n).map(|k| -1.0 + 2.0 * k as f64 / n as f64).collect()
    } else {
        let n = ratio.floor() as usize;
        let mut xs: Vec<f64> = (0..=n).map(|k| -1.0 + k as f64 * step).collect();
        xs.push(1.0);
        xs
    };
    Ok(xs
        .into_iter()
        .map(|x| InfoCurvePoint {
            x,
            mutual_information_bits: mutual_information(&PairDist::local_from_dot(x)),
            conditional_entropy_bits: conditional_entropy_from_dot(x),
        })
        .collect())
}
