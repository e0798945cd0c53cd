//! Exact spin distributions for the singlet state.
//!
//! Two tables matter here. The two-device singlet table
//! `P[A(a)=α, B(b)=β] = ¼(1 − αβ a·b)` and the single-device local table
//! `P[A(a)=α, A(b)=β] = ¼(1 + αβ a·b)`. Conservation of total spin,
//! `A(a) = −B(a)`, maps one onto the other by flipping the sign of one
//! variable; [`apply_property_i`] is that map.

use serde::{Deserialize, Serialize};

use crate::direction::{Direction, Spin};
use crate::error::{Error, Result};

/// Tolerance on the total mass of a caller-supplied pair table.
pub const TABLE_SUM_TOLERANCE: f64 = 1e-9;

/// Selects one of the two variables of a [`PairDist`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    First,
    Second,
}

/// Probability table over a single binary spin, stored as `[P(+1), P(−1)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinDist {
    pub plus: f64,
    pub minus: f64,
}

impl SpinDist {
    pub fn prob(&self, s: Spin) -> f64 {
        match s {
            Spin::Plus => self.plus,
            Spin::Minus => self.minus,
        }
    }

    pub fn mean(&self) -> f64 {
        self.plus - self.minus
    }
}

/// Serialized form of a pair table: keys `pp`, `pm`, `mp`, `mm`, where the
/// first symbol is the first variable and `p` stands for `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cells {
    pub pp: f64,
    pub pm: f64,
    pub mp: f64,
    pub mm: f64,
}

impl From<[f64; 4]> for Cells {
    fn from(p: [f64; 4]) -> Self {
        Cells {
            pp: p[0],
            pm: p[1],
            mp: p[2],
            mm: p[3],
        }
    }
}

impl From<Cells> for [f64; 4] {
    fn from(c: Cells) -> Self {
        [c.pp, c.pm, c.mp, c.mm]
    }
}

/// Index of cell `(α, β)` in the canonical `(++, +−, −+, −−)` order.
pub fn cell_index(alpha: Spin, beta: Spin) -> usize {
    2 * alpha.index() + beta.index()
}

/// The four cells in canonical order.
pub const CELLS: [(Spin, Spin); 4] = [
    (Spin::Plus, Spin::Plus),
    (Spin::Plus, Spin::Minus),
    (Spin::Minus, Spin::Plus),
    (Spin::Minus, Spin::Minus),
];

/// Joint distribution of two binary spin variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairDist {
    p: [f64; 4],
    labels: [char; 2],
}

impl PairDist {
    /// Validates entries in `[0, 1]` and total mass 1 (to
    /// [`TABLE_SUM_TOLERANCE`]).
    pub fn new(p: [f64; 4], labels: [char; 2]) -> Result<Self> {
        for (i, &v) in p.iter().enumerate() {
            if !(-TABLE_SUM_TOLERANCE..=1.0 + TABLE_SUM_TOLERANCE).contains(&v) {
                return Err(Error::InvalidTable(format!(
                    "entry {} of {}{} table is {v}",
                    i, labels[0], labels[1]
                )));
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > TABLE_SUM_TOLERANCE {
            return Err(Error::InvalidTable(format!(
                "{}{} table sums to {sum}",
                labels[0], labels[1]
            )));
        }
        Ok(Self { p, labels })
    }

    pub fn from_cells(cells: Cells, labels: [char; 2]) -> Result<Self> {
        Self::new(cells.into(), labels)
    }

    /// Pair table with the given means and covariance:
    /// `¼(1 + α m₁ + β m₂ + αβ c)`.
    pub fn from_moments(m_first: f64, m_second: f64, cov: f64, labels: [char; 2]) -> Result<Self> {
        let mut p = [0.0; 4];
        for (i, (a, b)) in CELLS.iter().enumerate() {
            let (a, b) = (a.value(), b.value());
            p[i] = 0.25 * (1.0 + a * m_first + b * m_second + a * b * cov);
        }
        Self::new(p, labels)
    }

    /// All cells ¼.
    pub fn uniform(labels: [char; 2]) -> Self {
        Self {
            p: [0.25; 4],
            labels,
        }
    }

    /// Singlet table from the dot product `x = a·b`.
    pub fn singlet_from_dot(x: f64) -> Self {
        Self::correlated(-x, ['A', 'B'])
    }

    /// Local table from the dot product `x = a·b`.
    pub fn local_from_dot(x: f64) -> Self {
        Self::correlated(x, ['A', 'B'])
    }

    // entry(α,β) = ¼(1 + αβ c)
    fn correlated(c: f64, labels: [char; 2]) -> Self {
        let mut p = [0.0; 4];
        for (i, (a, b)) in CELLS.iter().enumerate() {
            p[i] = 0.25 * (1.0 + a.value() * b.value() * c);
        }
        Self { p, labels }
    }

    pub fn probs(&self) -> [f64; 4] {
        self.p
    }

    pub fn cells(&self) -> Cells {
        self.p.into()
    }

    pub fn labels(&self) -> [char; 2] {
        self.labels
    }

    pub fn with_labels(mut self, labels: [char; 2]) -> Self {
        self.labels = labels;
        self
    }

    pub fn entry(&self, alpha: Spin, beta: Spin) -> f64 {
        self.p[cell_index(alpha, beta)]
    }

    pub fn marginal(&self, which: Which) -> SpinDist {
        match which {
            Which::First => SpinDist {
                plus: self.p[0] + self.p[1],
                minus: self.p[2] + self.p[3],
            },
            Which::Second => SpinDist {
                plus: self.p[0] + self.p[2],
                minus: self.p[1] + self.p[3],
            },
        }
    }

    pub fn mean(&self, which: Which) -> f64 {
        self.marginal(which).mean()
    }

    /// `Σ αβ p(α, β)`.
    pub fn covariance(&self) -> f64 {
        self.p[0] - self.p[1] - self.p[2] + self.p[3]
    }

    /// Same table with one variable's sign flipped.
    pub fn flip(&self, which: Which) -> Self {
        let [pp, pm, mp, mm] = self.p;
        let p = match which {
            Which::First => [mp, mm, pp, pm],
            Which::Second => [pm, pp, mm, mp],
        };
        Self {
            p,
            labels: self.labels,
        }
    }

    /// Same table with the two variables exchanged.
    pub fn transpose(&self) -> Self {
        let [pp, pm, mp, mm] = self.p;
        Self {
            p: [pp, mp, pm, mm],
            labels: [self.labels[1], self.labels[0]],
        }
    }

    pub fn max_abs_diff(&self, other: &PairDist) -> f64 {
        self.p
            .iter()
            .zip(other.p.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Singlet pair distribution `P[A(a)=α, B(b)=β] = ¼(1 − αβ a·b)`.
///
/// Equal outcomes carry `½ sin²(θ/2)` and opposite outcomes `½ cos²(θ/2)`.
/// Non-unit inputs are rejected when the [`Direction`] is built.
pub fn qm_pair_dist(a: &Direction, b: &Direction) -> PairDist {
    PairDist::singlet_from_dot(a.dot(b))
}

/// Marginal of one variable; uniform for every singlet table.
pub fn qm_marginal(d: &PairDist, which: Which) -> SpinDist {
    d.marginal(which)
}

/// Side of the singlet pair that is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// Distribution of the other device's outcome given that the device on
/// `given_side` read `given`: `P[s | given] = ½(1 − s·given·a·b)`.
///
/// With `given_side = B` this is `P[A(a) | B(b) = given]`; with `A` it is
/// `P[B(b) | A(a) = given]`.
pub fn qm_conditional(a: &Direction, b: &Direction, given: Spin, given_side: Side) -> SpinDist {
    let joint = qm_pair_dist(a, b);
    let (which, other_first) = match given_side {
        Side::B => (Which::Second, true),
        Side::A => (Which::First, false),
    };
    let denom = joint.marginal(which).prob(given);
    let cond = |s: Spin| {
        let j = if other_first {
            joint.entry(s, given)
        } else {
            joint.entry(given, s)
        };
        j / denom
    };
    SpinDist {
        plus: cond(Spin::Plus),
        minus: cond(Spin::Minus),
    }
}

/// Covariance `⟨XY⟩` of a pair table.
pub fn covariance(d: &PairDist) -> f64 {
    d.covariance()
}

/// Single-device distribution `P[A(a)=α, A(b)=β] = ¼(1 + αβ a·b)`.
pub fn local_pair_dist(a: &Direction, b: &Direction) -> PairDist {
    PairDist::local_from_dot(a.dot(b))
}

/// `P[A(b) = s | A(a) = given] = ½(1 + s·given·a·b)`: `cos²(θ/2)` for
/// `s = given`, `sin²(θ/2)` otherwise.
pub fn local_conditional(a: &Direction, b: &Direction, given: Spin) -> SpinDist {
    let x = a.dot(b);
    let p = |s: Spin| 0.5 * (1.0 + s.value() * given.value() * x);
    SpinDist {
        plus: p(Spin::Plus),
        minus: p(Spin::Minus),
    }
}

/// Relabels one variable by its negation, `A(b) ↔ −B(b)`.
///
/// Maps the local table for `(a, b)` onto the singlet table and back.
pub fn apply_property_i(d: &PairDist, which: Which) -> PairDist {
    d.flip(which)
}
