//! Monte Carlo run of a stochastic hidden-variable model for the spin pair.
//!
//! Each sample draws a hidden unit vector `λ` uniformly on the sphere. A
//! partition of the sphere into `S₊` (area `2π(1 + a·b)`) and its complement
//! decides `C = A(a)A(b)`; given `C`, the pair is drawn from a fixed table
//! that does not depend on the device settings:
//!
//! | C  | (+,+) | (+,−) | (−,+) | (−,−) |
//! |----|-------|-------|-------|-------|
//! | +1 | ½     | 0     | 0     | ½     |
//! | −1 | 0     | ½     | ½     | 0     |
//!
//! Mixing over `λ` gives the local table `¼(1 + αβ a·b)`. In singlet mode
//! the second outcome is reported as `B(b) = −A(b)`, which gives the singlet
//! table.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::direction::{Direction, Spin};
use crate::error::{Error, Result};
use crate::sampling::{run_blocks, uniform_on_sphere};
use crate::spin::{cell_index, local_pair_dist, qm_pair_dist, Cells, PairDist, SpinDist};

/// Hidden variable: a point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HiddenVar(pub Direction);

/// Spherical cap `S₊` around `cap_axis` with angular radius `cap_angle`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub a: Direction,
    pub b: Direction,
    pub cap_axis: Direction,
    pub cap_angle: f64,
    cos_cap: f64,
}

impl PartitionSpec {
    /// Cap centred on `a` with `cos(cap_angle) = −a·b`, so its area is
    /// `2π(1 + a·b)`.
    pub fn new(a: Direction, b: Direction) -> Self {
        let cos_cap = (-a.dot(&b)).clamp(-1.0, 1.0);
        Self {
            a,
            b,
            cap_axis: a,
            cap_angle: cos_cap.acos(),
            cos_cap,
        }
    }

    /// Area of `S₊`.
    pub fn cap_area(&self) -> f64 {
        std::f64::consts::TAU * (1.0 - self.cos_cap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    /// Single-device pair `(A(a), A(b))`.
    Local,
    /// Two-device pair `(A(a), B(b))` with `B(b) = −A(b)`.
    Singlet,
}

impl SimMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SimMode::Local => "local",
            SimMode::Singlet => "singlet",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    #[serde(rename = "n")]
    pub n_samples: u64,
    pub seed: u64,
    pub theta_ab_rad: f64,
    pub mode: SimMode,
    pub empirical: Cells,
    pub theoretical: Cells,
    pub max_abs_dev: f64,
    pub chi_square: f64,
    #[serde(skip)]
    pub counts: [u64; 4],
}

pub fn sample_lambda<R: Rng + ?Sized>(rng: &mut R) -> HiddenVar {
    HiddenVar(uniform_on_sphere(rng))
}

/// `C = +1` iff `λ` lies in the cap (boundary included).
pub fn classify(lambda: &HiddenVar, part: &PartitionSpec) -> Spin {
    if lambda.0.dot(&part.cap_axis) >= part.cos_cap {
        Spin::Plus
    } else {
        Spin::Minus
    }
}

/// `P[C] = ½(1 + C a·b)`.
pub fn p_c_analytic(a: &Direction, b: &Direction) -> SpinDist {
    let x = a.dot(b);
    SpinDist {
        plus: 0.5 * (1.0 + x),
        minus: 0.5 * (1.0 - x),
    }
}

/// Row of the conditional pair table for the given `C`, in canonical cell
/// order.
pub fn pair_given_c_table(c: Spin) -> [f64; 4] {
    match c {
        Spin::Plus => [0.5, 0.0, 0.0, 0.5],
        Spin::Minus => [0.0, 0.5, 0.5, 0.0],
    }
}

/// Draws `(A(a), A(b))` given `C`; always `A(a)·A(b) = C`.
pub fn sample_pair_given_c<R: Rng + ?Sized>(c: Spin, rng: &mut R) -> (Spin, Spin) {
    let first = if rng.random::<bool>() {
        Spin::Plus
    } else {
        Spin::Minus
    };
    (first, first.times(c))
}

/// `Σ_C P[pair | C] P[C]`, evaluated without sampling.
pub fn mixture_pair_dist(a: &Direction, b: &Direction) -> [f64; 4] {
    let pc = p_c_analytic(a, b);
    let mut out = [0.0; 4];
    for c in Spin::ALL {
        let row = pair_given_c_table(c);
        for (o, r) in out.iter_mut().zip(row) {
            *o += r * pc.prob(c);
        }
    }
    out
}

pub fn simulate(
    a: &Direction,
    b: &Direction,
    n: u64,
    seed: u64,
    mode: SimMode,
) -> Result<SimReport> {
    simulate_with_threads(a, b, n, seed, mode, None)
}

/// [`simulate`] on a dedicated pool of `threads` workers. The report does
/// not depend on `threads`.
pub fn simulate_with_threads(
    a: &Direction,
    b: &Direction,
    n: u64,
    seed: u64,
    mode: SimMode,
    threads: Option<usize>,
) -> Result<SimReport> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "sample count must be at least 1".into(),
        ));
    }
    let part = PartitionSpec::new(*a, *b);
    let block_counts = run_blocks(n, seed, threads, |len, rng| {
        let mut counts = [0u64; 4];
        for _ in 0..len {
            let lambda = sample_lambda(rng);
            let c = classify(&lambda, &part);
            let (first, second) = sample_pair_given_c(c, rng);
            let second = match mode {
                SimMode::Local => second,
                SimMode::Singlet => -second,
            };
            counts[cell_index(first, second)] += 1;
        }
        counts
    })?;
    let mut counts = [0u64; 4];
    for bc in block_counts {
        for (t, c) in counts.iter_mut().zip(bc) {
            *t += c;
        }
    }

    let theoretical = match mode {
        SimMode::Local => local_pair_dist(a, b),
        SimMode::Singlet => qm_pair_dist(a, b),
    };
    Ok(build_report(
        counts,
        n,
        seed,
        a.angle_to(b),
        mode,
        &theoretical,
    ))
}

fn build_report(
    counts: [u64; 4],
    n: u64,
    seed: u64,
    theta: f64,
    mode: SimMode,
    theoretical: &PairDist,
) -> SimReport {
    let nf = n as f64;
    let empirical = counts.map(|c| c as f64 / nf);
    let target = theoretical.probs();
    let max_abs_dev = empirical
        .iter()
        .zip(target)
        .map(|(e, t)| (e - t).abs())
        .fold(0.0, f64::max);
    let chi_square = counts
        .iter()
        .zip(target)
        .map(|(&o, t)| {
            let expected = t * nf;
            let o = o as f64;
            if expected > 0.0 {
                (o - expected).powi(2) / expected
            } else if o > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .sum();
    SimReport {
        n_samples: n,
        seed,
        theta_ab_rad: theta,
        mode,
        empirical: empirical.into(),
        theoretical: theoretical.cells(),
        max_abs_dev,
        chi_square,
        counts,
    }
}

/// Estimates of `P[A(a) = +1 | B(b) = +1]` from singlet-mode runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductRuleReport {
    /// `b = a`; conservation of spin forces 0.
    pub aligned: f64,
    /// `b = −a`; forces 1.
    pub anti_aligned: f64,
    /// `b ⟂ a`; ½.
    pub orthogonal: f64,
}

/// Shows that conditioning on `B(b)` carries information that depends on
/// `b`, so `P[A(a) | λ, a]` cannot stand in for `P[A(a) | B(b), λ, a, b]`.
pub fn product_rule_demo(a: &Direction, n: u64, seed: u64) -> Result<ProductRuleReport> {
    let estimate = |b: Direction| -> Result<f64> {
        let r = simulate(a, &b, n, seed, SimMode::Singlet)?;
        let plus_plus = r.counts[cell_index(Spin::Plus, Spin::Plus)];
        let minus_plus = r.counts[cell_index(Spin::Minus, Spin::Plus)];
        let given = plus_plus + minus_plus;
        if given == 0 {
            return Err(Error::UndefinedConditional(0.0));
        }
        Ok(plus_plus as f64 / given as f64)
    };
    Ok(ProductRuleReport {
        aligned: estimate(*a)?,
        anti_aligned: estimate(-*a)?,
        orthogonal: estimate(a.orthogonal())?,
    })
}
