//! Singlet pair probabilities from the two-particle state vector.
//!
//! `P(α, β) = ⟨ψ| Π(a, α) ⊗ Π(b, β) |ψ⟩` with `Π(n, s) = (I + s n·σ)/2` and
//! `ψ = (|↑↓⟩ − |↓↑⟩)/√2`. Shares no code with [`crate::spin`], so the two
//! can check each other.

use num_complex::Complex64;

use crate::direction::{Direction, Spin};

type Mat2 = [[Complex64; 2]; 2];
type Mat4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub const SIGMA_X: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
pub const SIGMA_Y: Mat2 = [[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]];
pub const SIGMA_Z: Mat2 = [[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]];

/// Two-particle state over the basis `(↑↑, ↑↓, ↓↑, ↓↓)` along `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingletState {
    pub amplitudes: [Complex64; 4],
}

impl SingletState {
    pub fn new() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amplitudes: [ZERO, Complex64::new(h, 0.0), Complex64::new(-h, 0.0), ZERO],
        }
    }

    /// Singlet multiplied by `e^{iφ}`.
    pub fn with_phase(phi: f64) -> Self {
        let phase = Complex64::from_polar(1.0, phi);
        let mut s = Self::new();
        for amp in &mut s.amplitudes {
            *amp *= phase;
        }
        s
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨ψ| op |ψ⟩`, complex.
    pub fn expectation(&self, op: &Mat4) -> Complex64 {
        let psi = &self.amplitudes;
        let mut acc = ZERO;
        for (i, row) in op.iter().enumerate() {
            let mut op_psi = ZERO;
            for (j, &m) in row.iter().enumerate() {
                op_psi += m * psi[j];
            }
            acc += psi[i].conj() * op_psi;
        }
        acc
    }

    pub fn pair_prob(&self, a: &Direction, b: &Direction, alpha: Spin, beta: Spin) -> Complex64 {
        let op = kron(
            &SpinProjector::new(a, alpha).matrix,
            &SpinProjector::new(b, beta).matrix,
        );
        self.expectation(&op)
    }
}

impl Default for SingletState {
    fn default() -> Self {
        Self::new()
    }
}

/// `(I + s n·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinProjector {
    pub matrix: Mat2,
}

impl SpinProjector {
    pub fn new(n: &Direction, s: Spin) -> Self {
        let [nx, ny, nz] = n.components();
        let sign = s.value();
        let mut m = [[ZERO; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                let n_sigma = SIGMA_X[r][c] * nx + SIGMA_Y[r][c] * ny + SIGMA_Z[r][c] * nz;
                let id = if r == c { ONE } else { ZERO };
                m[r][c] = (id + n_sigma * sign) * 0.5;
            }
        }
        Self { matrix: m }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix[0][0] + self.matrix[1][1]
    }
}

pub fn mat2_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = x[r][0] * y[0][c] + x[r][1] * y[1][c];
        }
    }
    out
}

/// Kronecker product; row index `2i + k` for `x[i][·] ⊗ y[k][·]`.
pub fn kron(x: &Mat2, y: &Mat2) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = x[i][j] * y[k][l];
                }
            }
        }
    }
    out
}

/// Born-rule probability that the devices along `a` and `b` read `α`, `β`.
pub fn singlet_pair_prob(a: &Direction, b: &Direction, alpha: Spin, beta: Spin) -> f64 {
    SingletState::new().pair_prob(a, b, alpha, beta).re
}
