//! Phase-one simplex for small dense feasibility problems
//! `A x = b, x ≥ 0`.
//!
//! Bland's rule is used for both the entering and the leaving variable, so
//! the method terminates on degenerate problems.

const PIVOT_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// A basic feasible point.
    Feasible(Vec<f64>),
    /// Minimum total constraint violation found by phase one.
    Infeasible { residual: f64 },
}

/// Searches for `x ≥ 0` with `A x = b`. The problem is declared feasible when
/// the phase-one optimum is at most `tol`.
pub fn find_feasible_point(a: &[Vec<f64>], b: &[f64], tol: f64) -> Feasibility {
    let m = a.len();
    assert_eq!(m, b.len(), "row count mismatch");
    let n = a.first().map_or(0, Vec::len);
    let width = n + m + 1;
    let rhs = n + m;

    // artificials start basic; rows with negative rhs are negated first
    let mut tab = vec![vec![0.0; width]; m];
    for (i, row) in a.iter().enumerate() {
        assert_eq!(row.len(), n, "ragged constraint matrix");
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            tab[i][j] = sign * row[j];
        }
        tab[i][n + i] = 1.0;
        tab[i][rhs] = sign * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // reduced costs of the phase-one objective Σ artificials
    let mut reduced = vec![0.0; width];
    for row in &tab {
        for j in 0..width {
            reduced[j] -= row[j];
        }
    }
    for r in reduced.iter_mut().skip(n).take(m) {
        *r = 0.0;
    }

    for _ in 0..MAX_PIVOTS {
        let Some(enter) = (0..n).find(|&j| reduced[j] < -PIVOT_EPS) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            let coef = tab[i][enter];
            if coef > PIVOT_EPS {
                let ratio = tab[i][rhs] / coef;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best_ratio - PIVOT_EPS
                            || ((ratio - best_ratio).abs() <= PIVOT_EPS && basis[i] < basis[l])
                    }
                };
                if better {
                    leave = Some(i);
                    best_ratio = ratio;
                }
            }
        }
        // phase-one objective is bounded below, so a pivot row always exists
        let Some(row) = leave else { break };
        pivot(&mut tab, &mut reduced, row, enter);
        basis[row] = enter;
    }

    let residual = -reduced[rhs];
    if residual > tol {
        return Feasibility::Infeasible { residual };
    }
    let mut x = vec![0.0; n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = tab[i][rhs];
        }
    }
    Feasibility::Feasible(x)
}

fn pivot(tab: &mut [Vec<f64>], reduced: &mut [f64], row: usize, col: usize) {
    let p = tab[row][col];
    for v in tab[row].iter_mut() {
        *v /= p;
    }
    let pivot_row = tab[row].clone();
    for (i, r) in tab.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col];
        if f != 0.0 {
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
    }
    let f = reduced[col];
    if f != 0.0 {
        for (v, pv) in reduced.iter_mut().zip(&pivot_row) {
            *v -= f * pv;
        }
    }
}
