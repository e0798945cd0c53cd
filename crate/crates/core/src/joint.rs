//! Third- and fourth-order joint distributions of binary spins built from
//! pairwise marginals.
//!
//! Three ±1 variables have exactly one signed table with given first,
//! second and third moments:
//!
//! `q(α,β,δ) = ⅛[1 + α⟨A⟩ + β⟨B⟩ + δ⟨C⟩ + αβ⟨AB⟩ + βδ⟨BC⟩ + αδ⟨CA⟩ + αβδ μ₃]`.
//!
//! Pairwise tables fix everything but `μ₃ = ⟨ABC⟩`; a genuine distribution
//! exists iff some `μ₃` makes all eight entries non-negative. Tables with
//! negative entries are kept as quasi-distributions and flagged, never
//! clamped.
//!
//! For four variables in the CHSH pattern (pairs AB, AC, DB, DC) existence
//! is decided by a linear feasibility search over the sixteen cells.

use serde::{Deserialize, Serialize};

use crate::direction::{Direction, Spin};
use crate::error::{Error, Result};
use crate::inequalities::{bell_pair_17, InequalityVerdict};
use crate::lp::{find_feasible_point, Feasibility};
use crate::spin::{PairDist, Which, CELLS};

/// Sum tolerance and negativity threshold for third-order tables.
pub const TRIPLE_TOLERANCE: f64 = 1e-12;
/// Sum tolerance, negativity threshold and feasibility tolerance for
/// fourth-order tables.
pub const QUAD_TOLERANCE: f64 = 1e-9;
/// Allowed disagreement between single-variable marginals of input tables.
pub const MARGINAL_TOLERANCE: f64 = 1e-9;

/// One of the (up to four) binary variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Var {
    A,
    B,
    C,
    D,
}

impl Var {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> char {
        ['A', 'B', 'C', 'D'][self.index()]
    }
}

fn spin_from_bit(bit: usize) -> Spin {
    if bit == 0 {
        Spin::Plus
    } else {
        Spin::Minus
    }
}

/// Spins of cell `index` in a table over `n` variables; the first variable
/// is the most significant bit and `+1` maps to bit 0.
pub fn cell_spins(index: usize, n: usize) -> Vec<Spin> {
    (0..n)
        .map(|k| spin_from_bit((index >> (n - 1 - k)) & 1))
        .collect()
}

fn pair_table_of(q: &[f64], n: usize, first: Var, second: Var) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (idx, &v) in q.iter().enumerate() {
        let spins = cell_spins(idx, n);
        let cell = 2 * spins[first.index()].index() + spins[second.index()].index();
        out[cell] += v;
    }
    out
}

fn first_negative(q: &[f64], threshold: f64) -> Option<(usize, f64)> {
    q.iter()
        .enumerate()
        .find(|(_, &v)| v < -threshold)
        .map(|(i, &v)| (i, v))
}

/// Six moments fixed by three pairwise tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairMoments {
    pub m_a: f64,
    pub m_b: f64,
    pub m_c: f64,
    pub m_ab: f64,
    pub m_bc: f64,
    pub m_ca: f64,
}

impl PairMoments {
    pub fn new(m_a: f64, m_b: f64, m_c: f64, m_ab: f64, m_bc: f64, m_ca: f64) -> Result<Self> {
        let m = Self {
            m_a,
            m_b,
            m_c,
            m_ab,
            m_bc,
            m_ca,
        };
        check_moments(&m.as_array())?;
        Ok(m)
    }

    /// Zero first moments.
    pub fn symmetric(m_ab: f64, m_bc: f64, m_ca: f64) -> Result<Self> {
        Self::new(0.0, 0.0, 0.0, m_ab, m_bc, m_ca)
    }

    pub fn as_array(&self) -> [f64; 6] {
        [
            self.m_a, self.m_b, self.m_c, self.m_ab, self.m_bc, self.m_ca,
        ]
    }

    pub fn with_mu3(&self, m_abc: f64) -> MomentSet3 {
        MomentSet3 {
            m_a: self.m_a,
            m_b: self.m_b,
            m_c: self.m_c,
            m_ab: self.m_ab,
            m_bc: self.m_bc,
            m_ca: self.m_ca,
            m_abc,
        }
    }

    pub fn has_zero_first_moments(&self) -> bool {
        [self.m_a, self.m_b, self.m_c]
            .iter()
            .all(|m| m.abs() <= MARGINAL_TOLERANCE)
    }
}

fn check_moments(ms: &[f64]) -> Result<()> {
    for &m in ms {
        if !m.is_finite() || m.abs() > 1.0 + TRIPLE_TOLERANCE {
            return Err(Error::InvalidInput(format!("moment {m} outside [-1, 1]")));
        }
    }
    Ok(())
}

/// All seven moments of three binary variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet3 {
    pub m_a: f64,
    pub m_b: f64,
    pub m_c: f64,
    pub m_ab: f64,
    pub m_bc: f64,
    pub m_ca: f64,
    pub m_abc: f64,
}

impl MomentSet3 {
    pub fn new(pairs: PairMoments, m_abc: f64) -> Result<Self> {
        check_moments(&[m_abc])?;
        Ok(pairs.with_mu3(m_abc))
    }

    pub fn pair_moments(&self) -> PairMoments {
        PairMoments {
            m_a: self.m_a,
            m_b: self.m_b,
            m_c: self.m_c,
            m_ab: self.m_ab,
            m_bc: self.m_bc,
            m_ca: self.m_ca,
        }
    }
}

/// Signed table over `{−1,+1}³` for `(A, B, C)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleDist {
    q: [f64; 8],
    valid: bool,
}

impl TripleDist {
    pub fn from_entries(q: [f64; 8]) -> Self {
        let valid = first_negative(&q, TRIPLE_TOLERANCE).is_none();
        Self { q, valid }
    }

    pub fn entries(&self) -> [f64; 8] {
        self.q
    }

    pub fn is_valid(&self) -> bool {
        self.valid
    }

    pub fn sum(&self) -> f64 {
        self.q.iter().sum()
    }

    pub fn index(alpha: Spin, beta: Spin, delta: Spin) -> usize {
        4 * alpha.index() + 2 * beta.index() + delta.index()
    }

    pub fn entry(&self, alpha: Spin, beta: Spin, delta: Spin) -> f64 {
        self.q[Self::index(alpha, beta, delta)]
    }

    /// `(index, value)` of entries below `−1e-12`.
    pub fn negative_entries(&self) -> Vec<(usize, f64)> {
        self.q
            .iter()
            .enumerate()
            .filter(|(_, &v)| v < -TRIPLE_TOLERANCE)
            .map(|(i, &v)| (i, v))
            .collect()
    }

    /// Raw (possibly signed) table of `(first, second)` summed over the
    /// third variable.
    pub fn pair_table(&self, first: Var, second: Var) -> [f64; 4] {
        pair_table_of(&self.q, 3, first, second)
    }

    /// Marginal over the two variables left after removing `drop`, in
    /// `A, B, C` order.
    pub fn marginal_pair(&self, drop: Var) -> [f64; 4] {
        match drop {
            Var::A => self.pair_table(Var::B, Var::C),
            Var::B => self.pair_table(Var::A, Var::C),
            _ => self.pair_table(Var::A, Var::B),
        }
    }
}

/// Signed table over `{−1,+1}⁴` for `(A, B, C, D)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadDist {
    q: [f64; 16],
    valid: bool,
}

impl QuadDist {
    pub fn from_entries(q: [f64; 16]) -> Self {
        let valid = first_negative(&q, QUAD_TOLERANCE).is_none();
        Self { q, valid }
    }

    pub fn entries(&self) -> [f64; 16] {
        self.q
    }

    pub fn is_valid(&self) -> bool {
        self.valid
    }

    pub fn sum(&self) -> f64 {
        self.q.iter().sum()
    }

    pub fn pair_table(&self, first: Var, second: Var) -> [f64; 4] {
        pair_table_of(&self.q, 4, first, second)
    }
}

/// Feasible range of `μ₃` for given pairwise moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mu3Interval {
    pub lo: f64,
    pub hi: f64,
    pub empty: bool,
}

impl Mu3Interval {
    pub fn contains(&self, mu3: f64) -> bool {
        !self.empty && self.lo <= mu3 && mu3 <= self.hi
    }

    pub fn midpoint(&self) -> Option<f64> {
        (!self.empty).then_some(0.5 * (self.lo + self.hi))
    }
}

/// The signed third-order table with the given moments.
pub fn triple_from_moments(m: &MomentSet3) -> TripleDist {
    let mut q = [0.0; 8];
    for (i, v) in q.iter_mut().enumerate() {
        let s = cell_spins(i, 3);
        let (a, b, d) = (s[0].value(), s[1].value(), s[2].value());
        *v = 0.125
            * (1.0
                + a * m.m_a
                + b * m.m_b
                + d * m.m_c
                + a * b * m.m_ab
                + b * d * m.m_bc
                + a * d * m.m_ca
                + a * b * d * m.m_abc);
    }
    TripleDist::from_entries(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentExtraction {
    pub moments: PairMoments,
    /// Largest disagreement between the two readings of each single-variable
    /// mean.
    pub max_marginal_mismatch: f64,
}

fn compare_means(name: &str, x: (f64, &str), y: (f64, &str)) -> Result<f64> {
    let diff = (x.0 - y.0).abs();
    if diff > MARGINAL_TOLERANCE {
        return Err(Error::InconsistentMarginals(format!(
            "⟨{name}⟩ is {} from {} but {} from {}",
            x.0, x.1, y.0, y.1
        )));
    }
    Ok(diff)
}

/// Reads the six pairwise moments off tables over `(A,B)`, `(B,C)` and
/// `(C,A)` (first variable first).
pub fn moments_from_pairs(
    p_ab: &PairDist,
    p_bc: &PairDist,
    p_ca: &PairDist,
) -> Result<MomentExtraction> {
    let m_a = p_ab.mean(Which::First);
    let m_b = p_ab.mean(Which::Second);
    let m_c = p_bc.mean(Which::Second);
    let mismatch = [
        compare_means("A", (m_a, "AB"), (p_ca.mean(Which::Second), "CA"))?,
        compare_means("B", (m_b, "AB"), (p_bc.mean(Which::First), "BC"))?,
        compare_means("C", (m_c, "BC"), (p_ca.mean(Which::First), "CA"))?,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(MomentExtraction {
        moments: PairMoments {
            m_a,
            m_b,
            m_c,
            m_ab: p_ab.covariance(),
            m_bc: p_bc.covariance(),
            m_ca: p_ca.covariance(),
        },
        max_marginal_mismatch: mismatch,
    })
}

/// `q(α,β,δ)` without the `μ₃` term, times 8.
fn base_terms(m: &PairMoments) -> [(f64, f64); 8] {
    let mut out = [(0.0, 0.0); 8];
    for (i, o) in out.iter_mut().enumerate() {
        let s = cell_spins(i, 3);
        let (a, b, d) = (s[0].value(), s[1].value(), s[2].value());
        let t = 1.0
            + a * m.m_a
            + b * m.m_b
            + d * m.m_c
            + a * b * m.m_ab
            + b * d * m.m_bc
            + a * d * m.m_ca;
        *o = (t, a * b * d);
    }
    out
}

/// Values of `μ₃` in `[−1, 1]` for which every entry of the third-order
/// table is non-negative.
pub fn mu3_interval(m: &PairMoments) -> Mu3Interval {
    let mut lo: f64 = -1.0;
    let mut hi: f64 = 1.0;
    for (t, sign) in base_terms(m) {
        if sign > 0.0 {
            lo = lo.max(-t);
        } else {
            hi = hi.min(t);
        }
    }
    Mu3Interval {
        lo,
        hi,
        empty: lo > hi,
    }
}

/// `μ₃` used when the caller does not supply one: 0 for zero first moments,
/// otherwise the midpoint of the feasible interval (0 when it is empty).
pub fn default_mu3(m: &PairMoments) -> f64 {
    if m.has_zero_first_moments() {
        0.0
    } else {
        mu3_interval(m).midpoint().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExistenceVerdict {
    Exists,
    DoesNotExist,
    /// Necessary conditions hold; with non-zero first moments they do not
    /// settle existence.
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExistenceReport {
    pub verdict: ExistenceVerdict,
    /// True when the verdict is necessary and sufficient.
    pub exact: bool,
    /// The four sign-pair sums `±⟨AB⟩ ± ⟨BC⟩ ± ⟨AC⟩ ≥ −1`, each stored as
    /// `−(sum) ≤ 1`.
    pub pair_sums: [InequalityVerdict; 4],
    /// `|⟨AB⟩ + ⟨AC⟩| − ⟨BC⟩ ≤ 1`.
    pub plus_form: InequalityVerdict,
    /// `|⟨AB⟩ − ⟨AC⟩| + ⟨BC⟩ ≤ 1`.
    pub minus_form: InequalityVerdict,
}

/// Evaluates the second-moment conditions for a third-order table.
///
/// With `symmetric` set (first moments zero) the conditions are necessary
/// and sufficient; otherwise only necessary.
pub fn existence_check_3(m: &PairMoments, symmetric: bool) -> Result<ExistenceReport> {
    if symmetric && !m.has_zero_first_moments() {
        return Err(Error::InvalidInput(format!(
            "symmetric check needs zero first moments, got ({}, {}, {})",
            m.m_a, m.m_b, m.m_c
        )));
    }
    let (ab, bc, ac) = (m.m_ab, m.m_bc, m.m_ca);
    let pair_sums = [ab + bc + ac, ab - bc - ac, -ab + bc - ac, -ab - bc + ac]
        .map(|s| InequalityVerdict::new(-s, 1.0));
    let (plus_form, minus_form) = bell_pair_17(ab, ac, bc);
    let all_hold =
        pair_sums.iter().all(|v| v.satisfied) && plus_form.satisfied && minus_form.satisfied;
    let verdict = match (all_hold, symmetric) {
        (false, _) => ExistenceVerdict::DoesNotExist,
        (true, true) => ExistenceVerdict::Exists,
        (true, false) => ExistenceVerdict::Undetermined,
    };
    Ok(ExistenceReport {
        verdict,
        exact: symmetric,
        pair_sums,
        plus_form,
        minus_form,
    })
}

/// Third-order table compatible with the local pair tables of `a`, `b`, `c`:
/// `⅛[1 + αβ a·b + βδ b·c + δα c·a]`.
pub fn qm_triple(a: &Direction, b: &Direction, c: &Direction) -> TripleDist {
    let m = PairMoments {
        m_a: 0.0,
        m_b: 0.0,
        m_c: 0.0,
        m_ab: a.dot(b),
        m_bc: b.dot(c),
        m_ca: c.dot(a),
    };
    triple_from_moments(&m.with_mu3(0.0))
}

/// `P[X, Y | given = value]` from a third-order table.
///
/// Fails for quasi-distributions: the pairwise tables may exist while the
/// conditional does not.
pub fn triple_conditional(t: &TripleDist, given: Var, value: Spin) -> Result<PairDist> {
    if let Some((index, value)) = first_negative(&t.q, TRIPLE_TOLERANCE) {
        return Err(Error::QuasiDistribution { index, value });
    }
    let (first, second) = match given {
        Var::A => (Var::B, Var::C),
        Var::B => (Var::A, Var::C),
        Var::C => (Var::A, Var::B),
        Var::D => {
            return Err(Error::InvalidInput(
                "third-order table has no variable D".into(),
            ))
        }
    };
    let mut table = [0.0; 4];
    for (idx, &v) in t.q.iter().enumerate() {
        let s = cell_spins(idx, 3);
        if s[given.index()] == value {
            table[2 * s[first.index()].index() + s[second.index()].index()] += v;
        }
    }
    let p_given: f64 = table.iter().sum();
    if p_given <= 0.0 {
        return Err(Error::UndefinedConditional(p_given));
    }
    PairDist::new(table.map(|v| v / p_given), [first.label(), second.label()])
}

/// A named inequality verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedVerdict {
    pub name: String,
    #[serde(flatten)]
    pub verdict: InequalityVerdict,
}

/// Covariances of the CHSH pattern: `⟨AB⟩`, `⟨AC⟩`, `⟨DB⟩`, `⟨DC⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshCovariances {
    pub c_ab: f64,
    pub c_ac: f64,
    pub c_db: f64,
    pub c_dc: f64,
}

/// The fourth-order necessary condition and its three relabelings. Each
/// takes the two edges meeting at one variable with a minus sign:
/// `|⟨AB⟩ − ⟨AC⟩| + |⟨DB⟩ + ⟨DC⟩| ≤ 2` pivots on `A`.
pub fn chsh_forms(c: &ChshCovariances) -> [NamedVerdict; 4] {
    let form = |name: &str, x: f64, y: f64, u: f64, v: f64| NamedVerdict {
        name: name.to_string(),
        verdict: InequalityVerdict::new((x - y).abs() + (u + v).abs(), 2.0),
    };
    [
        form("|AB-AC|+|DB+DC|", c.c_ab, c.c_ac, c.c_db, c.c_dc),
        form("|DB-DC|+|AB+AC|", c.c_db, c.c_dc, c.c_ab, c.c_ac),
        form("|AB-DB|+|AC+DC|", c.c_ab, c.c_db, c.c_ac, c.c_dc),
        form("|AC-DC|+|AB+DB|", c.c_ac, c.c_dc, c.c_ab, c.c_db),
    ]
}

/// The eight linear inequalities behind [`chsh_forms`]:
/// `±(⟨AB⟩ + ⟨AC⟩ + ⟨DB⟩ + ⟨DC⟩ − 2⟨XY⟩) ≤ 2` for each of the four pairs.
pub fn chsh_linear_inequalities(c: &ChshCovariances) -> [InequalityVerdict; 8] {
    let all = [c.c_ab, c.c_ac, c.c_db, c.c_dc];
    let total: f64 = all.iter().sum();
    let mut out = [InequalityVerdict::new(0.0, 2.0); 8];
    for (k, &ck) in all.iter().enumerate() {
        let s = total - 2.0 * ck;
        out[2 * k] = InequalityVerdict::new(s, 2.0);
        out[2 * k + 1] = InequalityVerdict::new(-s, 2.0);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadFeasibility {
    pub feasible: bool,
    pub covariances: ChshCovariances,
    pub forms: [NamedVerdict; 4],
    /// Non-negative sixteen-cell table reproducing the four inputs.
    pub witness: Option<QuadDist>,
    /// First violated form, when infeasibility is explained by one.
    pub certificate: Option<NamedVerdict>,
    /// Minimum total constraint violation found by the feasibility search.
    pub lp_residual: f64,
}

// margin below which the inequality test and the solver may legitimately
// disagree on boundary cases
const CROSS_CHECK_MARGIN: f64 = 1e-8;

/// Decides whether a joint distribution over `(A, B, C, D)` exists whose
/// `(A,B)`, `(A,C)`, `(D,B)`, `(D,C)` marginals are the given tables.
pub fn quad_feasibility(
    p_ab: &PairDist,
    p_ac: &PairDist,
    p_db: &PairDist,
    p_dc: &PairDist,
) -> Result<QuadFeasibility> {
    let m_a = p_ab.mean(Which::First);
    let m_b = p_ab.mean(Which::Second);
    let m_c = p_ac.mean(Which::Second);
    let m_d = p_db.mean(Which::First);
    compare_means("A", (m_a, "AB"), (p_ac.mean(Which::First), "AC"))?;
    compare_means("B", (m_b, "AB"), (p_db.mean(Which::Second), "DB"))?;
    compare_means("C", (m_c, "AC"), (p_dc.mean(Which::Second), "DC"))?;
    compare_means("D", (m_d, "DB"), (p_dc.mean(Which::First), "DC"))?;

    let covariances = ChshCovariances {
        c_ab: p_ab.covariance(),
        c_ac: p_ac.covariance(),
        c_db: p_db.covariance(),
        c_dc: p_dc.covariance(),
    };
    let forms = chsh_forms(&covariances);

    let specs = [
        (Var::A, Var::B, p_ab),
        (Var::A, Var::C, p_ac),
        (Var::D, Var::B, p_db),
        (Var::D, Var::C, p_dc),
    ];
    let mut rows = Vec::with_capacity(17);
    let mut rhs = Vec::with_capacity(17);
    for (x, y, table) in specs {
        for (alpha, beta) in CELLS {
            let row: Vec<f64> = (0..16)
                .map(|idx| {
                    let s = cell_spins(idx, 4);
                    if s[x.index()] == alpha && s[y.index()] == beta {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            rows.push(row);
            rhs.push(table.entry(alpha, beta));
        }
    }
    rows.push(vec![1.0; 16]);
    rhs.push(1.0);

    let (witness, lp_residual) = match find_feasible_point(&rows, &rhs, QUAD_TOLERANCE) {
        Feasibility::Feasible(x) => {
            let mut q = [0.0; 16];
            q.copy_from_slice(&x);
            (Some(QuadDist::from_entries(q)), 0.0)
        }
        Feasibility::Infeasible { residual } => (None, residual),
    };
    let feasible = witness.is_some();

    if [m_a, m_b, m_c, m_d]
        .iter()
        .all(|m| m.abs() <= MARGINAL_TOLERANCE)
    {
        let linear = chsh_linear_inequalities(&covariances);
        let clearly_violated = linear.iter().any(|v| v.lhs > v.bound + CROSS_CHECK_MARGIN);
        let clearly_satisfied = linear.iter().all(|v| v.lhs < v.bound - CROSS_CHECK_MARGIN);
        if (feasible && clearly_violated) || (!feasible && clearly_satisfied) {
            return Err(Error::SolverDisagreement(format!(
                "feasibility search says {feasible} for covariances {covariances:?}"
            )));
        }
    }

    let certificate = if feasible {
        None
    } else {
        forms.iter().find(|f| !f.verdict.satisfied).cloned()
    };
    Ok(QuadFeasibility {
        feasible,
        covariances,
        forms,
        witness,
        certificate,
        lp_residual,
    })
}
