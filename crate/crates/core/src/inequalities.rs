//! Bell-1964 and CHSH inequalities.
//!
//! Covariances follow the two-device convention `⟨A(x)B(y)⟩`; for the singlet
//! they equal `−cos θxy`. Coplanar configurations are given by signed angles
//! of each direction from a fixed in-plane reference, which keeps every
//! configuration geometrically realizable.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::sampling::{run_blocks, uniform_on_sphere, StreamRng};

/// Slack that separates a genuine violation from rounding noise.
pub const VIOLATION_SLACK: f64 = 1e-12;

/// Tolerance used when checking that pairwise angles fit in a plane.
pub const GEOMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub lhs: f64,
    pub bound: f64,
    pub satisfied: bool,
}

impl InequalityVerdict {
    pub fn new(lhs: f64, bound: f64) -> Self {
        Self {
            lhs,
            bound,
            satisfied: lhs <= bound + VIOLATION_SLACK,
        }
    }
}

fn check_covariance(name: &str, c: f64) -> Result<()> {
    if c.is_finite() && (-1.0 - VIOLATION_SLACK..=1.0 + VIOLATION_SLACK).contains(&c) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "covariance {name} = {c} outside [-1, 1]"
        )))
    }
}

/// `⟨A(a)B(b)⟩`, `⟨A(a)B(c)⟩`, `⟨A(b)B(c)⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceTriple {
    pub c_ab: f64,
    pub c_ac: f64,
    pub c_bc: f64,
}

impl CovarianceTriple {
    pub fn new(c_ab: f64, c_ac: f64, c_bc: f64) -> Result<Self> {
        check_covariance("c_ab", c_ab)?;
        check_covariance("c_ac", c_ac)?;
        check_covariance("c_bc", c_bc)?;
        Ok(Self { c_ab, c_ac, c_bc })
    }
}

/// `⟨A(a)B(b)⟩`, `⟨A(a)B(c)⟩`, `⟨A(d)B(b)⟩`, `⟨A(d)B(c)⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceQuad {
    pub c_ab: f64,
    pub c_ac: f64,
    pub c_db: f64,
    pub c_dc: f64,
}

impl CovarianceQuad {
    pub fn new(c_ab: f64, c_ac: f64, c_db: f64, c_dc: f64) -> Result<Self> {
        check_covariance("c_ab", c_ab)?;
        check_covariance("c_ac", c_ac)?;
        check_covariance("c_db", c_db)?;
        check_covariance("c_dc", c_dc)?;
        Ok(Self {
            c_ab,
            c_ac,
            c_db,
            c_dc,
        })
    }
}

/// `|⟨A(a)B(b)⟩ − ⟨A(a)B(c)⟩| − ⟨A(b)B(c)⟩ ≤ 1`.
pub fn bell_1964(t: &CovarianceTriple) -> InequalityVerdict {
    InequalityVerdict::new((t.c_ab - t.c_ac).abs() - t.c_bc, 1.0)
}

/// `|⟨A(a)B(b)⟩ − ⟨A(a)B(c)⟩| + |⟨A(d)B(b)⟩ + ⟨A(d)B(c)⟩| ≤ 2`.
pub fn chsh(q: &CovarianceQuad) -> InequalityVerdict {
    InequalityVerdict::new((q.c_ab - q.c_ac).abs() + (q.c_db + q.c_dc).abs(), 2.0)
}

/// The pair of single-device inequalities on `⟨A(a)A(b)⟩`, `⟨A(a)A(c)⟩`,
/// `⟨A(b)A(c)⟩`:
/// `|c_ab + c_ac| − c_bc ≤ 1` and `|c_ab − c_ac| + c_bc ≤ 1`.
pub fn bell_pair_17(c_ab: f64, c_ac: f64, c_bc: f64) -> (InequalityVerdict, InequalityVerdict) {
    (
        InequalityVerdict::new((c_ab + c_ac).abs() - c_bc, 1.0),
        InequalityVerdict::new((c_ab - c_ac).abs() + c_bc, 1.0),
    )
}

fn check_angle(name: &str, theta: f64) -> Result<()> {
    if theta.is_finite()
        && (-GEOMETRY_TOLERANCE..=std::f64::consts::PI + GEOMETRY_TOLERANCE).contains(&theta)
    {
        Ok(())
    } else {
        Err(Error::InvalidGeometry(format!(
            "{name} = {theta} is not an angle in [0, π]"
        )))
    }
}

/// Singlet covariance for devices an angle `theta` apart.
pub fn qm_covariance(theta: f64) -> f64 {
    -theta.cos()
}

/// Bell-1964 left-hand side with singlet covariances:
/// `|cos θab − cos θac| + cos θbc`.
///
/// The three angles must be realizable by coplanar unit vectors, i.e.
/// `θac = θab + θbc` or `|θab − θbc|` up to reflection.
pub fn qm_bell_lhs(theta_ab: f64, theta_ac: f64, theta_bc: f64) -> Result<f64> {
    check_angle("θab", theta_ab)?;
    check_angle("θac", theta_ac)?;
    check_angle("θbc", theta_bc)?;
    let target = theta_ac.cos();
    let realizable = [theta_ab + theta_bc, theta_ab - theta_bc]
        .iter()
        .any(|t| (t.cos() - target).abs() <= GEOMETRY_TOLERANCE);
    if !realizable {
        return Err(Error::InvalidGeometry(format!(
            "angles ({theta_ab}, {theta_ac}, {theta_bc}) are not realizable by coplanar directions"
        )));
    }
    Ok((theta_ab.cos() - theta_ac.cos()).abs() + theta_bc.cos())
}

/// CHSH left-hand side with singlet covariances:
/// `|cos θab − cos θac| + |cos θdb + cos θdc|`, after checking that the four
/// angles fit one coplanar configuration.
pub fn qm_chsh_lhs(theta_ab: f64, theta_ac: f64, theta_db: f64, theta_dc: f64) -> Result<f64> {
    check_angle("θab", theta_ab)?;
    check_angle("θac", theta_ac)?;
    check_angle("θdb", theta_db)?;
    check_angle("θdc", theta_dc)?;
    // a at 0, b at +θab; c and d each have two candidate positions
    let target = theta_dc.cos();
    let realizable = [theta_ac, -theta_ac].iter().any(|&phi_c| {
        [theta_ab + theta_db, theta_ab - theta_db]
            .iter()
            .any(|&phi_d| ((phi_d - phi_c).cos() - target).abs() <= GEOMETRY_TOLERANCE)
    });
    if !realizable {
        return Err(Error::InvalidGeometry(format!(
            "angles ({theta_ab}, {theta_ac}, {theta_db}, {theta_dc}) are not realizable by coplanar directions"
        )));
    }
    Ok((theta_ab.cos() - theta_ac.cos()).abs() + (theta_db.cos() + theta_dc.cos()).abs())
}

/// Sets `d = b` in CHSH under conservation of spin (`⟨A(b)B(b)⟩ = −1`,
/// `⟨A(b)B(c)⟩ = c_bc`) and returns `(CHSH lhs, Bell-1964 lhs)`.
///
/// The first is the second plus one, so `CHSH ≤ 2 ⇔ Bell ≤ 1`.
pub fn chsh_to_bell_reduction(t: &CovarianceTriple) -> (f64, f64) {
    let quad = CovarianceQuad {
        c_ab: t.c_ab,
        c_ac: t.c_ac,
        c_db: -1.0,
        c_dc: t.c_bc,
    };
    (chsh(&quad).lhs, bell_1964(t).lhs)
}

/// Coplanar three-direction configuration; angles in radians from the
/// reference axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellConfig {
    pub phi_a: f64,
    pub phi_b: f64,
    pub phi_c: f64,
}

impl BellConfig {
    /// `a` at 0, `b` at `θab`, `c` at `θab + θbc`.
    pub fn from_increments(theta_ab: f64, theta_bc: f64) -> Self {
        Self {
            phi_a: 0.0,
            phi_b: theta_ab,
            phi_c: theta_ab + theta_bc,
        }
    }

    pub fn directions(&self) -> [Direction; 3] {
        [self.phi_a, self.phi_b, self.phi_c].map(Direction::planar)
    }

    /// Singlet covariances of the configuration.
    pub fn qm_covariances(&self) -> CovarianceTriple {
        CovarianceTriple {
            c_ab: qm_covariance(self.phi_b - self.phi_a),
            c_ac: qm_covariance(self.phi_c - self.phi_a),
            c_bc: qm_covariance(self.phi_c - self.phi_b),
        }
    }
}

/// Coplanar four-direction configuration for CHSH.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshConfig {
    pub phi_a: f64,
    pub phi_b: f64,
    pub phi_c: f64,
    pub phi_d: f64,
}

impl ChshConfig {
    /// `a` at 0, `b` at `θab`, `d` at `θab + θdb`, `c` at `θab + θdb + θdc`.
    pub fn from_increments(theta_ab: f64, theta_db: f64, theta_dc: f64) -> Self {
        Self {
            phi_a: 0.0,
            phi_b: theta_ab,
            phi_d: theta_ab + theta_db,
            phi_c: theta_ab + theta_db + theta_dc,
        }
    }

    pub fn directions(&self) -> [Direction; 4] {
        [self.phi_a, self.phi_b, self.phi_c, self.phi_d].map(Direction::planar)
    }

    pub fn qm_covariances(&self) -> CovarianceQuad {
        CovarianceQuad {
            c_ab: qm_covariance(self.phi_b - self.phi_a),
            c_ac: qm_covariance(self.phi_c - self.phi_a),
            c_db: qm_covariance(self.phi_b - self.phi_d),
            c_dc: qm_covariance(self.phi_c - self.phi_d),
        }
    }
}

/// A hidden-variable model in Bell's factorized class: given `λ`, the two
/// outcomes are independent with conditional means `⟨A | λ, a⟩` and
/// `⟨B | λ, b⟩`.
pub trait LocalModel: Sync {
    fn mean_a(&self, lambda: &Direction, a: &Direction) -> f64;
    fn mean_b(&self, lambda: &Direction, b: &Direction) -> f64;

    /// Draws `λ`; uniform on the sphere unless overridden.
    fn sample_lambda(&self, rng: &mut StreamRng) -> Direction {
        uniform_on_sphere(rng)
    }
}

/// [`LocalModel`] from two closures, with `λ` uniform on the sphere.
pub struct FnLocalModel<FA, FB> {
    pub mean_a: FA,
    pub mean_b: FB,
}

impl<FA, FB> LocalModel for FnLocalModel<FA, FB>
where
    FA: Fn(&Direction, &Direction) -> f64 + Sync,
    FB: Fn(&Direction, &Direction) -> f64 + Sync,
{
    fn mean_a(&self, lambda: &Direction, a: &Direction) -> f64 {
        (self.mean_a)(lambda, a)
    }

    fn mean_b(&self, lambda: &Direction, b: &Direction) -> f64 {
        (self.mean_b)(lambda, b)
    }
}

/// How to integrate over `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integration {
    /// Sample mean over `samples` draws from the model's `λ` sampler.
    MonteCarlo { samples: u64, seed: u64 },
    /// Midpoint rule in `(z, φ)` for `λ` uniform on the sphere. Ignores the
    /// model's sampler.
    Quadrature { polar: usize, azimuthal: usize },
}

fn product_of_means<M: LocalModel + ?Sized>(
    model: &M,
    lambda: &Direction,
    a: &Direction,
    b: &Direction,
) -> Result<f64> {
    let ma = model.mean_a(lambda, a);
    let mb = model.mean_b(lambda, b);
    for m in [ma, mb] {
        if m.is_nan() || m.abs() > 1.0 + VIOLATION_SLACK {
            return Err(Error::InvalidModel(m));
        }
    }
    Ok(ma * mb)
}

/// `⟨A(a)B(b)⟩ = ∫ ⟨A | λ, a⟩⟨B | λ, b⟩ p(λ) dλ`.
///
/// Monte Carlo results depend only on `(seed, samples)`, not on the number
/// of worker threads.
pub fn bell_local_model_covariance<M: LocalModel + ?Sized>(
    model: &M,
    a: &Direction,
    b: &Direction,
    integration: Integration,
) -> Result<f64> {
    match integration {
        Integration::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidInput(
                    "sample count must be at least 1".into(),
                ));
            }
            let sums = run_blocks(samples, seed, None, |len, rng| -> Result<f64> {
                let mut acc = 0.0;
                for _ in 0..len {
                    let lambda = model.sample_lambda(rng);
                    acc += product_of_means(model, &lambda, a, b)?;
                }
                Ok(acc)
            })?;
            let mut total = 0.0;
            for s in sums {
                total += s?;
            }
            Ok(total / samples as f64)
        }
        Integration::Quadrature { polar, azimuthal } => {
            if polar == 0 || azimuthal == 0 {
                return Err(Error::InvalidInput(
                    "quadrature needs at least one node per axis".into(),
                ));
            }
            let rows: Vec<Result<f64>> = (0..polar)
                .into_par_iter()
                .map(|i| {
                    let z = -1.0 + (2.0 * i as f64 + 1.0) / polar as f64;
                    let r = (1.0 - z * z).sqrt();
                    let mut acc = 0.0;
                    for j in 0..azimuthal {
                        let phi = std::f64::consts::TAU * (j as f64 + 0.5) / azimuthal as f64;
                        let lambda =
                            Direction::from_unit_components(r * phi.cos(), r * phi.sin(), z);
                        acc += product_of_means(model, &lambda, a, b)?;
                    }
                    Ok(acc)
                })
                .collect();
            let mut total = 0.0;
            for row in rows {
                total += row?;
            }
            Ok(total / (polar * azimuthal) as f64)
        }
    }
}

/// Assembles the four CHSH covariances of a local model and evaluates CHSH.
pub fn local_model_chsh<M: LocalModel + ?Sized>(
    model: &M,
    dirs: [&Direction; 4],
    integration: Integration,
) -> Result<InequalityVerdict> {
    let [a, b, c, d] = dirs;
    let q = CovarianceQuad::new(
        bell_local_model_covariance(model, a, b, integration)?,
        bell_local_model_covariance(model, a, c, integration)?,
        bell_local_model_covariance(model, d, b, integration)?,
        bell_local_model_covariance(model, d, c, integration)?,
    )?;
    Ok(chsh(&q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InequalityKind {
    Bell,
    Chsh,
}

impl InequalityKind {
    pub fn bound(self) -> f64 {
        match self {
            InequalityKind::Bell => 1.0,
            InequalityKind::Chsh => 2.0,
        }
    }
}

/// Grid point of a scan. `angles` are `(φb, φc)` for Bell and
/// `(φb, φc, φd)` for CHSH, radians, with `a` fixed at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub angles: Vec<f64>,
    pub lhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub kind: InequalityKind,
    pub resolution: f64,
    pub grid_points: usize,
    pub max_lhs: f64,
    pub argmax: Vec<f64>,
    /// Points whose left-hand side exceeds the bound, in enumeration order.
    pub violating: Vec<ScanPoint>,
}

/// Largest accepted grid step.
pub const MAX_SCAN_RESOLUTION: f64 = std::f64::consts::FRAC_PI_4;

/// Exhaustive grid search over coplanar configurations using singlet
/// covariances. Direction `a` sits at angle 0; every other direction takes
/// each of the angles `k·resolution` in `[0, 2π)`.
pub fn violation_scan(kind: InequalityKind, resolution: f64) -> Result<ScanResult> {
    if !(resolution > 0.0 && resolution <= MAX_SCAN_RESOLUTION + 1e-15) {
        return Err(Error::InvalidInput(format!(
            "resolution must lie in (0, π/4], got {resolution}"
        )));
    }
    let steps = (std::f64::consts::TAU / resolution - 1e-9).ceil() as usize;
    let grid: Vec<f64> = (0..steps).map(|k| k as f64 * resolution).collect();
    let bound = kind.bound();

    // one row per value of the first free angle; rows are merged in order
    let rows: Vec<(f64, Vec<f64>, Vec<ScanPoint>)> = grid
        .par_iter()
        .map(|&phi_b| {
            let mut best = f64::NEG_INFINITY;
            let mut best_at = Vec::new();
            let mut violating = Vec::new();
            let mut visit = |angles: Vec<f64>, lhs: f64| {
                if lhs > best {
                    best = lhs;
                    best_at = angles.clone();
                }
                if lhs > bound + VIOLATION_SLACK {
                    violating.push(ScanPoint { angles, lhs });
                }
            };
            for &phi_c in &grid {
                match kind {
                    InequalityKind::Bell => {
                        let cfg = BellConfig {
                            phi_a: 0.0,
                            phi_b,
                            phi_c,
                        };
                        visit(vec![phi_b, phi_c], bell_1964(&cfg.qm_covariances()).lhs);
                    }
                    InequalityKind::Chsh => {
                        for &phi_d in &grid {
                            let cfg = ChshConfig {
                                phi_a: 0.0,
                                phi_b,
                                phi_c,
                                phi_d,
                            };
                            visit(vec![phi_b, phi_c, phi_d], chsh(&cfg.qm_covariances()).lhs);
                        }
                    }
                }
            }
            (best, best_at, violating)
        })
        .collect();

    let mut max_lhs = f64::NEG_INFINITY;
    let mut argmax = Vec::new();
    let mut violating = Vec::new();
    for (best, best_at, v) in rows {
        if best > max_lhs {
            max_lhs = best;
            argmax = best_at;
        }
        violating.extend(v);
    }
    let grid_points = match kind {
        InequalityKind::Bell => steps * steps,
        InequalityKind::Chsh => steps * steps * steps,
    };
    Ok(ScanResult {
        kind,
        resolution,
        grid_points,
        max_lhs,
        argmax,
        violating,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI, SQRT_2};

    use super::*;

    #[test]
    fn bell_1964_examples() {
        let cfg = BellConfig::from_increments(FRAC_PI_4, FRAC_PI_4);
        let v = bell_1964(&cfg.qm_covariances());
        assert!((v.lhs - SQRT_2).abs() < 1e-12);
        assert!(!v.satisfied);

        let v = bell_1964(&CovarianceTriple::new(0.0, 0.0, 0.0).unwrap());
        assert_eq!((v.lhs, v.satisfied), (0.0, true));

        let v = bell_1964(&CovarianceTriple::new(0.3, 0.3, -1.0).unwrap());
        assert_eq!(v.lhs, 1.0);
        assert!(v.satisfied);
    }

    #[test]
    fn chsh_examples() {
        let cfg = ChshConfig::from_increments(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4);
        assert!(((cfg.phi_c - cfg.phi_a) - 3.0 * FRAC_PI_4).abs() < 1e-15);
        let v = chsh(&cfg.qm_covariances());
        assert!((v.lhs - 2.0 * SQRT_2).abs() < 1e-12);
        assert!(!v.satisfied);

        assert_eq!(
            chsh(&CovarianceQuad::new(0.0, 0.0, 0.0, 0.0).unwrap()).lhs,
            0.0
        );
        let v = chsh(&CovarianceQuad::new(1.0, -1.0, 0.0, 0.0).unwrap());
        assert_eq!(v.lhs, 2.0);
        assert!(v.satisfied);
    }

    #[test]
    fn covariance_range_is_enforced() {
        assert!(CovarianceTriple::new(1.5, 0.0, 0.0).is_err());
        assert!(CovarianceQuad::new(0.0, 0.0, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn bell_pair_examples() {
        let (a, b) = bell_pair_17(1.0, 1.0, -1.0);
        assert_eq!((a.lhs, a.satisfied), (3.0, false));
        assert_eq!((b.lhs, b.satisfied), (-1.0, true));

        let (a, b) = bell_pair_17(0.0, 0.0, 0.0);
        assert!(a.satisfied && b.satisfied);
    }

    #[test]
    fn second_single_device_form_matches_two_device_form() {
        // local covariances are +a·b; conservation of spin turns them into
        // the two-device covariances −a·b
        let cfg = BellConfig::from_increments(FRAC_PI_4, FRAC_PI_4);
        let [a, b, c] = cfg.directions();
        let (_, second) = bell_pair_17(a.dot(&b), a.dot(&c), b.dot(&c));
        let two_device =
            bell_1964(&CovarianceTriple::new(-a.dot(&b), -a.dot(&c), -b.dot(&c)).unwrap());
        assert!((second.lhs - two_device.lhs).abs() < 1e-15);
        assert!((second.lhs - SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn qm_bell_lhs_examples() {
        assert!((qm_bell_lhs(FRAC_PI_4, FRAC_PI_2, FRAC_PI_4).unwrap() - SQRT_2).abs() < 1e-12);
        for theta in [0.0, 0.5, 2.0, PI] {
            assert!((qm_bell_lhs(0.0, theta, theta).unwrap() - 1.0).abs() < 1e-15);
        }
        let lhs = qm_bell_lhs(FRAC_PI_3, 2.0 * FRAC_PI_3, FRAC_PI_3).unwrap();
        assert!((lhs - 1.5).abs() < 1e-12);
    }

    #[test]
    fn qm_bell_lhs_rejects_non_coplanar_triples() {
        assert!(matches!(
            qm_bell_lhs(0.1, 2.0, 0.1),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(qm_bell_lhs(-1.0, 0.0, 1.0).is_err());
        assert!(qm_bell_lhs(f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn qm_chsh_lhs_examples() {
        let lhs = qm_chsh_lhs(FRAC_PI_4, 3.0 * FRAC_PI_4, FRAC_PI_4, FRAC_PI_4).unwrap();
        assert!((lhs - 2.0 * SQRT_2).abs() < 1e-12);
        assert!(qm_chsh_lhs(0.1, 0.1, 0.1, 3.0).is_err());
    }

    #[test]
    fn reduction_examples() {
        let cfg = BellConfig::from_increments(FRAC_PI_4, FRAC_PI_4);
        let (c, b) = chsh_to_bell_reduction(&cfg.qm_covariances());
        assert!((c - (1.0 + SQRT_2)).abs() < 1e-12);
        assert!((b - SQRT_2).abs() < 1e-12);

        let (c, b) = chsh_to_bell_reduction(&CovarianceTriple::new(0.0, 0.0, 0.0).unwrap());
        assert_eq!((c, b), (1.0, 0.0));

        let (c, b) = chsh_to_bell_reduction(&CovarianceTriple::new(1.0, -1.0, -1.0).unwrap());
        assert_eq!((c, b), (4.0, 3.0));
    }

    #[test]
    fn local_model_examples() {
        let a = Direction::planar(0.0);
        let b = Direction::planar(1.0);
        let zero = FnLocalModel {
            mean_a: |_: &Direction, _: &Direction| 0.0,
            mean_b: |_: &Direction, _: &Direction| 0.0,
        };
        let mc = Integration::MonteCarlo {
            samples: 1000,
            seed: 1,
        };
        assert_eq!(bell_local_model_covariance(&zero, &a, &b, mc).unwrap(), 0.0);

        let fixed = FnLocalModel {
            mean_a: |_: &Direction, _: &Direction| 1.0,
            mean_b: |_: &Direction, _: &Direction| -1.0,
        };
        assert_eq!(
            bell_local_model_covariance(&fixed, &a, &b, mc).unwrap(),
            -1.0
        );
        let quad = Integration::Quadrature {
            polar: 8,
            azimuthal: 8,
        };
        assert!((bell_local_model_covariance(&fixed, &a, &b, quad).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn sign_model_quadrature_matches_linear_law() {
        let model = FnLocalModel {
            mean_a: |l: &Direction, a: &Direction| l.dot(a).signum(),
            mean_b: |l: &Direction, b: &Direction| -l.dot(b).signum(),
        };
        let a = Direction::planar(0.0);
        for theta in [0.3, FRAC_PI_2, 2.5] {
            let b = Direction::planar(theta);
            let q = Integration::Quadrature {
                polar: 400,
                azimuthal: 800,
            };
            let cov = bell_local_model_covariance(&model, &a, &b, q).unwrap();
            assert!(
                (cov - (-1.0 + 2.0 * theta / PI)).abs() < 0.01,
                "θ={theta}: {cov}"
            );
        }
    }

    #[test]
    fn invalid_model_is_rejected() {
        let bad = FnLocalModel {
            mean_a: |_: &Direction, _: &Direction| 1.5,
            mean_b: |_: &Direction, _: &Direction| 1.0,
        };
        let a = Direction::planar(0.0);
        let mc = Integration::MonteCarlo {
            samples: 10,
            seed: 1,
        };
        assert_eq!(
            bell_local_model_covariance(&bad, &a, &a, mc),
            Err(Error::InvalidModel(1.5))
        );
        let q = Integration::Quadrature {
            polar: 2,
            azimuthal: 2,
        };
        assert!(bell_local_model_covariance(&bad, &a, &a, q).is_err());
        assert!(bell_local_model_covariance(
            &bad,
            &a,
            &a,
            Integration::MonteCarlo {
                samples: 0,
                seed: 1
            }
        )
        .is_err());
    }

    #[test]
    fn scan_examples() {
        let r = violation_scan(InequalityKind::Chsh, PI / 16.0).unwrap();
        assert!(r.max_lhs >= 2.0 * SQRT_2 - 1e-9);
        assert_eq!(r.grid_points, 32 * 32 * 32);
        let r = violation_scan(InequalityKind::Bell, PI / 16.0).unwrap();
        assert!(r.max_lhs >= SQRT_2 - 1e-9);
        let r = violation_scan(InequalityKind::Bell, PI / 32.0).unwrap();
        assert!(r.violating.len() > 1);
        assert!(r.violating.iter().all(|p| p.lhs > 1.0));
    }

    #[test]
    fn scan_argmax_reproduces_max() {
        let r = violation_scan(InequalityKind::Chsh, PI / 8.0).unwrap();
        let cfg = ChshConfig {
            phi_a: 0.0,
            phi_b: r.argmax[0],
            phi_c: r.argmax[1],
            phi_d: r.argmax[2],
        };
        assert_eq!(chsh(&cfg.qm_covariances()).lhs, r.max_lhs);
        assert_eq!(r, violation_scan(InequalityKind::Chsh, PI / 8.0).unwrap());
    }

    #[test]
    fn scan_rejects_bad_resolution() {
        for res in [0.0, -0.1, 1.0, f64::NAN] {
            assert!(violation_scan(InequalityKind::Bell, res).is_err());
        }
        assert!(
            violation_scan(InequalityKind::Chsh, FRAC_PI_4)
                .unwrap()
                .max_lhs
                >= 2.0
        );
    }
}
