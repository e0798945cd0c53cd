use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use eprkit_core::hv::{simulate_with_threads, SimMode, SimReport};
use eprkit_core::inequalities::{
    bell_1964, chsh, qm_bell_lhs, qm_chsh_lhs, violation_scan, BellConfig, ChshConfig,
    CovarianceQuad, CovarianceTriple, InequalityKind, InequalityVerdict,
};
use eprkit_core::info::info_curve;
use eprkit_core::joint::{
    cell_spins, default_mu3, existence_check_3, moments_from_pairs, mu3_interval, qm_triple,
    quad_feasibility, triple_from_moments, ChshCovariances, ExistenceReport, Mu3Interval,
    NamedVerdict, PairMoments, TripleDist,
};
use eprkit_core::spin::{local_pair_dist, qm_pair_dist, Cells};
use eprkit_core::verify::run_checks;
use eprkit_core::{Direction, PairDist};
use serde::{Deserialize, Serialize};

use crate::args::{
    DistArgs, Format, GeometryArgs, IneqArgs, InequalityArg, InfoArgs, Joint3Args, Joint4Args,
    ModeArg, ScanArgs, SimulateArgs, VerifyArgs,
};
use crate::error::{CliError, CliResult};

pub struct Context {
    pub format: Option<Format>,
    pub radians: bool,
}

impl Context {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn angle(&self, value: f64) -> CliResult<f64> {
        if !value.is_finite() {
            return Err(CliError::Usage(format!("angle {value} is not finite")));
        }
        Ok(if self.radians {
            value
        } else {
            value.to_radians()
        })
    }

    fn angles(&self, values: &[f64]) -> CliResult<Vec<f64>> {
        values.iter().map(|&v| self.angle(v)).collect()
    }
}

/// Rendered output plus an optional failure to report after printing it.
pub struct Outcome {
    pub text: String,
    pub failure: Option<CliError>,
}

impl From<String> for Outcome {
    fn from(text: String) -> Self {
        Self {
            text,
            failure: None,
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

fn parse_direction(name: &str, v: &[f64]) -> CliResult<Direction> {
    match v {
        [x, y, z] => {
            Direction::normalized(*x, *y, *z).map_err(|e| CliError::Usage(format!("--{name}: {e}")))
        }
        _ => Err(CliError::Usage(format!(
            "--{name} needs three components x,y,z, got {}",
            v.len()
        ))),
    }
}

fn pair_geometry(ctx: &Context, g: &GeometryArgs) -> CliResult<(Direction, Direction)> {
    match (g.theta, &g.a, &g.b) {
        (Some(theta), _, _) => Ok((Direction::planar(0.0), Direction::planar(ctx.angle(theta)?))),
        (None, Some(a), Some(b)) => Ok((parse_direction("a", a)?, parse_direction("b", b)?)),
        _ => Err(CliError::Usage("give --theta or both --a and --b".into())),
    }
}

/// Same spelling as the JSON output; non-finite values print as `inf`/`nan`.
fn num(x: f64) -> String {
    match serde_json::Number::from_f64(x) {
        Some(n) => n.to_string(),
        None => x.to_string(),
    }
}

fn cells_csv(c: &Cells) -> String {
    format!("{},{},{},{}", num(c.pp), num(c.pm), num(c.mp), num(c.mm))
}

#[derive(Serialize)]
struct DistOutput {
    kind: &'static str,
    theta_rad: f64,
    a: [f64; 3],
    b: [f64; 3],
    table: Cells,
    covariance: f64,
}

pub fn dist(ctx: &Context, args: &DistArgs) -> CliResult<Outcome> {
    let (a, b) = pair_geometry(ctx, &args.geometry)?;
    let (kind, table) = if args.local {
        ("local", local_pair_dist(&a, &b))
    } else {
        ("pair", qm_pair_dist(&a, &b))
    };
    let out = DistOutput {
        kind,
        theta_rad: a.angle_to(&b),
        a: a.components(),
        b: b.components(),
        table: table.cells(),
        covariance: table.covariance(),
    };
    Ok(match ctx.format_or(Format::Json) {
        Format::Json => to_json(&out),
        Format::Csv => format!(
            "kind,theta_rad,pp,pm,mp,mm,covariance\n{},{},{},{}\n",
            out.kind,
            num(out.theta_rad),
            cells_csv(&out.table),
            num(out.covariance)
        ),
    }
    .into())
}

#[derive(Serialize)]
struct IneqOutput {
    inequality: &'static str,
    covariances: BTreeMap<&'static str, f64>,
    lhs: f64,
    bound: f64,
    satisfied: bool,
}

fn bell_covariances(ctx: &Context, args: &IneqArgs) -> CliResult<(CovarianceTriple, Option<f64>)> {
    if let Some(cov) = &args.cov {
        let [c_ab, c_ac, c_bc] = cov[..] else {
            return Err(CliError::Usage(format!(
                "bell --cov needs c_ab,c_ac,c_bc, got {} values",
                cov.len()
            )));
        };
        return Ok((
            CovarianceTriple::new(c_ab, c_ac, c_bc).map_err(CliError::usage)?,
            None,
        ));
    }
    let angles = ctx.angles(args.angles.as_deref().unwrap_or_default())?;
    match angles[..] {
        [theta_ab, theta_bc] => Ok((
            BellConfig::from_increments(theta_ab, theta_bc).qm_covariances(),
            None,
        )),
        [theta_ab, theta_ac, theta_bc] => {
            let lhs = qm_bell_lhs(theta_ab, theta_ac, theta_bc).map_err(CliError::usage)?;
            let t = CovarianceTriple::new(-theta_ab.cos(), -theta_ac.cos(), -theta_bc.cos())
                .map_err(CliError::usage)?;
            Ok((t, Some(lhs)))
        }
        _ => Err(CliError::Usage(
            "bell needs --angles θab,θbc or θab,θac,θbc, or --cov c_ab,c_ac,c_bc".into(),
        )),
    }
}

fn chsh_covariances(ctx: &Context, args: &IneqArgs) -> CliResult<(CovarianceQuad, Option<f64>)> {
    if let Some(cov) = &args.cov {
        let [c_ab, c_ac, c_db, c_dc] = cov[..] else {
            return Err(CliError::Usage(format!(
                "chsh --cov needs c_ab,c_ac,c_db,c_dc, got {} values",
                cov.len()
            )));
        };
        return Ok((
            CovarianceQuad::new(c_ab, c_ac, c_db, c_dc).map_err(CliError::usage)?,
            None,
        ));
    }
    let angles = ctx.angles(args.angles.as_deref().unwrap_or_default())?;
    match angles[..] {
        [theta_ab, theta_db, theta_dc] => Ok((
            ChshConfig::from_increments(theta_ab, theta_db, theta_dc).qm_covariances(),
            None,
        )),
        [theta_ab, theta_ac, theta_db, theta_dc] => {
            let lhs =
                qm_chsh_lhs(theta_ab, theta_ac, theta_db, theta_dc).map_err(CliError::usage)?;
            let q = CovarianceQuad::new(
                -theta_ab.cos(),
                -theta_ac.cos(),
                -theta_db.cos(),
                -theta_dc.cos(),
            )
            .map_err(CliError::usage)?;
            Ok((q, Some(lhs)))
        }
        _ => Err(CliError::Usage(
            "chsh needs --angles θab,θdb,θdc or θab,θac,θdb,θdc, or --cov c_ab,c_ac,c_db,c_dc"
                .into(),
        )),
    }
}

pub fn ineq(ctx: &Context, args: &IneqArgs) -> CliResult<Outcome> {
    let (name, covariances, verdict) = match args.inequality {
        InequalityArg::Bell => {
            let (t, qm_lhs) = bell_covariances(ctx, args)?;
            let mut v = bell_1964(&t);
            if let Some(lhs) = qm_lhs {
                v = InequalityVerdict::new(lhs, v.bound);
            }
            let cov = BTreeMap::from([("c_ab", t.c_ab), ("c_ac", t.c_ac), ("c_bc", t.c_bc)]);
            ("bell", cov, v)
        }
        InequalityArg::Chsh => {
            let (q, qm_lhs) = chsh_covariances(ctx, args)?;
            let mut v = chsh(&q);
            if let Some(lhs) = qm_lhs {
                v = InequalityVerdict::new(lhs, v.bound);
            }
            let cov = BTreeMap::from([
                ("c_ab", q.c_ab),
                ("c_ac", q.c_ac),
                ("c_db", q.c_db),
                ("c_dc", q.c_dc),
            ]);
            ("chsh", cov, v)
        }
    };
    let out = IneqOutput {
        inequality: name,
        covariances,
        lhs: verdict.lhs,
        bound: verdict.bound,
        satisfied: verdict.satisfied,
    };
    Ok(match ctx.format_or(Format::Json) {
        Format::Json => to_json(&out),
        Format::Csv => format!(
            "inequality,lhs,bound,satisfied\n{},{},{},{}\n",
            out.inequality,
            num(out.lhs),
            num(out.bound),
            out.satisfied
        ),
    }
    .into())
}

#[derive(Serialize)]
struct ScanRow {
    angles_deg: Vec<f64>,
    lhs: f64,
}

#[derive(Serialize)]
struct ScanOutput {
    inequality: &'static str,
    resolution_deg: f64,
    bound: f64,
    grid_points: usize,
    max_lhs: f64,
    argmax_deg: Vec<f64>,
    violating_count: usize,
    violating: Vec<ScanRow>,
}

pub fn scan(ctx: &Context, args: &ScanArgs) -> CliResult<Outcome> {
    let res_deg = args.resolution_deg;
    if !(res_deg.is_finite() && res_deg > 0.0 && res_deg <= 45.0) {
        return Err(CliError::Usage(format!(
            "--resolution-deg must lie in (0, 45], got {res_deg}"
        )));
    }
    let (kind, name) = match args.inequality {
        InequalityArg::Bell => (InequalityKind::Bell, "bell"),
        InequalityArg::Chsh => (InequalityKind::Chsh, "chsh"),
    };
    let res_rad = res_deg.to_radians();
    let r = violation_scan(kind, res_rad).map_err(CliError::usage)?;
    // grid angles are k·resolution; report them as k·resolution_deg
    let to_deg = |angles: &[f64]| -> Vec<f64> {
        angles
            .iter()
            .map(|x| (x / res_rad).round() * res_deg)
            .collect()
    };
    let out = ScanOutput {
        inequality: name,
        resolution_deg: res_deg,
        bound: kind.bound(),
        grid_points: r.grid_points,
        max_lhs: r.max_lhs,
        argmax_deg: to_deg(&r.argmax),
        violating_count: r.violating.len(),
        violating: r
            .violating
            .iter()
            .map(|p| ScanRow {
                angles_deg: to_deg(&p.angles),
                lhs: p.lhs,
            })
            .collect(),
    };
    Ok(match ctx.format_or(Format::Csv) {
        Format::Json => to_json(&out),
        Format::Csv => {
            let mut s = match kind {
                InequalityKind::Bell => "row,phi_b_deg,phi_c_deg,lhs\n".to_string(),
                InequalityKind::Chsh => "row,phi_b_deg,phi_c_deg,phi_d_deg,lhs\n".to_string(),
            };
            let mut line = |label: &str, angles: &[f64], lhs: f64| {
                let cols: Vec<String> = angles.iter().map(|&x| num(x)).collect();
                let _ = writeln!(s, "{label},{},{}", cols.join(","), num(lhs));
            };
            for row in &out.violating {
                line("violation", &row.angles_deg, row.lhs);
            }
            line("max", &out.argmax_deg, out.max_lhs);
            s
        }
    }
    .into())
}

/// `{"pairs": {"AB": {"pp": .., "pm": .., "mp": .., "mm": ..}, ...}}`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairFile {
    pairs: BTreeMap<String, Cells>,
}

fn load_pairs<const N: usize>(path: &Path, keys: [&str; N]) -> CliResult<[PairDist; N]> {
    let shown = path.display();
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {shown}: {e}")))?;
    let file: PairFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("malformed pair file {shown}: {e}")))?;
    if let Some(extra) = file.pairs.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(CliError::Data(format!(
            "{shown}: unexpected table {extra}; expected {}",
            keys.join(", ")
        )));
    }
    let mut out = Vec::with_capacity(N);
    for key in keys {
        let cells = file
            .pairs
            .get(key)
            .ok_or_else(|| CliError::Data(format!("{shown}: missing table {key}")))?;
        let mut chars = key.chars();
        let labels = [chars.next().unwrap(), chars.next().unwrap()];
        out.push(
            PairDist::from_cells(*cells, labels)
                .map_err(|e| CliError::Data(format!("{shown}: {e}")))?,
        );
    }
    Ok(out
        .try_into()
        .unwrap_or_else(|_| unreachable!("one table per key")))
}

fn spin_value(bit: eprkit_core::Spin) -> i8 {
    bit.value() as i8
}

#[derive(Serialize)]
struct TripleEntry {
    a: i8,
    b: i8,
    c: i8,
    p: f64,
    negative: bool,
}

#[derive(Serialize)]
struct Joint3Output {
    source: &'static str,
    moments: PairMoments,
    mu3: f64,
    mu3_interval: Mu3Interval,
    valid: bool,
    entries: Vec<TripleEntry>,
    existence: ExistenceReport,
}

fn triple_entries(t: &TripleDist) -> Vec<TripleEntry> {
    t.entries()
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let s = cell_spins(i, 3);
            TripleEntry {
                a: spin_value(s[0]),
                b: spin_value(s[1]),
                c: spin_value(s[2]),
                p,
                negative: t.negative_entries().iter().any(|&(j, _)| j == i),
            }
        })
        .collect()
}

pub fn joint3(ctx: &Context, args: &Joint3Args) -> CliResult<Outcome> {
    let (source, moments, mu3, table) = if args.qm {
        let [a, b, c] = match (&args.angles, &args.a, &args.b, &args.c) {
            (Some(angles), _, _, _) => match ctx.angles(angles)?[..] {
                [theta_ab, theta_bc] => {
                    BellConfig::from_increments(theta_ab, theta_bc).directions()
                }
                _ => return Err(CliError::Usage("--angles needs θab,θbc".into())),
            },
            (None, Some(a), Some(b), Some(c)) => [
                parse_direction("a", a)?,
                parse_direction("b", b)?,
                parse_direction("c", c)?,
            ],
            _ => {
                return Err(CliError::Usage(
                    "--qm needs --angles or all of --a, --b, --c".into(),
                ))
            }
        };
        let m = PairMoments::symmetric(a.dot(&b), b.dot(&c), c.dot(&a)).map_err(CliError::usage)?;
        ("qm", m, 0.0, qm_triple(&a, &b, &c))
    } else if let Some(path) = &args.pairs {
        let [ab, bc, ca] = load_pairs(path, ["AB", "BC", "CA"])?;
        let m = moments_from_pairs(&ab, &bc, &ca)
            .map_err(CliError::data)?
            .moments;
        let mu3 = match args.mu3 {
            Some(v) if !(v.is_finite() && v.abs() <= 1.0) => {
                return Err(CliError::Usage(format!(
                    "--mu3 must lie in [-1, 1], got {v}"
                )))
            }
            Some(v) => v,
            None => default_mu3(&m),
        };
        ("pairs", m, mu3, triple_from_moments(&m.with_mu3(mu3)))
    } else {
        return Err(CliError::Usage("joint3 needs --qm or --pairs".into()));
    };
    let existence =
        existence_check_3(&moments, moments.has_zero_first_moments()).map_err(CliError::data)?;
    let out = Joint3Output {
        source,
        moments,
        mu3,
        mu3_interval: mu3_interval(&moments),
        valid: table.is_valid(),
        entries: triple_entries(&table),
        existence,
    };
    Ok(match ctx.format_or(Format::Json) {
        Format::Json => to_json(&out),
        Format::Csv => {
            let mut s = "a,b,c,p,negative\n".to_string();
            for e in &out.entries {
                let _ = writeln!(s, "{},{},{},{},{}", e.a, e.b, e.c, num(e.p), e.negative);
            }
            s
        }
    }
    .into())
}

#[derive(Serialize)]
struct QuadEntry {
    a: i8,
    b: i8,
    c: i8,
    d: i8,
    p: f64,
}

#[derive(Serialize)]
struct Joint4Output {
    feasible: bool,
    covariances: ChshCovariances,
    forms: Vec<NamedVerdict>,
    certificate: Option<NamedVerdict>,
    lp_residual: f64,
    witness: Option<Vec<QuadEntry>>,
}

pub fn joint4(ctx: &Context, args: &Joint4Args) -> CliResult<Outcome> {
    let [ab, ac, db, dc] = load_pairs(&args.pairs, ["AB", "AC", "DB", "DC"])?;
    let r = quad_feasibility(&ab, &ac, &db, &dc).map_err(CliError::data)?;
    let witness = r.witness.map(|w| {
        w.entries()
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let s = cell_spins(i, 4);
                QuadEntry {
                    a: spin_value(s[0]),
                    b: spin_value(s[1]),
                    c: spin_value(s[2]),
                    d: spin_value(s[3]),
                    p,
                }
            })
            .collect()
    });
    let out = Joint4Output {
        feasible: r.feasible,
        covariances: r.covariances,
        forms: r.forms.to_vec(),
        certificate: r.certificate,
        lp_residual: r.lp_residual,
        witness,
    };
    Ok(match ctx.format_or(Format::Json) {
        Format::Json => to_json(&out),
        Format::Csv => {
            let mut s = "form,lhs,bound,satisfied\n".to_string();
            for f in &out.forms {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    f.name,
                    num(f.verdict.lhs),
                    num(f.verdict.bound),
                    f.verdict.satisfied
                );
            }
            s
        }
    }
    .into())
}

pub fn simulate(ctx: &Context, args: &SimulateArgs) -> CliResult<Outcome> {
    let (a, b) = pair_geometry(ctx, &args.geometry)?;
    if args.n == 0 {
        return Err(CliError::Usage("-n must be at least 1".into()));
    }
    if args.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let mode = match args.mode {
        ModeArg::Local => SimMode::Local,
        ModeArg::Singlet => SimMode::Singlet,
    };
    let r: SimReport = simulate_with_threads(&a, &b, args.n, args.seed, mode, args.threads)
        .map_err(CliError::usage)?;
    Ok(match ctx.format_or(Format::Json) {
        Format::Json => to_json(&r),
        Format::Csv => format!(
            "n,seed,theta_ab_rad,mode,emp_pp,emp_pm,emp_mp,emp_mm,theo_pp,theo_pm,theo_mp,theo_mm,max_abs_dev,chi_square\n\
             {},{},{},{},{},{},{},{}\n",
            r.n_samples,
            r.seed,
            num(r.theta_ab_rad),
            r.mode.as_str(),
            cells_csv(&r.empirical),
            cells_csv(&r.theoretical),
            num(r.max_abs_dev),
            num(r.chi_square)
        ),
    }
    .into())
}

pub fn info(ctx: &Context, args: &InfoArgs) -> CliResult<Outcome> {
    let curve = info_curve(args.step).map_err(CliError::usage)?;
    Ok(match ctx.format_or(Format::Csv) {
        Format::Json => to_json(&curve),
        Format::Csv => {
            let mut s = "x,mi_bits,cond_entropy_bits\n".to_string();
            for p in &curve {
                let _ = writeln!(
                    s,
                    "{},{},{}",
                    num(p.x),
                    num(p.mutual_information_bits),
                    num(p.conditional_entropy_bits)
                );
            }
            s
        }
    }
    .into())
}

pub fn verify(ctx: &Context, args: &VerifyArgs) -> CliResult<Outcome> {
    let report = run_checks(args.trials, args.seed).map_err(CliError::usage)?;
    let text = match ctx.format_or(Format::Json) {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = "check,subject,passed,max_error,tolerance\n".to_string();
            for c in &report.checks {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    c.check,
                    c.subject,
                    c.passed,
                    num(c.max_error),
                    num(c.tolerance)
                );
            }
            s
        }
    };
    let failure = report.first_failure().map(|c| {
        CliError::CheckFailed(format!(
            "{} check on {}: max error {} exceeds {}",
            c.check, c.subject, c.max_error, c.tolerance
        ))
    });
    Ok(Outcome { text, failure })
}
