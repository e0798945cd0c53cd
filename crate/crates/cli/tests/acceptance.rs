//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Run with `cargo test -p eprkit-cli --test acceptance`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, SQRT_2};
use std::process::Command;
use std::time::Instant;

use eprkit_core::born::singlet_pair_prob;
use eprkit_core::hv::{mixture_pair_dist, simulate, SimMode};
use eprkit_core::inequalities::{
    chsh_to_bell_reduction, qm_bell_lhs, qm_chsh_lhs, CovarianceTriple,
};
use eprkit_core::info::{conditional_entropy, mutual_information};
use eprkit_core::joint::{
    chsh_linear_inequalities, existence_check_3, moments_from_pairs, mu3_interval, qm_triple,
    quad_feasibility, triple_from_moments, ChshCovariances, ExistenceVerdict, PairMoments, Var,
};
use eprkit_core::sampling::{block_rng, uniform_on_sphere, StreamRng};
use eprkit_core::spin::{apply_property_i, local_pair_dist, qm_pair_dist, CELLS};
use eprkit_core::{Direction, PairDist, Spin, Which};
use rand::Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

/// `¼(1 + s·αβ·x)`, written out independently of the library.
fn table_oracle(x: f64, s: f64) -> [f64; 4] {
    CELLS.map(|(alpha, beta)| 0.25 * (1.0 + s * alpha.value() * beta.value() * x))
}

fn max_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn random_pair(rng: &mut StreamRng) -> (Direction, Direction) {
    (uniform_on_sphere(rng), uniform_on_sphere(rng))
}

fn bell_number() -> Check {
    let lhs = qm_bell_lhs(FRAC_PI_4, FRAC_PI_2, FRAC_PI_4).map_err(|e| e.to_string())?;
    let err = (lhs - SQRT_2).abs();
    let msg = format!("lhs = {lhs}, |lhs − √2| = {err:.1e}");
    if err < 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn chsh_number() -> Check {
    let lhs =
        qm_chsh_lhs(FRAC_PI_4, 3.0 * FRAC_PI_4, FRAC_PI_4, FRAC_PI_4).map_err(|e| e.to_string())?;
    let err = (lhs - 2.0 * SQRT_2).abs();
    let msg = format!("lhs = {lhs}, |lhs − 2√2| = {err:.1e}");
    if err < 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn oracle_agreement() -> Check {
    let mut rng = block_rng(3, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (a, b) = random_pair(&mut rng);
        let alpha = if rng.random::<bool>() {
            Spin::Plus
        } else {
            Spin::Minus
        };
        let beta = if rng.random::<bool>() {
            Spin::Plus
        } else {
            Spin::Minus
        };
        let d = qm_pair_dist(&a, &b).entry(alpha, beta) - singlet_pair_prob(&a, &b, alpha, beta);
        worst = worst.max(d.abs());
    }
    let msg = format!("1000 draws, max |Δ| = {worst:.1e}");
    if worst < 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn round_trip() -> Check {
    let mut rng = block_rng(4, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (a, b) = random_pair(&mut rng);
        let x = a.dot(&b);
        let local = local_pair_dist(&a, &b);
        let qm = qm_pair_dist(&a, &b);
        let forward = apply_property_i(&local, Which::Second).probs();
        let back = apply_property_i(&qm, Which::Second).probs();
        worst = worst
            .max(max_diff(&forward, &table_oracle(x, -1.0)))
            .max(max_diff(&back, &table_oracle(x, 1.0)))
            .max(max_diff(&forward, &qm.probs()))
            .max(max_diff(&back, &local.probs()));
    }
    let msg = format!("1000 pairs, max |Δ| = {worst:.1e}");
    if worst < 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn hidden_variable_model() -> Check {
    let (a, b) = (Direction::planar(0.0), Direction::planar(FRAC_PI_3));
    let r = simulate(&a, &b, 1_000_000, 42, SimMode::Singlet).map_err(|e| e.to_string())?;
    let empirical: [f64; 4] = r.empirical.into();
    let dev = max_diff(&empirical, &table_oracle(FRAC_PI_3.cos(), -1.0));

    let mut rng = block_rng(5, 0);
    let mut mix_err: f64 = 0.0;
    for _ in 0..1000 {
        let (a, b) = random_pair(&mut rng);
        mix_err = mix_err.max(max_diff(
            &mixture_pair_dist(&a, &b),
            &table_oracle(a.dot(&b), 1.0),
        ));
    }
    let msg =
        format!("max_abs_dev = {dev:.2e} (< 5e-3), mixture max |Δ| = {mix_err:.1e} (< 1e-12)");
    if dev < 0.005 && mix_err < 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn table2() -> Check {
    let t = |p, l| PairDist::new(p, l).map_err(|e| e.to_string());
    let ab = t([0.5, 0.0, 0.0, 0.5], ['A', 'B'])?;
    let bc = t([0.0, 0.5, 0.5, 0.0], ['B', 'C'])?;
    let ca = t([0.5, 0.0, 0.0, 0.5], ['C', 'A'])?;
    let m = moments_from_pairs(&ab, &bc, &ca)
        .map_err(|e| e.to_string())?
        .moments;
    let report = existence_check_3(&m, true).map_err(|e| e.to_string())?;
    let interval = mu3_interval(&m);
    let mut worst_entry = f64::NEG_INFINITY;
    let mut formula_err: f64 = 0.0;
    for k in 0..=200 {
        let mu3 = -1.0 + 0.01 * k as f64;
        let e = triple_from_moments(&m.with_mu3(mu3)).entry(Spin::Minus, Spin::Plus, Spin::Plus);
        worst_entry = worst_entry.max(e);
        formula_err = formula_err.max((e - (-2.0 - mu3) / 8.0).abs());
    }
    let ok = m.m_ab == 1.0
        && m.m_ca == 1.0
        && m.m_bc == -1.0
        && report.plus_form.lhs == 3.0
        && !report.plus_form.satisfied
        && interval.empty
        && formula_err < 1e-15
        && worst_entry <= -0.125 + 1e-15;
    let msg = format!(
        "⟨AB⟩={} ⟨BC⟩={} ⟨CA⟩={}, lhs={} , interval empty={}, max q(−,+,+)={worst_entry}",
        m.m_ab, m.m_bc, m.m_ca, report.plus_form.lhs, interval.empty
    );
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn existence_theorem() -> Check {
    let mut rng = block_rng(7, 0);
    let mut disagreements = 0;
    let mut exists = 0;
    for _ in 0..10_000 {
        let c: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        let m = PairMoments::symmetric(c[0], c[1], c[2]).map_err(|e| e.to_string())?;
        let verdict = existence_check_3(&m, true)
            .map_err(|e| e.to_string())?
            .verdict
            == ExistenceVerdict::Exists;
        let interval = !mu3_interval(&m).empty;
        // brute force: eight entries written out, μ₃ stepped by 1e-3
        let grid = (0..=2000).any(|k| {
            let mu3 = -1.0 + 1e-3 * k as f64;
            CELLS.iter().all(|&(alpha, beta)| {
                Spin::ALL.iter().all(|&delta| {
                    let (x, y, z) = (alpha.value(), beta.value(), delta.value());
                    let q =
                        (1.0 + x * y * c[0] + y * z * c[1] + z * x * c[2] + x * y * z * mu3) / 8.0;
                    q >= -1e-9
                })
            })
        });
        if verdict != interval || verdict != grid {
            disagreements += 1;
        }
        exists += verdict as usize;
    }
    let msg = format!("10000 triples, {exists} exist, {disagreements} disagreements");
    if disagreements == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn triple_marginals() -> Check {
    let mut rng = block_rng(8, 0);
    let mut worst: f64 = 0.0;
    let mut negative = 0;
    for _ in 0..1000 {
        let [a, b, c] = std::array::from_fn(|_| uniform_on_sphere(&mut rng));
        let t = qm_triple(&a, &b, &c);
        negative += !t.is_valid() as usize;
        for (drop, (x, y)) in [(Var::C, (&a, &b)), (Var::A, (&b, &c)), (Var::B, (&a, &c))] {
            worst = worst.max(max_diff(
                &t.marginal_pair(drop),
                &table_oracle(x.dot(y), 1.0),
            ));
        }
    }
    let msg = format!("1000 triples ({negative} with negative entries), max |Δ| = {worst:.1e}");
    if worst < 1e-12 && negative > 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn fine_consistency() -> Check {
    let mut rng = block_rng(9, 0);
    let mut disagreements = 0;
    let mut bad_witness = 0;
    let mut feasible = 0;
    for _ in 0..1000 {
        let c: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        let tables: Vec<PairDist> = c
            .iter()
            .zip([['A', 'B'], ['A', 'C'], ['D', 'B'], ['D', 'C']])
            .map(|(&x, l)| PairDist::new(table_oracle(x, 1.0), l).unwrap())
            .collect();
        let r = match quad_feasibility(&tables[0], &tables[1], &tables[2], &tables[3]) {
            Ok(r) => r,
            Err(_) => {
                disagreements += 1;
                continue;
            }
        };
        let cov = ChshCovariances {
            c_ab: c[0],
            c_ac: c[1],
            c_db: c[2],
            c_dc: c[3],
        };
        let all_hold = chsh_linear_inequalities(&cov).iter().all(|v| v.satisfied);
        if r.feasible != all_hold {
            disagreements += 1;
        }
        if r.feasible {
            feasible += 1;
            let ok = r.witness.is_some_and(|w| {
                w.entries().iter().all(|&v| v >= -1e-9)
                    && [
                        (Var::A, Var::B),
                        (Var::A, Var::C),
                        (Var::D, Var::B),
                        (Var::D, Var::C),
                    ]
                    .iter()
                    .zip(&tables)
                    .all(|(&(x, y), t)| max_diff(&w.pair_table(x, y), &t.probs()) < 1e-9)
            });
            bad_witness += !ok as usize;
        }
    }
    let msg = format!("1000 quadruples, {feasible} feasible, {disagreements} disagreements, {bad_witness} bad witnesses");
    if disagreements == 0 && bad_witness == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn info_endpoints() -> Check {
    let mi: Vec<f64> = [-1.0, 0.0, 1.0]
        .iter()
        .map(|&x| mutual_information(&PairDist::local_from_dot(x)))
        .collect();
    let a = Direction::planar(0.0);
    let h: Vec<f64> = [0.0, FRAC_PI_2, std::f64::consts::PI]
        .iter()
        .map(|&t| conditional_entropy(&a, &Direction::planar(t)))
        .collect();
    let err = max_diff(&mi, &[1.0, 0.0, 1.0]).max(max_diff(&h, &[0.0, 1.0, 0.0]));
    let msg = format!("I = {mi:?}, H = {h:?}");
    if err < 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn reduction_identity() -> Check {
    // covariances on the grid k/2²⁰: every intermediate sum is exact
    let mut rng = block_rng(11, 0);
    let scale = (1u64 << 20) as f64;
    let mut inexact = 0;
    for _ in 0..10_000 {
        let c: [f64; 3] =
            std::array::from_fn(|_| rng.random_range(-(1i64 << 20)..=(1i64 << 20)) as f64 / scale);
        let t = CovarianceTriple::new(c[0], c[1], c[2]).map_err(|e| e.to_string())?;
        let (chsh, bell) = chsh_to_bell_reduction(&t);
        if chsh != bell + 1.0 {
            inexact += 1;
        }
    }
    // arbitrary doubles: the two sides may round differently by an ulp
    let mut rounding: f64 = 0.0;
    for _ in 0..10_000 {
        let c: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        let t = CovarianceTriple::new(c[0], c[1], c[2]).map_err(|e| e.to_string())?;
        let (chsh, bell) = chsh_to_bell_reduction(&t);
        rounding = rounding.max((chsh - (bell + 1.0)).abs());
    }
    let msg = format!(
        "10000 grid triples, {inexact} inexact; 10000 arbitrary triples, max |Δ| = {rounding:.1e}"
    );
    if inexact == 0 && rounding <= 4.0 * f64::EPSILON {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn determinism() -> Check {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_eprkit"))
            .args([
                "simulate",
                "--theta",
                "60",
                "-n",
                "1000000",
                "--seed",
                "42",
                "--mode",
                "singlet",
                "--threads",
            ])
            .arg(threads)
            .output()
            .map_err(|e| e.to_string())
    };
    let one = run("1")?;
    let eight = run("8")?;
    if !one.status.success() || !eight.status.success() {
        return Err("simulate exited with an error".into());
    }
    let msg = format!("{} bytes, threads 1 vs 8", one.stdout.len());
    if one.stdout == eight.stdout && !one.stdout.is_empty() {
        Ok(msg)
    } else {
        Err(msg + ": outputs differ")
    }
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("Bell violation number", bell_number),
        ("CHSH violation number", chsh_number),
        ("oracle agreement", oracle_agreement),
        ("sign-flip round trip", round_trip),
        (
            "hidden-variable model reproduces singlet table",
            hidden_variable_model,
        ),
        ("three-table counterexample", table2),
        ("third-order existence property suite", existence_theorem),
        ("third-order marginalization", triple_marginals),
        ("fourth-order feasibility consistency", fine_consistency),
        ("information endpoints", info_endpoints),
        ("reduction identity", reduction_identity),
        ("determinism across thread counts", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2}. {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2}. {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
