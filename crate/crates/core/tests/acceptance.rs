//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p afalab --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use afalab::automata::{values_up_to, Afa, Automaton, MatrixAutomaton, Pfa};
use afalab::linalg::Matrix;
use afalab::scalar::{Scalar, ScalarMode};
use afalab::transforms::{amplify, mcqfa_to_afa, pfa_to_afa, qfa_to_afa};
use afalab::unary::{curated_params, random_params, run_sweep};
use afalab::zoo::{count_afa, interval_afa, mod2k_mcqfa, mod4k_afa, rotation_mcqfa, DEFAULT_SEED};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

const Q: ScalarMode = ScalarMode::Rational;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: u64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit as f64, || {
        format!("took {:.1}s, limit {limit}s", elapsed.as_secs_f64())
    })
}

fn r(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

fn cmp(a: &Scalar, b: &Scalar) -> std::cmp::Ordering {
    a.cmp_tol(b, 0.0)
}

fn rows(m: &[&[(i64, i64)]]) -> Matrix {
    Matrix::from_rows(Q, m.iter().map(|row| row.iter().map(|&(n, d)| r(n, d)).collect()).collect()).unwrap()
}

fn pfa(n: usize, a: Matrix, b: Matrix, accept: &[usize]) -> Pfa {
    let id = Matrix::identity(Q, n);
    let t = afalab::automata::Transitions::new(id.clone(), [('a', a), ('b', b)].into_iter().collect(), id);
    Pfa::new(MatrixAutomaton::new(binary(), t, 0, accept.iter().copied()).unwrap()).unwrap()
}

fn hand_built_pfas() -> Vec<Pfa> {
    let halving = rows(&[&[(1, 2), (0, 1)], &[(1, 2), (1, 1)]]);
    let swap = rows(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
    let a3 = rows(&[
        &[(1, 2), (1, 4), (0, 1)],
        &[(1, 2), (1, 2), (1, 3)],
        &[(0, 1), (1, 4), (2, 3)],
    ]);
    let b3 = rows(&[&[(0, 1), (0, 1), (1, 1)], &[(1, 1), (0, 1), (0, 1)], &[(0, 1), (1, 1), (0, 1)]]);
    let a4 = rows(&[
        &[(1, 2), (0, 1), (0, 1), (1, 4)],
        &[(1, 2), (1, 2), (0, 1), (1, 4)],
        &[(0, 1), (1, 2), (1, 2), (1, 4)],
        &[(0, 1), (0, 1), (1, 2), (1, 4)],
    ]);
    let b4 = rows(&[
        &[(0, 1), (1, 1), (0, 1), (0, 1)],
        &[(1, 1), (0, 1), (0, 1), (0, 1)],
        &[(0, 1), (0, 1), (1, 3), (1, 2)],
        &[(0, 1), (0, 1), (2, 3), (1, 2)],
    ]);
    vec![
        pfa(2, halving, swap, &[0]),
        pfa(3, a3, b3, &[0, 1]),
        pfa(4, a4, b4, &[1, 2]),
    ]
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (half, third) = (r(1, 2), r(1, 3));
    let mut words = 0;
    let mut ties = 0;
    for p in hand_built_pfas() {
        let image = pfa_to_afa(&p).map_err(|e| e.to_string())?;
        check(image.states() == p.states() + 1, || "image is not (n+1)-state".into())?;
        let fp = values_up_to(&p, 10).map_err(|e| e.to_string())?;
        let fa = values_up_to(&image, 10).map_err(|e| e.to_string())?;
        for ((w, f), (_, g)) in fp.iter().zip(&fa) {
            words += 1;
            check(cmp(f, &half).is_gt() == cmp(g, &half).is_gt(), || {
                format!("{}-state PFA, word {w:?}: f_P = {f}, f_AfA = {g}", p.states())
            })?;
            if cmp(f, &half).is_eq() {
                ties += 1;
                check(g.is_zero(), || format!("word {w:?} has f_P = 1/2 but f_AfA = {g}"))?;
            } else {
                check(cmp(g, &third).is_ge(), || format!("word {w:?}: f_AfA = {g} < 1/3"))?;
            }
        }
    }
    within(start.elapsed(), 10)?;
    Ok(format!("{words} words over 3 PFAs, {ties} with f_P = 1/2, {:.2}s", start.elapsed().as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let m = rotation_mcqfa(
        &BigRational::new(3.into(), 5.into()),
        &BigRational::new(4.into(), 5.into()),
        0,
    )
    .map_err(|e| e.to_string())?;
    let image = mcqfa_to_afa(&m).map_err(|e| e.to_string())?;
    check(image.states() == 5, || format!("image has {} states", image.states()))?;
    let fm = m.machine_values(50)?;
    let fa = image.machine_values(50)?;
    for (j, (x, y)) in fm.iter().zip(&fa).enumerate() {
        check(x == y, || format!("a^{j}: MCQFA {x}, AfA {y}"))?;
    }
    Ok(format!("a^0..a^50 equal exactly, f(a^1) = {}", fa[1]))
}

trait UnaryRun {
    fn machine_values(&self, max_len: usize) -> Result<Vec<Scalar>, String>;
}

impl<A: Automaton> UnaryRun for A {
    fn machine_values(&self, max_len: usize) -> Result<Vec<Scalar>, String> {
        afalab::automata::unary_values(self, 'a', max_len).map_err(|e| e.to_string())
    }
}

fn criterion_3() -> Outcome {
    let ab = binary();
    let mut worst = 0f64;
    for seed in 1..=3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED ^ seed);
        let q = random_qfa(&mut rng, 2, &ab);
        let image = qfa_to_afa(&q).map_err(|e| e.to_string())?;
        check(image.states() == 5, || format!("image has {} states", image.states()))?;
        let fq = values_up_to(&q, 6).map_err(|e| e.to_string())?;
        let fa = values_up_to(&image, 6).map_err(|e| e.to_string())?;
        for ((w, x), (_, y)) in fq.iter().zip(&fa) {
            let d = (x.to_f64() - y.to_f64()).abs();
            worst = worst.max(d);
            check(d <= 1e-9, || format!("seed {seed}, word {w:?}: QFA {x}, AfA {y}"))?;
        }
    }
    Ok(format!("3 QFAs x 127 words, max |diff| = {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let f = count_afa(7).map_err(|e| e.to_string())?.machine_values(25)?;
    check(f[7] == r(1, 1), || format!("f(a^7) = {}", f[7]))?;
    check(f[6] == r(2, 3), || format!("f(a^6) = {}", f[6]))?;
    check(f[8] == r(1, 2), || format!("f(a^8) = {}", f[8]))?;
    let (j, max) = f
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != 7)
        .max_by(|a, b| cmp(a.1, b.1))
        .expect("non-empty");
    check(cmp(max, &r(2, 3)).is_le(), || format!("f(a^{j}) = {max} > 2/3"))?;
    Ok(format!("f(a^7) = 1/1, max off-target f(a^{j}) = {max}"))
}

fn criterion_5() -> Outcome {
    let base = pfa_to_afa(&hand_built_pfas()[0]).map_err(|e| e.to_string())?;
    let amp = amplify(&base, 4).map_err(|e| e.to_string())?;
    let one = Scalar::one(Q);
    let floor = r(65, 81);
    let f1 = values_up_to(&base, 6).map_err(|e| e.to_string())?;
    let f4 = values_up_to(&amp, 6).map_err(|e| e.to_string())?;
    let mut zeros = 0;
    let mut min_nonzero: Option<Scalar> = None;
    for ((w, x), (_, y)) in f1.iter().zip(&f4) {
        let want = &one - &(&one - x).powi(4);
        check(&want == y, || format!("word {w:?}: f_1 = {x}, f_amp = {y}, want {want}"))?;
        if x.is_zero() {
            zeros += 1;
            check(y.is_zero(), || format!("word {w:?} lost its zero"))?;
        } else {
            check(cmp(y, &floor).is_ge(), || format!("word {w:?}: f_amp = {y} < 65/81"))?;
            if min_nonzero.as_ref().is_none_or(|m| cmp(y, m).is_lt()) {
                min_nonzero = Some(y.clone());
            }
        }
    }
    Ok(format!(
        "{} states, {} words ({zeros} at 0), min nonzero f_amp = {}",
        amp.states(),
        f1.len(),
        min_nonzero.map_or("-".into(), |m| m.to_string())
    ))
}

fn criterion_6() -> Outcome {
    let tol = 1e-9;
    let f = mod4k_afa(2).map_err(|e| e.to_string())?.machine_values(52)?;
    for j in [0, 4, 8, 12] {
        let v = f[4 * j].to_f64();
        check(v >= 1.0 - tol && v <= 1.0 + 1e-15, || format!("mod4k: f(a^{}) = {v}", 4 * j))?;
    }
    for j in [1, 5, 9, 13] {
        let v = f[4 * j].to_f64();
        check((0.0..=tol).contains(&v), || format!("mod4k: f(a^{}) = {v}", 4 * j))?;
    }
    let m = mod2k_mcqfa(1).map_err(|e| e.to_string())?;
    let image = mcqfa_to_afa(&m).map_err(|e| e.to_string())?;
    check(image.states() == 5, || format!("mod2k image has {} states", image.states()))?;
    let (fm, fa) = (m.machine_values(16)?, image.machine_values(16)?);
    let mut worst = 0f64;
    for j in 0..=16 {
        let d = (fm[j].to_f64() - fa[j].to_f64()).abs();
        worst = worst.max(d);
        check(d <= tol, || format!("mod2k: a^{j}: MCQFA {}, AfA {}", fm[j], fa[j]))?;
        if j % 2 == 0 {
            let want = if (j / 2) % 2 == 0 { 1.0 } else { 0.0 };
            check((fa[j].to_f64() - want).abs() <= tol, || format!("mod2k: a^{j} gives {}", fa[j]))?;
        }
    }
    Ok(format!("mod4k(2) on promise ok; mod2k(1) pipeline max |diff| = {worst:.2e}"))
}

fn criterion_7() -> Outcome {
    let lambda = r(3, 4);
    let f = interval_afa(3, 7).map_err(|e| e.to_string())?.machine_values(50)?;
    let accepted: Vec<usize> = (0..=50).filter(|&j| cmp(&f[j], &lambda).is_gt()).collect();
    check(accepted == (3..=7).collect::<Vec<_>>(), || format!("accepted lengths {accepted:?}"))?;
    check(f[2] == lambda && f[8] == lambda, || format!("f(a^2) = {}, f(a^8) = {}", f[2], f[8]))?;
    Ok("accepts exactly a^3..a^7, f(a^2) = f(a^8) = 3/4".into())
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let random = run_sweep(&random_params(DEFAULT_SEED, 500), 200);
    let curated = run_sweep(&curated_params(), 200);
    let random_missing = (random.missing_leaves().len(), random.missing_regimes().len());
    let report = random.merge(curated);
    let elapsed = start.elapsed();
    check(report.oracle_agrees(), || {
        format!("{} oracle disagreements, first: {:?}", report.failures.len(), report.failures[0])
    })?;
    check(report.all_in_catalog(), || {
        let (p, lang, branch) = &report.outside[0];
        format!(
            "{} languages outside the catalog, first: {lang} ({branch}) from p={} q={} f1={} f2={} m={} λ={}",
            report.outside.len(),
            p.p,
            p.q,
            p.f1,
            p.f2,
            p.m,
            p.lambda
        )
    })?;
    check(report.missing_leaves().is_empty(), || format!("drift leaves never hit: {:?}", report.missing_leaves()))?;
    check(report.missing_regimes().is_empty(), || format!("t regimes never hit: {:?}", report.missing_regimes()))?;
    within(elapsed, 60)?;
    Ok(format!(
        "{} tuples agree, all in catalog, 20/20 drift leaves and 6/6 regimes \
         (seeded draw alone misses {} leaves, {} regimes), {:.1}s",
        report.total, random_missing.0, random_missing.1,
        elapsed.as_secs_f64()
    ))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let ab = binary();
    let one = Scalar::one(Q);
    let per_kind = 250;
    let words = 4;
    for i in 0..per_kind {
        let n = 1 + i % 4;
        let afa = random_afa(&mut rng, n, &ab);
        let pfa = random_pfa(&mut rng, n, &ab);
        let mcqfa = random_mcqfa(&mut rng, n.max(2), &ab);
        let as_afa = Afa::new(pfa.machine().clone()).map_err(|e| e.to_string())?;
        for _ in 0..words {
            let w = random_word(&mut rng, &ab, 10);
            let run = |e: afalab::automata::RunError| e.to_string();
            for v in afa.machine().trajectory(&w).map_err(run)? {
                check(v.sum() == one, || format!("affine sum {} on {w:?}", v.sum()))?;
            }
            let v = pfa.machine().final_configuration(&w).map_err(run)?;
            check(v.entries().iter().all(|x| !x.is_negative()), || format!("negative PFA entry on {w:?}"))?;
            let v = mcqfa.machine().final_configuration(&w).map_err(run)?;
            check(v.l2_norm_squared() == one, || format!("MCQFA norm {} on {w:?}", v.l2_norm_squared()))?;
            let (x, y) = (pfa.run(&w).map_err(run)?, as_afa.run(&w).map_err(run)?);
            check(x == y, || format!("PFA {x} vs AfA {y} on {w:?}"))?;
        }
    }
    Ok(format!(
        "{} machines, {} word checks, 0 violations",
        4 * per_kind,
        4 * per_kind * words
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("pfa_to_afa keeps majority sign and 1/3 floor", criterion_1),
        ("rotation MCQFA equals its AfA image", criterion_2),
        ("random QFAs match their AfA images", criterion_3),
        ("count_afa(7) values", criterion_4),
        ("amplification formula and floor", criterion_5),
        ("MOD4^k AfA and MOD2^k pipeline", criterion_6),
        ("interval(3,7) at 3/4", criterion_7),
        ("two-state unary classifier sweep", criterion_8),
        ("model invariants on random machines", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
