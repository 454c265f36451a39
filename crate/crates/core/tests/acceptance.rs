//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Built with `harness = false` so the lines always reach stdout.

use eiscoh::cmfield::{preset, verify_discriminant_relation, verify_sign_identity, SigmaSpec, PRESET_NAMES};
use eiscoh::intertwine::{
    absolutely_convergent, intertwine_closed_form, normalized_value, Composition, LocalCharData, Method,
    QuadratureConfig,
};
use eiscoh::kostant::{
    census, census_direct, doubled_dot_action, kostant_weight_single, verify_unique_match, InfinityType,
    DEFAULT_ENUMERATION_CAP,
};
use eiscoh::lchar::{gk_product, HeckeCharSymbol};
use eiscoh::rationality::{curated_scenarios, expected_ledger, load_tower, run_suite};
use eiscoh::weyl::{coset_reps, length_generating_function, Permutation};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

type Outcome = std::result::Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    for n in 2..=8 {
        let reps = coset_reps(n).map_err(|e| e.to_string())?;
        let lengths: Vec<usize> = reps.iter().map(Permutation::length).collect();
        let expected: Vec<usize> = (1..=n).map(|k| n - k).collect();
        if lengths != expected {
            return Err(format!("n={n}: lengths {lengths:?}"));
        }
    }
    let t = start.elapsed();
    check(t < Duration::from_secs(1), format!("n=2..8 in {t:.2?}"))
}

fn random_dominant(rng: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    let mut mu = vec![0i64; n];
    mu[n - 1] = rng.random_range(-5..=5);
    for i in (0..n - 1).rev() {
        mu[i] = mu[i + 1] + rng.random_range(0..=4);
    }
    mu
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    for n in 1..=5 {
        for _ in 0..5 {
            let mu = random_dominant(&mut rng, n);
            for w in Permutation::all(n) {
                let lhs: Vec<i64> = kostant_weight_single(&w, &mu)
                    .map_err(|e| e.to_string())?
                    .iter()
                    .map(|x| 2 * x)
                    .collect();
                if lhs != doubled_dot_action(&w, &mu) {
                    return Err(format!("w={:?} μ={mu:?}", w.images()));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (w, μ) pairs"))
}

fn criterion_3() -> Outcome {
    let mut direct = 0;
    for n in 1..=5 {
        for e in [2usize, 4] {
            let single = length_generating_function(n);
            let mut expected = vec![1u64];
            for _ in 0..e {
                expected = poly_mul(&expected, &single);
            }
            if census(n, e) != expected {
                return Err(format!("convolution n={n} #E={e}"));
            }
            if let Ok(c) = census_direct(n, e, DEFAULT_ENUMERATION_CAP) {
                if c != expected {
                    return Err(format!("enumeration n={n} #E={e}"));
                }
                direct += 1;
            }
        }
    }
    Ok(format!("n<=5, #E in {{2,4}}, {direct} cases also enumerated"))
}

fn poly_mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn random_balanced(rng: &mut ChaCha8Rng, n: usize, pairs: usize) -> Vec<i64> {
    let mut eta = Vec::with_capacity(2 * pairs);
    for _ in 0..pairs {
        let lo = -rng.random_range(0..=3i64);
        let hi = n as i64 + rng.random_range(0..=3i64);
        if rng.random_bool(0.5) {
            eta.extend([lo, hi]);
        } else {
            eta.extend([hi, lo]);
        }
    }
    eta
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut runs = 0;
    for (field, pairs) in [("gauss", 1usize), ("zeta5", 2)] {
        for _ in 0..50 {
            let n = rng.random_range(1..=4usize);
            let eta = random_balanced(&mut rng, n, pairs);
            let it = InfinityType::paired(eta.clone()).map_err(|e| e.to_string())?;
            for k in 1..=n {
                let r = verify_unique_match(&it, k, n, DEFAULT_ENUMERATION_CAP).map_err(|e| e.to_string())?;
                if !r.passed() {
                    return Err(format!("{field} η={eta:?} k={k} n={n}: {} matches", r.multiplicity));
                }
                runs += 1;
            }
        }
    }
    let t = start.elapsed();
    check(t < Duration::from_secs(30), format!("{runs} enumerations in {t:.2?}"))
}

fn criterion_5() -> Outcome {
    for n in 1..=10usize {
        let it = InfinityType::paired(vec![0, n as i64]).map_err(|e| e.to_string())?;
        let chi = HeckeCharSymbol::new("η", "gauss", it);
        for k in 1..=n {
            gk_product(k, n, &chi).map_err(|e| format!("k={k} n={n}: {e}"))?;
        }
    }
    Ok("1<=k<=n<=10 telescope".into())
}

struct Case {
    method: Method,
    n: usize,
    k: usize,
    tol: f64,
}

fn criterion_6() -> Outcome {
    let mut cases = Vec::new();
    for (n, k) in [(2, 1), (3, 2), (4, 3)] {
        cases.push(Case {
            method: Method::RadialIterated,
            n,
            k,
            tol: 1e-8,
        });
    }
    for (n, k) in [(2, 1), (3, 2), (4, 3), (3, 1), (4, 2)] {
        cases.push(Case {
            method: Method::TensorGrid,
            n,
            k,
            tol: 1e-6,
        });
    }
    cases.push(Case {
        method: Method::MonteCarlo,
        n: 4,
        k: 1,
        tol: 1e-2,
    });

    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut vanishing = 0;
    let mut slowest = Duration::ZERO;
    for c in &cases {
        let quad = match c.method {
            Method::TensorGrid => QuadratureConfig::tensor_grid(),
            m => QuadratureConfig::new(m),
        };
        let d = (c.n - c.k) as i32;
        for hi in c.n as i64..=c.n as i64 + 3 {
            let case_start = Instant::now();
            let data = LocalCharData::new(c.n, 0, hi).map_err(|e| e.to_string())?;
            let beta0 = data.beta0();
            let exact = intertwine_closed_form(c.k, c.n, &data, &beta0).map_err(|e| e.to_string())?;
            let est = eiscoh::intertwine_numeric(c.k, c.n, &data, &beta0, &quad).map_err(|e| e.to_string())?;
            let ex: f64 = exact.to_real();
            let rel = (est.value() - eiscoh::Complex::new(ex, 0.0)).norm() / ex.abs();
            worst = worst.max(rel / c.tol);
            if rel > c.tol {
                return Err(format!("{} n={} k={} η_hi={hi}: rel err {rel:.2e}", c.method, c.n, c.k));
            }
            // one unit moved off the last slot onto the last integrated variable
            let mut beta = beta0.beta.clone();
            beta[c.n - 1] -= 1;
            beta[c.n - 2] += 1;
            let beta = Composition::new(beta, &data).map_err(|e| e.to_string())?;
            if !absolutely_convergent(c.k, c.n, &data, &beta) {
                continue;
            }
            let exact = intertwine_closed_form(c.k, c.n, &data, &beta).map_err(|e| e.to_string())?;
            if !exact.is_zero() {
                return Err(format!("closed form nonzero at β={:?}", beta.beta));
            }
            let est = eiscoh::intertwine_numeric(c.k, c.n, &data, &beta, &quad).map_err(|e| e.to_string())?;
            let bound = 1e-6 * (2.0 * PI).powi(d);
            if est.value().norm() > bound {
                return Err(format!(
                    "{} n={} k={} β={:?}: |I| = {:.2e}",
                    c.method,
                    c.n,
                    c.k,
                    beta.beta,
                    est.value().norm()
                ));
            }
            vanishing += 1;
            slowest = slowest.max(case_start.elapsed());
        }
    }
    let t = start.elapsed();
    check(
        slowest < Duration::from_secs(60),
        format!(
            "{} value cases, {vanishing} vanishing cases, worst err/tol {worst:.2e}, slowest case {slowest:.2?}, total {t:.2?}",
            cases.len() * 4
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut count = 0;
    for n in 1..=8usize {
        for k in 1..=n {
            for lo in -2..=0 {
                for hi in n as i64..=n as i64 + 3 {
                    let data = LocalCharData::new(n, lo, hi).map_err(|e| e.to_string())?;
                    let v = normalized_value(k, n, &data).map_err(|e| e.to_string())?;
                    if !v.is_one() {
                        return Err(format!("k={k} n={n} ({lo},{hi}): {v}"));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} triples exactly 1"))
}

fn criterion_8() -> Outcome {
    let mut parts = Vec::new();
    for name in PRESET_NAMES {
        let t = preset(name).map_err(|e| e.to_string())?;
        let rel = verify_discriminant_relation(&t).map_err(|e| e.to_string())?;
        let square = rel.c.clone() * rel.c.clone() == rel.c_squared;
        if !square || !rel.passed(1e-20) {
            return Err(format!("{name}: c^2={} numeric {:?}", rel.c_squared, rel.numeric));
        }
        if name == "gauss" && rel.c != BigRational::from_integer(BigInt::from(-1)) {
            return Err(format!("gauss: c={}", rel.c));
        }
        parts.push(format!("{name} c={}", rel.c));
    }
    Ok(parts.join(", "))
}

fn criterion_9() -> Outcome {
    let mut count = 0;
    for name in PRESET_NAMES {
        let t = preset(name).map_err(|e| e.to_string())?;
        let mut specs = t.generating_set();
        if name == "gauss-root-1pi" {
            for a in [1, 3, 5, 7] {
                for sign in [1i8, -1] {
                    specs.push(SigmaSpec::Cyclotomic { a, sign });
                }
            }
        }
        for spec in specs {
            let g = t.galois(&spec).map_err(|e| format!("{name} {spec}: {e}"))?;
            let r = verify_sign_identity(&t, &g).map_err(|e| format!("{name} {spec}: {e}"))?;
            if !r.passed {
                return Err(format!("{name} {spec}: ε={} σ∇/∇={}", r.epsilon, r.nabla_ratio));
            }
            count += 1;
        }
    }
    Ok(format!("{count} automorphisms"))
}

fn criterion_10() -> Outcome {
    let cfgs = curated_scenarios();
    let first = run_suite(&cfgs).map_err(|e| e.to_string())?;
    let second = run_suite(&cfgs).map_err(|e| e.to_string())?;
    for (a, b) in first.iter().zip(&second) {
        let cfg = cfgs.iter().find(|c| c.name == a.scenario).expect("scenario");
        let names: Vec<String> = if cfg.sigmas.is_empty() {
            let t = load_tower(&cfg.field, None).map_err(|e| e.to_string())?;
            t.generating_set().iter().map(|s| s.to_string()).collect()
        } else {
            cfg.sigmas.clone()
        };
        for r in [&a.equivariance, &a.diagram] {
            if !r.passed() {
                return Err(format!("{} {}", a.scenario, r.verdict));
            }
        }
        if a.equivariance.axiom_ledger != expected_ledger(cfg.n, false, &[]) {
            return Err(format!("{}: equivariance ledger", a.scenario));
        }
        if a.diagram.axiom_ledger != expected_ledger(cfg.n, true, &names) {
            return Err(format!("{}: diagram ledger", a.scenario));
        }
        if a.equivariance.to_json() != b.equivariance.to_json() || a.diagram.to_json() != b.diagram.to_json() {
            return Err(format!("{}: JSON differs between runs", a.scenario));
        }
    }
    Ok(format!("{} scenarios, reproducible JSON", first.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("coset representatives", criterion_1),
        ("dot-action identity", criterion_2),
        ("length census", criterion_3),
        ("unique Kostant match", criterion_4),
        ("Gindikin-Karpelevich telescoping", criterion_5),
        ("intertwining quadrature", criterion_6),
        ("normalised archimedean factor", criterion_7),
        ("discriminant relation", criterion_8),
        ("sign identity", criterion_9),
        ("curated suite", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
