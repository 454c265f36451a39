//! Subcommand bodies. Each returns a JSON result, human-readable lines and
//! a verdict; errors are usage or configuration problems.

use crate::config::RunConfig;
use eiscoh::cmfield::{
    preset, verify_discriminant_relation, verify_sign_identity, FieldTower, SigmaSpec, PRESET_NAMES,
};
use eiscoh::intertwine::{intertwine_closed_form, normalized_value, LocalCharData, Method, QuadratureConfig};
use eiscoh::kostant::{
    self, census, doubled_dot_action, find_wk, find_wk_equivariant, kostant_weight_single, verify_unique_match,
    InfinityType, DEFAULT_ENUMERATION_CAP,
};
use eiscoh::lchar::{constant_term_coefficients, gk_product, HeckeCharSymbol};
use eiscoh::rationality::{
    self, check_constant_term_diagram, check_intertwine_equivariance, curated_scenarios, run_suite, ScenarioConfig,
    DEFAULT_RELATION_TOL,
};
use eiscoh::weyl::{coset_reps, length_census, length_generating_function, Permutation};
use serde_json::{json, Value};

pub struct Outcome {
    pub result: Value,
    pub lines: Vec<String>,
    pub passed: bool,
}

type Res = Result<Outcome, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Collects named self-test checks.
#[derive(Default)]
struct Suite {
    checks: Vec<(String, bool)>,
}

impl Suite {
    fn add(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push((name.into(), ok));
    }

    fn finish(self) -> Outcome {
        let passed = self.checks.iter().all(|c| c.1);
        Outcome {
            result: json!({
                "self_test": self.checks.iter().map(|(n, ok)| json!({"check": n, "verdict": verdict(*ok)})).collect::<Vec<_>>()
            }),
            lines: self
                .checks
                .iter()
                .map(|(n, ok)| format!("{n}: {}", verdict(*ok)))
                .collect(),
            passed,
        }
    }
}

fn tower(cfg: &RunConfig) -> Result<FieldTower, String> {
    match (&cfg.poly, &cfg.field) {
        (Some(p), _) => rationality::load_tower("custom", Some(p)).map_err(err),
        (None, Some(f)) => preset(f).map_err(err),
        (None, None) => Err("missing --field or --poly".into()),
    }
}

fn sigma_specs(cfg: &RunConfig, t: &FieldTower) -> Result<Vec<SigmaSpec>, String> {
    match &cfg.sigma {
        Some(list) => list.iter().map(|s| s.parse::<SigmaSpec>().map_err(err)).collect(),
        None => Ok(t.generating_set()),
    }
}

pub fn weyl(cfg: &RunConfig) -> Res {
    if cfg.self_test() {
        let mut s = Suite::default();
        for n in 2..=8 {
            let ok = coset_reps(n)
                .map(|r| r.iter().map(Permutation::length).eq((1..=n).rev().map(|k| k - 1)))
                .unwrap_or(false);
            s.add(format!("coset representatives n={n}"), ok);
        }
        for n in 1..=7 {
            s.add(
                format!("length census n={n}"),
                length_census(n) == length_generating_function(n),
            );
        }
        for n in 1..=5 {
            let mu: Vec<i64> = (0..n as i64).rev().map(|i| 2 * i - 3).collect();
            let ok = Permutation::all(n).all(|w| {
                kostant_weight_single(&w, &mu)
                    .map(|x| x.iter().map(|v| 2 * v).collect::<Vec<_>>() == doubled_dot_action(&w, &mu))
                    .unwrap_or(false)
            });
            s.add(format!("dot-action identity n={n}"), ok);
        }
        return Ok(s.finish());
    }
    let n = cfg.require_n()?;
    let gf = length_generating_function(n);
    let direct = length_census(n);
    let ok = gf == direct;
    let mut result = json!({
        "n": n,
        "length_generating_function": gf,
        "length_census": direct,
    });
    let mut lines = vec![format!("length generating function of S_{n}: {gf:?}")];
    if cfg.list_coset_reps.unwrap_or(false) {
        let reps = coset_reps(n).map_err(err)?;
        result["coset_reps"] = reps
            .iter()
            .enumerate()
            .map(|(i, w)| json!({"k": i + 1, "permutation": w.images(), "length": w.length()}))
            .collect();
        for (i, w) in reps.iter().enumerate() {
            lines.push(format!("w_{} = {:?} (length {})", i + 1, w.images(), w.length()));
        }
    }
    Ok(Outcome {
        result,
        lines,
        passed: ok,
    })
}

fn infinity_type(cfg: &RunConfig, n: usize) -> Result<(InfinityType, Option<FieldTower>), String> {
    let eta = cfg.require_eta()?;
    let t = if cfg.field.is_some() || cfg.poly.is_some() {
        let t = tower(cfg)?;
        if t.embeddings.len() != eta.len() {
            return Err(format!(
                "--eta has {} entries, the tower has {} embeddings",
                eta.len(),
                t.embeddings.len()
            ));
        }
        Some(t)
    } else {
        None
    };
    let it = InfinityType::paired(eta).map_err(err)?;
    it.check_balanced(n).map_err(err)?;
    Ok((it, t))
}

fn ks(cfg: &RunConfig, n: usize) -> Result<Vec<usize>, String> {
    match cfg.k {
        Some(k) if k == 0 || k > n => Err(format!("--k must lie in 1..={n}")),
        Some(k) => Ok(vec![k]),
        None => Ok((1..=n).collect()),
    }
}

pub fn kostant(cfg: &RunConfig) -> Res {
    if cfg.self_test() {
        let mut s = Suite::default();
        let cases: [(&[i64], usize); 6] = [
            (&[0, 2], 2),
            (&[-1, 4], 3),
            (&[5, -2], 4),
            (&[0, 2, -1, 3], 2),
            (&[4, -1, 0, 3], 3),
            (&[-2, 3, 3, 0], 3),
        ];
        for (eta, n) in cases {
            let it = InfinityType::paired(eta.to_vec()).map_err(err)?;
            for k in 1..=n {
                let ok = verify_unique_match(&it, k, n, DEFAULT_ENUMERATION_CAP)
                    .map(|r| r.passed())
                    .unwrap_or(false);
                s.add(format!("unique match η={eta:?} n={n} k={k}"), ok);
            }
        }
        for n in 1..=4 {
            for e in [2, 4] {
                let ok = kostant::census_direct(n, e, DEFAULT_ENUMERATION_CAP)
                    .map(|c| c == census(n, e))
                    .unwrap_or(false);
                s.add(format!("census n={n} #E={e}"), ok);
            }
        }
        return Ok(s.finish());
    }
    let n = cfg.require_n()?;
    let (it, t) = infinity_type(cfg, n)?;
    let sigmas = match (&t, &cfg.sigma) {
        (Some(t), Some(_)) => sigma_specs(cfg, t)?
            .iter()
            .map(|s| t.galois(s).map_err(err))
            .collect::<Result<Vec<_>, _>>()?,
        (None, Some(_)) => return Err("--sigma needs --field or --poly".into()),
        _ => vec![],
    };
    let mut reports = Vec::new();
    let mut lines = Vec::new();
    let mut ok = true;
    for k in ks(cfg, n)? {
        let r = verify_unique_match(&it, k, n, DEFAULT_ENUMERATION_CAP).map_err(err)?;
        let wk = find_wk(&it, k, n).map_err(err)?;
        let mut equiv = Vec::new();
        for g in &sigmas {
            let e = find_wk_equivariant(&it, k, n, &g.perm).map_err(err)?;
            ok &= e;
            equiv.push(json!({"sigma": g.name, "verdict": verdict(e)}));
            lines.push(format!("k={k} σ={}: w^(k) equivariant {}", g.name, verdict(e)));
        }
        ok &= r.passed();
        lines.push(format!(
            "k={k}: {} match(es) at minimal length {:?}, bottom degree {} {}",
            r.multiplicity,
            r.min_length,
            r.bottom_degree,
            verdict(r.passed())
        ));
        reports.push(json!({
            "k": k,
            "w_k": wk,
            "unique_match": r,
            "equivariance": equiv,
            "verdict": verdict(r.passed()),
        }));
    }
    Ok(Outcome {
        result: json!({"n": n, "eta": it.eta, "reports": reports}),
        lines,
        passed: ok,
    })
}

pub fn constant_term(cfg: &RunConfig) -> Res {
    if cfg.self_test() {
        let mut s = Suite::default();
        for n in 1..=10usize {
            let it = InfinityType::paired(vec![0, n as i64]).map_err(err)?;
            let chi = HeckeCharSymbol::new("η", "gauss", it);
            let ok = (1..=n).all(|k| gk_product(k, n, &chi).is_ok());
            s.add(format!("Gindikin-Karpelevich telescoping n={n}"), ok);
        }
        return Ok(s.finish());
    }
    let n = cfg.require_n()?;
    let (it, t) = infinity_type(cfg, n)?;
    let field = t.map(|t| t.name).unwrap_or_else(|| "k".into());
    let chi = HeckeCharSymbol::new("η", &field, it);
    let at_s = constant_term_coefficients(n, &chi, false).map_err(err)?;
    let at_zero = constant_term_coefficients(n, &chi, true).map_err(err)?;
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for k in ks(cfg, n)? {
        let gk = gk_product(k, n, &chi).map_err(err)?;
        lines.push(format!("k={k}: {}  (s=0: {})", at_s[k - 1], at_zero[k - 1]));
        rows.push(json!({
            "k": k,
            "gindikin_karpelevich": gk.to_string(),
            "coefficient": at_s[k - 1].to_string(),
            "coefficient_at_zero": at_zero[k - 1].to_string(),
        }));
    }
    Ok(Outcome {
        result: json!({"n": n, "character": chi, "coefficients": rows}),
        lines,
        passed: true,
    })
}

fn default_method(d: usize) -> Method {
    match d {
        0 | 1 => Method::RadialIterated,
        2 => Method::TensorGrid,
        _ => Method::MonteCarlo,
    }
}

fn default_tol(m: Method) -> f64 {
    match m {
        Method::RadialIterated => 1e-8,
        Method::TensorGrid => 1e-6,
        Method::MonteCarlo => 1e-2,
    }
}

fn quadrature(cfg: &RunConfig, d: usize) -> Result<QuadratureConfig, String> {
    let method = match &cfg.method {
        Some(m) => m.parse::<Method>().map_err(err)?,
        None => default_method(d),
    };
    let mut q = match method {
        Method::TensorGrid => QuadratureConfig::tensor_grid(),
        m => QuadratureConfig::new(m),
    };
    if let Some(nodes) = cfg.nodes {
        if nodes == 0 {
            return Err("--nodes must be positive".into());
        }
        match method {
            Method::RadialIterated => q.angular_nodes = nodes,
            Method::TensorGrid => q.step = 1.0 / nodes as f64,
            Method::MonteCarlo => return Err("--nodes does not apply to monte-carlo; use --samples".into()),
        }
    }
    if let Some(s) = cfg.samples {
        q.samples = s;
    }
    if let Some(s) = cfg.seed {
        q.seed = s;
    }
    Ok(q)
}

struct QuadCheck {
    rel_err: f64,
    result: Value,
}

fn quad_check(k: usize, n: usize, data: &LocalCharData, q: &QuadratureConfig) -> Result<QuadCheck, String> {
    let beta = data.beta0();
    let exact = intertwine_closed_form(k, n, data, &beta).map_err(err)?;
    let est = eiscoh::intertwine_numeric(k, n, data, &beta, q).map_err(err)?;
    let ex: f64 = exact.to_real();
    let rel_err = (est.value() - eiscoh::Complex::new(ex, 0.0)).norm() / ex.abs();
    let result = json!({
        "beta": beta,
        "closed_form": exact.to_string(),
        "closed_form_value": ex,
        "numeric": est,
        "rel_err": rel_err,
        "normalized": normalized_value(k, n, data).map_err(err)?.to_string(),
    });
    Ok(QuadCheck { rel_err, result })
}

pub fn intertwine(cfg: &RunConfig) -> Res {
    if cfg.self_test() {
        let mut s = Suite::default();
        for n in 1..=6usize {
            let ok = (1..=n).all(|k| {
                (n as i64..=n as i64 + 3).all(|hi| {
                    LocalCharData::new(n, -1, hi)
                        .and_then(|d| normalized_value(k, n, &d))
                        .map(|v| v.is_one())
                        .unwrap_or(false)
                })
            });
            s.add(format!("normalised value n={n}"), ok);
        }
        for (n, k, method) in [
            (2, 1, Method::RadialIterated),
            (3, 2, Method::RadialIterated),
            (3, 1, Method::TensorGrid),
        ] {
            let q = match method {
                Method::TensorGrid => QuadratureConfig::tensor_grid(),
                m => QuadratureConfig::new(m),
            };
            let data = LocalCharData::new(n, 0, n as i64 + 1).map_err(err)?;
            let ok = quad_check(k, n, &data, &q)
                .map(|c| c.rel_err <= default_tol(method))
                .unwrap_or(false);
            s.add(format!("{method} n={n} k={k} against closed form"), ok);
        }
        return Ok(s.finish());
    }
    let n = cfg.require_n()?;
    let k = cfg.k.ok_or("missing --k")?;
    if k == 0 || k > n {
        return Err(format!("--k must lie in 1..={n}"));
    }
    let hi = cfg.eta_hi.ok_or("missing --eta-hi")?;
    let data = LocalCharData::new(n, cfg.eta_lo.unwrap_or(0), hi).map_err(err)?;
    let q = quadrature(cfg, n - k)?;
    let tol = cfg.tol.unwrap_or(default_tol(q.method));
    let c = quad_check(k, n, &data, &q)?;
    let ok = c.rel_err <= tol;
    let mut result = json!({"n": n, "k": k, "eta_lo": data.eta_lo, "eta_hi": data.eta_hi, "quadrature": q, "tol": tol});
    if let (Value::Object(dst), Value::Object(src)) = (&mut result, c.result.clone()) {
        dst.extend(src);
    }
    let lines = vec![
        format!(
            "closed form {} = {}",
            c.result["closed_form"].as_str().unwrap_or(""),
            c.result["closed_form_value"]
        ),
        format!(
            "{} estimate {} ± {:.1e}",
            q.method,
            c.result["numeric"]["re"],
            c.result["numeric"]["error"].as_f64().unwrap_or(f64::NAN)
        ),
        format!("relative error {:.3e} against tolerance {tol:.1e}", c.rel_err),
    ];
    Ok(Outcome {
        result,
        lines,
        passed: ok,
    })
}

fn field_check(t: &FieldTower, specs: &[SigmaSpec], tol: f64) -> Result<Outcome, String> {
    let rel = verify_discriminant_relation(t).map_err(err)?;
    let rel_ok = rel.passed(tol) && !num_traits::Zero::is_zero(&rel.c);
    let mut lines = vec![format!(
        "{}: |δ| = {}, Δ = {}, ∇ = {}, c = {} {}",
        t.name,
        rel.abs_disc,
        rel.delta,
        rel.nabla,
        rel.c,
        verdict(rel_ok)
    )];
    let mut signs = Vec::new();
    let mut ok = rel_ok;
    for spec in specs {
        let g = t.galois(spec).map_err(err)?;
        let r = verify_sign_identity(t, &g).map_err(err)?;
        ok &= r.passed;
        lines.push(format!(
            "σ={}: ε = {}, σ(∇)/∇ = {} {}",
            r.sigma,
            r.epsilon,
            r.nabla_ratio,
            verdict(r.passed)
        ));
        signs.push(r);
    }
    Ok(Outcome {
        result: json!({"discriminant_relation": rel, "sign_identity": signs, "tol": tol}),
        lines,
        passed: ok,
    })
}

pub fn field(cfg: &RunConfig) -> Res {
    let tol = cfg.tol.unwrap_or(DEFAULT_RELATION_TOL);
    if cfg.self_test() {
        let mut s = Suite::default();
        for name in PRESET_NAMES {
            let t = preset(name).map_err(err)?;
            let o = field_check(&t, &t.generating_set(), tol)?;
            s.add(format!("discriminant relation and signs for {name}"), o.passed);
        }
        return Ok(s.finish());
    }
    let t = tower(cfg)?;
    let specs = sigma_specs(cfg, &t)?;
    let mut o = field_check(&t, &specs, tol)?;
    o.result["embeddings"] = json!(t.embeddings.names());
    Ok(o)
}

pub fn diagram(cfg: &RunConfig) -> Res {
    if cfg.self_test() {
        let mut s = Suite::default();
        for e in run_suite(&curated_scenarios()).map_err(err)? {
            s.add(format!("{} equivariance", e.scenario), e.equivariance.passed());
            s.add(format!("{} constant-term diagram", e.scenario), e.diagram.passed());
        }
        return Ok(s.finish());
    }
    let n = cfg.require_n()?;
    let eta = cfg.require_eta()?;
    let (field, custom) = match (&cfg.poly, &cfg.field) {
        (Some(p), _) => ("custom".to_string(), Some(p.clone())),
        (None, Some(f)) => (f.clone(), None),
        (None, None) => return Err("missing --field or --poly".into()),
    };
    let name = format!("{field}-n{n}");
    let mut sc = ScenarioConfig::new(&name, &field, n, eta, &[]);
    sc.custom_field = custom;
    sc.sigmas = cfg.sigma.clone().unwrap_or_default();
    if let Some(t) = cfg.tol {
        sc.relation_tol = t;
    }
    let eq = check_intertwine_equivariance(&sc).map_err(err)?;
    let dg = check_constant_term_diagram(&sc).map_err(err)?;
    let lines = vec![
        format!("{name}: intertwining equivariance {}", eq.verdict),
        format!("{name}: constant-term diagram {}", dg.verdict),
        format!(
            "axiom ledger: {}",
            dg.axiom_ledger
                .iter()
                .map(|a| match a.k {
                    Some(k) => format!("{}(k={k})", a.axiom),
                    None => a.axiom.clone(),
                })
                .collect::<Vec<_>>()
                .join(", ")
        ),
    ];
    let passed = eq.passed() && dg.passed();
    Ok(Outcome {
        result: json!({"equivariance": eq, "diagram": dg}),
        lines,
        passed,
    })
}
