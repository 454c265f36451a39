//! End-to-end checks of the computable content of the rationality diagram:
//! Galois equivariance of the Kostant representatives and intertwining
//! data, and the formal comparison of the two paths around the
//! constant-term square.

use crate::cmfield::{self, sigma_decompose, verify_sign_identity, FieldTower, GaloisElement, SigmaSpec};
use crate::error::{Error, Result};
use crate::intertwine::{self, LocalCharData};
use crate::kostant::{self, InfinityType};
use crate::lchar::{self, Atom, FormalLRatio, HeckeCharSymbol, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const REPORT_SCHEMA: &str = "eiscoh.verification/1";

/// Relative tolerance of the numerical discriminant cross-check.
pub const DEFAULT_RELATION_TOL: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    /// Preset name, or `custom` together with `custom_field`.
    pub field: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_field: Option<Value>,
    pub n: usize,
    /// Exponents per embedding in the fixed order.
    pub eta: Vec<i64>,
    /// Opaque label of the finite part.
    #[serde(default = "default_label")]
    pub finite_label: String,
    /// Empty means the tower's generating set.
    #[serde(default)]
    pub sigmas: Vec<String>,
    #[serde(default = "default_tol")]
    pub relation_tol: f64,
}

fn default_label() -> String {
    "η".into()
}

fn default_tol() -> f64 {
    DEFAULT_RELATION_TOL
}

impl ScenarioConfig {
    pub fn new(name: &str, field: &str, n: usize, eta: Vec<i64>, sigmas: &[&str]) -> Self {
        ScenarioConfig {
            name: name.into(),
            field: field.into(),
            custom_field: None,
            n,
            eta,
            finite_label: default_label(),
            sigmas: sigmas.iter().map(|s| s.to_string()).collect(),
            relation_tol: DEFAULT_RELATION_TOL,
        }
    }
}

pub fn load_tower(field: &str, custom: Option<&Value>) -> Result<FieldTower> {
    match (field, custom) {
        ("custom", Some(v)) => FieldTower::from_json(v),
        ("custom", None) => Err(Error::Config("field 'custom' needs a polynomial specification".into())),
        (name, _) => cmfield::preset(name),
    }
}

/// Validated scenario with its tower, character and automorphisms.
pub struct Scenario {
    pub cfg: ScenarioConfig,
    pub tower: FieldTower,
    pub eta: InfinityType,
    pub chi: HeckeCharSymbol,
    pub sigmas: Vec<GaloisElement>,
}

impl Scenario {
    pub fn build(cfg: &ScenarioConfig) -> Result<Self> {
        if cfg.n < 2 {
            return Err(Error::RankTooSmall { min: 2, got: cfg.n });
        }
        let tower = load_tower(&cfg.field, cfg.custom_field.as_ref())?;
        if cfg.eta.len() != tower.embeddings.len() {
            return Err(Error::EmbeddingMismatch {
                expected: tower.embeddings.len(),
                got: cfg.eta.len(),
            });
        }
        let eta = InfinityType::paired(cfg.eta.clone())?;
        eta.check_balanced(cfg.n)?;
        let specs: Vec<SigmaSpec> = if cfg.sigmas.is_empty() {
            tower.generating_set()
        } else {
            cfg.sigmas.iter().map(|s| s.parse()).collect::<Result<_>>()?
        };
        let sigmas = specs.iter().map(|s| tower.galois(s)).collect::<Result<Vec<_>>>()?;
        for s in &sigmas {
            eta.sigma_action(&s.perm)?.check_balanced(cfg.n)?;
        }
        let chi = HeckeCharSymbol::new(&cfg.finite_label, &tower.name, eta.clone());
        Ok(Scenario {
            cfg: cfg.clone(),
            tower,
            eta,
            chi,
            sigmas,
        })
    }

    /// Local exponents `(min, max)` at each complex place.
    fn local_data(&self) -> Result<Vec<LocalCharData>> {
        self.eta
            .eta
            .chunks(2)
            .map(|p| LocalCharData::new(self.cfg.n, p[0].min(p[1]), p[0].max(p[1])))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomUse {
    pub axiom: String,
    pub scope: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub sigmas: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivarianceRecord {
    pub k: usize,
    pub sigma: String,
    pub w_k: String,
    pub w_k_of_sigma_eta: String,
    pub sigma_of_w_k: String,
    pub find_wk_equivariant: bool,
    pub target_weight: kostant::Weight,
    pub kostant_weight: kostant::Weight,
    pub weights_match: bool,
    pub epsilon: i8,
    /// `ε(σ2)^{n-k}`.
    pub sign_combinatorial: i8,
    /// `(σ(∇)/∇)^{n-k}`.
    pub sign_arithmetic: i8,
    /// Closed-form intertwining value over the archimedean L-ratio, per place.
    pub normalized_values: Vec<String>,
    /// Number of K-type sections with nonzero value at `w_k`, per place.
    pub nonvanishing_sections: Vec<usize>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HarderPart {
    pub character: String,
    pub shift: i64,
    pub expression: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathValue {
    pub rational: String,
    pub nabla_power: i64,
    pub harder: Option<HarderPart>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramRecord {
    pub k: usize,
    pub sigma: String,
    pub coefficient: String,
    /// Coefficient after `|δ|^{1/2} = c·i^m·Δ·∇`.
    pub rewritten: PathValue,
    pub nabla_sign: i8,
    pub intertwine_sign: i8,
    /// `σ` applied to the rewritten coefficient of `η`.
    pub path_sigma_after: PathValue,
    /// Rewritten coefficient of `ση`.
    pub path_sigma_before: PathValue,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TowerSummary {
    pub name: String,
    pub basis: Value,
    pub delta: String,
    pub nabla: String,
    pub c: String,
    pub relation_cross_check: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum Records {
    IntertwineEquivariance {
        records: Vec<EquivarianceRecord>,
    },
    ConstantTermDiagram {
        tower_data: TowerSummary,
        records: Vec<DiagramRecord>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: String,
    pub scenario: String,
    pub tower: String,
    pub n: usize,
    pub eta: Vec<i64>,
    pub embeddings: Vec<String>,
    #[serde(flatten)]
    pub records: Records,
    pub axiom_ledger: Vec<AxiomUse>,
    pub conventions: Vec<String>,
    pub verdict: String,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == "PASS"
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

fn waldspurger() -> AxiomUse {
    AxiomUse {
        axiom: "Waldspurger".into(),
        scope: "finite places: normalised intertwining operators are Aut(C)-equivariant".into(),
        k: None,
        sigmas: vec![],
    }
}

fn harder(k: usize, sigmas: Vec<String>) -> AxiomUse {
    AxiomUse {
        axiom: "Harder".into(),
        scope: "σ fixes (i^{[k:Q]/2}Δ)^d·L(-d,η)/L(0,η) up to η ↦ ση".into(),
        k: Some(k),
        sigmas,
    }
}

/// Ledger a PASS report must carry: one global Waldspurger entry, plus one
/// Harder entry per `k < n` for the constant-term diagram.
pub fn expected_ledger(n: usize, diagram: bool, sigmas: &[String]) -> Vec<AxiomUse> {
    let mut out = Vec::new();
    if diagram {
        for k in 1..n {
            out.push(harder(k, sigmas.to_vec()));
        }
    }
    out.push(waldspurger());
    out
}

fn conventions() -> Vec<String> {
    vec![
        "constant-term coefficient k carries |δ_k|^{(k-n)/2}".into(),
        "Harder period for L(-d,η)/L(0,η) is (i^{[k:Q]/2}Δ)^d with d = n-k".into(),
        "Weyl action on weights (w·μ)_i = μ_{w(i)}".into(),
        "square roots on the principal branch; c absorbs the branch sign".into(),
    ]
}

fn pow_sign(s: i8, e: usize) -> i8 {
    if e % 2 == 0 {
        1
    } else {
        s
    }
}

fn report(s: &Scenario, records: Records, ledger: Vec<AxiomUse>, ok: bool) -> VerificationReport {
    VerificationReport {
        schema: REPORT_SCHEMA.into(),
        scenario: s.cfg.name.clone(),
        tower: s.tower.name.clone(),
        n: s.cfg.n,
        eta: s.cfg.eta.clone(),
        embeddings: s.tower.embeddings.names(),
        records,
        axiom_ledger: ledger,
        conventions: conventions(),
        verdict: if ok { "PASS" } else { "FAIL" }.into(),
    }
}

/// Per `(k, σ)`: `find_wk` commutes with `σ`, the representative matches
/// `(Λ^(k))^{-1}`, the combinatorial sign `ε(σ2)^{n-k}` equals the
/// arithmetic `(σ(∇)/∇)^{n-k}`, and the archimedean factor is normalised
/// with the expected vanishing pattern.
pub fn check_intertwine_equivariance(cfg: &ScenarioConfig) -> Result<VerificationReport> {
    let s = Scenario::build(cfg)?;
    let n = cfg.n;
    let mu = kostant::highest_weight_from_eta(&s.eta, n)?;
    let places = s.local_data()?;
    let mut records = Vec::new();
    for k in 1..=n {
        let w = kostant::find_wk(&s.eta, k, n)?;
        let target = lchar::inverse_lambda_weight(&s.eta, k, n)?;
        let kw = kostant::kostant_weight(&w, &mu)?;
        let mut normalized = Vec::new();
        let mut nonvanishing = Vec::new();
        for p in &places {
            normalized.push(intertwine::normalized_value(k, n, p)?.to_string());
            let mut count = 0;
            for b in intertwine::compositions(p) {
                if !intertwine::intertwine_closed_form(k, n, p, &b)?.is_zero() {
                    count += 1;
                }
            }
            nonvanishing.push(count);
        }
        for g in &s.sigmas {
            let moved = s.eta.sigma_action(&g.perm)?;
            let lhs = kostant::find_wk(&moved, k, n)?;
            let rhs = w.sigma_action(&g.perm)?;
            let eps = sigma_decompose(g, &s.tower.embeddings)?.epsilon;
            let ratio = verify_sign_identity(&s.tower, g)?.nabla_ratio;
            let (sc, sa) = (pow_sign(eps, n - k), pow_sign(ratio, n - k));
            let passed = lhs == rhs
                && kw == target
                && sc == sa
                && normalized.iter().all(|v| v == "1")
                && nonvanishing.iter().all(|&c| c == 1);
            records.push(EquivarianceRecord {
                k,
                sigma: g.name.clone(),
                w_k: w.to_string(),
                w_k_of_sigma_eta: lhs.to_string(),
                sigma_of_w_k: rhs.to_string(),
                find_wk_equivariant: lhs == rhs,
                target_weight: target.clone(),
                kostant_weight: kw.clone(),
                weights_match: kw == target,
                epsilon: eps,
                sign_combinatorial: sc,
                sign_arithmetic: sa,
                normalized_values: normalized.clone(),
                nonvanishing_sections: nonvanishing.clone(),
                passed,
            });
        }
    }
    let ok = records.iter().all(|r| r.passed);
    let ledger = expected_ledger(n, false, &[]);
    Ok(report(&s, Records::IntertwineEquivariance { records }, ledger, ok))
}

/// Rewritten coefficient `r·∇^b·H` with `H` a Harder atom (absent for
/// `k = n`).
struct Rewritten {
    rational: BigRational,
    nabla_power: i64,
    harder: Option<(HeckeCharSymbol, i64, FormalLRatio)>,
}

impl Rewritten {
    fn value(&self, extra_sign: i8) -> PathValue {
        let r = if extra_sign < 0 {
            -self.rational.clone()
        } else {
            self.rational.clone()
        };
        PathValue {
            rational: r.to_string(),
            nabla_power: self.nabla_power,
            harder: self.harder.as_ref().map(|(chi, d, h)| HarderPart {
                character: chi.to_string(),
                shift: *d,
                expression: h.to_string(),
            }),
        }
    }
}

/// Replaces `Δ^{2j}` by the rational `(Δ^2)^j`, leaving `Δ^0` or `Δ^1`.
fn reduce_delta(s: &Scalar, delta_sq: &BigRational) -> Result<Scalar> {
    let e = s.exponent(Atom::Delta);
    if !e.is_integer() {
        return Err(Error::NonCriticalAtom(format!("fractional power of Δ in {s}")));
    }
    let e = e.to_integer();
    let two = BigInt::from(2);
    let keep = ((&e % &two) + &two) % &two;
    let half = (&e - &keep) / &two;
    let half_i = i64::try_from(half).map_err(|_| Error::NonCriticalAtom("Δ exponent too large".into()))?;
    let factor = Scalar::rational(delta_sq.clone()).pow(half_i);
    let strip = Scalar::atom(Atom::Delta, BigRational::from_integer(-(&e - &keep)));
    Ok(s.mul(&strip).mul(&factor))
}

fn rewrite(coef: &FormalLRatio, rel: &cmfield::DiscriminantRelation, n: usize) -> Result<Rewritten> {
    let e = coef.scalar.exponent(Atom::AbsDisc);
    let t = &e * BigRational::from_integer(BigInt::from(2));
    if !t.is_integer() {
        return Err(Error::NonCriticalAtom(format!("|δ|^{e} is not a power of |δ|^(1/2)")));
    }
    let t: i64 = i64::try_from(t.to_integer()).map_err(|_| Error::NonCriticalAtom("exponent too large".into()))?;
    let unit = Scalar::rational(rel.c.clone())
        .mul(&Scalar::atom(Atom::I, BigRational::from_integer(rel.i_power.into())))
        .mul(&Scalar::atom(Atom::Delta, BigRational::one()))
        .mul(&Scalar::atom(Atom::Nabla, BigRational::one()));
    let scalar = coef.scalar.mul(&Scalar::atom(Atom::AbsDisc, -e)).mul(&unit.pow(t));
    let b = scalar.exponent(Atom::Nabla);
    let b = lchar::as_integer(&b).ok_or_else(|| Error::NonCriticalAtom(format!("∇^{b}")))?;
    let without_nabla = scalar.mul(&Scalar::atom(Atom::Nabla, BigRational::from_integer((-b).into())));
    let delta_sq = rel.delta.square();
    if coef.numerator.is_empty() && coef.denominator.is_empty() {
        let rest = reduce_delta(&without_nabla, &delta_sq)?;
        if !rest.is_rational() {
            return Err(Error::NonCriticalAtom(format!("unpaired period {rest}")));
        }
        return Ok(Rewritten {
            rational: rest.coeff,
            nabla_power: b,
            harder: None,
        });
    }
    if coef.numerator.len() != 1 {
        return Err(Error::NonCriticalAtom(format!("{coef}: expected one L-ratio")));
    }
    let shape = FormalLRatio {
        scalar: Scalar::one(),
        ..coef.clone()
    };
    let (_, atom) = lchar::harder_decompose(
        &shape.scale(&lchar::harder_period(
            coef.numerator[0].chi.degree(),
            -coef.numerator[0].offset.a,
        )),
        n,
    )?;
    let (chi, d) = atom.ok_or_else(|| Error::NonCriticalAtom(format!("{coef}")))?;
    let period = lchar::harder_period(chi.degree(), d);
    let rest = reduce_delta(&without_nabla.mul(&period.inv()), &delta_sq)?;
    if !rest.is_rational() {
        return Err(Error::NonCriticalAtom(format!("{coef}: leftover period {rest}")));
    }
    let h = lchar::harder_atom(&chi, d);
    Ok(Rewritten {
        rational: rest.coeff,
        nabla_power: b,
        harder: Some((chi, d, h)),
    })
}

/// Both paths around the constant-term square, compared on formal atoms:
/// apply `σ` to the rewritten coefficient of `η` (Harder for the L-ratio,
/// the sign identity for `∇`, the sign lemma for the intertwining
/// operator) and compare with the rewritten coefficient of `ση`.
pub fn check_constant_term_diagram(cfg: &ScenarioConfig) -> Result<VerificationReport> {
    let s = Scenario::build(cfg)?;
    let n = cfg.n;
    let rel = cmfield::verify_discriminant_relation(&s.tower)?;
    let coeffs = lchar::constant_term_coefficients(n, &s.chi, true)?;
    let mut records = Vec::new();
    for g in &s.sigmas {
        let moved = s.chi.sigma(&g.perm)?;
        let coeffs_b = lchar::constant_term_coefficients(n, &moved, true)?;
        let eps = sigma_decompose(g, &s.tower.embeddings)?.epsilon;
        let ratio = verify_sign_identity(&s.tower, g)?.nabla_ratio;
        for k in 1..=n {
            let a = rewrite(&coeffs[k - 1], &rel, n)?;
            let b = rewrite(&coeffs_b[k - 1], &rel, n)?;
            let nabla_sign = pow_sign(ratio, a.nabla_power.unsigned_abs() as usize);
            let intertwine_sign = pow_sign(eps, n - k);
            // σ(r·∇^b·H·N) = r·(σ∇/∇)^b·∇^b·σ(H)·ε^{n-k}·N^σ
            let sigma_h = match &a.harder {
                Some((_, _, h)) => Some(lchar::sigma_on_ratio(h, &g.perm, n)?),
                None => None,
            };
            let sign = nabla_sign * intertwine_sign;
            let after = Rewritten {
                rational: a.rational.clone(),
                nabla_power: a.nabla_power,
                harder: match (&a.harder, sigma_h) {
                    (Some((chi, d, _)), Some(h)) => Some((chi.sigma(&g.perm)?, *d, h)),
                    _ => None,
                },
            };
            let path_a = after.value(sign);
            let path_b = b.value(1);
            let passed = path_a == path_b
                && match (&after.harder, &b.harder) {
                    (Some((_, _, x)), Some((_, _, y))) => x == y,
                    (None, None) => true,
                    _ => false,
                };
            records.push(DiagramRecord {
                k,
                sigma: g.name.clone(),
                coefficient: coeffs[k - 1].to_string(),
                rewritten: a.value(1),
                nabla_sign,
                intertwine_sign,
                path_sigma_after: path_a,
                path_sigma_before: path_b,
                passed,
            });
        }
    }
    records.sort_by_key(|r| r.k);
    let names: Vec<String> = s.sigmas.iter().map(|g| g.name.clone()).collect();
    let ledger = expected_ledger(n, true, &names);
    let cross = rel.passed(cfg.relation_tol);
    let ok = cross && !records.is_empty() && records.iter().all(|r| r.passed) && !rel.c.is_zero();
    let tower_data = TowerSummary {
        name: s.tower.name.clone(),
        basis: rel.basis.clone(),
        delta: rel.delta.to_string(),
        nabla: rel.nabla.to_string(),
        c: rel.c.to_string(),
        relation_cross_check: cross,
    };
    Ok(report(
        &s,
        Records::ConstantTermDiagram { tower_data, records },
        ledger,
        ok,
    ))
}

/// Scenarios covering every preset with `n <= 4`.
pub fn curated_scenarios() -> Vec<ScenarioConfig> {
    vec![
        ScenarioConfig::new("gauss-n2", "gauss", 2, vec![0, 2], &["id", "conj"]),
        ScenarioConfig::new("gauss-n3", "gauss", 3, vec![-1, 4], &["id", "conj"]),
        ScenarioConfig::new("gauss-n4", "gauss", 4, vec![5, -2], &["id", "conj"]),
        ScenarioConfig::new("zeta5-n2", "zeta5", 2, vec![0, 2, -1, 3], &[]),
        ScenarioConfig::new("zeta5-n3", "zeta5", 3, vec![4, -1, 0, 3], &[]),
        ScenarioConfig::new("zeta8-n3", "zeta8", 3, vec![0, 3, 4, -1], &[]),
        ScenarioConfig::new("zeta12-n4", "zeta12", 4, vec![0, 4, -2, 5], &[]),
        ScenarioConfig::new("gauss-root-1pi-n2", "gauss-root-1pi", 2, vec![2, 0, 2, 0], &[]),
        ScenarioConfig::new("gauss-root-1pi-n3", "gauss-root-1pi", 3, vec![0, 3, 0, 3], &[]),
        ScenarioConfig::new("gauss-root-1pi-n4", "gauss-root-1pi", 4, vec![-1, 4, -1, 4], &[]),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteEntry {
    pub scenario: String,
    pub equivariance: VerificationReport,
    pub diagram: VerificationReport,
}

/// Runs both checks on every scenario in parallel; output is ordered by
/// scenario name.
pub fn run_suite(cfgs: &[ScenarioConfig]) -> Result<Vec<SuiteEntry>> {
    let mut out = cfgs
        .par_iter()
        .map(|c| {
            Ok(SuiteEntry {
                scenario: c.name.clone(),
                equivariance: check_intertwine_equivariance(c)?,
                diagram: check_constant_term_diagram(c)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.scenario.cmp(&b.scenario));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_smallest_case() {
        let cfg = ScenarioConfig::new("g", "gauss", 2, vec![0, 2], &["id", "conj"]);
        let eq = check_intertwine_equivariance(&cfg).unwrap();
        assert!(eq.passed(), "{}", eq.to_json());
        let d = check_constant_term_diagram(&cfg).unwrap();
        assert!(d.passed(), "{}", d.to_json());
        let Records::ConstantTermDiagram { tower_data, records } = &d.records else {
            panic!()
        };
        assert_eq!(tower_data.c, "-1");
        let k1 = records.iter().find(|r| r.k == 1 && r.sigma == "conj").unwrap();
        assert_eq!(k1.rewritten.nabla_power, -1);
        assert_eq!(k1.rewritten.harder.as_ref().unwrap().shift, 1);
        let k2 = records.iter().find(|r| r.k == 2).unwrap();
        assert_eq!(k2.rewritten.rational, "1");
        assert!(k2.rewritten.harder.is_none());
    }

    #[test]
    fn sign_example_on_non_abelian_tower() {
        let cfg = ScenarioConfig::new("r", "gauss-root-1pi", 3, vec![0, 3, 0, 3], &["3"]);
        let eq = check_intertwine_equivariance(&cfg).unwrap();
        assert!(eq.passed());
        let Records::IntertwineEquivariance { records } = &eq.records else {
            panic!()
        };
        for r in records {
            let expected = if (3 - r.k) % 2 == 1 { -1 } else { 1 };
            assert_eq!((r.sign_combinatorial, r.sign_arithmetic), (expected, expected));
        }
    }

    #[test]
    fn curated_suite_passes_with_exact_ledger() {
        for entry in run_suite(&curated_scenarios()).unwrap() {
            let d = &entry.diagram;
            assert!(entry.equivariance.passed(), "{}", entry.equivariance.to_json());
            assert!(d.passed(), "{}", d.to_json());
            let Records::ConstantTermDiagram { records, .. } = &d.records else {
                panic!()
            };
            let mut names: Vec<String> = records.iter().filter(|r| r.k == 1).map(|r| r.sigma.clone()).collect();
            names.dedup();
            assert_eq!(d.axiom_ledger, expected_ledger(d.n, true, &names));
            assert_eq!(entry.equivariance.axiom_ledger, expected_ledger(d.n, false, &[]));
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = &curated_scenarios()[8];
        let a = check_constant_term_diagram(cfg).unwrap().to_json();
        let b = check_constant_term_diagram(cfg).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_scenarios() {
        let bad_len = ScenarioConfig::new("x", "gauss", 2, vec![0, 2, 0, 2], &[]);
        assert!(matches!(
            Scenario::build(&bad_len),
            Err(Error::EmbeddingMismatch { .. })
        ));
        let unbalanced = ScenarioConfig::new("x", "gauss", 3, vec![0, 2], &[]);
        assert!(matches!(
            Scenario::build(&unbalanced),
            Err(Error::NotBalanced { .. } | Error::NotRegular { .. })
        ));
        // moves τ1,1 alone, leaving ^ση unbalanced
        let moved = ScenarioConfig::new("x", "gauss-root-1pi", 2, vec![0, 2, 2, 0], &["perm:3,2,1,4"]);
        assert!(Scenario::build(&moved).is_err());
        let rank = ScenarioConfig::new("x", "gauss", 1, vec![0, 1], &[]);
        assert!(matches!(Scenario::build(&rank), Err(Error::RankTooSmall { .. })));
    }

    #[test]
    fn non_critical_shapes_are_refused() {
        let t = cmfield::preset("gauss").unwrap();
        let rel = cmfield::verify_discriminant_relation(&t).unwrap();
        let chi = HeckeCharSymbol::new("η", "gauss", InfinityType::paired(vec![0, 2]).unwrap());
        let coef = FormalLRatio::from_scalar(Scalar::atom(Atom::TwoPi, BigRational::one()));
        assert!(matches!(rewrite(&coef, &rel, 2), Err(Error::NonCriticalAtom(_))));
        let quarter = lchar::constant_term_coefficients(2, &chi, true).unwrap()[0]
            .scale(&Scalar::atom(Atom::AbsDisc, lchar::rat(1, 4)));
        assert!(matches!(rewrite(&quarter, &rel, 2), Err(Error::NonCriticalAtom(_))));
    }
}
