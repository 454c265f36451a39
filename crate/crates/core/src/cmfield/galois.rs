//! Automorphisms acting on embedding labels, the decomposition
//! `σ = σ2∘σ1` and the sign identity `ε(σ2) = σ(∇)/∇`.

use super::fixed::Fx;
use super::surd::quadratic_character;
use super::{period_constants, Automorphisms, EmbeddingSet, FieldTower};
use crate::error::{Error, Result};
use crate::weyl::Permutation;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// How an automorphism is specified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaSpec {
    Identity,
    Conj,
    /// `ζ ↦ ζ^a`; `sign` picks the lift to a non-abelian closure.
    Cyclotomic {
        a: i64,
        sign: i8,
    },
    /// 1-based label permutation, optionally with its cyclotomic parameter.
    Explicit {
        perm: Vec<usize>,
        cyclotomic: Option<i64>,
    },
}

impl FromStr for SigmaSpec {
    type Err = Error;

    /// `id`, `conj`, `<a>`, `<a>+`, `<a>-`, or `perm:2,1,4,3[@a]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("unrecognised sigma '{s}'"));
        match s {
            "id" | "identity" => return Ok(SigmaSpec::Identity),
            "conj" | "conjugation" => return Ok(SigmaSpec::Conj),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("perm:") {
            let (list, a) = match rest.split_once('@') {
                Some((l, a)) => (l, Some(a.trim().parse::<i64>().map_err(|_| bad())?)),
                None => (rest, None),
            };
            let perm = list
                .split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            return Ok(SigmaSpec::Explicit { perm, cyclotomic: a });
        }
        let (num, sign) = if let Some(x) = s.strip_suffix('-') {
            (x, -1)
        } else if let Some(x) = s.strip_suffix('+') {
            (x, 1)
        } else {
            (s, 1)
        };
        let a = num.parse::<i64>().map_err(|_| bad())?;
        Ok(SigmaSpec::Cyclotomic { a, sign })
    }
}

impl fmt::Display for SigmaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaSpec::Identity => write!(f, "id"),
            SigmaSpec::Conj => write!(f, "conj"),
            SigmaSpec::Cyclotomic { a, sign } => {
                write!(f, "{a}")?;
                if *sign < 0 {
                    write!(f, "-")?;
                }
                Ok(())
            }
            SigmaSpec::Explicit { perm, cyclotomic } => {
                let p: Vec<String> = perm.iter().map(|x| x.to_string()).collect();
                write!(f, "perm:{}", p.join(","))?;
                if let Some(a) = cyclotomic {
                    write!(f, "@{a}")?;
                }
                Ok(())
            }
        }
    }
}

/// An automorphism as a permutation of `E_k`: `perm[ι]` is the index of
/// `σ∘ι`; `restricted` is the induced permutation of `E_{k1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaloisElement {
    pub name: String,
    pub perm: Vec<usize>,
    pub restricted: Vec<usize>,
    pub cyclotomic: Option<i64>,
}

impl GaloisElement {
    /// Checks that `perm` is a bijection compatible with restriction to
    /// `k1` and that the induced map on `E_{k1}` commutes with conjugation
    /// (`k1` is CM; `k` itself need not be).
    pub fn from_perm(e: &EmbeddingSet, name: String, perm: Vec<usize>, cyclotomic: Option<i64>) -> Result<Self> {
        let n = e.len();
        if perm.len() != n {
            return Err(Error::EmbeddingMismatch {
                expected: n,
                got: perm.len(),
            });
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::IncompatibleSigma(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        let mut restricted = vec![usize::MAX; 2 * e.r1];
        for x in 0..n {
            let (from, to) = (e.restrict(x), e.restrict(perm[x]));
            if restricted[from] == usize::MAX {
                restricted[from] = to;
            } else if restricted[from] != to {
                return Err(Error::IncompatibleSigma(format!(
                    "labels over the same k1 embedding map to different fibres ({})",
                    e.name(x)
                )));
            }
        }
        for r in 0..restricted.len() {
            if restricted[r ^ 1] != restricted[r] ^ 1 {
                return Err(Error::IncompatibleSigma(
                    "induced map on k1 does not commute with conjugation".into(),
                ));
            }
        }
        Ok(GaloisElement {
            name,
            perm,
            restricted,
            cyclotomic,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }
}

impl FieldTower {
    pub fn galois(&self, spec: &SigmaSpec) -> Result<GaloisElement> {
        let e = &self.embeddings;
        let n = e.len();
        let name = spec.to_string();
        match spec {
            SigmaSpec::Identity => GaloisElement::from_perm(e, name, (0..n).collect(), Some(1)),
            SigmaSpec::Conj => GaloisElement::from_perm(e, name, (0..n).map(|x| e.conj(x)).collect(), Some(-1)),
            SigmaSpec::Explicit { perm, cyclotomic } => {
                if perm.contains(&0) {
                    return Err(Error::Config("explicit sigma labels are 1-based".into()));
                }
                GaloisElement::from_perm(e, name, perm.iter().map(|x| x - 1).collect(), *cyclotomic)
            }
            SigmaSpec::Cyclotomic { a, sign } => {
                let perm = match self.automorphisms {
                    Automorphisms::Cyclotomic { conductor } => {
                        if *sign != 1 {
                            return Err(Error::IncompatibleSigma(
                                "sign lift only applies to non-abelian towers".into(),
                            ));
                        }
                        cyclotomic_perm(e, conductor as i64, *a)?
                    }
                    Automorphisms::RootOnePlusI => root_one_plus_i_perm(e, *a, *sign)?,
                    Automorphisms::Explicit => {
                        return Err(Error::IncompatibleSigma(format!(
                            "tower '{}' has no cyclotomic automorphism data",
                            self.name
                        )))
                    }
                };
                GaloisElement::from_perm(e, name, perm, Some(*a))
            }
        }
    }

    /// Generators of the automorphism group used by the curated checks,
    /// together with the identity and complex conjugation.
    pub fn generating_set(&self) -> Vec<SigmaSpec> {
        let mut out = vec![SigmaSpec::Identity, SigmaSpec::Conj];
        match self.automorphisms {
            Automorphisms::Cyclotomic { conductor } => {
                let m = conductor as i64;
                for a in 2..m - 1 {
                    if a.gcd(&m) == 1 {
                        out.push(SigmaSpec::Cyclotomic { a, sign: 1 });
                    }
                }
            }
            Automorphisms::RootOnePlusI => {
                out.push(SigmaSpec::Cyclotomic { a: 1, sign: -1 });
                for a in [3, 5] {
                    for sign in [1, -1] {
                        out.push(SigmaSpec::Cyclotomic { a, sign });
                    }
                }
                out.push(SigmaSpec::Cyclotomic { a: 7, sign: -1 });
            }
            Automorphisms::Explicit => {}
        }
        out
    }
}

/// `k1 = Q(ζ_m)`: each embedding sends the `k1` generator to some `ζ_m^b`,
/// and `σ_a∘τ_b = τ_{ab}`.
fn cyclotomic_perm(e: &EmbeddingSet, m: i64, a: i64) -> Result<Vec<usize>> {
    if a.gcd(&m) != 1 {
        return Err(Error::IncompatibleSigma(format!("{a} is not a unit modulo {m}")));
    }
    let exps: Vec<i64> = e
        .labels
        .iter()
        .map(|emb| {
            let z = emb.chain[1].to_c64();
            let b = (z.arg() * m as f64 / std::f64::consts::TAU).round() as i64;
            b.rem_euclid(m)
        })
        .collect();
    let mut perm = Vec::with_capacity(e.len());
    for &b in &exps {
        let target = (a * b).rem_euclid(m);
        let p = exps
            .iter()
            .position(|&x| x == target)
            .ok_or_else(|| Error::IncompatibleSigma(format!("no embedding with exponent {target}")))?;
        perm.push(p);
    }
    Ok(perm)
}

/// `σ(i) = i^a`, `σ(√2) = χ_8(a)√2`, `σ(α) = ±α` (`a ≡ 1 mod 4`) or `±β`
/// (`a ≡ 3 mod 4`), where `α = √(1+i)`, `β = √(1-i)`, `αβ = √2`.
fn root_one_plus_i_perm(e: &EmbeddingSet, a: i64, sign: i8) -> Result<Vec<usize>> {
    if a.rem_euclid(2) == 0 {
        return Err(Error::IncompatibleSigma(format!("{a} is not a unit modulo 8")));
    }
    let bits = e.bits;
    let one = Fx::from_int(1, bits);
    let alpha = one.add(&Fx::i(bits)).sqrt();
    let beta = alpha.conj();
    let root2 = alpha.mul(&beta);
    let chi8 = match a.rem_euclid(8) {
        1 | 7 => 1,
        _ => -1,
    };
    let s = |x: Fx, k: i64| if k < 0 { x.neg() } else { x };
    let sigma_alpha = s(
        if a.rem_euclid(4) == 1 {
            alpha.clone()
        } else {
            beta.clone()
        },
        sign as i64,
    );
    let sigma_beta = s(root2, chi8).div(&sigma_alpha);
    let close = |x: &Fx, y: &Fx| x.sub(y).to_c64().norm() < 1e-20;
    let mut perm = Vec::with_capacity(e.len());
    for emb in &e.labels {
        let z1 = &emb.chain[1];
        let z2 = &emb.chain[2];
        let image2 = if close(z2, &alpha) {
            sigma_alpha.clone()
        } else if close(z2, &alpha.neg()) {
            sigma_alpha.neg()
        } else if close(z2, &beta) {
            sigma_beta.clone()
        } else if close(z2, &beta.neg()) {
            sigma_beta.neg()
        } else {
            return Err(Error::InvalidTower(
                "embedding does not send the k generator to ±√(1±i)".into(),
            ));
        };
        let image1 = z1.powu(a.rem_euclid(4) as u32);
        let chain = vec![emb.chain[0].clone(), image1, image2];
        perm.push(
            e.locate(&chain)
                .ok_or_else(|| Error::IncompatibleSigma("image embedding not found".into()))?,
        );
    }
    Ok(perm)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    /// Keeps the fibre index `j`, moves `(i, bar)` like `σ` does.
    pub sigma1: Vec<usize>,
    /// Keeps `(i, bar)`, permutes inside each fibre.
    pub sigma2: Vec<usize>,
    pub epsilon: i8,
}

/// `σ = σ2∘σ1` with `σ1 τ_{i,j} = τ_{i',j}` or `τ̄_{i',j}` and
/// `σ2 τ_{i,j} = τ_{i,j'}`; `ε` is the signature of `σ2` in the total order.
pub fn sigma_decompose(sigma: &GaloisElement, e: &EmbeddingSet) -> Result<Decomposition> {
    let n = e.len();
    if sigma.perm.len() != n {
        return Err(Error::EmbeddingMismatch {
            expected: n,
            got: sigma.perm.len(),
        });
    }
    let mut sigma1 = vec![0; n];
    for (x, s1) in sigma1.iter_mut().enumerate() {
        let r = sigma.restricted[e.restrict(x)];
        *s1 = e.index(r / 2, e.labels[x].j, r % 2 == 1);
    }
    let mut sigma2 = vec![usize::MAX; n];
    for x in 0..n {
        sigma2[sigma1[x]] = sigma.perm[x];
    }
    for x in 0..n {
        if e.restrict(sigma2[x]) != e.restrict(x) {
            return Err(Error::IncompatibleSigma("σ2 leaves its fibre".into()));
        }
    }
    let p = Permutation::new(sigma2.iter().map(|x| x + 1).collect())?;
    Ok(Decomposition {
        sigma1,
        sigma2,
        epsilon: p.sign() as i8,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignIdentityReport {
    pub tower: String,
    pub sigma: String,
    pub epsilon: i8,
    /// `σ(∇)/∇`.
    pub nabla_ratio: i8,
    /// Square-free part of `∇^2`.
    pub square_free: i64,
    pub cyclotomic: Option<i64>,
    pub passed: bool,
}

/// `ε(σ2) = σ(∇)/∇`, the right side being `χ_d(a)` for `∇ ∈ Q·√d`.
pub fn verify_sign_identity(t: &FieldTower, sigma: &GaloisElement) -> Result<SignIdentityReport> {
    let dec = sigma_decompose(sigma, &t.embeddings)?;
    let nabla = period_constants(t).nabla;
    let d = nabla
        .d
        .to_i64()
        .ok_or_else(|| Error::Shape("square-free part too large".into()))?;
    let ratio = if d == 1 {
        1
    } else {
        let a = sigma.cyclotomic.ok_or(Error::MissingCyclotomicData(d))?;
        quadratic_character(&nabla.d, a)?
    };
    Ok(SignIdentityReport {
        tower: t.name.clone(),
        sigma: sigma.name.clone(),
        epsilon: dec.epsilon,
        nabla_ratio: ratio as i8,
        square_free: d,
        cyclotomic: sigma.cyclotomic,
        passed: dec.epsilon as i32 == ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmfield::{preset, PRESET_NAMES};

    fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
        b.iter().map(|&x| a[x]).collect()
    }

    #[test]
    fn parse_specs() {
        assert_eq!("conj".parse::<SigmaSpec>().unwrap(), SigmaSpec::Conj);
        assert_eq!(
            "3-".parse::<SigmaSpec>().unwrap(),
            SigmaSpec::Cyclotomic { a: 3, sign: -1 }
        );
        let p: SigmaSpec = "perm:2,1,4,3@7".parse().unwrap();
        assert_eq!(p.to_string(), "perm:2,1,4,3@7");
        assert!("x".parse::<SigmaSpec>().is_err());
    }

    #[test]
    fn identity_and_conjugation() {
        let t = preset("gauss-root-1pi").unwrap();
        let id = t.galois(&SigmaSpec::Identity).unwrap();
        let d = sigma_decompose(&id, &t.embeddings).unwrap();
        assert_eq!(
            (d.sigma1.clone(), d.sigma2.clone(), d.epsilon),
            (id.perm.clone(), id.perm.clone(), 1)
        );
        let c = t.galois(&SigmaSpec::Conj).unwrap();
        let d = sigma_decompose(&c, &t.embeddings).unwrap();
        assert_eq!(d.sigma1, c.perm);
        assert_eq!(d.sigma2, vec![0, 1, 2, 3]);
        assert_eq!(d.epsilon, 1);
        // conjugation is the cyclotomic element (7, +)
        assert_eq!(t.galois(&SigmaSpec::Cyclotomic { a: 7, sign: 1 }).unwrap().perm, c.perm);
    }

    #[test]
    fn fibre_transposition_is_odd() {
        let t = preset("gauss-root-1pi").unwrap();
        let s = t
            .galois(&SigmaSpec::Explicit {
                perm: vec![3, 2, 1, 4],
                cyclotomic: None,
            })
            .unwrap();
        assert_eq!(sigma_decompose(&s, &t.embeddings).unwrap().epsilon, -1);
        // ∇ has square-free part 2, so the ratio needs a cyclotomic parameter
        assert_eq!(verify_sign_identity(&t, &s), Err(Error::MissingCyclotomicData(2)));
        assert!(t
            .galois(&SigmaSpec::Explicit {
                perm: vec![2, 1, 3, 4],
                cyclotomic: None
            })
            .is_err());
    }

    #[test]
    fn chi8_both_signs_occur() {
        let t = preset("gauss-root-1pi").unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for a in [1, 3, 5, 7] {
            for sign in [1, -1] {
                let s = t.galois(&SigmaSpec::Cyclotomic { a, sign }).unwrap();
                let r = verify_sign_identity(&t, &s).unwrap();
                assert!(r.passed, "{r:?}");
                let chi8 = if a == 1 || a == 7 { 1 } else { -1 };
                assert_eq!(r.nabla_ratio, chi8);
                seen.insert(r.epsilon);
            }
        }
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn decomposition_reproduces_sigma() {
        for name in PRESET_NAMES {
            let t = preset(name).unwrap();
            let gens: Vec<GaloisElement> = t.generating_set().iter().map(|s| t.galois(s).unwrap()).collect();
            for s in &gens {
                let d = sigma_decompose(s, &t.embeddings).unwrap();
                assert_eq!(compose(&d.sigma2, &d.sigma1), s.perm, "{name} {}", s.name);
                assert!(verify_sign_identity(&t, s).unwrap().passed, "{name} {}", s.name);
            }
            // composites of generators are again automorphisms with compatible restriction
            for a in &gens {
                for b in &gens {
                    let p = compose(&a.perm, &b.perm);
                    assert!(GaloisElement::from_perm(&t.embeddings, "ab".into(), p, None).is_ok());
                }
            }
        }
    }

    #[test]
    fn epsilon_multiplicative_on_fibre_group() {
        let t = preset("gauss-root-1pi").unwrap();
        let e = &t.embeddings;
        let fibre_perms: Vec<GaloisElement> = t
            .generating_set()
            .iter()
            .map(|s| t.galois(s).unwrap())
            .filter(|g| g.restricted.iter().enumerate().all(|(i, &r)| i == r))
            .collect();
        assert!(fibre_perms.len() >= 2);
        for a in &fibre_perms {
            for b in &fibre_perms {
                let ab = GaloisElement::from_perm(e, "ab".into(), compose(&a.perm, &b.perm), None).unwrap();
                let eps = |g: &GaloisElement| sigma_decompose(g, e).unwrap().epsilon;
                assert_eq!(eps(&ab), eps(a) * eps(b));
            }
        }
    }
}
