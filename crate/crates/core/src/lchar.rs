//! Torus characters `Λ^(k)_{η,s}`, co-root pairings and a small symbolic
//! algebra of Hecke L-function ratios with formal period factors.

use crate::error::{Error, Result};
use crate::kostant::{InfinityType, Weight};
use crate::weyl::{self, check_label_perm, Root};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// `a + b·s` with integer coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Affine {
    pub a: i64,
    pub b: i64,
}

impl Affine {
    pub const ZERO: Affine = Affine { a: 0, b: 0 };

    pub fn constant(a: i64) -> Self {
        Affine { a, b: 0 }
    }

    pub fn s_plus(a: i64) -> Self {
        Affine { a, b: 1 }
    }

    pub fn add(self, o: Affine) -> Affine {
        Affine {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }

    pub fn sub(self, o: Affine) -> Affine {
        Affine {
            a: self.a - o.a,
            b: self.b - o.b,
        }
    }

    pub fn neg(self) -> Affine {
        Affine { a: -self.a, b: -self.b }
    }

    /// Substitute `s = s0`.
    pub fn at(self, s0: i64) -> Affine {
        Affine::constant(self.a + self.b * s0)
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, 1) => write!(f, "s"),
            (0, -1) => write!(f, "-s"),
            (0, b) => write!(f, "{b}s"),
            (a, 1) if a > 0 => write!(f, "s+{a}"),
            (a, 1) => write!(f, "s{a}"),
            (a, -1) if a > 0 => write!(f, "-s+{a}"),
            (a, -1) => write!(f, "-s{a}"),
            (a, b) if a > 0 => write!(f, "{b}s+{a}"),
            (a, b) => write!(f, "{b}s{a}"),
        }
    }
}

/// Hecke character label: opaque finite part plus infinity type, with the
/// accumulated Galois twist recorded as a permutation of embedding labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HeckeCharSymbol {
    pub name: String,
    pub field: String,
    pub infinity_type: InfinityType,
    pub twist: Vec<usize>,
}

impl HeckeCharSymbol {
    pub fn new(name: &str, field: &str, infinity_type: InfinityType) -> Self {
        let twist = (0..infinity_type.num_embeddings()).collect();
        HeckeCharSymbol {
            name: name.to_string(),
            field: field.to_string(),
            infinity_type,
            twist,
        }
    }

    pub fn degree(&self) -> usize {
        self.infinity_type.num_embeddings()
    }

    /// `σ ∘ η`, re-indexing the infinity type and composing the twist.
    pub fn sigma(&self, sigma: &[usize]) -> Result<Self> {
        let infinity_type = self.infinity_type.sigma_action(sigma)?;
        let twist = self.twist.iter().map(|&t| sigma[t]).collect();
        Ok(HeckeCharSymbol {
            name: self.name.clone(),
            field: self.field.clone(),
            infinity_type,
            twist,
        })
    }

    fn is_untwisted(&self) -> bool {
        self.twist.iter().enumerate().all(|(i, &t)| i == t)
    }
}

impl fmt::Display for HeckeCharSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_untwisted() {
            write!(f, "{}", self.name)
        } else {
            let t: Vec<String> = self.twist.iter().map(|x| x.to_string()).collect();
            write!(f, "^[{}]{}", t.join(","), self.name)
        }
    }
}

/// Character of the diagonal torus: `∏_j η(t_j)^{hecke_power_j} |t_j|^{abs_power_j}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusCharacter {
    pub hecke_power: Vec<i64>,
    pub abs_power: Vec<Affine>,
}

impl TorusCharacter {
    pub fn n(&self) -> usize {
        self.hecke_power.len()
    }

    pub fn inverse(&self) -> Self {
        TorusCharacter {
            hecke_power: self.hecke_power.iter().map(|x| -x).collect(),
            abs_power: self.abs_power.iter().map(|x| x.neg()).collect(),
        }
    }

    /// Algebraic weight at each embedding of the character at `s = s0`,
    /// using `|z|_v = z·z̄` so that `|·|` contributes 1 at every embedding.
    pub fn algebraic_weight(&self, eta: &InfinityType, s0: i64) -> Result<Weight> {
        let mut per = Vec::with_capacity(eta.num_embeddings());
        for &e in &eta.eta {
            let mut v = Vec::with_capacity(self.n());
            for (h, a) in self.hecke_power.iter().zip(&self.abs_power) {
                let ab = a.at(s0).a;
                v.push(h * e + ab);
            }
            per.push(v);
        }
        Weight::new(per)
    }
}

/// A character of `GL_1`: `η^{hecke_power} |·|^{abs_power}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gl1Char {
    pub hecke_power: i64,
    pub abs_power: Affine,
}

impl Gl1Char {
    pub fn is_trivial(&self) -> bool {
        self.hecke_power == 0 && self.abs_power == Affine::ZERO
    }
}

pub fn lambda_k(k: usize, n: usize) -> Result<TorusCharacter> {
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let mut hecke_power = vec![0; n];
    hecke_power[k - 1] = -1;
    let mut abs_power = vec![Affine::ZERO; n];
    abs_power[k - 1] = Affine {
        a: n as i64 - k as i64,
        b: -1,
    };
    for a in abs_power.iter_mut().skip(k) {
        *a = Affine::constant(-1);
    }
    Ok(TorusCharacter { hecke_power, abs_power })
}

/// Algebraic weight of `(Λ^(k)_{η,∞})^{-1}`: entry `k` is `η_ι - (n-k)`,
/// entries after `k` are 1, entries before `k` are 0.
pub fn inverse_lambda_weight(eta: &InfinityType, k: usize, n: usize) -> Result<Weight> {
    lambda_k(k, n)?.inverse().algebraic_weight(eta, 0)
}

/// `Λ ∘ α^∨` as the plain coordinate difference.
pub fn coroot_pairing(lam: &TorusCharacter, alpha: Root) -> Result<Gl1Char> {
    let n = lam.n();
    if alpha.i > n || alpha.j > n {
        return Err(Error::Shape(format!("root e_{} - e_{} in rank {n}", alpha.i, alpha.j)));
    }
    Ok(Gl1Char {
        hecke_power: lam.hecke_power[alpha.i - 1] - lam.hecke_power[alpha.j - 1],
        abs_power: lam.abs_power[alpha.i - 1].sub(lam.abs_power[alpha.j - 1]),
    })
}

/// Co-root pairing of the unitarily normalised character `Λ·δ_B^{-1/2}`,
/// which is the character entering the Gindikin–Karpelevich factors for
/// un-normalised induction. Differs from [`coroot_pairing`] by `|·|^{i-j}`.
pub fn langlands_pairing(lam: &TorusCharacter, alpha: Root) -> Result<Gl1Char> {
    let mut c = coroot_pairing(lam, alpha)?;
    c.abs_power.a += alpha.i as i64 - alpha.j as i64;
    Ok(c)
}

/// `L(offset, η^power)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LSymbol {
    pub offset: Affine,
    pub power: i64,
    pub chi: HeckeCharSymbol,
}

impl fmt::Display for LSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.power == 1 {
            write!(f, "L({}, {})", self.offset, self.chi)
        } else {
            write!(f, "L({}, {}^{})", self.offset, self.chi, self.power)
        }
    }
}

/// Formal period generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Atom {
    /// `|δ_k|`, the absolute discriminant.
    AbsDisc,
    Delta,
    Nabla,
    I,
    TwoPi,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Atom::AbsDisc => "|δ|",
            Atom::Delta => "Δ",
            Atom::Nabla => "∇",
            Atom::I => "i",
            Atom::TwoPi => "2π",
        };
        f.write_str(s)
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact rational coefficient times rational powers of the formal atoms.
/// The power of `i` is kept in `[0, 2)` by pulling `i² = -1` into the
/// coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    pub coeff: BigRational,
    pub atoms: BTreeMap<Atom, BigRational>,
}

impl Scalar {
    pub fn one() -> Self {
        Scalar::rational(BigRational::one())
    }

    pub fn rational(coeff: BigRational) -> Self {
        Scalar {
            coeff,
            atoms: BTreeMap::new(),
        }
    }

    pub fn atom(a: Atom, exp: BigRational) -> Self {
        let mut s = Scalar::one();
        s.atoms.insert(a, exp);
        s.normalize()
    }

    pub fn is_rational(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn exponent(&self, a: Atom) -> BigRational {
        self.atoms.get(&a).cloned().unwrap_or_else(BigRational::zero)
    }

    fn normalize(mut self) -> Self {
        if let Some(e) = self.atoms.get(&Atom::I).cloned() {
            let half = &e / BigRational::from_integer(BigInt::from(2));
            let q = half.floor().to_integer();
            if q.is_odd() {
                self.coeff = -self.coeff;
            }
            let rest = e - BigRational::from_integer(q * 2);
            self.atoms.insert(Atom::I, rest);
        }
        self.atoms.retain(|_, e| !e.is_zero());
        if self.coeff.is_zero() {
            self.atoms.clear();
        }
        self
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        let mut atoms = self.atoms.clone();
        for (a, e) in &o.atoms {
            let cur = atoms.entry(*a).or_insert_with(BigRational::zero);
            *cur = &*cur + e;
        }
        Scalar {
            coeff: &self.coeff * &o.coeff,
            atoms,
        }
        .normalize()
    }

    /// `self^e` for an integer `e`; the coefficient must be nonzero if `e < 0`.
    pub fn pow(&self, e: i64) -> Scalar {
        let coeff = if e >= 0 {
            num_traits::pow(self.coeff.clone(), e as usize)
        } else {
            num_traits::pow(self.coeff.recip(), (-e) as usize)
        };
        let f = BigRational::from_integer(BigInt::from(e));
        Scalar {
            coeff,
            atoms: self.atoms.iter().map(|(a, x)| (*a, x * &f)).collect(),
        }
        .normalize()
    }

    /// Rational power of the atom part only; coefficient must be 1.
    pub fn atoms_pow(&self, e: &BigRational) -> Scalar {
        Scalar {
            coeff: self.coeff.clone(),
            atoms: self.atoms.iter().map(|(a, x)| (*a, x * e)).collect(),
        }
        .normalize()
    }

    pub fn inv(&self) -> Scalar {
        self.pow(-1)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        for (a, e) in &self.atoms {
            if e.is_one() {
                write!(f, "·{a}")?;
            } else {
                write!(f, "·{a}^({e})")?;
            }
        }
        Ok(())
    }
}

/// Scalar times a quotient of products of L-symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormalLRatio {
    pub scalar: Scalar,
    pub numerator: Vec<LSymbol>,
    pub denominator: Vec<LSymbol>,
}

impl FormalLRatio {
    pub fn one() -> Self {
        FormalLRatio::from_scalar(Scalar::one())
    }

    pub fn from_scalar(scalar: Scalar) -> Self {
        FormalLRatio {
            scalar,
            numerator: Vec::new(),
            denominator: Vec::new(),
        }
    }

    pub fn ratio(num: LSymbol, den: LSymbol) -> Self {
        FormalLRatio {
            scalar: Scalar::one(),
            numerator: vec![num],
            denominator: vec![den],
        }
        .simplify()
    }

    pub fn is_one(&self) -> bool {
        self.scalar == Scalar::one() && self.numerator.is_empty() && self.denominator.is_empty()
    }

    /// Cancel identical symbols and sort both multisets.
    pub fn simplify(mut self) -> Self {
        self.numerator.sort();
        self.denominator.sort();
        let (mut num, mut den) = (Vec::new(), Vec::new());
        let (mut i, mut j) = (0, 0);
        while i < self.numerator.len() && j < self.denominator.len() {
            match self.numerator[i].cmp(&self.denominator[j]) {
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Less => {
                    num.push(self.numerator[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    den.push(self.denominator[j].clone());
                    j += 1;
                }
            }
        }
        num.extend_from_slice(&self.numerator[i..]);
        den.extend_from_slice(&self.denominator[j..]);
        self.numerator = num;
        self.denominator = den;
        self
    }

    pub fn mul(&self, o: &FormalLRatio) -> FormalLRatio {
        let mut numerator = self.numerator.clone();
        numerator.extend(o.numerator.iter().cloned());
        let mut denominator = self.denominator.clone();
        denominator.extend(o.denominator.iter().cloned());
        FormalLRatio {
            scalar: self.scalar.mul(&o.scalar),
            numerator,
            denominator,
        }
        .simplify()
    }

    pub fn scale(&self, s: &Scalar) -> FormalLRatio {
        FormalLRatio {
            scalar: self.scalar.mul(s),
            ..self.clone()
        }
    }

    /// Substitute `s = s0` in every offset.
    pub fn at(&self, s0: i64) -> FormalLRatio {
        let sub = |v: &Vec<LSymbol>| {
            v.iter()
                .map(|l| LSymbol {
                    offset: l.offset.at(s0),
                    ..l.clone()
                })
                .collect()
        };
        FormalLRatio {
            scalar: self.scalar.clone(),
            numerator: sub(&self.numerator),
            denominator: sub(&self.denominator),
        }
        .simplify()
    }
}

impl fmt::Display for FormalLRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.scalar)?;
        if !self.numerator.is_empty() || !self.denominator.is_empty() {
            let j = |v: &Vec<LSymbol>| {
                if v.is_empty() {
                    "1".to_string()
                } else {
                    v.iter().map(|l| l.to_string()).collect::<Vec<_>>().join("·")
                }
            };
            write!(f, " · {}/{}", j(&self.numerator), j(&self.denominator))?;
        }
        Ok(())
    }
}

/// Product over the inversion roots of `w_k` of `L(0, χ)/L(1, χ)` with
/// `χ = Λ_{η,s} ∘ α^∨` (normalised), i.e. the local Gindikin–Karpelevich
/// factor. Asserts that it telescopes to `L(s-n+k, η)/L(s, η)`.
pub fn gk_product(k: usize, n: usize, eta: &HeckeCharSymbol) -> Result<FormalLRatio> {
    let w = weyl::w_k(n, k)?;
    let lam = lambda_k(n, n)?;
    let mut out = FormalLRatio::one();
    for (i, j) in w.inversion_set() {
        let chi = langlands_pairing(&lam, Root::new(i, j)?)?;
        // L(a, η^p |·|^b) = L(a + b, η^p)
        let sym = |a: i64| LSymbol {
            offset: Affine::constant(a).add(chi.abs_power),
            power: chi.hecke_power,
            chi: eta.clone(),
        };
        out = out.mul(&FormalLRatio {
            scalar: Scalar::one(),
            numerator: vec![sym(0)],
            denominator: vec![sym(1)],
        });
    }
    let expected = if k == n {
        FormalLRatio::one()
    } else {
        FormalLRatio::ratio(
            LSymbol {
                offset: Affine::s_plus(k as i64 - n as i64),
                power: 1,
                chi: eta.clone(),
            },
            LSymbol {
                offset: Affine::s_plus(0),
                power: 1,
                chi: eta.clone(),
            },
        )
    };
    assert_eq!(out, expected, "Gindikin–Karpelevich product must telescope");
    Ok(out)
}

/// Coefficients `|δ_k|^{(k-n)/2} L(s-n+k, η)/L(s, η)` for `k = 1..n`,
/// optionally specialised at `s = 0`.
pub fn constant_term_coefficients(n: usize, eta: &HeckeCharSymbol, s_at_zero: bool) -> Result<Vec<FormalLRatio>> {
    (1..=n)
        .map(|k| {
            let gk = gk_product(k, n, eta)?;
            let e = rat(k as i64 - n as i64, 2);
            let c = gk.scale(&Scalar::atom(Atom::AbsDisc, e));
            Ok(if s_at_zero { c.at(0) } else { c })
        })
        .collect()
}

/// The period `(i^{[k:Q]/2} Δ)^d` paired with `L(-d, η)/L(0, η)`.
pub fn harder_period(degree: usize, d: i64) -> Scalar {
    let m = degree as i64 / 2;
    Scalar::atom(Atom::I, BigRational::from_integer(BigInt::from(m)))
        .mul(&Scalar::atom(Atom::Delta, BigRational::one()))
        .pow(d)
}

/// `L(-d, η)/L(0, η)` times its Harder period.
pub fn harder_atom(eta: &HeckeCharSymbol, d: i64) -> FormalLRatio {
    let l = |a: i64| LSymbol {
        offset: Affine::constant(a),
        power: 1,
        chi: eta.clone(),
    };
    FormalLRatio {
        scalar: harder_period(eta.degree(), d),
        numerator: vec![l(-d)],
        denominator: vec![l(0)],
    }
    .simplify()
}

/// Splits a well-formed expression into its rational coefficient and the
/// character/shift of its Harder atom (`None` when the expression is rational).
pub fn harder_decompose(r: &FormalLRatio, n: usize) -> Result<(BigRational, Option<(HeckeCharSymbol, i64)>)> {
    if r.numerator.is_empty() && r.denominator.is_empty() {
        if !r.scalar.is_rational() {
            return Err(Error::NonCriticalAtom(format!("unpaired period in {}", r.scalar)));
        }
        return Ok((r.scalar.coeff.clone(), None));
    }
    if r.numerator.len() != 1 || r.denominator.len() != 1 {
        return Err(Error::NonCriticalAtom(format!("{r}: expected one L-ratio")));
    }
    let (num, den) = (&r.numerator[0], &r.denominator[0]);
    if num.chi != den.chi || num.power != 1 || den.power != 1 {
        return Err(Error::NonCriticalAtom(format!("{r}: mismatched characters")));
    }
    if num.offset.b != 0 || den.offset != Affine::ZERO {
        return Err(Error::NonCriticalAtom(format!(
            "{r}: offsets not specialised to a critical ratio"
        )));
    }
    let d = -num.offset.a;
    if d < 1 || d > n as i64 {
        return Err(Error::NonCriticalAtom(format!(
            "{r}: offset {} not in -n..-1",
            num.offset.a
        )));
    }
    let period = harder_period(num.chi.degree(), d);
    let rest = r.scalar.mul(&period.inv());
    if !rest.is_rational() {
        return Err(Error::NonCriticalAtom(format!(
            "{r}: L({}, {})/L(0, {}) needs the period {period}",
            -d, num.chi, num.chi
        )));
    }
    Ok((rest.coeff, Some((num.chi.clone(), d))))
}

/// Formal Galois action: the rational part is fixed and every Harder atom
/// `(i^{[k:Q]/2}Δ)^d L(-d,η)/L(0,η)` maps to the same expression with `ση`.
/// Anything else is refused as a non-critical atom.
pub fn sigma_on_ratio(r: &FormalLRatio, sigma: &[usize], n: usize) -> Result<FormalLRatio> {
    check_label_perm(sigma)?;
    let (coeff, atom) = harder_decompose(r, n)?;
    Ok(match atom {
        None => FormalLRatio::from_scalar(Scalar::rational(coeff)),
        Some((chi, d)) => harder_atom(&chi.sigma(sigma)?, d).scale(&Scalar::rational(coeff)),
    })
}

/// Integer square root of a nonnegative big rational if it is a perfect square.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Helper for reports: exponent as `i64` when integral.
pub fn as_integer(q: &BigRational) -> Option<i64> {
    if q.is_integer() {
        q.to_integer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eta() -> HeckeCharSymbol {
        HeckeCharSymbol::new("η", "gauss", InfinityType::paired(vec![0, 2]).unwrap())
    }

    fn l(a: i64, b: i64, chi: &HeckeCharSymbol) -> LSymbol {
        LSymbol {
            offset: Affine { a, b },
            power: 1,
            chi: chi.clone(),
        }
    }

    #[test]
    fn lambda_examples() {
        let l32 = lambda_k(2, 3).unwrap();
        assert_eq!(l32.hecke_power, vec![0, -1, 0]);
        let at0: Vec<i64> = l32.abs_power.iter().map(|a| a.at(0).a).collect();
        assert_eq!(at0, vec![0, 1, -1]);
        let l22 = lambda_k(2, 2).unwrap();
        assert_eq!(l22.hecke_power, vec![0, -1]);
        assert_eq!(l22.abs_power, vec![Affine::ZERO, Affine { a: 0, b: -1 }]);
        assert!(lambda_k(0, 2).is_err());
        let w = inverse_lambda_weight(&InfinityType::paired(vec![-1, 5]).unwrap(), 2, 3).unwrap();
        assert_eq!(w.per_embedding, vec![vec![0, -2, 1], vec![0, 4, 1]]);
    }

    #[test]
    fn pairings() {
        let lam = lambda_k(3, 3).unwrap();
        let c = langlands_pairing(&lam, Root::new(1, 3).unwrap()).unwrap();
        assert_eq!((c.hecke_power, c.abs_power), (1, Affine { a: -2, b: 1 }));
        let c = langlands_pairing(&lam, Root::new(2, 3).unwrap()).unwrap();
        assert_eq!((c.hecke_power, c.abs_power), (1, Affine { a: -1, b: 1 }));
        let triv = TorusCharacter {
            hecke_power: vec![0; 3],
            abs_power: vec![Affine::ZERO; 3],
        };
        assert!(coroot_pairing(&triv, Root::new(1, 2).unwrap()).unwrap().is_trivial());
    }

    #[test]
    fn telescoping_examples() {
        let e = eta();
        assert_eq!(
            gk_product(1, 3, &e).unwrap(),
            FormalLRatio::ratio(l(-2, 1, &e), l(0, 1, &e))
        );
        assert!(gk_product(3, 3, &e).unwrap().is_one());
        assert_eq!(
            gk_product(4, 10, &e).unwrap(),
            FormalLRatio::ratio(l(-6, 1, &e), l(0, 1, &e))
        );
    }

    #[test]
    fn constant_term_examples() {
        let e = eta();
        let c = constant_term_coefficients(2, &e, true).unwrap();
        let expected = FormalLRatio::ratio(l(-1, 0, &e), l(0, 0, &e)).scale(&Scalar::atom(Atom::AbsDisc, rat(-1, 2)));
        assert_eq!(c[0], expected);
        assert!(c[1].is_one());
        let c3 = constant_term_coefficients(3, &e, true).unwrap();
        assert_eq!(c3[1], expected);
    }

    #[test]
    fn scalar_i_normalization() {
        let i = Scalar::atom(Atom::I, rat(1, 1));
        let minus_one = i.pow(2);
        assert_eq!(minus_one, Scalar::rational(rat(-1, 1)));
        assert_eq!(i.pow(4), Scalar::one());
        assert_eq!(
            i.pow(-1),
            Scalar::atom(Atom::I, rat(1, 1)).mul(&Scalar::rational(rat(-1, 1)))
        );
    }

    #[test]
    fn sigma_rule() {
        let e = eta();
        let r = harder_atom(&e, 1);
        assert_eq!(sigma_on_ratio(&r, &[0, 1], 2).unwrap(), r);
        let s = sigma_on_ratio(&r, &[1, 0], 2).unwrap();
        assert_eq!(s, harder_atom(&e.sigma(&[1, 0]).unwrap(), 1));
        assert_eq!(s.numerator[0].chi.infinity_type.eta, vec![2, 0]);
        let bare = FormalLRatio::ratio(l(-1, 0, &e), l(0, 0, &e));
        assert!(matches!(
            sigma_on_ratio(&bare, &[1, 0], 2),
            Err(Error::NonCriticalAtom(_))
        ));
        let unspecialised = FormalLRatio::ratio(l(-1, 1, &e), l(0, 1, &e)).scale(&harder_period(2, 1));
        assert!(matches!(
            sigma_on_ratio(&unspecialised, &[1, 0], 2),
            Err(Error::NonCriticalAtom(_))
        ));
        let rational = FormalLRatio::from_scalar(Scalar::rational(rat(3, 7)));
        assert_eq!(sigma_on_ratio(&rational, &[1, 0], 2).unwrap(), rational);
    }

    proptest! {
        #[test]
        fn telescoping_all((n, k) in (1usize..=10).prop_flat_map(|n| (Just(n), 1..=n))) {
            let e = eta();
            let g = gk_product(k, n, &e).unwrap();
            if k == n {
                prop_assert!(g.is_one());
            } else {
                prop_assert_eq!(g, FormalLRatio::ratio(l(k as i64 - n as i64, 1, &e), l(0, 1, &e)));
            }
        }

        #[test]
        fn sigma_composition(
            d in 1i64..=4,
            coeff in -20i64..20,
            s in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
            t in Just(vec![0usize, 1, 2, 3]).prop_shuffle())
        {
            // label maps commuting with the pairing (0 1)(2 3)
            let lift = |p: &Vec<usize>| -> Vec<usize> {
                let (a, b) = (p[0] % 2, p[1] % 2);
                vec![2 * a + (p[2] % 2), 2 * a + 1 - (p[2] % 2), 2 * (1 - a) + b, 2 * (1 - a) + 1 - b]
            };
            let (s, t) = (lift(&s), lift(&t));
            let e = HeckeCharSymbol::new("η", "zeta5", InfinityType::paired(vec![0, 4, 5, -1]).unwrap());
            let r = harder_atom(&e, d).scale(&Scalar::rational(rat(coeff, 3)));
            let st: Vec<usize> = (0..4).map(|i| s[t[i]]).collect();
            let lhs = sigma_on_ratio(&r, &st, 4).unwrap();
            let rhs = sigma_on_ratio(&sigma_on_ratio(&r, &t, 4).unwrap(), &s, 4).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn scalar_mul_inverse(a in -3i64..4, b in -3i64..4, c in 1i64..9) {
            let x = Scalar::atom(Atom::I, rat(a, 2))
                .mul(&Scalar::atom(Atom::Delta, rat(b, 1)))
                .mul(&Scalar::rational(rat(c, 5)));
            prop_assert_eq!(x.mul(&x.inv()), Scalar::one());
        }
    }
}
