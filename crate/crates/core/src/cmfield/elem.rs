//! Exact arithmetic in a tower `Q = F_0 ⊂ F_1 ⊂ … ⊂ F_L`, each layer a
//! simple extension by a monic polynomial over the layer below. Elements
//! of `F_l` are dense coefficient vectors over `F_{l-1}` in the power
//! basis of the layer generator.

use super::fixed::Fx;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::Value;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Elem {
    Rat(BigRational),
    Poly(Vec<Elem>),
}

impl Elem {
    pub fn rat(&self) -> Option<&BigRational> {
        match self {
            Elem::Rat(q) => Some(q),
            Elem::Poly(_) => None,
        }
    }

    fn coeffs(&self) -> &[Elem] {
        match self {
            Elem::Poly(c) => c,
            Elem::Rat(_) => panic!("rational used where a layered element was expected"),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Elem::Rat(q) => q.is_zero(),
            Elem::Poly(c) => c.iter().all(Elem::is_zero),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Elem::Rat(q) => Value::String(q.to_string()),
            Elem::Poly(c) => Value::Array(c.iter().map(Elem::to_json).collect()),
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

/// Layer `l` (1-based) is `F_{l-1}[x] / (x^d + c_{d-1} x^{d-1} + … + c_0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layers {
    /// `polys[l-1] = [c_0, …, c_{d-1}]`, entries in `F_{l-1}`.
    pub polys: Vec<Vec<Elem>>,
}

impl Layers {
    pub fn new(polys: Vec<Vec<Elem>>) -> Result<Self> {
        let layers = Layers { polys };
        for l in 1..=layers.top() {
            if layers.polys[l - 1].is_empty() {
                return Err(Error::InvalidTower(format!("layer {l} has degree 0")));
            }
            for c in &layers.polys[l - 1] {
                layers.check(l - 1, c)?;
            }
        }
        Ok(layers)
    }

    pub fn top(&self) -> usize {
        self.polys.len()
    }

    pub fn degree(&self, l: usize) -> usize {
        self.polys[l - 1].len()
    }

    /// `[F_l : Q]`.
    pub fn absolute_degree(&self, l: usize) -> usize {
        (1..=l).map(|j| self.degree(j)).product()
    }

    pub fn check(&self, l: usize, a: &Elem) -> Result<()> {
        match (l, a) {
            (0, Elem::Rat(_)) => Ok(()),
            (0, Elem::Poly(_)) => Err(Error::InvalidTower("nested element at the rational layer".into())),
            (_, Elem::Rat(_)) => Err(Error::InvalidTower(format!("rational at layer {l}"))),
            (_, Elem::Poly(c)) => {
                if c.len() != self.degree(l) {
                    return Err(Error::InvalidTower(format!(
                        "layer {l} element has {} coefficients, expected {}",
                        c.len(),
                        self.degree(l)
                    )));
                }
                c.iter().try_for_each(|x| self.check(l - 1, x))
            }
        }
    }

    /// Reads nested JSON arrays of rationals ("p/q" strings or integers);
    /// short arrays are padded with zeros and a scalar is a constant.
    pub fn parse(&self, l: usize, v: &Value) -> Result<Elem> {
        if l == 0 {
            return parse_rational(v).map(Elem::Rat);
        }
        match v {
            Value::Array(items) => {
                let d = self.degree(l);
                if items.len() > d {
                    return Err(Error::InvalidTower(format!(
                        "layer {l} element has {} coefficients, degree is {d}",
                        items.len()
                    )));
                }
                let mut c = items.iter().map(|x| self.parse(l - 1, x)).collect::<Result<Vec<_>>>()?;
                c.resize(d, self.zero(l - 1));
                Ok(Elem::Poly(c))
            }
            _ => Ok(self.from_rat(l, parse_rational(v)?)),
        }
    }

    pub fn zero(&self, l: usize) -> Elem {
        if l == 0 {
            Elem::Rat(BigRational::zero())
        } else {
            Elem::Poly(vec![self.zero(l - 1); self.degree(l)])
        }
    }

    pub fn from_rat(&self, l: usize, q: BigRational) -> Elem {
        if l == 0 {
            Elem::Rat(q)
        } else {
            self.lift(l, self.from_rat(l - 1, q))
        }
    }

    pub fn from_int(&self, l: usize, n: i64) -> Elem {
        self.from_rat(l, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn one(&self, l: usize) -> Elem {
        self.from_int(l, 1)
    }

    /// Embeds `a ∈ F_{l-1}` into `F_l`.
    pub fn lift(&self, l: usize, a: Elem) -> Elem {
        let mut c = vec![self.zero(l - 1); self.degree(l)];
        c[0] = a;
        Elem::Poly(c)
    }

    /// Embeds `a ∈ F_from` into `F_to`.
    pub fn lift_to(&self, from: usize, to: usize, mut a: Elem) -> Elem {
        for l in from + 1..=to {
            a = self.lift(l, a);
        }
        a
    }

    /// The generator of layer `l`, reduced modulo its polynomial.
    pub fn gen(&self, l: usize) -> Elem {
        let d = self.degree(l);
        if d == 1 {
            return Elem::Poly(vec![self.neg(l - 1, &self.polys[l - 1][0])]);
        }
        let mut c = vec![self.zero(l - 1); d];
        c[1] = self.one(l - 1);
        Elem::Poly(c)
    }

    pub fn add(&self, l: usize, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x + y),
            _ => Elem::Poly(
                a.coeffs()
                    .iter()
                    .zip(b.coeffs())
                    .map(|(x, y)| self.add(l - 1, x, y))
                    .collect(),
            ),
        }
    }

    pub fn neg(&self, l: usize, a: &Elem) -> Elem {
        match a {
            Elem::Rat(x) => Elem::Rat(-x),
            Elem::Poly(c) => Elem::Poly(c.iter().map(|x| self.neg(l - 1, x)).collect()),
        }
    }

    pub fn sub(&self, l: usize, a: &Elem, b: &Elem) -> Elem {
        self.add(l, a, &self.neg(l, b))
    }

    pub fn mul(&self, l: usize, a: &Elem, b: &Elem) -> Elem {
        if l == 0 {
            return Elem::Rat(a.rat().unwrap() * b.rat().unwrap());
        }
        let d = self.degree(l);
        let (ac, bc) = (a.coeffs(), b.coeffs());
        let mut prod = vec![self.zero(l - 1); 2 * d - 1];
        for (i, x) in ac.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in bc.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                prod[i + j] = self.add(l - 1, &prod[i + j], &self.mul(l - 1, x, y));
            }
        }
        // x^d = -Σ c_i x^i
        let poly = &self.polys[l - 1];
        for k in (d..2 * d - 1).rev() {
            let top = std::mem::replace(&mut prod[k], self.zero(l - 1));
            if top.is_zero() {
                continue;
            }
            for (i, c) in poly.iter().enumerate() {
                let t = self.mul(l - 1, &top, c);
                prod[k - d + i] = self.sub(l - 1, &prod[k - d + i], &t);
            }
        }
        prod.truncate(d);
        Elem::Poly(prod)
    }

    pub fn pow(&self, l: usize, a: &Elem, e: u32) -> Elem {
        let mut acc = self.one(l);
        for _ in 0..e {
            acc = self.mul(l, &acc, a);
        }
        acc
    }

    /// Matrix of multiplication by `a` on the power basis of layer `l`,
    /// entries in `F_{l-1}`; column `j` holds `a·x^j`.
    pub fn mul_matrix(&self, l: usize, a: &Elem) -> Vec<Vec<Elem>> {
        let d = self.degree(l);
        let mut cols = Vec::with_capacity(d);
        let mut basis = self.one(l);
        let x = if d == 1 { self.one(l) } else { self.gen(l) };
        for _ in 0..d {
            cols.push(self.mul(l, a, &basis).coeffs().to_vec());
            basis = self.mul(l, &basis, &x);
        }
        (0..d).map(|r| (0..d).map(|c| cols[c][r].clone()).collect()).collect()
    }

    /// `tr_{F_l / F_{l-1}}(a)`.
    pub fn trace(&self, l: usize, a: &Elem) -> Elem {
        let m = self.mul_matrix(l, a);
        let mut acc = self.zero(l - 1);
        for (i, row) in m.iter().enumerate() {
            acc = self.add(l - 1, &acc, &row[i]);
        }
        acc
    }

    /// `N_{F_l / F_{l-1}}(a)`.
    pub fn norm(&self, l: usize, a: &Elem) -> Elem {
        self.det(l - 1, self.mul_matrix(l, a))
    }

    pub fn norm_to(&self, from: usize, to: usize, mut a: Elem) -> Elem {
        for l in (to + 1..=from).rev() {
            a = self.norm(l, &a);
        }
        a
    }

    pub fn trace_to(&self, from: usize, to: usize, mut a: Elem) -> Elem {
        for l in (to + 1..=from).rev() {
            a = self.trace(l, &a);
        }
        a
    }

    /// Determinant of a square matrix over `F_l`: Gaussian elimination over
    /// `Q`, cofactor expansion over the higher layers (no inversion needed).
    pub fn det(&self, l: usize, m: Vec<Vec<Elem>>) -> Elem {
        if l == 0 {
            let q: Vec<Vec<BigRational>> = m
                .into_iter()
                .map(|r| r.into_iter().map(|e| e.rat().unwrap().clone()).collect())
                .collect();
            return Elem::Rat(det_rational(q));
        }
        let n = m.len();
        match n {
            0 => self.one(l),
            1 => m[0][0].clone(),
            _ => {
                let mut acc = self.zero(l);
                for c in 0..n {
                    if m[0][c].is_zero() {
                        continue;
                    }
                    let minor: Vec<Vec<Elem>> = m[1..]
                        .iter()
                        .map(|r| {
                            r.iter()
                                .enumerate()
                                .filter(|&(j, _)| j != c)
                                .map(|(_, x)| x.clone())
                                .collect()
                        })
                        .collect();
                    let t = self.mul(l, &m[0][c], &self.det(l, minor));
                    acc = if c % 2 == 0 {
                        self.add(l, &acc, &t)
                    } else {
                        self.sub(l, &acc, &t)
                    };
                }
                acc
            }
        }
    }

    /// `det[tr_{F_l/F_{l-1}}(x_i x_j)]`.
    pub fn relative_discriminant(&self, l: usize, basis: &[Elem]) -> Result<Elem> {
        let d = self.degree(l);
        if basis.len() != d {
            return Err(Error::Shape(format!(
                "relative basis has {} elements, degree is {d}",
                basis.len()
            )));
        }
        let m: Vec<Vec<Elem>> = basis
            .iter()
            .map(|x| basis.iter().map(|y| self.trace(l, &self.mul(l, x, y))).collect())
            .collect();
        let det = self.det(l - 1, m);
        if det.is_zero() {
            return Err(Error::SingularBasis);
        }
        Ok(det)
    }

    /// Image of `a ∈ F_l` under the embedding sending the generator of layer
    /// `j` to `chain[j-1]`.
    pub fn eval(&self, l: usize, a: &Elem, chain: &[Fx], bits: u32) -> Fx {
        match a {
            Elem::Rat(q) => Fx::from_rational(q, bits),
            Elem::Poly(c) => {
                let z = &chain[l - 1];
                let mut acc = Fx::zero(bits);
                for x in c.iter().rev() {
                    acc = acc.mul(z).add(&self.eval(l - 1, x, chain, bits));
                }
                acc
            }
        }
    }
}

pub fn det_rational(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut acc = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            m.swap(p, c);
            acc = -acc;
        }
        let piv = m[c][c].clone();
        acc *= &piv;
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &piv;
            for cc in c..n {
                let t = &f * &m[c][cc];
                m[r][cc] -= t;
            }
        }
    }
    acc
}

pub fn parse_rational(v: &Value) -> Result<BigRational> {
    let bad = || Error::Config(format!("not a rational number: {v}"));
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|x| BigRational::from_integer(BigInt::from(x)))
            .ok_or_else(bad),
        Value::String(s) => {
            let s = s.trim();
            match s.split_once('/') {
                Some((a, b)) => {
                    let a: BigInt = a.trim().parse().map_err(|_| bad())?;
                    let b: BigInt = b.trim().parse().map_err(|_| bad())?;
                    if b.is_zero() {
                        return Err(bad());
                    }
                    Ok(BigRational::new(a, b))
                }
                None => s.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| bad()),
            }
        }
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lchar::rat;
    use serde_json::json;

    fn gauss_root() -> Layers {
        // Q ⊂ Q ⊂ Q(i) ⊂ Q(i, √(1+i))
        let l = Layers::new(vec![
            vec![Elem::Rat(rat(0, 1))],
            vec![
                Elem::Poly(vec![Elem::Rat(rat(1, 1))]),
                Elem::Poly(vec![Elem::Rat(rat(0, 1))]),
            ],
        ])
        .unwrap();
        let one_plus_i = l.parse(2, &json!([1, 1])).unwrap();
        let minus = l.neg(2, &one_plus_i);
        let mut polys = l.polys.clone();
        polys.push(vec![minus, l.zero(2)]);
        Layers::new(polys).unwrap()
    }

    #[test]
    fn relative_discriminant_examples() {
        let t = gauss_root();
        let i = t.gen(2);
        assert_eq!(t.mul(2, &i, &i), t.from_int(2, -1));
        let d = t.relative_discriminant(2, &[t.one(2), i]).unwrap();
        assert_eq!(t.norm_to(1, 0, d), Elem::Rat(rat(-4, 1)));
        let theta = t.gen(3);
        let d = t.relative_discriminant(3, &[t.one(3), theta.clone()]).unwrap();
        assert_eq!(d, t.parse(2, &json!([4, 4])).unwrap());
        assert_eq!(t.norm(2, &d), t.from_int(1, 32));
        assert_eq!(
            t.relative_discriminant(3, &[theta.clone(), theta]),
            Err(Error::SingularBasis)
        );
    }

    #[test]
    fn norm_is_multiplicative() {
        let t = gauss_root();
        let a = t.parse(3, &json!([[1, 2], [3, -1]])).unwrap();
        let b = t.parse(3, &json!([["1/2", 0], [1, 1]])).unwrap();
        let lhs = t.norm_to(3, 0, t.mul(3, &a, &b));
        let rhs = t.mul(0, &t.norm_to(3, 0, a), &t.norm_to(3, 0, b));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn rational_determinant() {
        let m = vec![vec![rat(2, 1), rat(0, 1)], vec![rat(0, 1), rat(-2, 1)]];
        assert_eq!(det_rational(m), rat(-4, 1));
    }
}
