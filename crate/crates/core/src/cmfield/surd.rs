//! Exact quadratic surds `q·√d` and the Kronecker symbol.

use super::fixed::Fx;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::fmt;

/// `q·√d` with `d` square-free; `√d = i·√|d|` for `d < 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct QuadSurd {
    #[serde(serialize_with = "ser_rat")]
    pub q: BigRational,
    #[serde(serialize_with = "ser_int")]
    pub d: BigInt,
}

fn ser_rat<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn ser_int<S: serde::Serializer>(d: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&d.to_string())
}

/// `n = s^2 · f` with `f` square-free (sign kept in `f`).
pub fn square_free_split(n: &BigInt) -> (BigInt, BigInt) {
    assert!(!n.is_zero(), "square-free part of zero");
    let mut rest = n.abs();
    let mut s = BigInt::one();
    let mut f = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let mut e = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            f *= &p;
        }
        p += 1;
    }
    f *= rest;
    if n.is_negative() {
        f = -f;
    }
    (s, f)
}

impl QuadSurd {
    pub fn rational(q: BigRational) -> Self {
        QuadSurd { q, d: BigInt::one() }
    }

    /// Principal square root of a nonzero rational.
    pub fn sqrt(r: &BigRational) -> Self {
        // a/b = a·b / b^2
        let ab = r.numer() * r.denom();
        let (s, f) = square_free_split(&ab);
        QuadSurd {
            q: BigRational::new(s, r.denom().clone()),
            d: f,
        }
    }

    /// `(q√d)^2 = q^2·d`.
    pub fn square(&self) -> BigRational {
        &self.q * &self.q * BigRational::from_integer(self.d.clone())
    }

    pub fn is_rational(&self) -> bool {
        self.d.is_one()
    }

    pub fn mul(&self, o: &QuadSurd) -> QuadSurd {
        // √d1·√d2 = √(d1 d2), except -√(d1 d2) when both are negative
        let prod = &self.d * &o.d;
        let (s, f) = square_free_split(&prod);
        let mut q = &self.q * &o.q * BigRational::from_integer(s);
        if self.d.is_negative() && o.d.is_negative() {
            q = -q;
        }
        QuadSurd { q, d: f }
    }

    pub fn pow(&self, e: u32) -> QuadSurd {
        let mut acc = QuadSurd::rational(BigRational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn scale(&self, c: &BigRational) -> QuadSurd {
        QuadSurd {
            q: &self.q * c,
            d: self.d.clone(),
        }
    }

    pub fn eval(&self, bits: u32) -> Fx {
        let root = Fx::from_rational(&BigRational::from_integer(self.d.clone()), bits).sqrt();
        root.mul(&Fx::from_rational(&self.q, bits))
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d.is_one() {
            write!(f, "{}", self.q)
        } else {
            write!(f, "{}·√({})", self.q, self.d)
        }
    }
}

/// Discriminant of `Q(√d)` for square-free `d != 1`.
pub fn field_discriminant(d: &BigInt) -> BigInt {
    if d.mod_floor(&BigInt::from(4)) == BigInt::one() {
        d.clone()
    } else {
        d * 4
    }
}

/// Kronecker symbol `(D / a)` for integers `D`, `a`.
pub fn kronecker(dd: &BigInt, a: i64) -> i32 {
    if a == 0 {
        return if dd.abs().is_one() { 1 } else { 0 };
    }
    let mut sign = 1;
    let mut a = a;
    if a < 0 {
        a = -a;
        if dd.is_negative() {
            sign = -1;
        }
    }
    let mut twos = 0;
    while a % 2 == 0 {
        a /= 2;
        twos += 1;
    }
    if twos > 0 {
        if dd.is_even() {
            return 0;
        }
        let r = dd.mod_floor(&BigInt::from(8)).to_i64().unwrap();
        if twos % 2 == 1 && (r == 3 || r == 5) {
            sign = -sign;
        }
    }
    sign * jacobi(dd, a)
}

/// Jacobi symbol `(x / m)` for odd positive `m`.
fn jacobi(x: &BigInt, m: i64) -> i32 {
    let m_big = BigInt::from(m);
    let mut a = x.mod_floor(&m_big).to_i64().unwrap();
    let mut n = m;
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// `σ_a(√d) / √d` for the cyclotomic automorphism `ζ ↦ ζ^a`.
pub fn quadratic_character(d: &BigInt, a: i64) -> Result<i32> {
    if d.is_one() {
        return Ok(1);
    }
    let v = kronecker(&field_discriminant(d), a);
    if v == 0 {
        return Err(Error::IncompatibleSigma(format!(
            "cyclotomic parameter {a} is not a unit modulo the conductor of Q(√{d})"
        )));
    }
    Ok(v)
}
