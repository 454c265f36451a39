//! Fixed-point complex numbers over `BigInt` and certified polynomial root
//! isolation, used as an independent numerical oracle for the exact field
//! arithmetic.

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Default working precision in bits (about 38 decimal digits).
pub const WORK_BITS: u32 = 128;
const MAX_BITS: u32 = 1024;

/// `(re + i·im) / 2^bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fx {
    pub re: BigInt,
    pub im: BigInt,
    pub bits: u32,
}

impl Fx {
    pub fn zero(bits: u32) -> Self {
        Fx {
            re: BigInt::zero(),
            im: BigInt::zero(),
            bits,
        }
    }

    pub fn from_rational(q: &BigRational, bits: u32) -> Self {
        Fx {
            re: (q.numer() << bits) / q.denom(),
            im: BigInt::zero(),
            bits,
        }
    }

    pub fn from_int(n: i64, bits: u32) -> Self {
        Fx {
            re: BigInt::from(n) << bits,
            im: BigInt::zero(),
            bits,
        }
    }

    pub fn from_c64(z: Complex64, bits: u32) -> Self {
        Fx {
            re: f64_to_fixed(z.re, bits),
            im: f64_to_fixed(z.im, bits),
            bits,
        }
    }

    pub fn i(bits: u32) -> Self {
        Fx {
            re: BigInt::zero(),
            im: BigInt::from(1) << bits,
            bits,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(fixed_to_f64(&self.re, self.bits), fixed_to_f64(&self.im, self.bits))
    }

    pub fn add(&self, o: &Fx) -> Fx {
        Fx {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
            bits: self.bits,
        }
    }

    pub fn sub(&self, o: &Fx) -> Fx {
        Fx {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
            bits: self.bits,
        }
    }

    pub fn neg(&self) -> Fx {
        Fx {
            re: -&self.re,
            im: -&self.im,
            bits: self.bits,
        }
    }

    pub fn conj(&self) -> Fx {
        Fx {
            re: self.re.clone(),
            im: -&self.im,
            bits: self.bits,
        }
    }

    pub fn mul(&self, o: &Fx) -> Fx {
        Fx {
            re: (&self.re * &o.re - &self.im * &o.im) >> self.bits,
            im: (&self.re * &o.im + &self.im * &o.re) >> self.bits,
            bits: self.bits,
        }
    }

    pub fn norm_sqr_raw(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    /// `|z|` as a fixed-point real.
    pub fn abs(&self) -> Fx {
        Fx {
            re: self.norm_sqr_raw().sqrt(),
            im: BigInt::zero(),
            bits: self.bits,
        }
    }

    pub fn div(&self, o: &Fx) -> Fx {
        let den = o.norm_sqr_raw();
        assert!(!den.is_zero(), "fixed-point division by zero");
        let nr = &self.re * &o.re + &self.im * &o.im;
        let ni = &self.im * &o.re - &self.re * &o.im;
        Fx {
            re: (nr << self.bits) / &den,
            im: (ni << self.bits) / &den,
            bits: self.bits,
        }
    }

    pub fn powu(&self, e: u32) -> Fx {
        let mut acc = Fx::from_int(1, self.bits);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Principal square root: nonnegative real part, positive imaginary
    /// part on the negative real axis.
    pub fn sqrt(&self) -> Fx {
        if self.re.is_zero() && self.im.is_zero() {
            return self.clone();
        }
        let approx = self.to_c64();
        let mut z = if approx.im == 0.0 && approx.re < 0.0 {
            Complex64::new(0.0, (-approx.re).sqrt())
        } else {
            approx.sqrt()
        };
        if z == Complex64::new(0.0, 0.0) {
            z = Complex64::new(1e-300, 0.0);
        }
        let mut y = Fx::from_c64(z, self.bits);
        let half = |v: Fx| Fx {
            re: v.re >> 1,
            im: v.im >> 1,
            bits: v.bits,
        };
        for _ in 0..newton_rounds(self.bits) {
            y = half(y.add(&self.div(&y)));
        }
        y
    }

    /// Magnitude bound `max(|re|, |im|)` as an `f64`.
    pub fn mag(&self) -> f64 {
        let z = self.to_c64();
        z.re.abs().max(z.im.abs())
    }
}

fn newton_rounds(bits: u32) -> u32 {
    // quadratic convergence from ~50 correct bits
    let mut r = 2;
    let mut b = 50;
    while b < bits + 8 {
        b *= 2;
        r += 1;
    }
    r
}

fn f64_to_fixed(x: f64, bits: u32) -> BigInt {
    if x == 0.0 || !x.is_finite() {
        return BigInt::zero();
    }
    let (mant, exp, sign) = decode(x);
    let m = BigInt::from(mant);
    let shift = exp + bits as i32;
    let v = if shift >= 0 {
        m << shift as u32
    } else {
        m >> (-shift) as u32
    };
    if sign < 0 {
        -v
    } else {
        v
    }
}

fn decode(x: f64) -> (u64, i32, i8) {
    let b = x.to_bits();
    let sign = if b >> 63 == 0 { 1 } else { -1 };
    let exp = ((b >> 52) & 0x7ff) as i32;
    let mant = if exp == 0 {
        (b & 0xfffffffffffff) << 1
    } else {
        (b & 0xfffffffffffff) | 0x10000000000000
    };
    (mant, exp - 1075, sign)
}

fn fixed_to_f64(v: &BigInt, bits: u32) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let len = v.bits();
    // keep 64 significant bits before converting
    let drop = len.saturating_sub(64);
    let top = (v.abs() >> drop).to_f64().unwrap_or(f64::INFINITY);
    let s = if v.sign() == Sign::Minus { -1.0 } else { 1.0 };
    s * top * 2f64.powi(drop as i32 - bits as i32)
}

/// Horner evaluation of a monic-or-not polynomial `Σ c_j z^j`.
pub fn poly_eval(coeffs: &[Fx], z: &Fx) -> Fx {
    let mut acc = Fx::zero(z.bits);
    for c in coeffs.iter().rev() {
        acc = acc.mul(z).add(c);
    }
    acc
}

fn poly_derivative(coeffs: &[Fx]) -> Vec<Fx> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| c.mul(&Fx::from_int(j as i64, c.bits)))
        .collect()
}

/// Isolated roots of a monic polynomial with an inclusion radius each.
#[derive(Debug, Clone)]
pub struct IsolatedRoots {
    pub roots: Vec<Fx>,
    pub radii: Vec<f64>,
    pub bits: u32,
}

/// Aberth iteration in `f64` for starting values.
fn aberth(coeffs: &[Complex64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    if d == 0 {
        return vec![];
    }
    let bound = 1.0 + coeffs[..d].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|j| Complex64::from_polar(bound * 0.7, 0.4 + std::f64::consts::TAU * j as f64 / d as f64))
        .collect();
    let eval = |x: Complex64| coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |a, c| a * x + c);
    let deriv: Vec<Complex64> = coeffs.iter().enumerate().skip(1).map(|(j, c)| c * j as f64).collect();
    let eval_d = |x: Complex64| deriv.iter().rev().fold(Complex64::new(0.0, 0.0), |a, c| a * x + c);
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let p = eval(z[i]);
            let dp = eval_d(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Roots of `Σ c_j z^j` (monic, `c_d = 1`), refined by Newton's method and
/// certified by disjoint inclusion disks `|z - z_i| <= d·|W_i|`, where
/// `W_i = p(z_i) / ∏_{j≠i}(z_i - z_j)` is the Weierstrass correction.
/// Precision doubles until the disks separate.
pub fn isolate_roots(coeffs_at: impl Fn(u32) -> Vec<Fx>, start_bits: u32) -> Option<IsolatedRoots> {
    let mut bits = start_bits;
    while bits <= MAX_BITS {
        let coeffs = coeffs_at(bits);
        let d = coeffs.len() - 1;
        let approx = aberth(&coeffs.iter().map(Fx::to_c64).collect::<Vec<_>>());
        let deriv = poly_derivative(&coeffs);
        let mut roots: Vec<Fx> = approx.iter().map(|&z| Fx::from_c64(z, bits)).collect();
        for z in roots.iter_mut() {
            for _ in 0..newton_rounds(bits) {
                let dp = poly_eval(&deriv, z);
                if dp.re.is_zero() && dp.im.is_zero() {
                    break;
                }
                *z = z.sub(&poly_eval(&coeffs, z).div(&dp));
            }
        }
        let ulp = 2f64.powi(8 - bits as i32);
        let mut radii = Vec::with_capacity(d);
        let mut ok = true;
        for i in 0..d {
            let mut den = Fx::from_int(1, bits);
            for j in 0..d {
                if j != i {
                    den = den.mul(&roots[i].sub(&roots[j]));
                }
            }
            if den.re.is_zero() && den.im.is_zero() {
                ok = false;
                break;
            }
            let w = poly_eval(&coeffs, &roots[i]).div(&den);
            radii.push(d as f64 * (w.to_c64().norm() + ulp));
        }
        if ok {
            for i in 0..d {
                for j in i + 1..d {
                    let sep = roots[i].sub(&roots[j]).to_c64().norm();
                    if sep <= radii[i] + radii[j] {
                        ok = false;
                    }
                }
            }
        }
        if ok {
            return Some(IsolatedRoots { roots, radii, bits });
        }
        bits *= 2;
    }
    None
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(mut m: Vec<Vec<Fx>>, bits: u32) -> Fx {
    let n = m.len();
    let mut acc = Fx::from_int(1, bits);
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a][c].mag().total_cmp(&m[b][c].mag())).unwrap();
        if m[p][c].re.is_zero() && m[p][c].im.is_zero() {
            return Fx::zero(bits);
        }
        if p != c {
            m.swap(p, c);
            acc = acc.neg();
        }
        acc = acc.mul(&m[c][c]);
        for r in c + 1..n {
            let f = m[r][c].div(&m[c][c]);
            for cc in c..n {
                let t = f.mul(&m[c][cc]);
                m[r][cc] = m[r][cc].sub(&t);
            }
        }
    }
    acc
}
