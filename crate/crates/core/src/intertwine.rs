//! Archimedean intertwining integrals at a complex place: the minimal
//! K-type sections `φ_β`, their exact intertwined values at `w_k`, the
//! normalisation by the archimedean L-ratio, and a numerical oracle that
//! integrates `φ_β` directly.

use crate::error::{Error, Result};
use crate::scalar::Real;
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The self-dual measure on `C` is twice Lebesgue measure on `R^2`.
pub const SELF_DUAL_MEASURE: f64 = 2.0;

/// Exponents `η_ι <= 0 <= n <= η_ῑ` at one complex place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCharData {
    pub n: usize,
    pub eta_lo: i64,
    pub eta_hi: i64,
}

impl LocalCharData {
    pub fn new(n: usize, eta_lo: i64, eta_hi: i64) -> Result<Self> {
        if eta_lo > 0 || eta_hi < n as i64 {
            return Err(Error::NotBalanced {
                a: eta_lo,
                b: eta_hi,
                n,
            });
        }
        Ok(LocalCharData { n, eta_lo, eta_hi })
    }

    pub fn gap(&self) -> u32 {
        (self.eta_hi - self.eta_lo) as u32
    }

    /// `β_0 = (0, …, 0, g)`.
    pub fn beta0(&self) -> Composition {
        let mut beta = vec![0; self.n];
        beta[self.n - 1] = self.gap();
        Composition { beta }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Composition {
    pub beta: Vec<u32>,
}

impl Composition {
    pub fn new(beta: Vec<u32>, data: &LocalCharData) -> Result<Self> {
        if beta.len() != data.n {
            return Err(Error::InvalidComposition(format!(
                "{} parts for n={}",
                beta.len(),
                data.n
            )));
        }
        let sum: u32 = beta.iter().sum();
        if sum != data.gap() {
            return Err(Error::InvalidComposition(format!(
                "parts sum to {sum}, expected {}",
                data.gap()
            )));
        }
        Ok(Composition { beta })
    }
}

/// All compositions of `data.gap()` into `data.n` nonnegative parts, in
/// lexicographic order.
pub fn compositions(data: &LocalCharData) -> Vec<Composition> {
    fn rec(left: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Composition>) {
        if parts == 1 {
            cur.push(left);
            out.push(Composition { beta: cur.clone() });
            cur.pop();
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(left - x, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(data.gap(), data.n, &mut Vec::with_capacity(data.n), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KTypeFunction {
    pub beta: Composition,
    pub data: LocalCharData,
}

/// `∏ u_j^{β_j} / (Σ u_j ū_j)^{η_hi}` on the last row of `g`.
pub fn phi_eval<T: Real>(f: &KTypeFunction, last_row: &[Complex<T>]) -> Result<Complex<T>> {
    if last_row.len() != f.data.n {
        return Err(Error::Shape(format!(
            "row of length {} for n={}",
            last_row.len(),
            f.data.n
        )));
    }
    let norm: T = last_row.iter().map(|u| u.norm_sqr()).sum();
    if norm == T::zero() {
        return Err(Error::ZeroRow);
    }
    let mut num = Complex::new(T::one(), T::zero());
    for (u, &b) in last_row.iter().zip(&f.beta.beta) {
        num = num * u.powu(b);
    }
    Ok(num / norm.powi(f.data.eta_hi as i32))
}

/// Exact number `coeff · (2π)^two_pi_power`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactValue {
    pub coeff: BigRational,
    pub two_pi_power: u32,
}

impl ExactValue {
    pub fn zero() -> Self {
        ExactValue {
            coeff: BigRational::zero(),
            two_pi_power: 0,
        }
    }

    pub fn one() -> Self {
        ExactValue {
            coeff: BigRational::one(),
            two_pi_power: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.coeff.is_one() && self.two_pi_power == 0
    }

    /// Exact quotient; the divisor must be nonzero with a `(2π)`-power not
    /// exceeding that of `self` (unless `self` is zero).
    pub fn div(&self, o: &ExactValue) -> Result<ExactValue> {
        if o.is_zero() {
            return Err(Error::Shape("division by exact zero".into()));
        }
        if self.is_zero() {
            return Ok(ExactValue::zero());
        }
        if o.two_pi_power > self.two_pi_power {
            return Err(Error::Shape("negative power of 2π".into()));
        }
        Ok(ExactValue {
            coeff: &self.coeff / &o.coeff,
            two_pi_power: self.two_pi_power - o.two_pi_power,
        })
    }

    pub fn to_real<T: Real>(&self) -> T {
        let c = self.coeff.numer().to_f64().unwrap_or(f64::NAN) / self.coeff.denom().to_f64().unwrap_or(f64::NAN);
        T::of(c) * (T::of(2.0) * T::PI()).powi(self.two_pi_power as i32)
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.two_pi_power {
            _ if self.coeff.is_zero() => write!(f, "0"),
            0 => write!(f, "{}", self.coeff),
            1 => write!(f, "{}·(2π)", self.coeff),
            p => write!(f, "{}·(2π)^{p}", self.coeff),
        }
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    Ok(())
}

/// `(2π)^{n-k} / ∏_{j=1}^{n-k} (η_hi - j)`.
pub fn arch_l_ratio(k: usize, n: usize, data: &LocalCharData) -> Result<ExactValue> {
    check_k(k, n)?;
    let mut den = BigInt::one();
    for j in 1..=(n - k) as i64 {
        den *= BigInt::from(data.eta_hi - j);
    }
    Ok(ExactValue {
        coeff: BigRational::new(BigInt::one(), den),
        two_pi_power: (n - k) as u32,
    })
}

/// Value at `w_k` of the intertwined section: zero unless `β = β_0`.
pub fn intertwine_closed_form(k: usize, n: usize, data: &LocalCharData, beta: &Composition) -> Result<ExactValue> {
    check_k(k, n)?;
    if data.n != n {
        return Err(Error::Shape(format!("local data for n={} used with n={n}", data.n)));
    }
    if *beta != data.beta0() {
        return Ok(ExactValue::zero());
    }
    // ∫_{C^d} (1 + |u|^2)^{-h} du with du = 2·Lebesgue per variable:
    // polar coordinates one variable at a time give (2π)/(h - j) at step j.
    let mut coeff = BigRational::one();
    for j in 1..=(n - k) as i64 {
        coeff /= BigRational::from_integer(BigInt::from(data.eta_hi - j));
    }
    Ok(ExactValue {
        coeff,
        two_pi_power: (n - k) as u32,
    })
}

/// Closed form divided by the archimedean L-ratio; always exactly 1.
pub fn normalized_value(k: usize, n: usize, data: &LocalCharData) -> Result<ExactValue> {
    let v = intertwine_closed_form(k, n, data, &data.beta0())?.div(&arch_l_ratio(k, n, data)?)?;
    assert!(v.is_one(), "normalised intertwining value must be 1, got {v}");
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    RadialIterated,
    TensorGrid,
    MonteCarlo,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "radial-iterated" | "radial" => Ok(Method::RadialIterated),
            "tensor-grid" | "tensor" => Ok(Method::TensorGrid),
            "monte-carlo" | "mc" => Ok(Method::MonteCarlo),
            _ => Err(Error::Config(format!("unknown quadrature method '{s}'"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::RadialIterated => "radial-iterated",
            Method::TensorGrid => "tensor-grid",
            Method::MonteCarlo => "monte-carlo",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub method: Method,
    /// Ring points for the angular rule (radial-iterated).
    pub angular_nodes: usize,
    /// Step of the double-exponential rule in the transformed variable.
    pub step: f64,
    /// Truncation of the transformed variable to `[-window, window]`.
    pub window: f64,
    pub samples: u64,
    pub seed: u64,
    pub max_evaluations: u64,
}

impl QuadratureConfig {
    pub fn new(method: Method) -> Self {
        QuadratureConfig {
            method,
            angular_nodes: 32,
            step: 1.0 / 16.0,
            window: 4.0,
            samples: 1_000_000,
            seed: 0x5eed,
            max_evaluations: 200_000_000,
        }
    }

    /// Tensor-grid defaults: a coarser step keeps `(2·window/step)^{2d}` small.
    pub fn tensor_grid() -> Self {
        QuadratureConfig {
            step: 1.0 / 8.0,
            window: 3.5,
            ..QuadratureConfig::new(Method::TensorGrid)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub re: T,
    pub im: T,
    /// A-posteriori bound on `|estimate - exact|`.
    pub error: T,
    pub evaluations: u64,
}

impl<T: Real> Estimate<T> {
    pub fn value(&self) -> Complex<T> {
        Complex::new(self.re, self.im)
    }
}

/// `β_j > 0` at a coordinate that is identically zero on the domain.
fn vanishes_identically(k: usize, beta: &Composition) -> bool {
    beta.beta[..k - 1].iter().any(|&b| b > 0)
}

/// Whether `∫ |φ_β|` over the `(n-k)`-fold complex domain is finite.
pub fn absolutely_convergent(k: usize, n: usize, data: &LocalCharData, beta: &Composition) -> bool {
    if vanishes_identically(k, beta) {
        return true;
    }
    let d = (n - k) as i64;
    let deg: i64 = beta.beta[k - 1..n - 1].iter().map(|&b| b as i64).sum();
    2 * data.eta_hi - deg > 2 * d
}

struct Integrand<'a> {
    k: usize,
    n: usize,
    data: &'a LocalCharData,
    beta: &'a Composition,
}

impl Integrand<'_> {
    /// `φ_β` on the row `(0, …, 0, u_1, …, u_d, 1)`.
    fn eval<T: Real>(&self, u: &[Complex<T>]) -> Complex<T> {
        let mut num = Complex::new(T::one(), T::zero());
        let mut norm = T::one();
        for (j, z) in u.iter().enumerate() {
            norm = norm + z.norm_sqr();
            let b = self.beta.beta[self.k - 1 + j];
            if b > 0 {
                num = num * z.powu(b);
            }
        }
        let den = norm.powi(self.data.eta_hi as i32);
        if !den.is_finite() {
            return Complex::new(T::zero(), T::zero());
        }
        num / den
    }

    fn dim(&self) -> usize {
        self.n - self.k
    }
}

/// Numerical value of `∫ φ_β(0,…,0,u_k,…,u_{n-1},1) du` over `C^{n-k}`.
pub fn intertwine_numeric<T: Real>(
    k: usize,
    n: usize,
    data: &LocalCharData,
    beta: &Composition,
    quad: &QuadratureConfig,
) -> Result<Estimate<T>> {
    check_k(k, n)?;
    let beta = Composition::new(beta.beta.clone(), data)?;
    let f = Integrand {
        k,
        n,
        data,
        beta: &beta,
    };
    if k == n {
        // empty integral: the value of φ_β at the identity row
        let mut row = vec![Complex::new(T::zero(), T::zero()); n];
        row[n - 1] = Complex::new(T::one(), T::zero());
        let v = phi_eval(
            &KTypeFunction {
                beta: beta.clone(),
                data: *data,
            },
            &row,
        )?;
        return Ok(Estimate {
            re: v.re,
            im: v.im,
            error: T::zero(),
            evaluations: 1,
        });
    }
    if vanishes_identically(k, &beta) {
        return Ok(Estimate {
            re: T::zero(),
            im: T::zero(),
            error: T::zero(),
            evaluations: 0,
        });
    }
    if !absolutely_convergent(k, n, data, &beta) {
        return Err(Error::Quadrature(format!(
            "non-convergent configuration: η_hi={} too small for β={:?} over C^{}",
            data.eta_hi,
            beta.beta,
            n - k
        )));
    }
    if quad.step <= 0.0 || quad.window <= 0.0 {
        return Err(Error::Quadrature("step and window must be positive".into()));
    }
    match quad.method {
        Method::RadialIterated => radial_iterated(&f, quad),
        Method::TensorGrid => tensor_grid(&f, quad),
        Method::MonteCarlo => monte_carlo(&f, quad),
    }
}

/// Nodes `x = exp(π sinh τ)` and weights `h·dx/dτ` for `∫_0^∞`, which is
/// the tanh-sinh rule on `t ∈ (0,1)` pulled back through `r = t/(1-t)`.
fn half_line_nodes<T: Real>(step: f64, window: f64) -> Vec<(T, T, bool)> {
    let m = (window / step).ceil() as i64;
    let h = T::of(step);
    (-m..=m)
        .map(|i| {
            let tau = h * T::of(i as f64);
            let r = (T::PI() * tau.sinh()).exp();
            let w = h * T::PI() * tau.cosh() * r;
            (r, w, i % 2 == 0)
        })
        .filter(|&(r, w, _)| (r * r * w).is_finite() && r > T::zero())
        .collect()
}

/// Nodes `x = sinh(π/2 · sinh τ)` and weights for `∫_{-∞}^{∞}`.
fn real_line_nodes<T: Real>(step: f64, window: f64) -> Vec<(T, T, bool)> {
    let m = (window / step).ceil() as i64;
    let h = T::of(step);
    let half_pi = T::FRAC_PI_2();
    (-m..=m)
        .map(|i| {
            let tau = h * T::of(i as f64);
            let inner = half_pi * tau.sinh();
            let x = inner.sinh();
            let w = h * inner.cosh() * half_pi * tau.cosh();
            (x, w, i % 2 == 0)
        })
        .filter(|&(x, w, _)| (x * x * w * w).is_finite())
        .collect()
}

fn budget(points: u64, quad: &QuadratureConfig) -> Result<()> {
    if points > quad.max_evaluations {
        return Err(Error::Quadrature(format!(
            "budget exceeded: {points} evaluations > {}",
            quad.max_evaluations
        )));
    }
    Ok(())
}

/// Polar coordinates in each complex variable: an equispaced ring rule in
/// the angle and a double-exponential rule in the radius.
fn radial_iterated<T: Real>(f: &Integrand<'_>, quad: &QuadratureConfig) -> Result<Estimate<T>> {
    let d = f.dim();
    let m = quad.angular_nodes.max(1);
    let radial = half_line_nodes::<T>(quad.step, quad.window);
    let two_pi = T::of(2.0) * T::PI();
    let ring: Vec<Complex<T>> = (0..m)
        .map(|j| Complex::from_polar(T::one(), two_pi * T::of_usize(j) / T::of_usize(m)))
        .collect();
    // one complex variable: nodes u = r e^{iθ}, weight 2·r·w_r·(2π/m)
    let measure = T::of(SELF_DUAL_MEASURE);
    let mut cell: Vec<(Complex<T>, T, bool)> = Vec::with_capacity(radial.len() * m);
    for &(r, w, even) in &radial {
        for z in &ring {
            cell.push((*z * r, measure * r * w * two_pi / T::of_usize(m), even));
        }
    }
    let total = (cell.len() as u64).checked_pow(d as u32).unwrap_or(u64::MAX);
    budget(total, quad)?;
    let (fine, coarse) = product_sum(f, &cell, d, T::of(2.0));
    Ok(Estimate {
        re: fine.re,
        im: fine.im,
        error: (fine - coarse).norm(),
        evaluations: total,
    })
}

/// Raw tensor-product rule over `R^{2d}` (real and imaginary parts of each
/// variable), every axis mapped to the real line by a double exponential.
fn tensor_grid<T: Real>(f: &Integrand<'_>, quad: &QuadratureConfig) -> Result<Estimate<T>> {
    let d = f.dim();
    let axis = real_line_nodes::<T>(quad.step, quad.window);
    let measure = T::of(SELF_DUAL_MEASURE);
    // Each complex variable uses the product of two axes.
    let mut cell: Vec<(Complex<T>, T, bool)> = Vec::with_capacity(axis.len() * axis.len());
    for &(x, wx, ex) in &axis {
        for &(y, wy, ey) in &axis {
            cell.push((Complex::new(x, y), measure * wx * wy, ex && ey));
        }
    }
    let total = (cell.len() as u64).checked_pow(d as u32).unwrap_or(u64::MAX);
    budget(total, quad)?;
    let (fine, coarse) = product_sum(f, &cell, d, T::of(4.0));
    Ok(Estimate {
        re: fine.re,
        im: fine.im,
        error: (fine - coarse).norm(),
        evaluations: total,
    })
}

/// Sum over the `d`-fold product of a one-variable rule, returning the
/// full-grid value and the value on the sub-grid of even nodes, whose
/// weights grow by `per_variable` for each complex variable.
///
/// The outermost variable is split across threads; partial sums are
/// combined in index order so the result does not depend on scheduling.
fn product_sum<T: Real>(
    f: &Integrand<'_>,
    cell: &[(Complex<T>, T, bool)],
    d: usize,
    per_variable: T,
) -> (Complex<T>, Complex<T>) {
    let coarse_factor = per_variable.powi(d as i32);
    let partials: Vec<(Complex<T>, Complex<T>)> = (0..cell.len())
        .into_par_iter()
        .map(|first| {
            let mut fine = Complex::new(T::zero(), T::zero());
            let mut coarse = Complex::new(T::zero(), T::zero());
            let mut idx = vec![0usize; d - 1];
            let mut u = vec![Complex::new(T::zero(), T::zero()); d];
            loop {
                u[0] = cell[first].0;
                let mut w = cell[first].1;
                let mut even = cell[first].2;
                for (p, &i) in idx.iter().enumerate() {
                    u[p + 1] = cell[i].0;
                    w = w * cell[i].1;
                    even = even && cell[i].2;
                }
                let v = f.eval(&u) * w;
                fine = fine + v;
                if even {
                    coarse = coarse + v;
                }
                let mut pos = 0;
                loop {
                    if pos == d - 1 {
                        return (fine, coarse * coarse_factor);
                    }
                    idx[pos] += 1;
                    if idx[pos] < cell.len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
            }
        })
        .collect();
    let mut fine = Complex::new(T::zero(), T::zero());
    let mut coarse = Complex::new(T::zero(), T::zero());
    for (a, b) in partials {
        fine = fine + a;
        coarse = coarse + b;
    }
    (fine, coarse)
}

/// Importance sampling with density proportional to `(1 + |x|^2)^{-p}` on
/// `R^{2d}`, `p = η_hi - 1/2`, i.e. a multivariate t proposal with tails
/// one half-power heavier than the integrand. Each draw is averaged over
/// the four rotations `u ↦ i^r u`, which cancels monomials whose total
/// degree is not divisible by 4.
fn monte_carlo<T: Real>(f: &Integrand<'_>, quad: &QuadratureConfig) -> Result<Estimate<T>> {
    let d = f.dim();
    let m = 2 * d;
    budget(quad.samples, quad)?;
    if quad.samples < 2 {
        return Err(Error::Quadrature("monte-carlo needs at least 2 samples".into()));
    }
    let p = f.data.eta_hi as f64 - 0.5;
    let nu = 2.0 * p - m as f64;
    if nu <= 0.0 {
        return Err(Error::Quadrature("proposal degrees of freedom must be positive".into()));
    }
    // normaliser of the proposal: π^d Γ(p-d)/Γ(p) = π^d / ∏_{j=1}^{d} (p - j)
    let mut log_z = d as f64 * std::f64::consts::PI.ln();
    for j in 1..=d {
        log_z -= (p - j as f64).ln();
    }
    let chi = ChiSquared::new(nu).map_err(|e| Error::Quadrature(e.to_string()))?;
    const CHUNK: u64 = 1 << 14;
    let chunks = quad.samples.div_ceil(CHUNK);
    let measure = SELF_DUAL_MEASURE.powi(d as i32);
    let partials: Vec<(f64, f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(quad.seed);
            rng.set_stream(c);
            let count = CHUNK.min(quad.samples - c * CHUNK);
            let (mut sr, mut si, mut s2) = (0.0, 0.0, 0.0);
            let mut u = vec![Complex::new(T::zero(), T::zero()); d];
            let mut x = vec![0.0f64; m];
            for _ in 0..count {
                let v: f64 = chi.sample(&mut rng);
                let scale = 1.0 / v.sqrt();
                for xi in x.iter_mut() {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    *xi = z * scale;
                }
                let r2: f64 = x.iter().map(|t| t * t).sum();
                // average over u ↦ i^r·u, r = 0..3 (the proposal is invariant)
                let mut val = Complex::new(T::zero(), T::zero());
                for r in 0..4 {
                    for j in 0..d {
                        let (a, b) = (T::of(x[2 * j]), T::of(x[2 * j + 1]));
                        u[j] = match r {
                            0 => Complex::new(a, b),
                            1 => Complex::new(-b, a),
                            2 => Complex::new(-a, -b),
                            _ => Complex::new(b, -a),
                        };
                    }
                    val = val + f.eval(&u);
                }
                let val = val / T::of(4.0);
                let inv_q = (log_z + p * (1.0 + r2).ln()).exp() * measure;
                let (re, im) = (val.re.to_f64().unwrap_or(f64::NAN), val.im.to_f64().unwrap_or(f64::NAN));
                let (wr, wi) = (re * inv_q, im * inv_q);
                sr += wr;
                si += wi;
                s2 += wr * wr + wi * wi;
            }
            (sr, si, s2)
        })
        .collect();
    let (mut sr, mut si, mut s2) = (0.0, 0.0, 0.0);
    for (a, b, c) in partials {
        sr += a;
        si += b;
        s2 += c;
    }
    let nf = quad.samples as f64;
    let (mr, mi) = (sr / nf, si / nf);
    let var = (s2 / nf - mr * mr - mi * mi).max(0.0) * nf / (nf - 1.0);
    // four standard errors
    let err = 4.0 * (var / nf).sqrt();
    Ok(Estimate {
        re: T::of(mr),
        im: T::of(mi),
        error: T::of(err),
        evaluations: quad.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lchar::rat;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn phi_examples() {
        let data = LocalCharData::new(2, 0, 2).unwrap();
        let f0 = KTypeFunction {
            beta: data.beta0(),
            data,
        };
        assert_eq!(phi_eval(&f0, &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap(), c(1.0, 0.0));
        let f = KTypeFunction {
            beta: Composition::new(vec![2, 0], &data).unwrap(),
            data,
        };
        let v = phi_eval(&f, &[c(0.0, 1.0), c(1.0, 0.0)]).unwrap();
        assert!((v - c(-0.25, 0.0)).norm() < 1e-15);
        let g = KTypeFunction {
            beta: Composition::new(vec![1, 1], &data).unwrap(),
            data,
        };
        assert_eq!(phi_eval(&g, &[c(0.0, 0.0), c(3.0, 1.0)]).unwrap(), c(0.0, 0.0));
        assert_eq!(phi_eval(&g, &[c(0.0, 0.0), c(0.0, 0.0)]), Err(Error::ZeroRow));
        assert!(Composition::new(vec![1, 0], &data).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let d22 = LocalCharData::new(2, 0, 2).unwrap();
        let v = intertwine_closed_form(1, 2, &d22, &d22.beta0()).unwrap();
        assert_eq!(
            v,
            ExactValue {
                coeff: rat(1, 1),
                two_pi_power: 1
            }
        );
        assert!((v.to_real::<f64>() - 2.0 * PI).abs() < 1e-12);
        let d33 = LocalCharData::new(3, 0, 3).unwrap();
        let v = intertwine_closed_form(1, 3, &d33, &d33.beta0()).unwrap();
        assert_eq!(
            v,
            ExactValue {
                coeff: rat(1, 2),
                two_pi_power: 2
            }
        );
        assert!((v.to_real::<f64>() - 2.0 * PI * PI).abs() < 1e-12);
        let b = Composition::new(vec![1, 0, 2], &d33).unwrap();
        assert!(intertwine_closed_form(1, 3, &d33, &b).unwrap().is_zero());
        assert!(intertwine_closed_form(3, 3, &d33, &d33.beta0()).unwrap().is_one());
    }

    #[test]
    fn normalisation_examples() {
        let d = LocalCharData::new(4, -1, 5).unwrap();
        assert!(normalized_value(2, 4, &d).unwrap().is_one());
        assert!(normalized_value(4, 4, &d).unwrap().is_one());
        assert_eq!(
            arch_l_ratio(2, 4, &d).unwrap(),
            ExactValue {
                coeff: rat(1, 12),
                two_pi_power: 2
            }
        );
    }

    #[test]
    fn radial_small() {
        let data = LocalCharData::new(2, 0, 2).unwrap();
        let q = QuadratureConfig::new(Method::RadialIterated);
        let e = intertwine_numeric::<f64>(1, 2, &data, &data.beta0(), &q).unwrap();
        assert!((e.re - 2.0 * PI).abs() < 1e-10, "{e:?}");
        assert!(e.im.abs() < 1e-12);
        let b = Composition::new(vec![1, 1], &data).unwrap();
        let e = intertwine_numeric::<f64>(1, 2, &data, &b, &q).unwrap();
        assert!(e.value().norm() < 1e-12);
    }

    #[test]
    fn single_precision_runs() {
        let data = LocalCharData::new(2, 0, 3).unwrap();
        let q = QuadratureConfig::new(Method::RadialIterated);
        let e = intertwine_numeric::<f32>(1, 2, &data, &data.beta0(), &q).unwrap();
        assert!((e.re - PI as f32).abs() < 1e-4, "{e:?}");
    }

    #[test]
    fn tensor_small() {
        let data = LocalCharData::new(2, 0, 3).unwrap();
        let q = QuadratureConfig::tensor_grid();
        let e = intertwine_numeric::<f64>(1, 2, &data, &data.beta0(), &q).unwrap();
        assert!((e.re - PI).abs() < 1e-8, "{e:?}");
        assert!(e.error < 1e-3);
    }

    #[test]
    fn degenerate_and_errors() {
        let data = LocalCharData::new(3, 0, 3).unwrap();
        let q = QuadratureConfig::new(Method::TensorGrid);
        let e = intertwine_numeric::<f64>(3, 3, &data, &data.beta0(), &q).unwrap();
        assert_eq!((e.re, e.im), (1.0, 0.0));
        let heavy = Composition::new(vec![0, 3, 0], &data).unwrap();
        assert!(matches!(
            intertwine_numeric::<f64>(1, 3, &data, &heavy, &q),
            Err(Error::Quadrature(_))
        ));
        let tiny = QuadratureConfig {
            max_evaluations: 10,
            ..q
        };
        assert!(matches!(
            intertwine_numeric::<f64>(1, 3, &data, &data.beta0(), &tiny),
            Err(Error::Quadrature(_))
        ));
        let lead = Composition::new(vec![1, 0, 2], &data).unwrap();
        let z = intertwine_numeric::<f64>(2, 3, &data, &lead, &q).unwrap();
        assert_eq!(z.value(), c(0.0, 0.0));
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn monte_carlo_reproducible() {
        let data = LocalCharData::new(2, 0, 2).unwrap();
        let q = QuadratureConfig {
            samples: 20_000,
            ..QuadratureConfig::new(Method::MonteCarlo)
        };
        let a = intertwine_numeric::<f64>(1, 2, &data, &data.beta0(), &q).unwrap();
        let b = intertwine_numeric::<f64>(1, 2, &data, &data.beta0(), &q).unwrap();
        assert_eq!(a, b);
        assert!((a.re - 2.0 * PI).abs() < a.error.max(0.05), "{a:?}");
    }

    #[test]
    fn composition_count() {
        let data = LocalCharData::new(3, -1, 4).unwrap();
        let all = compositions(&data);
        // C(5 + 2, 2)
        assert_eq!(all.len(), 21);
        assert!(all.iter().all(|b| b.beta.iter().sum::<u32>() == 5));
        let nonzero = all
            .iter()
            .filter(|b| !intertwine_closed_form(1, 3, &data, b).unwrap().is_zero())
            .count();
        assert_eq!(nonzero, 1);
    }

    proptest! {
        #[test]
        fn ratio_of_consecutive_closed_forms(n in 2usize..8, extra in 0i64..4, lo in -3i64..=0, kk in 0usize..8) {
            let k = 1 + kk % (n - 1);
            let data = LocalCharData::new(n, lo, n as i64 + extra).unwrap();
            let a = intertwine_closed_form(k, n, &data, &data.beta0()).unwrap();
            let b = intertwine_closed_form(k + 1, n, &data, &data.beta0()).unwrap();
            let q = a.div(&b).unwrap();
            prop_assert_eq!(q, ExactValue {
                coeff: rat(1, data.eta_hi - (n - k) as i64),
                two_pi_power: 1,
            });
        }

        #[test]
        fn normalized_is_one(n in 1usize..9, extra in 0i64..5, lo in -4i64..=0, kk in 0usize..9) {
            let k = 1 + kk % n;
            let data = LocalCharData::new(n, lo, n as i64 + extra).unwrap();
            prop_assert!(normalized_value(k, n, &data).unwrap().is_one());
        }

        #[test]
        fn phi_homogeneity(re in -2.0f64..2.0, im in -2.0f64..2.0, lam_re in 0.2f64..2.0, lam_im in -1.0f64..1.0) {
            // φ_β(λ·row) = λ^{Σβ} / |λ|^{2η_hi} · φ_β(row)
            let data = LocalCharData::new(3, -1, 4).unwrap();
            let f = KTypeFunction { beta: Composition::new(vec![1, 2, 2], &data).unwrap(), data };
            let row = [c(re, im), c(0.5, -0.25), c(1.0, 0.0)];
            let lam = c(lam_re, lam_im);
            let scaled: Vec<Complex<f64>> = row.iter().map(|z| z * lam).collect();
            let lhs = phi_eval(&f, &scaled).unwrap();
            let rhs = phi_eval(&f, &row).unwrap() * lam.powu(5) / lam.norm_sqr().powi(4);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
    }
}
