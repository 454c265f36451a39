//! CM field towers `k ⊃ k1 ⊃ k0`: certified embeddings in a fixed total
//! order, relative discriminants, the period constants `Δ`, `∇`, the
//! discriminant relation `|δ_k|^{1/2} = c·i^{[k:Q]/2}·Δ·∇`, Galois actions
//! on embeddings and the sign identity `ε(σ2) = σ(∇)/∇`.

pub mod elem;
pub mod fixed;
pub mod galois;
pub mod presets;
pub mod surd;

pub use elem::{Elem, Layers};
pub use galois::{sigma_decompose, verify_sign_identity, Decomposition, GaloisElement, SigmaSpec, SignIdentityReport};
pub use presets::{preset, PRESET_NAMES};
pub use surd::QuadSurd;

use crate::error::{Error, Result};
use fixed::{Fx, WORK_BITS};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::Value;

/// Layer indices inside [`Layers`].
pub const K0: usize = 1;
pub const K1: usize = 2;
pub const K: usize = 3;

/// Extra automorphism data beyond identity and complex conjugation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Automorphisms {
    /// Only explicit label permutations.
    Explicit,
    /// `k = k1 = Q(ζ_m)` with the `k1` generator equal to `ζ_m`.
    Cyclotomic { conductor: u64 },
    /// `k = Q(i, √(1+i))`, `k0 = Q`, `k1 = Q(i)`; automorphisms of the
    /// Galois closure `Q(ζ_8, √(1+i))` are indexed by `(a mod 8, ±1)`.
    RootOnePlusI,
}

#[derive(Debug, Clone)]
pub struct Embedding {
    /// 0-based index of the restriction to `k0`.
    pub i: usize,
    /// 0-based index inside the fibre over the restriction to `k1`.
    pub j: usize,
    pub bar: bool,
    /// Images of the generators of `k0`, `k1`, `k`.
    pub chain: Vec<Fx>,
}

/// Embeddings of `k` in the order `(τ11, τ̄11, τ12, τ̄12, …, τ̄_{r1 r2})`.
#[derive(Debug, Clone)]
pub struct EmbeddingSet {
    pub r1: usize,
    pub r2: usize,
    pub bits: u32,
    pub labels: Vec<Embedding>,
    /// Certified inclusion radii of the root approximations, per layer.
    pub radii: Vec<f64>,
}

impl EmbeddingSet {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index(&self, i: usize, j: usize, bar: bool) -> usize {
        2 * (i * self.r2 + j) + bar as usize
    }

    pub fn conj(&self, idx: usize) -> usize {
        idx ^ 1
    }

    /// Index in `E_{k1} = (τ1, τ̄1, …, τ̄_{r1})`.
    pub fn restrict(&self, idx: usize) -> usize {
        let e = &self.labels[idx];
        2 * e.i + e.bar as usize
    }

    pub fn name(&self, idx: usize) -> String {
        let e = &self.labels[idx];
        let t = if e.bar { "τ̄" } else { "τ" };
        format!("{t}{},{}", e.i + 1, e.j + 1)
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.len()).map(|x| self.name(x)).collect()
    }

    /// Label whose generator images agree with `chain`.
    pub fn locate(&self, chain: &[Fx]) -> Option<usize> {
        let tol = 1e-20;
        self.labels.iter().position(|e| {
            e.chain
                .iter()
                .zip(chain)
                .all(|(a, b)| a.sub(b).to_c64().norm() <= tol * (1.0 + a.to_c64().norm()))
        })
    }
}

#[derive(Debug, Clone)]
pub struct FieldTower {
    pub name: String,
    pub layers: Layers,
    /// Relative basis of `k1/k0`.
    pub basis_k1: Vec<Elem>,
    /// Relative basis of `k/k1`.
    pub basis_k: Vec<Elem>,
    pub automorphisms: Automorphisms,
    pub embeddings: EmbeddingSet,
}

impl FieldTower {
    /// Validates the tower and certifies its embeddings; `None` bases mean
    /// power bases.
    pub fn new(
        name: &str,
        layers: Layers,
        basis_k1: Option<Vec<Elem>>,
        basis_k: Option<Vec<Elem>>,
        automorphisms: Automorphisms,
    ) -> Result<Self> {
        if layers.top() != 3 {
            return Err(Error::InvalidTower(format!("expected 3 layers, got {}", layers.top())));
        }
        if layers.degree(K1) != 2 {
            return Err(Error::InvalidTower(format!(
                "[k1:k0] must be 2, got {}",
                layers.degree(K1)
            )));
        }
        let power = |l: usize| -> Vec<Elem> {
            let x = layers.gen(l);
            (0..layers.degree(l) as u32).map(|e| layers.pow(l, &x, e)).collect()
        };
        let basis_k1 = basis_k1.unwrap_or_else(|| power(K1));
        let basis_k = basis_k.unwrap_or_else(|| power(K));
        for b in &basis_k1 {
            layers.check(K1, b)?;
        }
        for b in &basis_k {
            layers.check(K, b)?;
        }
        let mut bits = WORK_BITS;
        let embeddings = loop {
            match compute_embeddings(&layers, bits)? {
                Some(e) => break e,
                None if bits < 1024 => bits *= 2,
                None => return Err(Error::InvalidTower("root isolation did not certify".into())),
            }
        };
        let t = FieldTower {
            name: name.to_string(),
            layers,
            basis_k1,
            basis_k,
            automorphisms,
            embeddings,
        };
        t.layers.relative_discriminant(K1, &t.basis_k1)?;
        t.layers.relative_discriminant(K, &t.basis_k)?;
        Ok(t)
    }

    /// Builds a tower from `{"k0": […], "k1": […], "k": […]}` with optional
    /// `"basis_k1"`, `"basis_k"` and `"name"`; each polynomial lists its
    /// non-leading coefficients `c_0, …, c_{d-1}` of the monic minimal
    /// polynomial, as elements of the layer below.
    pub fn from_json(v: &Value) -> Result<Self> {
        let get = |key: &str| {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Config(format!("custom tower needs an array '{key}'")))
        };
        let mut layers = Layers { polys: vec![] };
        for (l, key) in [(K0, "k0"), (K1, "k1"), (K, "k")] {
            let c = get(key)?;
            // parse coefficients as elements of layer l-1
            let coeffs = c.iter().map(|x| layers.parse(l - 1, x)).collect::<Result<Vec<_>>>()?;
            layers.polys.push(coeffs);
            layers = Layers::new(layers.polys)?;
        }
        let basis = |key: &str, l: usize| -> Result<Option<Vec<Elem>>> {
            match v.get(key) {
                None => Ok(None),
                Some(Value::Array(b)) => b
                    .iter()
                    .map(|x| layers.parse(l, x))
                    .collect::<Result<Vec<_>>>()
                    .map(Some),
                Some(_) => Err(Error::Config(format!("'{key}' must be an array"))),
            }
        };
        let name = v.get("name").and_then(Value::as_str).unwrap_or("custom");
        FieldTower::new(
            name,
            layers.clone(),
            basis("basis_k1", K1)?,
            basis("basis_k", K)?,
            Automorphisms::Explicit,
        )
    }

    pub fn r1(&self) -> usize {
        self.layers.degree(K0)
    }

    pub fn r2(&self) -> usize {
        self.layers.degree(K)
    }

    /// `[k:Q]`.
    pub fn degree(&self) -> usize {
        self.layers.absolute_degree(K)
    }

    /// `δ_{k1/k0} ∈ k0` for the configured basis.
    pub fn delta_k1_over_k0(&self) -> Elem {
        self.layers
            .relative_discriminant(K1, &self.basis_k1)
            .expect("validated basis")
    }

    /// `δ_{k/k1} ∈ k1` for the configured basis.
    pub fn delta_k_over_k1(&self) -> Elem {
        self.layers
            .relative_discriminant(K, &self.basis_k)
            .expect("validated basis")
    }

    /// `Q`-basis of `k`: products of the relative bases and the power basis
    /// of `k0`.
    pub fn rational_basis(&self) -> Vec<Elem> {
        let l = &self.layers;
        let x0 = l.gen(K0);
        let mut out = Vec::new();
        for a in &self.basis_k {
            for b in &self.basis_k1 {
                for e in 0..l.degree(K0) as u32 {
                    let c = l.lift_to(K0, K1, l.pow(K0, &x0, e));
                    let bc = l.lift_to(K1, K, l.mul(K1, b, &c));
                    out.push(l.mul(K, a, &bc));
                }
            }
        }
        out
    }

    /// Trace-form discriminant of `k/Q` for [`FieldTower::rational_basis`].
    pub fn absolute_discriminant(&self) -> BigRational {
        let basis = self.rational_basis();
        let l = &self.layers;
        let m: Vec<Vec<BigRational>> = basis
            .iter()
            .map(|x| {
                basis
                    .iter()
                    .map(|y| l.trace_to(K, 0, l.mul(K, x, y)).rat().unwrap().clone())
                    .collect()
            })
            .collect();
        elem::det_rational(m)
    }

    pub fn basis_json(&self) -> Value {
        serde_json::json!({
            "k1_over_k0": self.basis_k1.iter().map(Elem::to_json).collect::<Vec<_>>(),
            "k_over_k1": self.basis_k.iter().map(Elem::to_json).collect::<Vec<_>>(),
        })
    }
}

fn compute_embeddings(layers: &Layers, bits: u32) -> Result<Option<EmbeddingSet>> {
    let monic = |coeffs: Vec<Fx>, b: u32| {
        let mut c = coeffs;
        c.push(Fx::from_int(1, b));
        c
    };
    let mut radii = vec![0.0f64; 3];
    // k0: all roots real
    let k0 = &layers.polys[K0 - 1];
    let Some(r0) = fixed::isolate_roots(
        |b| monic(k0.iter().map(|c| layers.eval(0, c, &[], b)).collect(), b),
        bits,
    ) else {
        return Ok(None);
    };
    if r0.bits != bits {
        return Ok(None);
    }
    let mut real_roots = Vec::new();
    for (z, &rad) in r0.roots.iter().zip(&r0.radii) {
        let c = z.to_c64();
        if c.im.abs() > rad {
            return Err(Error::InvalidTower(format!("k0 has a non-real embedding {c}")));
        }
        real_roots.push(Fx {
            re: z.re.clone(),
            im: BigInt::zero(),
            bits,
        });
        radii[0] = radii[0].max(rad + c.im.abs());
    }
    real_roots.sort_by(|a, b| a.re.cmp(&b.re));
    for w in real_roots.windows(2) {
        if w[1].sub(&w[0]).to_c64().norm() <= 2.0 * radii[0] {
            return Ok(None);
        }
    }
    let r1 = real_roots.len();
    let r2 = layers.degree(K);
    let mut labels = Vec::with_capacity(2 * r1 * r2);
    for (i, z0) in real_roots.iter().enumerate() {
        let chain0 = vec![z0.clone()];
        let k1 = &layers.polys[K1 - 1];
        let Some(r1s) = fixed::isolate_roots(
            |b| monic(k1.iter().map(|c| layers.eval(K0, c, &chain0, b)).collect(), b),
            bits,
        ) else {
            return Ok(None);
        };
        if r1s.bits != bits {
            return Ok(None);
        }
        let mut up = None;
        for (z, &rad) in r1s.roots.iter().zip(&r1s.radii) {
            let c = z.to_c64();
            if c.im.abs() <= rad {
                return Err(Error::InvalidTower(format!(
                    "k1 is not CM: real embedding {} over k0 root {}",
                    c,
                    z0.to_c64().re
                )));
            }
            radii[1] = radii[1].max(rad);
            if c.im > 0.0 {
                up = Some(z.clone());
            }
        }
        let z1 = up.ok_or_else(|| Error::InvalidTower("k1 generator has no upper root".into()))?;
        let chain1 = vec![z0.clone(), z1.clone()];
        let kp = &layers.polys[K - 1];
        let Some(rk) = fixed::isolate_roots(
            |b| monic(kp.iter().map(|c| layers.eval(K1, c, &chain1, b)).collect(), b),
            bits,
        ) else {
            return Ok(None);
        };
        if rk.bits != bits {
            return Ok(None);
        }
        radii[2] = radii[2].max(rk.radii.iter().cloned().fold(0.0, f64::max));
        let mut tops: Vec<Fx> = rk.roots;
        tops.sort_by(|a, b| cmp_c64(a.to_c64(), b.to_c64()));
        for (j, z2) in tops.into_iter().enumerate() {
            let chain = vec![z0.clone(), z1.clone(), z2];
            labels.push(Embedding {
                i,
                j,
                bar: false,
                chain: chain.clone(),
            });
            labels.push(Embedding {
                i,
                j,
                bar: true,
                chain: chain.iter().map(Fx::conj).collect(),
            });
        }
    }
    Ok(Some(EmbeddingSet {
        r1,
        r2,
        bits,
        labels,
        radii,
    }))
}

fn cmp_c64(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    let eps = 1e-12 * (1.0 + a.norm().max(b.norm()));
    if (a.re - b.re).abs() > eps {
        a.re.total_cmp(&b.re)
    } else {
        a.im.total_cmp(&b.im)
    }
}

/// `det[tr_{upper/lower}(x_i x_j)]` for the tower's relative bases, or for
/// an explicit basis at layer `K1` or `K`.
pub fn relative_discriminant(t: &FieldTower, layer: usize, basis: &[Elem]) -> Result<Elem> {
    if layer != K1 && layer != K {
        return Err(Error::Shape(format!("no relative discriminant at layer {layer}")));
    }
    for b in basis {
        t.layers.check(layer, b)?;
    }
    t.layers.relative_discriminant(layer, basis)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodConstants {
    pub delta: QuadSurd,
    pub nabla: QuadSurd,
}

/// `Δ = √(N_{k0/Q} δ_{k1/k0})^{[k:k1]}`, `∇ = √(N_{k1/Q} δ_{k/k1})`, both on
/// the principal branch.
pub fn period_constants(t: &FieldTower) -> PeriodConstants {
    let l = &t.layers;
    let r = l.norm_to(K0, 0, t.delta_k1_over_k0()).rat().unwrap().clone();
    let n = l.norm_to(K1, 0, t.delta_k_over_k1()).rat().unwrap().clone();
    PeriodConstants {
        delta: QuadSurd::sqrt(&r).pow(t.r2() as u32),
        nabla: QuadSurd::sqrt(&n),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NumericCrossCheck {
    pub bits: u32,
    /// `|lhs - c·i^m·Δ·∇| / |lhs|` with `lhs = |det[τ_a(x_b)]|`.
    pub relation_rel_err: f64,
    pub delta_rel_err: f64,
    pub nabla_rel_err: f64,
    pub abs_disc_rel_err: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscriminantRelation {
    pub tower: String,
    pub basis: Value,
    #[serde(serialize_with = "ser_rat")]
    pub abs_disc: BigRational,
    pub delta: QuadSurd,
    pub nabla: QuadSurd,
    /// `[k:Q]/2`.
    pub i_power: u32,
    #[serde(serialize_with = "ser_rat")]
    pub c_squared: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub c: BigRational,
    pub numeric: NumericCrossCheck,
}

impl DiscriminantRelation {
    /// `|δ_k|^{1/2}` as an exact surd `c·i^m·Δ·∇`.
    pub fn sqrt_abs_disc(&self) -> QuadSurd {
        let i_m = QuadSurd {
            q: BigRational::from_integer(1.into()),
            d: BigInt::from(-1),
        }
        .pow(self.i_power);
        i_m.mul(&self.delta).mul(&self.nabla).scale(&self.c)
    }

    pub fn passed(&self, tol: f64) -> bool {
        let n = &self.numeric;
        n.relation_rel_err <= tol && n.delta_rel_err <= tol && n.nabla_rel_err <= tol && n.abs_disc_rel_err <= tol
    }
}

fn ser_rat<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn rel_err(a: &Fx, b: &Fx) -> f64 {
    let den = a.to_c64().norm().max(1e-300);
    a.sub(b).to_c64().norm() / den
}

/// Square root of a numerically real radicand on the principal branch.
fn sqrt_real(x: &Fx) -> Result<Fx> {
    let c = x.to_c64();
    if c.im.abs() > 1e-25 * c.norm().max(1.0) {
        return Err(Error::InvalidTower(format!("radicand {c} is not real")));
    }
    Ok(Fx {
        re: x.re.clone(),
        im: BigInt::zero(),
        bits: x.bits,
    }
    .sqrt())
}

/// Exact `c` with `c^2 = |δ_k| / (i^m Δ ∇)^2`, its sign fixed by evaluating
/// both sides through the certified embeddings.
pub fn verify_discriminant_relation(t: &FieldTower) -> Result<DiscriminantRelation> {
    let pc = period_constants(t);
    let abs_disc = t.absolute_discriminant();
    let m = (t.degree() / 2) as u32;
    // (i^m Δ ∇)^2 = (-1)^m Δ^2 ∇^2
    let mut den = pc.delta.square() * pc.nabla.square();
    if m % 2 == 1 {
        den = -den;
    }
    let c_squared = abs_disc.abs() / &den;
    if !c_squared.is_positive() {
        return Err(Error::NotRationalSquare(format!("c^2 = {c_squared} is not positive")));
    }
    let root = QuadSurd::sqrt(&c_squared);
    if !root.is_rational() {
        return Err(Error::NotRationalSquare(format!("c^2 = {c_squared}")));
    }

    let e = &t.embeddings;
    let bits = e.bits;
    let l = &t.layers;
    // |δ_k|^{1/2} = |det[τ_a(x_b)]|
    let basis = t.rational_basis();
    let full: Vec<Vec<Fx>> = e
        .labels
        .iter()
        .map(|emb| basis.iter().map(|x| l.eval(K, x, &emb.chain, bits)).collect())
        .collect();
    let det_full = fixed::det(full, bits);
    let lhs = det_full.abs();
    let abs_disc_num = det_full.mul(&det_full);
    // N_{k0/Q}(δ_{k1/k0}) = ∏_i det[σ(y_b)]^2 over the two k1 embeddings above τ_i
    let mut rad_delta = Fx::from_int(1, bits);
    for i in 0..e.r1 {
        let rows: Vec<Vec<Fx>> = [false, true]
            .iter()
            .map(|&bar| {
                let chain = &e.labels[e.index(i, 0, bar)].chain;
                t.basis_k1.iter().map(|y| l.eval(K1, y, chain, bits)).collect()
            })
            .collect();
        let d = fixed::det(rows, bits);
        rad_delta = rad_delta.mul(&d.mul(&d));
    }
    let delta_num = sqrt_real(&rad_delta)?.powu(t.r2() as u32);
    let mut rad_nabla = Fx::from_int(1, bits);
    for i in 0..e.r1 {
        for bar in [false, true] {
            let rows: Vec<Vec<Fx>> = (0..e.r2)
                .map(|j| {
                    let chain = &e.labels[e.index(i, j, bar)].chain;
                    t.basis_k.iter().map(|x| l.eval(K, x, chain, bits)).collect()
                })
                .collect();
            let d = fixed::det(rows, bits);
            rad_nabla = rad_nabla.mul(&d.mul(&d));
        }
    }
    let nabla_num = sqrt_real(&rad_nabla)?;
    let i_m = Fx::i(bits).powu(m);
    let rhs_unit = i_m.mul(&delta_num).mul(&nabla_num);
    let ratio = lhs.div(&rhs_unit).to_c64();
    if ratio.im.abs() > 1e-20 * ratio.norm() {
        return Err(Error::NotRationalSquare(format!("numerical c = {ratio} is not real")));
    }
    let c = if ratio.re < 0.0 { -root.q } else { root.q };
    let rel = DiscriminantRelation {
        tower: t.name.clone(),
        basis: t.basis_json(),
        abs_disc: abs_disc.clone(),
        delta: pc.delta.clone(),
        nabla: pc.nabla.clone(),
        i_power: m,
        c_squared,
        c,
        numeric: NumericCrossCheck {
            bits,
            relation_rel_err: 0.0,
            delta_rel_err: rel_err(&delta_num, &pc.delta.eval(bits)),
            nabla_rel_err: rel_err(&nabla_num, &pc.nabla.eval(bits)),
            abs_disc_rel_err: rel_err(&abs_disc_num, &Fx::from_rational(&abs_disc, bits)),
        },
    };
    let exact_rhs = rel.sqrt_abs_disc().eval(bits);
    Ok(DiscriminantRelation {
        numeric: NumericCrossCheck {
            relation_rel_err: rel_err(&lhs, &exact_rhs),
            ..rel.numeric.clone()
        },
        ..rel
    })
}
