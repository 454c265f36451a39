//! Permutations of `{1, …, n}` in one-line notation, the roots `e_i - e_j`
//! of GL(n), and tuples of permutations indexed by field embeddings.
//!
//! Conventions used throughout the crate:
//! - `images[j-1] = w(j)`; indices are 1-based in every public signature.
//! - The permutation matrix of `w` has a 1 at row `w(j)`, column `j`.
//! - Composition is `(w ∘ u)(i) = w(u(i))`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &x in &images {
            if x == 0 || x > n || seen[x] {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n).collect(),
        }
    }

    /// The cycle `c[0] -> c[1] -> … -> c[last] -> c[0]` acting on `{1..n}`.
    pub fn cycle(n: usize, c: &[usize]) -> Result<Self> {
        let mut images: Vec<usize> = (1..=n).collect();
        for (idx, &a) in c.iter().enumerate() {
            if a == 0 || a > n {
                return Err(Error::InvalidPermutation(format!("cycle {c:?} on {n} letters")));
            }
            images[a - 1] = c[(idx + 1) % c.len()];
        }
        Permutation::new(images)
    }

    /// `n!` permutations in lexicographic order of one-line notation.
    pub fn all(n: usize) -> AllPermutations {
        AllPermutations {
            next: Some((1..=n).collect()),
        }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `w(j)` for 1-based `j`.
    pub fn apply(&self, j: usize) -> usize {
        self.images[j - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| x == i + 1)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (j, &i) in self.images.iter().enumerate() {
            inv[i - 1] = j + 1;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::Shape(format!("compose S_{} with S_{}", self.n(), other.n())));
        }
        Ok(Permutation {
            images: other.images.iter().map(|&j| self.images[j - 1]).collect(),
        })
    }

    /// Number of inversions.
    pub fn length(&self) -> usize {
        let w = &self.images;
        let mut count = 0;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] > w[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Pairs `(i, j)`, `i < j`, with `w(i) > w(j)`, in lexicographic order.
    pub fn inversion_set(&self) -> Vec<(usize, usize)> {
        let w = &self.images;
        let mut out = Vec::new();
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] > w[j] {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }

    pub fn sign(&self) -> i32 {
        if self.length() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Dense 0/1 matrix with entry 1 at `(w(j), j)` (0-based storage, row major).
    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.n();
        let mut m = vec![vec![0u8; n]; n];
        for j in 1..=n {
            m[self.apply(j) - 1][j - 1] = 1;
        }
        m
    }

    pub fn from_matrix(m: &[Vec<u8>]) -> Result<Self> {
        let n = m.len();
        let mut images = vec![0; n];
        for j in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&i| m[i].len() == n && m[i][j] == 1).collect();
            if rows.len() != 1 || (0..n).any(|i| m[i][j] > 1) {
                return Err(Error::InvalidPermutation("not a permutation matrix".into()));
            }
            images[j] = rows[0] + 1;
        }
        Permutation::new(images)
    }

    /// Permute a coordinate vector: `(w v)_i = v_{w^{-1}(i)}`.
    pub fn act_on_vector<T: Clone>(&self, v: &[T]) -> Vec<T> {
        let inv = self.inverse();
        (1..=self.n()).map(|i| v[inv.apply(i) - 1].clone()).collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

pub struct AllPermutations {
    next: Option<Vec<usize>>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let cur = self.next.take()?;
        let mut nxt = cur.clone();
        // standard next-permutation step
        let n = nxt.len();
        if n > 1 {
            let mut i = n - 1;
            while i > 0 && nxt[i - 1] >= nxt[i] {
                i -= 1;
            }
            if i > 0 {
                let mut j = n - 1;
                while nxt[j] <= nxt[i - 1] {
                    j -= 1;
                }
                nxt.swap(i - 1, j);
                nxt[i..].reverse();
                self.next = Some(nxt);
            }
        }
        Some(Permutation { images: cur })
    }
}

/// The root `e_i - e_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root {
    pub i: usize,
    pub j: usize,
}

impl Root {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i == j || i == 0 || j == 0 {
            return Err(Error::Shape(format!("root e_{i} - e_{j}")));
        }
        Ok(Root { i, j })
    }

    pub fn is_positive(&self) -> bool {
        self.i < self.j
    }

    /// Coordinates of `e_i - e_j` in `Z^n`.
    pub fn vector(&self, n: usize) -> Vec<i64> {
        let mut v = vec![0; n];
        v[self.i - 1] += 1;
        v[self.j - 1] -= 1;
        v
    }
}

/// The cycle `(k k+1 … n)`: `j -> j+1` for `k <= j < n`, `n -> k`.
pub fn w_k(n: usize, k: usize) -> Result<Permutation> {
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let c: Vec<usize> = (k..=n).collect();
    Permutation::cycle(n, &c)
}

/// Permutations `w` sending every simple root except the last into the
/// positive roots, i.e. `w(i) < w(i+1)` for `i = 1..n-2`, ordered by
/// `k = w(n)`.
///
/// The enumeration is cross-checked against the closed-form cycles `w_k`
/// and the length formula `l(w_k) = n - k`; a mismatch panics since it
/// means one of the two derivations is wrong.
pub fn coset_reps(n: usize) -> Result<Vec<Permutation>> {
    if n < 2 {
        return Err(Error::RankTooSmall { min: 2, got: n });
    }
    let mut reps: Vec<Permutation> = Permutation::all(n)
        .filter(|w| (1..n - 1).all(|i| w.apply(i) < w.apply(i + 1)))
        .collect();
    reps.sort_by_key(|w| w.apply(n));
    assert_eq!(reps.len(), n, "coset representative count");
    for (idx, w) in reps.iter().enumerate() {
        let k = idx + 1;
        let expected = w_k(n, k)?;
        assert_eq!(w, &expected, "coset representative for k={k}");
        assert_eq!(w.length(), n - k, "length of w_{k}");
    }
    Ok(reps)
}

/// Element of the product of Weyl groups over the embedding set, stored in
/// the fixed embedding order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeylElement {
    pub per_embedding: Vec<Permutation>,
}

impl WeylElement {
    pub fn new(per_embedding: Vec<Permutation>) -> Result<Self> {
        if let Some(first) = per_embedding.first() {
            let n = first.n();
            if per_embedding.iter().any(|p| p.n() != n) {
                return Err(Error::Shape("permutations of different sizes".into()));
            }
        }
        Ok(WeylElement { per_embedding })
    }

    pub fn identity(n: usize, embeddings: usize) -> Self {
        WeylElement {
            per_embedding: vec![Permutation::identity(n); embeddings],
        }
    }

    pub fn n(&self) -> usize {
        self.per_embedding.first().map_or(0, |p| p.n())
    }

    pub fn num_embeddings(&self) -> usize {
        self.per_embedding.len()
    }

    pub fn length(&self) -> usize {
        self.per_embedding.iter().map(Permutation::length).sum()
    }

    /// `(σw)^ι = w^{σ^{-1} ∘ ι}` where `sigma[ι]` is the index of `σ ∘ ι`.
    pub fn sigma_action(&self, sigma: &[usize]) -> Result<Self> {
        let e = self.num_embeddings();
        if sigma.len() != e {
            return Err(Error::EmbeddingMismatch {
                expected: e,
                got: sigma.len(),
            });
        }
        check_label_perm(sigma)?;
        let mut out = self.per_embedding.clone();
        for (iota, &target) in sigma.iter().enumerate() {
            out[target] = self.per_embedding[iota].clone();
        }
        Ok(WeylElement { per_embedding: out })
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.per_embedding.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn check_label_perm(sigma: &[usize]) -> Result<()> {
    let mut seen = vec![false; sigma.len()];
    for &s in sigma {
        if s >= sigma.len() || seen[s] {
            return Err(Error::InvalidPermutation(format!("label map {sigma:?}")));
        }
        seen[s] = true;
    }
    Ok(())
}

/// Coefficients of `∏_{i=1}^{n} (1 + q + … + q^{i-1})`, index = power of `q`.
pub fn length_generating_function(n: usize) -> Vec<u64> {
    let mut poly = vec![1u64];
    for i in 1..=n {
        poly = poly_mul(&poly, &vec![1u64; i]);
    }
    poly
}

pub(crate) fn poly_mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Distribution of lengths over `S_n`, by direct enumeration.
pub fn length_census(n: usize) -> Vec<u64> {
    let mut out = vec![0u64; n * n.saturating_sub(1) / 2 + 1];
    for w in Permutation::all(n) {
        out[w.length()] += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn lengths() {
        assert_eq!(Permutation::identity(5).length(), 0);
        assert_eq!(p(&[2, 3, 1]).length(), 2);
        assert_eq!(p(&[3, 1, 2]).length(), 2);
        assert_eq!(p(&[5, 4, 3, 2, 1]).length(), 10);
    }

    #[test]
    fn inversions() {
        assert!(Permutation::identity(4).inversion_set().is_empty());
        assert_eq!(p(&[2, 1]).inversion_set(), vec![(1, 2)]);
        assert_eq!(p(&[2, 3, 1]).inversion_set(), vec![(1, 3), (2, 3)]);
    }

    #[test]
    fn coset_reps_small() {
        assert_eq!(coset_reps(2).unwrap(), vec![p(&[2, 1]), p(&[1, 2])]);
        let r3 = coset_reps(3).unwrap();
        assert_eq!(r3, vec![p(&[2, 3, 1]), p(&[1, 3, 2]), p(&[1, 2, 3])]);
        let lens: Vec<usize> = r3.iter().map(Permutation::length).collect();
        assert_eq!(lens, vec![2, 1, 0]);
        assert!(matches!(coset_reps(1), Err(Error::RankTooSmall { .. })));
    }

    #[test]
    fn cycle_notation() {
        // (1 2 3): 1 -> 2 -> 3 -> 1
        assert_eq!(Permutation::cycle(3, &[1, 2, 3]).unwrap(), p(&[2, 3, 1]));
        assert_eq!(w_k(3, 2).unwrap(), p(&[1, 3, 2]));
    }

    #[test]
    fn composition_order() {
        let w = p(&[2, 3, 1]);
        let u = p(&[2, 1, 3]);
        // (w∘u)(1) = w(2) = 3
        assert_eq!(w.compose(&u).unwrap().apply(1), 3);
    }

    #[test]
    fn sigma_action_swaps() {
        let a = p(&[2, 1]);
        let b = Permutation::identity(2);
        let w = WeylElement::new(vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(w.sigma_action(&[0, 1]).unwrap(), w);
        let s = w.sigma_action(&[1, 0]).unwrap();
        assert_eq!(s.per_embedding, vec![b, a]);
        assert_eq!(s.sigma_action(&[1, 0]).unwrap(), w);
        assert!(w.sigma_action(&[0]).is_err());
    }

    #[test]
    fn exhaustive_small_invariants() {
        for n in 1..=6 {
            let mut census = vec![0u64; n * (n - 1) / 2 + 1];
            for w in Permutation::all(n) {
                assert_eq!(w.length(), w.inverse().length());
                assert_eq!(w.inversion_set().len(), w.length());
                assert_eq!(Permutation::from_matrix(&w.to_matrix()).unwrap(), w);
                census[w.length()] += 1;
            }
            assert_eq!(census, length_generating_function(n));
        }
    }

    #[test]
    fn enumeration_count() {
        assert_eq!(Permutation::all(5).count(), 120);
        assert_eq!(Permutation::all(0).count(), 1);
    }

    fn arb_perm(max_n: usize) -> impl Strategy<Value = Permutation> {
        (1..=max_n)
            .prop_flat_map(|n| Just((1..=n).collect::<Vec<usize>>()).prop_shuffle())
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn matrix_round_trip(w in arb_perm(9)) {
            prop_assert_eq!(Permutation::from_matrix(&w.to_matrix()).unwrap(), w);
        }

        #[test]
        fn inverse_composes_to_identity(w in arb_perm(9)) {
            prop_assert!(w.compose(&w.inverse()).unwrap().is_identity());
            prop_assert!(w.inverse().compose(&w).unwrap().is_identity());
        }

        #[test]
        fn sign_is_multiplicative(v in (2usize..8).prop_flat_map(|n| (
                Just((1..=n).collect::<Vec<usize>>()).prop_shuffle(),
                Just((1..=n).collect::<Vec<usize>>()).prop_shuffle())))
        {
            let a = Permutation::new(v.0).unwrap();
            let b = Permutation::new(v.1).unwrap();
            prop_assert_eq!(a.compose(&b).unwrap().sign(), a.sign() * b.sign());
        }

        #[test]
        fn sigma_action_composes(
            perms in prop::collection::vec(arb_perm(4).prop_filter("n=4", |p| p.n() == 4), 4),
            s in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
            t in Just(vec![0usize, 1, 2, 3]).prop_shuffle())
        {
            let w = WeylElement::new(perms).unwrap();
            let st: Vec<usize> = (0..4).map(|i| s[t[i]]).collect();
            let lhs = w.sigma_action(&st).unwrap();
            let rhs = w.sigma_action(&t).unwrap().sigma_action(&s).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
