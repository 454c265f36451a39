//! Highest weights attached to an infinity type, Kostant weights of Weyl
//! elements, the distinguished elements `w^(k)` and the bottom degree.
//!
//! Embedding-indexed data is stored in the fixed embedding order where the
//! complex conjugate of embedding `2p` is `2p + 1`; callers with a different
//! pairing pass it explicitly through [`InfinityType::with_pairing`].

use crate::error::{Error, Result};
use crate::lchar;
use crate::weyl::{check_label_perm, poly_mul, Permutation, WeylElement};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default cap on `|W_{n,∞}| = (n!)^{#E}` for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InfinityType {
    pub eta: Vec<i64>,
    /// `conj[ι]` is the index of the conjugate embedding.
    pub conj: Vec<usize>,
}

impl InfinityType {
    /// Infinity type in the standard order `(ι_1, ῑ_1, ι_2, ῑ_2, …)`.
    pub fn paired(eta: Vec<i64>) -> Result<Self> {
        if eta.len() % 2 != 0 || eta.is_empty() {
            return Err(Error::Shape(format!(
                "infinity type needs an even, nonzero number of entries, got {}",
                eta.len()
            )));
        }
        let conj = (0..eta.len()).map(|i| i ^ 1).collect();
        Ok(InfinityType { eta, conj })
    }

    pub fn with_pairing(eta: Vec<i64>, conj: Vec<usize>) -> Result<Self> {
        if eta.len() != conj.len() {
            return Err(Error::EmbeddingMismatch {
                expected: eta.len(),
                got: conj.len(),
            });
        }
        check_label_perm(&conj)?;
        if conj.iter().enumerate().any(|(i, &c)| c == i || conj[c] != i) {
            return Err(Error::Shape("conjugation must be a fixed-point-free involution".into()));
        }
        Ok(InfinityType { eta, conj })
    }

    pub fn num_embeddings(&self) -> usize {
        self.eta.len()
    }

    /// Regularity `η(η - n) >= 0` at every embedding.
    pub fn check_regular(&self, n: usize) -> Result<()> {
        let n = n as i64;
        for &e in &self.eta {
            if e * (e - n) < 0 {
                return Err(Error::NotRegular { eta: e, n: n as usize });
            }
        }
        Ok(())
    }

    /// Balanced condition: in each conjugate pair one entry is `<= 0` and the other `>= n`.
    pub fn check_balanced(&self, n: usize) -> Result<()> {
        self.check_regular(n)?;
        let nn = n as i64;
        for (i, &c) in self.conj.iter().enumerate() {
            let (a, b) = (self.eta[i], self.eta[c]);
            if a.min(b) > 0 || a.max(b) < nn {
                return Err(Error::NotBalanced { a, b, n });
            }
        }
        Ok(())
    }

    /// `(ση)_ι = η_{σ^{-1} ∘ ι}`; `sigma[ι]` is the index of `σ ∘ ι`.
    /// When `k` is not CM, `σ` need not commute with conjugation on `E_k`;
    /// balancedness of the result is checked where it is used.
    pub fn sigma_action(&self, sigma: &[usize]) -> Result<Self> {
        if sigma.len() != self.eta.len() {
            return Err(Error::EmbeddingMismatch {
                expected: self.eta.len(),
                got: sigma.len(),
            });
        }
        check_label_perm(sigma)?;
        let mut eta = self.eta.clone();
        for (iota, &t) in sigma.iter().enumerate() {
            eta[t] = self.eta[iota];
        }
        Ok(InfinityType {
            eta,
            conj: self.conj.clone(),
        })
    }
}

/// Integer weights, one vector of length `n` per embedding.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight {
    pub per_embedding: Vec<Vec<i64>>,
}

impl Weight {
    pub fn new(per_embedding: Vec<Vec<i64>>) -> Result<Self> {
        if let Some(first) = per_embedding.first() {
            if per_embedding.iter().any(|v| v.len() != first.len()) {
                return Err(Error::Shape("weight vectors of different lengths".into()));
            }
        }
        Ok(Weight { per_embedding })
    }

    pub fn n(&self) -> usize {
        self.per_embedding.first().map_or(0, Vec::len)
    }

    pub fn is_dominant(&self) -> bool {
        self.per_embedding.iter().all(|v| v.windows(2).all(|p| p[0] >= p[1]))
    }
}

/// `2ρ = (n-1, n-3, …, 1-n)`.
pub fn two_rho(n: usize) -> Vec<i64> {
    (0..n).map(|i| n as i64 - 1 - 2 * i as i64).collect()
}

/// Highest weight attached to a balanced infinity type.
pub fn highest_weight_from_eta(eta: &InfinityType, n: usize) -> Result<Weight> {
    eta.check_regular(n)?;
    let nn = n as i64;
    let per_embedding = eta
        .eta
        .iter()
        .map(|&e| {
            let mut v;
            if e <= 0 {
                v = vec![0; n];
                v[n - 1] = e;
            } else {
                v = vec![1; n];
                v[0] = e - nn + 1;
            }
            v
        })
        .collect();
    Ok(Weight { per_embedding })
}

/// `w·μ - Σ_{(i,j) ∈ Inv(w)} (e_i - e_j)` for a single embedding.
///
/// Weights are permuted by `(w·μ)_i = μ_{w(i)}`. With this action (and
/// only this one) the inversion-set sum above satisfies
/// `2·kostant_weight = w·(2μ + 2ρ) - 2ρ` and `w^(k)` is the cycle given by
/// [`wk_component`].
pub fn kostant_weight_single(w: &Permutation, mu: &[i64]) -> Result<Vec<i64>> {
    if w.n() != mu.len() {
        return Err(Error::Shape(format!(
            "S_{} against weight of length {}",
            w.n(),
            mu.len()
        )));
    }
    let mut out = weight_action(w, mu);
    for (i, j) in w.inversion_set() {
        out[i - 1] -= 1;
        out[j - 1] += 1;
    }
    Ok(out)
}

pub fn kostant_weight(w: &WeylElement, mu: &Weight) -> Result<Weight> {
    if w.num_embeddings() != mu.per_embedding.len() {
        return Err(Error::EmbeddingMismatch {
            expected: mu.per_embedding.len(),
            got: w.num_embeddings(),
        });
    }
    let per_embedding = w
        .per_embedding
        .iter()
        .zip(&mu.per_embedding)
        .map(|(p, m)| kostant_weight_single(p, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(Weight { per_embedding })
}

/// `(w·μ)_i = μ_{w(i)}`.
pub fn weight_action(w: &Permutation, mu: &[i64]) -> Vec<i64> {
    (1..=w.n()).map(|i| mu[w.apply(i) - 1]).collect()
}

/// `w·(2μ + 2ρ) - 2ρ` for a single embedding.
pub fn doubled_dot_action(w: &Permutation, mu: &[i64]) -> Vec<i64> {
    let r = two_rho(mu.len());
    let shifted: Vec<i64> = mu.iter().zip(&r).map(|(m, r)| 2 * m + r).collect();
    weight_action(w, &shifted).iter().zip(&r).map(|(x, r)| x - r).collect()
}

/// Bottom degree `([k:Q]/2)(n-1)`, where `[k:Q]` is the number of embeddings.
pub fn bottom_degree(num_embeddings: usize, n: usize) -> usize {
    num_embeddings / 2 * (n - 1)
}

/// The component of `w^(k)` at one embedding.
pub fn wk_component(eta_iota: i64, k: usize, n: usize) -> Result<Permutation> {
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    if eta_iota <= 0 {
        Ok(crate::weyl::w_k(n, k)?.inverse())
    } else if eta_iota >= n as i64 {
        let c: Vec<usize> = (1..=k).collect();
        Permutation::cycle(n, &c)
    } else {
        Err(Error::NotRegular { eta: eta_iota, n })
    }
}

/// The distinguished element `w^(k)`; asserts its length is the bottom degree.
pub fn find_wk(eta: &InfinityType, k: usize, n: usize) -> Result<WeylElement> {
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    eta.check_balanced(n)?;
    let per_embedding = eta
        .eta
        .iter()
        .map(|&e| wk_component(e, k, n))
        .collect::<Result<Vec<_>>>()?;
    let w = WeylElement { per_embedding };
    assert_eq!(
        w.length(),
        bottom_degree(eta.num_embeddings(), n),
        "length of w^(k) must equal the bottom degree"
    );
    Ok(w)
}

/// Checks `find_wk(ση, k) = σ(find_wk(η, k))`.
pub fn find_wk_equivariant(eta: &InfinityType, k: usize, n: usize, sigma: &[usize]) -> Result<bool> {
    let lhs = find_wk(&eta.sigma_action(sigma)?, k, n)?;
    let rhs = find_wk(eta, k, n)?.sigma_action(sigma)?;
    Ok(lhs == rhs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniqueMatchReport {
    pub n: usize,
    pub k: usize,
    pub enumerated: u128,
    pub target: Weight,
    pub matches: Vec<WeylElement>,
    pub multiplicity: usize,
    pub min_length: Option<usize>,
    pub bottom_degree: usize,
    pub equals_find_wk: bool,
}

impl UniqueMatchReport {
    pub fn passed(&self) -> bool {
        self.multiplicity == 1 && self.equals_find_wk && self.min_length == Some(self.bottom_degree)
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Enumerates all of `W_{n,∞}` and collects the elements whose Kostant
/// weight against `μ(η)` equals the weight of `(Λ^(k)_{η,∞})^{-1}`.
///
/// Weights are computed once per embedding and per element of `S_n`; the
/// product is then walked in full. Results are sorted, so the report does
/// not depend on the thread count.
pub fn verify_unique_match(eta: &InfinityType, k: usize, n: usize, cap: u128) -> Result<UniqueMatchReport> {
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    eta.check_balanced(n)?;
    let e = eta.num_embeddings();
    let size = factorial(n).checked_pow(e as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::EnumerationCap { size, cap });
    }
    let mu = highest_weight_from_eta(eta, n)?;
    let target = lchar::inverse_lambda_weight(eta, k, n)?;
    let perms: Vec<Permutation> = Permutation::all(n).collect();
    // hits[ι][idx]: does the idx-th permutation reproduce the target at ι
    let hits: Vec<Vec<bool>> = (0..e)
        .map(|iota| {
            perms
                .iter()
                .map(|w| kostant_weight_single(w, &mu.per_embedding[iota]).map(|x| x == target.per_embedding[iota]))
                .collect::<Result<Vec<bool>>>()
        })
        .collect::<Result<_>>()?;
    let m = perms.len();
    let rest = e - 1;
    let mut found: Vec<Vec<usize>> = (0..m)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut local = Vec::new();
            let mut idx = vec![0usize; rest];
            loop {
                let all = hits[0][first] && idx.iter().enumerate().all(|(p, &i)| hits[p + 1][i]);
                if all {
                    let mut full = vec![first];
                    full.extend_from_slice(&idx);
                    local.push(full);
                }
                // odometer
                let mut pos = 0;
                loop {
                    if pos == rest {
                        return local;
                    }
                    idx[pos] += 1;
                    if idx[pos] < m {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
            }
        })
        .collect();
    found.sort();
    let matches: Vec<WeylElement> = found
        .iter()
        .map(|ix| WeylElement {
            per_embedding: ix.iter().map(|&i| perms[i].clone()).collect(),
        })
        .collect();
    let wk = find_wk(eta, k, n)?;
    let c_n = bottom_degree(e, n);
    let min_length = matches.iter().map(WeylElement::length).min();
    let at_min = matches.iter().filter(|w| Some(w.length()) == min_length).count();
    Ok(UniqueMatchReport {
        n,
        k,
        enumerated: size,
        target,
        equals_find_wk: matches.len() == 1 && matches[0] == wk,
        multiplicity: at_min,
        min_length,
        bottom_degree: c_n,
        matches,
    })
}

/// Length distribution over `W_{n,∞}` with `e` embeddings, by walking the
/// whole product group. Fails above `cap` elements.
pub fn census_direct(n: usize, e: usize, cap: u128) -> Result<Vec<u64>> {
    let size = factorial(n).checked_pow(e as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::EnumerationCap { size, cap });
    }
    let lengths: Vec<usize> = Permutation::all(n).map(|w| w.length()).collect();
    let max = e * n * n.saturating_sub(1) / 2;
    let mut out = vec![0u64; max + 1];
    let m = lengths.len();
    let mut idx = vec![0usize; e];
    loop {
        out[idx.iter().map(|&i| lengths[i]).sum::<usize>()] += 1;
        let mut pos = 0;
        loop {
            if pos == e {
                return Ok(out);
            }
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Length distribution over `W_{n,∞}` as the `e`-fold convolution of the
/// enumerated distribution on `S_n` (lengths add across embeddings).
pub fn census(n: usize, e: usize) -> Vec<u64> {
    let single = crate::weyl::length_census(n);
    let mut out = vec![1u64];
    for _ in 0..e {
        out = poly_mul(&out, &single);
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
    fn highest_weights() {
        let w = |e: i64, n: usize| {
            highest_weight_from_eta(&InfinityType::paired(vec![e, n as i64]).unwrap(), n)
                .unwrap()
                .per_embedding[0]
                .clone()
        };
        assert_eq!(w(-2, 3), vec![0, 0, -2]);
        assert_eq!(w(3, 3), vec![1, 1, 1]);
        assert_eq!(w(5, 2), vec![4, 1]);
        let bad = InfinityType::paired(vec![1, 3]).unwrap();
        assert!(matches!(
            highest_weight_from_eta(&bad, 3),
            Err(Error::NotRegular { .. })
        ));
    }

    #[test]
    fn kostant_weight_examples() {
        assert_eq!(kostant_weight_single(&p(&[2, 1]), &[1, 1]).unwrap(), vec![0, 2]);
        let mu = [3, 1, 0, -2];
        for w in Permutation::all(4) {
            let kw: Vec<i64> = kostant_weight_single(&w, &mu).unwrap().iter().map(|x| 2 * x).collect();
            assert_eq!(kw, doubled_dot_action(&w, &mu));
        }
        assert!(kostant_weight_single(&p(&[2, 1]), &[1, 1, 1]).is_err());
    }

    #[test]
    fn find_wk_examples() {
        let eta = InfinityType::paired(vec![0, 2]).unwrap();
        let w = find_wk(&eta, 2, 2).unwrap();
        assert_eq!(w.per_embedding, vec![Permutation::identity(2), p(&[2, 1])]);
        assert_eq!(w.length(), 1);
        let eta3 = InfinityType::paired(vec![-1, 4]).unwrap();
        assert_eq!(find_wk(&eta3, 2, 3).unwrap().per_embedding[0], p(&[1, 3, 2]));
        assert!(matches!(find_wk(&eta, 3, 2), Err(Error::KOutOfRange { .. })));
        let unbalanced = InfinityType::paired(vec![0, 0]).unwrap();
        assert!(matches!(find_wk(&unbalanced, 1, 2), Err(Error::NotBalanced { .. })));
    }

    #[test]
    fn unique_match_examples() {
        let eta = InfinityType::paired(vec![0, 2]).unwrap();
        for k in 1..=2 {
            let r = verify_unique_match(&eta, k, 2, DEFAULT_ENUMERATION_CAP).unwrap();
            assert_eq!(r.enumerated, 4);
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.min_length, Some(1));
        }
        let r = verify_unique_match(&eta, 2, 2, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(r.matches[0].per_embedding, vec![Permutation::identity(2), p(&[2, 1])]);
        assert!(matches!(
            verify_unique_match(&eta, 1, 2, 3),
            Err(Error::EnumerationCap { .. })
        ));
    }

    #[test]
    fn census_matches_generating_function() {
        for n in 1..=4 {
            for e in [2usize, 4] {
                let gf = crate::weyl::length_generating_function(n);
                let mut expected = vec![1u64];
                for _ in 0..e {
                    expected = poly_mul(&expected, &gf);
                }
                assert_eq!(census(n, e), expected);
                if let Ok(direct) = census_direct(n, e, 2_000_000) {
                    assert_eq!(direct, expected);
                }
            }
        }
    }

    #[test]
    fn sigma_action_moves_exponents() {
        let eta = InfinityType::paired(vec![0, 3, -1, 4]).unwrap();
        assert_eq!(eta.sigma_action(&[1, 0, 3, 2]).unwrap().eta, vec![3, 0, 4, -1]);
        let moved = eta.sigma_action(&[2, 1, 0, 3]).unwrap();
        assert_eq!(moved.eta, vec![-1, 3, 0, 4]);
        assert!(moved.check_balanced(3).is_ok());
        assert!(eta.sigma_action(&[0, 0, 1, 2]).is_err());
    }

    fn arb_balanced(pairs: usize, n: usize) -> impl Strategy<Value = InfinityType> {
        prop::collection::vec((0i64..=4, 0i64..=4, any::<bool>()), pairs).prop_map(move |v| {
            let mut eta = Vec::new();
            for (lo, hi, flip) in v {
                let (a, b) = (-lo, n as i64 + hi);
                if flip {
                    eta.extend([b, a]);
                } else {
                    eta.extend([a, b]);
                }
            }
            InfinityType::paired(eta).unwrap()
        })
    }

    proptest! {
        #[test]
        fn dot_action_identity(mu in prop::collection::vec(-6i64..6, 1..6), seed in 0usize..720) {
            let mut mu = mu;
            mu.sort_unstable_by(|a, b| b.cmp(a));
            let n = mu.len();
            let all: Vec<Permutation> = Permutation::all(n).collect();
            let w = &all[seed % all.len()];
            let kw: Vec<i64> = kostant_weight_single(w, &mu).unwrap().iter().map(|x| 2 * x).collect();
            prop_assert_eq!(kw, doubled_dot_action(w, &mu));
        }

        #[test]
        fn wk_length_is_bottom_degree((eta, n, k) in (1usize..6).prop_flat_map(|n|
                (arb_balanced(2, n), Just(n), 1..=n)))
        {
            let w = find_wk(&eta, k, n).unwrap();
            prop_assert_eq!(w.length(), bottom_degree(4, n));
            prop_assert!(highest_weight_from_eta(&eta, n).unwrap().is_dominant());
            // conjugation swaps the two embeddings of each pair
            prop_assert!(find_wk_equivariant(&eta, k, n, &[1, 0, 3, 2]).unwrap());
            prop_assert!(find_wk_equivariant(&eta, k, n, &[2, 3, 0, 1]).unwrap());
        }

        #[test]
        fn delorme_weight_match((eta, n, k) in (1usize..5).prop_flat_map(|n|
                (arb_balanced(1, n), Just(n), 1..=n)))
        {
            let mu = highest_weight_from_eta(&eta, n).unwrap();
            let kw = kostant_weight(&find_wk(&eta, k, n).unwrap(), &mu).unwrap();
            prop_assert_eq!(kw, lchar::inverse_lambda_weight(&eta, k, n).unwrap());
        }
    }
}
