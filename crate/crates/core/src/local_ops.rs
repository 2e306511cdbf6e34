//! Site subsets and spanning sets of the k-local operator spaces.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ONE};
use crate::tensor::{self, check_local_dim, DenseOperator};

/// Size-`k` subsets of `0..n` in lexicographic order.
#[derive(Debug, Clone)]
pub struct Subsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let k = out.len();
        let mut next = out.clone();
        // advance the rightmost index that still has room
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in (i + 1)..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                return Some(out);
            }
        }
        Some(out)
    }
}

pub fn subsets(n: usize, k: usize) -> Result<Subsets> {
    if k > n {
        return Err(Error::LocalityOutOfRange { k, num_sites: n });
    }
    Ok(Subsets {
        n,
        current: Some((0..k).collect()),
    })
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// The `d²` matrix units `E_ab = |a⟩⟨b|`, ordered by `a·d + b`.
pub fn single_site_basis(d: usize) -> Result<Vec<CMatrix>> {
    check_local_dim(d)?;
    Ok((0..d * d)
        .map(|ab| {
            let mut m = CMatrix::zeros(d, d);
            m[(ab / d, ab % d)] = ONE;
            m
        })
        .collect())
}

/// One spanning element: a product of single-site basis operators on `support`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalTerm {
    pub support: Vec<usize>,
    /// Index into the single-site basis for each site of `support`.
    pub factors: Vec<usize>,
}

/// All `(subset, factor choice)` pairs of a k-local spanning set, in a fixed order:
/// subsets lexicographically, then factor indices as base-`basis_len` digits.
pub fn local_terms(n: usize, k: usize, basis_len: usize) -> Result<Vec<LocalTerm>> {
    let count = pow_checked(basis_len, k)?;
    let mut out = Vec::with_capacity(binomial(n, k).saturating_mul(count));
    for subset in subsets(n, k)? {
        for code in 0..count {
            let mut factors = vec![0usize; k];
            let mut rem = code;
            for slot in factors.iter_mut().rev() {
                *slot = rem % basis_len;
                rem /= basis_len;
            }
            out.push(LocalTerm {
                support: subset.clone(),
                factors,
            });
        }
    }
    Ok(out)
}

fn pow_checked(base: usize, exp: usize) -> Result<usize> {
    base.checked_pow(exp as u32)
        .ok_or(Error::InvalidArgument("spanning set too large"))
}

/// Over-complete spanning set of `V^k` with every element embedded on all `n` sites.
#[derive(Debug, Clone)]
pub struct KLocalSpanningSet {
    pub k: usize,
    pub elements: Vec<DenseOperator>,
}

pub fn vk_spanning_set(n: usize, d: usize, k: usize) -> Result<KLocalSpanningSet> {
    let basis = single_site_basis(d)?;
    vk_spanning_set_with_basis(n, d, k, &basis)
}

/// Same as [`vk_spanning_set`] but with an arbitrary single-site operator basis.
pub fn vk_spanning_set_with_basis(
    n: usize,
    d: usize,
    k: usize,
    basis: &[CMatrix],
) -> Result<KLocalSpanningSet> {
    check_local_dim(d)?;
    let terms = local_terms(n, k, basis.len())?;
    let mut elements = Vec::with_capacity(terms.len());
    for term in terms {
        let mut matrix = CMatrix::identity(1, 1);
        for &f in &term.factors {
            matrix = matrix.kronecker(&basis[f]);
        }
        let local = DenseOperator::new(d, term.support, matrix)?;
        elements.push(tensor::embed(&local, n)?);
    }
    Ok(KLocalSpanningSet { k, elements })
}

/// Column-major vectorization of an operator matrix.
pub fn vectorize(m: &CMatrix) -> crate::linalg::CVector {
    crate::linalg::CVector::from_column_slice(m.as_slice())
}
