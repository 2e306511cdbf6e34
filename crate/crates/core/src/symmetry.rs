//! Symmetries of the entanglement polynomial: invertible local operators,
//! site permutations, and a span test for candidate conjugations.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::entpoly::{polynomial_with_policy, EntanglementPolynomial, Method};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RankPolicy};
use crate::local_ops::{vectorize, vk_spanning_set};
use crate::states::{derive_seed, gaussian_matrix};
use crate::tensor::{permute_sites, pow, DenseOperator, PureState};

/// Default condition-number bound for sampled local factors.
pub const DEFAULT_COND_BOUND: f64 = 100.0;
const MAX_ATTEMPTS: usize = 1000;

/// `L = L_0 ⊗ … ⊗ L_{N-1}` with each factor invertible.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalInvertible {
    pub factors: Vec<CMatrix>,
    pub seed: u64,
    pub cond_bound: f64,
}

impl LocalInvertible {
    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        let sites: Vec<usize> = (0..self.factors.len()).collect();
        let refs: Vec<&CMatrix> = self.factors.iter().collect();
        psi.apply_single_site_factors(&sites, &refs)
    }

    /// The full `d^N × d^N` matrix.
    pub fn to_operator(&self) -> Result<DenseOperator> {
        let d = self.factors.first().map_or(2, |f| f.nrows());
        let mut m = CMatrix::identity(1, 1);
        for f in &self.factors {
            m = m.kronecker(f);
        }
        DenseOperator::full(d, self.factors.len(), m)
    }
}

/// Gaussian local factors, each resampled until its condition number is at most `cond_bound`.
pub fn random_local_invertible(
    n: usize,
    d: usize,
    seed: u64,
    cond_bound: f64,
) -> Result<LocalInvertible> {
    crate::tensor::check_local_dim(d)?;
    if cond_bound.is_nan() || cond_bound <= 1.0 {
        return Err(Error::InvalidArgument("condition bound must exceed 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = Vec::with_capacity(n);
    for _ in 0..n {
        let mut accepted = None;
        for _ in 0..MAX_ATTEMPTS {
            let m = gaussian_matrix(&mut rng, d, d);
            if linalg::condition_number(&m) <= cond_bound {
                accepted = Some(m);
                break;
            }
        }
        factors.push(accepted.ok_or(Error::SamplingFailure(MAX_ATTEMPTS))?);
    }
    Ok(LocalInvertible {
        factors,
        seed,
        cond_bound,
    })
}

/// Outcome of one SLOCC trial.
#[derive(Debug, Clone)]
pub struct SloccTrial {
    pub index: usize,
    /// Seed that reproduces this trial's operator via [`random_local_invertible`].
    pub seed: u64,
    pub outcome: Result<EntanglementPolynomial>,
}

impl SloccTrial {
    pub fn matches(&self, reference: &EntanglementPolynomial) -> bool {
        self.outcome.as_ref().is_ok_and(|p| p == reference)
    }
}

#[derive(Debug, Clone)]
pub struct SloccReport {
    pub reference: EntanglementPolynomial,
    pub trials: Vec<SloccTrial>,
}

impl SloccReport {
    pub fn mismatches(&self) -> Vec<&SloccTrial> {
        self.trials
            .iter()
            .filter(|t| !t.matches(&self.reference))
            .collect()
    }
}

/// Run trial `index` of a SLOCC fuzz campaign seeded by `base_seed`.
pub fn slocc_trial(
    psi: &PureState,
    index: usize,
    base_seed: u64,
    method: Method,
    policy: &RankPolicy,
) -> SloccTrial {
    let seed = derive_seed(base_seed, index as u64);
    let outcome =
        random_local_invertible(psi.num_sites(), psi.local_dim(), seed, DEFAULT_COND_BOUND)
            .and_then(|l| l.apply(psi))
            .and_then(|moved| polynomial_with_policy(&moved, method, policy));
    SloccTrial {
        index,
        seed,
        outcome,
    }
}

pub fn slocc_invariance_check(psi: &PureState, trials: usize, seed: u64) -> Result<SloccReport> {
    slocc_invariance_check_with(psi, trials, seed, Method::Both, &RankPolicy::default())
}

pub fn slocc_invariance_check_with(
    psi: &PureState,
    trials: usize,
    seed: u64,
    method: Method,
    policy: &RankPolicy,
) -> Result<SloccReport> {
    let reference = polynomial_with_policy(psi, method, policy)?;
    let trials = (0..trials)
        .map(|i| slocc_trial(psi, i, seed, method, policy))
        .collect();
    Ok(SloccReport { reference, trials })
}

#[derive(Debug, Clone)]
pub struct PermutationTrial {
    pub perm: Vec<usize>,
    pub outcome: Result<EntanglementPolynomial>,
}

#[derive(Debug, Clone)]
pub struct PermutationReport {
    pub reference: EntanglementPolynomial,
    pub trials: Vec<PermutationTrial>,
}

impl PermutationReport {
    pub fn mismatches(&self) -> Vec<&PermutationTrial> {
        self.trials
            .iter()
            .filter(|t| t.outcome.as_ref().map_or(true, |p| *p != self.reference))
            .collect()
    }
}

pub fn permutation_invariance_check(
    psi: &PureState,
    perms: &[Vec<usize>],
) -> Result<PermutationReport> {
    permutation_invariance_check_with(psi, perms, Method::Both, &RankPolicy::default())
}

pub fn permutation_invariance_check_with(
    psi: &PureState,
    perms: &[Vec<usize>],
    method: Method,
    policy: &RankPolicy,
) -> Result<PermutationReport> {
    let reference = polynomial_with_policy(psi, method, policy)?;
    let trials = perms
        .iter()
        .map(|perm| PermutationTrial {
            perm: perm.clone(),
            outcome: permute_sites(psi, perm)
                .and_then(|p| polynomial_with_policy(&p, method, policy)),
        })
        .collect();
    Ok(PermutationReport { reference, trials })
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = alloc::vec![current.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n)
            .rev()
            .find(|&j| current[j] > current[i - 1])
            .expect("pivot exists");
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

/// Whether conjugation `O ↦ g⁻¹ O g` maps `V^k` into itself.
///
/// `g` must act on all `n` sites. Membership is decided by the residual of
/// each conjugated spanning element after projection onto an orthonormal
/// basis of `V^k`.
pub fn adjoint_automorphism_check(g: &DenseOperator, k: usize, n: usize, d: usize) -> Result<bool> {
    let dim = pow(d, n);
    if g.local_dim() != d {
        return Err(Error::LocalDimMismatch {
            left: g.local_dim(),
            right: d,
        });
    }
    if g.support().len() != n || g.matrix().nrows() != dim {
        return Err(Error::ShapeMismatch {
            expected: dim,
            found: g.matrix().nrows(),
        });
    }
    if linalg::condition_number(g.matrix()) > 1e12 {
        return Err(Error::SingularOperator);
    }
    let g_inv = g
        .matrix()
        .clone()
        .try_inverse()
        .ok_or(Error::SingularOperator)?;
    let span = vk_spanning_set(n, d, k)?;
    let mut stacked = CMatrix::zeros(dim * dim, span.elements.len());
    for (j, op) in span.elements.iter().enumerate() {
        stacked.set_column(j, &vectorize(op.matrix()));
    }
    let (basis, _) = linalg::column_space(&stacked, &RankPolicy::default())?;
    for op in &span.elements {
        let conj = &g_inv * op.matrix() * g.matrix();
        let v = vectorize(&conj);
        let norm = v.norm();
        if norm == 0.0 {
            continue;
        }
        let residual = &v - &basis * (basis.adjoint() * &v);
        if residual.norm() > 1e-8 * norm {
            return Ok(false);
        }
    }
    Ok(true)
}
