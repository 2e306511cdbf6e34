//! Renormalized states and the rank formula `|W_k| = Rank(ρ_k)`.
//!
//! The Haar average over unitaries on a subset `B` has the closed form
//! `tr_B(ρ) ⊗ I_B / d^|B|`, which is what [`twirl`] computes. The Monte Carlo
//! version lives in [`haar_mc_check`] as a cross-check only.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RankEstimate, RankPolicy, C64, ZERO};
use crate::local_ops::subsets;
use crate::states::gaussian_matrix;
use crate::tensor::{
    embed, partial_trace, pow, DenseOperator, DensityMatrix, PureState, SiteSplit,
};

fn check_subset(subset: &[usize], n: usize) -> Result<()> {
    for (i, &s) in subset.iter().enumerate() {
        if s >= n {
            return Err(Error::SiteOutOfRange {
                site: s,
                num_sites: n,
            });
        }
        if subset[..i].contains(&s) {
            return Err(Error::DuplicateSite(s));
        }
    }
    Ok(())
}

/// `tr_B(ρ) ⊗ I_B / d^|B|`, laid out on the original site order.
pub fn twirl(rho: &DensityMatrix, subset: &[usize]) -> Result<DensityMatrix> {
    let n = rho.num_sites();
    let d = rho.local_dim();
    check_subset(subset, n)?;
    let reduced = partial_trace(rho, subset)?;
    let kept: Vec<usize> = (0..n).filter(|s| !subset.contains(s)).collect();
    let split = SiteSplit::new(d, n, &kept);
    let scale = 1.0 / pow(d, subset.len()) as f64;
    let dim = pow(d, n);
    let mut out = CMatrix::from_element(dim, dim, ZERO);
    for &t in &split.rest {
        for (a, &oa) in split.support.iter().enumerate() {
            for (b, &ob) in split.support.iter().enumerate() {
                out[(oa + t, ob + t)] = reduced.matrix()[(a, b)] * scale;
            }
        }
    }
    Ok(DensityMatrix::from_parts(d, n, out))
}

/// `ρ_k` together with the subset weights used to build it.
#[derive(Debug, Clone)]
pub struct RenormalizedState {
    pub k: usize,
    pub rho: DensityMatrix,
    /// `(B, p(B))` in lexicographic subset order; sums to 1.
    pub weights: Vec<(Vec<usize>, f64)>,
}

/// Weighted average of twirls over all size-`k` subsets, normalized to unit trace.
///
/// `weights`, when given, has one strictly positive entry per subset in
/// lexicographic order and is normalized internally.
pub fn renormalized_state(
    rho: &DensityMatrix,
    k: usize,
    weights: Option<&[f64]>,
) -> Result<RenormalizedState> {
    let n = rho.num_sites();
    let all: Vec<Vec<usize>> = subsets(n, k)?.collect();
    let raw: Vec<f64> = match weights {
        Some(w) => {
            if w.len() != all.len() {
                return Err(Error::WeightCount {
                    expected: all.len(),
                    found: w.len(),
                });
            }
            if w.iter().any(|&x| x.is_nan() || x <= 0.0 || !x.is_finite()) {
                return Err(Error::NonPositiveWeight);
            }
            w.to_vec()
        }
        None => alloc::vec![1.0; all.len()],
    };
    let total: f64 = raw.iter().sum();
    let dim = pow(rho.local_dim(), n);
    let mut acc = CMatrix::from_element(dim, dim, ZERO);
    let mut trace_acc = 0.0;
    for (subset, &w) in all.iter().zip(&raw) {
        let t = twirl(rho, subset)?;
        trace_acc += w * t.trace();
        acc += t.matrix() * C64::new(w, 0.0);
    }
    if trace_acc == 0.0 {
        return Err(Error::ZeroState);
    }
    let matrix = acc.unscale(trace_acc);
    let weights = all.into_iter().zip(raw.iter().map(|w| w / total)).collect();
    Ok(RenormalizedState {
        k,
        rho: DensityMatrix::from_parts(rho.local_dim(), n, matrix),
        weights,
    })
}

/// Rank of a Hermitian PSD matrix from its Jacobi eigenvalues.
pub fn hermitian_rank(m: &CMatrix, policy: &RankPolicy) -> Result<RankEstimate> {
    let values = linalg::hermitian_eigenvalues(m)?;
    linalg::rank_from_singular_values(&values, m.nrows(), m.ncols(), policy)
}

/// Rank diagnostics of `ρ_k` for `k = 0..=N` with uniform weights.
pub fn wk_rank_estimates(psi: &PureState, policy: &RankPolicy) -> Result<Vec<RankEstimate>> {
    let rho = psi.normalized()?.density_matrix();
    (0..=psi.num_sites())
        .map(|k| {
            let rk = renormalized_state(&rho, k, None)?;
            hermitian_rank(rk.rho.matrix(), policy)
        })
        .collect()
}

/// `[|W_0|, …, |W_N|]` computed as ranks of the renormalized states.
pub fn wk_dims_via_rank(psi: &PureState, policy: &RankPolicy) -> Result<Vec<usize>> {
    let dims: Vec<usize> = wk_rank_estimates(psi, policy)?
        .iter()
        .map(|e| e.rank)
        .collect();
    crate::subspaces::check_wk_sequence(&dims, psi.dim())?;
    Ok(dims)
}

/// Rank formula for a density matrix; rejects anything that is not pure.
pub fn wk_dims_of_density(rho: &DensityMatrix, policy: &RankPolicy) -> Result<Vec<usize>> {
    let t = rho.trace();
    if t.is_nan() || t <= 0.0 {
        return Err(Error::ZeroState);
    }
    let purity = rho.purity();
    if (purity - 1.0).abs() > 1e-10 {
        return Err(Error::MixedState { purity });
    }
    let eig = linalg::hermitian_eigen(rho.matrix())?;
    let top = eig.vectors.column(0).into_owned();
    let psi = PureState::from_vector(rho.local_dim(), rho.num_sites(), top)?;
    wk_dims_via_rank(&psi, policy)
}

/// Haar-distributed unitary of side `n` (QR of a Ginibre matrix with phase fix).
pub fn haar_unitary<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = gaussian_matrix(rng, n, n);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let rjj = r[(j, j)];
        let norm = rjj.norm();
        let phase = if norm == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            rjj / norm
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Frobenius distance between the Monte Carlo average of `UρU†` over Haar
/// unitaries on `subset` and the analytic [`twirl`].
pub fn haar_mc_check(
    rho: &DensityMatrix,
    subset: &[usize],
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1"));
    }
    let n = rho.num_sites();
    let d = rho.local_dim();
    check_subset(subset, n)?;
    let exact = twirl(rho, subset)?;
    if subset.is_empty() {
        return Ok(linalg::frobenius(&(rho.matrix() - exact.matrix())));
    }
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = pow(d, n);
    let mut acc = CMatrix::from_element(dim, dim, ZERO);
    for _ in 0..samples {
        let u_local = haar_unitary(&mut rng, pow(d, sorted.len()));
        let u = embed(&DenseOperator::new(d, sorted.clone(), u_local)?, n)?.into_matrix();
        acc += &u * rho.matrix() * u.adjoint();
    }
    let mean = acc.unscale(samples as f64);
    Ok(linalg::frobenius(&(mean - exact.matrix())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;

    fn policy() -> RankPolicy {
        RankPolicy::default()
    }

    #[test]
    fn twirl_edge_subsets() {
        let rho = states::random_state(2, 2, 3).unwrap().density_matrix();
        let same = twirl(&rho, &[]).unwrap();
        assert!(linalg::frobenius(&(same.matrix() - rho.matrix())) < 1e-15);
        let full = twirl(&rho, &[0, 1]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2, 2).unwrap();
        assert!(linalg::frobenius(&(full.matrix() - mixed.matrix())) < 1e-15);
    }

    #[test]
    fn twirl_of_bell_is_maximally_mixed() {
        let rho = states::bell(2).unwrap().density_matrix();
        let t = twirl(&rho, &[0]).unwrap();
        let expected = CMatrix::identity(4, 4).unscale(4.0);
        assert!(linalg::frobenius(&(t.matrix() - expected)) < 1e-15);
        assert!(twirl(&rho, &[5]).is_err());
    }

    #[test]
    fn renormalized_state_k0_is_input() {
        let rho = states::w(3).unwrap().density_matrix();
        let r0 = renormalized_state(&rho, 0, None).unwrap();
        assert!(linalg::frobenius(&(r0.rho.matrix() - rho.matrix())) < 1e-14);
        assert_eq!(r0.weights.len(), 1);
    }

    #[test]
    fn renormalized_state_ranks() {
        let w = states::w(3).unwrap().density_matrix();
        let r1 = renormalized_state(&w, 1, None).unwrap();
        assert_eq!(hermitian_rank(r1.rho.matrix(), &policy()).unwrap().rank, 7);
        assert!((r1.rho.trace() - 1.0).abs() < 1e-12);
        r1.rho.check_psd().unwrap();

        let zz = states::zero(2, 2).unwrap().density_matrix();
        let r1 = renormalized_state(&zz, 1, None).unwrap();
        assert_eq!(hermitian_rank(r1.rho.matrix(), &policy()).unwrap().rank, 3);
    }

    #[test]
    fn renormalized_state_rejects_bad_weights() {
        let rho = states::w(3).unwrap().density_matrix();
        assert_eq!(
            renormalized_state(&rho, 1, Some(&[1.0, 0.0, 1.0])).unwrap_err(),
            Error::NonPositiveWeight
        );
        assert!(matches!(
            renormalized_state(&rho, 1, Some(&[1.0])),
            Err(Error::WeightCount { .. })
        ));
        assert!(matches!(
            renormalized_state(&rho, 4, None),
            Err(Error::LocalityOutOfRange { .. })
        ));
    }

    #[test]
    fn rank_path_examples() {
        assert_eq!(
            wk_dims_via_rank(&states::ghz(2, 3).unwrap(), &policy()).unwrap(),
            [1, 8, 8, 8]
        );
        assert_eq!(
            wk_dims_via_rank(&states::zero(2, 1).unwrap(), &policy()).unwrap(),
            [1, 2]
        );
    }

    #[test]
    fn mixed_input_is_gated() {
        let mixed = DensityMatrix::maximally_mixed(2, 2).unwrap();
        assert!(matches!(
            wk_dims_of_density(&mixed, &policy()),
            Err(Error::MixedState { .. })
        ));
        let pure = states::w(3).unwrap().density_matrix();
        assert_eq!(wk_dims_of_density(&pure, &policy()).unwrap(), [1, 7, 8, 8]);
    }

    #[test]
    fn haar_check_trivial_cases() {
        let rho = states::bell(2).unwrap().density_matrix();
        assert_eq!(haar_mc_check(&rho, &[], 10, 1).unwrap(), 0.0);
        let mixed = DensityMatrix::maximally_mixed(2, 2).unwrap();
        assert!(haar_mc_check(&mixed, &[1], 50, 1).unwrap() < 1e-12);
        assert!(haar_mc_check(&rho, &[0], 0, 1).is_err());
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = haar_unitary(&mut rng, 4);
        let eye = CMatrix::identity(4, 4);
        assert!(linalg::frobenius(&(u.adjoint() * &u - eye)) < 1e-12);
    }
}
