//! Brute-force construction of `W_k = span{ O|ψ⟩ : O ∈ V^k }` and of the
//! orthogonal layers `ΔW_k`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RankEstimate, RankPolicy};
use crate::local_ops::{local_terms, single_site_basis};
use crate::tensor::PureState;

/// Orthonormal basis of `W_k` for some state.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub k: usize,
    pub columns: CMatrix,
    pub rank: RankEstimate,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.columns.ncols()
    }

    pub fn projector(&self) -> CMatrix {
        &self.columns * self.columns.adjoint()
    }
}

/// Image vectors `O|ψ⟩` for every spanning element of `V^k`, stacked as columns
/// in the fixed term order.
pub fn image_vectors(psi: &PureState, k: usize, basis: &[CMatrix]) -> Result<CMatrix> {
    let n = psi.num_sites();
    let terms = local_terms(n, k, basis.len())?;
    let mut stacked = CMatrix::zeros(psi.dim(), terms.len());
    for (j, term) in terms.iter().enumerate() {
        let factors: Vec<&CMatrix> = term.factors.iter().map(|&f| &basis[f]).collect();
        let image = psi.apply_single_site_factors(&term.support, &factors)?;
        stacked.set_column(j, image.amplitudes());
    }
    Ok(stacked)
}

pub fn span_wk(psi: &PureState, k: usize, policy: &RankPolicy) -> Result<SubspaceBasis> {
    let basis = single_site_basis(psi.local_dim())?;
    span_wk_with_basis(psi, k, &basis, policy)
}

/// `W_k` built from an arbitrary single-site operator basis.
pub fn span_wk_with_basis(
    psi: &PureState,
    k: usize,
    basis: &[CMatrix],
    policy: &RankPolicy,
) -> Result<SubspaceBasis> {
    if k > psi.num_sites() {
        return Err(Error::LocalityOutOfRange {
            k,
            num_sites: psi.num_sites(),
        });
    }
    let psi = psi.normalized()?;
    let stacked = image_vectors(&psi, k, basis)?;
    let (columns, rank) = linalg::column_space(&stacked, policy)?;
    Ok(SubspaceBasis { k, columns, rank })
}

/// Layered decomposition `H = ΔW_0 ⊕ ΔW_1 ⊕ …` for one state.
#[derive(Debug, Clone)]
pub struct DeltaDecomposition {
    pub local_dim: usize,
    pub num_sites: usize,
    /// `|W_k|` for `k = 0..=N`.
    pub wk_dims: Vec<usize>,
    /// Rank diagnostics per `k`.
    pub ranks: Vec<RankEstimate>,
    /// `ΔP_k` for `k = 0..=N_ψ`; higher layers are zero.
    pub projectors: Vec<CMatrix>,
}

impl DeltaDecomposition {
    /// `|ΔW_k|` for `k = 0..=N_ψ`.
    pub fn delta_dims(&self) -> Vec<usize> {
        delta_dims(&self.wk_dims)
    }

    /// Smallest `k` with `W_{k+1} = W_k`.
    pub fn n_psi(&self) -> usize {
        self.projectors.len() - 1
    }

    pub fn hilbert_dim(&self) -> usize {
        *self.wk_dims.last().expect("at least W_0")
    }
}

/// `|W_k| - |W_{k-1}|` with trailing zeros dropped.
pub(crate) fn delta_dims(wk: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = wk
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            if k == 0 {
                w
            } else {
                w.saturating_sub(wk[k - 1])
            }
        })
        .collect();
    while out.len() > 1 && out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// Checks that a `|W_k|` sequence starts at 1, grows until it reaches the full
/// dimension, and stays there.
pub(crate) fn check_wk_sequence(wk: &[usize], full: usize) -> Result<()> {
    if wk.first() != Some(&1) {
        return Err(Error::InvariantViolation("|W_0| must be 1"));
    }
    if wk.last() != Some(&full) {
        return Err(Error::InvariantViolation(
            "|W_N| must equal the Hilbert space dimension",
        ));
    }
    for pair in wk.windows(2) {
        if pair[1] < pair[0] {
            return Err(Error::InvariantViolation("|W_k| must be nondecreasing"));
        }
        if pair[1] == pair[0] && pair[0] != full {
            return Err(Error::InvariantViolation(
                "|W_k| stalled below the full dimension",
            ));
        }
    }
    Ok(())
}

pub fn delta_decomposition(psi: &PureState, policy: &RankPolicy) -> Result<DeltaDecomposition> {
    let basis = single_site_basis(psi.local_dim())?;
    delta_decomposition_with_basis(psi, &basis, policy)
}

pub fn delta_decomposition_with_basis(
    psi: &PureState,
    basis: &[CMatrix],
    policy: &RankPolicy,
) -> Result<DeltaDecomposition> {
    let psi = psi.normalized()?;
    let n = psi.num_sites();
    let full = psi.dim();
    let mut wk_dims = Vec::with_capacity(n + 1);
    let mut ranks = Vec::with_capacity(n + 1);
    let mut projectors = Vec::new();
    let mut previous = CMatrix::zeros(full, full);
    for k in 0..=n {
        let span = span_wk_with_basis(&psi, k, basis, policy)?;
        let p = span.projector();
        if wk_dims.last().is_none_or(|&w| w < span.dim()) {
            projectors.push(&p - &previous);
        }
        previous = p;
        wk_dims.push(span.dim());
        ranks.push(span.rank);
    }
    check_wk_sequence(&wk_dims, full)?;
    Ok(DeltaDecomposition {
        local_dim: psi.local_dim(),
        num_sites: n,
        wk_dims,
        ranks,
        projectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;

    fn policy() -> RankPolicy {
        RankPolicy::default()
    }

    #[test]
    fn w0_is_one_dimensional() {
        for psi in [
            states::bell(2).unwrap(),
            states::w(3).unwrap(),
            states::ghz(3, 3).unwrap(),
        ] {
            assert_eq!(span_wk(&psi, 0, &policy()).unwrap().dim(), 1);
        }
    }

    #[test]
    fn first_layers_of_bell_and_ghz() {
        assert_eq!(
            span_wk(&states::bell(2).unwrap(), 1, &policy())
                .unwrap()
                .dim(),
            4
        );
        assert_eq!(
            span_wk(&states::ghz(2, 3).unwrap(), 1, &policy())
                .unwrap()
                .dim(),
            8
        );
    }

    #[test]
    fn zero_state_is_rejected() {
        let zero = PureState::new(2, 1, alloc::vec![linalg::ZERO; 2]).unwrap();
        assert_eq!(span_wk(&zero, 0, &policy()).unwrap_err(), Error::ZeroState);
        assert_eq!(
            delta_decomposition(&zero, &policy()).unwrap_err(),
            Error::ZeroState
        );
    }

    #[test]
    fn basis_columns_are_orthonormal_and_nested() {
        let psi = states::w(3).unwrap();
        let mut prev: Option<SubspaceBasis> = None;
        for k in 0..=3 {
            let span = span_wk(&psi, k, &policy()).unwrap();
            let gram = span.columns.adjoint() * &span.columns;
            let eye = CMatrix::identity(span.dim(), span.dim());
            assert!(linalg::max_abs(&(gram - eye)) < 1e-10);
            if let Some(prev) = prev {
                let p = span.projector();
                let residual = &prev.columns - &p * &prev.columns;
                assert!(linalg::max_abs(&residual) < 1e-8);
            }
            prev = Some(span);
        }
    }

    #[test]
    fn delta_projectors_for_w_and_ghz() {
        let w = delta_decomposition(&states::w(3).unwrap(), &policy()).unwrap();
        assert_eq!(w.wk_dims, alloc::vec![1, 7, 8, 8]);
        assert_eq!(w.delta_dims(), alloc::vec![1, 6, 1]);
        assert!((linalg::trace(&w.projectors[2]).re - 1.0).abs() < 1e-10);

        let ghz = delta_decomposition(&states::ghz(2, 3).unwrap(), &policy()).unwrap();
        assert_eq!(ghz.n_psi(), 1);
        assert_eq!(ghz.delta_dims(), alloc::vec![1, 7]);
    }

    #[test]
    fn first_projector_is_the_state() {
        let psi = states::w(3).unwrap();
        let dec = delta_decomposition(&psi, &policy()).unwrap();
        let expected = psi.density_matrix();
        assert!(linalg::frobenius(&(&dec.projectors[0] - expected.matrix())) < 1e-10);
    }

    #[test]
    fn projectors_are_orthogonal_idempotents_summing_to_identity() {
        let psi = states::random_state(2, 3, 11).unwrap();
        let dec = delta_decomposition(&psi, &policy()).unwrap();
        let mut sum = CMatrix::zeros(8, 8);
        for (j, pj) in dec.projectors.iter().enumerate() {
            assert!(linalg::frobenius(&(pj * pj - pj)) < 1e-8);
            let tr = linalg::trace(pj).re;
            assert!((tr - tr.round()).abs() < 1e-6);
            for pk in dec.projectors.iter().skip(j + 1) {
                assert!(linalg::frobenius(&(pj * pk)) < 1e-8);
            }
            sum += pj;
        }
        assert!(linalg::frobenius(&(sum - CMatrix::identity(8, 8))) < 1e-8);
    }

    #[test]
    fn wk_sequence_checks() {
        assert!(check_wk_sequence(&[1, 4, 4], 4).is_ok());
        assert!(check_wk_sequence(&[2, 4, 4], 4).is_err());
        assert!(check_wk_sequence(&[1, 3, 3, 8], 8).is_err());
        assert!(check_wk_sequence(&[1, 3], 4).is_err());
    }
}
