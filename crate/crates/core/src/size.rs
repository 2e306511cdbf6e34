//! State-dependent operator size.
//!
//! For a reference state ψ the layers `ΔP_k` define the size operator
//! `n_ψ = Σ k ΔP_k` and the generating operator `F(x) = Σ x^k ΔP_k`.
//! Everything here is built from [`delta_decomposition`].

use alloc::vec::Vec;

// float methods come from libm when std is absent
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RankPolicy, C64};
use crate::subspaces::{delta_decomposition, DeltaDecomposition};
use crate::tensor::{DenseOperator, PureState};

/// The layer projectors of a state with their eigenvalues `k`.
#[derive(Debug, Clone)]
pub struct SizeSpectrum {
    pub local_dim: usize,
    pub num_sites: usize,
    /// `ΔP_0 … ΔP_{N_ψ}`.
    pub projectors: Vec<CMatrix>,
    pub source: PureState,
}

impl SizeSpectrum {
    pub fn from_decomposition(dec: DeltaDecomposition, source: PureState) -> Self {
        Self {
            local_dim: dec.local_dim,
            num_sites: dec.num_sites,
            projectors: dec.projectors,
            source,
        }
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    /// Eigenvalue multiplicities `tr ΔP_k`, rounded.
    pub fn multiplicities(&self) -> Vec<usize> {
        self.projectors
            .iter()
            .map(|p| linalg::trace(p).re.round() as usize)
            .collect()
    }

    /// `n_ψ = Σ k ΔP_k`.
    pub fn size_operator(&self) -> CMatrix {
        self.weighted_sum(|k| k as f64)
    }

    /// `F(x) = Σ x^k ΔP_k`.
    pub fn generating_operator(&self, x: f64) -> CMatrix {
        self.weighted_sum(|k| x.powi(k as i32))
    }

    /// `∂_x F(x) = Σ k x^(k-1) ΔP_k`.
    pub fn generating_derivative(&self, x: f64) -> CMatrix {
        self.weighted_sum(|k| {
            if k == 0 {
                0.0
            } else {
                k as f64 * x.powi(k as i32 - 1)
            }
        })
    }

    fn weighted_sum(&self, weight: impl Fn(usize) -> f64) -> CMatrix {
        let dim = self.dim();
        let mut acc = CMatrix::zeros(dim, dim);
        for (k, p) in self.projectors.iter().enumerate() {
            let w = weight(k);
            if w != 0.0 {
                acc += p * C64::new(w, 0.0);
            }
        }
        acc
    }

    fn check_compatible(&self, phi: &PureState) -> Result<()> {
        if phi.local_dim() != self.local_dim {
            return Err(Error::LocalDimMismatch {
                left: phi.local_dim(),
                right: self.local_dim,
            });
        }
        if phi.num_sites() != self.num_sites {
            return Err(Error::ShapeMismatch {
                expected: self.num_sites,
                found: phi.num_sites(),
            });
        }
        Ok(())
    }

    /// `Pr(k) = ⟨φ|ΔP_k|φ⟩` for normalized φ, padded with zeros up to `N`.
    pub fn distribution(&self, phi: &PureState) -> Result<SizeDistribution> {
        self.check_compatible(phi)?;
        let phi = phi.normalized()?;
        let v = phi.amplitudes();
        let mut probabilities: Vec<f64> = self
            .projectors
            .iter()
            .map(|p| v.dotc(&(p * v)).re.max(0.0))
            .collect();
        probabilities.resize(self.num_sites + 1, 0.0);
        Ok(SizeDistribution { probabilities })
    }

    /// `⟨φ|n_ψ|φ⟩` for normalized φ.
    pub fn relative_size(&self, phi: &PureState) -> Result<f64> {
        Ok(self.distribution(phi)?.mean())
    }
}

/// Probabilities of each size `k = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeDistribution {
    pub probabilities: Vec<f64>,
}

impl SizeDistribution {
    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Distribution of `k₁ + k₂` for independent sizes.
    pub fn convolve(&self, other: &Self) -> Self {
        let mut out = alloc::vec![0.0; self.probabilities.len() + other.probabilities.len() - 1];
        for (i, a) in self.probabilities.iter().enumerate() {
            for (j, b) in other.probabilities.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { probabilities: out }
    }
}

pub fn size_operator(psi: &PureState) -> Result<SizeSpectrum> {
    let dec = delta_decomposition(psi, &RankPolicy::default())?;
    Ok(SizeSpectrum::from_decomposition(dec, psi.normalized()?))
}

/// Size of φ relative to ψ.
pub fn relative_size(phi: &PureState, psi: &PureState) -> Result<f64> {
    size_operator(psi)?.relative_size(phi)
}

pub fn size_distribution(phi: &PureState, psi: &PureState) -> Result<SizeDistribution> {
    size_operator(psi)?.distribution(phi)
}

/// `⟨ψ|O† n_ψ O|ψ⟩ / ⟨ψ|O†O|ψ⟩`.
pub fn operator_size(op: &DenseOperator, psi: &PureState) -> Result<f64> {
    operator_size_with(&size_operator(psi)?, op)
}

/// [`operator_size`] against a precomputed spectrum.
pub fn operator_size_with(spectrum: &SizeSpectrum, op: &DenseOperator) -> Result<f64> {
    let psi = &spectrum.source;
    let image = psi.apply(op)?;
    let weight = image.norm().powi(2);
    let op_norm_sq: f64 = op.matrix().iter().map(|z| z.norm_sqr()).sum();
    if weight.is_nan() || weight <= 1e-12 * op_norm_sq * psi.norm().powi(2) {
        return Err(Error::AnnihilatedState);
    }
    spectrum.relative_size(&image)
}

/// `F(x)` as an operator on all sites; `tr F(x) = f(x)`.
pub fn f_operator(psi: &PureState, x: f64) -> Result<DenseOperator> {
    let spec = size_operator(psi)?;
    DenseOperator::full(spec.local_dim, spec.num_sites, spec.generating_operator(x))
}

/// `max_k ‖ΔP_k^{ψ₁⊗ψ₂} − Σ_{k₁+k₂=k} ΔP_{k₁}^{ψ₁} ⊗ ΔP_{k₂}^{ψ₂}‖_F`.
pub fn strong_additivity_check(psi1: &PureState, psi2: &PureState) -> Result<f64> {
    use crate::tensor::Kron;
    let s1 = size_operator(psi1)?;
    let s2 = size_operator(psi2)?;
    let joint = size_operator(&psi1.kron(psi2)?)?;
    let dim = joint.dim();
    let layers = (s1.projectors.len() - 1) + (s2.projectors.len() - 1) + 1;
    let mut predicted = alloc::vec![CMatrix::zeros(dim, dim); layers];
    for (k1, p1) in s1.projectors.iter().enumerate() {
        for (k2, p2) in s2.projectors.iter().enumerate() {
            predicted[k1 + k2] += p1.kronecker(p2);
        }
    }
    let zero = CMatrix::zeros(dim, dim);
    let count = layers.max(joint.projectors.len());
    Ok((0..count)
        .map(|k| {
            let a = joint.projectors.get(k).unwrap_or(&zero);
            let b = predicted.get(k).unwrap_or(&zero);
            linalg::frobenius(&(a - b))
        })
        .fold(0.0, f64::max))
}
