//! Dense complex linear algebra used across the crate.
//!
//! SVDs come from `nalgebra`; the Hermitian eigensolver used by the
//! renormalized-state rank path is a cyclic Jacobi sweep written here so
//! that the two rank routes do not share a decomposition.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;

// float methods come from libm when std is absent
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

/// Minimum ratio between the last kept and the first dropped singular value.
pub const DEFAULT_MIN_GAP: f64 = 1e3;

/// How singular values are turned into an integer rank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankPolicy {
    /// Relative threshold `τ / σ_max`. `None` means `max(rows, cols) · ε`.
    pub rel_tol: Option<f64>,
    /// Gap ratio `σ_r / σ_{r+1}` below which the rank is rejected.
    pub min_gap: f64,
}

impl Default for RankPolicy {
    fn default() -> Self {
        Self {
            rel_tol: None,
            min_gap: DEFAULT_MIN_GAP,
        }
    }
}

impl RankPolicy {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol: Some(rel_tol),
            ..Self::default()
        }
    }
}

/// Outcome of a rank decision.
#[derive(Debug, Clone, PartialEq)]
pub struct RankEstimate {
    pub rank: usize,
    /// `σ_r / σ_{r+1}`; infinite when nothing was dropped or the dropped part is exactly zero.
    pub gap_ratio: f64,
    pub threshold: f64,
    pub sigma_max: f64,
}

/// Decide the rank from a list of singular values (any order, nonnegative).
pub fn rank_from_singular_values(
    values: &[f64],
    rows: usize,
    cols: usize,
    policy: &RankPolicy,
) -> Result<RankEstimate> {
    let mut sorted: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    let sigma_max = sorted.first().copied().unwrap_or(0.0);
    let rel = policy
        .rel_tol
        .unwrap_or_else(|| rows.max(cols) as f64 * f64::EPSILON);
    let threshold = rel * sigma_max;
    let rank = sorted.iter().take_while(|&&s| s > threshold).count();
    let gap_ratio = if rank == 0 || rank == sorted.len() || sorted[rank] == 0.0 {
        f64::INFINITY
    } else {
        sorted[rank - 1] / sorted[rank]
    };
    if gap_ratio < policy.min_gap {
        return Err(Error::IllConditionedRank { rank, gap_ratio });
    }
    Ok(RankEstimate {
        rank,
        gap_ratio,
        threshold,
        sigma_max,
    })
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect()
}

/// Numerical rank of an arbitrary complex matrix via its singular values.
pub fn numeric_rank(m: &CMatrix, policy: &RankPolicy) -> Result<RankEstimate> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument("matrix has non-finite entries"));
    }
    rank_from_singular_values(&singular_values(m), m.nrows(), m.ncols(), policy)
}

/// Orthonormal basis for the column space of `m`, truncated at the numerical rank.
pub fn column_space(m: &CMatrix, policy: &RankPolicy) -> Result<(CMatrix, RankEstimate)> {
    let rows = m.nrows();
    if m.ncols() == 0 {
        let est = rank_from_singular_values(&[], rows, 0, policy)?;
        return Ok((CMatrix::zeros(rows, 0), est));
    }
    let svd = m.clone().svd(true, false);
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let est = rank_from_singular_values(&sv, rows, m.ncols(), policy)?;
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| {
        sv[b]
            .partial_cmp(&sv[a])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut basis = CMatrix::zeros(rows, est.rank);
    for (j, &src) in order.iter().take(est.rank).enumerate() {
        basis.set_column(j, &u.column(src));
    }
    Ok((basis, est))
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Matching orthonormal eigenvectors as columns.
    pub vectors: CMatrix,
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            found: m.ncols(),
        });
    }
    let dev = hermitian_deviation(m);
    let scale = max_abs(m);
    if dev > 1e-12 * scale.max(f64::MIN_POSITIVE) && dev > 1e-14 {
        return Err(Error::NotHermitian(dev));
    }
    let mut a = m.clone();
    // symmetrize once so rounding in the input does not leak into the sweeps
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = CMatrix::identity(n, n);
    let total = frobenius(&a);
    for _sweep in 0..100 {
        let off = off_diagonal_norm(&a);
        if off <= 1e-15 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let e = phase.conj();
                // A <- A J with J = [[c, s], [-s e, c e]] on (p, q)
                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = arp * c - arq * e * s;
                    a[(r, q)] = arp * s + arq * e * c;
                }
                // A <- J^† A
                for col in 0..n {
                    let apc = a[(p, col)];
                    let aqc = a[(q, col)];
                    a[(p, col)] = apc * c - aqc * e.conj() * s;
                    a[(q, col)] = apc * s + aqc * e.conj() * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp * c - vrq * e * s;
                    v[(r, q)] = vrp * s + vrq * e * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        a[(y, y)]
            .re
            .partial_cmp(&a[(x, x)].re)
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (j, &src) in order.iter().enumerate() {
        vectors.set_column(j, &v.column(src));
    }
    Ok(HermitianEigen { values, vectors })
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(m).map(|e| e.values)
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |M - M^†|` entrywise.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n.min(m.ncols()) {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn trace(m: &CMatrix) -> C64 {
    (0..m.nrows().min(m.ncols()))
        .map(|i| m[(i, i)])
        .fold(C64::zero(), |a, b| a + b)
}

/// `|v⟩⟨w|`.
pub fn outer(v: &CVector, w: &CVector) -> CMatrix {
    v * w.adjoint()
}

/// Condition number `σ_max / σ_min` of a square matrix (infinite when singular).
pub fn condition_number(m: &CMatrix) -> f64 {
    let sv = singular_values(m);
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
