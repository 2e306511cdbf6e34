//! Dense multi-qudit states and operators.
//!
//! Site 0 is the most significant digit of a basis index everywhere in the
//! crate: for N sites of local dimension d, basis index `i` has site `s`
//! digit `(i / d^(N-1-s)) % d`.

use alloc::vec;
use alloc::vec::Vec;

// float methods come from libm when std is absent
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64, ZERO};

pub(crate) fn check_local_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::LocalDimTooSmall(d))
    } else {
        Ok(())
    }
}

pub(crate) fn pow(d: usize, n: usize) -> usize {
    d.checked_pow(n as u32)
        .expect("Hilbert space dimension overflows usize")
}

/// Basis-index offsets for a split of the sites into a support and its complement.
///
/// Every full index is `support[a] + rest[r]` for exactly one pair `(a, r)`;
/// `a` enumerates support digits with the first listed site most significant,
/// `r` enumerates the complementary sites in increasing site order.
#[derive(Debug, Clone)]
pub(crate) struct SiteSplit {
    pub support: Vec<usize>,
    pub rest: Vec<usize>,
}

impl SiteSplit {
    pub fn new(d: usize, num_sites: usize, sites: &[usize]) -> Self {
        let stride = |s: usize| pow(d, num_sites - 1 - s);
        let complement: Vec<usize> = (0..num_sites).filter(|s| !sites.contains(s)).collect();
        Self {
            support: offsets(d, sites, &stride),
            rest: offsets(d, &complement, &stride),
        }
    }
}

fn offsets(d: usize, sites: &[usize], stride: &dyn Fn(usize) -> usize) -> Vec<usize> {
    let mut out = vec![0usize];
    for &s in sites {
        let st = stride(s);
        out = out
            .iter()
            .flat_map(|&base| (0..d).map(move |digit| base + digit * st))
            .collect();
    }
    out
}

fn validate_sites(sites: &[usize], num_sites: usize) -> Result<()> {
    for (i, &s) in sites.iter().enumerate() {
        if s >= num_sites {
            return Err(Error::SiteOutOfRange { site: s, num_sites });
        }
        if sites[..i].contains(&s) {
            return Err(Error::DuplicateSite(s));
        }
    }
    Ok(())
}

fn validate_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::NotAPermutation(n));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::NotAPermutation(n));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Index map for moving the factor at position `s` to position `perm[s]`.
fn permutation_index_map(d: usize, n: usize, perm: &[usize]) -> Vec<usize> {
    let dim = pow(d, n);
    let mut map = vec![0usize; dim];
    for (i, slot) in map.iter_mut().enumerate() {
        let mut rem = i;
        let mut j = 0;
        for s in (0..n).rev() {
            let digit = rem % d;
            rem /= d;
            j += digit * pow(d, n - 1 - perm[s]);
        }
        *slot = j;
    }
    map
}

/// Tensor product of two objects of the same kind.
pub trait Kron: Sized {
    fn kron(&self, other: &Self) -> Result<Self>;
}

/// Pure state of `num_sites` qudits, not necessarily normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    local_dim: usize,
    num_sites: usize,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(local_dim: usize, num_sites: usize, amplitudes: Vec<C64>) -> Result<Self> {
        Self::from_vector(local_dim, num_sites, CVector::from_vec(amplitudes))
    }

    pub fn from_vector(local_dim: usize, num_sites: usize, amplitudes: CVector) -> Result<Self> {
        check_local_dim(local_dim)?;
        let expected = pow(local_dim, num_sites);
        if amplitudes.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            local_dim,
            num_sites,
            amplitudes,
        })
    }

    /// Computational basis state with the given digits, site 0 first.
    pub fn basis(local_dim: usize, digits: &[usize]) -> Result<Self> {
        check_local_dim(local_dim)?;
        let n = digits.len();
        let mut index = 0;
        for &digit in digits {
            if digit >= local_dim {
                return Err(Error::InvalidArgument(
                    "basis digit exceeds local dimension",
                ));
            }
            index = index * local_dim + digit;
        }
        let mut amps = CVector::zeros(pow(local_dim, n));
        amps[index] = linalg::ONE;
        Self::from_vector(local_dim, n, amps)
    }

    /// The zero-site state `|∅⟩`, a single scalar amplitude.
    pub fn empty(local_dim: usize) -> Result<Self> {
        Self::new(local_dim, 0, vec![linalg::ONE])
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroState);
        }
        Ok(Self {
            amplitudes: self.amplitudes.unscale(norm),
            ..self.clone()
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix {
            local_dim: self.local_dim,
            num_sites: self.num_sites,
            matrix: linalg::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    /// Apply an operator acting on a subset of the sites.
    pub fn apply(&self, op: &DenseOperator) -> Result<Self> {
        if op.local_dim != self.local_dim {
            return Err(Error::LocalDimMismatch {
                left: self.local_dim,
                right: op.local_dim,
            });
        }
        validate_sites(&op.support, self.num_sites)?;
        Ok(Self {
            amplitudes: apply_on_sites(
                &self.amplitudes,
                self.local_dim,
                self.num_sites,
                &op.support,
                &op.matrix,
            ),
            ..self.clone()
        })
    }

    /// Apply `matrices[i]` (each `d×d`) to site `sites[i]`.
    pub fn apply_single_site_factors(
        &self,
        sites: &[usize],
        matrices: &[&CMatrix],
    ) -> Result<Self> {
        validate_sites(sites, self.num_sites)?;
        let mut amps = self.amplitudes.clone();
        for (&s, m) in sites.iter().zip(matrices) {
            if m.nrows() != self.local_dim || m.ncols() != self.local_dim {
                return Err(Error::ShapeMismatch {
                    expected: self.local_dim,
                    found: m.nrows(),
                });
            }
            amps = apply_on_sites(&amps, self.local_dim, self.num_sites, &[s], m);
        }
        Ok(Self {
            amplitudes: amps,
            ..self.clone()
        })
    }
}

pub(crate) fn apply_on_sites(
    amps: &CVector,
    d: usize,
    n: usize,
    sites: &[usize],
    m: &CMatrix,
) -> CVector {
    let split = SiteSplit::new(d, n, sites);
    let mut out = CVector::zeros(amps.len());
    let mut local = CVector::zeros(split.support.len());
    for &r in &split.rest {
        for (a, &off) in split.support.iter().enumerate() {
            local[a] = amps[r + off];
        }
        let image = m * &local;
        for (a, &off) in split.support.iter().enumerate() {
            out[r + off] = image[a];
        }
    }
    out
}

impl Kron for PureState {
    fn kron(&self, other: &Self) -> Result<Self> {
        if self.local_dim != other.local_dim {
            return Err(Error::LocalDimMismatch {
                left: self.local_dim,
                right: other.local_dim,
            });
        }
        Ok(Self {
            local_dim: self.local_dim,
            num_sites: self.num_sites + other.num_sites,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        })
    }
}

/// Move the amplitude of site `s` to site `perm[s]`.
pub fn permute_sites(psi: &PureState, perm: &[usize]) -> Result<PureState> {
    validate_permutation(perm, psi.num_sites)?;
    let map = permutation_index_map(psi.local_dim, psi.num_sites, perm);
    let mut out = CVector::zeros(psi.dim());
    for (i, &j) in map.iter().enumerate() {
        out[j] = psi.amplitudes[i];
    }
    Ok(PureState {
        amplitudes: out,
        ..psi.clone()
    })
}

/// Square matrix acting on an ordered set of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    local_dim: usize,
    support: Vec<usize>,
    matrix: CMatrix,
}

impl DenseOperator {
    /// Build an operator whose tensor factors follow the order of `support`.
    ///
    /// `support` may list the sites in any order; the stored form is sorted
    /// and the matrix is permuted to match.
    pub fn new(local_dim: usize, support: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        check_local_dim(local_dim)?;
        let side = pow(local_dim, support.len());
        if matrix.nrows() != side || matrix.ncols() != side {
            return Err(Error::ShapeMismatch {
                expected: side,
                found: matrix.nrows(),
            });
        }
        let upper = support.iter().copied().max().map_or(0, |m| m + 1);
        validate_sites(&support, upper)?;
        if support.windows(2).all(|w| w[0] < w[1]) {
            return Ok(Self {
                local_dim,
                support,
                matrix,
            });
        }
        let mut sorted = support.clone();
        sorted.sort_unstable();
        let perm: Vec<usize> = support
            .iter()
            .map(|s| sorted.binary_search(s).expect("site present"))
            .collect();
        let map = permutation_index_map(local_dim, support.len(), &perm);
        let mut out = CMatrix::zeros(side, side);
        for i in 0..side {
            for j in 0..side {
                out[(map[i], map[j])] = matrix[(i, j)];
            }
        }
        Ok(Self {
            local_dim,
            support: sorted,
            matrix: out,
        })
    }

    pub fn identity(local_dim: usize, support: Vec<usize>) -> Result<Self> {
        let side = pow(local_dim.max(1), support.len());
        Self::new(local_dim, support, CMatrix::identity(side, side))
    }

    /// Operator acting on all sites `0..num_sites`.
    pub fn full(local_dim: usize, num_sites: usize, matrix: CMatrix) -> Result<Self> {
        Self::new(local_dim, (0..num_sites).collect(), matrix)
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Product `self · other` of two operators on the same support.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.support != other.support {
            return Err(Error::InvalidArgument("compose needs identical supports"));
        }
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
            ..self.clone()
        })
    }
}

impl Kron for DenseOperator {
    fn kron(&self, other: &Self) -> Result<Self> {
        if self.local_dim != other.local_dim {
            return Err(Error::LocalDimMismatch {
                left: self.local_dim,
                right: other.local_dim,
            });
        }
        if self.support.iter().any(|s| other.support.contains(s)) {
            return Err(Error::OverlappingSupports);
        }
        let mut support = self.support.clone();
        support.extend_from_slice(&other.support);
        Self::new(
            self.local_dim,
            support,
            self.matrix.kronecker(&other.matrix),
        )
    }
}

/// `O_B ⊗ I_{B̄}` as an operator on all `num_sites` sites.
pub fn embed(op: &DenseOperator, num_sites: usize) -> Result<DenseOperator> {
    validate_sites(&op.support, num_sites)?;
    let d = op.local_dim;
    let split = SiteSplit::new(d, num_sites, &op.support);
    let dim = pow(d, num_sites);
    let mut full = CMatrix::zeros(dim, dim);
    for &r in &split.rest {
        for (a, &oa) in split.support.iter().enumerate() {
            for (b, &ob) in split.support.iter().enumerate() {
                full[(r + oa, r + ob)] = op.matrix[(a, b)];
            }
        }
    }
    DenseOperator::full(d, num_sites, full)
}

/// Hermitian positive semidefinite matrix on `num_sites` qudits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    local_dim: usize,
    num_sites: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Checks shape and Hermiticity; positivity is checked by [`DensityMatrix::check_psd`].
    pub fn new(local_dim: usize, num_sites: usize, matrix: CMatrix) -> Result<Self> {
        check_local_dim(local_dim)?;
        let side = pow(local_dim, num_sites);
        if matrix.nrows() != side || matrix.ncols() != side {
            return Err(Error::ShapeMismatch {
                expected: side,
                found: matrix.nrows(),
            });
        }
        let dev = linalg::hermitian_deviation(&matrix);
        if dev > 1e-12 * linalg::max_abs(&matrix) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self {
            local_dim,
            num_sites,
            matrix,
        })
    }

    pub(crate) fn from_parts(local_dim: usize, num_sites: usize, matrix: CMatrix) -> Self {
        Self {
            local_dim,
            num_sites,
            matrix,
        }
    }

    pub fn maximally_mixed(local_dim: usize, num_sites: usize) -> Result<Self> {
        check_local_dim(local_dim)?;
        let side = pow(local_dim, num_sites);
        Ok(Self {
            local_dim,
            num_sites,
            matrix: CMatrix::identity(side, side).unscale(side as f64),
        })
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    /// `tr(ρ²) / tr(ρ)²`; equals 1 exactly for pure states.
    pub fn purity(&self) -> f64 {
        let t = self.trace();
        let sq: f64 = self.matrix.iter().map(|z| z.norm_sqr()).sum();
        sq / (t * t)
    }

    /// Verify all eigenvalues are at least `-1e-10 · max|λ|`.
    pub fn check_psd(&self) -> Result<()> {
        let values = linalg::hermitian_eigenvalues(&self.matrix)?;
        let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if values.iter().any(|&v| v < -1e-10 * scale) {
            return Err(Error::InvariantViolation(
                "density matrix has a negative eigenvalue",
            ));
        }
        Ok(())
    }
}

impl Kron for DensityMatrix {
    fn kron(&self, other: &Self) -> Result<Self> {
        if self.local_dim != other.local_dim {
            return Err(Error::LocalDimMismatch {
                left: self.local_dim,
                right: other.local_dim,
            });
        }
        Ok(Self {
            local_dim: self.local_dim,
            num_sites: self.num_sites + other.num_sites,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }
}

/// Trace out the sites in `traced`; the result lives on the remaining sites in increasing order.
pub fn partial_trace(rho: &DensityMatrix, traced: &[usize]) -> Result<DensityMatrix> {
    validate_sites(traced, rho.num_sites)?;
    let kept: Vec<usize> = (0..rho.num_sites).filter(|s| !traced.contains(s)).collect();
    let split = SiteSplit::new(rho.local_dim, rho.num_sites, &kept);
    let side = split.support.len();
    let mut out = CMatrix::from_element(side, side, ZERO);
    for (a, &oa) in split.support.iter().enumerate() {
        for (b, &ob) in split.support.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &split.rest {
                acc += rho.matrix[(oa + t, ob + t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityMatrix::from_parts(rho.local_dim, kept.len(), out))
}
