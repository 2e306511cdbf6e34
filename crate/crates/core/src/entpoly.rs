//! Entanglement polynomials `f(ψ) = Σ_k |ΔW_k| x^k`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{RankEstimate, RankPolicy};
use crate::poly::{self, Factorization, IntPoly};
use crate::renorm::wk_rank_estimates;
use crate::subspaces::{check_wk_sequence, delta_dims, span_wk};
use crate::tensor::PureState;

/// Nonnegative integer coefficients `c_0 … c_m` with `c_0 = 1` and `c_m ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EntanglementPolynomial {
    coeffs: Vec<BigUint>,
}

impl EntanglementPolynomial {
    /// Validate and trim a coefficient list.
    pub fn from_coeffs(mut coeffs: Vec<BigUint>) -> Result<Self> {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if !coeffs.first().is_some_and(|c| c.is_one()) {
            return Err(Error::InvariantViolation("constant coefficient must be 1"));
        }
        Ok(Self { coeffs })
    }

    pub fn from_u64s(coeffs: &[u64]) -> Result<Self> {
        Self::from_coeffs(coeffs.iter().map(|&c| BigUint::from(c)).collect())
    }

    /// Build from `[|W_0|, …, |W_N|]`, checking `c_0 = 1` and `f(1) = d^N`.
    pub fn from_wk_dims(wk: &[usize], local_dim: usize, num_sites: usize) -> Result<Self> {
        let full = BigUint::from(local_dim).pow(num_sites as u32);
        let full_usize = crate::tensor::pow(local_dim, num_sites);
        check_wk_sequence(wk, full_usize)?;
        let poly = Self::from_coeffs(delta_dims(wk).into_iter().map(BigUint::from).collect())?;
        if poly.eval_at_one() != full {
            return Err(Error::InvariantViolation("coefficients must sum to d^N"));
        }
        Ok(poly)
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    /// Degree, equal to `N_ψ` for the state it came from.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.to_int_poly().eval(x)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + biguint_to_f64(c))
    }

    /// `f(1)`, which is the Hilbert space dimension.
    pub fn eval_at_one(&self) -> BigUint {
        self.coeffs.iter().sum()
    }

    pub fn to_int_poly(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .map(|c| BigInt::from(c.clone()))
                .collect(),
        )
    }

    /// Stable text key such as `1 + 6x + x^2`.
    pub fn canonical_string(&self) -> String {
        use alloc::string::ToString;
        self.to_int_poly().to_string()
    }
}

fn biguint_to_f64(c: &BigUint) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(f64::INFINITY)
}

impl fmt::Display for EntanglementPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_string())
    }
}

impl FromStr for EntanglementPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let p = poly::parse_int_poly(s)?;
        let coeffs = p
            .coeffs()
            .iter()
            .map(|c| {
                c.to_biguint()
                    .ok_or(Error::PolynomialParse("negative coefficient"))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_coeffs(coeffs)
    }
}

pub fn canonical_string(f: &EntanglementPolynomial) -> String {
    f.canonical_string()
}

/// Exact product, the image of the tensor product of states.
pub fn poly_mul(f: &EntanglementPolynomial, g: &EntanglementPolynomial) -> EntanglementPolynomial {
    let mut out = alloc::vec![BigUint::zero(); f.coeffs.len() + g.coeffs.len() - 1];
    for (i, a) in f.coeffs.iter().enumerate() {
        for (j, b) in g.coeffs.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    EntanglementPolynomial { coeffs: out }
}

pub fn factorize(f: &EntanglementPolynomial) -> Factorization {
    poly::factorize(&f.to_int_poly()).expect("entanglement polynomials are nonzero")
}

/// Which route computes `|W_k|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Ranks of the renormalized states.
    Rank,
    /// SVD of the stacked k-local images of the state.
    Oracle,
    /// Both, failing on any disagreement.
    #[default]
    Both,
}

/// Polynomial plus the per-method rank diagnostics behind it.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub local_dim: usize,
    pub num_sites: usize,
    pub polynomial: EntanglementPolynomial,
    pub rank_path: Option<Vec<RankEstimate>>,
    pub oracle_path: Option<Vec<RankEstimate>>,
}

impl Analysis {
    pub fn wk_dims(&self) -> Vec<usize> {
        self.rank_path
            .as_ref()
            .or(self.oracle_path.as_ref())
            .map(|v| v.iter().map(|e| e.rank).collect())
            .unwrap_or_default()
    }

    /// Smallest gap ratio over all rank decisions made.
    pub fn min_gap_ratio(&self) -> f64 {
        self.rank_path
            .iter()
            .chain(self.oracle_path.iter())
            .flatten()
            .map(|e| e.gap_ratio)
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn oracle_rank_estimates(psi: &PureState, policy: &RankPolicy) -> Result<Vec<RankEstimate>> {
    (0..=psi.num_sites())
        .map(|k| span_wk(psi, k, policy).map(|s| s.rank))
        .collect()
}

pub fn analyze(psi: &PureState, method: Method, policy: &RankPolicy) -> Result<Analysis> {
    let psi = psi.normalized()?;
    let rank_path = match method {
        Method::Rank | Method::Both => Some(wk_rank_estimates(&psi, policy)?),
        Method::Oracle => None,
    };
    let oracle_path = match method {
        Method::Oracle | Method::Both => Some(oracle_rank_estimates(&psi, policy)?),
        Method::Rank => None,
    };
    let dims = |v: &Vec<RankEstimate>| v.iter().map(|e| e.rank).collect::<Vec<_>>();
    if let (Some(r), Some(o)) = (&rank_path, &oracle_path) {
        if dims(r) != dims(o) {
            return Err(Error::MethodDisagreement {
                rank: dims(r),
                oracle: dims(o),
            });
        }
    }
    let wk = dims(
        rank_path
            .as_ref()
            .or(oracle_path.as_ref())
            .expect("one path ran"),
    );
    let polynomial = EntanglementPolynomial::from_wk_dims(&wk, psi.local_dim(), psi.num_sites())?;
    Ok(Analysis {
        local_dim: psi.local_dim(),
        num_sites: psi.num_sites(),
        polynomial,
        rank_path,
        oracle_path,
    })
}

pub fn polynomial_of(psi: &PureState, method: Method) -> Result<EntanglementPolynomial> {
    polynomial_with_policy(psi, method, &RankPolicy::default())
}

pub fn polynomial_with_policy(
    psi: &PureState,
    method: Method,
    policy: &RankPolicy,
) -> Result<EntanglementPolynomial> {
    analyze(psi, method, policy).map(|a| a.polynomial)
}
