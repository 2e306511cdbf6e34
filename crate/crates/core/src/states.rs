//! Named states and seeded random states.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

// float methods come from libm when std is absent
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::local_ops::{binomial, subsets};
use crate::tensor::{check_local_dim, pow, PureState};

/// `|0…0⟩` on `n` sites.
pub fn zero(d: usize, n: usize) -> Result<PureState> {
    PureState::basis(d, &vec![0; n])
}

/// `Σ_i |i…i⟩ / √d` on `n` sites.
pub fn ghz(d: usize, n: usize) -> Result<PureState> {
    check_local_dim(d)?;
    if n == 0 {
        return PureState::empty(d);
    }
    let dim = pow(d, n);
    // index of |i…i⟩ is i · (1 + d + … + d^(n-1))
    let step = (dim - 1) / (d - 1);
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    for i in 0..d {
        amps[i * step] = amp;
    }
    PureState::new(d, n, amps)
}

/// `Σ_i |ii⟩ / √d`.
pub fn bell(d: usize) -> Result<PureState> {
    ghz(d, 2)
}

/// Qubit W state: uniform superposition of single excitations.
pub fn w(n: usize) -> Result<PureState> {
    dicke(n, 1)
}

/// Qubit Dicke state with `m` excitations among `n` sites.
pub fn dicke(n: usize, m: usize) -> Result<PureState> {
    if m > n {
        return Err(Error::InvalidArgument(
            "Dicke excitation count exceeds site count",
        ));
    }
    let dim = pow(2, n);
    let amp = C64::new(1.0 / (binomial(n, m) as f64).sqrt(), 0.0);
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    for ones in subsets(n, m)? {
        let index: usize = ones.iter().map(|&s| 1usize << (n - 1 - s)).sum();
        amps[index] = amp;
    }
    PureState::new(2, n, amps)
}

/// Normalized state with i.i.d. standard complex Gaussian amplitudes.
pub fn random_state(d: usize, n: usize, seed: u64) -> Result<PureState> {
    check_local_dim(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<C64> = (0..pow(d, n)).map(|_| gaussian(&mut rng)).collect();
    PureState::new(d, n, amps)?.normalized()
}

pub(crate) fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub(crate) fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// SplitMix64 finalizer, used to derive independent per-trial seeds.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
