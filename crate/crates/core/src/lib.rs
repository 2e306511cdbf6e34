//! Entanglement polynomials of pure multi-qudit states.
//!
//! For a state `|ψ⟩` on `N` qudits, `W_k` is the span of `O|ψ⟩` over all
//! operators `O` acting on at most `k` sites. The entanglement polynomial
//! `f(ψ) = Σ_k (|W_k| − |W_{k−1}|) x^k` is computed two independent ways:
//!
//! * [`subspaces`]: build `W_k` directly from a spanning set of k-local operators;
//! * [`renorm`]: take ranks of the renormalized states `ρ_k`.
//!
//! [`entpoly`] assembles and factors the polynomials, [`size`] builds the
//! size operator and its relatives from the layer projectors, and
//! [`symmetry`] fuzzes the invariances under local invertible operators and
//! site permutations.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod entpoly;
pub mod error;
pub mod linalg;
pub mod local_ops;
pub mod poly;
pub mod renorm;
pub mod size;
pub mod states;
pub mod subspaces;
pub mod symmetry;
pub mod tensor;

pub use entpoly::{analyze, poly_mul, polynomial_of, Analysis, EntanglementPolynomial, Method};
pub use error::{Error, Result};
pub use linalg::{RankEstimate, RankPolicy};
pub use poly::{Factorization, IntPoly};
pub use tensor::{
    embed, partial_trace, permute_sites, DenseOperator, DensityMatrix, Kron, PureState,
};
