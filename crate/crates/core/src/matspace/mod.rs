//! Matrices and subspaces over GF(q), stingray detection, duo tests and an
//! independent spinning-based irreducibility test.
//!
//! Convention: vectors are rows and matrices act on the right, `v ↦ vM`.
//! The image of `g - 1` is therefore the row space of `g - I`, and its kernel
//! is the left null space `{v : v(g - I) = 0}`.

mod matrix;
mod random;
mod spin;
mod stingray;
mod subspace;

use thiserror::Error;

pub use matrix::MatrixGF;
pub use random::{random_gl, random_gl_counted, random_matrix};
pub use spin::{is_irreducible_group, one_space_representatives, spin, SpinCaps};
pub use stingray::{
    is_duo, is_duo_profiles, l1_criterion, l1_criterion_profiles, restriction_matrix, stingray_profile,
    stingray_profile_unchecked, DuoCheck, StingrayProfile,
};
pub use subspace::{enumerate_subspaces, subspace_count, Subspace, SubspaceIter, DEFAULT_ENUMERATION_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix entry index {0} is not a field element")]
    InvalidEntry(u32),
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("the identity has no stingray profile")]
    IdentityInput,
    #[error("ambient dimensions differ: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("the pair is not a stingray duo")]
    NotADuo,
    #[error("{what} = {value} exceeds the cap {cap}")]
    CapExceeded { what: &'static str, value: u64, cap: u64 },
    #[error("enumeration would produce {count} subspaces, above the cap {cap}")]
    EnumerationTooLarge { count: String, cap: u128 },
    #[error("no generators given")]
    EmptyGenerators,
}
