//! Brute-force oracles for the exact formulas: explicit walk enumeration in
//! the bipartite q-Kneser graph, the `(A, B)` parametrisation of closed walks,
//! rank histograms, and exhaustive stingray and duo enumeration in small
//! `GL_d(q)`.

mod duos;
mod groups;
mod walks;

use thiserror::Error;

use crate::exactq::ExactError;
use crate::field::FieldError;
use crate::matspace::MatError;

pub use duos::{exhaustive_duo_census, verify_fibre_constancy, ClassPairStats, DuoCensus, FibreCheck};
pub use groups::{
    conjugation_orbit, enumerate_stingray_elements, gl_generators, sl_generators, stingray_polys,
    stingray_representative, verify_class_independence, ClassIndependence, StingrayClass,
};
pub use walks::{ab_walk_census, graph_walk_census, rank_census, OracleKind, WalkCensus, WalkSide};

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("{what}: {count} exceeds the cap {cap}")]
    EnumerationTooLarge {
        what: &'static str,
        count: String,
        cap: u64,
    },
    #[error("no {e}-stingray elements exist in GL_{d}({q})")]
    EmptyClass { d: usize, e: usize, q: u32 },
    #[error("GL_d({q}) = SL_d({q}); class independence is vacuous")]
    TrivialQuotient { q: u32 },
    #[error("census disagrees with the exact formula: {0}")]
    Mismatch(String),
    #[error("invalid census parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Limits on the size of brute-force enumerations.
#[derive(Clone, Copy, Debug)]
pub struct CensusCaps {
    /// `|X1| · |X2|` adjacency checks in the graph census.
    pub edge_checks: u64,
    /// `(A, B)` pairs in the matrix census.
    pub ab_pairs: u64,
    /// Matrices in a rank histogram.
    pub rank_matrices: u64,
    /// Largest `|GL_d(q)|` swept element by element.
    pub group_sweep: u64,
    /// Largest conjugacy class built as an orbit.
    pub class_orbit: u64,
    /// Ordered element pairs in the duo census.
    pub duo_pairs: u64,
    /// Every `spin_stride`-th pair is rechecked by spinning.
    pub spin_stride: u64,
}

impl Default for CensusCaps {
    fn default() -> Self {
        CensusCaps {
            edge_checks: 10_000_000,
            ab_pairs: 100_000_000,
            rank_matrices: 10_000_000,
            group_sweep: 25_000,
            class_orbit: 1_000_000,
            duo_pairs: 10_000_000,
            spin_stride: 97,
        }
    }
}

impl CensusCaps {
    /// Replaces every size cap by `n` (the spin stride is unchanged).
    pub fn with_override(n: u64) -> Self {
        CensusCaps {
            edge_checks: n,
            ab_pairs: n,
            rank_matrices: n,
            group_sweep: n,
            class_orbit: n,
            duo_pairs: n,
            ..CensusCaps::default()
        }
    }
}

pub(crate) fn check_cap(what: &'static str, count: u128, cap: u64) -> Result<(), CensusError> {
    if count > cap as u128 {
        return Err(CensusError::EnumerationTooLarge {
            what,
            count: count.to_string(),
            cap,
        });
    }
    Ok(())
}
