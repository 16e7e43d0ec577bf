//! Exact counts and probabilities for stingray duos in GL_d(q) and walks in
//! bipartite q-Kneser graphs, with exhaustive and Monte Carlo cross-checks.
//!
//! - [`field`]: finite fields GF(q) and polynomials over them.
//! - [`matspace`]: matrices, subspaces, stingray elements, irreducibility tests.
//! - [`exactq`]: closed-form q-analog formulas in exact rational arithmetic.
//! - [`census`]: brute-force enumeration that checks those formulas.
//! - [`sampler`]: seeded Monte Carlo estimates of the same proportions.
//! - [`verify`]: the combined verification battery.

pub mod census;
pub mod exactq;
pub mod field;
pub mod matspace;
pub mod sampler;
pub mod verify;
