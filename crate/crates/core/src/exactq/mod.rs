//! Closed-form counts and proportions as exact rationals evaluated at an
//! integer `q >= 2`. Nothing here uses floating point.
//!
//! The formulas are rational functions of `q`, so any integer `q >= 2` is
//! accepted, prime power or not.

mod bounds;
mod counts;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bounds::{
    generating_duo_lower_bound, older_pair_bound, omega_infinity_check, omega_infinity_lower_bound, proportion_bounds,
    reducible_duo_bound_check, reducible_pair_bound, reducible_pair_check, xi_bounds, BoundCheck,
};
pub use counts::{
    arc3_count, class_size, closed_arc3_count, closed_walk3_count, duo_fibre, duo_fraction, fibre_size,
    p_22_closed_form, p_e1_1_closed_form, proportion_p, proportion_p_checked, q_identity_sum, reducible_pair_value,
    walk3_count,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("rank {k} is outside 0..={max}")]
    RankOutOfRange { k: u32, max: u32 },
    #[error("bound not applicable: {0}")]
    BoundNotApplicable(String),
    #[error("dimension {0} must be even")]
    OddDimension(u32),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// Dimensions `e1 >= e2 >= 1` of the two sides and the field size `q >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KneserParams {
    pub e1: u32,
    pub e2: u32,
    pub q: u64,
}

impl KneserParams {
    pub fn new(e1: u32, e2: u32, q: u64) -> Result<KneserParams, ExactError> {
        if e2 < 1 || e2 > e1 {
            return Err(ExactError::InvalidParams(format!(
                "need 1 <= e2 <= e1, got e1={e1}, e2={e2}"
            )));
        }
        if q < 2 {
            return Err(ExactError::InvalidParams(format!("need q >= 2, got {q}")));
        }
        Ok(KneserParams { e1, e2, q })
    }

    /// Accepts the two dimensions in either order. The flag is true when
    /// they were swapped.
    pub fn normalized(a: u32, b: u32, q: u64) -> Result<(KneserParams, bool), ExactError> {
        if a >= b {
            Ok((KneserParams::new(a, b, q)?, false))
        } else {
            Ok((KneserParams::new(b, a, q)?, true))
        }
    }

    pub fn d(&self) -> u32 {
        self.e1 + self.e2
    }
}

pub(crate) fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

#[cfg(test)]
pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn int_rat(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// `q^n` for a possibly negative exponent.
pub fn q_pow(q: u64, n: i64) -> BigRational {
    let p = num_traits::pow(big(q), n.unsigned_abs() as usize);
    if n >= 0 {
        int_rat(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Converts a rational that must be an integer.
pub(crate) fn expect_integer(r: BigRational, what: &str) -> BigInt {
    assert!(r.is_integer(), "{what} is not an integer: {r}");
    r.to_integer()
}

/// `ω(e) = Π_{i=1}^{e} (1 - q^{-i})`, with `ω(0) = 1`.
pub fn omega(e: u32, q: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut qi = BigInt::one();
    let qb = big(q);
    for _ in 0..e {
        qi *= &qb;
        acc *= BigRational::new(&qi - 1, qi.clone());
    }
    acc
}

/// `ω(0), ..., ω(n)`.
pub(crate) fn omega_table(n: u32, q: u64) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(BigRational::one());
    let qb = big(q);
    let mut qi = BigInt::one();
    for _ in 0..n {
        qi *= &qb;
        let next = out.last().expect("nonempty") * BigRational::new(&qi - 1, qi.clone());
        out.push(next);
    }
    out
}

/// `|GL_e(q)| = q^{e^2} ω(e)`.
pub fn gl_order(e: u32, q: u64) -> BigInt {
    let qb = big(q);
    let mut acc = BigInt::one();
    let mut qi = BigInt::one();
    // Π_{i=0}^{e-1} (q^e - q^i)
    let qe = num_traits::pow(qb.clone(), e as usize);
    for _ in 0..e {
        acc *= &qe - &qi;
        qi *= &qb;
    }
    acc
}

/// `ξ = ω(e1+e2) / (ω(e1) ω(e2))`. This is the number of `e2`-subspaces of
/// GF(q)^{e1+e2} divided by `q^{e1 e2}`, so in general it is not an integer.
pub fn xi(e1: u32, e2: u32, q: u64) -> BigRational {
    omega(e1 + e2, q) / (omega(e1, q) * omega(e2, q))
}

/// Number of `e`-dimensional subspaces of GF(q)^d.
pub fn gaussian_binomial(d: u32, e: u32, q: u64) -> BigInt {
    if e > d {
        return BigInt::zero();
    }
    let v = q_pow(q, (e as i64) * ((d - e) as i64)) * xi(d - e, e, q);
    expect_integer(v, "Gaussian binomial")
}

fn check_rank(e2: u32, e1: u32, k: u32) -> Result<(), ExactError> {
    let max = e1.min(e2);
    if k > max {
        return Err(ExactError::RankOutOfRange { k, max });
    }
    Ok(())
}

/// Number of rank-`k` matrices in `M_{e2×e1}(q)`.
pub fn rank_matrix_count(e2: u32, e1: u32, k: u32, q: u64) -> Result<BigInt, ExactError> {
    check_rank(e2, e1, k)?;
    let w = omega_table(e1.max(e2), q);
    let exp = (k as i64) * ((e1 + e2 - k) as i64);
    let v = &w[e2 as usize] * &w[e1 as usize] * q_pow(q, exp)
        / (&w[k as usize] * &w[(e1 - k) as usize] * &w[(e2 - k) as usize]);
    Ok(expect_integer(v, "rank matrix count"))
}

/// Order of the stabiliser in `GL_{e1} × GL_{e2}` of a rank-`k` matrix.
pub fn stabiliser_order(e2: u32, e1: u32, k: u32, q: u64) -> Result<BigInt, ExactError> {
    check_rank(e2, e1, k)?;
    let exp = (k as usize) * ((e1 + e2 - 2 * k) as usize);
    Ok(gl_order(k, q) * gl_order(e1 - k, q) * gl_order(e2 - k, q) * num_traits::pow(big(q), exp))
}

/// Exact rational as a `"num/den"` string (denominator omitted when 1).
pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

/// Parses `"num/den"` or `"num"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.trim().parse().ok()?, d))
        }
        None => Some(int_rat(s.parse().ok()?)),
    }
}

/// Nearest `f64`, for display only.
pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_values() {
        assert_eq!(omega(0, 7), BigRational::one());
        assert_eq!(omega(1, 2), rat(1, 2));
        assert_eq!(omega(2, 2), rat(3, 8));
        assert_eq!(omega_table(4, 2)[4], rat(315, 1024));
    }

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(2, 2), big(6));
        assert_eq!(gl_order(3, 2), big(168));
        assert_eq!(gl_order(0, 5), big(1));
        assert_eq!(gl_order(3, 3), big(11232));
        assert_eq!(gl_order(4, 2), big(20160));
    }

    #[test]
    fn xi_and_subspace_counts() {
        assert_eq!(xi(2, 2, 2), rat(35, 16));
        assert_eq!(xi(3, 0, 5), BigRational::one());
        assert_eq!(gaussian_binomial(4, 2, 2), big(35));
        assert_eq!(gaussian_binomial(2, 1, 2), big(3));
        assert_eq!(gaussian_binomial(5, 2, 2), big(155));
        assert_eq!(xi(1, 1, 5), rat(6, 5));
    }

    #[test]
    fn rank_counts() {
        assert_eq!(rank_matrix_count(2, 2, 1, 2).unwrap(), big(9));
        assert_eq!(rank_matrix_count(2, 2, 0, 2).unwrap(), big(1));
        assert_eq!(rank_matrix_count(2, 2, 2, 2).unwrap(), big(6));
        assert_eq!(
            rank_matrix_count(2, 2, 3, 2),
            Err(ExactError::RankOutOfRange { k: 3, max: 2 })
        );
        assert_eq!(stabiliser_order(2, 2, 1, 2).unwrap(), big(4));
        assert_eq!(stabiliser_order(1, 1, 1, 3).unwrap(), big(2));
    }

    #[test]
    fn params_validation() {
        assert!(KneserParams::new(1, 2, 2).is_err());
        assert!(KneserParams::new(1, 0, 2).is_err());
        assert!(KneserParams::new(1, 1, 1).is_err());
        let (p, swapped) = KneserParams::normalized(1, 2, 2).unwrap();
        assert_eq!((p.e1, p.e2, swapped), (2, 1, true));
    }

    #[test]
    fn rational_round_trip() {
        for r in [rat(93, 256), rat(-3, 7), rat(5, 1), BigRational::zero()] {
            assert_eq!(parse_rational(&format_rational(&r)), Some(r));
        }
        assert_eq!(parse_rational("1/0"), None);
    }
}
