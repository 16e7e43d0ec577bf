use num_rational::BigRational;
use num_traits::One;

use super::{counts, int_rat, omega, q_pow, xi, ExactError, KneserParams};

/// A value with optional lower and upper bounds, compared exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCheck {
    pub lower: Option<BigRational>,
    pub value: BigRational,
    pub upper: Option<BigRational>,
    pub lower_strict: bool,
    pub upper_strict: bool,
    pub holds: bool,
}

impl BoundCheck {
    fn new(lower: Option<(BigRational, bool)>, value: BigRational, upper: Option<(BigRational, bool)>) -> BoundCheck {
        let lower_ok = match &lower {
            Some((l, true)) => *l < value,
            Some((l, false)) => *l <= value,
            None => true,
        };
        let upper_ok = match &upper {
            Some((u, true)) => value < *u,
            Some((u, false)) => value <= *u,
            None => true,
        };
        BoundCheck {
            lower_strict: lower.as_ref().map(|l| l.1).unwrap_or(false),
            upper_strict: upper.as_ref().map(|u| u.1).unwrap_or(false),
            lower: lower.map(|l| l.0),
            upper: upper.map(|u| u.0),
            value,
            holds: lower_ok && upper_ok,
        }
    }
}

/// `Σ c_n q^{-n}` over the given (exponent, coefficient) pairs.
fn laurent(q: u64, terms: &[(i64, i64)]) -> BigRational {
    terms.iter().map(|&(n, c)| q_pow(q, -n) * int_rat(c.into())).sum()
}

fn need_e2_at_least_2(p: &KneserParams, what: &str) -> Result<(), ExactError> {
    if p.e2 < 2 {
        return Err(ExactError::BoundNotApplicable(format!(
            "{what} needs 2 <= e2 <= e1, got ({}, {})",
            p.e1, p.e2
        )));
    }
    Ok(())
}

/// `1 - q^{-1} - q^{-2} < P(e1, e2) < 1 - q^{-1} - q^{-2} + 2q^{-3} - 2q^{-5}`
/// for `2 <= e2 <= e1`, and `1 - q^{-1} - q^{-2} < P(e1, 1) < 1 - q^{-1}` for
/// `e1 >= 3`.
pub fn proportion_bounds(p: &KneserParams) -> Result<BoundCheck, ExactError> {
    let lower = laurent(p.q, &[(0, 1), (1, -1), (2, -1)]);
    let upper = if p.e2 >= 2 {
        laurent(p.q, &[(0, 1), (1, -1), (2, -1), (3, 2), (5, -2)])
    } else if p.e1 >= 3 {
        laurent(p.q, &[(0, 1), (1, -1)])
    } else {
        return Err(ExactError::BoundNotApplicable(format!(
            "P bounds need e2 >= 2 or e1 >= 3, got ({}, {})",
            p.e1, p.e2
        )));
    };
    Ok(BoundCheck::new(
        Some((lower, true)),
        counts::proportion_p(p),
        Some((upper, true)),
    ))
}

/// `(1 - q^{-d})(1 - q^{-(d-1)}) / ((1 - q^{-1})(1 - q^{-2})) <= ξ < 1/(1 - q^{-1} - q^{-2} + q^{-5})`.
pub fn xi_bounds(p: &KneserParams) -> Result<BoundCheck, ExactError> {
    need_e2_at_least_2(p, "xi bounds")?;
    let d = p.d() as i64;
    let one = BigRational::one();
    let lower =
        (&one - q_pow(p.q, -d)) * (&one - q_pow(p.q, -(d - 1))) / ((&one - q_pow(p.q, -1)) * (&one - q_pow(p.q, -2)));
    let upper = omega_infinity_lower_bound(p.q).recip();
    Ok(BoundCheck::new(
        Some((lower, false)),
        xi(p.e1, p.e2, p.q),
        Some((upper, true)),
    ))
}

/// `1 - P(e1, e2) <= q^{-1} + q^{-2}`: the reducible share of duos.
pub fn reducible_duo_bound_check(p: &KneserParams) -> Result<BoundCheck, ExactError> {
    need_e2_at_least_2(p, "reducible duo bound")?;
    let value = BigRational::one() - counts::proportion_p(p);
    let upper = laurent(p.q, &[(1, 1), (2, 1)]);
    Ok(BoundCheck::new(None, value, Some((upper, false))))
}

/// `2q^{-1} + q^{-2} - 2q^{-3} - q^{-4}`.
pub fn reducible_pair_bound(q: u64) -> BigRational {
    laurent(q, &[(1, 2), (2, 1), (3, -2), (4, -1)])
}

/// `1 - P/ξ < 2q^{-1} + q^{-2} - 2q^{-3} - q^{-4}`: the share of a class pair
/// generating a reducible subgroup.
pub fn reducible_pair_check(p: &KneserParams) -> Result<BoundCheck, ExactError> {
    need_e2_at_least_2(p, "reducible pair bound")?;
    Ok(BoundCheck::new(
        None,
        counts::reducible_pair_value(p),
        Some((reducible_pair_bound(p.q), true)),
    ))
}

/// The older reducible-pair bound `2q^{-1} + q^{-2} - 2q^{-3} - q^{-4} + 2q^{-d^2/4}`
/// for even `d`.
pub fn older_pair_bound(d: u32, q: u64) -> Result<BigRational, ExactError> {
    if !d.is_multiple_of(2) {
        return Err(ExactError::OddDimension(d));
    }
    let half = (d / 2) as i64;
    Ok(reducible_pair_bound(q) + q_pow(q, -(half * half)) * int_rat(2.into()))
}

/// `1 - q^{-1} - q^{-2} - c q^{-d^2/4 + d/2 + 2}` with `d = 2e`. The constant
/// `c` is caller-supplied; this is a reporting utility only.
pub fn generating_duo_lower_bound(e: u32, q: u64, c: &BigRational) -> BigRational {
    let e = e as i64;
    let exp = -e * e + e + 2;
    laurent(q, &[(0, 1), (1, -1), (2, -1)]) - c * q_pow(q, exp)
}

/// `1 - q^{-1} - q^{-2} + q^{-5}`, a lower bound for every `ω(e)`.
pub fn omega_infinity_lower_bound(q: u64) -> BigRational {
    laurent(q, &[(0, 1), (1, -1), (2, -1), (5, 1)])
}

/// Checks `ω(e) > 1 - q^{-1} - q^{-2} + q^{-5}`.
pub fn omega_infinity_check(e: u32, q: u64) -> BoundCheck {
    BoundCheck::new(Some((omega_infinity_lower_bound(q), true)), omega(e, q), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::rat;
    use num_traits::Zero;

    fn kp(e1: u32, e2: u32, q: u64) -> KneserParams {
        KneserParams::new(e1, e2, q).unwrap()
    }

    #[test]
    fn p_bounds_examples() {
        let b = proportion_bounds(&kp(3, 1, 2)).unwrap();
        assert_eq!(
            (b.lower.clone().unwrap(), b.value.clone(), b.upper.clone().unwrap()),
            (rat(1, 4), rat(21, 64), rat(1, 2))
        );
        assert!(b.holds);
        let b = proportion_bounds(&kp(2, 2, 2)).unwrap();
        assert_eq!(b.upper.clone().unwrap(), rat(7, 16));
        assert!(b.holds);
        assert!(matches!(
            proportion_bounds(&kp(2, 1, 2)),
            Err(ExactError::BoundNotApplicable(_))
        ));
        assert!(matches!(
            proportion_bounds(&kp(1, 1, 2)),
            Err(ExactError::BoundNotApplicable(_))
        ));
    }

    #[test]
    fn xi_bounds_tight_at_2_2_2() {
        let b = xi_bounds(&kp(2, 2, 2)).unwrap();
        assert_eq!(b.lower.clone().unwrap(), rat(35, 16));
        assert_eq!(b.value, rat(35, 16));
        assert!(b.holds);
        assert!(xi_bounds(&kp(2, 1, 2)).is_err());
    }

    #[test]
    fn reducible_bounds() {
        let b = reducible_duo_bound_check(&kp(2, 2, 2)).unwrap();
        assert_eq!(b.value, rat(163, 256));
        assert!(b.holds);
        assert!(reducible_duo_bound_check(&kp(3, 2, 3)).unwrap().holds);
        assert_eq!(reducible_pair_bound(2), rat(15, 16));
        assert!(reducible_pair_check(&kp(2, 2, 2)).unwrap().holds);
        assert_eq!(older_pair_bound(4, 2).unwrap(), rat(17, 16));
        assert_eq!(older_pair_bound(3, 2), Err(ExactError::OddDimension(3)));
    }

    #[test]
    fn generating_bound_examples() {
        assert_eq!(generating_duo_lower_bound(3, 2, &BigRational::one()), rat(3, 16));
        assert_eq!(
            generating_duo_lower_bound(5, 7, &BigRational::zero()),
            rat(1, 1) - rat(1, 7) - rat(1, 49)
        );
        assert!(generating_duo_lower_bound(2, 3, &BigRational::one()) < BigRational::zero());
    }

    #[test]
    fn omega_lower_bound() {
        for q in 2..17 {
            assert!(omega_infinity_check(64, q).holds);
        }
    }
}
