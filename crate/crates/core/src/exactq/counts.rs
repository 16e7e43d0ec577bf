use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{expect_integer, gl_order, int_rat, omega_table, q_pow, xi, ExactError, KneserParams};

fn e1e2(p: &KneserParams) -> i64 {
    (p.e1 as i64) * (p.e2 as i64)
}

/// Number of 3-walks `(F1, U1, U2, F2)` in `X2 × X1 × X2 × X1`:
/// `q^{4 e1 e2} ξ`.
pub fn walk3_count(p: &KneserParams) -> BigInt {
    let v = q_pow(p.q, 4 * e1e2(p)) * xi(p.e1, p.e2, p.q);
    expect_integer(v, "3-walk count")
}

/// Number of 3-arcs: `q^{4 e1 e2} ξ (1 - q^{-e1 e2})^2`.
pub fn arc3_count(p: &KneserParams) -> BigInt {
    let f = BigRational::one() - q_pow(p.q, -e1e2(p));
    let v = q_pow(p.q, 4 * e1e2(p)) * xi(p.e1, p.e2, p.q) * &f * &f;
    expect_integer(v, "3-arc count")
}

/// `q^{-(e1-e2+l) l} / (ω(e1-e2+l) ω(l))`, the summand shared by the
/// closed-walk and closed-arc counts.
fn closed_term(p: &KneserParams, l: u32, w: &[BigRational]) -> BigRational {
    let a = p.e1 - p.e2 + l;
    q_pow(p.q, -((a as i64) * (l as i64))) / (&w[a as usize] * &w[l as usize])
}

/// Number of closed 3-walks.
pub fn closed_walk3_count(p: &KneserParams) -> BigInt {
    let w = omega_table(p.d(), p.q);
    let sum: BigRational = (0..=p.e2).map(|l| closed_term(p, l, &w)).sum();
    let v = q_pow(p.q, 4 * e1e2(p)) * &w[p.d() as usize] * sum;
    expect_integer(v, "closed 3-walk count")
}

/// Number of closed 3-arcs.
pub fn closed_arc3_count(p: &KneserParams) -> BigInt {
    let w = omega_table(p.d(), p.q);
    let qn = q_pow(p.q, -e1e2(p));
    let sum: BigRational = (0..p.e2)
        .map(|l| closed_term(p, l, &w) * (BigRational::one() - &qn / &w[(p.e2 - l) as usize]))
        .sum();
    let v = q_pow(p.q, 4 * e1e2(p)) * &w[p.d() as usize] * sum;
    expect_integer(v, "closed 3-arc count")
}

/// Proportion of 3-walks that are closed 3-arcs:
/// `-(1 - q^{-e1 e2}) q^{-e1 e2} + Σ_{l=0}^{e2-1} ω(e1) ω(e2) q^{-(e1-e2+l) l} / (ω(e1-e2+l) ω(l))`.
pub fn proportion_p(p: &KneserParams) -> BigRational {
    let w = omega_table(p.d(), p.q);
    let qn = q_pow(p.q, -e1e2(p));
    let lead = &w[p.e1 as usize] * &w[p.e2 as usize];
    let sum: BigRational = (0..p.e2).map(|l| closed_term(p, l, &w)).sum();
    -(BigRational::one() - &qn) * qn + lead * sum
}

/// [`proportion_p`], also checked against the ratio of the closed-arc and
/// walk counts.
pub fn proportion_p_checked(p: &KneserParams) -> Result<BigRational, ExactError> {
    let v = proportion_p(p);
    let ratio = BigRational::new(closed_arc3_count(p), walk3_count(p));
    if v != ratio {
        return Err(ExactError::Inconsistent(format!(
            "P({},{}) at q={}: closed form {v} but count ratio {ratio}",
            p.e1, p.e2, p.q
        )));
    }
    Ok(v)
}

/// `P(e1, 1) = (1 - q^{-e1})(1 - q^{-1} - q^{-e1})`.
pub fn p_e1_1_closed_form(e1: u32, q: u64) -> BigRational {
    let one = BigRational::one();
    let a = q_pow(q, -(e1 as i64));
    (&one - &a) * (&one - q_pow(q, -1) - &a)
}

/// `P(2, 2) = 1 - q^{-1} - q^{-2} + 2q^{-3} - 2q^{-4} - q^{-5} + q^{-6} + q^{-8}`.
pub fn p_22_closed_form(q: u64) -> BigRational {
    let coeffs: [(i64, i64); 8] = [(0, 1), (1, -1), (2, -1), (3, 2), (4, -2), (5, -1), (6, 1), (8, 1)];
    coeffs
        .iter()
        .map(|&(n, c)| q_pow(q, -n) * int_rat(BigInt::from(c)))
        .sum()
}

/// `Σ_{l=0}^{e2} ω(e1) ω(e2) q^{-(e1-e2+l) l} / (ω(e2-l) ω(e1-e2+l) ω(l))`,
/// which equals 1.
pub fn q_identity_sum(p: &KneserParams) -> BigRational {
    let w = omega_table(p.d(), p.q);
    let lead = &w[p.e1 as usize] * &w[p.e2 as usize];
    let sum: BigRational = (0..=p.e2)
        .map(|l| closed_term(p, l, &w) / &w[(p.e2 - l) as usize])
        .sum();
    lead * sum
}

/// Size of the conjugacy class of an `e`-stingray element in `GL_d(q)`:
/// `|GL_d| / ((q^e - 1) |GL_{d-e}|)`.
pub fn class_size(d: u32, e: u32, q: u64) -> BigInt {
    assert!(1 <= e && e <= d, "need 1 <= e <= d");
    let qe = num_traits::pow(BigInt::from(q), e as usize) - 1;
    gl_order(d, q) / (qe * gl_order(d - e, q))
}

/// Number of `e`-stingray elements of a fixed class with a fixed `(U, F)`:
/// `|GL_e| / (q^e - 1)`.
pub fn fibre_size(e: u32, q: u64) -> BigInt {
    assert!(e >= 1);
    gl_order(e, q) / (num_traits::pow(BigInt::from(q), e as usize) - 1)
}

/// Number of duos in a fixed class pair mapping to one 3-walk.
pub fn duo_fibre(e1: u32, e2: u32, q: u64) -> BigInt {
    fibre_size(e1, q) * fibre_size(e2, q)
}

/// Fraction of a class pair `C1 × C2` that forms stingray duos: `1/ξ`.
pub fn duo_fraction(p: &KneserParams) -> BigRational {
    xi(p.e1, p.e2, p.q).recip()
}

/// Fraction of a class pair generating a reducible subgroup: `1 - P/ξ`.
pub fn reducible_pair_value(p: &KneserParams) -> BigRational {
    BigRational::one() - proportion_p(p) / xi(p.e1, p.e2, p.q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::{big, rat};
    use num_traits::Zero;

    fn kp(e1: u32, e2: u32, q: u64) -> KneserParams {
        KneserParams::new(e1, e2, q).unwrap()
    }

    #[test]
    fn hand_counted_lines_in_gf2_squared() {
        let p = kp(1, 1, 2);
        assert_eq!(walk3_count(&p), big(24));
        assert_eq!(arc3_count(&p), big(6));
        assert_eq!(closed_walk3_count(&p), big(18));
        assert_eq!(closed_arc3_count(&p), big(0));
        assert_eq!(proportion_p_checked(&p).unwrap(), BigRational::zero());
    }

    #[test]
    fn k4_closed_walks() {
        // lines of GF(3)^2 form K4; closed 4-step walks = trace((J - I)^4) = 3^4 + 3
        assert_eq!(closed_walk3_count(&kp(1, 1, 3)), big(84));
    }

    #[test]
    fn counts_at_2_1_2() {
        let p = kp(2, 1, 2);
        assert_eq!(walk3_count(&p), big(448));
        assert_eq!(closed_arc3_count(&p), big(84));
        assert_eq!(proportion_p_checked(&p).unwrap(), rat(3, 16));
    }

    #[test]
    fn p_values() {
        assert_eq!(proportion_p(&kp(2, 2, 2)), rat(93, 256));
        assert_eq!(proportion_p(&kp(2, 1, 3)), rat(40, 81));
        assert_eq!(p_e1_1_closed_form(3, 2), rat(21, 64));
        assert_eq!(p_e1_1_closed_form(1, 2), BigRational::zero());
        assert_eq!(p_22_closed_form(2), rat(93, 256));
    }

    #[test]
    fn class_and_fibre_sizes() {
        assert_eq!(class_size(3, 2, 2), big(56));
        assert_eq!(class_size(4, 2, 2), big(1120));
        assert_eq!(class_size(3, 1, 3), big(117));
        assert_eq!(class_size(3, 2, 3), big(702));
        assert_eq!(fibre_size(2, 2), big(2));
        assert_eq!(fibre_size(1, 3), big(1));
        assert_eq!(duo_fibre(2, 2, 2), big(4));
        assert_eq!(duo_fibre(2, 1, 3), big(6));
    }

    #[test]
    fn duo_and_reducible_fractions() {
        assert_eq!(duo_fraction(&kp(2, 2, 2)), rat(16, 35));
        for q in 2..10 {
            assert_eq!(duo_fraction(&kp(1, 1, q)), rat(q as i64, q as i64 + 1));
        }
        assert_eq!(reducible_pair_value(&kp(2, 2, 2)), rat(467, 560));
    }
}
