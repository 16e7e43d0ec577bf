//! Dense univariate polynomials over GF(q) and Rabin's irreducibility test.

use std::fmt;

use super::{FieldElement, FieldError, FieldSpec};

/// Polynomial with coefficients constant term first; never has trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    coeffs: Vec<FieldElement>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(FieldElement::ONE)
    }

    pub fn constant(c: FieldElement) -> Poly {
        Poly::new(vec![c])
    }

    /// The monomial `t`.
    pub fn x() -> Poly {
        Poly::new(vec![FieldElement::ZERO, FieldElement::ONE])
    }

    pub fn new(mut coeffs: Vec<FieldElement>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Builds a polynomial from element indices, constant term first.
    pub fn from_indices(indices: &[u32]) -> Poly {
        Poly::new(indices.iter().map(|&i| FieldElement(i)).collect())
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn indices(&self) -> Vec<u32> {
        self.coeffs.iter().map(|c| c.index()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> FieldElement {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == FieldElement::ONE
    }

    pub fn add(&self, other: &Poly, f: &FieldSpec) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Poly, i: usize| p.coeffs.get(i).copied().unwrap_or_default();
        Poly::new((0..n).map(|i| f.add(get(self, i), get(other, i))).collect())
    }

    pub fn sub(&self, other: &Poly, f: &FieldSpec) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Poly, i: usize| p.coeffs.get(i).copied().unwrap_or_default();
        Poly::new((0..n).map(|i| f.sub(get(self, i), get(other, i))).collect())
    }

    pub fn scale(&self, c: FieldElement, f: &FieldSpec) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly, f: &FieldSpec) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(out)
    }

    /// Quotient and remainder; panics on division by the zero polynomial.
    pub fn divrem(&self, divisor: &Poly, f: &FieldSpec) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead_inv = f.inv(divisor.leading()).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![FieldElement::ZERO; rem.len() - dd];
        for shift in (0..quot.len()).rev() {
            let c = f.mul(rem[shift + dd], lead_inv);
            quot[shift] = c;
            if c.is_zero() {
                continue;
            }
            for (i, &d) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] = f.sub(rem[shift + i], f.mul(c, d));
            }
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, divisor: &Poly, f: &FieldSpec) -> Poly {
        self.divrem(divisor, f).1
    }

    pub fn monic(&self, f: &FieldSpec) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(f.inv(self.leading()).expect("nonzero"), f)
    }

    pub fn gcd(&self, other: &Poly, f: &FieldSpec) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn mulmod(&self, other: &Poly, modulus: &Poly, f: &FieldSpec) -> Poly {
        self.mul(other, f).rem(modulus, f)
    }

    pub fn powmod(&self, mut e: u64, modulus: &Poly, f: &FieldSpec) -> Poly {
        let mut base = self.rem(modulus, f);
        let mut acc = Poly::one().rem(modulus, f);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mulmod(&base, modulus, f);
            }
            base = base.mulmod(&base, modulus, f);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, x: FieldElement, f: &FieldSpec) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn display(&self, f: &FieldSpec) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = f.format(c);
            let term = match (i, c == FieldElement::ONE) {
                (0, _) => cs,
                (1, true) => "t".to_string(),
                (1, false) => format!("{cs}t"),
                (_, true) => format!("t^{i}"),
                (_, false) => format!("{cs}t^{i}"),
            };
            terms.push(term);
        }
        terms.join("+")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
        write!(f, "[{}]", idx.join(","))
    }
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test: a monic `f` of degree n is irreducible over GF(q) iff
/// `f | t^{q^n} - t` and `gcd(f, t^{q^{n/l}} - t) = 1` for every prime `l | n`.
pub fn poly_is_irreducible(f: &Poly, field: &FieldSpec) -> Result<bool, FieldError> {
    let n = match f.degree() {
        None | Some(0) => return Err(FieldError::ConstantPolynomial),
        Some(n) => n,
    };
    if !f.is_monic() {
        return Err(FieldError::NonMonic);
    }
    if n == 1 {
        return Ok(true);
    }
    let q = field.q() as u64;
    let t = Poly::x();
    // frob[i] = t^{q^i} mod f
    let mut frob = Vec::with_capacity(n + 1);
    frob.push(t.rem(f, field));
    for i in 1..=n {
        let next = frob[i - 1].powmod(q, f, field);
        frob.push(next);
    }
    if frob[n] != t.rem(f, field) {
        return Ok(false);
    }
    for l in prime_factors(n) {
        let h = frob[n / l].sub(&t, field);
        if f.gcd(&h, field).degree() != Some(0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All monic irreducible polynomials of the given degree, in index order.
pub fn monic_irreducibles(degree: usize, field: &FieldSpec) -> Vec<Poly> {
    assert!(degree >= 1);
    let q = field.q() as u64;
    let total = q.pow(degree as u32);
    let mut out = Vec::new();
    for n in 0..total {
        let mut coeffs = Vec::with_capacity(degree + 1);
        let mut rest = n;
        for _ in 0..degree {
            coeffs.push(FieldElement((rest % q) as u32));
            rest /= q;
        }
        coeffs.push(FieldElement::ONE);
        let f = Poly::new(coeffs);
        if poly_is_irreducible(&f, field).expect("monic") {
            out.push(f);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn gf(q: u64) -> FieldSpec {
        make_field(q).unwrap()
    }

    #[test]
    fn small_binary_cases() {
        let f2 = gf(2);
        assert!(poly_is_irreducible(&Poly::from_indices(&[1, 1, 1]), &f2).unwrap());
        assert!(!poly_is_irreducible(&Poly::from_indices(&[1, 0, 1]), &f2).unwrap());
        assert!(poly_is_irreducible(&Poly::from_indices(&[1, 1, 0, 1]), &f2).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        let f3 = gf(3);
        assert_eq!(
            poly_is_irreducible(&Poly::from_indices(&[1, 2]), &f3),
            Err(FieldError::NonMonic)
        );
        assert_eq!(
            poly_is_irreducible(&Poly::from_indices(&[1]), &f3),
            Err(FieldError::ConstantPolynomial)
        );
    }

    // Brute-force oracle: f has no monic factor of degree <= deg/2.
    fn irreducible_by_trial_division(f: &Poly, field: &FieldSpec) -> bool {
        let n = f.degree().unwrap();
        for d in 1..=n / 2 {
            let q = field.q() as u64;
            for m in 0..q.pow(d as u32) {
                let mut c = Vec::new();
                let mut r = m;
                for _ in 0..d {
                    c.push(FieldElement((r % q) as u32));
                    r /= q;
                }
                c.push(FieldElement::ONE);
                if f.rem(&Poly::new(c), field).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn rabin_matches_trial_division() {
        for (q, max_deg) in [(2u64, 6usize), (3, 4), (4, 3), (5, 3)] {
            let field = gf(q);
            for deg in 1..=max_deg {
                let total = q.pow(deg as u32);
                for m in 0..total {
                    let mut c = Vec::new();
                    let mut r = m;
                    for _ in 0..deg {
                        c.push(FieldElement((r % q) as u32));
                        r /= q;
                    }
                    c.push(FieldElement::ONE);
                    let f = Poly::new(c);
                    assert_eq!(
                        poly_is_irreducible(&f, &field).unwrap(),
                        irreducible_by_trial_division(&f, &field),
                        "q={q} f={f}"
                    );
                }
            }
        }
    }

    #[test]
    fn irreducible_counts_follow_necklace_formula() {
        // number of monic irreducibles of degree n: (1/n) Σ_{d|n} μ(d) q^{n/d}
        assert_eq!(monic_irreducibles(2, &gf(2)).len(), 1);
        assert_eq!(monic_irreducibles(3, &gf(2)).len(), 2);
        assert_eq!(monic_irreducibles(4, &gf(2)).len(), 3);
        assert_eq!(monic_irreducibles(2, &gf(3)).len(), 3);
        assert_eq!(monic_irreducibles(2, &gf(4)).len(), 6);
        assert_eq!(monic_irreducibles(1, &gf(7)).len(), 7);
    }

    #[test]
    fn divrem_reconstructs() {
        let f = gf(5);
        let a = Poly::from_indices(&[3, 1, 4, 1, 2]);
        let b = Poly::from_indices(&[2, 0, 3]);
        let (qt, r) = a.divrem(&b, &f);
        assert_eq!(qt.mul(&b, &f).add(&r, &f), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }
}
