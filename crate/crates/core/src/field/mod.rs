//! Arithmetic in GF(q) for a prime power q = p^k.
//!
//! Elements are stored by their canonical index `Σ c_i p^i`, where `c_i` are
//! the coefficients of the element in the polynomial basis `1, t, ..., t^{k-1}`
//! of GF(p)[t]/(m(t)). The modulus `m` is the lexicographically least monic
//! irreducible polynomial of degree k, comparing coefficient sequences from
//! the constant term upwards.

mod poly;

pub use poly::{monic_irreducibles, poly_is_irreducible, Poly};

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest supported field order.
pub const MAX_FIELD_ORDER: u64 = 1 << 16;

/// Fields up to this order get full addition and multiplication tables.
const TABLE_LIMIT: u32 = 256;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime power")]
    NotAPrimePower(u64),
    #[error("field order {0} exceeds the supported bound {MAX_FIELD_ORDER}")]
    FieldTooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomial is not monic")]
    NonMonic,
    #[error("polynomial has degree 0; expected degree at least 1")]
    ConstantPolynomial,
    #[error("coefficient vector {0:?} is not a valid element")]
    InvalidCoefficients(Vec<u32>),
    #[error("index {index} out of range for GF({q})")]
    IndexOutOfRange { index: u32, q: u32 },
}

/// An element of GF(q), identified by its canonical index in `[0, q)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// The canonical index `Σ c_i p^i`.
    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    add: Vec<u16>,
    mul: Vec<u16>,
}

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    tables: Option<Tables>,
}

/// A finite field GF(p^k) in polynomial basis. Cheap to clone.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.0.p)
            .field("k", &self.0.k)
            .field("modulus", &self.0.modulus)
            .finish()
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.0.q)
    }
}

/// Splits `q` as `p^k`, or returns `None` if `q` is not a prime power.
pub fn prime_power_decomposition(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q {
        if q.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if p * p > q {
        // q itself is prime
        return Some((q, 1));
    }
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

pub fn is_prime_power(q: u64) -> bool {
    prime_power_decomposition(q).is_some()
}

/// Builds GF(q) with the lexicographically least monic irreducible modulus.
pub fn make_field(q: u64) -> Result<FieldSpec, FieldError> {
    let (p, k) = prime_power_decomposition(q).ok_or(FieldError::NotAPrimePower(q))?;
    if q > MAX_FIELD_ORDER {
        return Err(FieldError::FieldTooLarge(q));
    }
    let p = p as u32;
    let prime = FieldSpec::build(p, 1, vec![0, 1]);
    if k == 1 {
        return Ok(prime);
    }
    let modulus = least_irreducible(&prime, k);
    Ok(FieldSpec::build(p, k, modulus))
}

fn least_irreducible(prime: &FieldSpec, k: u32) -> Vec<u32> {
    let p = prime.p();
    let count = (p as u64).pow(k);
    // n runs through coefficient vectors with the constant term as most
    // significant digit, which is the required lexicographic order.
    for n in 0..count {
        let mut coeffs = vec![0u32; k as usize + 1];
        let mut rest = n;
        for i in (0..k as usize).rev() {
            coeffs[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        coeffs[k as usize] = 1;
        let f = Poly::from_indices(&coeffs);
        if poly_is_irreducible(&f, prime).expect("monic by construction") {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over GF(p)")
}

impl FieldSpec {
    fn build(p: u32, k: u32, modulus: Vec<u32>) -> FieldSpec {
        let q = p.pow(k);
        let mut inner = Inner {
            p,
            k,
            q,
            modulus,
            neg: Vec::new(),
            inv: Vec::new(),
            tables: None,
        };
        inner.neg = (0..q).map(|a| raw_neg(&inner, a)).collect();
        if q <= TABLE_LIMIT {
            let n = q as usize;
            let mut add = vec![0u16; n * n];
            let mut mul = vec![0u16; n * n];
            for a in 0..q {
                for b in 0..q {
                    add[a as usize * n + b as usize] = raw_add(&inner, a, b) as u16;
                    mul[a as usize * n + b as usize] = raw_mul(&inner, a, b) as u16;
                }
            }
            inner.tables = Some(Tables { add, mul });
        }
        let mut inv = vec![0u32; q as usize];
        if q > 2 {
            // Multiplicative group is cyclic: walk powers of a generator.
            let g = (2..q)
                .chain(std::iter::once(1))
                .find(|&g| multiplicative_order(&inner, g) == q - 1)
                .expect("GF(q)* is cyclic");
            let mut powers = Vec::with_capacity(q as usize - 1);
            let mut x = 1u32;
            for _ in 0..q - 1 {
                powers.push(x);
                x = raw_mul(&inner, x, g);
            }
            for (i, &x) in powers.iter().enumerate() {
                let j = (q as usize - 1 - i) % (q as usize - 1);
                inv[x as usize] = powers[j];
            }
        } else {
            inv[1] = 1;
        }
        inner.inv = inv;
        FieldSpec(Arc::new(inner))
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.0.k
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Modulus coefficients, constant term first. For prime fields this is `t`.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.k == 1
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    pub fn element(&self, index: u32) -> Result<FieldElement, FieldError> {
        if index < self.0.q {
            Ok(FieldElement(index))
        } else {
            Err(FieldError::IndexOutOfRange { index, q: self.0.q })
        }
    }

    /// Element with the given index; panics when out of range.
    #[inline]
    pub fn elem(&self, index: u32) -> FieldElement {
        assert!(index < self.0.q, "index {index} out of range for GF({})", self.0.q);
        FieldElement(index)
    }

    /// The image of an integer under Z -> GF(p) -> GF(q).
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.0.q).map(FieldElement)
    }

    pub fn coefficients(&self, x: FieldElement) -> Vec<u32> {
        let mut out = vec![0u32; self.0.k as usize];
        let mut rest = x.0;
        for c in out.iter_mut() {
            *c = rest % self.0.p;
            rest /= self.0.p;
        }
        out
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.0.k as usize || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(FieldError::InvalidCoefficients(coeffs.to_vec()));
        }
        Ok(FieldElement(coeffs.iter().rev().fold(0, |acc, &c| acc * self.0.p + c)))
    }

    /// The element `t` of the polynomial basis (equals 0 for prime fields).
    pub fn generator_t(&self) -> FieldElement {
        if self.0.k == 1 {
            FieldElement(0)
        } else {
            FieldElement(self.0.p)
        }
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.0.tables {
            Some(t) => FieldElement(t.add[(a.0 * self.0.q + b.0) as usize] as u32),
            None => FieldElement(raw_add(&self.0, a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.0.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.0.tables {
            Some(t) => FieldElement(t.mul[(a.0 * self.0.q + b.0) as usize] as u32),
            None => FieldElement(raw_mul(&self.0, a.0, b.0)),
        }
    }

    /// Schoolbook product, bypassing the cached tables.
    pub fn mul_schoolbook(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(raw_mul(&self.0, a.0, b.0))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(FieldElement(self.0.inv[a.0 as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// A generator of the multiplicative group.
    pub fn primitive_element(&self) -> FieldElement {
        let q = self.0.q;
        if q == 2 {
            return FieldElement::ONE;
        }
        (2..q)
            .map(FieldElement)
            .find(|&g| multiplicative_order(&self.0, g.0) == q - 1)
            .expect("GF(q)* is cyclic")
    }

    /// Human-readable form: the integer for prime fields, a polynomial in t otherwise.
    pub fn format(&self, x: FieldElement) -> String {
        if self.0.k == 1 {
            return x.0.to_string();
        }
        let coeffs = self.coefficients(x);
        let terms: Vec<String> = coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".to_string(),
                (1, c) => format!("{c}t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}t^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            format!("({})", terms.join("+"))
        }
    }
}

fn digits(inner: &Inner, mut x: u32, out: &mut [u32]) {
    for c in out.iter_mut() {
        *c = x % inner.p;
        x /= inner.p;
    }
}

fn undigits(inner: &Inner, coeffs: &[u32]) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * inner.p + c)
}

fn raw_add(inner: &Inner, a: u32, b: u32) -> u32 {
    if inner.k == 1 {
        return (a + b) % inner.p;
    }
    let k = inner.k as usize;
    let mut da = vec![0; k];
    let mut db = vec![0; k];
    digits(inner, a, &mut da);
    digits(inner, b, &mut db);
    for (x, y) in da.iter_mut().zip(&db) {
        *x = (*x + y) % inner.p;
    }
    undigits(inner, &da)
}

fn raw_neg(inner: &Inner, a: u32) -> u32 {
    if inner.k == 1 {
        return (inner.p - a % inner.p) % inner.p;
    }
    let k = inner.k as usize;
    let mut da = vec![0; k];
    digits(inner, a, &mut da);
    for x in da.iter_mut() {
        *x = (inner.p - *x) % inner.p;
    }
    undigits(inner, &da)
}

fn raw_mul(inner: &Inner, a: u32, b: u32) -> u32 {
    let p = inner.p as u64;
    if inner.k == 1 {
        return ((a as u64 * b as u64) % p) as u32;
    }
    let k = inner.k as usize;
    let mut da = vec![0; k];
    let mut db = vec![0; k];
    digits(inner, a, &mut da);
    digits(inner, b, &mut db);
    let mut prod = vec![0u64; 2 * k - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
        }
    }
    // reduce modulo the monic modulus, highest degree first
    for deg in (k..2 * k - 1).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        prod[deg] = 0;
        for (i, &m) in inner.modulus[..k].iter().enumerate() {
            let idx = deg - k + i;
            prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
        }
    }
    let low: Vec<u32> = prod[..k].iter().map(|&c| c as u32).collect();
    undigits(inner, &low)
}

fn multiplicative_order(inner: &Inner, g: u32) -> u32 {
    let mut x = g;
    let mut n = 1;
    while x != 1 {
        x = raw_mul(inner, x, g);
        n += 1;
        if n > inner.q {
            return 0;
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_field_decomposes_prime_powers() {
        let f5 = make_field(5).unwrap();
        assert_eq!((f5.p(), f5.k(), f5.q()), (5, 1, 5));
        assert_eq!(f5.modulus(), &[0, 1]);

        let f4 = make_field(4).unwrap();
        assert_eq!((f4.p(), f4.k()), (2, 2));
        assert_eq!(f4.modulus(), &[1, 1, 1]);

        assert_eq!(make_field(12).unwrap_err(), FieldError::NotAPrimePower(12));
        assert_eq!(make_field(1).unwrap_err(), FieldError::NotAPrimePower(1));
        assert_eq!(make_field(0).unwrap_err(), FieldError::NotAPrimePower(0));
        assert!(matches!(make_field(1 << 17), Err(FieldError::FieldTooLarge(_))));
    }

    #[test]
    fn lexicographically_least_moduli() {
        // GF(8): t^3+t^2+1 ([1,0,1,1]) precedes t^3+t+1 ([1,1,0,1]) constant-first.
        assert_eq!(make_field(8).unwrap().modulus(), &[1, 0, 1, 1]);
        // GF(9): t^2+1 is irreducible over GF(3) and is the least candidate.
        assert_eq!(make_field(9).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(make_field(16).unwrap().modulus(), &[1, 0, 0, 1, 1]);
    }

    #[test]
    fn inverse_in_gf5() {
        let f = make_field(5).unwrap();
        assert_eq!(f.inv(f.elem(2)).unwrap(), f.elem(3));
        assert_eq!(f.inv(f.zero()), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn t_squared_in_gf4() {
        let f = make_field(4).unwrap();
        let t = f.from_coefficients(&[0, 1]).unwrap();
        let t_plus_1 = f.from_coefficients(&[1, 1]).unwrap();
        assert_eq!(f.mul(t, t), t_plus_1);
        assert_eq!(f.mul_schoolbook(t, t), t_plus_1);
    }

    #[test]
    fn additive_inverse() {
        for q in [2, 3, 4, 5, 7, 8, 9, 16, 25, 27] {
            let f = make_field(q).unwrap();
            for a in f.elements() {
                assert!(f.add(a, f.neg(a)).is_zero());
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let f = make_field(q).unwrap();
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_every_element() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = make_field(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.pow(a, q), a);
            }
        }
    }

    #[test]
    fn index_round_trip() {
        for q in [2, 4, 9, 27, 32] {
            let f = make_field(q).unwrap();
            for a in f.elements() {
                let c = f.coefficients(a);
                assert_eq!(f.from_coefficients(&c).unwrap(), a);
                assert_eq!(f.element(a.index()).unwrap(), a);
            }
        }
        let f = make_field(9).unwrap();
        assert!(f.from_coefficients(&[3, 0]).is_err());
        assert!(f.from_coefficients(&[1]).is_err());
    }

    #[test]
    fn untabled_field_matches_schoolbook_inverse() {
        // 3^6 = 729 exceeds the table limit, so arithmetic goes through raw_mul
        let f = make_field(729).unwrap();
        for i in 1..200 {
            let a = f.elem(i);
            assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
        }
    }

    #[test]
    fn primitive_element_generates() {
        for q in [3, 4, 5, 8, 9, 16] {
            let f = make_field(q).unwrap();
            let g = f.primitive_element();
            let mut seen = std::collections::HashSet::new();
            let mut x = f.one();
            for _ in 0..q - 1 {
                seen.insert(x);
                x = f.mul(x, g);
            }
            assert_eq!(seen.len(), q as usize - 1);
        }
    }
}
