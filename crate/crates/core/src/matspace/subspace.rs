use std::fmt;
use std::hash::{Hash, Hasher};

use crate::field::{FieldElement, FieldSpec};

use super::{MatError, MatrixGF};

/// Default cap on the number of subspaces `enumerate_subspaces` will produce.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// A subspace of GF(q)^d in canonical form: its basis is the RREF of any
/// spanning set, with zero rows removed. Equality is entry-wise on that basis.
#[derive(Clone)]
pub struct Subspace {
    ambient: usize,
    basis: MatrixGF,
    pivots: Vec<usize>,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.basis.data() == other.basis.data()
    }
}

impl Eq for Subspace {}

impl Hash for Subspace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ambient.hash(state);
        self.basis.data().hash(state);
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .basis
            .row_vecs()
            .iter()
            .map(|r| r.iter().map(|x| x.index().to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        write!(
            f,
            "Subspace(dim {} in {}: [{}])",
            self.dim(),
            self.ambient,
            rows.join("; ")
        )
    }
}

impl Subspace {
    pub fn from_matrix(m: &MatrixGF) -> Subspace {
        let (r, pivots) = m.rref();
        let basis = r.block(0, pivots.len(), 0, m.cols());
        Subspace {
            ambient: m.cols(),
            basis,
            pivots,
        }
    }

    pub fn from_rows(field: &FieldSpec, ambient: usize, rows: &[Vec<FieldElement>]) -> Subspace {
        Subspace::from_matrix(&MatrixGF::from_rows(field, ambient, rows))
    }

    pub fn zero(field: &FieldSpec, ambient: usize) -> Subspace {
        Subspace {
            ambient,
            basis: MatrixGF::zeros(field, 0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: &FieldSpec, ambient: usize) -> Subspace {
        Subspace {
            ambient,
            basis: MatrixGF::identity(field, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of the standard basis vectors with the given (0-based) indices.
    pub fn coordinate(field: &FieldSpec, ambient: usize, coords: &[usize]) -> Subspace {
        let rows: Vec<Vec<FieldElement>> = coords
            .iter()
            .map(|&c| {
                let mut v = vec![FieldElement::ZERO; ambient];
                v[c] = FieldElement::ONE;
                v
            })
            .collect();
        Subspace::from_rows(field, ambient, &rows)
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &MatrixGF {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn field(&self) -> &FieldSpec {
        self.basis.field()
    }

    pub fn is_zero(&self) -> bool {
        self.pivots.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), MatError> {
        if self.ambient != other.ambient {
            return Err(MatError::AmbientMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(())
    }

    /// Coordinates of `v` in the RREF basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[FieldElement]) -> Option<Vec<FieldElement>> {
        assert_eq!(v.len(), self.ambient);
        let coords: Vec<FieldElement> = self.pivots.iter().map(|&p| v[p]).collect();
        let recon = self.basis.vec_mul(&coords);
        (recon == v).then_some(coords)
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && other.basis.row_vecs().iter().all(|r| self.contains(r))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, MatError> {
        self.check_ambient(other)?;
        Ok(Subspace::from_matrix(&self.basis.vstack(&other.basis)))
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace, MatError> {
        self.check_ambient(other)?;
        let field = self.field().clone();
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(&field, self.ambient));
        }
        // (a, b) with a S + b T = 0 gives a S in S ∩ T.
        let stacked = self.basis.vstack(&other.basis);
        let ker = stacked.kernel_basis();
        let k = self.dim();
        let rows: Vec<Vec<FieldElement>> = ker
            .basis()
            .row_vecs()
            .iter()
            .map(|r| self.basis.vec_mul(&r[..k]))
            .collect();
        Ok(Subspace::from_rows(&field, self.ambient, &rows))
    }

    /// True iff the two subspaces meet only in zero.
    pub fn meets_trivially(&self, other: &Subspace) -> Result<bool, MatError> {
        self.check_ambient(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(true);
        }
        if self.dim() + other.dim() > self.ambient {
            return Ok(false);
        }
        Ok(self.basis.vstack(&other.basis).rank() == self.dim() + other.dim())
    }

    /// True iff the ambient space is the direct sum of the two.
    pub fn is_complement(&self, other: &Subspace) -> Result<bool, MatError> {
        self.check_ambient(other)?;
        Ok(self.dim() + other.dim() == self.ambient && self.meets_trivially(other)?)
    }

    /// The image `{ v g : v in S }`.
    pub fn image_under(&self, g: &MatrixGF) -> Subspace {
        Subspace::from_matrix(&self.basis.mul(g))
    }

    pub fn is_invariant_under(&self, g: &MatrixGF) -> bool {
        self.basis.row_vecs().iter().all(|r| self.contains(&g.vec_mul(r)))
    }
}

/// Number of `e`-subspaces of GF(q)^d, or `None` on u128 overflow.
pub fn subspace_count(d: usize, e: usize, q: u64) -> Option<u128> {
    if e > d {
        return Some(0);
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..e {
        num = num.checked_mul(q.checked_pow((d - i) as u32)?.checked_sub(1)?)?;
        den = den.checked_mul(q.checked_pow((i + 1) as u32)?.checked_sub(1)?)?;
    }
    Some(num / den)
}

/// Every `e`-subspace of GF(q)^d exactly once, in order of pivot profile and
/// then free entries. Errors if there are more than `cap` of them.
pub fn enumerate_subspaces(d: usize, e: usize, field: &FieldSpec, cap: u128) -> Result<SubspaceIter, MatError> {
    if e > d {
        return Err(MatError::DimensionMismatch { expected: d, found: e });
    }
    let count = subspace_count(d, e, field.q() as u64);
    match count {
        Some(c) if c <= cap => Ok(SubspaceIter::new(d, e, field)),
        _ => Err(MatError::EnumerationTooLarge {
            count: count.map(|c| c.to_string()).unwrap_or_else(|| "overflow".into()),
            cap,
        }),
    }
}

pub struct SubspaceIter {
    d: usize,
    e: usize,
    field: FieldSpec,
    pivots: Option<Vec<usize>>,
    free: Vec<(usize, usize)>,
    counter: Vec<u32>,
    fresh: bool,
}

impl SubspaceIter {
    fn new(d: usize, e: usize, field: &FieldSpec) -> SubspaceIter {
        let pivots: Vec<usize> = (0..e).collect();
        let mut it = SubspaceIter {
            d,
            e,
            field: field.clone(),
            pivots: Some(pivots),
            free: Vec::new(),
            counter: Vec::new(),
            fresh: true,
        };
        it.reset_free();
        it
    }

    fn reset_free(&mut self) {
        let Some(p) = &self.pivots else { return };
        self.free = p
            .iter()
            .enumerate()
            .flat_map(|(row, &pc)| (pc + 1..self.d).filter(|c| !p.contains(c)).map(move |c| (row, c)))
            .collect();
        self.counter = vec![0; self.free.len()];
        self.fresh = true;
    }

    fn advance_pivots(&mut self) {
        let Some(p) = &mut self.pivots else { return };
        let (d, e) = (self.d, self.e);
        let mut i = e;
        loop {
            if i == 0 {
                self.pivots = None;
                return;
            }
            i -= 1;
            if p[i] < d - e + i {
                p[i] += 1;
                for j in i + 1..e {
                    p[j] = p[j - 1] + 1;
                }
                break;
            }
        }
        self.reset_free();
    }

    fn advance_counter(&mut self) -> bool {
        let q = self.field.q();
        for c in self.counter.iter_mut() {
            *c += 1;
            if *c < q {
                return true;
            }
            *c = 0;
        }
        false
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        self.pivots.as_ref()?;
        if self.fresh {
            self.fresh = false;
        } else if !self.advance_counter() {
            self.advance_pivots();
            self.pivots.as_ref()?;
            self.fresh = false;
        }
        let pivots = self.pivots.clone().expect("checked above");
        let mut basis = MatrixGF::zeros(&self.field, self.e, self.d);
        for (row, &pc) in pivots.iter().enumerate() {
            basis.set(row, pc, FieldElement::ONE);
        }
        for (&(row, col), &v) in self.free.iter().zip(&self.counter) {
            basis.set(row, col, self.field.elem(v));
        }
        Some(Subspace {
            ambient: self.d,
            basis,
            pivots,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use std::collections::HashSet;

    #[test]
    fn enumeration_counts() {
        for (d, e, q, expect) in [
            (2, 1, 2, 3),
            (4, 2, 2, 35),
            (3, 3, 5, 1),
            (3, 0, 3, 1),
            (4, 1, 3, 40),
            (5, 2, 2, 155),
        ] {
            let f = make_field(q).unwrap();
            let all: Vec<Subspace> = enumerate_subspaces(d, e, &f, DEFAULT_ENUMERATION_CAP)
                .unwrap()
                .collect();
            assert_eq!(all.len(), expect, "d={d} e={e} q={q}");
            assert_eq!(subspace_count(d, e, q), Some(expect as u128));
            let distinct: HashSet<_> = all.iter().cloned().collect();
            assert_eq!(distinct.len(), expect);
            for s in &all {
                assert_eq!(s.dim(), e);
                assert_eq!(&Subspace::from_matrix(s.basis()), s, "enumerated basis not canonical");
            }
        }
    }

    #[test]
    fn enumeration_cap() {
        let f = make_field(2).unwrap();
        assert!(matches!(
            enumerate_subspaces(4, 2, &f, 34),
            Err(MatError::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn coordinate_intersections() {
        let f = make_field(2).unwrap();
        let e1 = Subspace::coordinate(&f, 3, &[0]);
        let e2 = Subspace::coordinate(&f, 3, &[1]);
        assert!(e1.intersection(&e2).unwrap().is_zero());
        assert_eq!(e1.intersection(&e1).unwrap(), e1);
        let a = Subspace::coordinate(&f, 3, &[0, 1]);
        let b = Subspace::coordinate(&f, 3, &[1, 2]);
        assert_eq!(a.intersection(&b).unwrap(), e2);
        assert_eq!(a.sum(&b).unwrap(), Subspace::full(&f, 3));
    }

    #[test]
    fn ambient_mismatch() {
        let f = make_field(2).unwrap();
        let a = Subspace::full(&f, 2);
        let b = Subspace::full(&f, 3);
        assert!(matches!(a.intersection(&b), Err(MatError::AmbientMismatch { .. })));
    }
}
