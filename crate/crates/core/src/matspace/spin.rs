use crate::field::{FieldElement, FieldSpec};

use super::{MatError, MatrixGF, Subspace};

/// Caps for the exhaustive irreducibility test, which spins one vector per
/// 1-space and so costs about `(q^d - 1)/(q - 1)` closures.
#[derive(Clone, Copy, Debug)]
pub struct SpinCaps {
    pub max_d: usize,
    pub max_q: u32,
}

impl Default for SpinCaps {
    fn default() -> Self {
        SpinCaps { max_d: 8, max_q: 9 }
    }
}

/// Incremental semi-echelon basis. Each stored row has a leading 1 at its
/// pivot and is zero at the pivots of earlier rows.
struct Echelon<'a> {
    field: &'a FieldSpec,
    rows: Vec<(usize, Vec<FieldElement>)>,
}

impl<'a> Echelon<'a> {
    fn new(field: &'a FieldSpec) -> Self {
        Echelon {
            field,
            rows: Vec::new(),
        }
    }

    /// Reduces `v`; if it is new, stores it and returns the reduced vector.
    fn insert(&mut self, mut v: Vec<FieldElement>) -> Option<Vec<FieldElement>> {
        let f = self.field;
        for (p, row) in &self.rows {
            let c = v[*p];
            if c.is_zero() {
                continue;
            }
            for (x, &r) in v.iter_mut().zip(row) {
                *x = f.sub(*x, f.mul(c, r));
            }
        }
        let p = v.iter().position(|x| !x.is_zero())?;
        let inv = f.inv(v[p]).expect("nonzero");
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
        self.rows.push((p, v.clone()));
        Some(v)
    }
}

/// Smallest subspace containing the seeds and closed under right
/// multiplication by every generator.
pub fn spin(seeds: &[Vec<FieldElement>], generators: &[MatrixGF]) -> Result<Subspace, MatError> {
    let Some(g0) = generators.first() else {
        return Err(MatError::EmptyGenerators);
    };
    let d = g0.rows();
    for g in generators {
        if !g.is_square() || g.rows() != d {
            return Err(MatError::AmbientMismatch {
                left: d,
                right: g.rows(),
            });
        }
    }
    if let Some(s) = seeds.iter().find(|s| s.len() != d) {
        return Err(MatError::AmbientMismatch {
            left: d,
            right: s.len(),
        });
    }
    let field = g0.field().clone();
    let mut ech = Echelon::new(&field);
    let mut work: Vec<Vec<FieldElement>> = Vec::new();
    for s in seeds {
        if let Some(v) = ech.insert(s.clone()) {
            work.push(v);
        }
    }
    while let Some(v) = work.pop() {
        if ech.rows.len() == d {
            break;
        }
        for g in generators {
            if let Some(w) = ech.insert(g.vec_mul(&v)) {
                work.push(w);
            }
        }
    }
    let rows: Vec<Vec<FieldElement>> = ech.rows.into_iter().map(|(_, r)| r).collect();
    Ok(Subspace::from_rows(&field, d, &rows))
}

/// One nonzero vector per 1-space of GF(q)^d: first nonzero coordinate is 1.
pub fn one_space_representatives(d: usize, field: &FieldSpec) -> impl Iterator<Item = Vec<FieldElement>> + '_ {
    let q = field.q() as u64;
    (0..d).flat_map(move |lead| {
        let tail = d - lead - 1;
        (0..q.pow(tail as u32)).map(move |mut n| {
            let mut v = vec![FieldElement::ZERO; d];
            v[lead] = FieldElement::ONE;
            for x in v.iter_mut().skip(lead + 1) {
                *x = field.elem((n % q) as u32);
                n /= q;
            }
            v
        })
    })
}

/// True iff the generated group fixes no proper nonzero subspace, decided by
/// spinning every 1-space.
pub fn is_irreducible_group(generators: &[MatrixGF], caps: SpinCaps) -> Result<bool, MatError> {
    let Some(g0) = generators.first() else {
        return Err(MatError::EmptyGenerators);
    };
    let d = g0.rows();
    let q = g0.field().q();
    if d > caps.max_d {
        return Err(MatError::CapExceeded {
            what: "d",
            value: d as u64,
            cap: caps.max_d as u64,
        });
    }
    if q > caps.max_q {
        return Err(MatError::CapExceeded {
            what: "q",
            value: q as u64,
            cap: caps.max_q as u64,
        });
    }
    let field = g0.field().clone();
    for v in one_space_representatives(d, &field) {
        if !spin(&[v], generators)?.is_full() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, Poly};

    #[test]
    fn spin_examples() {
        let f = make_field(2).unwrap();
        let e1 = vec![FieldElement::ONE, FieldElement::ZERO, FieldElement::ZERO];
        let s = spin(std::slice::from_ref(&e1), &[MatrixGF::identity(&f, 3)]).unwrap();
        assert_eq!(s, Subspace::coordinate(&f, 3, &[0]));
        let c = MatrixGF::companion(&f, &Poly::from_indices(&[1, 1, 0, 1]));
        assert!(spin(&[e1], &[c]).unwrap().is_full());
    }

    #[test]
    fn irreducibility_examples() {
        let f = make_field(2).unwrap();
        let caps = SpinCaps::default();
        assert!(!is_irreducible_group(&[MatrixGF::identity(&f, 2)], caps).unwrap());
        let c = MatrixGF::companion(&f, &Poly::from_indices(&[1, 1, 1]));
        assert!(is_irreducible_group(&[c], caps).unwrap());
        // GL_3(2) is generated by a transvection and a 3-cycle permutation
        let t = MatrixGF::from_indices(&f, 3, 3, &[1, 1, 0, 0, 1, 0, 0, 0, 1]).unwrap();
        let p = MatrixGF::from_indices(&f, 3, 3, &[0, 1, 0, 0, 0, 1, 1, 0, 0]).unwrap();
        assert!(is_irreducible_group(&[t, p], caps).unwrap());
    }

    #[test]
    fn representative_count() {
        let f = make_field(3).unwrap();
        assert_eq!(one_space_representatives(3, &f).count(), 13);
    }

    #[test]
    fn caps_enforced() {
        let f = make_field(11).unwrap();
        assert!(matches!(
            is_irreducible_group(&[MatrixGF::identity(&f, 2)], SpinCaps::default()),
            Err(MatError::CapExceeded { .. })
        ));
    }
}
