use std::fmt;
use std::hash::{Hash, Hasher};

use crate::field::{FieldElement, FieldSpec, Poly};

use super::{MatError, Subspace};

/// Dense matrix over GF(q), row-major.
///
/// Vectors are rows and matrices act on the right: `v ↦ vM`. So the image of
/// `g - 1` is the row space of `g - I` and the kernel is the left null space.
#[derive(Clone, PartialEq, Eq)]
pub struct MatrixGF {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
    field: FieldSpec,
}

impl Hash for MatrixGF {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.cols.hash(state);
        self.data.hash(state);
    }
}

impl fmt::Debug for MatrixGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixGF[{}x{} over {}]", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.index().to_string()).collect();
            write!(f, "\n  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl MatrixGF {
    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> MatrixGF {
        MatrixGF {
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
            field: field.clone(),
        }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> MatrixGF {
        let mut m = MatrixGF::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = FieldElement::ONE;
        }
        m
    }

    pub fn from_elements(
        field: &FieldSpec,
        rows: usize,
        cols: usize,
        data: Vec<FieldElement>,
    ) -> Result<MatrixGF, MatError> {
        if data.len() != rows * cols {
            return Err(MatError::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(bad) = data.iter().find(|x| x.index() >= field.q()) {
            return Err(MatError::InvalidEntry(bad.index()));
        }
        Ok(MatrixGF {
            rows,
            cols,
            data,
            field: field.clone(),
        })
    }

    /// Builds a matrix from element indices in row-major order.
    pub fn from_indices(field: &FieldSpec, rows: usize, cols: usize, indices: &[u32]) -> Result<MatrixGF, MatError> {
        let data = indices
            .iter()
            .map(|&i| field.element(i).map_err(|_| MatError::InvalidEntry(i)))
            .collect::<Result<Vec<_>, _>>()?;
        MatrixGF::from_elements(field, rows, cols, data)
    }

    pub fn from_rows(field: &FieldSpec, cols: usize, rows: &[Vec<FieldElement>]) -> MatrixGF {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        MatrixGF {
            rows: rows.len(),
            cols,
            data,
            field: field.clone(),
        }
    }

    pub fn from_fn(
        field: &FieldSpec,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> MatrixGF {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        MatrixGF {
            rows,
            cols,
            data,
            field: field.clone(),
        }
    }

    /// Companion matrix of a monic polynomial, in the row convention: the
    /// basis `1, t, ..., t^{n-1}` of GF(q)[t]/(f) with multiplication by `t`.
    pub fn companion(field: &FieldSpec, f: &Poly) -> MatrixGF {
        let n = f.degree().expect("nonzero polynomial");
        assert!(n >= 1 && f.is_monic(), "companion matrix needs a monic polynomial");
        let mut m = MatrixGF::zeros(field, n, n);
        for i in 0..n - 1 {
            m.set(i, i + 1, FieldElement::ONE);
        }
        for j in 0..n {
            m.set(n - 1, j, field.neg(f.coeffs()[j]));
        }
        m
    }

    pub fn block_diag(a: &MatrixGF, b: &MatrixGF) -> MatrixGF {
        let field = a.field.clone();
        let (r, c) = (a.rows + b.rows, a.cols + b.cols);
        MatrixGF::from_fn(&field, r, c, |i, j| {
            if i < a.rows && j < a.cols {
                a.get(i, j)
            } else if i >= a.rows && j >= a.cols {
                b.get(i - a.rows, j - a.cols)
            } else {
                FieldElement::ZERO
            }
        })
    }

    /// Stacks `self` above `other`.
    pub fn vstack(&self, other: &MatrixGF) -> MatrixGF {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        MatrixGF {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
            field: self.field.clone(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: FieldElement) {
        self.data[i * self.cols + j] = x;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn data(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn indices(&self) -> Vec<u32> {
        self.data.iter().map(|x| x.index()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| self.get(i, j) == if i == j { FieldElement::ONE } else { FieldElement::ZERO })
            })
    }

    /// Submatrix of rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> MatrixGF {
        MatrixGF::from_fn(&self.field, r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j))
    }

    pub fn transpose(&self) -> MatrixGF {
        MatrixGF::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn add(&self, other: &MatrixGF) -> MatrixGF {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = &self.field;
        MatrixGF {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect(),
            field: f.clone(),
        }
    }

    pub fn sub(&self, other: &MatrixGF) -> MatrixGF {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = &self.field;
        MatrixGF {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect(),
            field: f.clone(),
        }
    }

    pub fn scale(&self, c: FieldElement) -> MatrixGF {
        let f = &self.field;
        MatrixGF {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, c)).collect(),
            field: f.clone(),
        }
    }

    /// `self - I`.
    pub fn minus_identity(&self) -> MatrixGF {
        assert!(self.is_square());
        let mut m = self.clone();
        for i in 0..self.rows {
            let x = m.get(i, i);
            m.set(i, i, self.field.sub(x, FieldElement::ONE));
        }
        m
    }

    pub fn mul(&self, other: &MatrixGF) -> MatrixGF {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let f = &self.field;
        let mut out = vec![FieldElement::ZERO; self.rows * other.cols];
        for i in 0..self.rows {
            let orow = &mut out[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for (o, &b) in orow.iter_mut().zip(other.row(k)) {
                    *o = f.add(*o, f.mul(a, b));
                }
            }
        }
        MatrixGF {
            rows: self.rows,
            cols: other.cols,
            data: out,
            field: f.clone(),
        }
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.rows);
        let f = &self.field;
        let mut out = vec![FieldElement::ZERO; self.cols];
        for (i, &a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.row(i)) {
                *o = f.add(*o, f.mul(a, b));
            }
        }
        out
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (MatrixGF, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..cols {
                    self.data.swap(p * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.get(r, c)).expect("pivot is nonzero");
            for j in c..cols {
                let x = self.get(r, j);
                self.set(r, j, f.mul(x, inv));
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                for j in c..cols {
                    let x = f.sub(self.get(i, j), f.mul(factor, self.get(r, j)));
                    self.set(i, j, x);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rank_in_place()
    }

    // forward elimination only
    fn rank_in_place(&mut self) -> usize {
        let f = self.field.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..cols {
                    self.data.swap(p * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.get(r, c)).expect("pivot is nonzero");
            for i in r + 1..rows {
                let x = self.get(i, c);
                if x.is_zero() {
                    continue;
                }
                let factor = f.mul(x, inv);
                for j in c..cols {
                    let y = f.sub(self.get(i, j), f.mul(factor, self.get(r, j)));
                    self.set(i, j, y);
                }
            }
            r += 1;
        }
        r
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn det(&self) -> Result<FieldElement, MatError> {
        if !self.is_square() {
            return Err(MatError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let f = self.field.clone();
        let n = self.rows;
        let mut m = self.clone();
        let mut det = FieldElement::ONE;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(FieldElement::ZERO);
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = f.neg(det);
            }
            let pivot = m.get(c, c);
            det = f.mul(det, pivot);
            let inv = f.inv(pivot).expect("nonzero");
            for i in c + 1..n {
                let factor = f.mul(m.get(i, c), inv);
                if factor.is_zero() {
                    continue;
                }
                for j in c..n {
                    let y = f.sub(m.get(i, j), f.mul(factor, m.get(c, j)));
                    m.set(i, j, y);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<MatrixGF, MatError> {
        if !self.is_square() {
            return Err(MatError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let f = self.field.clone();
        // [M | I] -> [I | M^{-1}]
        let mut aug = MatrixGF::from_fn(&f, n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j)
            } else if j - n == i {
                FieldElement::ONE
            } else {
                FieldElement::ZERO
            }
        });
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(MatError::Singular);
        }
        Ok(aug.block(0, n, n, 2 * n))
    }

    /// The subspace `{v : vM = 0}`.
    pub fn kernel_basis(&self) -> Subspace {
        let (r, pivots) = self.transpose().rref();
        // Solutions x of M^T x = 0, one per free column.
        let n = self.rows;
        let f = &self.field;
        let mut basis = Vec::new();
        for free in (0..n).filter(|c| !pivots.contains(c)) {
            let mut v = vec![FieldElement::ZERO; n];
            v[free] = FieldElement::ONE;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(row, free));
            }
            basis.push(v);
        }
        Subspace::from_rows(f, n, &basis)
    }

    pub fn row_space(&self) -> Subspace {
        Subspace::from_matrix(self)
    }

    /// Characteristic polynomial via reduction to upper Hessenberg form.
    pub fn charpoly(&self) -> Poly {
        assert!(self.is_square());
        let f = self.field.clone();
        let n = self.rows;
        let mut h = self.clone();
        for m in 1..n.saturating_sub(1) {
            let Some(p) = (m..n).find(|&i| !h.get(i, m - 1).is_zero()) else {
                continue;
            };
            if p != m {
                for j in 0..n {
                    h.data.swap(p * n + j, m * n + j);
                }
                for i in 0..n {
                    h.data.swap(i * n + p, i * n + m);
                }
            }
            let inv = f.inv(h.get(m, m - 1)).expect("nonzero");
            for i in m + 1..n {
                let u = f.mul(h.get(i, m - 1), inv);
                if u.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let y = f.sub(h.get(i, j), f.mul(u, h.get(m, j)));
                    h.set(i, j, y);
                }
                for r in 0..n {
                    let y = f.add(h.get(r, m), f.mul(u, h.get(r, i)));
                    h.set(r, m, y);
                }
            }
        }
        // p_m = (t - h_mm) p_{m-1} - Σ_i h_{i,m} (Π_{j=i+1}^{m} h_{j,j-1}) p_{i-1}
        let mut ps: Vec<Poly> = vec![Poly::one()];
        for m in 0..n {
            let lin = Poly::new(vec![f.neg(h.get(m, m)), FieldElement::ONE]);
            let mut pm = lin.mul(&ps[m], &f);
            let mut prod = FieldElement::ONE;
            for i in (0..m).rev() {
                prod = f.mul(prod, h.get(i + 1, i));
                if prod.is_zero() {
                    break;
                }
                let c = f.mul(h.get(i, m), prod);
                pm = pm.sub(&ps[i].scale(c, &f), &f);
            }
            ps.push(pm);
        }
        ps.pop().expect("nonempty")
    }

    /// `x^{-1} self x`.
    pub fn conjugate_by(&self, x: &MatrixGF, x_inv: &MatrixGF) -> MatrixGF {
        x_inv.mul(self).mul(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn m(q: u64, r: usize, c: usize, idx: &[u32]) -> MatrixGF {
        MatrixGF::from_indices(&make_field(q).unwrap(), r, c, idx).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(m(2, 2, 2, &[0, 0, 0, 0]).rank(), 0);
        assert_eq!(m(2, 2, 2, &[1, 1, 1, 1]).rank(), 1);
        assert_eq!(m(3, 3, 3, &[1, 2, 0, 2, 1, 0, 0, 0, 1]).rank(), 2);
    }

    #[test]
    fn kernel_of_identity_is_zero() {
        let f = make_field(3).unwrap();
        assert_eq!(MatrixGF::identity(&f, 3).kernel_basis().dim(), 0);
    }

    #[test]
    fn inverse_round_trip_and_singular() {
        let a = m(5, 3, 3, &[1, 2, 3, 0, 1, 4, 5 % 5, 6 % 5, 0]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(inv.mul(&a).is_identity());
        assert_eq!(m(2, 2, 2, &[1, 1, 1, 1]).inverse().unwrap_err(), MatError::Singular);
    }

    #[test]
    fn left_kernel_is_annihilated() {
        let a = m(3, 3, 2, &[1, 2, 2, 1, 0, 0]);
        let k = a.kernel_basis();
        assert_eq!(k.dim(), 3 - a.rank());
        for row in k.basis().row_vecs() {
            assert!(a.vec_mul(&row).iter().all(|x| x.is_zero()));
        }
    }

    // Laplace expansion of det(tI - A) with polynomial entries.
    fn charpoly_oracle(a: &MatrixGF) -> Poly {
        let f = a.field().clone();
        let n = a.rows();
        let entries: Vec<Vec<Poly>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c = f.neg(a.get(i, j));
                        if i == j {
                            Poly::new(vec![c, FieldElement::ONE])
                        } else {
                            Poly::constant(c)
                        }
                    })
                    .collect()
            })
            .collect();
        fn det(m: &[Vec<Poly>], f: &FieldSpec) -> Poly {
            if m.len() == 1 {
                return m[0][0].clone();
            }
            let mut acc = Poly::zero();
            for j in 0..m.len() {
                let minor: Vec<Vec<Poly>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let term = m[0][j].mul(&det(&minor, f), f);
                acc = if j % 2 == 0 {
                    acc.add(&term, f)
                } else {
                    acc.sub(&term, f)
                };
            }
            acc
        }
        det(&entries, &f)
    }

    #[test]
    fn charpoly_matches_laplace_expansion() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for q in [2u64, 3, 4, 5] {
            let f = make_field(q).unwrap();
            for n in 1..=4 {
                for _ in 0..40 {
                    let a = MatrixGF::from_fn(&f, n, n, |_, _| f.elem(rng.gen_range(0..f.q())));
                    assert_eq!(a.charpoly(), charpoly_oracle(&a), "{a:?}");
                }
            }
        }
    }

    #[test]
    fn companion_has_its_polynomial_as_charpoly() {
        let f = make_field(2).unwrap();
        let p = Poly::from_indices(&[1, 1, 0, 1]);
        assert_eq!(MatrixGF::companion(&f, &p).charpoly(), p);
    }

    #[test]
    fn det_matches_invertibility() {
        let f = make_field(3).unwrap();
        let mut count = 0;
        for n in 0..81u32 {
            let idx: Vec<u32> = (0..4).map(|i| (n / 3u32.pow(i)) % 3).collect();
            let a = MatrixGF::from_indices(&f, 2, 2, &idx).unwrap();
            let d = a.det().unwrap();
            assert_eq!(!d.is_zero(), a.is_invertible());
            // ad - bc
            let expect = f.sub(f.mul(a.get(0, 0), a.get(1, 1)), f.mul(a.get(0, 1), a.get(1, 0)));
            assert_eq!(d, expect);
            count += a.is_invertible() as u32;
        }
        assert_eq!(count, 48);
    }
}
