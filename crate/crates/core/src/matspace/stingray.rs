use crate::field::{poly_is_irreducible, Poly};

use super::{MatError, MatrixGF, Subspace};

/// The data attached to a stingray element `g`: `U = im(g-1)`, `F = ker(g-1)`
/// and the characteristic polynomial of `g` restricted to `U`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StingrayProfile {
    pub e: usize,
    pub image: Subspace,
    pub fixed: Subspace,
    pub restriction_charpoly: Poly,
}

/// Matrix of `g` restricted to the `g`-invariant subspace `u`, in the
/// coordinates of `u`'s RREF basis.
pub fn restriction_matrix(g: &MatrixGF, u: &Subspace) -> MatrixGF {
    let e = u.dim();
    let images: Vec<_> = u.basis().row_vecs().iter().map(|r| g.vec_mul(r)).collect();
    MatrixGF::from_fn(g.field(), e, e, |i, j| images[i][u.pivots()[j]])
}

fn check_group_element(g: &MatrixGF) -> Result<(), MatError> {
    if !g.is_square() {
        return Err(MatError::NotSquare {
            rows: g.rows(),
            cols: g.cols(),
        });
    }
    if !g.is_invertible() {
        return Err(MatError::NotInvertible);
    }
    Ok(())
}

/// Returns the profile of `g` if `g` acts irreducibly and non-trivially on
/// `im(g-1)`, and `None` otherwise.
pub fn stingray_profile(g: &MatrixGF) -> Result<Option<StingrayProfile>, MatError> {
    check_group_element(g)?;
    if g.is_identity() {
        return Err(MatError::IdentityInput);
    }
    Ok(stingray_profile_unchecked(g))
}

/// As [`stingray_profile`] but skips the invertibility check, for callers
/// that already know `g` is a nonidentity group element.
pub fn stingray_profile_unchecked(g: &MatrixGF) -> Option<StingrayProfile> {
    let gm = g.minus_identity();
    let image = gm.row_space();
    let e = image.dim();
    if e == 0 {
        return None;
    }
    let r = restriction_matrix(g, &image);
    // For e >= 2 an irreducible charpoly already rules out the identity, but
    // both conditions are tested independently.
    if r.is_identity() {
        return None;
    }
    let chi = r.charpoly();
    if !poly_is_irreducible(&chi, g.field()).unwrap_or(false) {
        return None;
    }
    let fixed = gm.kernel_basis();
    Some(StingrayProfile {
        e,
        image,
        fixed,
        restriction_charpoly: chi,
    })
}

/// Duo test on precomputed profiles: the images meet trivially.
pub fn is_duo_profiles(p1: &StingrayProfile, p2: &StingrayProfile) -> bool {
    p1.image.meets_trivially(&p2.image).unwrap_or(false)
}

#[derive(Clone, Debug)]
pub struct DuoCheck {
    pub first: Option<StingrayProfile>,
    pub second: Option<StingrayProfile>,
    pub is_duo: bool,
}

pub fn is_duo(g1: &MatrixGF, g2: &MatrixGF) -> Result<DuoCheck, MatError> {
    if g1.rows() != g2.rows() {
        return Err(MatError::AmbientMismatch {
            left: g1.rows(),
            right: g2.rows(),
        });
    }
    let first = stingray_profile(g1)?;
    let second = stingray_profile(g2)?;
    let is_duo = match (&first, &second) {
        (Some(a), Some(b)) => is_duo_profiles(a, b),
        _ => false,
    };
    Ok(DuoCheck { first, second, is_duo })
}

/// Irreducibility criterion for the group generated by a stingray duo:
/// (a) `V = U1 ⊕ U2`, (b) `F1 ∩ F2 = 0`, (c) `U1 ≠ F2` and `U2 ≠ F1`.
/// Assumes the profiles form a duo.
pub fn l1_criterion_profiles(p1: &StingrayProfile, p2: &StingrayProfile) -> bool {
    let d = p1.image.ambient();
    let direct_sum = p1.e + p2.e == d;
    if !direct_sum {
        return false;
    }
    let fixed_trivial = p1.fixed.meets_trivially(&p2.fixed).unwrap_or(false);
    fixed_trivial && p1.image != p2.fixed && p2.image != p1.fixed
}

pub fn l1_criterion(g1: &MatrixGF, g2: &MatrixGF) -> Result<bool, MatError> {
    let check = is_duo(g1, g2)?;
    match (check.is_duo, check.first, check.second) {
        (true, Some(a), Some(b)) => Ok(l1_criterion_profiles(&a, &b)),
        _ => Err(MatError::NotADuo),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    #[test]
    fn companion_plus_identity() {
        let f = make_field(2).unwrap();
        let c = MatrixGF::companion(&f, &Poly::from_indices(&[1, 1, 1]));
        let g = MatrixGF::block_diag(&c, &MatrixGF::identity(&f, 1));
        let p = stingray_profile(&g).unwrap().unwrap();
        assert_eq!(p.e, 2);
        assert_eq!(p.restriction_charpoly, Poly::from_indices(&[1, 1, 1]));
        assert_eq!(p.image, Subspace::coordinate(&f, 3, &[0, 1]));
        assert_eq!(p.fixed, Subspace::coordinate(&f, 3, &[2]));
    }

    #[test]
    fn transvection_is_not_stingray() {
        let f = make_field(2).unwrap();
        let g = MatrixGF::from_indices(&f, 2, 2, &[1, 1, 0, 1]).unwrap();
        let p = stingray_profile(&g).unwrap();
        assert!(p.is_none());
        // image of g - 1 is the span of the second basis vector
        assert_eq!(g.minus_identity().row_space(), Subspace::coordinate(&f, 2, &[1]));
    }

    #[test]
    fn diagonal_scalar_on_a_line() {
        let f = make_field(3).unwrap();
        let g = MatrixGF::from_indices(&f, 2, 2, &[2, 0, 0, 1]).unwrap();
        let p = stingray_profile(&g).unwrap().unwrap();
        assert_eq!(p.e, 1);
        // t - 2 = t + 1 over GF(3)
        assert_eq!(p.restriction_charpoly, Poly::from_indices(&[1, 1]));
    }

    #[test]
    fn errors() {
        let f = make_field(2).unwrap();
        assert_eq!(
            stingray_profile(&MatrixGF::identity(&f, 2)).unwrap_err(),
            MatError::IdentityInput
        );
        let sing = MatrixGF::from_indices(&f, 2, 2, &[1, 1, 1, 1]).unwrap();
        assert_eq!(stingray_profile(&sing).unwrap_err(), MatError::NotInvertible);
    }

    #[test]
    fn block_diagonal_duo_is_reducible() {
        let f = make_field(2).unwrap();
        let c = MatrixGF::companion(&f, &Poly::from_indices(&[1, 1, 1]));
        let i2 = MatrixGF::identity(&f, 2);
        let g1 = MatrixGF::block_diag(&c, &i2);
        let g2 = MatrixGF::block_diag(&i2, &c);
        assert!(is_duo(&g1, &g2).unwrap().is_duo);
        assert!(!is_duo(&g1, &g1).unwrap().is_duo);
        assert!(!l1_criterion(&g1, &g2).unwrap());
        assert_eq!(l1_criterion(&g1, &g1).unwrap_err(), MatError::NotADuo);
    }
}
