use std::collections::{BTreeMap, HashSet, VecDeque};

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::exactq;
use crate::field::{monic_irreducibles, FieldElement, FieldSpec, Poly};
use crate::matspace::{stingray_profile, stingray_profile_unchecked, MatrixGF, StingrayProfile};

use super::{check_cap, CensusCaps, CensusError};

/// One conjugacy class of `e`-stingray elements, keyed by the
/// characteristic polynomial of the restriction to `im(g-1)`.
#[derive(Clone, Debug)]
pub struct StingrayClass {
    pub e: usize,
    pub charpoly: Poly,
    pub elements: Vec<MatrixGF>,
    pub profiles: Vec<StingrayProfile>,
}

/// `companion(a) ⊕ I_{d-e}`, a representative of the class with
/// restriction polynomial `a`.
pub fn stingray_representative(d: usize, field: &FieldSpec, a: &Poly) -> MatrixGF {
    let c = MatrixGF::companion(field, a);
    let e = c.rows();
    if e == d {
        c
    } else {
        MatrixGF::block_diag(&c, &MatrixGF::identity(field, d - e))
    }
}

/// Monic irreducibles of degree `e` other than `t` and `t - 1`: the possible
/// restriction polynomials of an `e`-stingray element.
pub fn stingray_polys(e: usize, field: &FieldSpec) -> Vec<Poly> {
    let t_minus_1 = Poly::new(vec![field.neg(FieldElement::ONE), FieldElement::ONE]);
    monic_irreducibles(e, field)
        .into_iter()
        .filter(|a| *a != t_minus_1 && !a.coeffs()[0].is_zero())
        .collect()
}

/// Transvections `I + λ E_ij` with `λ` running over the powers
/// `1, t, ..., t^{k-1}` of the field generator. These generate `SL_d(q)`.
pub fn sl_generators(d: usize, field: &FieldSpec) -> Vec<MatrixGF> {
    let mut gens = Vec::new();
    let mut lambdas = vec![FieldElement::ONE];
    for _ in 1..field.k() {
        let last = *lambdas.last().expect("nonempty");
        lambdas.push(field.mul(last, field.generator_t()));
    }
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            for &l in &lambdas {
                let mut m = MatrixGF::identity(field, d);
                m.set(i, j, l);
                gens.push(m);
            }
        }
    }
    gens
}

/// [`sl_generators`] plus `diag(ζ, 1, ..., 1)` for a primitive `ζ`.
pub fn gl_generators(d: usize, field: &FieldSpec) -> Vec<MatrixGF> {
    let mut gens = sl_generators(d, field);
    let mut m = MatrixGF::identity(field, d);
    m.set(0, 0, field.primitive_element());
    if !m.is_identity() {
        gens.push(m);
    }
    gens
}

/// Conjugation orbit of `g` under the group generated by `gens`, in
/// breadth-first order.
pub fn conjugation_orbit(g: &MatrixGF, gens: &[MatrixGF], cap: u64) -> Result<Vec<MatrixGF>, CensusError> {
    let pairs: Vec<(MatrixGF, MatrixGF)> = gens
        .iter()
        .map(|x| Ok((x.clone(), x.inverse()?)))
        .collect::<Result<_, CensusError>>()?;
    let mut seen: HashSet<MatrixGF> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(g.clone());
    queue.push_back(g.clone());
    while let Some(h) = queue.pop_front() {
        for (x, xi) in &pairs {
            let c = h.conjugate_by(x, xi);
            if seen.insert(c.clone()) {
                check_cap("conjugation orbit", seen.len() as u128, cap)?;
                queue.push_back(c);
            }
        }
        order.push(h);
    }
    Ok(order)
}

fn sweep_group(d: usize, e: usize, field: &FieldSpec) -> BTreeMap<Vec<u32>, StingrayClass> {
    let q = field.q() as u64;
    let n = d * d;
    let mut classes: BTreeMap<Vec<u32>, StingrayClass> = BTreeMap::new();
    for mut code in 0..q.pow(n as u32) {
        let data: Vec<FieldElement> = (0..n)
            .map(|_| {
                let x = field.elem((code % q) as u32);
                code /= q;
                x
            })
            .collect();
        let g = MatrixGF::from_elements(field, d, d, data).expect("consistent shape");
        if g.is_identity() || !g.is_invertible() {
            continue;
        }
        let Some(prof) = stingray_profile_unchecked(&g) else {
            continue;
        };
        if prof.e != e {
            continue;
        }
        let class = classes
            .entry(prof.restriction_charpoly.indices())
            .or_insert_with(|| StingrayClass {
                e,
                charpoly: prof.restriction_charpoly.clone(),
                elements: Vec::new(),
                profiles: Vec::new(),
            });
        class.elements.push(g);
        class.profiles.push(prof);
    }
    classes
}

/// All `e`-stingray elements of `GL_d(q)`, grouped into conjugacy classes.
///
/// Small groups are swept element by element; otherwise each class is built
/// as the conjugation orbit of `companion(a) ⊕ I`. Either way every class
/// size is checked against the closed form.
pub fn enumerate_stingray_elements(
    d: usize,
    field: &FieldSpec,
    e: usize,
    caps: &CensusCaps,
) -> Result<Vec<StingrayClass>, CensusError> {
    if e == 0 || e > d {
        return Err(CensusError::InvalidParams(format!(
            "need 1 <= e <= d, got e={e}, d={d}"
        )));
    }
    let q = field.q();
    let polys = stingray_polys(e, field);
    if polys.is_empty() {
        return Err(CensusError::EmptyClass { d, e, q });
    }
    let expected = exactq::class_size(d as u32, e as u32, q as u64)
        .to_u64()
        .ok_or_else(|| CensusError::InvalidParams("class size overflows".into()))?;
    let group = exactq::gl_order(d as u32, q as u64).to_u128().unwrap_or(u128::MAX);

    let classes: Vec<StingrayClass> = if group <= caps.group_sweep as u128 {
        sweep_group(d, e, field).into_values().collect()
    } else {
        check_cap("stingray class size", expected as u128, caps.class_orbit)?;
        let gens = gl_generators(d, field);
        polys
            .iter()
            .map(|a| {
                let rep = stingray_representative(d, field, a);
                let elements = conjugation_orbit(&rep, &gens, caps.class_orbit)?;
                let profiles = elements
                    .iter()
                    .map(|g| stingray_profile_unchecked(g).expect("conjugate of a stingray element"))
                    .collect();
                Ok(StingrayClass {
                    e,
                    charpoly: a.clone(),
                    elements,
                    profiles,
                })
            })
            .collect::<Result<_, CensusError>>()?
    };
    if classes.len() != polys.len() {
        return Err(CensusError::Mismatch(format!(
            "GL_{d}({q}): found {} classes of {e}-stingray elements, expected {}",
            classes.len(),
            polys.len()
        )));
    }
    for c in &classes {
        if c.elements.len() as u64 != expected {
            return Err(CensusError::Mismatch(format!(
                "GL_{d}({q}) class {}: {} elements, formula {expected}",
                c.charpoly,
                c.elements.len()
            )));
        }
    }
    Ok(classes)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassIndependence {
    pub d: usize,
    pub q: u32,
    pub sl_orbit: u64,
    pub gl_orbit: u64,
    /// Closed-form class size when the representative is a stingray element.
    pub class_size: Option<u64>,
    pub equal: bool,
}

/// Compares the conjugation orbits of `rep` under `SL_d(q)` and `GL_d(q)`.
pub fn verify_class_independence(rep: &MatrixGF, caps: &CensusCaps) -> Result<ClassIndependence, CensusError> {
    let field = rep.field().clone();
    let d = rep.rows();
    if field.q() == 2 {
        return Err(CensusError::TrivialQuotient { q: 2 });
    }
    let profile = stingray_profile(rep)?;
    let sl = conjugation_orbit(rep, &sl_generators(d, &field), caps.class_orbit)?.len() as u64;
    let gl = conjugation_orbit(rep, &gl_generators(d, &field), caps.class_orbit)?.len() as u64;
    let class_size = profile.map(|p| {
        exactq::class_size(d as u32, p.e as u32, field.q() as u64)
            .to_u64()
            .expect("small class")
    });
    Ok(ClassIndependence {
        d,
        q: field.q(),
        sl_orbit: sl,
        gl_orbit: gl,
        class_size,
        equal: sl == gl && class_size.is_none_or(|c| c == gl),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    #[test]
    fn gl3_2_quadratic_class() {
        let f = make_field(2).unwrap();
        let classes = enumerate_stingray_elements(3, &f, 2, &CensusCaps::default()).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].elements.len(), 56);
        assert_eq!(classes[0].charpoly, Poly::from_indices(&[1, 1, 1]));
    }

    #[test]
    fn no_one_stingray_over_gf2() {
        let f = make_field(2).unwrap();
        assert!(matches!(
            enumerate_stingray_elements(3, &f, 1, &CensusCaps::default()),
            Err(CensusError::EmptyClass { .. })
        ));
    }

    #[test]
    fn gl3_3_linear_class() {
        let f = make_field(3).unwrap();
        let classes = enumerate_stingray_elements(3, &f, 1, &CensusCaps::default()).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].elements.len(), 117);
        assert_eq!(classes[0].charpoly, Poly::from_indices(&[1, 1]));
    }

    #[test]
    fn orbit_construction_matches_sweep() {
        let f = make_field(2).unwrap();
        let mut caps = CensusCaps::default();
        let swept = enumerate_stingray_elements(3, &f, 2, &caps).unwrap();
        caps.group_sweep = 0;
        let orbit = enumerate_stingray_elements(3, &f, 2, &caps).unwrap();
        let a: HashSet<_> = swept[0].elements.iter().cloned().collect();
        let b: HashSet<_> = orbit[0].elements.iter().cloned().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn class_independence_examples() {
        let f = make_field(3).unwrap();
        let caps = CensusCaps::default();
        let rep = stingray_representative(3, &f, &Poly::from_indices(&[1, 0, 1]));
        let r = verify_class_independence(&rep, &caps).unwrap();
        assert_eq!((r.sl_orbit, r.gl_orbit, r.class_size), (702, 702, Some(702)));
        let diag = MatrixGF::from_indices(&f, 2, 2, &[2, 0, 0, 1]).unwrap();
        let r = verify_class_independence(&diag, &caps).unwrap();
        assert_eq!((r.sl_orbit, r.gl_orbit), (12, 12));
        let f2 = make_field(2).unwrap();
        let rep2 = stingray_representative(3, &f2, &Poly::from_indices(&[1, 1, 1]));
        assert!(matches!(
            verify_class_independence(&rep2, &caps),
            Err(CensusError::TrivialQuotient { .. })
        ));
    }
}
