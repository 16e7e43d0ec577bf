use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::exactq::{self, KneserParams};
use crate::field::make_field;
use crate::matspace::{is_irreducible_group, MatrixGF, SpinCaps, Subspace};

use super::{check_cap, enumerate_stingray_elements, CensusCaps, CensusError, StingrayClass};

#[derive(Clone, Debug, Serialize)]
pub struct ClassSummary {
    /// Restriction polynomial as coefficient indices, constant term first.
    pub charpoly: String,
    pub size: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassPairStats {
    pub charpoly1: String,
    pub charpoly2: String,
    pub pairs: u64,
    pub duos: u64,
    pub irreducible: u64,
    /// Number of distinct `(F1, U1, U2, F2)` images of duos.
    pub distinct_images: u64,
    /// Fibre size -> number of images with that many duo preimages.
    pub fibre_histogram: BTreeMap<u64, u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DuoCensus {
    pub d: usize,
    pub q: u32,
    pub e1: usize,
    pub e2: usize,
    pub classes1: Vec<ClassSummary>,
    pub classes2: Vec<ClassSummary>,
    pub total_pairs: u64,
    pub non_duo: u64,
    pub reducible_duo: u64,
    pub irreducible_duo: u64,
    pub per_class_pair: Vec<ClassPairStats>,
    /// Pairs whose classification was rechecked by spinning.
    pub spin_checked: u64,
    pub spin_mismatches: u64,
    /// Pairs found irreducible by spinning that are not duos.
    pub irreducible_non_duo: u64,
    pub wall_ms: u128,
}

impl DuoCensus {
    pub fn duos(&self) -> u64 {
        self.reducible_duo + self.irreducible_duo
    }

    pub fn duo_fraction(&self) -> BigRational {
        BigRational::new(BigInt::from(self.duos()), BigInt::from(self.total_pairs))
    }

    /// Irreducible duos over all duos, pooled across class pairs.
    pub fn irreducible_proportion(&self) -> Option<BigRational> {
        (self.duos() > 0).then(|| BigRational::new(BigInt::from(self.irreducible_duo), BigInt::from(self.duos())))
    }
}

/// Assigns small integer ids to subspaces.
#[derive(Default)]
struct Interner {
    ids: HashMap<Subspace, u32>,
}

impl Interner {
    fn id(&mut self, s: &Subspace) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(s.clone()).or_insert(next)
    }
}

struct Side<'a> {
    /// (class index, image id, fixed id, element)
    items: Vec<(usize, u32, u32, &'a MatrixGF)>,
}

fn side<'a>(classes: &'a [StingrayClass], interner: &mut Interner) -> Side<'a> {
    let mut items = Vec::new();
    for (ci, c) in classes.iter().enumerate() {
        for (g, p) in c.elements.iter().zip(&c.profiles) {
            items.push((ci, interner.id(&p.image), interner.id(&p.fixed), g));
        }
    }
    Side { items }
}

/// Dense table of "meet trivially" between two id sets.
struct MeetTable {
    row: HashMap<u32, usize>,
    col: HashMap<u32, usize>,
    bits: Vec<bool>,
}

impl MeetTable {
    fn build(left: &[(u32, &Subspace)], right: &[(u32, &Subspace)]) -> Result<MeetTable, CensusError> {
        let mut row = HashMap::new();
        let mut col = HashMap::new();
        let mut ls = Vec::new();
        let mut rs = Vec::new();
        for (id, s) in left {
            if !row.contains_key(id) {
                row.insert(*id, ls.len());
                ls.push(*s);
            }
        }
        for (id, s) in right {
            if !col.contains_key(id) {
                col.insert(*id, rs.len());
                rs.push(*s);
            }
        }
        let mut bits = Vec::with_capacity(ls.len() * rs.len());
        for a in &ls {
            for b in &rs {
                bits.push(a.meets_trivially(b)?);
            }
        }
        Ok(MeetTable { row, col, bits })
    }

    fn get(&self, a: u32, b: u32) -> bool {
        self.bits[self.row[&a] * self.col.len() + self.col[&b]]
    }
}

type Image = (u32, u32, u32, u32);

#[derive(Default)]
struct Partial {
    non_duo: u64,
    reducible: u64,
    irreducible: u64,
    /// per class pair: (pairs, duos, irreducible)
    cells: HashMap<(usize, usize), (u64, u64, u64)>,
    images: HashMap<(usize, usize), HashMap<Image, u64>>,
    spin_checked: u64,
    spin_mismatches: u64,
    irreducible_non_duo: u64,
    errors: Vec<String>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.non_duo += other.non_duo;
        self.reducible += other.reducible;
        self.irreducible += other.irreducible;
        for (k, v) in other.cells {
            let e = self.cells.entry(k).or_default();
            e.0 += v.0;
            e.1 += v.1;
            e.2 += v.2;
        }
        for (k, m) in other.images {
            let dst = self.images.entry(k).or_default();
            for (img, n) in m {
                *dst.entry(img).or_default() += n;
            }
        }
        self.spin_checked += other.spin_checked;
        self.spin_mismatches += other.spin_mismatches;
        self.irreducible_non_duo += other.irreducible_non_duo;
        self.errors.extend(other.errors);
        self
    }
}

/// Classifies every ordered pair `(g1, g2)` of an `e1`- and an `e2`-stingray
/// element of `GL_d(q)` as non-duo, reducible duo or irreducible duo.
///
/// Every `caps.spin_stride`-th pair is rechecked with the spinning test.
/// When `d = e1 + e2` the duos of each class pair are also grouped by their
/// 3-walk image `(F1, U1, U2, F2)`.
pub fn exhaustive_duo_census(
    d: usize,
    q: u64,
    e1: usize,
    e2: usize,
    caps: &CensusCaps,
) -> Result<DuoCensus, CensusError> {
    let start = Instant::now();
    let field = make_field(q)?;
    let classes1 = enumerate_stingray_elements(d, &field, e1, caps)?;
    let classes2 = enumerate_stingray_elements(d, &field, e2, caps)?;
    let n1: usize = classes1.iter().map(|c| c.elements.len()).sum();
    let n2: usize = classes2.iter().map(|c| c.elements.len()).sum();
    check_cap("duo census pairs", (n1 as u128) * (n2 as u128), caps.duo_pairs)?;

    let mut interner = Interner::default();
    let s1 = side(&classes1, &mut interner);
    let s2 = side(&classes2, &mut interner);
    let profiles1: Vec<_> = classes1.iter().flat_map(|c| c.profiles.iter()).collect();
    let profiles2: Vec<_> = classes2.iter().flat_map(|c| c.profiles.iter()).collect();
    let images1: Vec<(u32, &Subspace)> = s1
        .items
        .iter()
        .zip(&profiles1)
        .map(|(it, p)| (it.1, &p.image))
        .collect();
    let images2: Vec<(u32, &Subspace)> = s2
        .items
        .iter()
        .zip(&profiles2)
        .map(|(it, p)| (it.1, &p.image))
        .collect();
    let fixed1: Vec<(u32, &Subspace)> = s1
        .items
        .iter()
        .zip(&profiles1)
        .map(|(it, p)| (it.2, &p.fixed))
        .collect();
    let fixed2: Vec<(u32, &Subspace)> = s2
        .items
        .iter()
        .zip(&profiles2)
        .map(|(it, p)| (it.2, &p.fixed))
        .collect();
    let uu = MeetTable::build(&images1, &images2)?;
    let ff = MeetTable::build(&fixed1, &fixed2)?;
    let full = e1 + e2 == d;
    let stride = caps.spin_stride.max(1);
    let spin_caps = SpinCaps::default();

    let partial = (0..n1)
        .into_par_iter()
        .fold(Partial::default, |mut acc, i| {
            let (c1, u1, f1, g1) = s1.items[i];
            for (j, &(c2, u2, f2, g2)) in s2.items.iter().enumerate() {
                let duo = uu.get(u1, u2);
                let irreducible = duo && full && ff.get(f1, f2) && u1 != f2 && u2 != f1;
                let cell = acc.cells.entry((c1, c2)).or_default();
                cell.0 += 1;
                if duo {
                    cell.1 += 1;
                    if irreducible {
                        cell.2 += 1;
                        acc.irreducible += 1;
                    } else {
                        acc.reducible += 1;
                    }
                    if full {
                        *acc.images
                            .entry((c1, c2))
                            .or_default()
                            .entry((f1, u1, u2, f2))
                            .or_default() += 1;
                    }
                } else {
                    acc.non_duo += 1;
                }
                let index = (i * n2 + j) as u64;
                if index.is_multiple_of(stride) {
                    match is_irreducible_group(&[g1.clone(), g2.clone()], spin_caps) {
                        Ok(spun) => {
                            acc.spin_checked += 1;
                            if spun != irreducible {
                                acc.spin_mismatches += 1;
                            }
                            if spun && !duo {
                                acc.irreducible_non_duo += 1;
                            }
                        }
                        Err(e) => acc.errors.push(e.to_string()),
                    }
                }
            }
            acc
        })
        .reduce(Partial::default, Partial::merge);

    if let Some(e) = partial.errors.first() {
        return Err(CensusError::InvalidParams(format!("spin recheck failed: {e}")));
    }

    let summaries = |classes: &[StingrayClass]| -> Vec<ClassSummary> {
        classes
            .iter()
            .map(|c| ClassSummary {
                charpoly: c.charpoly.to_string(),
                size: c.elements.len() as u64,
            })
            .collect()
    };
    let mut per_class_pair = Vec::new();
    for (a, ca) in classes1.iter().enumerate() {
        for (b, cb) in classes2.iter().enumerate() {
            let (pairs, duos, irreducible) = partial.cells.get(&(a, b)).copied().unwrap_or_default();
            let mut fibre_histogram = BTreeMap::new();
            let mut distinct_images = 0;
            if let Some(m) = partial.images.get(&(a, b)) {
                distinct_images = m.len() as u64;
                for &n in m.values() {
                    *fibre_histogram.entry(n).or_default() += 1;
                }
            }
            per_class_pair.push(ClassPairStats {
                charpoly1: ca.charpoly.to_string(),
                charpoly2: cb.charpoly.to_string(),
                pairs,
                duos,
                irreducible,
                distinct_images,
                fibre_histogram,
            });
        }
    }

    Ok(DuoCensus {
        d,
        q: field.q(),
        e1,
        e2,
        classes1: summaries(&classes1),
        classes2: summaries(&classes2),
        total_pairs: (n1 * n2) as u64,
        non_duo: partial.non_duo,
        reducible_duo: partial.reducible,
        irreducible_duo: partial.irreducible,
        per_class_pair,
        spin_checked: partial.spin_checked,
        spin_mismatches: partial.spin_mismatches,
        irreducible_non_duo: partial.irreducible_non_duo,
        wall_ms: start.elapsed().as_millis(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FibreCheck {
    pub expected_fibre: u64,
    pub expected_images: u64,
    /// Every image in every class pair has exactly `expected_fibre` preimages.
    pub constant: bool,
    /// Every class pair hits exactly `expected_images` distinct 3-walks.
    pub surjective: bool,
}

/// Checks the fibre sizes and image counts recorded by a census against
/// the closed forms. Needs `d = e1 + e2`.
pub fn verify_fibre_constancy(census: &DuoCensus) -> Result<FibreCheck, CensusError> {
    if census.e1 + census.e2 != census.d {
        return Err(CensusError::InvalidParams("fibre check needs d = e1 + e2".into()));
    }
    let (a, b) = (census.e1.max(census.e2) as u32, census.e1.min(census.e2) as u32);
    let q = census.q as u64;
    let expected_fibre = exactq::duo_fibre(a, b, q).to_u64().expect("small");
    let expected_images = exactq::walk3_count(&KneserParams::new(a, b, q)?)
        .to_u64()
        .expect("small");
    let constant = census
        .per_class_pair
        .iter()
        .all(|c| c.fibre_histogram.keys().all(|&k| k == expected_fibre));
    let surjective = census
        .per_class_pair
        .iter()
        .all(|c| c.distinct_images == expected_images);
    Ok(FibreCheck {
        expected_fibre,
        expected_images,
        constant,
        surjective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl3_3_two_one() {
        let c = exhaustive_duo_census(3, 3, 2, 1, &CensusCaps::default()).unwrap();
        assert_eq!(c.classes1.len(), 3);
        assert!(c.classes1.iter().all(|s| s.size == 702));
        assert_eq!(c.classes2[0].size, 117);
        assert_eq!(
            c.irreducible_proportion().unwrap(),
            BigRational::new(40.into(), 81.into())
        );
        for cp in &c.per_class_pair {
            assert_eq!(
                BigRational::new(cp.irreducible.into(), cp.duos.into()),
                BigRational::new(40.into(), 81.into())
            );
        }
        assert_eq!(c.spin_mismatches, 0);
        assert!(c.spin_checked > 0);
        let f = verify_fibre_constancy(&c).unwrap();
        assert_eq!(f.expected_fibre, 6);
        assert!(f.constant && f.surjective);
    }

    #[test]
    fn empty_class_over_gf2() {
        assert!(matches!(
            exhaustive_duo_census(3, 2, 1, 1, &CensusCaps::default()),
            Err(CensusError::EmptyClass { .. })
        ));
    }
}
