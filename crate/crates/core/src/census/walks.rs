use std::time::Instant;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::exactq::{self, KneserParams};
use crate::field::{make_field, FieldElement, FieldSpec};
use crate::matspace::{enumerate_subspaces, subspace_count, MatrixGF, Subspace};

use super::{check_cap, CensusCaps, CensusError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Graph,
    MatrixAb,
}

/// Which vertex class a 3-walk starts in: `W2 = X2 × X1 × X2 × X1` or the
/// reversed `W1 = X1 × X2 × X1 × X2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkSide {
    W1,
    W2,
}

#[derive(Clone, Debug, Serialize)]
pub struct WalkCensus {
    pub params: KneserParams,
    pub walks3: u64,
    pub arcs3: u64,
    pub closed_walks3: u64,
    pub closed_arcs3: u64,
    pub oracle: OracleKind,
    pub side: WalkSide,
    pub wall_ms: u128,
}

impl WalkCensus {
    /// Differences from the exact formulas, one line each; empty when all agree.
    pub fn mismatches(&self) -> Vec<String> {
        let p = &self.params;
        let checks = [
            ("walk3", self.walks3, exactq::walk3_count(p)),
            ("arc3", self.arcs3, exactq::arc3_count(p)),
            ("closed_walk3", self.closed_walks3, exactq::closed_walk3_count(p)),
            ("closed_arc3", self.closed_arcs3, exactq::closed_arc3_count(p)),
        ];
        checks
            .into_iter()
            .filter(|(_, got, want)| BigInt::from(*got) != *want)
            .map(|(name, got, want)| format!("{name}({},{},{}): census {got}, formula {want}", p.e1, p.e2, p.q))
            .collect()
    }
}

fn all_subspaces(d: usize, e: usize, field: &FieldSpec) -> Result<Vec<Subspace>, CensusError> {
    Ok(enumerate_subspaces(d, e, field, u128::MAX)?.collect())
}

/// Counts 3-walks, 3-arcs and their closed versions by enumerating every
/// vertex of the graph and iterating over all walks.
pub fn graph_walk_census(p: &KneserParams, caps: &CensusCaps, side: WalkSide) -> Result<WalkCensus, CensusError> {
    let start = Instant::now();
    let field = make_field(p.q)?;
    let d = p.d() as usize;
    let (e1, e2) = (p.e1 as usize, p.e2 as usize);
    let n1 = subspace_count(d, e1, p.q).unwrap_or(u128::MAX);
    let n2 = subspace_count(d, e2, p.q).unwrap_or(u128::MAX);
    check_cap("graph census edge checks", n1.saturating_mul(n2), caps.edge_checks)?;

    let x1 = all_subspaces(d, e1, &field)?;
    let x2 = all_subspaces(d, e2, &field)?;
    // `a` is the class the walk starts in, `b` the other one.
    let (xa, xb) = match side {
        WalkSide::W2 => (&x2, &x1),
        WalkSide::W1 => (&x1, &x2),
    };
    let (na, nb) = (xa.len(), xb.len());
    let words = nb.div_ceil(64);
    let mut adj_ab: Vec<Vec<u32>> = vec![Vec::new(); na];
    let mut adj_ba: Vec<Vec<u32>> = vec![Vec::new(); nb];
    let mut bits = vec![0u64; na * words];
    for (i, s) in xa.iter().enumerate() {
        for (j, t) in xb.iter().enumerate() {
            if s.meets_trivially(t)? {
                adj_ab[i].push(j as u32);
                adj_ba[j].push(i as u32);
                bits[i * words + j / 64] |= 1 << (j % 64);
            }
        }
    }
    let adjacent = |a: usize, b: usize| bits[a * words + b / 64] >> (b % 64) & 1 == 1;

    let (mut walks, mut arcs, mut closed, mut closed_arcs) = (0u64, 0u64, 0u64, 0u64);
    for s0 in 0..na {
        for &s1 in &adj_ab[s0] {
            for &s2 in &adj_ba[s1 as usize] {
                for &s3 in &adj_ab[s2 as usize] {
                    let arc = s0 != s2 as usize && s1 != s3;
                    let cl = adjacent(s0, s3 as usize);
                    walks += 1;
                    arcs += arc as u64;
                    closed += cl as u64;
                    closed_arcs += (arc && cl) as u64;
                }
            }
        }
    }
    Ok(WalkCensus {
        params: *p,
        walks3: walks,
        arcs3: arcs,
        closed_walks3: closed,
        closed_arcs3: closed_arcs,
        oracle: OracleKind::Graph,
        side,
        wall_ms: start.elapsed().as_millis(),
    })
}

/// All matrices of the given shape, by counting in base `q`.
fn all_matrices(field: &FieldSpec, rows: usize, cols: usize) -> impl Iterator<Item = MatrixGF> + '_ {
    let q = field.q() as u64;
    let n = rows * cols;
    (0..q.pow(n as u32)).map(move |mut code| {
        let data: Vec<FieldElement> = (0..n)
            .map(|_| {
                let x = field.elem((code % q) as u32);
                code /= q;
                x
            })
            .collect();
        MatrixGF::from_elements(field, rows, cols, data).expect("shape is consistent")
    })
}

/// Counts closed 3-walks and 3-arcs through one fixed frame
/// `U1 = rowspace[I 0]`, `U2 = rowspace[0 I]`, then scales by the number of
/// frames `q^{2 e1 e2} ξ`.
///
/// With `F1 = rowspace[A I]` and `F2 = rowspace[I B]` the walk closes iff
/// `I - AB` is invertible, and is an arc iff `A ≠ 0` and `B ≠ 0`.
pub fn ab_walk_census(p: &KneserParams, caps: &CensusCaps) -> Result<WalkCensus, CensusError> {
    let start = Instant::now();
    let field = make_field(p.q)?;
    let (e1, e2) = (p.e1 as usize, p.e2 as usize);
    let per_side = (p.q as u128).checked_pow((e1 * e2) as u32).unwrap_or(u128::MAX);
    check_cap("(A, B) pairs", per_side.saturating_mul(per_side), caps.ab_pairs)?;

    let a_list: Vec<MatrixGF> = all_matrices(&field, e2, e1).collect();
    let b_list: Vec<MatrixGF> = all_matrices(&field, e1, e2).collect();
    let ident = MatrixGF::identity(&field, e2);
    let (mut closed_hits, mut closed_arc_hits) = (0u64, 0u64);
    for a in &a_list {
        for b in &b_list {
            if ident.sub(&a.mul(b)).is_invertible() {
                closed_hits += 1;
                if !a.is_zero() && !b.is_zero() {
                    closed_arc_hits += 1;
                }
            }
        }
    }
    let frames = exactq::expect_integer(
        exactq::q_pow(p.q, 2 * (e1 * e2) as i64) * exactq::xi(p.e1, p.e2, p.q),
        "frame count",
    );
    let frames = frames
        .to_u64()
        .ok_or_else(|| CensusError::InvalidParams("frame count overflows".into()))?;
    let per = per_side as u64;
    Ok(WalkCensus {
        params: *p,
        walks3: frames * per * per,
        arcs3: frames * (per - 1) * (per - 1),
        closed_walks3: frames * closed_hits,
        closed_arcs3: frames * closed_arc_hits,
        oracle: OracleKind::MatrixAb,
        side: WalkSide::W2,
        wall_ms: start.elapsed().as_millis(),
    })
}

/// Histogram of ranks over all `e2 × e1` matrices; entry `k` counts rank `k`.
pub fn rank_census(e2: u32, e1: u32, q: u64, caps: &CensusCaps) -> Result<Vec<u64>, CensusError> {
    let field = make_field(q)?;
    let total = (q as u128).checked_pow(e1 * e2).unwrap_or(u128::MAX);
    check_cap("rank census matrices", total, caps.rank_matrices)?;
    let mut hist = vec![0u64; e1.min(e2) as usize + 1];
    for m in all_matrices(&field, e2 as usize, e1 as usize) {
        hist[m.rank()] += 1;
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kp(e1: u32, e2: u32, q: u64) -> KneserParams {
        KneserParams::new(e1, e2, q).unwrap()
    }

    #[test]
    fn lines_in_gf2_squared() {
        let c = graph_walk_census(&kp(1, 1, 2), &CensusCaps::default(), WalkSide::W2).unwrap();
        assert_eq!((c.walks3, c.arcs3, c.closed_walks3, c.closed_arcs3), (24, 6, 18, 0));
        let c = ab_walk_census(&kp(1, 1, 2), &CensusCaps::default()).unwrap();
        assert_eq!((c.walks3, c.arcs3, c.closed_walks3, c.closed_arcs3), (24, 6, 18, 0));
    }

    #[test]
    fn small_censuses_match_formulas() {
        for (e1, e2, q) in [(1, 1, 3), (2, 1, 2), (2, 1, 3)] {
            let p = kp(e1, e2, q);
            for side in [WalkSide::W1, WalkSide::W2] {
                let c = graph_walk_census(&p, &CensusCaps::default(), side).unwrap();
                assert!(c.mismatches().is_empty(), "{:?}", c.mismatches());
            }
            let c = ab_walk_census(&p, &CensusCaps::default()).unwrap();
            assert!(c.mismatches().is_empty(), "{:?}", c.mismatches());
        }
    }

    #[test]
    fn rank_histograms() {
        let caps = CensusCaps::default();
        assert_eq!(rank_census(2, 2, 2, &caps).unwrap(), vec![1, 9, 6]);
        assert_eq!(rank_census(1, 3, 2, &caps).unwrap(), vec![1, 7]);
    }

    #[test]
    fn caps_are_enforced() {
        let caps = CensusCaps::with_override(10);
        assert!(matches!(
            graph_walk_census(&kp(2, 2, 2), &caps, WalkSide::W2),
            Err(CensusError::EnumerationTooLarge { .. })
        ));
        assert!(matches!(
            ab_walk_census(&kp(2, 2, 2), &caps),
            Err(CensusError::EnumerationTooLarge { .. })
        ));
    }
}
