//! The verification battery behind the `verify` command: exact identities,
//! brute-force oracles against the formulas, bound grids and, optionally,
//! the Monte Carlo battery.

use std::time::Instant;

use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use serde::Serialize;

use crate::census::{
    ab_walk_census, exhaustive_duo_census, graph_walk_census, rank_census, stingray_representative,
    verify_class_independence, verify_fibre_constancy, CensusCaps, CensusError, WalkSide,
};
use crate::exactq::{self, KneserParams};
use crate::field::{make_field, Poly};
use crate::matspace::{is_irreducible_group, l1_criterion, MatrixGF, SpinCaps};
use crate::sampler::{run_battery, standard_battery, worker_rng, DuoSampler, ExperimentKind};

/// Deliberate formula errors, used to check that the battery notices them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Adds one to the exponent of `q` in the rank-count formula.
    RankMatrixCount,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub max_e: u32,
    pub max_q: u64,
    pub monte_carlo: bool,
    pub mc_scale: f64,
    pub workers: usize,
    pub equivalence_trials: usize,
    pub caps: CensusCaps,
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            max_e: 8,
            max_q: 16,
            monte_carlo: false,
            mc_scale: 1.0,
            workers: 1,
            equivalence_trials: 10_000,
            caps: CensusCaps::default(),
            fault: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: u64,
    pub skipped: u64,
    pub failures: Vec<String>,
    pub pass: bool,
    pub seconds: f64,
}

struct Check {
    name: &'static str,
    cases: u64,
    skipped: u64,
    failures: Vec<String>,
}

impl Check {
    fn new(name: &'static str) -> Check {
        Check {
            name,
            cases: 0,
            skipped: 0,
            failures: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(msg());
        }
    }

    fn error(&mut self, e: impl std::fmt::Display) {
        self.cases += 1;
        self.failures.push(e.to_string());
    }
}

fn kp(e1: u32, e2: u32, q: u64) -> KneserParams {
    KneserParams::new(e1, e2, q).expect("valid grid parameters")
}

fn grid(cfg: &VerifyConfig) -> impl Iterator<Item = KneserParams> + '_ {
    (1..=cfg.max_e).flat_map(move |e1| (1..=e1).flat_map(move |e2| (2..=cfg.max_q).map(move |q| kp(e1, e2, q))))
}

fn q_identity(cfg: &VerifyConfig) -> Check {
    let mut c = Check::new("q_identity_sum");
    for p in grid(cfg) {
        let s = exactq::q_identity_sum(&p);
        c.expect(s.is_one(), || {
            format!("({},{},{}): sum {s}, expected 1", p.e1, p.e2, p.q)
        });
    }
    c
}

fn walk_oracles(cfg: &VerifyConfig) -> Check {
    let mut c = Check::new("walk counts (graph and (A,B) oracles)");
    let params = [
        (1, 1, 2),
        (1, 1, 3),
        (1, 1, 4),
        (2, 1, 2),
        (2, 1, 3),
        (2, 2, 2),
        (3, 1, 2),
        (3, 2, 2),
        (2, 2, 3),
    ];
    for (e1, e2, q) in params {
        if e1 > cfg.max_e || q > cfg.max_q {
            continue;
        }
        let p = kp(e1, e2, q);
        for side in [WalkSide::W2, WalkSide::W1] {
            match graph_walk_census(&p, &cfg.caps, side) {
                Ok(w) => {
                    let m = w.mismatches();
                    c.expect(m.is_empty(), || format!("graph {side:?}: {}", m.join("; ")));
                }
                Err(e) => c.error(e),
            }
        }
        match ab_walk_census(&p, &cfg.caps) {
            Ok(w) => {
                let m = w.mismatches();
                c.expect(m.is_empty(), || format!("(A,B): {}", m.join("; ")));
            }
            Err(e) => c.error(e),
        }
        match exactq::proportion_p_checked(&p) {
            Ok(_) => c.expect(true, String::new),
            Err(e) => c.error(e),
        }
    }
    c
}

fn rank_formula(e2: u32, e1: u32, k: u32, q: u64, fault: Option<Fault>) -> BigRational {
    let exact = BigRational::from_integer(exactq::rank_matrix_count(e2, e1, k, q).expect("k in range"));
    match fault {
        Some(Fault::RankMatrixCount) => exact * BigRational::from_integer(q.into()),
        None => exact,
    }
}

fn rank_counts(cfg: &VerifyConfig) -> Check {
    let mut c = Check::new("rank_matrix_count");
    for q in [2u64, 3] {
        if q > cfg.max_q {
            continue;
        }
        for e1 in 1..=cfg.max_e.min(3) {
            for e2 in 1..=e1 {
                let hist = match rank_census(e2, e1, q, &cfg.caps) {
                    Ok(h) => h,
                    Err(e) => {
                        c.error(e);
                        continue;
                    }
                };
                for (k, &n) in hist.iter().enumerate() {
                    let want = rank_formula(e2, e1, k as u32, q, cfg.fault);
                    c.expect(BigRational::from_integer(n.into()) == want, || {
                        format!("rank_matrix_count({e2},{e1},{k},{q}): census {n}, formula {want}")
                    });
                    let stab = exactq::stabiliser_order(e2, e1, k as u32, q).expect("k in range");
                    c.expect(
                        want * BigRational::from_integer(stab)
                            == BigRational::from_integer(exactq::gl_order(e1, q) * exactq::gl_order(e2, q)),
                        || format!("orbit-stabiliser identity fails at ({e2},{e1},{k},{q})"),
                    );
                }
            }
        }
    }
    c
}

fn group_census(cfg: &VerifyConfig) -> Check {
    let mut c = Check::new("stingray duo census");
    for (d, q, e1, e2) in [(4usize, 2u64, 2usize, 2usize), (3, 3, 2, 1)] {
        if e1 as u32 > cfg.max_e || q > cfg.max_q {
            continue;
        }
        let census = match exhaustive_duo_census(d, q, e1, e2, &cfg.caps) {
            Ok(x) => x,
            Err(e) => {
                c.error(e);
                continue;
            }
        };
        let p = kp(e1 as u32, e2 as u32, q);
        let tag = format!("GL_{d}({q}) ({e1},{e2})");
        let duo_fraction = census.duo_fraction();
        c.expect(duo_fraction == exactq::duo_fraction(&p), || {
            format!(
                "{tag}: duo fraction {duo_fraction}, formula {}",
                exactq::duo_fraction(&p)
            )
        });
        let target = exactq::proportion_p(&p);
        let pooled = census.irreducible_proportion();
        c.expect(pooled.as_ref() == Some(&target), || {
            format!("{tag}: pooled proportion {pooled:?}, formula {target}")
        });
        for cp in &census.per_class_pair {
            let r = BigRational::new(cp.irreducible.into(), cp.duos.into());
            c.expect(r == target, || {
                format!("{tag} classes {} x {}: {r}", cp.charpoly1, cp.charpoly2)
            });
        }
        c.expect(census.spin_mismatches == 0 && census.irreducible_non_duo == 0, || {
            format!("{tag}: {} spin mismatches", census.spin_mismatches)
        });
        match verify_fibre_constancy(&census) {
            Ok(f) => c.expect(f.constant && f.surjective, || format!("{tag}: fibre check {f:?}")),
            Err(e) => c.error(e),
        }
    }
    // (3, 1, 1, 2) has no 1-stingray elements: must be reported, not counted.
    if cfg.max_q >= 2 {
        match exhaustive_duo_census(3, 2, 1, 1, &cfg.caps) {
            Err(CensusError::EmptyClass { .. }) => c.skipped += 1,
            other => c.error(format!(
                "GL_3(2) (1,1): expected EmptyClass, got {:?}",
                other.map(|x| x.total_pairs)
            )),
        }
    }
    c
}

fn class_independence(cfg: &VerifyConfig) -> Check {
    let mut c = Check::new("class independence (SL vs GL orbits)");
    if cfg.max_q < 3 {
        return c;
    }
    let f = make_field(3).expect("GF(3)");
    let reps = [
        stingray_representative(3, &f, &Poly::from_indices(&[1, 0, 1])),
        MatrixGF::from_indices(&f, 2, 2, &[2, 0, 0, 1]).expect("valid"),
    ];
    for rep in reps {
        match verify_class_independence(&rep, &cfg.caps) {
            Ok(r) => c.expect(r.equal, || format!("{r:?}")),
            Err(e) => c.error(e),
        }
    }
    c
}

fn criterion_equivalence(cfg: &VerifyConfig) -> Check {
    let mut c = Check::new("duo criterion vs spinning");
    for (i, (d, q)) in [(4usize, 2u64), (4, 3), (5, 2), (6, 2)].into_iter().enumerate() {
        if q > cfg.max_q || d as u32 > 2 * cfg.max_e {
            continue;
        }
        let field = make_field(q).expect("prime power");
        let emin = if q == 2 { 2 } else { 1 };
        let mut samplers = Vec::new();
        for e1 in emin..=d {
            for e2 in emin..=d - e1 {
                samplers.push(DuoSampler::new(d, &field, e1, e2).expect("nonempty classes"));
            }
        }
        let mut rng = worker_rng(11, i);
        let mut mismatches = 0;
        for _ in 0..cfg.equivalence_trials {
            let s = &samplers[rng.gen_range(0..samplers.len())];
            let (g1, _, g2, _) = s.draw(&mut rng);
            let l1 = l1_criterion(&g1, &g2);
            let spun = is_irreducible_group(&[g1, g2], SpinCaps::default());
            match (l1, spun) {
                (Ok(a), Ok(b)) => mismatches += u64::from(a != b),
                (Err(e), _) => c.error(e),
                (_, Err(e)) => c.error(e),
            }
        }
        c.expect(mismatches == 0, || format!("GL_{d}({q}): {mismatches} disagreements"));
    }
    c
}

fn bound_grid(cfg: &VerifyConfig) -> Check {
    let mut c = Check::new("bound grid");
    for p in grid(cfg) {
        let tag = format!("({},{},{})", p.e1, p.e2, p.q);
        if p.e2 >= 2 || p.e1 >= 3 {
            let b = exactq::proportion_bounds(&p).expect("applicable");
            c.expect(b.holds, || format!("P bounds {tag}: {b:?}"));
        }
        if p.e2 >= 2 {
            let b = exactq::reducible_duo_bound_check(&p).expect("applicable");
            c.expect(b.holds, || format!("1 - P bound {tag}"));
            let b = exactq::xi_bounds(&p).expect("applicable");
            c.expect(b.holds, || format!("xi bounds {tag}"));
            let b = exactq::reducible_pair_check(&p).expect("applicable");
            c.expect(b.holds, || format!("reducible pair bound {tag}"));
            if p.d() % 2 == 0 {
                let older = exactq::older_pair_bound(p.d(), p.q).expect("even");
                c.expect(exactq::reducible_pair_bound(p.q) < older, || {
                    format!("bound comparison {tag}")
                });
            }
        }
    }
    for q in 2..=cfg.max_q {
        c.expect(exactq::omega_infinity_check(64, q).holds, || {
            format!("omega lower bound at q={q}")
        });
    }
    c
}

fn closed_form_witnesses(cfg: &VerifyConfig) -> Check {
    let mut c = Check::new("closed forms for P(e1,1) and P(2,2)");
    for q in 2..=21u64 {
        for e1 in 1..=cfg.max_e {
            let (a, b) = (exactq::p_e1_1_closed_form(e1, q), exactq::proportion_p(&kp(e1, 1, q)));
            c.expect(a == b, || format!("P({e1},1) at q={q}: {a} vs {b}"));
        }
        if cfg.max_e >= 2 {
            let (a, b) = (exactq::p_22_closed_form(q), exactq::proportion_p(&kp(2, 2, q)));
            c.expect(a == b, || format!("P(2,2) at q={q}: {a} vs {b}"));
        }
    }
    c
}

fn monte_carlo(cfg: &VerifyConfig) -> Check {
    let mut c = Check::new("Monte Carlo battery");
    let experiments: Vec<_> = standard_battery()
        .into_iter()
        .filter(|e| {
            let e_max = match e.kind {
                ExperimentKind::StingrayAcceptance => e.e2,
                _ => e.e1,
            };
            e_max <= cfg.max_e && e.q <= cfg.max_q
        })
        .collect();
    match run_battery(&experiments, cfg.workers, 4.0, cfg.mc_scale) {
        Ok(reports) => {
            for r in reports {
                c.expect(r.pass, || {
                    format!(
                        "{} ({},{},{}): estimate {:.6}, target {}, z {:.2}",
                        r.experiment, r.e1, r.e2, r.q, r.estimate, r.exact_target, r.z_score
                    )
                });
            }
        }
        Err(e) => c.error(e),
    }
    c
}

/// Runs every check allowed by the configuration, in a fixed order.
pub fn run_verify(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let mut checks: Vec<fn(&VerifyConfig) -> Check> = vec![
        q_identity,
        walk_oracles,
        rank_counts,
        group_census,
        class_independence,
        criterion_equivalence,
        bound_grid,
        closed_form_witnesses,
    ];
    if cfg.monte_carlo {
        checks.push(monte_carlo);
    }
    checks
        .into_iter()
        .map(|f| {
            let start = Instant::now();
            let c = f(cfg);
            CheckResult {
                name: c.name.to_string(),
                cases: c.cases,
                skipped: c.skipped,
                pass: c.failures.is_empty(),
                failures: c.failures,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyConfig {
        VerifyConfig {
            max_e: 2,
            max_q: 3,
            equivalence_trials: 300,
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn quick_battery_passes() {
        let results = run_verify(&quick());
        for r in &results {
            assert!(r.pass, "{r:?}");
        }
        assert!(results.iter().map(|r| r.cases).sum::<u64>() > 100);
    }

    #[test]
    fn injected_fault_is_caught() {
        let cfg = VerifyConfig {
            fault: Some(Fault::RankMatrixCount),
            ..quick()
        };
        let results = run_verify(&cfg);
        let failing: Vec<_> = results.iter().filter(|r| !r.pass).collect();
        assert_eq!(failing.len(), 1);
        assert_eq!(failing[0].name, "rank_matrix_count");
    }
}
