//! Seeded Monte Carlo estimates of duo and irreducibility proportions,
//! compared against the exact values.
//!
//! Each worker owns a ChaCha8 stream derived from `(seed, worker index)`, so
//! a report is reproducible bit for bit given the seed, the worker count and
//! the parameters.

mod battery;

use std::fmt;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::census::{stingray_polys, stingray_representative};
use crate::exactq::{self, ExactError, KneserParams};
use crate::field::{make_field, FieldError, FieldSpec};
use crate::matspace::{
    l1_criterion_profiles, random_gl, random_matrix, stingray_profile, stingray_profile_unchecked, MatError, MatrixGF,
    StingrayProfile,
};

pub use battery::{run_battery, standard_battery, Experiment, ExperimentKind};

/// Default number of GL draws allowed per requested stingray element.
pub const DEFAULT_REJECTION_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("no {e}-stingray elements exist in GL_{d}({q})")]
    EmptyClass { d: usize, e: usize, q: u64 },
    #[error("no stingray element found after {0} draws")]
    RejectionBudgetExceeded(u64),
    #[error("invalid sampler parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Where the pairs come from: all of `G × G`, or one fixed class pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    UniformGroup,
    FixedClassPair,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::UniformGroup => "uniform-group",
            Mode::FixedClassPair => "fixed-class-pair",
        })
    }
}

/// How uniform-group mode draws a uniform `e`-stingray element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StingraySource {
    /// Draw from `GL_d(q)` until the element is an `e`-stingray element.
    Rejection,
    /// Pick a class uniformly (all classes have the same size), then a
    /// uniform conjugate of its representative. Same distribution, much
    /// cheaper when stingray elements are rare.
    ClassThenConjugate,
}

#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    /// `|z|` at or above this fails.
    pub threshold: f64,
    pub source: StingraySource,
    pub rejection_budget: u64,
    /// Recompute profiles from scratch and check `V = U ⊕ F` for every draw.
    pub verify: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            trials: 100_000,
            seed: 42,
            workers: 1,
            threshold: 4.0,
            source: StingraySource::ClassThenConjugate,
            rejection_budget: DEFAULT_REJECTION_BUDGET,
            verify: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TrialReport {
    pub experiment: String,
    pub mode: Mode,
    pub d: usize,
    pub q: u64,
    pub e1: usize,
    /// Zero for single-element experiments.
    pub e2: usize,
    pub trials: u64,
    pub hits: u64,
    /// Random pairs (or GL elements) drawn, including rejected ones.
    pub draws: u64,
    pub estimate: f64,
    pub stderr: f64,
    /// Exact target as `"num/den"`.
    pub exact_target: String,
    pub exact_target_decimal: f64,
    /// `(estimate - target) / sqrt(target (1 - target) / trials)`.
    pub z_score: f64,
    pub threshold: f64,
    pub pass: bool,
    pub seed: u64,
    pub workers: usize,
    pub decomposition_failures: u64,
}

impl TrialReport {
    #[allow(clippy::too_many_arguments)]
    fn build(
        experiment: &str,
        mode: Mode,
        d: usize,
        q: u64,
        e1: usize,
        e2: usize,
        tally: Tally,
        target: &BigRational,
        cfg: &SamplerConfig,
    ) -> TrialReport {
        let n = tally.trials as f64;
        let p_hat = tally.hits as f64 / n;
        let p = exactq::to_f64(target);
        let sigma = (p * (1.0 - p) / n).sqrt();
        let z = if sigma > 0.0 {
            (p_hat - p) / sigma
        } else if p_hat == p {
            0.0
        } else {
            f64::INFINITY
        };
        TrialReport {
            experiment: experiment.to_string(),
            mode,
            d,
            q,
            e1,
            e2,
            trials: tally.trials,
            hits: tally.hits,
            draws: tally.draws,
            estimate: p_hat,
            stderr: (p_hat * (1.0 - p_hat) / n).sqrt(),
            exact_target: exactq::format_rational(target),
            exact_target_decimal: p,
            z_score: z,
            threshold: cfg.threshold,
            pass: z.abs() < cfg.threshold && tally.decomposition_failures == 0,
            seed: cfg.seed,
            workers: cfg.workers,
            decomposition_failures: tally.decomposition_failures,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    trials: u64,
    hits: u64,
    draws: u64,
    decomposition_failures: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            trials: self.trials + o.trials,
            hits: self.hits + o.hits,
            draws: self.draws + o.draws,
            decomposition_failures: self.decomposition_failures + o.decomposition_failures,
        }
    }
}

/// RNG for worker `index`: stream `index` of the ChaCha8 generator seeded by `seed`.
pub fn worker_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Splits `trials` over the workers and sums their tallies.
fn run_parallel<F>(cfg: &SamplerConfig, work: F) -> Result<Tally, SamplerError>
where
    F: Fn(&mut ChaCha8Rng, u64) -> Result<Tally, SamplerError> + Sync,
{
    let workers = cfg.workers.max(1);
    let base = cfg.trials / workers as u64;
    let extra = cfg.trials % workers as u64;
    let tallies: Vec<Result<Tally, SamplerError>> = (0..workers)
        .into_par_iter()
        .map(|i| {
            let n = base + u64::from((i as u64) < extra);
            let mut rng = worker_rng(cfg.seed, i);
            work(&mut rng, n)
        })
        .collect();
    tallies
        .into_iter()
        .try_fold(Tally::default(), |acc, t| Ok(acc.merge(t?)))
}

/// Uniform invertible matrix together with its inverse.
fn random_gl_with_inverse<R: Rng + ?Sized>(d: usize, field: &FieldSpec, rng: &mut R) -> (MatrixGF, MatrixGF) {
    loop {
        let x = random_matrix(d, d, field, rng);
        if let Ok(xi) = x.inverse() {
            return (x, xi);
        }
    }
}

/// Uniform element of the conjugacy class of `rep`.
pub fn sample_class_conjugate<R: Rng + ?Sized>(rep: &MatrixGF, rng: &mut R) -> MatrixGF {
    let (x, xi) = random_gl_with_inverse(rep.rows(), rep.field(), rng);
    rep.conjugate_by(&x, &xi)
}

/// Draws elements of `GL_d(q)` until one is an `e`-stingray element. The
/// result is uniform over all `e`-stingray elements. Also returns the
/// number of draws.
pub fn sample_stingray<R: Rng + ?Sized>(
    d: usize,
    field: &FieldSpec,
    e: usize,
    rng: &mut R,
    budget: u64,
) -> Result<(MatrixGF, StingrayProfile, u64), SamplerError> {
    if e == 0 || e > d {
        return Err(SamplerError::InvalidParams(format!(
            "need 1 <= e <= d, got e={e}, d={d}"
        )));
    }
    if stingray_polys(e, field).is_empty() {
        return Err(SamplerError::EmptyClass {
            d,
            e,
            q: field.q() as u64,
        });
    }
    for draws in 1..=budget {
        let g = random_gl(d, field, rng);
        if g.is_identity() {
            continue;
        }
        if let Some(p) = stingray_profile_unchecked(&g) {
            if p.e == e {
                return Ok((g, p, draws));
            }
        }
    }
    Err(SamplerError::RejectionBudgetExceeded(budget))
}

/// A class representative with its profile, ready for fast conjugation.
#[derive(Clone, Debug)]
struct ClassRep {
    g: MatrixGF,
    profile: StingrayProfile,
}

fn class_reps(d: usize, e: usize, field: &FieldSpec) -> Result<Vec<ClassRep>, SamplerError> {
    if e == 0 || e > d {
        return Err(SamplerError::InvalidParams(format!(
            "need 1 <= e <= d, got e={e}, d={d}"
        )));
    }
    let polys = stingray_polys(e, field);
    if polys.is_empty() {
        return Err(SamplerError::EmptyClass {
            d,
            e,
            q: field.q() as u64,
        });
    }
    polys
        .iter()
        .map(|a| {
            let g = stingray_representative(d, field, a);
            let profile = stingray_profile(&g)?.expect("representative is a stingray element");
            Ok(ClassRep { g, profile })
        })
        .collect()
}

/// Profile of `x^{-1} g x` from that of `g`: images and fixed spaces move by `x`.
fn conjugate_profile(p: &StingrayProfile, x: &MatrixGF) -> StingrayProfile {
    StingrayProfile {
        e: p.e,
        image: p.image.image_under(x),
        fixed: p.fixed.image_under(x),
        restriction_charpoly: p.restriction_charpoly.clone(),
    }
}

/// Draws how one side of a pair is produced.
enum Drawer<'a> {
    Conjugate(&'a [ClassRep]),
    Rejection { d: usize, e: usize },
}

struct Draw {
    profile: StingrayProfile,
    decomposition_ok: bool,
}

impl Drawer<'_> {
    fn draw(&self, field: &FieldSpec, rng: &mut ChaCha8Rng, cfg: &SamplerConfig) -> Result<Draw, SamplerError> {
        match self {
            Drawer::Conjugate(reps) => {
                let rep = &reps[rng.gen_range(0..reps.len())];
                let (x, xi) = random_gl_with_inverse(rep.g.rows(), field, rng);
                let profile = conjugate_profile(&rep.profile, &x);
                let mut decomposition_ok = true;
                if cfg.verify {
                    let h = rep.g.conjugate_by(&x, &xi);
                    let direct = stingray_profile(&h)?;
                    decomposition_ok = direct.as_ref() == Some(&profile) && check_decomposition(&profile);
                }
                Ok(Draw {
                    profile,
                    decomposition_ok,
                })
            }
            Drawer::Rejection { d, e } => {
                let (_, profile, _) = sample_stingray(*d, field, *e, rng, cfg.rejection_budget)?;
                let decomposition_ok = !cfg.verify || check_decomposition(&profile);
                Ok(Draw {
                    profile,
                    decomposition_ok,
                })
            }
        }
    }
}

fn check_decomposition(p: &StingrayProfile) -> bool {
    p.image.is_complement(&p.fixed).unwrap_or(false)
}

struct PairSetup {
    field: FieldSpec,
    d: usize,
    reps1: Vec<ClassRep>,
    reps2: Vec<ClassRep>,
}

fn pair_setup(p: &KneserParams, mode: Mode) -> Result<PairSetup, SamplerError> {
    let field = make_field(p.q)?;
    let d = p.d() as usize;
    let mut reps1 = class_reps(d, p.e1 as usize, &field)?;
    let mut reps2 = class_reps(d, p.e2 as usize, &field)?;
    if mode == Mode::FixedClassPair {
        reps1.truncate(1);
        reps2.truncate(1);
    }
    Ok(PairSetup { field, d, reps1, reps2 })
}

impl PairSetup {
    fn drawers(&self, p: &KneserParams, mode: Mode, cfg: &SamplerConfig) -> (Drawer<'_>, Drawer<'_>) {
        if mode == Mode::UniformGroup && cfg.source == StingraySource::Rejection {
            (
                Drawer::Rejection {
                    d: self.d,
                    e: p.e1 as usize,
                },
                Drawer::Rejection {
                    d: self.d,
                    e: p.e2 as usize,
                },
            )
        } else {
            (Drawer::Conjugate(&self.reps1), Drawer::Conjugate(&self.reps2))
        }
    }
}

/// Draws stingray duos with image dimensions `e1` and `e2` in `GL_d(q)`,
/// `e1 + e2 <= d`: each side is a uniform element of the union of its
/// classes, and non-duo pairs are redrawn.
pub struct DuoSampler {
    field: FieldSpec,
    reps1: Vec<ClassRep>,
    reps2: Vec<ClassRep>,
}

impl DuoSampler {
    pub fn new(d: usize, field: &FieldSpec, e1: usize, e2: usize) -> Result<DuoSampler, SamplerError> {
        if e1 + e2 > d {
            return Err(SamplerError::InvalidParams(format!(
                "need e1 + e2 <= d, got {e1} + {e2} > {d}"
            )));
        }
        Ok(DuoSampler {
            field: field.clone(),
            reps1: class_reps(d, e1, field)?,
            reps2: class_reps(d, e2, field)?,
        })
    }

    /// Returns `(g1, profile1, g2, profile2)`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (MatrixGF, StingrayProfile, MatrixGF, StingrayProfile) {
        loop {
            let (g1, p1) = self.one(&self.reps1, rng);
            let (g2, p2) = self.one(&self.reps2, rng);
            if p1.image.meets_trivially(&p2.image).unwrap_or(false) {
                return (g1, p1, g2, p2);
            }
        }
    }

    fn one<R: Rng + ?Sized>(&self, reps: &[ClassRep], rng: &mut R) -> (MatrixGF, StingrayProfile) {
        let rep = &reps[rng.gen_range(0..reps.len())];
        let (x, xi) = random_gl_with_inverse(rep.g.rows(), &self.field, rng);
        (rep.g.conjugate_by(&x, &xi), conjugate_profile(&rep.profile, &x))
    }
}

/// Estimates the proportion of irreducible pairs among `(e1, e2)`-stingray
/// duos. Non-duo pairs are redrawn; `trials` counts classified duos.
pub fn estimate_irreducible_proportion(
    p: &KneserParams,
    mode: Mode,
    cfg: &SamplerConfig,
) -> Result<TrialReport, SamplerError> {
    let setup = pair_setup(p, mode)?;
    let (a, b) = setup.drawers(p, mode, cfg);
    let tally = run_parallel(cfg, |rng, n| {
        let mut t = Tally::default();
        while t.trials < n {
            let x = a.draw(&setup.field, rng, cfg)?;
            let y = b.draw(&setup.field, rng, cfg)?;
            t.draws += 1;
            t.decomposition_failures += u64::from(!x.decomposition_ok) + u64::from(!y.decomposition_ok);
            if !x.profile.image.meets_trivially(&y.profile.image)? {
                continue;
            }
            t.trials += 1;
            t.hits += u64::from(l1_criterion_profiles(&x.profile, &y.profile));
        }
        Ok(t)
    })?;
    let target = exactq::proportion_p(p);
    Ok(TrialReport::build(
        "irreducible_proportion",
        mode,
        setup.d,
        p.q,
        p.e1 as usize,
        p.e2 as usize,
        tally,
        &target,
        cfg,
    ))
}

fn fixed_pair_experiment(
    name: &str,
    p: &KneserParams,
    cfg: &SamplerConfig,
    target: BigRational,
    hit: impl Fn(&StingrayProfile, &StingrayProfile) -> Result<bool, SamplerError> + Sync,
) -> Result<TrialReport, SamplerError> {
    let mode = Mode::FixedClassPair;
    let setup = pair_setup(p, mode)?;
    let (a, b) = setup.drawers(p, mode, cfg);
    let tally = run_parallel(cfg, |rng, n| {
        let mut t = Tally::default();
        for _ in 0..n {
            let x = a.draw(&setup.field, rng, cfg)?;
            let y = b.draw(&setup.field, rng, cfg)?;
            t.draws += 1;
            t.trials += 1;
            t.decomposition_failures += u64::from(!x.decomposition_ok) + u64::from(!y.decomposition_ok);
            t.hits += u64::from(hit(&x.profile, &y.profile)?);
        }
        Ok(t)
    })?;
    Ok(TrialReport::build(
        name,
        mode,
        setup.d,
        p.q,
        p.e1 as usize,
        p.e2 as usize,
        tally,
        &target,
        cfg,
    ))
}

/// Fraction of a fixed class pair `C1 × C2` that forms duos; target `1/ξ`.
pub fn estimate_duo_fraction(p: &KneserParams, cfg: &SamplerConfig) -> Result<TrialReport, SamplerError> {
    fixed_pair_experiment("duo_fraction", p, cfg, exactq::duo_fraction(p), |x, y| {
        Ok(x.image.meets_trivially(&y.image)?)
    })
}

/// Fraction of a fixed class pair generating a reducible subgroup; target
/// `1 - P/ξ`. A pair is irreducible iff it is a duo satisfying the
/// irreducibility criterion.
pub fn estimate_reducible_pair_fraction(p: &KneserParams, cfg: &SamplerConfig) -> Result<TrialReport, SamplerError> {
    fixed_pair_experiment(
        "reducible_pair_fraction",
        p,
        cfg,
        exactq::reducible_pair_value(p),
        |x, y| {
            let duo = x.image.meets_trivially(&y.image)?;
            Ok(!(duo && l1_criterion_profiles(x, y)))
        },
    )
}

/// Fraction of uniform `GL_d(q)` draws that are `e`-stingray elements;
/// target `(number of classes) · (class size) / |GL_d(q)|`.
pub fn estimate_stingray_acceptance(
    d: usize,
    q: u64,
    e: usize,
    cfg: &SamplerConfig,
) -> Result<TrialReport, SamplerError> {
    let field = make_field(q)?;
    let classes = stingray_polys(e, &field).len();
    if classes == 0 {
        return Err(SamplerError::EmptyClass { d, e, q });
    }
    let target = BigRational::new(
        exactq::class_size(d as u32, e as u32, q) * classes,
        exactq::gl_order(d as u32, q),
    );
    let tally = run_parallel(cfg, |rng, n| {
        let mut t = Tally::default();
        for _ in 0..n {
            let g = random_gl(d, &field, rng);
            t.trials += 1;
            t.draws += 1;
            let hit = !g.is_identity() && stingray_profile_unchecked(&g).is_some_and(|p| p.e == e);
            t.hits += u64::from(hit);
        }
        Ok(t)
    })?;
    Ok(TrialReport::build(
        "stingray_acceptance",
        Mode::UniformGroup,
        d,
        q,
        e,
        0,
        tally,
        &target,
        cfg,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kp(e1: u32, e2: u32, q: u64) -> KneserParams {
        KneserParams::new(e1, e2, q).unwrap()
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = SamplerConfig {
            trials: 2000,
            workers: 3,
            ..SamplerConfig::default()
        };
        let a = estimate_irreducible_proportion(&kp(2, 2, 2), Mode::UniformGroup, &cfg).unwrap();
        let b = estimate_irreducible_proportion(&kp(2, 2, 2), Mode::UniformGroup, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials, 2000);
    }

    #[test]
    fn empty_class_is_reported() {
        let cfg = SamplerConfig::default();
        assert!(matches!(
            estimate_irreducible_proportion(&kp(2, 1, 2), Mode::UniformGroup, &cfg),
            Err(SamplerError::EmptyClass { .. })
        ));
        let f = make_field(2).unwrap();
        let mut rng = worker_rng(1, 0);
        assert!(matches!(
            sample_stingray(3, &f, 1, &mut rng, 10),
            Err(SamplerError::EmptyClass { .. })
        ));
    }

    #[test]
    fn conjugate_profiles_match_direct_computation() {
        let cfg = SamplerConfig {
            trials: 300,
            verify: true,
            ..SamplerConfig::default()
        };
        let r = estimate_duo_fraction(&kp(2, 1, 3), &cfg).unwrap();
        assert_eq!(r.decomposition_failures, 0);
        let r = estimate_irreducible_proportion(&kp(2, 2, 2), Mode::UniformGroup, &cfg).unwrap();
        assert_eq!(r.decomposition_failures, 0);
    }

    #[test]
    fn class_conjugate_keeps_charpoly() {
        let f = make_field(3).unwrap();
        let reps = class_reps(3, 2, &f).unwrap();
        let mut rng = worker_rng(5, 0);
        for rep in &reps {
            let h = sample_class_conjugate(&rep.g, &mut rng);
            let p = stingray_profile(&h).unwrap().unwrap();
            assert_eq!(p.restriction_charpoly, rep.profile.restriction_charpoly);
        }
    }

    #[test]
    fn rejection_budget() {
        let f = make_field(2).unwrap();
        let mut rng = worker_rng(9, 0);
        // 4-stingray elements of GL_4(2) are rare enough that one draw rarely suffices
        let mut exceeded = false;
        for _ in 0..20 {
            if let Err(SamplerError::RejectionBudgetExceeded(1)) = sample_stingray(4, &f, 4, &mut rng, 1) {
                exceeded = true;
            }
        }
        assert!(exceeded);
    }
}
