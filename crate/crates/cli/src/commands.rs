use std::collections::HashSet;
use std::fmt;

use anyhow::Result;
use num_traits::One;
use serde::Serialize;
use stingray_kneser::census::{
    ab_walk_census, exhaustive_duo_census, graph_walk_census, rank_census, verify_fibre_constancy, CensusCaps,
    CensusError, OracleKind, WalkCensus, WalkSide,
};
use stingray_kneser::exactq::{self, format_rational, to_f64, BoundCheck, KneserParams};
use stingray_kneser::field::make_field;
use stingray_kneser::sampler::{
    estimate_duo_fraction, estimate_irreducible_proportion, estimate_reducible_pair_fraction,
    estimate_stingray_acceptance, run_battery, standard_battery, Mode, SamplerConfig, SamplerError, StingraySource,
    TrialReport,
};
use stingray_kneser::verify::{run_verify, Fault, VerifyConfig};

use crate::output::{emit, Report, Status};
use crate::{
    CensusArgs, CensusKind, ExperimentArg, FaultArg, FormulasArgs, Global, IdentityArgs, ModeArg, NumList, SampleArgs,
    SourceArg, TableArgs, VerifyArgs,
};

pub const CAP_OVERRIDE_ENV: &str = "STINGRAY_CAP_OVERRIDE";
const SKIP_MESSAGE: &str = "skipped (no such stingray elements)";

/// Bad input that clap could not catch; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn small(v: u64, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| usage(format!("{what} = {v} is too large")))
}

/// Validated parameters with `e1 >= e2`, reporting a swap on stderr.
fn params(e1: u32, e2: u32, q: u64) -> Result<KneserParams> {
    let (p, swapped) = KneserParams::normalized(e1, e2, q).map_err(|e| usage(e.to_string()))?;
    if swapped {
        swap_notice(&p);
    }
    Ok(p)
}

fn swap_notice(p: &KneserParams) {
    eprintln!("note: e1 < e2; using (e1, e2) = ({}, {})", p.e1, p.e2);
}

/// The product of three lists, normalized and deduplicated in order.
fn grid_from_lists(e1s: &NumList, e2s: &NumList, qs: &NumList) -> Result<Vec<KneserParams>> {
    let mut seen = HashSet::new();
    let mut noted = HashSet::new();
    let mut grid = Vec::new();
    for &e1 in &e1s.0 {
        for &e2 in &e2s.0 {
            for &q in &qs.0 {
                let (p, swapped) = KneserParams::normalized(small(e1, "e1")?, small(e2, "e2")?, q)
                    .map_err(|e| usage(e.to_string()))?;
                if swapped && noted.insert((p.e1, p.e2)) {
                    swap_notice(&p);
                }
                if seen.insert(p) {
                    grid.push(p);
                }
            }
        }
    }
    Ok(grid)
}

fn require_prime_power(q: u64) -> Result<()> {
    make_field(q).map(|_| ()).map_err(|e| usage(format!("q = {q}: {e}")))
}

fn caps() -> Result<CensusCaps> {
    match std::env::var(CAP_OVERRIDE_ENV) {
        Ok(v) => {
            let n: u64 = v
                .trim()
                .parse()
                .map_err(|_| usage(format!("{CAP_OVERRIDE_ENV} must be an integer, got '{v}'")))?;
            Ok(CensusCaps::with_override(n))
        }
        Err(_) => Ok(CensusCaps::default()),
    }
}

fn rat(r: &num_rational::BigRational) -> String {
    format_rational(r)
}

#[derive(Serialize)]
struct FormulaRow {
    e1: u32,
    e2: u32,
    q: u64,
    d: u32,
    p: String,
    p_decimal: f64,
    p_lower: Option<String>,
    p_upper: Option<String>,
    p_bounds_hold: Option<bool>,
    duo_fraction: String,
    reducible_pair: String,
    reducible_pair_bound: Option<String>,
    reducible_pair_bound_holds: Option<bool>,
    reducible_duo_bound_holds: Option<bool>,
    older_pair_bound: Option<String>,
    older_pair_bound_vacuous: Option<bool>,
    improves_older_bound: Option<bool>,
}

impl FormulaRow {
    fn pass(&self) -> bool {
        [
            self.p_bounds_hold,
            self.reducible_pair_bound_holds,
            self.reducible_duo_bound_holds,
            self.improves_older_bound,
        ]
        .iter()
        .all(|b| *b != Some(false))
    }
}

fn formula_row(p: &KneserParams, checked: bool) -> Result<FormulaRow> {
    let value = if checked {
        exactq::proportion_p_checked(p)?
    } else {
        exactq::proportion_p(p)
    };
    let bounds: Option<BoundCheck> = exactq::proportion_bounds(p).ok();
    let pair = exactq::reducible_pair_check(p).ok();
    let older = (p.d().is_multiple_of(2) && pair.is_some())
        .then(|| exactq::older_pair_bound(p.d(), p.q))
        .transpose()?;
    let new_bound = pair.as_ref().map(|_| exactq::reducible_pair_bound(p.q));
    Ok(FormulaRow {
        e1: p.e1,
        e2: p.e2,
        q: p.q,
        d: p.d(),
        p_decimal: to_f64(&value),
        p: rat(&value),
        p_lower: bounds.as_ref().and_then(|b| b.lower.as_ref()).map(rat),
        p_upper: bounds.as_ref().and_then(|b| b.upper.as_ref()).map(rat),
        p_bounds_hold: bounds.as_ref().map(|b| b.holds),
        duo_fraction: rat(&exactq::duo_fraction(p)),
        reducible_pair: rat(&exactq::reducible_pair_value(p)),
        reducible_pair_bound: new_bound.as_ref().map(rat),
        reducible_pair_bound_holds: pair.as_ref().map(|b| b.holds),
        reducible_duo_bound_holds: exactq::reducible_duo_bound_check(p).ok().map(|b| b.holds),
        older_pair_bound_vacuous: older.as_ref().map(|o| *o >= num_rational::BigRational::one()),
        improves_older_bound: older.as_ref().zip(new_bound.as_ref()).map(|(o, n)| n < o),
        older_pair_bound: older.as_ref().map(rat),
    })
}

fn emit_formulas(command: &'static str, grid: Vec<KneserParams>, g: &Global) -> Result<Status> {
    let rows = grid
        .iter()
        .map(|p| formula_row(p, g.verify_mode))
        .collect::<Result<Vec<_>>>()?;
    let status = Status::from_pass(rows.iter().all(FormulaRow::pass));
    emit(&Report::new(command, status, rows), g.format, g.out.as_deref())?;
    Ok(status)
}

pub fn formulas(a: &FormulasArgs, g: &Global) -> Result<Status> {
    emit_formulas("formulas", grid_from_lists(&a.e1, &a.e2, &a.q)?, g)
}

pub fn table(a: &TableArgs, g: &Global) -> Result<Status> {
    if a.max_e == 0 {
        return Err(usage("--max-e must be at least 1"));
    }
    let mut grid = Vec::new();
    for &q in &a.qs.0 {
        for e1 in 1..=a.max_e {
            for e2 in 1..=e1 {
                grid.push(KneserParams::new(e1, e2, q).map_err(|e| usage(e.to_string()))?);
            }
        }
    }
    emit_formulas("table", grid, g)
}

#[derive(Serialize)]
struct IdentityRow {
    e1: u32,
    e2: u32,
    q: u64,
    sum: String,
    equals_one: bool,
}

pub fn identity(a: &IdentityArgs, g: &Global) -> Result<Status> {
    let mut grid = Vec::new();
    match (&a.e1, &a.e2, &a.q) {
        (Some(e1s), Some(e2s), Some(qs)) => grid = grid_from_lists(e1s, e2s, qs)?,
        _ => {
            for e1 in 1..=a.max_e {
                for e2 in 1..=e1 {
                    for q in 2..=a.max_q {
                        grid.push(KneserParams::new(e1, e2, q)?);
                    }
                }
            }
        }
    }
    if grid.is_empty() {
        return Err(usage("empty parameter grid"));
    }
    let rows: Vec<IdentityRow> = grid
        .iter()
        .map(|p| {
            let s = exactq::q_identity_sum(p);
            IdentityRow {
                e1: p.e1,
                e2: p.e2,
                q: p.q,
                equals_one: s.is_one(),
                sum: rat(&s),
            }
        })
        .collect();
    let status = Status::from_pass(rows.iter().all(|r| r.equals_one));
    emit(&Report::new("identity", status, rows), g.format, g.out.as_deref())?;
    Ok(status)
}

#[derive(Serialize)]
struct VerifyRow {
    check: String,
    cases: u64,
    skipped: u64,
    pass: bool,
    seconds: f64,
    first_failure: Option<String>,
}

pub fn verify(a: &VerifyArgs, g: &Global) -> Result<Status> {
    if a.max_e == 0 || a.max_q < 2 {
        return Err(usage("need --max-e >= 1 and --max-q >= 2"));
    }
    let cfg = VerifyConfig {
        max_e: a.max_e,
        max_q: a.max_q,
        monte_carlo: a.full,
        mc_scale: a.mc_scale,
        workers: a.workers.max(1),
        equivalence_trials: a.equivalence_trials,
        caps: caps()?,
        fault: a.inject_fault.map(|f| match f {
            FaultArg::RankMatrixCount => Fault::RankMatrixCount,
        }),
    };
    let results = run_verify(&cfg);
    for r in &results {
        for f in &r.failures {
            eprintln!("FAIL {}: {f}", r.name);
        }
    }
    let rows: Vec<VerifyRow> = results
        .into_iter()
        .map(|r| VerifyRow {
            check: r.name,
            cases: r.cases,
            skipped: r.skipped,
            pass: r.pass,
            seconds: (r.seconds * 1000.0).round() / 1000.0,
            first_failure: r.failures.into_iter().next(),
        })
        .collect();
    let status = Status::from_pass(rows.iter().all(|r| r.pass));
    emit(&Report::new("verify", status, rows), g.format, g.out.as_deref())?;
    Ok(status)
}

#[derive(Serialize)]
struct DuoRow {
    d: usize,
    q: u64,
    e1: usize,
    e2: usize,
    pairs: u64,
    non_duo: u64,
    reducible_duo: u64,
    irreducible_duo: u64,
    duo_fraction: String,
    duo_fraction_formula: Option<String>,
    irreducible_proportion: Option<String>,
    p_formula: Option<String>,
    fibre_constant: Option<bool>,
    spin_checked: u64,
    spin_mismatches: u64,
    agrees: bool,
    wall_ms: u128,
}

#[derive(Serialize)]
struct WalkRow {
    oracle: OracleKind,
    side: WalkSide,
    e1: u32,
    e2: u32,
    q: u64,
    walks3: u64,
    arcs3: u64,
    closed_walks3: u64,
    closed_arcs3: u64,
    walks3_formula: String,
    arcs3_formula: String,
    closed_walks3_formula: String,
    closed_arcs3_formula: String,
    agrees: bool,
    wall_ms: u128,
}

#[derive(Serialize)]
struct RankRow {
    e2: u32,
    e1: u32,
    q: u64,
    rank: u32,
    census: u64,
    formula: String,
    agrees: bool,
}

fn walk_row(w: WalkCensus) -> WalkRow {
    let p = w.params;
    WalkRow {
        oracle: w.oracle,
        side: w.side,
        e1: p.e1,
        e2: p.e2,
        q: p.q,
        agrees: w.mismatches().is_empty(),
        walks3: w.walks3,
        arcs3: w.arcs3,
        closed_walks3: w.closed_walks3,
        closed_arcs3: w.closed_arcs3,
        walks3_formula: exactq::walk3_count(&p).to_string(),
        arcs3_formula: exactq::arc3_count(&p).to_string(),
        closed_walks3_formula: exactq::closed_walk3_count(&p).to_string(),
        closed_arcs3_formula: exactq::closed_arc3_count(&p).to_string(),
        wall_ms: w.wall_ms,
    }
}

pub fn census(a: &CensusArgs, g: &Global) -> Result<Status> {
    let p = params(a.e1, a.e2, a.q)?;
    require_prime_power(p.q)?;
    let caps = caps()?;
    match a.kind {
        CensusKind::Walks => {
            let rows = vec![
                walk_row(graph_walk_census(&p, &caps, WalkSide::W2)?),
                walk_row(graph_walk_census(&p, &caps, WalkSide::W1)?),
                walk_row(ab_walk_census(&p, &caps)?),
            ];
            let status = Status::from_pass(rows.iter().all(|r| r.agrees));
            emit(&Report::new("census", status, rows), g.format, g.out.as_deref())?;
            Ok(status)
        }
        CensusKind::Rank => {
            let hist = rank_census(p.e2, p.e1, p.q, &caps)?;
            let rows: Vec<RankRow> = hist
                .iter()
                .enumerate()
                .map(|(k, &n)| {
                    let f = exactq::rank_matrix_count(p.e2, p.e1, k as u32, p.q).expect("rank in range");
                    RankRow {
                        e2: p.e2,
                        e1: p.e1,
                        q: p.q,
                        rank: k as u32,
                        census: n,
                        agrees: f == n.into(),
                        formula: f.to_string(),
                    }
                })
                .collect();
            let status = Status::from_pass(rows.iter().all(|r| r.agrees));
            emit(&Report::new("census", status, rows), g.format, g.out.as_deref())?;
            Ok(status)
        }
        CensusKind::Duo => duo_census(&p, a.d.unwrap_or(p.d() as usize), &caps, g),
    }
}

fn duo_census(p: &KneserParams, d: usize, caps: &CensusCaps, g: &Global) -> Result<Status> {
    let (e1, e2) = (p.e1 as usize, p.e2 as usize);
    if d < e1 + e2 {
        return Err(usage(format!("d = {d} is smaller than e1 + e2 = {}", e1 + e2)));
    }
    let c = match exhaustive_duo_census(d, p.q, e1, e2, caps) {
        Ok(c) => c,
        Err(e @ CensusError::EmptyClass { .. }) => {
            emit(
                &Report::<DuoRow>::skipped("census", format!("{SKIP_MESSAGE}: {e}")),
                g.format,
                g.out.as_deref(),
            )?;
            return Ok(Status::Skipped);
        }
        Err(e) => return Err(e.into()),
    };
    let full = d == e1 + e2;
    let fibre = if full { Some(verify_fibre_constancy(&c)?) } else { None };
    let proportion = c.irreducible_proportion();
    let target = full.then(|| exactq::proportion_p(p));
    let fraction_target = full.then(|| exactq::duo_fraction(p));
    let agrees = c.spin_mismatches == 0
        && c.irreducible_non_duo == 0
        && fraction_target.as_ref().is_none_or(|t| *t == c.duo_fraction())
        && target.as_ref().is_none_or(|t| proportion.as_ref() == Some(t))
        && fibre.as_ref().is_none_or(|f| f.constant && f.surjective);
    let row = DuoRow {
        d,
        q: p.q,
        e1,
        e2,
        pairs: c.total_pairs,
        non_duo: c.non_duo,
        reducible_duo: c.reducible_duo,
        irreducible_duo: c.irreducible_duo,
        duo_fraction: rat(&c.duo_fraction()),
        duo_fraction_formula: fraction_target.as_ref().map(rat),
        irreducible_proportion: proportion.as_ref().map(rat),
        p_formula: target.as_ref().map(rat),
        fibre_constant: fibre.map(|f| f.constant && f.surjective),
        spin_checked: c.spin_checked,
        spin_mismatches: c.spin_mismatches,
        agrees,
        wall_ms: c.wall_ms,
    };
    let status = Status::from_pass(agrees);
    emit(&Report::new("census", status, vec![row]), g.format, g.out.as_deref())?;
    Ok(status)
}

pub fn sample(a: &SampleArgs, g: &Global) -> Result<Status> {
    if a.workers == 0 || a.trials == 0 {
        return Err(usage("--workers and --trials must be positive"));
    }
    let reports: Result<Vec<TrialReport>, SamplerError> = if a.battery {
        run_battery(&standard_battery(), a.workers, a.threshold, a.scale)
    } else {
        let cfg = SamplerConfig {
            trials: a.trials,
            seed: a.seed,
            workers: a.workers,
            threshold: a.threshold,
            source: match a.source {
                SourceArg::ClassThenConjugate => StingraySource::ClassThenConjugate,
                SourceArg::Rejection => StingraySource::Rejection,
            },
            verify: g.verify_mode,
            ..SamplerConfig::default()
        };
        let q = a.q.expect("clap requires --q");
        require_prime_power(q)?;
        let e1 = a.e1.expect("clap requires --e1");
        match a.experiment {
            ExperimentArg::Acceptance => {
                let d =
                    a.d.ok_or_else(|| usage("--experiment acceptance needs --d (and --e1 as the stingray dimension)"))?;
                if e1 == 0 || e1 as usize > d {
                    return Err(usage(format!("need 1 <= e1 <= d, got e1={e1}, d={d}")));
                }
                estimate_stingray_acceptance(d, q, e1 as usize, &cfg).map(|r| vec![r])
            }
            kind => {
                let p = params(e1, a.e2.ok_or_else(|| usage("--e2 is required"))?, q)?;
                match kind {
                    ExperimentArg::Irreducible => {
                        let mode = match a.mode {
                            ModeArg::UniformGroup => Mode::UniformGroup,
                            ModeArg::FixedClassPair => Mode::FixedClassPair,
                        };
                        estimate_irreducible_proportion(&p, mode, &cfg)
                    }
                    ExperimentArg::DuoFraction => estimate_duo_fraction(&p, &cfg),
                    ExperimentArg::ReduciblePair => estimate_reducible_pair_fraction(&p, &cfg),
                    ExperimentArg::Acceptance => unreachable!(),
                }
                .map(|r| vec![r])
            }
        }
    };
    let reports = match reports {
        Ok(r) => r,
        Err(e @ SamplerError::EmptyClass { .. }) => {
            emit(
                &Report::<TrialReport>::skipped("sample", format!("{SKIP_MESSAGE}: {e}")),
                g.format,
                g.out.as_deref(),
            )?;
            return Ok(Status::Skipped);
        }
        Err(e) => return Err(e.into()),
    };
    let status = Status::from_pass(reports.iter().all(|r| r.pass));
    emit(&Report::new("sample", status, reports), g.format, g.out.as_deref())?;
    Ok(status)
}
