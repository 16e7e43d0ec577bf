use serde::Serialize;

use crate::exactq::KneserParams;

use super::{
    estimate_duo_fraction, estimate_irreducible_proportion, estimate_reducible_pair_fraction,
    estimate_stingray_acceptance, Mode, SamplerConfig, SamplerError, TrialReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    IrreducibleProportion(Mode),
    DuoFraction,
    ReduciblePairFraction,
    /// Acceptance rate of `e`-stingray elements among uniform GL draws; `e2` unused.
    StingrayAcceptance,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Experiment {
    pub kind: ExperimentKind,
    pub e1: u32,
    pub e2: u32,
    pub q: u64,
    pub trials: u64,
    pub seed: u64,
}

impl Experiment {
    pub fn run(&self, workers: usize, threshold: f64) -> Result<TrialReport, SamplerError> {
        let cfg = SamplerConfig {
            trials: self.trials,
            seed: self.seed,
            workers,
            threshold,
            ..SamplerConfig::default()
        };
        match self.kind {
            ExperimentKind::StingrayAcceptance => {
                estimate_stingray_acceptance(self.e1 as usize, self.q, self.e2 as usize, &cfg)
            }
            kind => {
                let p = KneserParams::new(self.e1, self.e2, self.q)?;
                match kind {
                    ExperimentKind::IrreducibleProportion(mode) => estimate_irreducible_proportion(&p, mode, &cfg),
                    ExperimentKind::DuoFraction => estimate_duo_fraction(&p, &cfg),
                    ExperimentKind::ReduciblePairFraction => estimate_reducible_pair_fraction(&p, &cfg),
                    ExperimentKind::StingrayAcceptance => unreachable!(),
                }
            }
        }
    }
}

/// The fixed experiment list used for Monte Carlo concordance: 32
/// experiments, each with its own seed.
///
/// For `StingrayAcceptance` entries, `e1` holds `d` and `e2` holds `e`.
pub fn standard_battery() -> Vec<Experiment> {
    use ExperimentKind::*;
    use Mode::*;
    const N: u64 = 100_000;
    const BIG: u64 = 1_000_000;
    let rows: Vec<(ExperimentKind, u32, u32, u64, u64)> = vec![
        (IrreducibleProportion(UniformGroup), 2, 2, 2, N),
        (IrreducibleProportion(UniformGroup), 3, 3, 2, N),
        (IrreducibleProportion(UniformGroup), 2, 1, 3, N),
        (IrreducibleProportion(UniformGroup), 3, 1, 3, N),
        (IrreducibleProportion(UniformGroup), 3, 2, 2, N),
        (IrreducibleProportion(UniformGroup), 2, 2, 3, N),
        (IrreducibleProportion(UniformGroup), 4, 2, 2, N),
        (IrreducibleProportion(UniformGroup), 2, 2, 4, N),
        (IrreducibleProportion(UniformGroup), 3, 2, 3, N),
        (IrreducibleProportion(UniformGroup), 4, 1, 3, N),
        (IrreducibleProportion(UniformGroup), 2, 1, 4, N),
        (IrreducibleProportion(UniformGroup), 2, 2, 5, N),
        (IrreducibleProportion(FixedClassPair), 2, 2, 2, N),
        (IrreducibleProportion(FixedClassPair), 3, 3, 2, N),
        (IrreducibleProportion(FixedClassPair), 2, 1, 3, N),
        (IrreducibleProportion(FixedClassPair), 3, 2, 2, N),
        (IrreducibleProportion(FixedClassPair), 2, 2, 3, N),
        (IrreducibleProportion(FixedClassPair), 3, 1, 4, N),
        (DuoFraction, 2, 2, 2, BIG),
        (DuoFraction, 1, 1, 3, N),
        (DuoFraction, 3, 2, 2, N),
        (DuoFraction, 2, 1, 3, N),
        (DuoFraction, 2, 2, 3, N),
        (DuoFraction, 1, 1, 4, N),
        (DuoFraction, 3, 3, 2, N),
        (ReduciblePairFraction, 2, 2, 2, BIG),
        (ReduciblePairFraction, 2, 2, 9, N),
        (ReduciblePairFraction, 3, 2, 2, N),
        (ReduciblePairFraction, 2, 2, 3, N),
        (ReduciblePairFraction, 3, 3, 2, N),
        (StingrayAcceptance, 3, 2, 2, N),
        (StingrayAcceptance, 4, 2, 2, N),
    ];
    rows.into_iter()
        .enumerate()
        .map(|(i, (kind, e1, e2, q, trials))| Experiment {
            kind,
            e1,
            e2,
            q,
            trials,
            seed: 1000 + i as u64,
        })
        .collect()
}

/// Runs experiments in order; `scale` multiplies every trial count.
pub fn run_battery(
    experiments: &[Experiment],
    workers: usize,
    threshold: f64,
    scale: f64,
) -> Result<Vec<TrialReport>, SamplerError> {
    experiments
        .iter()
        .map(|e| {
            let scaled = Experiment {
                trials: ((e.trials as f64 * scale).round() as u64).max(1),
                ..*e
            };
            scaled.run(workers, threshold)
        })
        .collect()
}
