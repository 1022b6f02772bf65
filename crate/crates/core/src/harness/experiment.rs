use serde::{Deserialize, Serialize};

use super::parallel::map_trials;
use super::stats::Summary;
use crate::auxiliary::{comparison_samples_for, eval_aux, AuxSpec, GordonCheckSpec, GordonReport};
use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::primal::{solve_primal, SolverConfig};
use crate::problem::{sample_instance, ObjectiveSpec, SampleOptions, ShapeConfig};
use crate::theory::{xi_bp, xi_gl, xi_lp, EpsilonConfig, Side, TheoryResult};

/// Share of excluded trials above which a report is flagged unreliable.
const UNRELIABLE_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    PrimalSim,
    AuxSim,
    TheoryOnly,
    GordonCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub shape: ShapeConfig,
    pub objective: ObjectiveSpec,
    pub trials: usize,
    pub master_seed: u64,
    pub eps: EpsilonConfig,
    pub solver: SolverConfig,
    /// Side of the auxiliary program sampled in `AuxSim`.
    pub side: Side,
}

impl ExperimentSpec {
    pub fn new(mode: Mode, shape: ShapeConfig, objective: ObjectiveSpec, trials: usize, master_seed: u64) -> Self {
        Self {
            mode,
            shape,
            objective,
            trials,
            master_seed,
            eps: EpsilonConfig::default(),
            solver: SolverConfig::default(),
            side: Side::Lower,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        self.eps.validate()?;
        self.solver.validate()?;
        self.shape.validate(true)?;
        if self.mode != Mode::TheoryOnly {
            self.objective.check_dim(self.shape.n)?;
        }
        if let ObjectiveSpec::BpSplit { .. } = self.objective {
            if self.shape.beta.is_none() {
                return Err(Error::config("split objective needs beta in the shape"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub mean_over_sqrt_n: f64,
    pub std_over_sqrt_n: f64,
    pub ci95_halfwidth: f64,
    pub trials_used: usize,
    pub trials_excluded: usize,
    pub theory_lower: f64,
    pub theory_upper: f64,
    /// More than 20% of trials were excluded.
    pub unreliable: bool,
    pub spec: ExperimentSpec,
    /// Comparison probabilities at the lower theory level (`GordonCheck` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<GordonReport>,
}

fn theory(spec: &ExperimentSpec, side: Side) -> Result<TheoryResult> {
    let ShapeConfig { alpha1, alpha2, beta, .. } = spec.shape;
    match &spec.objective {
        ObjectiveSpec::PurelyLinear => xi_lp(alpha1, alpha2, spec.eps, side),
        ObjectiveSpec::GeneralLinear { c } => xi_gl(c, alpha1, alpha2, spec.eps, side),
        ObjectiveSpec::BpSplit { .. } => {
            let beta = beta.ok_or_else(|| Error::config("split objective needs beta"))?;
            xi_bp(beta, alpha1, alpha2, spec.eps, side)
        }
    }
}

/// Lower and upper limits of `ξ/√n` for the spec's shape and objective.
pub fn theory_pair(spec: &ExperimentSpec) -> Result<(f64, f64)> {
    Ok((
        theory(spec, Side::Lower)?.xi_over_sqrt_n,
        theory(spec, Side::Upper)?.xi_over_sqrt_n,
    ))
}

/// Failures that exclude a trial instead of aborting the experiment.
fn excludable(e: &Error) -> bool {
    matches!(
        e,
        Error::UnboundedAux
            | Error::NonConverged { .. }
            | Error::Singular(_)
            | Error::Infeasible(_)
            | Error::UnboundedMaximum { .. }
    )
}

fn primal_trial(spec: &ExperimentSpec, t: usize) -> Result<f64> {
    let mut stream = RngStream::new(spec.master_seed, t as u64);
    let inst = sample_instance(
        &spec.shape,
        &spec.objective,
        &mut stream,
        None,
        SampleOptions {
            allow_beta_above_alpha1: true,
            ..Default::default()
        },
    )?;
    let sol = solve_primal(&inst, &spec.solver)?.into_converged()?;
    Ok(sol.objective / (spec.shape.n as f64).sqrt())
}

fn aux_trial(spec: &ExperimentSpec, aux: &AuxSpec, t: usize) -> Result<f64> {
    let mut stream = RngStream::new(spec.master_seed, t as u64);
    let mut g = vec![0.0; spec.shape.n];
    stream.fill_gaussian(&mut g);
    let ev = eval_aux(&g, aux, &spec.solver)?.with_stream(t as u64);
    Ok(ev.value_over_sqrt_n())
}

/// Runs every trial (trial `t` draws from stream `t`) and aggregates in
/// trial order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let (theory_lower, theory_upper) = theory_pair(spec)?;
    let sqrt_n = (spec.shape.n as f64).sqrt();
    let mut comparison = None;

    let outcomes: Vec<Result<f64>> = match spec.mode {
        Mode::TheoryOnly => {
            return Ok(ExperimentReport {
                mean_over_sqrt_n: theory_lower,
                std_over_sqrt_n: 0.0,
                ci95_halfwidth: 0.0,
                trials_used: spec.trials,
                trials_excluded: 0,
                theory_lower,
                theory_upper,
                unreliable: false,
                spec: spec.clone(),
                comparison: None,
            })
        }
        Mode::PrimalSim => map_trials(spec.trials, |t| primal_trial(spec, t)),
        Mode::AuxSim => {
            let aux = AuxSpec::new(spec.side, spec.shape, spec.eps, spec.objective.clone());
            aux.validate()?;
            map_trials(spec.trials, |t| aux_trial(spec, &aux, t))
        }
        Mode::GordonCheck => {
            let mut check = GordonCheckSpec::new(
                spec.shape,
                spec.objective.clone(),
                theory_lower * sqrt_n,
                spec.trials,
            );
            check.eps = spec.eps;
            check.master_seed = spec.master_seed;
            check.solver = spec.solver;
            let (report, samples) = comparison_samples_for(&check)?;
            comparison = Some(report);
            samples
                .into_iter()
                .map(|(left, _)| left.map(|v| v / sqrt_n).ok_or(Error::UnboundedAux))
                .collect()
        }
    };

    let mut values = Vec::with_capacity(outcomes.len());
    let mut excluded = 0;
    for (t, r) in outcomes.into_iter().enumerate() {
        match r {
            Ok(v) => values.push(v),
            Err(e) if excludable(&e) => {
                log::debug!("trial {t} excluded: {e}");
                excluded += 1;
            }
            Err(e) => return Err(e),
        }
    }
    let summary = Summary::of(&values);
    let unreliable = excluded as f64 > UNRELIABLE_FRACTION * spec.trials as f64;
    if unreliable {
        log::warn!(
            "{excluded} of {} trials excluded; report flagged unreliable",
            spec.trials
        );
    }
    Ok(ExperimentReport {
        mean_over_sqrt_n: summary.mean,
        std_over_sqrt_n: summary.std,
        ci95_halfwidth: summary.ci95,
        trials_used: summary.count,
        trials_excluded: excluded,
        theory_lower,
        theory_upper,
        unreliable,
        spec: spec.clone(),
        comparison,
    })
}
