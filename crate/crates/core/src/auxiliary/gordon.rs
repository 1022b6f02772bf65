//! Monte Carlo check of the Gaussian comparison inequality behind the
//! lower bound.
//!
//! Left: `min_x max_{λ≥0,ν} νᵀAx + λᵀBx + ‖(ν,λ)‖‖x‖g − ζ ≥ 0` with a
//! scalar `g`. The inner maximum is finite only on
//! `‖(Ax, (Bx)₊)‖ ≤ ‖x‖(ε₅√n − g)`; replacing `‖x‖` by its bound `1` gives a
//! convex superset, so the estimated left probability never exceeds the
//! true one.
//!
//! Right: the same with `‖(ν,λ)‖gᵀx + ‖x‖hᵀ(ν,λ)`, whose feasible set is the
//! cone `gᵀx + ‖x‖K_h ≤ 0`. For degree-1 objectives its minimum is
//! `min(0, aux value at offset K_h)`.

use serde::{Deserialize, Serialize};

use super::eval_aux_general_with_offset;
use crate::error::{Error, Result};
use crate::numerics::{norm2, RngStream};
use crate::primal::{solve_norm_relaxed, SolverConfig};
use crate::problem::{sample_instance, ObjectiveSpec, SampleOptions, ShapeConfig};
use crate::theory::EpsilonConfig;

const Z95: f64 = 1.96;
pub const MIN_TRIALS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GordonCheckSpec {
    pub shape: ShapeConfig,
    pub objective: ObjectiveSpec,
    /// Threshold `ξ` inside `ζ`, on the unscaled (`√n`) level.
    pub offset_level: f64,
    pub trials: usize,
    pub eps: EpsilonConfig,
    pub master_seed: u64,
    /// Allowed shortfall of `p̂_left` below `p̂_right`.
    pub slack: f64,
    pub solver: SolverConfig,
}

impl GordonCheckSpec {
    pub fn new(shape: ShapeConfig, objective: ObjectiveSpec, offset_level: f64, trials: usize) -> Self {
        Self {
            shape,
            objective,
            offset_level,
            trials,
            eps: EpsilonConfig::default(),
            master_seed: 0,
            slack: 0.07,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GordonReport {
    pub offset_level: f64,
    pub trials: usize,
    pub p_left: f64,
    pub p_right: f64,
    pub ci_left: (f64, f64),
    pub ci_right: (f64, f64),
    /// Trials whose solve failed; excluded from the matching proportion.
    pub failures_left: usize,
    pub failures_right: usize,
    pub slack: f64,
    /// `p̂_left ≥ p̂_right − slack`
    pub holds: bool,
}

/// Wilson score interval at 95% for `successes` out of `total`.
pub fn wilson_interval(successes: usize, total: usize) -> (f64, f64) {
    if total == 0 {
        return (0.0, 1.0);
    }
    let n = total as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn left_value(spec: &GordonCheckSpec, trial: u64) -> Result<f64> {
    let mut stream = RngStream::new(spec.master_seed, 2 * trial);
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
    let (g, _) = stream.gaussian_pair();
    let radius = spec.eps.eps5_g * (spec.shape.n as f64).sqrt() - g;
    if radius < 0.0 {
        return Ok(0.0);
    }
    let sol = solve_norm_relaxed(&inst, radius, &spec.solver)?.into_converged()?;
    Ok(sol.objective.min(0.0))
}

fn right_value(spec: &GordonCheckSpec, trial: u64) -> Result<f64> {
    let mut stream = RngStream::new(spec.master_seed, 2 * trial + 1);
    let n = spec.shape.n;
    let mut g = vec![0.0; n];
    stream.fill_gaussian(&mut g);
    let mut h = vec![0.0; spec.shape.m1() + spec.shape.m2()];
    stream.fill_gaussian(&mut h);
    let (h_a, h_b) = h.split_at(spec.shape.m1());
    let h_b_plus: f64 = h_b.iter().map(|v| v.max(0.0).powi(2)).sum();
    let k_h = (norm2(h_a).powi(2) + h_b_plus).sqrt() - spec.eps.eps5_g * (n as f64).sqrt();
    match eval_aux_general_with_offset(&g, 1.0, k_h, &spec.objective, &spec.solver) {
        Ok(ev) => Ok(ev.value.min(0.0)),
        // only x = 0 is feasible
        Err(Error::UnboundedAux) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Per-trial optimal values of both sides (`None` where the solver failed).
fn comparison_samples(spec: &GordonCheckSpec) -> Vec<(Option<f64>, Option<f64>)> {
    crate::harness::map_trials(spec.trials, |t| {
        (left_value(spec, t as u64).ok(), right_value(spec, t as u64).ok())
    })
}

/// Estimates `P(left ≥ 0)` and `P(right ≥ 0)` at `ζ` threshold `offset_level`.
pub fn gordon_check(spec: &GordonCheckSpec) -> Result<GordonReport> {
    if spec.trials < MIN_TRIALS {
        return Err(Error::config(format!(
            "comparison check needs at least {MIN_TRIALS} trials, got {}",
            spec.trials
        )));
    }
    if !spec.offset_level.is_finite() {
        return Err(Error::config("offset level must be finite"));
    }
    Ok(comparison_samples_for(spec)?.0)
}

/// The report together with the per-trial values `(left, right)`.
pub fn comparison_samples_for(spec: &GordonCheckSpec) -> Result<(GordonReport, Vec<(Option<f64>, Option<f64>)>)> {
    spec.solver.validate()?;
    spec.eps.validate()?;
    spec.objective.check_dim(spec.shape.n)?;
    let samples = comparison_samples(spec);
    Ok((summarize(spec, &samples), samples))
}

fn summarize(spec: &GordonCheckSpec, samples: &[(Option<f64>, Option<f64>)]) -> GordonReport {
    let tally = |side: &dyn Fn(&(Option<f64>, Option<f64>)) -> Option<f64>| {
        let (mut hits, mut ok, mut failed) = (0, 0, 0);
        for s in samples {
            match side(s) {
                Some(v) => {
                    ok += 1;
                    if v >= spec.offset_level {
                        hits += 1;
                    }
                }
                None => failed += 1,
            }
        }
        (hits, ok, failed)
    };
    let (hl, nl, fl) = tally(&|s| s.0);
    let (hr, nr, fr) = tally(&|s| s.1);
    let ratio = |h: usize, n: usize| if n == 0 { f64::NAN } else { h as f64 / n as f64 };
    let p_left = ratio(hl, nl);
    let p_right = ratio(hr, nr);
    GordonReport {
        offset_level: spec.offset_level,
        trials: spec.trials,
        p_left,
        p_right,
        ci_left: wilson_interval(hl, nl),
        ci_right: wilson_interval(hr, nr),
        failures_left: fl,
        failures_right: fr,
        slack: spec.slack,
        holds: p_left >= p_right - spec.slack,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4);
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.0370).abs() < 1e-4);
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    }

    fn spec(offset: f64) -> GordonCheckSpec {
        GordonCheckSpec::new(ShapeConfig::new(12, 0.5, 0.5), ObjectiveSpec::PurelyLinear, offset, 100)
    }

    #[test]
    fn extreme_offsets() {
        let n = 12f64.sqrt();
        let low = gordon_check(&spec(-1e6 * n)).unwrap();
        assert_eq!((low.p_left, low.p_right), (1.0, 1.0));
        assert!(low.holds);
        let high = gordon_check(&spec(1e6 * n)).unwrap();
        assert_eq!((high.p_left, high.p_right), (0.0, 0.0));
        assert_eq!(high.failures_left + high.failures_right, 0);
    }

    #[test]
    fn too_few_trials() {
        let mut s = spec(0.0);
        s.trials = 10;
        assert!(gordon_check(&s).unwrap_err().is_config());
    }
}
