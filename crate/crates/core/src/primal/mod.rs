//! Direct solution of sampled programs by operator splitting.

mod admm;
mod oracle;

use serde::{Deserialize, Serialize};

pub(crate) use admm::{solve_split, RowSet, SplitProblem};
pub use oracle::brute_force_oracle;

use crate::error::{Error, Result};
use crate::numerics::{norm2, DenseMatrix};
use crate::problem::ProblemInstance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Initial splitting penalty.
    pub rho: f64,
    pub max_iter: usize,
    pub tol_primal: f64,
    pub tol_dual: f64,
    /// In [1, 1.9].
    pub over_relaxation: f64,
    /// Rebalance ρ from the residual ratio every few dozen iterations.
    pub adaptive_rho: bool,
    /// Keep the combined residual at every convergence check.
    pub record_history: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rho: 1.0,
            max_iter: 50_000,
            tol_primal: 1e-7,
            tol_dual: 1e-7,
            over_relaxation: 1.6,
            adaptive_rho: true,
            record_history: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) {
            return Err(Error::config("rho must be positive"));
        }
        if !(self.tol_primal > 0.0 && self.tol_dual > 0.0) {
            return Err(Error::config("solver tolerances must be positive"));
        }
        if !(1.0..=1.9).contains(&self.over_relaxation) {
            return Err(Error::config("over-relaxation must lie in [1, 1.9]"));
        }
        if self.max_iter == 0 {
            return Err(Error::config("max_iter must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// `‖Ax − a‖₂/√n`
    pub residual_eq: f64,
    /// `‖(Bx − b)₊‖₂/√n`
    pub residual_ineq: f64,
    /// `max(0, ‖x‖₂ − r)`
    pub residual_ball: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Combined residual per convergence check, when requested.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<f64>,
    /// Splitting residuals `(primal, dual)` at the last check.
    pub solver_residuals: (f64, f64),
}

impl Solution {
    /// Turns an iteration-capped run into [`Error::NonConverged`].
    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConverged {
                iterations: self.iterations,
                primal_residual: self.solver_residuals.0,
                dual_residual: self.solver_residuals.1,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub residual_eq: f64,
    pub residual_ineq: f64,
    pub residual_ball: f64,
    pub pass: bool,
}

/// Constraint residuals of `x` for `inst`; passes when all are ≤ `tol`.
pub fn certify(inst: &ProblemInstance, x: &[f64], tol: f64) -> Result<CertifyReport> {
    if x.len() != inst.n {
        return Err(Error::DimensionMismatch {
            what: "candidate point",
            expected: inst.n,
            found: x.len(),
        });
    }
    let sqrt_n = (inst.n as f64).sqrt();
    let ax = inst.a_mat.matvec(x);
    let eq: f64 = ax.iter().zip(&inst.a_vec).map(|(v, a)| (v - a).powi(2)).sum();
    let bx = inst.b_mat.matvec(x);
    let ineq: f64 = bx
        .iter()
        .zip(&inst.b_vec)
        .map(|(v, b)| (v - b).max(0.0).powi(2))
        .sum();
    let ball = if inst.ball_bound {
        (norm2(x) - inst.ball_radius).max(0.0)
    } else {
        0.0
    };
    let residual_eq = eq.sqrt() / sqrt_n;
    let residual_ineq = ineq.sqrt() / sqrt_n;
    Ok(CertifyReport {
        residual_eq,
        residual_ineq,
        residual_ball: ball,
        pass: residual_eq <= tol && residual_ineq <= tol && ball <= tol,
    })
}

/// Rows of `[A; B]` scaled by `1/√n`, the scale the splitting works in.
fn scaled_rows(inst: &ProblemInstance) -> Result<DenseMatrix> {
    let mut rows = inst.a_mat.vstack(&inst.b_mat)?;
    if rows.rows() == 0 {
        rows = DenseMatrix::zeros(0, inst.n);
    }
    rows.scale(1.0 / (inst.n as f64).sqrt());
    Ok(rows)
}

/// Solves `min f(x) s.t. Ax = a, Bx ≤ b, ‖x‖ ≤ r` by ADMM, starting at `x = 0`.
///
/// A run that exhausts `max_iter` is returned with `converged = false`;
/// use [`Solution::into_converged`] to treat that as an error.
pub fn solve_primal(inst: &ProblemInstance, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate()?;
    inst.check()?;
    let sigma = 1.0 / (inst.n as f64).sqrt();
    let problem = SplitProblem {
        rows: scaled_rows(inst)?,
        set: RowSet::Polyhedral {
            m1: inst.m1(),
            eq: inst.a_vec.iter().map(|v| v * sigma).collect(),
            ub: inst.b_vec.iter().map(|v| v * sigma).collect(),
        },
        objective: &inst.objective,
        ball_radius: inst.ball_bound.then_some(inst.ball_radius),
    };
    let out = solve_split(&problem, cfg)?;
    finish(inst, out)
}

/// `min f(x) s.t. ‖(Ax, (Bx)₊)‖₂ ≤ radius, ‖x‖ ≤ 1`: the convex program behind
/// the left-hand side of the comparison check (homogeneous rows only).
pub(crate) fn solve_norm_relaxed(
    inst: &ProblemInstance,
    radius: f64,
    cfg: &SolverConfig,
) -> Result<Solution> {
    cfg.validate()?;
    inst.check()?;
    let sigma = 1.0 / (inst.n as f64).sqrt();
    let problem = SplitProblem {
        rows: scaled_rows(inst)?,
        set: RowSet::NormBound {
            m1: inst.m1(),
            radius: radius * sigma,
        },
        objective: &inst.objective,
        ball_radius: Some(inst.ball_radius),
    };
    let out = solve_split(&problem, cfg)?;
    finish(inst, out)
}

fn finish(inst: &ProblemInstance, out: admm::SplitOutcome) -> Result<Solution> {
    let report = certify(inst, &out.x, f64::INFINITY)?;
    Ok(Solution {
        objective: inst.objective.evaluate(&out.x)?,
        x: out.x,
        residual_eq: report.residual_eq,
        residual_ineq: report.residual_ineq,
        residual_ball: report.residual_ball,
        iterations: out.iterations,
        converged: out.converged,
        history: out.history,
        solver_residuals: (out.primal_residual, out.dual_residual),
    })
}
