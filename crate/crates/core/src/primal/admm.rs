//! Graph-form ADMM shared by the primal solver and the auxiliary programs.
//!
//! Splits `min f(x) s.t. Mx ∈ C, ‖x‖ ≤ r` into copies `w = x` (prox of
//! `f`), `y = Mx` (projection onto `C`) and `z = x` (projection onto the
//! ball). Every copy carries the same penalty, so the x-update matrix
//! `(1 + [ball])·I + MᵀM` is independent of ρ: it is factored once and ρ
//! can be rebalanced freely.

use super::SolverConfig;
use crate::error::Result;
use crate::numerics::{norm2, CholeskyFactor, DenseMatrix};
use crate::problem::ObjectiveSpec;

/// Constraint set for the stacked row block `y = Mx`.
#[derive(Debug, Clone)]
pub(crate) enum RowSet {
    /// First `m1` rows pinned to `eq`, remaining rows bounded above by `ub`.
    Polyhedral { m1: usize, eq: Vec<f64>, ub: Vec<f64> },
    /// `‖(y_eq, (y_ineq)₊)‖₂ ≤ radius`, first `m1` rows being the `y_eq` part.
    NormBound { m1: usize, radius: f64 },
}

impl RowSet {
    fn project(&self, v: &mut [f64]) {
        match self {
            RowSet::Polyhedral { m1, eq, ub } => {
                v[..*m1].copy_from_slice(eq);
                for (vi, &bi) in v[*m1..].iter_mut().zip(ub) {
                    if *vi > bi {
                        *vi = bi;
                    }
                }
            }
            RowSet::NormBound { m1, radius } => {
                let mut sq: f64 = v[..*m1].iter().map(|t| t * t).sum();
                sq += v[*m1..].iter().filter(|t| **t > 0.0).map(|t| t * t).sum::<f64>();
                let norm = sq.sqrt();
                if norm > *radius {
                    let s = if norm > 0.0 { radius / norm } else { 0.0 };
                    v[..*m1].iter_mut().for_each(|t| *t *= s);
                    v[*m1..].iter_mut().filter(|t| **t > 0.0).for_each(|t| *t *= s);
                }
            }
        }
    }
}

pub(crate) struct SplitProblem<'a> {
    pub rows: DenseMatrix,
    pub set: RowSet,
    pub objective: &'a ObjectiveSpec,
    pub ball_radius: Option<f64>,
}

pub(crate) struct SplitOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub history: Vec<f64>,
    /// `ρ·u` for the row block: multipliers of the scaled rows.
    pub row_dual: Vec<f64>,
}

const CHECK_EVERY: usize = 10;
const RHO_EVERY: usize = 50;
const RHO_MIN: f64 = 1e-6;
const RHO_MAX: f64 = 1e6;

fn project_ball(v: &mut [f64], radius: f64) {
    let nrm = norm2(v);
    if nrm > radius {
        let s = radius / nrm;
        v.iter_mut().for_each(|t| *t *= s);
    }
}

pub(crate) fn solve_split(p: &SplitProblem<'_>, cfg: &SolverConfig) -> Result<SplitOutcome> {
    let n = p.rows.cols();
    let m = p.rows.rows();
    let has_ball = p.ball_radius.is_some();
    let copies = if has_ball { 2.0 } else { 1.0 };

    let mut system = if m > 0 { p.rows.gram_cols() } else { DenseMatrix::zeros(n, n) };
    system.add_diagonal(copies);
    let chol = CholeskyFactor::new(&system, "x-update system")?;

    let alpha = cfg.over_relaxation;
    let mut rho = cfg.rho;

    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut uw = vec![0.0; n];
    let mut y = vec![0.0; m];
    let mut uy = vec![0.0; m];
    let mut z = vec![0.0; n];
    let mut uz = vec![0.0; n];
    p.set.project(&mut y);

    let mut rhs = vec![0.0; n];
    let mut tmp_m = vec![0.0; m];
    let mut tmp_n = vec![0.0; n];
    let mut mx = vec![0.0; m];
    let mut w_new = vec![0.0; n];
    let mut y_new = vec![0.0; m];
    let mut z_new = vec![0.0; n];
    let mut xr_w = vec![0.0; n];
    let mut yr = vec![0.0; m];
    let mut xr_z = vec![0.0; n];

    let mut history = Vec::new();
    let mut primal_residual = f64::INFINITY;
    let mut dual_residual = f64::INFINITY;

    for iter in 1..=cfg.max_iter {
        // x-update
        for i in 0..m {
            tmp_m[i] = y[i] - uy[i];
        }
        if m > 0 {
            p.rows.matvec_t_into(&tmp_m, &mut rhs);
        } else {
            rhs.iter_mut().for_each(|v| *v = 0.0);
        }
        for i in 0..n {
            rhs[i] += w[i] - uw[i];
            if has_ball {
                rhs[i] += z[i] - uz[i];
            }
        }
        chol.solve_in_place(&mut rhs);
        x.copy_from_slice(&rhs);
        if m > 0 {
            p.rows.matvec_into(&x, &mut mx);
        }

        // relaxed copies and their prox/projection steps
        for i in 0..n {
            xr_w[i] = alpha * x[i] + (1.0 - alpha) * w[i];
            tmp_n[i] = xr_w[i] + uw[i];
        }
        p.objective.prox_into(&tmp_n, 1.0 / rho, &mut w_new);
        for i in 0..m {
            yr[i] = alpha * mx[i] + (1.0 - alpha) * y[i];
            y_new[i] = yr[i] + uy[i];
        }
        p.set.project(&mut y_new);
        if let Some(r) = p.ball_radius {
            for i in 0..n {
                xr_z[i] = alpha * x[i] + (1.0 - alpha) * z[i];
                z_new[i] = xr_z[i] + uz[i];
            }
            project_ball(&mut z_new, r);
        }

        for i in 0..n {
            uw[i] += xr_w[i] - w_new[i];
        }
        for i in 0..m {
            uy[i] += yr[i] - y_new[i];
        }
        if has_ball {
            for i in 0..n {
                uz[i] += xr_z[i] - z_new[i];
            }
        }

        let check = iter % CHECK_EVERY == 0 || iter == cfg.max_iter;
        if check {
            // primal residual ‖Kx − v‖ and its scale
            let mut r_sq = 0.0;
            let mut kx_sq = 0.0;
            let mut v_sq = 0.0;
            for i in 0..n {
                r_sq += (x[i] - w_new[i]).powi(2);
                kx_sq += x[i] * x[i];
                v_sq += w_new[i] * w_new[i];
            }
            for i in 0..m {
                r_sq += (mx[i] - y_new[i]).powi(2);
                kx_sq += mx[i] * mx[i];
                v_sq += y_new[i] * y_new[i];
            }
            if has_ball {
                for i in 0..n {
                    r_sq += (x[i] - z_new[i]).powi(2);
                    kx_sq += x[i] * x[i];
                    v_sq += z_new[i] * z_new[i];
                }
            }
            primal_residual = r_sq.sqrt();

            // dual residual ρ‖Kᵀ(v_new − v)‖ and scale ρ‖u‖
            for i in 0..m {
                tmp_m[i] = y_new[i] - y[i];
            }
            if m > 0 {
                p.rows.matvec_t_into(&tmp_m, &mut tmp_n);
            } else {
                tmp_n.iter_mut().for_each(|v| *v = 0.0);
            }
            for i in 0..n {
                tmp_n[i] += w_new[i] - w[i];
                if has_ball {
                    tmp_n[i] += z_new[i] - z[i];
                }
            }
            dual_residual = rho * norm2(&tmp_n);
            let u_sq: f64 = uw.iter().chain(&uy).chain(&uz).map(|v| v * v).sum();
            let dual_scale = rho * u_sq.sqrt();

            if cfg.record_history {
                history.push(primal_residual + dual_residual);
            }

            if primal_residual <= cfg.tol_primal && dual_residual <= cfg.tol_dual * dual_scale.max(1.0) {
                return Ok(SplitOutcome {
                    x,
                    iterations: iter,
                    converged: true,
                    primal_residual,
                    dual_residual,
                    history,
                    row_dual: uy.iter().map(|v| v * rho).collect(),
                });
            }

            if cfg.adaptive_rho && iter % RHO_EVERY == 0 {
                let pri_rel = primal_residual / kx_sq.sqrt().max(v_sq.sqrt()).max(1e-30);
                let dua_rel = dual_residual / dual_scale.max(1e-30);
                let ratio = (pri_rel / dua_rel.max(1e-30)).sqrt();
                if !(0.2..=5.0).contains(&ratio) && ratio.is_finite() {
                    let new_rho = (rho * ratio).clamp(RHO_MIN, RHO_MAX);
                    let s = rho / new_rho;
                    uw.iter_mut().for_each(|v| *v *= s);
                    uy.iter_mut().for_each(|v| *v *= s);
                    uz.iter_mut().for_each(|v| *v *= s);
                    rho = new_rho;
                }
            }
        }

        std::mem::swap(&mut w, &mut w_new);
        std::mem::swap(&mut y, &mut y_new);
        if has_ball {
            std::mem::swap(&mut z, &mut z_new);
        }
    }

    Ok(SplitOutcome {
        x,
        iterations: cfg.max_iter,
        converged: false,
        primal_residual,
        dual_residual,
        history,
        row_dual: uy.iter().map(|v| v * rho).collect(),
    })
}
