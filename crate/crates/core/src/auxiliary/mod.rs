//! Finite-`n` auxiliary programs: one Gaussian linear constraint plus the ball.
//!
//! For the homogeneous program the lower-side auxiliary value is
//!
//! ```text
//! min f(x)  s.t.  gᵀx + K ≤ 0,  ‖x‖₂ ≤ 1,     K = (1 − ε₁)√(m₁ + m₂/2) − ε₅√n
//! ```
//!
//! and the upper side flips the sign of `g` and of the slack terms. Its
//! optimum divided by `√n` estimates the same constant as the direct solve.

mod gordon;
mod nonhom;

pub use gordon::{comparison_samples_for, gordon_check, wilson_interval, GordonCheckSpec, GordonReport};
pub use nonhom::{eval_aux_nonhomogeneous, eval_aux_nonhomogeneous_with_ball};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{maximize_scalar, norm2, DenseMatrix};
use crate::primal::{solve_split, RowSet, SolverConfig, SplitProblem};
use crate::problem::{ObjectiveSpec, ShapeConfig};
use crate::theory::{EpsilonConfig, Side};

const LAMBDA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxSpec {
    pub side: Side,
    pub shape: ShapeConfig,
    pub eps: EpsilonConfig,
    pub objective: ObjectiveSpec,
    /// Offsets `(a, b)` of a nonhomogeneous program.
    pub nonhomogeneous: Option<(Vec<f64>, Vec<f64>)>,
}

impl AuxSpec {
    pub fn new(side: Side, shape: ShapeConfig, eps: EpsilonConfig, objective: ObjectiveSpec) -> Self {
        Self {
            side,
            shape,
            eps,
            objective,
            nonhomogeneous: None,
        }
    }

    pub fn with_offsets(mut self, a: Vec<f64>, b: Vec<f64>) -> Self {
        self.nonhomogeneous = Some((a, b));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.shape.n == 0 {
            return Err(Error::EmptyDimension);
        }
        self.eps.validate()?;
        self.objective.check_dim(self.shape.n)?;
        if let Some((a, b)) = &self.nonhomogeneous {
            for (v, m, what) in [(a, self.shape.m1(), "offset a"), (b, self.shape.m2(), "offset b")] {
                if v.len() != m {
                    return Err(Error::DimensionMismatch {
                        what,
                        expected: m,
                        found: v.len(),
                    });
                }
            }
        }
        Ok(())
    }

    /// `+1` on the lower side, `−1` on the upper side.
    pub fn g_sign(&self) -> f64 {
        match self.side {
            Side::Lower => 1.0,
            Side::Upper => -1.0,
        }
    }

    /// `K = (1 ∓ ε₁)√(m₁ + m₂/2) ∓ ε₅√n`
    pub fn offset_k(&self) -> f64 {
        let base = (self.shape.m1() as f64 + self.shape.m2() as f64 / 2.0).sqrt();
        let slack = self.eps.eps5_g * (self.shape.n as f64).sqrt();
        match self.side {
            Side::Lower => (1.0 - self.eps.eps1_m) * base - slack,
            Side::Upper => (1.0 + self.eps.eps1_m) * base + slack,
        }
    }

    fn check_g(&self, g: &[f64]) -> Result<()> {
        self.validate()?;
        if g.len() != self.shape.n {
            return Err(Error::DimensionMismatch {
                what: "auxiliary vector g",
                expected: self.shape.n,
                found: g.len(),
            });
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("auxiliary vector g"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxEvaluation {
    /// Optimal auxiliary objective, on the `√n` scale of `ξ`.
    pub value: f64,
    /// λ̂ (linear), θ̂ = 1/λ̂ (split objective) or r̂ = ‖x̂‖ (nonhomogeneous).
    pub dual_scalar: f64,
    pub g_stream_id: u64,
    pub n: usize,
}

impl AuxEvaluation {
    pub fn with_stream(mut self, id: u64) -> Self {
        self.g_stream_id = id;
        self
    }

    pub fn value_over_sqrt_n(&self) -> f64 {
        self.value / (self.n as f64).sqrt()
    }
}

/// `max_{λ≥0} −‖1 + λg‖₂ + λK`, solved in closed form.
///
/// With `s = Σgᵢ`, `q = ‖g‖²` the stationarity condition is a quadratic in
/// `s + λq`; the maximum sits at `λ = 0` when the slope there is not positive.
pub fn eval_aux_lp(g: &[f64], spec: &AuxSpec) -> Result<AuxEvaluation> {
    spec.check_g(g)?;
    if !matches!(spec.objective, ObjectiveSpec::PurelyLinear) {
        return Err(Error::config("eval_aux_lp needs the purely linear objective"));
    }
    let n = g.len() as f64;
    let sign = spec.g_sign();
    let s: f64 = g.iter().map(|v| sign * v).sum();
    let q: f64 = g.iter().map(|v| v * v).sum();
    let c = spec.offset_k();
    if c * c >= q && c > 0.0 {
        return Err(Error::UnboundedAux);
    }
    let (value, lambda) = if c - s / n.sqrt() <= 0.0 {
        (-n.sqrt(), 0.0)
    } else {
        let spread = ((q * n - s * s).max(0.0) / (q - c * c)).sqrt();
        let lambda = (c * spread - s) / q;
        (-spread + c * lambda, lambda)
    };
    Ok(AuxEvaluation {
        value,
        dual_scalar: lambda,
        g_stream_id: 0,
        n: g.len(),
    })
}

/// Split-objective auxiliary value, maximized over `λ = 1/θ ≥ 0`:
///
/// ```text
/// h(λ) = −√(Σ_{i<n−k} (λ|gᵢ| − 1)₊² + Σ_{i≥n−k} (1 + λgᵢ)²) + λK
/// ```
///
/// `h` is concave and tends to `λ(K − ‖g‖)`, so it is bounded iff `K < ‖g‖`.
pub fn eval_aux_bp(g: &[f64], spec: &AuxSpec) -> Result<AuxEvaluation> {
    spec.check_g(g)?;
    let ObjectiveSpec::BpSplit { k } = spec.objective else {
        return Err(Error::config("eval_aux_bp needs the split objective"));
    };
    let sign = spec.g_sign();
    let c = spec.offset_k();
    if c >= norm2(g) {
        return Err(Error::UnboundedAux);
    }
    let split = g.len() - k;
    let h = |lambda: f64| -> f64 {
        let abs_part: f64 = g[..split]
            .iter()
            .map(|v| (lambda * v.abs() - 1.0).max(0.0).powi(2))
            .sum();
        let lin_part: f64 = g[split..].iter().map(|v| (1.0 + lambda * sign * v).powi(2)).sum();
        -(abs_part + lin_part).sqrt() + lambda * c
    };
    let opt = maximize_scalar(h, 0.0, 1.0, LAMBDA_TOL).map_err(|e| match e {
        Error::UnboundedMaximum { .. } => Error::UnboundedAux,
        other => other,
    })?;
    let theta = if opt.argopt > 0.0 { 1.0 / opt.argopt } else { f64::INFINITY };
    Ok(AuxEvaluation {
        value: opt.value,
        dual_scalar: theta,
        g_stream_id: 0,
        n: g.len(),
    })
}

/// Auxiliary program for any prox-capable objective, solved with the
/// splitting solver at its default settings.
pub fn eval_aux_general(g: &[f64], spec: &AuxSpec) -> Result<AuxEvaluation> {
    eval_aux_general_with(g, spec, &SolverConfig::default())
}

pub fn eval_aux_general_with(g: &[f64], spec: &AuxSpec, cfg: &SolverConfig) -> Result<AuxEvaluation> {
    spec.check_g(g)?;
    eval_aux_general_with_offset(g, spec.g_sign(), spec.offset_k(), &spec.objective, cfg)
}

/// `min f(x) s.t. sign·gᵀx + offset ≤ 0, ‖x‖₂ ≤ 1` with an explicit offset.
///
/// Infeasible programs (`offset > ‖g‖`) are the ones whose dual is
/// unbounded and come back as [`Error::UnboundedAux`].
pub fn eval_aux_general_with_offset(
    g: &[f64],
    sign: f64,
    offset: f64,
    objective: &ObjectiveSpec,
    cfg: &SolverConfig,
) -> Result<AuxEvaluation> {
    cfg.validate()?;
    objective.check_dim(g.len())?;
    if offset > norm2(g) {
        return Err(Error::UnboundedAux);
    }
    let sigma = 1.0 / (g.len() as f64).sqrt();
    let row: Vec<f64> = g.iter().map(|v| sign * sigma * v).collect();
    let problem = SplitProblem {
        rows: DenseMatrix::from_row_major(1, g.len(), row)?,
        set: RowSet::Polyhedral {
            m1: 0,
            eq: Vec::new(),
            ub: vec![-sigma * offset],
        },
        objective,
        ball_radius: Some(1.0),
    };
    let out = solve_split(&problem, cfg)?;
    if !out.converged {
        return Err(Error::NonConverged {
            iterations: out.iterations,
            primal_residual: out.primal_residual,
            dual_residual: out.dual_residual,
        });
    }
    Ok(AuxEvaluation {
        value: objective.evaluate(&out.x)?,
        dual_scalar: (out.row_dual[0] * sigma).max(0.0),
        g_stream_id: 0,
        n: g.len(),
    })
}

/// Dispatches to the closed form when one exists.
pub fn eval_aux(g: &[f64], spec: &AuxSpec, cfg: &SolverConfig) -> Result<AuxEvaluation> {
    match spec.objective {
        ObjectiveSpec::PurelyLinear => eval_aux_lp(g, spec),
        ObjectiveSpec::BpSplit { .. } => eval_aux_bp(g, spec),
        ObjectiveSpec::GeneralLinear { .. } => eval_aux_general_with(g, spec, cfg),
    }
}
