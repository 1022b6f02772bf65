//! Auxiliary program for `Ax = a, Bx ≤ b` with fixed offsets.
//!
//! The constraint `gᵀx + K(‖x‖) ≤ 0` with
//! `K(r) = √(‖r·h_A + a‖² + ‖(r·h_B + b)₊‖²) ∓ r·ε₅√n` depends on `x` only
//! through `gᵀx` and `r = ‖x‖`, so for a linear objective the program is a
//! one-dimensional search over `r` with a closed-form inner problem on the
//! sphere of radius `r`.

use super::{AuxEvaluation, AuxSpec};
use crate::error::{Error, Result};
use crate::numerics::{brent_max, dot, norm2};
use crate::problem::ObjectiveSpec;
use crate::theory::Side;

const GRID: usize = 512;
const MAX_DOUBLINGS: usize = 40;
const R_TOL: f64 = 1e-12;

struct Inner<'a> {
    g: Vec<f64>,
    g_norm: f64,
    c_norm: f64,
    c_par: f64,
    c_perp: f64,
    h_a: &'a [f64],
    h_b: &'a [f64],
    a: &'a [f64],
    b: &'a [f64],
    eps_term: f64,
}

impl Inner<'_> {
    fn offset(&self, r: f64) -> f64 {
        let eq: f64 = self.h_a.iter().zip(self.a).map(|(h, a)| (r * h + a).powi(2)).sum();
        let ineq: f64 = self
            .h_b
            .iter()
            .zip(self.b)
            .map(|(h, b)| (r * h + b).max(0.0).powi(2))
            .sum();
        (eq + ineq).sqrt() - r * self.eps_term
    }

    /// `min cᵀx s.t. gᵀx ≤ −K(r), ‖x‖ = r`, or `+∞` when infeasible.
    fn value(&self, r: f64) -> f64 {
        let k = self.offset(r);
        if r == 0.0 {
            return if k <= 0.0 { 0.0 } else { f64::INFINITY };
        }
        if self.g_norm == 0.0 {
            return if k <= 0.0 { -r * self.c_norm } else { f64::INFINITY };
        }
        // bound on the cosine between the unit direction and ĝ
        let t_max = -k / (r * self.g_norm);
        if t_max < -1.0 {
            return f64::INFINITY;
        }
        if self.c_norm == 0.0 {
            return 0.0;
        }
        let t_free = -self.c_par / self.c_norm;
        let unit = if t_free <= t_max {
            -self.c_norm
        } else {
            self.c_par * t_max - self.c_perp * (1.0 - t_max * t_max).max(0.0).sqrt()
        };
        r * unit
    }
}

/// Nonhomogeneous auxiliary value inside the unit ball.
pub fn eval_aux_nonhomogeneous(
    g: &[f64],
    h_a: &[f64],
    h_b: &[f64],
    spec: &AuxSpec,
) -> Result<AuxEvaluation> {
    eval_aux_nonhomogeneous_with_ball(g, h_a, h_b, spec, Some(1.0))
}

/// As [`eval_aux_nonhomogeneous`] with an explicit ball radius; `None`
/// searches `r ∈ [0, 10(1 + max(‖a‖, ‖b‖)/√n)]`, doubling the range while
/// the best point sits on its right end.
pub fn eval_aux_nonhomogeneous_with_ball(
    g: &[f64],
    h_a: &[f64],
    h_b: &[f64],
    spec: &AuxSpec,
    ball_radius: Option<f64>,
) -> Result<AuxEvaluation> {
    spec.check_g(g)?;
    let Some((a, b)) = &spec.nonhomogeneous else {
        return Err(Error::config("nonhomogeneous evaluation needs offsets (a, b)"));
    };
    let n = g.len();
    let c = match &spec.objective {
        ObjectiveSpec::PurelyLinear => vec![1.0; n],
        ObjectiveSpec::GeneralLinear { c } => c.clone(),
        ObjectiveSpec::BpSplit { .. } => {
            return Err(Error::config(
                "nonhomogeneous evaluation supports linear objectives only",
            ))
        }
    };
    for (v, m, what) in [(h_a, a.len(), "h_A"), (h_b, b.len(), "h_B")] {
        if v.len() != m {
            return Err(Error::DimensionMismatch {
                what,
                expected: m,
                found: v.len(),
            });
        }
    }
    if let Some(r) = ball_radius {
        if !(r > 0.0) {
            return Err(Error::config("ball radius must be positive"));
        }
    }

    let sign = spec.g_sign();
    let g_eff: Vec<f64> = g.iter().map(|v| sign * v).collect();
    let g_norm = norm2(&g_eff);
    let c_norm = norm2(&c);
    let c_par = if g_norm > 0.0 { dot(&c, &g_eff) / g_norm } else { 0.0 };
    let sqrt_n = (n as f64).sqrt();
    let eps_term = match spec.side {
        Side::Lower => spec.eps.eps5_g * sqrt_n,
        Side::Upper => -spec.eps.eps5_g * sqrt_n,
    };
    let inner = Inner {
        g: g_eff,
        g_norm,
        c_norm,
        c_par,
        c_perp: (c_norm * c_norm - c_par * c_par).max(0.0).sqrt(),
        h_a,
        h_b,
        a,
        b,
        eps_term,
    };
    debug_assert_eq!(inner.g.len(), n);

    let mut r_max = match ball_radius {
        Some(r) => r,
        None => 10.0 * (1.0 + norm2(a).max(norm2(b)) / sqrt_n),
    };
    for _ in 0..=MAX_DOUBLINGS {
        let (r_hat, value) = search(&inner, r_max)?;
        let on_edge = r_hat >= r_max * (1.0 - 1.0 / GRID as f64);
        if ball_radius.is_some() || !on_edge {
            return Ok(AuxEvaluation {
                value,
                dual_scalar: r_hat,
                g_stream_id: 0,
                n,
            });
        }
        r_max *= 2.0;
    }
    Err(Error::UnboundedAux)
}

/// Grid scan of `[0, r_max]`, then Brent refinement around the best node.
fn search(inner: &Inner<'_>, r_max: f64) -> Result<(f64, f64)> {
    let step = r_max / GRID as f64;
    let mut best: Option<(usize, f64)> = None;
    for i in 0..=GRID {
        let v = inner.value(i as f64 * step);
        if v.is_finite() && best.map_or(true, |(_, bv)| v < bv) {
            best = Some((i, v));
        }
    }
    let Some((i, v)) = best else {
        return Err(Error::Infeasible(format!(
            "auxiliary constraint infeasible for every radius in [0, {r_max}]"
        )));
    };
    let lo = i.saturating_sub(1) as f64 * step;
    let hi = ((i + 1).min(GRID)) as f64 * step;
    let (r, neg, _) = brent_max(|r| -inner.value(r), lo, hi, R_TOL);
    if -neg < v {
        Ok((r, -neg))
    } else {
        Ok((i as f64 * step, v))
    }
}
