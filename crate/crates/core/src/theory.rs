//! Large-`n` limits of `ξ/√n` for the three built-in objectives.
//!
//! With `√D = (1 ∓ ε₁)·√(α₁ + α₂/2) ∓ ε₅` the purely linear objective has
//! the closed form `−√(1 − D)` (zero past the phase boundary `D = 1`); the
//! general linear one scales it by `C_gl = ‖c‖₂/√n`; the split objective
//! requires maximizing
//!
//! ```text
//! φ(θ) = θ⁻¹ · ( −√((1−β)·T(θ) + β(1+θ²)) + √D ),
//! T(θ) = (θ²+1)·erfc(θ/√2) − 2θ·pdf(θ) = E[(|g| − θ)₊²]
//! ```
//!
//! over `θ > 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{erfc, maximize_scalar, norm2, normal_pdf, DEFAULT_SCALAR_TOL};

/// Radicands of `√(1 − D)` within this distance below zero count as zero.
const BOUNDARY_GUARD: f64 = 1e-12;

/// Smallest θ probed by the split-objective search.
const THETA_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Interior,
    ClampedZero,
}

/// The two slack constants that survive into the auxiliary programs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EpsilonConfig {
    pub eps1_m: f64,
    pub eps5_g: f64,
}

impl EpsilonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps1_m >= 0.0) || !(self.eps5_g >= 0.0) {
            return Err(Error::config("epsilons must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryResult {
    pub xi_over_sqrt_n: f64,
    /// λ̂ for the linear objectives, θ̂ for the split one; 0 when clamped.
    pub optimizer: f64,
    pub branch: Branch,
    pub side: Side,
}

/// `√D`, floored at zero.
pub fn sqrt_d_factor(alpha1: f64, alpha2: f64, eps: EpsilonConfig, side: Side) -> f64 {
    let base = (alpha1 + alpha2 / 2.0).sqrt();
    let v = match side {
        Side::Lower => (1.0 - eps.eps1_m) * base - eps.eps5_g,
        Side::Upper => (1.0 + eps.eps1_m) * base + eps.eps5_g,
    };
    v.max(0.0)
}

/// `D = ((1 ∓ ε₁)√(α₁ + α₂/2) ∓ ε₅)²`
pub fn d_factor(alpha1: f64, alpha2: f64, eps: EpsilonConfig, side: Side) -> f64 {
    sqrt_d_factor(alpha1, alpha2, eps, side).powi(2)
}

fn check_shape(alpha1: f64, alpha2: f64, eps: EpsilonConfig) -> Result<()> {
    if !(alpha1 >= 0.0 && alpha2 >= 0.0) || !alpha1.is_finite() || !alpha2.is_finite() {
        return Err(Error::config(format!(
            "alpha1, alpha2 must be finite and non-negative (got {alpha1}, {alpha2})"
        )));
    }
    eps.validate()
}

/// Limit for `f(x) = Σ xᵢ` given `D`.
fn xi_lp_from_d(d: f64, side: Side) -> TheoryResult {
    let gap = 1.0 - d;
    if gap <= BOUNDARY_GUARD {
        return TheoryResult {
            xi_over_sqrt_n: 0.0,
            optimizer: 0.0,
            branch: Branch::ClampedZero,
            side,
        };
    }
    TheoryResult {
        xi_over_sqrt_n: -gap.sqrt(),
        optimizer: (d / gap).sqrt(),
        branch: Branch::Interior,
        side,
    }
}

pub fn xi_lp(alpha1: f64, alpha2: f64, eps: EpsilonConfig, side: Side) -> Result<TheoryResult> {
    check_shape(alpha1, alpha2, eps)?;
    Ok(xi_lp_from_d(d_factor(alpha1, alpha2, eps, side), side))
}

/// General linear objective: the purely linear limit scaled by `‖c‖₂/√n`.
pub fn xi_gl(
    c: &[f64],
    alpha1: f64,
    alpha2: f64,
    eps: EpsilonConfig,
    side: Side,
) -> Result<TheoryResult> {
    if c.is_empty() {
        return Err(Error::EmptyDimension);
    }
    let c_gl = norm2(c) / (c.len() as f64).sqrt();
    if !(c_gl > 0.0) {
        return Err(Error::config("general linear objective needs c != 0"));
    }
    let mut r = xi_lp(alpha1, alpha2, eps, side)?;
    r.xi_over_sqrt_n *= c_gl;
    r.optimizer *= c_gl;
    Ok(r)
}

/// `T(θ) = 2∫_θ^∞ (t − θ)² pdf(t) dt = (θ²+1)·erfc(θ/√2) − 2θ·pdf(θ)`.
pub fn truncated_second_moment(theta: f64) -> f64 {
    let v = (theta * theta + 1.0) * erfc(theta / std::f64::consts::SQRT_2)
        - 2.0 * theta * normal_pdf(theta);
    v.max(0.0)
}

/// `φ(θ)` for the split objective; `d` is the squared factor `D`.
pub fn phi_bp(theta: f64, beta: f64, d: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::config(format!("phi needs theta > 0 (got {theta})")));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::config(format!("beta must lie in [0, 1] (got {beta})")));
    }
    Ok(phi_unchecked(theta, beta, d.max(0.0).sqrt()))
}

fn phi_unchecked(theta: f64, beta: f64, sqrt_d: f64) -> f64 {
    let norm_sq = (1.0 - beta) * truncated_second_moment(theta) + beta * (1.0 + theta * theta);
    (-norm_sq.sqrt() + sqrt_d) / theta
}

pub fn xi_bp(
    beta: f64,
    alpha1: f64,
    alpha2: f64,
    eps: EpsilonConfig,
    side: Side,
) -> Result<TheoryResult> {
    check_shape(alpha1, alpha2, eps)?;
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::config(format!("beta must lie in [0, 1] (got {beta})")));
    }
    if beta > alpha1 {
        log::warn!("beta = {beta} exceeds alpha1 = {alpha1}; outside the standing assumption");
    }
    let sqrt_d = sqrt_d_factor(alpha1, alpha2, eps, side);
    let phi = |t: f64| phi_unchecked(t, beta, sqrt_d);
    debug_assert!(unimodal_on_grid(&phi), "phi is not unimodal for beta={beta}, sqrtD={sqrt_d}");
    let best = maximize_scalar(phi, THETA_FLOOR, 1.0, DEFAULT_SCALAR_TOL)?;
    if best.value >= 0.0 {
        return Ok(TheoryResult {
            xi_over_sqrt_n: 0.0,
            optimizer: 0.0,
            branch: Branch::ClampedZero,
            side,
        });
    }
    Ok(TheoryResult {
        xi_over_sqrt_n: best.value,
        optimizer: best.argopt,
        branch: Branch::Interior,
        side,
    })
}

/// Coarse 64-point log-grid scan: values rise then fall (up to round-off).
fn unimodal_on_grid(phi: &impl Fn(f64) -> f64) -> bool {
    let vals: Vec<f64> = (0..64)
        .map(|i| phi(10f64.powf(-3.0 + 6.0 * i as f64 / 63.0)))
        .collect();
    let mut descending = false;
    for w in vals.windows(2) {
        let slack = 1e-12 * w[0].abs().max(1.0);
        if w[1] < w[0] - slack {
            descending = true;
        } else if descending && w[1] > w[0] + slack {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZERO: EpsilonConfig = EpsilonConfig {
        eps1_m: 0.0,
        eps5_g: 0.0,
    };

    #[test]
    fn d_factor_examples() {
        assert!((d_factor(0.5, 0.5, ZERO, Side::Lower) - 0.75).abs() < 1e-15);
        assert!((d_factor(0.5, 1.0, ZERO, Side::Lower) - 1.0).abs() < 1e-15);
        let eps = EpsilonConfig {
            eps1_m: 0.01,
            eps5_g: 0.0,
        };
        let lo = d_factor(0.5, 0.5, eps, Side::Lower);
        let mid = d_factor(0.5, 0.5, ZERO, Side::Lower);
        let hi = d_factor(0.5, 0.5, eps, Side::Upper);
        assert!(lo < mid && mid < hi);
    }

    #[test]
    fn xi_lp_examples() {
        let r = xi_lp(0.5, 0.6, ZERO, Side::Lower).unwrap();
        assert!((r.xi_over_sqrt_n + 0.4472).abs() < 5e-5);
        assert_eq!(r.branch, Branch::Interior);
        let r = xi_lp(0.5, 0.8, ZERO, Side::Lower).unwrap();
        assert!((r.xi_over_sqrt_n + 0.3162).abs() < 5e-5);
        let r = xi_lp(0.5, 1.2, ZERO, Side::Lower).unwrap();
        assert_eq!(r.xi_over_sqrt_n, 0.0);
        assert_eq!(r.branch, Branch::ClampedZero);
        let r = xi_lp(0.5, 1.0, ZERO, Side::Upper).unwrap();
        assert_eq!(r.branch, Branch::ClampedZero);
    }

    #[test]
    fn lp_optimizer_is_stationary() {
        let r = xi_lp(0.3, 0.2, ZERO, Side::Lower).unwrap();
        let sd = sqrt_d_factor(0.3, 0.2, ZERO, Side::Lower);
        let l = r.optimizer;
        assert!((l / (1.0 + l * l).sqrt() - sd).abs() < 1e-12);
        assert!((-(1.0 + l * l).sqrt() + l * sd - r.xi_over_sqrt_n).abs() < 1e-12);
    }

    #[test]
    fn xi_gl_examples() {
        let ones = vec![1.0; 50];
        let a = xi_gl(&ones, 0.5, 0.7, ZERO, Side::Lower).unwrap();
        let b = xi_lp(0.5, 0.7, ZERO, Side::Lower).unwrap();
        assert_eq!(a.xi_over_sqrt_n, b.xi_over_sqrt_n);
        let twos = vec![2.0; 50];
        let r = xi_gl(&twos, 0.5, 0.5, ZERO, Side::Lower).unwrap();
        assert!((r.xi_over_sqrt_n + 1.0).abs() < 1e-12);
        let c: Vec<f64> = (0..30).map(|i| (i as f64).sin() + 0.1).collect();
        let c3: Vec<f64> = c.iter().map(|v| 3.0 * v).collect();
        let r1 = xi_gl(&c, 0.2, 0.4, ZERO, Side::Lower).unwrap();
        let r3 = xi_gl(&c3, 0.2, 0.4, ZERO, Side::Lower).unwrap();
        assert!((r3.xi_over_sqrt_n - 3.0 * r1.xi_over_sqrt_n).abs() < 1e-12);
        assert!(xi_gl(&[0.0, 0.0], 0.5, 0.5, ZERO, Side::Lower).is_err());
    }

    #[test]
    fn truncated_moment_edges() {
        assert!((truncated_second_moment(0.0) - 1.0).abs() < 1e-15);
        assert!(truncated_second_moment(10.0) < 1e-20);
    }

    #[test]
    fn phi_reduces_to_linear_form_at_beta_one() {
        let d: f64 = 0.6;
        for theta in [0.1f64, 0.5, 1.0, 3.0] {
            let want = (-(1.0 + theta * theta).sqrt() + d.sqrt()) / theta;
            assert!((phi_bp(theta, 1.0, d).unwrap() - want).abs() < 1e-14);
        }
        assert!(phi_bp(0.0, 0.5, 0.5).is_err());
        assert!(phi_bp(-1.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn phi_finite_on_grid() {
        for i in 1..200 {
            let theta = i as f64 * 0.05;
            assert!(phi_bp(theta, 0.5, 0.75).unwrap().is_finite());
        }
    }

    #[test]
    fn xi_bp_examples() {
        for (beta, want) in [(0.42, -0.0189), (0.5, -0.0936), (0.7, -0.2672), (1.0, -0.5)] {
            let r = xi_bp(beta, 0.5, 0.5, ZERO, Side::Lower).unwrap();
            assert!((r.xi_over_sqrt_n - want).abs() < 5e-5, "beta={beta}: {r:?}");
        }
    }

    #[test]
    fn xi_bp_past_the_boundary_clamps() {
        let r = xi_bp(0.1, 0.5, 1.5, ZERO, Side::Lower).unwrap();
        assert_eq!(r.branch, Branch::ClampedZero);
        assert_eq!(r.xi_over_sqrt_n, 0.0);
    }

    #[test]
    fn bounds_match_at_zero_epsilon() {
        for a2 in [0.1, 0.5, 0.9, 1.3] {
            let l = xi_lp(0.4, a2, ZERO, Side::Lower).unwrap();
            let u = xi_lp(0.4, a2, ZERO, Side::Upper).unwrap();
            assert_eq!(l.xi_over_sqrt_n, u.xi_over_sqrt_n);
            let l = xi_bp(0.3, 0.4, a2, ZERO, Side::Lower).unwrap();
            let u = xi_bp(0.3, 0.4, a2, ZERO, Side::Upper).unwrap();
            assert_eq!(l.xi_over_sqrt_n, u.xi_over_sqrt_n);
        }
    }

    #[test]
    fn monotone_in_alpha2() {
        let mut prev_lp = f64::NEG_INFINITY;
        let mut prev_bp = f64::NEG_INFINITY;
        for i in 0..20 {
            let a2 = i as f64 * 0.1;
            let lp = xi_lp(0.3, a2, ZERO, Side::Lower).unwrap().xi_over_sqrt_n;
            let bp = xi_bp(0.2, 0.3, a2, ZERO, Side::Lower).unwrap().xi_over_sqrt_n;
            // More constraints can only push the (negative) optimum up toward zero.
            assert!(lp >= prev_lp - 1e-12);
            assert!(bp >= prev_bp - 1e-9);
            prev_lp = lp;
            prev_bp = bp;
        }
    }

    #[test]
    fn bp_at_full_beta_matches_lp_on_grid() {
        for (a1, a2) in [
            (0.1, 0.1),
            (0.2, 0.5),
            (0.3, 0.2),
            (0.5, 0.5),
            (0.5, 0.8),
            (0.6, 0.1),
            (0.7, 0.3),
            (0.05, 1.2),
            (0.4, 1.0),
            (0.8, 0.3),
        ] {
            let lp = xi_lp(a1, a2, ZERO, Side::Lower).unwrap().xi_over_sqrt_n;
            let bp = xi_bp(1.0, a1, a2, ZERO, Side::Lower).unwrap().xi_over_sqrt_n;
            assert!((lp - bp).abs() < 1e-6, "({a1},{a2}): {lp} vs {bp}");
        }
    }
}
