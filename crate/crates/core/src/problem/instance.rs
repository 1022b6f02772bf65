use serde::{Deserialize, Serialize};

use super::ObjectiveSpec;
use crate::error::{Error, Result};
use crate::numerics::{dot, norm2, DenseMatrix, RngStream};

/// `m = round(α·n)` with halves rounded up.
pub fn proportional_count(ratio: f64, n: usize) -> usize {
    (ratio * n as f64 + 0.5).floor() as usize
}

/// Problem dimensions in the proportional regime `m₁ = α₁n`, `m₂ = α₂n`, `k = βn`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeConfig {
    pub n: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Fraction of signed (non-absolute) coordinates for the split objective.
    pub beta: Option<f64>,
}

impl ShapeConfig {
    pub fn new(n: usize, alpha1: f64, alpha2: f64) -> Self {
        Self {
            n,
            alpha1,
            alpha2,
            beta: None,
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn m1(&self) -> usize {
        proportional_count(self.alpha1, self.n)
    }

    pub fn m2(&self) -> usize {
        proportional_count(self.alpha2, self.n)
    }

    pub fn k(&self) -> Option<usize> {
        self.beta.map(|b| proportional_count(b, self.n))
    }

    /// Structural validation. `allow_beta_above_alpha1` lifts the standing
    /// `β ≤ α₁` assumption (the published β sweep runs past it).
    pub fn validate(&self, allow_beta_above_alpha1: bool) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyDimension);
        }
        if !(self.alpha1 >= 0.0) || !(self.alpha2 >= 0.0) {
            return Err(Error::config(format!(
                "alpha1, alpha2 must be non-negative (got {}, {})",
                self.alpha1, self.alpha2
            )));
        }
        if !self.alpha1.is_finite() || !self.alpha2.is_finite() {
            return Err(Error::config("alpha1, alpha2 must be finite"));
        }
        if let Some(beta) = self.beta {
            if !(0.0..=1.0).contains(&beta) {
                return Err(Error::config(format!("beta must lie in [0, 1] (got {beta})")));
            }
            if beta > self.alpha1 && !allow_beta_above_alpha1 {
                return Err(Error::config(format!(
                    "beta ({beta}) exceeds alpha1 ({}); pass the override to sample anyway",
                    self.alpha1
                )));
            }
        }
        if self.m1() > self.n {
            return Err(Error::config(format!(
                "m1 = {} exceeds n = {}; equality constraints would pin x = 0",
                self.m1(),
                self.n
            )));
        }
        Ok(())
    }
}

/// Knobs for [`sample_instance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOptions {
    pub ball_bound: bool,
    /// Required to sample a homogeneous program without the ball.
    pub allow_unbounded: bool,
    pub allow_beta_above_alpha1: bool,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            ball_bound: true,
            allow_unbounded: false,
            allow_beta_above_alpha1: false,
        }
    }
}

/// One sampled program `min f(x) s.t. Ax = a, Bx ≤ b [, ‖x‖ ≤ r]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub n: usize,
    pub a_mat: DenseMatrix,
    pub b_mat: DenseMatrix,
    pub a_vec: Vec<f64>,
    pub b_vec: Vec<f64>,
    pub objective: ObjectiveSpec,
    pub ball_bound: bool,
    pub ball_radius: f64,
}

impl ProblemInstance {
    pub fn new(
        a_mat: DenseMatrix,
        b_mat: DenseMatrix,
        a_vec: Vec<f64>,
        b_vec: Vec<f64>,
        objective: ObjectiveSpec,
        ball_bound: bool,
    ) -> Result<Self> {
        let n = if a_mat.rows() > 0 { a_mat.cols() } else { b_mat.cols() };
        let inst = Self {
            n,
            a_mat,
            b_mat,
            a_vec,
            b_vec,
            objective,
            ball_bound,
            ball_radius: 1.0,
        };
        inst.check()?;
        Ok(inst)
    }

    /// Instance with no equality or inequality rows.
    pub fn ball_only(n: usize, objective: ObjectiveSpec) -> Result<Self> {
        let inst = Self {
            n,
            a_mat: DenseMatrix::zeros(0, n),
            b_mat: DenseMatrix::zeros(0, n),
            a_vec: Vec::new(),
            b_vec: Vec::new(),
            objective,
            ball_bound: true,
            ball_radius: 1.0,
        };
        inst.check()?;
        Ok(inst)
    }

    pub fn m1(&self) -> usize {
        self.a_mat.rows()
    }

    pub fn m2(&self) -> usize {
        self.b_mat.rows()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.a_vec.iter().all(|&v| v == 0.0) && self.b_vec.iter().all(|&v| v == 0.0)
    }

    pub fn with_ball_radius(mut self, r: f64) -> Self {
        self.ball_radius = r;
        self
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyDimension);
        }
        for (m, what) in [(&self.a_mat, "A columns"), (&self.b_mat, "B columns")] {
            if m.rows() > 0 && m.cols() != self.n {
                return Err(Error::DimensionMismatch {
                    what,
                    expected: self.n,
                    found: m.cols(),
                });
            }
        }
        if self.a_vec.len() != self.m1() {
            return Err(Error::DimensionMismatch {
                what: "equality offset a",
                expected: self.m1(),
                found: self.a_vec.len(),
            });
        }
        if self.b_vec.len() != self.m2() {
            return Err(Error::DimensionMismatch {
                what: "inequality offset b",
                expected: self.m2(),
                found: self.b_vec.len(),
            });
        }
        if !(self.ball_radius > 0.0) {
            return Err(Error::config("ball radius must be positive"));
        }
        self.objective.check_dim(self.n)
    }
}

/// Draws `A` then `B` (row-major) from `stream`.
pub fn sample_instance(
    cfg: &ShapeConfig,
    objective: &ObjectiveSpec,
    stream: &mut RngStream,
    offsets: Option<(Vec<f64>, Vec<f64>)>,
    opts: SampleOptions,
) -> Result<ProblemInstance> {
    let is_bp = matches!(objective, ObjectiveSpec::BpSplit { .. });
    if is_bp && cfg.beta.is_some() {
        cfg.validate(opts.allow_beta_above_alpha1)?;
    } else {
        ShapeConfig { beta: None, ..*cfg }.validate(true)?;
    }
    objective.check_dim(cfg.n)?;
    let (n, m1, m2) = (cfg.n, cfg.m1(), cfg.m2());
    let (a_vec, b_vec) = match offsets {
        Some((a, b)) => (a, b),
        None => (vec![0.0; m1], vec![0.0; m2]),
    };
    let homogeneous = a_vec.iter().chain(&b_vec).all(|&v| v == 0.0);
    if !opts.ball_bound && homogeneous && !opts.allow_unbounded {
        return Err(Error::config(
            "homogeneous objective without the ball constraint is unbounded; \
             set allow_unbounded to sample it anyway",
        ));
    }

    let mut a_data = vec![0.0; m1 * n];
    stream.fill_gaussian(&mut a_data);
    let mut b_data = vec![0.0; m2 * n];
    stream.fill_gaussian(&mut b_data);

    let inst = ProblemInstance {
        n,
        a_mat: DenseMatrix::from_row_major(m1, n, a_data)?,
        b_mat: DenseMatrix::from_row_major(m2, n, b_data)?,
        a_vec,
        b_vec,
        objective: objective.clone(),
        ball_bound: opts.ball_bound,
        ball_radius: 1.0,
    };
    inst.check()?;
    Ok(inst)
}

/// Householder reflector `Q = I − 2wwᵀ/‖w‖²`; symmetric and orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Reflector {
    w: Vec<f64>,
    w_norm_sq: f64,
}

impl Reflector {
    /// Reflector mapping the unit vector `from` onto the unit vector `to`.
    pub fn between(from: &[f64], to: &[f64]) -> Self {
        let w: Vec<f64> = from.iter().zip(to).map(|(f, t)| f - t).collect();
        let w_norm_sq = dot(&w, &w);
        Self { w, w_norm_sq }
    }

    pub fn is_identity(&self) -> bool {
        self.w_norm_sq <= 1e-30
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        if self.is_identity() {
            return x.to_vec();
        }
        let s = 2.0 * dot(&self.w, x) / self.w_norm_sq;
        x.iter().zip(&self.w).map(|(xi, wi)| xi - s * wi).collect()
    }

    /// `M Q` (= `M Qᵀ`, Q being symmetric), applied row by row.
    pub fn apply_to_rows(&self, m: &DenseMatrix) -> DenseMatrix {
        let mut out = m.clone();
        if self.is_identity() || m.rows() == 0 {
            return out;
        }
        let cols = m.cols();
        for row in out.as_mut_slice().chunks_exact_mut(cols) {
            let r = self.apply(row);
            row.copy_from_slice(&r);
        }
        out
    }
}

/// A general-linear instance rewritten with the purely linear objective.
#[derive(Debug, Clone)]
pub struct RotatedInstance {
    pub instance: ProblemInstance,
    /// `C_gl = ‖c‖₂/√n`
    pub scale: f64,
    pub reflector: Reflector,
}

impl RotatedInstance {
    /// Maps an original-space point to the rotated coordinates, `Qx`.
    pub fn rotate_point(&self, x: &[f64]) -> Vec<f64> {
        self.reflector.apply(x)
    }
}

/// Rewrites `min cᵀx` as `C_gl · min 1ᵀx_rot` with `A_rot = AQᵀ`, `B_rot = BQᵀ`.
pub fn rotate_to_canonical(inst: &ProblemInstance) -> Result<RotatedInstance> {
    let ObjectiveSpec::GeneralLinear { c } = &inst.objective else {
        return Err(Error::config("rotation needs a general linear objective"));
    };
    let n = inst.n;
    let c_norm = norm2(c);
    if !(c_norm > 0.0) {
        return Err(Error::config("rotation needs c != 0"));
    }
    let u: Vec<f64> = c.iter().map(|v| v / c_norm).collect();
    let e = vec![1.0 / (n as f64).sqrt(); n];
    let reflector = Reflector::between(&u, &e);
    let instance = ProblemInstance {
        n,
        a_mat: reflector.apply_to_rows(&inst.a_mat),
        b_mat: reflector.apply_to_rows(&inst.b_mat),
        a_vec: inst.a_vec.clone(),
        b_vec: inst.b_vec.clone(),
        objective: ObjectiveSpec::PurelyLinear,
        ball_bound: inst.ball_bound,
        ball_radius: inst.ball_radius,
    };
    Ok(RotatedInstance {
        instance,
        scale: c_norm / (n as f64).sqrt(),
        reflector,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gaussian_vector;

    #[test]
    fn table_shape() {
        let cfg = ShapeConfig::new(200, 0.5, 0.5);
        let inst = sample_instance(
            &cfg,
            &ObjectiveSpec::PurelyLinear,
            &mut RngStream::new(1, 0),
            None,
            SampleOptions::default(),
        )
        .unwrap();
        assert_eq!((inst.a_mat.rows(), inst.a_mat.cols()), (100, 200));
        assert_eq!((inst.b_mat.rows(), inst.b_mat.cols()), (100, 200));
        assert!(inst.ball_bound);
        assert!(inst.is_homogeneous());
    }

    #[test]
    fn empty_equality_block() {
        let cfg = ShapeConfig::new(10, 0.0, 0.3);
        let inst = sample_instance(
            &cfg,
            &ObjectiveSpec::PurelyLinear,
            &mut RngStream::new(1, 0),
            None,
            SampleOptions::default(),
        )
        .unwrap();
        assert_eq!(inst.m1(), 0);
        assert_eq!(inst.m2(), 3);
    }

    #[test]
    fn deterministic_sampling() {
        let cfg = ShapeConfig::new(12, 0.5, 0.25);
        let draw = || {
            sample_instance(
                &cfg,
                &ObjectiveSpec::PurelyLinear,
                &mut RngStream::new(99, 4),
                None,
                SampleOptions::default(),
            )
            .unwrap()
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn rounding_half_up() {
        assert_eq!(proportional_count(0.5, 5), 3);
        assert_eq!(proportional_count(0.42, 200), 84);
        assert_eq!(proportional_count(0.0, 7), 0);
    }

    #[test]
    fn beta_above_alpha1_needs_override() {
        let cfg = ShapeConfig::new(20, 0.5, 0.5).with_beta(0.7);
        let obj = ObjectiveSpec::BpSplit { k: cfg.k().unwrap() };
        let mut s = RngStream::new(1, 0);
        let err = sample_instance(&cfg, &obj, &mut s, None, SampleOptions::default());
        assert!(matches!(err, Err(Error::InvalidConfig(_))));
        let opts = SampleOptions {
            allow_beta_above_alpha1: true,
            ..Default::default()
        };
        assert!(sample_instance(&cfg, &obj, &mut s, None, opts).is_ok());
    }

    #[test]
    fn unbounded_homogeneous_refused() {
        let cfg = ShapeConfig::new(8, 0.25, 0.25);
        let opts = SampleOptions {
            ball_bound: false,
            ..Default::default()
        };
        let mut s = RngStream::new(1, 0);
        assert!(sample_instance(&cfg, &ObjectiveSpec::PurelyLinear, &mut s, None, opts).is_err());
        let opts = SampleOptions {
            allow_unbounded: true,
            ..opts
        };
        assert!(sample_instance(&cfg, &ObjectiveSpec::PurelyLinear, &mut s, None, opts).is_ok());
    }

    #[test]
    fn pooled_entry_moments() {
        let cfg = ShapeConfig::new(40, 0.5, 0.5);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut count = 0.0;
        for t in 0..100 {
            let inst = sample_instance(
                &cfg,
                &ObjectiveSpec::PurelyLinear,
                &mut RngStream::new(20240601, t),
                None,
                SampleOptions::default(),
            )
            .unwrap();
            for v in inst.a_mat.as_slice() {
                sum += v;
                sum_sq += v * v;
                count += 1.0;
            }
        }
        let mean = sum / count;
        let var = sum_sq / count - mean * mean;
        assert!(mean.abs() < 0.02, "{mean}");
        assert!(var > 0.98 && var < 1.02, "{var}");
    }

    fn gl_instance(c: Vec<f64>, seed: u64) -> ProblemInstance {
        let cfg = ShapeConfig::new(c.len(), 0.25, 0.25);
        sample_instance(
            &cfg,
            &ObjectiveSpec::general_linear(c).unwrap(),
            &mut RngStream::new(seed, 0),
            None,
            SampleOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn all_ones_is_already_canonical() {
        let inst = gl_instance(vec![1.0; 8], 3);
        let rot = rotate_to_canonical(&inst).unwrap();
        assert!(rot.reflector.is_identity());
        assert!((rot.scale - 1.0).abs() < 1e-15);
        assert_eq!(rot.instance.a_mat, inst.a_mat);
    }

    #[test]
    fn rotation_identity_on_objective() {
        let mut s = RngStream::new(11, 0);
        let c = gaussian_vector(&mut s, 10).unwrap();
        let x = gaussian_vector(&mut s, 10).unwrap();
        let inst = gl_instance(c.clone(), 5);
        let rot = rotate_to_canonical(&inst).unwrap();
        let qx = rot.rotate_point(&x);
        let lhs = dot(&c, &x);
        let rhs = rot.scale * qx.iter().sum::<f64>();
        assert!((lhs - rhs).abs() < 1e-10);
        // Constraint values are preserved: (A Qᵀ)(Q x) = A x.
        let ax = inst.a_mat.matvec(&x);
        let arot_qx = rot.instance.a_mat.matvec(&qx);
        for (u, v) in ax.iter().zip(&arot_qx) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn rotation_rejects_wrong_objective() {
        let inst = ProblemInstance::ball_only(3, ObjectiveSpec::PurelyLinear).unwrap();
        assert!(rotate_to_canonical(&inst).is_err());
    }
}
