use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The supported objectives. All are positively homogeneous of degree 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectiveSpec {
    /// `f(x) = Σ xᵢ`
    PurelyLinear,
    /// `f(x) = cᵀx`
    GeneralLinear { c: Vec<f64> },
    /// `f(x) = Σ_{i<n-k} |xᵢ| + Σ_{i≥n-k} xᵢ`
    BpSplit { k: usize },
}

impl ObjectiveSpec {
    pub fn general_linear(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::EmptyDimension);
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("objective vector c"));
        }
        if c.iter().all(|&v| v == 0.0) {
            return Err(Error::config("general linear objective needs c != 0"));
        }
        Ok(Self::GeneralLinear { c })
    }

    /// Homogeneity degree; informational, all built-ins are degree 1.
    pub fn degree(&self) -> f64 {
        1.0
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::PurelyLinear => "lp",
            Self::GeneralLinear { .. } => "gl",
            Self::BpSplit { .. } => "bp",
        }
    }

    /// Checks that the objective can act on vectors of length `n`.
    pub fn check_dim(&self, n: usize) -> Result<()> {
        match self {
            Self::PurelyLinear => Ok(()),
            Self::GeneralLinear { c } if c.len() != n => Err(Error::DimensionMismatch {
                what: "objective vector c",
                expected: n,
                found: c.len(),
            }),
            Self::GeneralLinear { .. } => Ok(()),
            Self::BpSplit { k } if *k > n => Err(Error::config(format!(
                "split objective needs k <= n (k={k}, n={n})"
            ))),
            Self::BpSplit { .. } => Ok(()),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(match self {
            Self::PurelyLinear => x.iter().sum(),
            Self::GeneralLinear { c } => c.iter().zip(x).map(|(ci, xi)| ci * xi).sum(),
            Self::BpSplit { k } => {
                let split = x.len() - k;
                x[..split].iter().map(|v| v.abs()).sum::<f64>() + x[split..].iter().sum::<f64>()
            }
        })
    }

    /// `argmin_u t·f(u) + ½‖u − v‖²`, written into `out`.
    pub fn prox_into(&self, v: &[f64], t: f64, out: &mut [f64]) {
        debug_assert!(t > 0.0);
        match self {
            Self::PurelyLinear => {
                out.iter_mut().zip(v).for_each(|(o, vi)| *o = vi - t);
            }
            Self::GeneralLinear { c } => {
                out.iter_mut()
                    .zip(v)
                    .zip(c)
                    .for_each(|((o, vi), ci)| *o = vi - t * ci);
            }
            Self::BpSplit { k } => {
                let split = v.len() - k;
                for (o, &vi) in out[..split].iter_mut().zip(&v[..split]) {
                    *o = soft_threshold(vi, t);
                }
                for (o, &vi) in out[split..].iter_mut().zip(&v[split..]) {
                    *o = vi - t;
                }
            }
        }
    }

    pub fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        if !(t > 0.0) {
            return Err(Error::config("prox step must be positive"));
        }
        self.check_dim(v.len())?;
        let mut out = vec![0.0; v.len()];
        self.prox_into(v, t, &mut out);
        Ok(out)
    }

    /// Dense coefficient vector for the linear objectives.
    pub fn linear_coefficients(&self, n: usize) -> Option<Vec<f64>> {
        match self {
            Self::PurelyLinear => Some(vec![1.0; n]),
            Self::GeneralLinear { c } => Some(c.clone()),
            Self::BpSplit { .. } => None,
        }
    }
}

pub(crate) fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{gaussian_vector, RngStream};
    use proptest::prelude::*;

    #[test]
    fn evaluate_examples() {
        assert_eq!(ObjectiveSpec::PurelyLinear.evaluate(&[1.0, 1.0, 1.0]).unwrap(), 3.0);
        let bp = ObjectiveSpec::BpSplit { k: 2 };
        assert_eq!(bp.evaluate(&[-1.0, 2.0, -3.0, 4.0]).unwrap(), 4.0);
        let gl = ObjectiveSpec::general_linear(vec![1.0, -2.0]).unwrap();
        assert_eq!(gl.evaluate(&[3.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn dimension_checks() {
        let gl = ObjectiveSpec::general_linear(vec![1.0, -2.0]).unwrap();
        assert!(gl.evaluate(&[1.0]).is_err());
        assert!(ObjectiveSpec::BpSplit { k: 5 }.evaluate(&[0.0; 3]).is_err());
        assert!(ObjectiveSpec::general_linear(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn prox_examples() {
        let p = ObjectiveSpec::PurelyLinear.prox(&[0.0, 0.0], 0.5).unwrap();
        assert_eq!(p, vec![-0.5, -0.5]);
        let p = ObjectiveSpec::BpSplit { k: 1 }.prox(&[0.3, 0.3], 0.5).unwrap();
        assert_eq!(p[0], 0.0);
        assert!((p[1] + 0.2).abs() < 1e-15);
        assert!(ObjectiveSpec::PurelyLinear.prox(&[0.0], 0.0).is_err());
    }

    #[test]
    fn homogeneity_of_split_objective() {
        let x = gaussian_vector(&mut RngStream::new(5, 0), 9).unwrap();
        let bp = ObjectiveSpec::BpSplit { k: 4 };
        let scaled: Vec<f64> = x.iter().map(|v| 2.5 * v).collect();
        let lhs = bp.evaluate(&scaled).unwrap();
        let rhs = 2.5 * bp.evaluate(&x).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    /// Subgradient membership: (v − u)/t must lie in ∂f(u), coordinatewise.
    fn in_subdifferential(obj: &ObjectiveSpec, u: &[f64], g: &[f64]) -> bool {
        let n = u.len();
        match obj {
            ObjectiveSpec::PurelyLinear => g.iter().all(|gi| (gi - 1.0).abs() < 1e-9),
            ObjectiveSpec::GeneralLinear { c } => g.iter().zip(c).all(|(gi, ci)| (gi - ci).abs() < 1e-9),
            ObjectiveSpec::BpSplit { k } => (0..n).all(|i| {
                if i >= n - k {
                    (g[i] - 1.0).abs() < 1e-9
                } else if u[i] > 0.0 {
                    (g[i] - 1.0).abs() < 1e-9
                } else if u[i] < 0.0 {
                    (g[i] + 1.0).abs() < 1e-9
                } else {
                    g[i].abs() <= 1.0 + 1e-9
                }
            }),
        }
    }

    proptest! {
        #[test]
        fn prox_optimality(seed in 0u64..1000, t in 0.01f64..3.0, k in 0usize..7) {
            let v = gaussian_vector(&mut RngStream::new(seed, 1), 6).unwrap();
            let c = gaussian_vector(&mut RngStream::new(seed, 2), 6).unwrap();
            for obj in [
                ObjectiveSpec::PurelyLinear,
                ObjectiveSpec::GeneralLinear { c: c.clone() },
                ObjectiveSpec::BpSplit { k: k.min(6) },
            ] {
                let u = obj.prox(&v, t).unwrap();
                let g: Vec<f64> = v.iter().zip(&u).map(|(vi, ui)| (vi - ui) / t).collect();
                prop_assert!(in_subdifferential(&obj, &u, &g), "{obj:?}");
            }
        }

        #[test]
        fn positive_homogeneity(seed in 0u64..1000, a in 0.01f64..100.0, k in 0usize..9) {
            let x = gaussian_vector(&mut RngStream::new(seed, 3), 8).unwrap();
            let c = gaussian_vector(&mut RngStream::new(seed, 4), 8).unwrap();
            let ax: Vec<f64> = x.iter().map(|v| a * v).collect();
            for obj in [
                ObjectiveSpec::PurelyLinear,
                ObjectiveSpec::GeneralLinear { c: c.clone() },
                ObjectiveSpec::BpSplit { k: k.min(8) },
            ] {
                let lhs = obj.evaluate(&ax).unwrap();
                let rhs = a * obj.evaluate(&x).unwrap();
                let scale = x.iter().map(|v| v.abs()).sum::<f64>() * a;
                prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1.0));
            }
        }
    }
}
