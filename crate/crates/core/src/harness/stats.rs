use serde::{Deserialize, Serialize};

/// Compensated (Neumaier) sum in iteration order.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (`n − 1` denominator).
    pub std: f64,
    /// `1.96·std/√count`
    pub ci95: f64,
    pub count: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let count = values.len();
        if count == 0 {
            return Self {
                mean: f64::NAN,
                std: f64::NAN,
                ci95: f64::NAN,
                count,
            };
        }
        let mean = neumaier_sum(values.iter().copied()) / count as f64;
        let std = if count > 1 {
            (neumaier_sum(values.iter().map(|v| (v - mean).powi(2))) / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            std,
            ci95: 1.96 * std / (count as f64).sqrt(),
            count,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(neumaier_sum(v), 2.0);
        assert_ne!(v.iter().sum::<f64>(), 2.0);
    }

    #[test]
    fn summary_of_known_sample() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((s.ci95 - 1.96 * s.std / 2.0).abs() < 1e-15);
        assert!(Summary::of(&[]).mean.is_nan());
        assert_eq!(Summary::of(&[7.0]).std, 0.0);
    }
}
