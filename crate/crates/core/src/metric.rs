use serde::{Deserialize, Serialize};

/// Signature used when contracting displacement vectors.
///
/// `Minkowski` is (+, -, ..., -) with the temporal component first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Minkowski,
}

impl Metric {
    #[inline]
    pub fn sign(self, axis: usize) -> f64 {
        match self {
            Metric::Euclidean => 1.0,
            Metric::Minkowski if axis == 0 => 1.0,
            Metric::Minkowski => -1.0,
        }
    }

    /// `g_{μν} a^μ b^ν`. Panics if the lengths differ.
    pub fn contract(self, a: &[f64], b: &[f64]) -> f64 {
        assert_eq!(
            a.len(),
            b.len(),
            "contracting vectors of different dimension"
        );
        a.iter()
            .zip(b)
            .enumerate()
            .map(|(i, (x, y))| self.sign(i) * x * y)
            .sum()
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Minkowski => "minkowski",
        }
    }
}

pub(crate) fn euclidean_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Wraps an angle into (-π, π].
pub fn wrap_phase(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let r = theta.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn minkowski_signature() {
        assert_eq!(Metric::Minkowski.contract(&[5.0, 3.0], &[5.0, 3.0]), 16.0);
        assert_eq!(Metric::Euclidean.contract(&[5.0, 3.0], &[5.0, 3.0]), 34.0);
        assert_eq!(
            Metric::Minkowski.contract(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]),
            -4.0
        );
    }

    #[test]
    fn wrapping_interval() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert!(wrap_phase(-2.0 * PI).abs() < 1e-15);
        assert!((wrap_phase(-0.5) + 0.5).abs() < 1e-15);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-14);
    }
}
