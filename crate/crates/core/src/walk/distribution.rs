//! Position probability distributions and their low moments.

use crate::error::{Error, Result};

/// P(x) sampled on a contiguous set of lattice positions.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionDistribution {
    positions: Vec<i64>,
    probabilities: Vec<f64>,
}

/// Mean, second moment and variance of a distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

impl PositionDistribution {
    pub fn new(positions: Vec<i64>, probabilities: Vec<f64>) -> Result<Self> {
        if positions.len() != probabilities.len() {
            return Err(Error::InvalidArgument(format!(
                "{} positions vs {} probabilities",
                positions.len(),
                probabilities.len()
            )));
        }
        if probabilities.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::InvalidArgument(
                "probabilities must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { positions, probabilities })
    }

    pub(crate) fn new_unchecked(positions: Vec<i64>, probabilities: Vec<f64>) -> Self {
        Self { positions, probabilities }
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn probability_at(&self, x: i64) -> f64 {
        match self.positions.binary_search(&x) {
            Ok(i) => self.probabilities[i],
            Err(_) => 0.0,
        }
    }

    /// mean = Σ x P, second_moment = Σ x² P, variance = ⟨x²⟩ − ⟨x⟩².
    pub fn moments(&self) -> Moments {
        let mut mean = 0.0;
        let mut second = 0.0;
        for (&x, &p) in self.positions.iter().zip(&self.probabilities) {
            let xf = x as f64;
            mean += xf * p;
            second += xf * xf * p;
        }
        Moments {
            mean,
            second_moment: second,
            variance: second - mean * mean,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{CoinOperator, WalkerState};
    use crate::C64;
    use approx::assert_abs_diff_eq;

    #[test]
    fn localized_distribution_has_unit_mass_at_origin() {
        let s = WalkerState::localized(0, [C64::new(1.0, 0.0), C64::default()]).unwrap();
        let d = s.distribution();
        assert_abs_diff_eq!(d.probability_at(0), 1.0, epsilon = 1e-15);
        let m = d.moments();
        assert_eq!((m.mean, m.second_moment, m.variance), (0.0, 0.0, 0.0));
    }

    #[test]
    fn one_identity_step_concentrates_at_plus_one() {
        let s = WalkerState::localized(0, [C64::new(1.0, 0.0), C64::default()]).unwrap();
        let d = s.step(&CoinOperator::from_phase(0.0).unwrap()).distribution();
        assert_abs_diff_eq!(d.probability_at(1), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.moments().second_moment, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn symmetric_two_point_moments() {
        let d = PositionDistribution::new(vec![-1, 1], vec![0.5, 0.5]).unwrap();
        let m = d.moments();
        assert_eq!(m.mean, 0.0);
        assert_eq!(m.second_moment, 1.0);
        assert_eq!(m.variance, 1.0);
    }

    #[test]
    fn rejects_negative_probability() {
        assert!(PositionDistribution::new(vec![0], vec![-0.1]).is_err());
        assert!(PositionDistribution::new(vec![0, 1], vec![1.0]).is_err());
    }

    #[test]
    fn hadamard_walk_second_moment_grows_quadratically() {
        // slope of log⟨x²⟩ against log t over t ∈ [50, 400]
        let amp = 1.0 / 2f64.sqrt();
        let s = WalkerState::localized(0, [C64::new(amp, 0.0), C64::new(0.0, amp)]).unwrap();
        let coin = CoinOperator::hadamard();
        let mut cur = s;
        let mut logs: Vec<(f64, f64)> = Vec::new();
        for t in 1..=400u32 {
            cur = cur.step(&coin);
            if t >= 50 {
                let (_, m2) = cur.position_moments();
                logs.push(((t as f64).ln(), m2.ln()));
            }
        }
        let xs: Vec<f64> = logs.iter().map(|&(x, _)| x).collect();
        let ys: Vec<f64> = logs.iter().map(|&(_, y)| y).collect();
        let fit = crate::stats::linear_fit(&xs, &ys).unwrap();
        assert!(
            (fit.slope - 2.0).abs() < 0.05,
            "ballistic exponent came out {}",
            fit.slope
        );
    }
}
