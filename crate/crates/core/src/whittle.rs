//! Whittle indices for the finite-horizon Bernoulli bandit.
//!
//! With `s` plays left the one-armed bandit ends after at most `s` stages,
//! so backward induction over the `s`-stage triangle is exact and no
//! terminal approximation is involved.

use crate::bmab::MIN_EPSILON;
use crate::bounds::default_bounds_bmab;
use crate::calibration::{calibrate_index, IndexResult};
use crate::error::{Error, Result};
use crate::state::{BernoulliArmState, DiscountFactor};

/// Arm state together with the number of plays remaining.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteHorizonState {
    pub state: BernoulliArmState,
    pub remaining: usize,
}

/// Value of playing on rather than retiring with `remaining` plays left.
pub fn whittle_fh_value(
    state: BernoulliArmState,
    gamma: DiscountFactor,
    lambda: f64,
    remaining: usize,
) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(Error::NonFiniteLambda(lambda));
    }
    let (sigma, n) = (state.sigma(), state.n());
    let g = gamma.value();
    // values with no plays left are zero
    let mut values = vec![0.0; remaining + 1];
    for stage in (0..remaining).rev() {
        let n_stage = n + stage as f64;
        for j in 0..=stage {
            let p = (sigma + j as f64) / n_stage;
            let cont = p * values[j + 1] + (1.0 - p) * values[j];
            values[j] = (p - lambda + g * cont).max(0.0);
        }
    }
    Ok(values[0])
}

/// Finite-horizon Whittle index with `remaining` plays left.
pub fn whittle_fh_index(
    state: BernoulliArmState,
    gamma: DiscountFactor,
    remaining: usize,
    epsilon: f64,
) -> Result<IndexResult> {
    if remaining == 0 {
        return Err(Error::InvalidConfig(
            "the index is undefined with no plays remaining".into(),
        ));
    }
    if !(epsilon >= MIN_EPSILON) {
        return Err(Error::EpsilonTooSmall {
            epsilon,
            floor: MIN_EPSILON,
        });
    }
    if remaining == 1 || gamma.is_myopic() {
        return Ok(IndexResult::exact(state.mean()));
    }
    let spec = default_bounds_bmab(state, gamma)?.with_epsilon(epsilon)?;
    calibrate_index(spec, |lambda| {
        Ok(whittle_fh_value(state, gamma, lambda, remaining)? > 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: f64, n: f64) -> BernoulliArmState {
        BernoulliArmState::new(s, n).unwrap()
    }

    fn g(x: f64) -> DiscountFactor {
        DiscountFactor::new(x).unwrap()
    }

    #[test]
    fn empty_horizon_has_no_value() {
        for lambda in [-1.0, 0.0, 0.4] {
            assert_eq!(
                whittle_fh_value(st(1.0, 2.0), g(0.9), lambda, 0).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn single_step_is_myopic() {
        let v = whittle_fh_value(st(1.0, 2.0), g(0.9), 0.3, 1).unwrap();
        assert!((v - 0.2).abs() < 1e-15);
        let r = whittle_fh_index(st(1.0, 2.0), g(0.9), 1, 1e-6).unwrap();
        assert_eq!(r.midpoint, 0.5);
    }

    #[test]
    fn two_step_calibration_point() {
        // Between 1/3 and 2/3 the value is 0.8 - 1.45 lambda.
        let lambda = 0.8 / 1.45;
        let v = whittle_fh_value(st(1.0, 2.0), g(0.9), lambda, 2).unwrap();
        assert!(v < 1e-15);
        let v = whittle_fh_value(st(1.0, 2.0), g(0.9), 0.5517, 2).unwrap();
        assert!(v < 1e-4);
        let r = whittle_fh_index(st(1.0, 2.0), g(0.9), 2, 1e-6).unwrap();
        assert!((r.midpoint - lambda).abs() < 2e-6, "{}", r.midpoint);
    }

    #[test]
    fn no_plays_left_is_an_error() {
        assert!(whittle_fh_index(st(1.0, 2.0), g(0.9), 0, 1e-6).is_err());
    }
}
