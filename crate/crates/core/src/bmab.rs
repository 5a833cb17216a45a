//! Gittins indices for Bernoulli arms by backward induction.
//!
//! From root state (sigma, n) the one-armed bandit reaches, after `s` plays,
//! the states (sigma + j, n + s) for j = 0..=s. Values are held in the
//! stage's own discounting frame, so the stage-`N` terminal value
//! `gamma^N / (1 - gamma) * max(mean - lambda, 0)` seen from the root is
//! `max(mean - lambda, 0) / (1 - gamma)` locally, and each backward step
//! multiplies the continuation by `gamma`.

use crate::bounds::{default_bounds_bmab, Bracket};
use crate::calibration::{calibrate_index, IndexResult};
use crate::error::{Error, Result};
use crate::state::{BernoulliArmState, DiscountFactor};

/// Smallest accepted calibration accuracy.
pub const MIN_EPSILON: f64 = 1e-9;

/// Horizon truncation of the one-armed bandit programme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BmabDpConfig {
    pub horizon: usize,
}

impl BmabDpConfig {
    pub fn new(horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidConfig(
                "BMAB horizon must be at least 1".into(),
            ));
        }
        Ok(Self { horizon })
    }

    /// 200 stages up to gamma = 0.9, 800 up to 0.99, 2000 beyond.
    pub fn default_for(gamma: DiscountFactor) -> Self {
        let horizon = match gamma.value() {
            g if g <= 0.9 => 200,
            g if g <= 0.99 => 800,
            _ => 2000,
        };
        Self { horizon }
    }

    /// Number of states in the triangular stage space, (N+2)(N+1)/2.
    pub fn state_count(&self) -> usize {
        (self.horizon + 2) * (self.horizon + 1) / 2
    }
}

/// gamma^N / (1 - gamma): the most reward still obtainable after stage N
/// when rewards lie in [0, 1].
pub fn max_remaining_reward(gamma: DiscountFactor, horizon: usize) -> f64 {
    gamma.value().powi(horizon as i32) * gamma.annuity()
}

/// Value of the one-armed bandit at the root relative to retiring.
///
/// Non-negative; zero exactly when retiring immediately is optimal.
pub fn bmab_value(
    state: BernoulliArmState,
    gamma: DiscountFactor,
    lambda: f64,
    config: BmabDpConfig,
) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(Error::NonFiniteLambda(lambda));
    }
    let horizon = config.horizon;
    let (sigma, n) = (state.sigma(), state.n());
    let g = gamma.value();
    let annuity = gamma.annuity();

    let n_last = n + horizon as f64;
    let mut values: Vec<f64> = (0..=horizon)
        .map(|j| annuity * ((sigma + j as f64) / n_last - lambda).max(0.0))
        .collect();

    for stage in (0..horizon).rev() {
        let n_stage = n + stage as f64;
        // Ascending j reads values[j] and values[j + 1] before either is
        // overwritten for this stage.
        for j in 0..=stage {
            let p = (sigma + j as f64) / n_stage;
            let cont = p * values[j + 1] + (1.0 - p) * values[j];
            values[j] = (p - lambda + g * cont).max(0.0);
        }
    }
    Ok(values[0])
}

/// Gittins index of a Bernoulli arm under an `N`-stage truncation.
///
/// `bounds` overrides the default bracket; it must contain the index.
pub fn bmab_gi(
    state: BernoulliArmState,
    gamma: DiscountFactor,
    epsilon: f64,
    config: BmabDpConfig,
    bounds: Option<Bracket>,
) -> Result<IndexResult> {
    if !(epsilon >= MIN_EPSILON) {
        return Err(Error::EpsilonTooSmall {
            epsilon,
            floor: MIN_EPSILON,
        });
    }
    if gamma.is_myopic() {
        return Ok(IndexResult::exact(state.mean()));
    }
    let bracket = match bounds {
        Some(b) => b,
        None => default_bounds_bmab(state, gamma)?,
    };
    let spec = bracket.with_epsilon(epsilon)?;
    calibrate_index(spec, |lambda| {
        Ok(bmab_value(state, gamma, lambda, config)? > 0.0)
    })
}
