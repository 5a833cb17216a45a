//! Initial brackets for calibration.
//!
//! The lower end is the posterior mean: retiring immediately is never better
//! than playing the arm once at a charge equal to its mean. The upper end
//! solves the one-armed bandit in which the arm's true mean is revealed after
//! a single play, which can only be worth more than the real problem.

use statrs::function::beta::beta_reg;

use crate::calibration::{calibrate_index, CalibrationSpec};
use crate::error::Result;
use crate::gauss;
use crate::state::{BernoulliArmState, DiscountFactor, NormalArmState};

/// Tolerance used when solving for the full-information upper bound.
pub const UPPER_BOUND_TOLERANCE: f64 = 1e-6;

/// A closed interval assumed to contain an index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

impl Bracket {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Result<CalibrationSpec> {
        CalibrationSpec::new(self.lower, self.upper, epsilon)
    }

    /// Shrinks the upper end to `upper` if that is tighter.
    pub fn cap_upper(self, upper: f64) -> Self {
        let upper = upper.min(self.upper).max(self.lower);
        Self { upper, ..self }
    }
}

/// Source of initial calibration brackets.
///
/// Implementations must return intervals that contain the index; tighter
/// intervals save bisection steps.
pub trait BoundsProvider: Send + Sync {
    fn bernoulli(&self, state: BernoulliArmState, gamma: DiscountFactor) -> Result<Bracket>;
    fn normal(&self, state: NormalArmState, gamma: DiscountFactor) -> Result<Bracket>;
}

/// Posterior mean below, full-information value above.
#[derive(Debug, Clone, Copy, Default)]
pub struct DefaultBounds;

impl BoundsProvider for DefaultBounds {
    fn bernoulli(&self, state: BernoulliArmState, gamma: DiscountFactor) -> Result<Bracket> {
        default_bounds_bmab(state, gamma)
    }

    fn normal(&self, state: NormalArmState, gamma: DiscountFactor) -> Result<Bracket> {
        default_bounds_nmab(state, gamma)
    }
}

/// E[(theta - lambda)^+] for theta ~ Beta(a, b).
pub fn beta_partial_expectation(a: f64, b: f64, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return a / (a + b) - lambda;
    }
    if lambda >= 1.0 {
        return 0.0;
    }
    let mean = a / (a + b);
    let above_shifted = 1.0 - beta_reg(a + 1.0, b, lambda);
    let above = 1.0 - beta_reg(a, b, lambda);
    (mean * above_shifted - lambda * above).max(0.0)
}

fn solve_full_information<F>(mean: f64, max: f64, continuation: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let spec = CalibrationSpec::new(mean, max, UPPER_BOUND_TOLERANCE)?;
    let r = calibrate_index(
        spec,
        |lambda| Ok(mean - lambda + continuation(lambda) > 0.0),
    )?;
    Ok(r.upper)
}

pub fn default_bounds_bmab(state: BernoulliArmState, gamma: DiscountFactor) -> Result<Bracket> {
    let mean = state.mean();
    if gamma.is_myopic() {
        return Ok(Bracket::new(mean, mean));
    }
    let (a, b) = (state.sigma(), state.n() - state.sigma());
    let weight = gamma.value() * gamma.annuity();
    let upper = solve_full_information(mean, 1.0, |lambda| {
        weight * beta_partial_expectation(a, b, lambda)
    })?;
    Ok(Bracket::new(mean, upper.min(1.0)))
}

pub fn default_bounds_nmab(state: NormalArmState, gamma: DiscountFactor) -> Result<Bracket> {
    let mu = state.mu();
    if gamma.is_myopic() {
        return Ok(Bracket::new(mu, mu));
    }
    let sd = state.posterior_sd();
    let weight = gamma.value() * gamma.annuity();
    let max = mu + 20.0 * sd * weight;
    let upper = solve_full_information(mu, max, |lambda| {
        weight * gauss::partial_expectation(mu, sd, lambda)
    })?;
    Ok(Bracket::new(mu, upper))
}
