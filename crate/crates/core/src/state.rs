//! Arm states and the discount factor.

use std::fmt;

use crate::error::{Error, Result};

/// Conjugate state of a Bernoulli arm: Beta(sigma, n - sigma) posterior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliArmState {
    sigma: f64,
    n: f64,
}

impl BernoulliArmState {
    pub fn new(sigma: f64, n: f64) -> Result<Self> {
        if !(sigma.is_finite() && n.is_finite() && sigma > 0.0 && sigma < n) {
            return Err(Error::InvalidBernoulliState { sigma, n });
        }
        Ok(Self { sigma, n })
    }

    /// Bayesian sum of rewards.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Bayesian number of observations.
    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.sigma / self.n
    }

    /// Posterior after one observation.
    pub fn observe(&self, success: bool) -> Self {
        Self {
            sigma: self.sigma + if success { 1.0 } else { 0.0 },
            n: self.n + 1.0,
        }
    }
}

impl fmt::Display for BernoulliArmState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(sigma={}, n={})", self.sigma, self.n)
    }
}

/// State of a Gaussian arm with known observation precision `tau`.
///
/// The posterior on the arm mean is N(mu, 1/n); each observation adds `tau`
/// to `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalArmState {
    mu: f64,
    n: f64,
    tau: f64,
}

impl NormalArmState {
    pub fn new(mu: f64, n: f64, tau: f64) -> Result<Self> {
        let ok = mu.is_finite() && n.is_finite() && tau.is_finite() && n > 0.0 && tau > 0.0;
        if !ok {
            return Err(Error::InvalidNormalState { mu, n, tau });
        }
        Ok(Self { mu, n, tau })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Posterior standard deviation of the arm mean.
    pub fn posterior_sd(&self) -> f64 {
        (1.0 / self.n).sqrt()
    }

    pub fn observe(&self, y: f64) -> Self {
        let n = self.n + self.tau;
        Self {
            mu: (self.n * self.mu + self.tau * y) / n,
            n,
            tau: self.tau,
        }
    }
}

impl fmt::Display for NormalArmState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(mu={}, n={}, tau={})", self.mu, self.n, self.tau)
    }
}

/// Discount factor in [0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DiscountFactor(f64);

impl DiscountFactor {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::InvalidDiscount(gamma));
        }
        Ok(Self(gamma))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Value of a unit reward received forever, 1/(1 - gamma).
    pub fn annuity(self) -> f64 {
        1.0 / (1.0 - self.0)
    }

    pub fn is_myopic(self) -> bool {
        self.0 == 0.0
    }
}

impl fmt::Display for DiscountFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
