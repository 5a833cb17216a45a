//! Bisection calibration of the retirement reward.
//!
//! The index of an arm is the smallest safe-arm reward `lambda` at which the
//! one-armed bandit value is zero. The value is non-increasing in `lambda`, so
//! an interval known to contain the index can be halved by evaluating the sign
//! of the value at its midpoint until it is narrower than `epsilon`.

use crate::error::{BoundSide, Error, Result};

/// Initial bracket and required accuracy for a calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationSpec {
    pub lower: f64,
    pub upper: f64,
    pub epsilon: f64,
}

impl CalibrationSpec {
    pub fn new(lower: f64, upper: f64, epsilon: f64) -> Result<Self> {
        let spec = Self {
            lower,
            upper,
            epsilon,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.lower.is_finite() && self.upper.is_finite() && self.epsilon.is_finite();
        if !finite || self.lower > self.upper || self.epsilon <= 0.0 {
            return Err(Error::InvalidInterval {
                lower: self.lower,
                upper: self.upper,
                epsilon: self.epsilon,
            });
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Outcome of a calibration: the final bracket and its midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexResult {
    pub lower: f64,
    pub upper: f64,
    pub midpoint: f64,
    /// Number of bisection steps, i.e. value-function sign evaluations.
    pub evaluations: u32,
    /// Extra evaluations spent verifying an endpoint the bisection never
    /// moved. Zero whenever both ends moved.
    pub boundary_probes: u32,
}

impl IndexResult {
    pub fn from_interval(lower: f64, upper: f64, evaluations: u32) -> Self {
        Self {
            lower,
            upper,
            midpoint: 0.5 * (lower + upper),
            evaluations,
            boundary_probes: 0,
        }
    }

    /// A zero-width result at a known value.
    pub fn exact(value: f64) -> Self {
        Self::from_interval(value, value, 0)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// Applies the affine map `x -> shift + scale * x` (scale > 0).
    pub fn affine(&self, shift: f64, scale: f64) -> Self {
        Self {
            lower: shift + scale * self.lower,
            upper: shift + scale * self.upper,
            midpoint: shift + scale * self.midpoint,
            ..*self
        }
    }
}

/// Number of bisection steps needed to shrink `[lower, upper]` below
/// `epsilon`: ceil(log(epsilon / (upper - lower)) / log(0.5)), floored at 0.
pub fn required_iterations(lower: f64, upper: f64, epsilon: f64) -> Result<u32> {
    CalibrationSpec::new(lower, upper, epsilon)?;
    let width = upper - lower;
    if width <= epsilon {
        return Ok(0);
    }
    // Estimate with logs, then settle the exact count by halving so that
    // powers of two are not pushed over the ceiling by rounding.
    let mut k = ((width / epsilon).log2().ceil().max(1.0)) as i32;
    while k > 1 && width * 0.5f64.powi(k - 1) <= epsilon {
        k -= 1;
    }
    while width * 0.5f64.powi(k) > epsilon {
        k += 1;
    }
    Ok(k as u32)
}

/// Runs bisection on `[spec.lower, spec.upper]`.
///
/// `is_positive(lambda)` must report whether the one-armed bandit value is
/// strictly positive at `lambda`, and must be non-increasing in `lambda`.
/// If the bisection never moves one of the ends, that end is probed once to
/// confirm the bracket; a positive value at `upper` or a zero value at
/// `lower` is reported as [`Error::BoundViolation`].
pub fn calibrate_index<F>(spec: CalibrationSpec, mut is_positive: F) -> Result<IndexResult>
where
    F: FnMut(f64) -> Result<bool>,
{
    spec.validate()?;
    let (mut lower, mut upper) = (spec.lower, spec.upper);
    let mut evaluations = 0u32;
    let (mut lower_moved, mut upper_moved) = (false, false);

    while upper - lower > spec.epsilon {
        let lambda = 0.5 * (lower + upper);
        evaluations += 1;
        if is_positive(lambda)? {
            lower = lambda;
            lower_moved = true;
        } else {
            upper = lambda;
            upper_moved = true;
        }
    }

    let mut probes = 0;
    if evaluations > 0 {
        if !upper_moved {
            probes += 1;
            if is_positive(spec.upper)? {
                return Err(Error::BoundViolation {
                    side: BoundSide::PositiveAtUpper,
                    lambda: spec.upper,
                });
            }
        }
        if !lower_moved {
            probes += 1;
            if !is_positive(spec.lower)? {
                return Err(Error::BoundViolation {
                    side: BoundSide::ZeroAtLower,
                    lambda: spec.lower,
                });
            }
        }
    }

    let mut result = IndexResult::from_interval(lower, upper, evaluations);
    result.boundary_probes = probes;
    Ok(result)
}
