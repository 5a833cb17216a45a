//! Standard normal helpers.

use libm::erfc;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Lower tail P(Z <= z).
pub fn cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Upper tail P(Z > z), accurate far into the tail.
pub fn sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Probability mass of the standard normal on [a, b), computed on the
/// side of zero that avoids cancellation.
pub fn mass(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        sf(a) - sf(b)
    } else if b <= 0.0 {
        cdf(b) - cdf(a)
    } else {
        1.0 - cdf(a) - sf(b)
    }
}

/// E[(X - a)^+] for X ~ N(mean, sd^2).
pub fn partial_expectation(mean: f64, sd: f64, a: f64) -> f64 {
    if sd == 0.0 {
        return (mean - a).max(0.0);
    }
    let z = (a - mean) / sd;
    (sd * pdf(z) + (mean - a) * sf(z)).max(0.0)
}

/// E[(X - lambda)^+ ; X >= c] for X ~ N(mean, sd^2).
pub fn truncated_partial_expectation(mean: f64, sd: f64, lambda: f64, c: f64) -> f64 {
    let a = c.max(lambda);
    let tail = if a > lambda {
        (a - lambda) * sf((a - mean) / sd)
    } else {
        0.0
    };
    partial_expectation(mean, sd, a) + tail
}
