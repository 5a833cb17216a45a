//! Gittins indices for Gaussian arms with known observation precision.
//!
//! The posterior mean is discretised onto a grid that starts at the root mean
//! and extends `xi` posterior standard deviations upwards in steps of `delta`.
//! Successor means below the grid retire (value zero); successor means above
//! it are valued as if nothing more is learned.
//!
//! For a fixed stage the probability of moving from grid point `i` to grid
//! point `j` depends only on `j - i`, so each stage keeps one symmetric
//! kernel that is reused for every row and every `lambda` of a calibration.

use crate::bounds::{default_bounds_nmab, Bracket};
use crate::calibration::{calibrate_index, IndexResult};
use crate::error::{Error, Result};
use crate::gauss;
use crate::state::{DiscountFactor, NormalArmState};

/// Default calibration accuracy for Gaussian arms.
pub const DEFAULT_EPSILON: f64 = 5e-5;

/// Kernel entries below this mass are dropped.
const KERNEL_CUTOFF: f64 = 1e-17;

/// Discretisation of the Gaussian one-armed bandit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmabDpConfig {
    /// Number of stages `N`.
    pub horizon: usize,
    /// Grid extent in posterior standard deviations.
    pub xi: f64,
    /// Grid mesh width.
    pub delta: f64,
    /// Skip states whose value is implied by monotonicity in `mu` and `n`.
    pub prune: bool,
}

impl Default for NmabDpConfig {
    fn default() -> Self {
        Self {
            horizon: 140,
            xi: 3.0,
            delta: 0.01,
            prune: true,
        }
    }
}

impl NmabDpConfig {
    pub fn new(horizon: usize, xi: f64, delta: f64, prune: bool) -> Result<Self> {
        let cfg = Self {
            horizon,
            xi,
            delta,
            prune,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// High-accuracy settings used as the reference in convergence studies.
    pub fn benchmark() -> Self {
        Self {
            horizon: 200,
            xi: 6.0,
            delta: 0.005,
            prune: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidConfig(
                "NMAB horizon must be at least 1".into(),
            ));
        }
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "xi must be positive, got {}",
                self.xi
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        Ok(())
    }

    /// Size of the stage-by-grid state space, (N+1)(|grid|).
    pub fn state_count(&self, n_a: f64) -> usize {
        (self.horizon + 1) * (grid_steps(self.xi, (1.0 / n_a).sqrt(), self.delta) + 1)
    }
}

/// ceil(xi * sigma / delta), ignoring rounding noise at exact multiples.
fn grid_steps(xi: f64, sigma: f64, delta: f64) -> usize {
    let x = xi * sigma / delta;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// Evenly spaced posterior-mean grid with a marked root point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuGrid {
    bottom: f64,
    step: f64,
    len: usize,
    root: usize,
}

impl MuGrid {
    pub fn point(&self, i: usize) -> f64 {
        self.bottom + i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.point(i))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn min(&self) -> f64 {
        self.bottom
    }

    pub fn max(&self) -> f64 {
        self.point(self.len - 1)
    }

    /// Position of the root mean `mu_a` in the grid.
    pub fn root_index(&self) -> usize {
        self.root
    }

    pub fn origin(&self) -> f64 {
        self.point(self.root)
    }

    /// Grid with `extra` additional points below the current bottom.
    pub fn extended_below(&self, extra: usize) -> Self {
        Self {
            bottom: self.bottom - extra as f64 * self.step,
            step: self.step,
            len: self.len + extra,
            root: self.root + extra,
        }
    }
}

/// The grid {mu_a, mu_a + delta, ..., mu_a + ceil(xi sigma / delta) delta}
/// with sigma = sqrt(1 / n_a).
pub fn build_omega(mu_a: f64, n_a: f64, xi: f64, delta: f64) -> Result<MuGrid> {
    if !(n_a > 0.0 && xi > 0.0 && delta > 0.0 && mu_a.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "grid needs n_a, xi, delta > 0 (n_a={n_a}, xi={xi}, delta={delta})"
        )));
    }
    let steps = grid_steps(xi, (1.0 / n_a).sqrt(), delta);
    Ok(MuGrid {
        bottom: mu_a,
        step: delta,
        len: steps + 1,
        root: 0,
    })
}

/// Successor distribution of the posterior mean after one observation.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRow {
    /// Mass landing in each grid cell [g - delta/2, g + delta/2).
    pub probabilities: Vec<f64>,
    /// Mass below the lowest cell.
    pub floor_mass: f64,
    /// Mass above the highest cell.
    pub ceil_mass: f64,
}

impl TransitionRow {
    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum::<f64>() + self.floor_mass + self.ceil_mass
    }
}

/// Transition probabilities from posterior mean `mu` at count `n`, computed
/// through the predictive distribution Y ~ N(mu, 1/n + 1/tau) of the next
/// observation: the successor mean falls in [g - delta/2, g + delta/2) when
/// Y lies in [y_l, y_u) with y = ((g -/+ delta/2)(n + tau) - n mu) / tau.
pub fn transition_row(mu: f64, n: f64, tau: f64, grid: &MuGrid) -> TransitionRow {
    let pred_sd = (1.0 / n + 1.0 / tau).sqrt();
    let half = 0.5 * grid.step;
    let y_of = |edge: f64| (edge * (n + tau) - n * mu) / tau;
    // cdf at each cell edge, shared between neighbouring cells
    let edges: Vec<f64> = (0..=grid.len)
        .map(|k| gauss::cdf((y_of(grid.point(k) - half) - mu) / pred_sd))
        .collect();
    let probabilities = edges.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
    TransitionRow {
        probabilities,
        floor_mass: edges[0],
        ceil_mass: 1.0 - edges[grid.len],
    }
}

/// Root value of the discretised programme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootValue {
    /// Fully computed value.
    Value(f64),
    /// Shown positive by a later stage before the root was reached.
    Positive,
}

impl RootValue {
    pub fn is_positive(self) -> bool {
        match self {
            RootValue::Value(v) => v > 0.0,
            RootValue::Positive => true,
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            RootValue::Value(v) => Some(v),
            RootValue::Positive => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmabEvaluation {
    pub root: RootValue,
    /// Number of (stage, grid point) values computed.
    pub states_evaluated: u64,
}

/// Per-stage transition kernels for one root state, independent of `lambda`.
#[derive(Debug, Clone)]
pub struct NmabProgramme {
    grid: MuGrid,
    gamma: f64,
    annuity: f64,
    prune: bool,
    /// Successor-mean standard deviation at each non-terminal stage.
    stage_sd: Vec<f64>,
    /// kernels[k][d] = P(move d cells) at stage k, d >= 0, symmetric.
    kernels: Vec<Vec<f64>>,
}

impl NmabProgramme {
    pub fn new(
        state: NormalArmState,
        gamma: DiscountFactor,
        config: NmabDpConfig,
        grid: MuGrid,
    ) -> Result<Self> {
        config.validate()?;
        let (n_a, tau) = (state.n(), state.tau());
        let step = grid.step;
        let max_shift = grid.len - 1;
        let mut stage_sd = Vec::with_capacity(config.horizon);
        let mut kernels = Vec::with_capacity(config.horizon);
        for k in 0..config.horizon {
            let n = n_a + k as f64 * tau;
            // Var(mu+) = 1/n - 1/(n + tau)
            let sd = (tau / (n * (n + tau))).sqrt();
            let mut kernel = Vec::new();
            for d in 0..=max_shift {
                let lo = (d as f64 - 0.5) * step / sd;
                let hi = (d as f64 + 0.5) * step / sd;
                let p = if d == 0 {
                    gauss::mass(-hi, hi)
                } else {
                    gauss::mass(lo, hi)
                };
                if p < KERNEL_CUTOFF && d > 0 {
                    break;
                }
                kernel.push(p);
            }
            stage_sd.push(sd);
            kernels.push(kernel);
        }
        Ok(Self {
            grid,
            gamma: gamma.value(),
            annuity: gamma.annuity(),
            prune: config.prune,
            stage_sd,
            kernels,
        })
    }

    pub fn grid(&self) -> &MuGrid {
        &self.grid
    }

    pub fn horizon(&self) -> usize {
        self.kernels.len()
    }

    /// Backward induction at safe reward `lambda`.
    pub fn evaluate(&self, lambda: f64) -> Result<NmabEvaluation> {
        if !lambda.is_finite() {
            return Err(Error::NonFiniteLambda(lambda));
        }
        let len = self.grid.len;
        let root = self.grid.root;
        let horizon = self.horizon();
        let ceiling = self.grid.max() + 0.5 * self.grid.step;
        let mut evaluated = 0u64;

        let mut next: Vec<f64> = vec![0.0; len];
        for i in (0..len).rev() {
            let v = self.annuity * (self.grid.point(i) - lambda).max(0.0);
            evaluated += 1;
            next[i] = v;
            if self.prune && v == 0.0 {
                break;
            }
        }
        let mut cur = vec![0.0; len];

        for k in (0..horizon).rev() {
            // only the root is reachable at stage 0
            let rows = if k == 0 { root..root + 1 } else { 0..len };
            cur.iter_mut().for_each(|v| *v = 0.0);
            for i in rows.rev() {
                let v = self.row_value(k, i, &next, lambda, ceiling);
                evaluated += 1;
                cur[i] = v;
                if self.prune && v == 0.0 {
                    // lower means at this stage retire too
                    break;
                }
            }
            if self.prune && k > 0 && cur[root] > 0.0 {
                // the root, with fewer observations, is at least as valuable
                return Ok(NmabEvaluation {
                    root: RootValue::Positive,
                    states_evaluated: evaluated,
                });
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(NmabEvaluation {
            root: RootValue::Value(next[root]),
            states_evaluated: evaluated,
        })
    }
    fn row_value(&self, k: usize, i: usize, next: &[f64], lambda: f64, ceiling: f64) -> f64 {
        let kernel = &self.kernels[k];
        let reach = kernel.len() - 1;
        let mu = self.grid.point(i);
        let lo = i.saturating_sub(reach);
        let hi = (i + reach).min(self.grid.len - 1);
        let mut cont = 0.0;
        for (j, &vj) in next.iter().enumerate().take(hi + 1).skip(lo) {
            cont += kernel[j.abs_diff(i)] * vj;
        }
        let v_plus = self.annuity
            * gauss::truncated_partial_expectation(mu, self.stage_sd[k], lambda, ceiling);
        (mu - lambda + self.gamma * (cont + v_plus)).max(0.0)
    }

    /// Every value of the programme without pruning: `table[k][i]` is the
    /// value at stage `k` (0..=N) and grid point `i`.
    pub fn value_table(&self, lambda: f64) -> Result<Vec<Vec<f64>>> {
        if !lambda.is_finite() {
            return Err(Error::NonFiniteLambda(lambda));
        }
        let len = self.grid.len;
        let ceiling = self.grid.max() + 0.5 * self.grid.step;
        let horizon = self.horizon();
        let mut table = vec![Vec::new(); horizon + 1];
        table[horizon] = (0..len)
            .map(|i| self.annuity * (self.grid.point(i) - lambda).max(0.0))
            .collect();
        for k in (0..horizon).rev() {
            let row: Vec<f64> = (0..len)
                .map(|i| self.row_value(k, i, &table[k + 1], lambda, ceiling))
                .collect();
            table[k] = row;
        }
        Ok(table)
    }
}

/// Root value of the discretised programme at `lambda`.
pub fn nmab_value(
    state: NormalArmState,
    gamma: DiscountFactor,
    lambda: f64,
    config: NmabDpConfig,
) -> Result<NmabEvaluation> {
    let grid = build_omega(state.mu(), state.n(), config.xi, config.delta)?;
    NmabProgramme::new(state, gamma, config, grid)?.evaluate(lambda)
}

/// How transitions below the root mean are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Floor {
    /// The grid starts at the root mean; lower means retire.
    #[default]
    AtRoot,
    /// The grid continues `ceil(xi sigma / delta)` points below the root mean
    /// and retires only below that.
    Extended,
}

/// Index computed directly at the arm's own (mu, n, tau).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmabIndex {
    pub result: IndexResult,
    pub states_evaluated: u64,
}

/// Calibrates the Gaussian programme at the arm's own coordinates.
pub fn nmab_gi_direct(
    state: NormalArmState,
    gamma: DiscountFactor,
    epsilon: f64,
    config: NmabDpConfig,
    bounds: Option<Bracket>,
    floor: Floor,
) -> Result<NmabIndex> {
    if gamma.is_myopic() {
        return Ok(NmabIndex {
            result: IndexResult::exact(state.mu()),
            states_evaluated: 0,
        });
    }
    let mut grid = build_omega(state.mu(), state.n(), config.xi, config.delta)?;
    if floor == Floor::Extended {
        grid = grid.extended_below(grid.len() - 1);
    }
    let bracket = match bounds {
        Some(b) => b,
        None => default_bounds_nmab(state, gamma)?,
    };
    let programme = NmabProgramme::new(state, gamma, config, grid)?;
    let mut states = 0u64;
    let result = calibrate_index(bracket.with_epsilon(epsilon)?, |lambda| {
        let eval = programme.evaluate(lambda)?;
        states += eval.states_evaluated;
        Ok(eval.root.is_positive())
    })?;
    Ok(NmabIndex {
        result,
        states_evaluated: states,
    })
}

/// Calibration accuracy needed on the canonical scale so that the mapped
/// result has width below `epsilon`.
pub fn canonical_epsilon(epsilon: f64, tau: f64) -> f64 {
    epsilon * tau.sqrt().min(1.0)
}

/// Index of the canonical arm (mu = 0, n, tau = 1).
pub fn nmab_canonical_gi(
    n: f64,
    gamma: DiscountFactor,
    epsilon: f64,
    config: NmabDpConfig,
    bounds: Option<Bracket>,
) -> Result<NmabIndex> {
    let state = NormalArmState::new(0.0, n, 1.0)?;
    nmab_gi_direct(state, gamma, epsilon, config, bounds, Floor::AtRoot)
}

/// Gittins index of a Gaussian arm through the invariance
/// nu(mu, n, gamma, tau) = mu + nu(0, n / tau, gamma, 1) / sqrt(tau).
pub fn nmab_gi(
    state: NormalArmState,
    gamma: DiscountFactor,
    epsilon: f64,
    config: NmabDpConfig,
) -> Result<IndexResult> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInterval {
            lower: 0.0,
            upper: 0.0,
            epsilon,
        });
    }
    if gamma.is_myopic() {
        return Ok(IndexResult::exact(state.mu()));
    }
    let tau = state.tau();
    let canonical = nmab_canonical_gi(
        state.n() / tau,
        gamma,
        canonical_epsilon(epsilon, tau),
        config,
        None,
    )?;
    Ok(from_canonical(canonical.result, state.mu(), tau))
}

/// Maps a canonical (mu = 0, tau = 1) result to an arm with mean `mu` and
/// precision `tau`.
pub fn from_canonical(result: IndexResult, mu: f64, tau: f64) -> IndexResult {
    result.affine(mu, 1.0 / tau.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(x: f64) -> DiscountFactor {
        DiscountFactor::new(x).unwrap()
    }

    fn phi(z: f64) -> f64 {
        gauss::cdf(z)
    }

    #[test]
    fn omega_examples() {
        let grid = build_omega(0.0, 1.0, 3.0, 0.01).unwrap();
        assert_eq!(grid.len(), 301);
        assert_eq!(grid.min(), 0.0);
        assert!((grid.max() - 3.0).abs() < 1e-12);

        let grid = build_omega(0.0, 1.0, 2.5, 0.2).unwrap();
        assert_eq!(grid.len(), 14);
        assert!((grid.max() - 2.6).abs() < 1e-12);

        let grid = build_omega(0.0, 4.0, 3.0, 1.0).unwrap();
        assert_eq!(grid.points().collect::<Vec<_>>(), vec![0.0, 1.0, 2.0]);

        assert!(build_omega(0.0, 0.0, 3.0, 0.01).is_err());
    }

    #[test]
    fn omega_is_uniform_and_floored_at_root() {
        let grid = build_omega(1.3, 2.0, 3.0, 0.05).unwrap();
        assert_eq!(grid.min(), 1.3);
        let pts: Vec<f64> = grid.points().collect();
        for w in pts.windows(2) {
            assert!((w[1] - w[0] - 0.05).abs() < 1e-12);
        }
    }

    #[test]
    fn transition_row_examples() {
        let grid = build_omega(0.0, 1.0, 3.0, 0.01).unwrap();
        let row = transition_row(0.0, 1.0, 1.0, &grid);
        assert!((row.total() - 1.0).abs() < 1e-12);
        // mu+ ~ N(0, 1/2)
        let s = 0.5f64.sqrt();
        let centre = phi(0.005 / s) - phi(-0.005 / s);
        assert!((row.probabilities[0] - centre).abs() < 1e-12);
        assert!((row.probabilities[0] - 0.00564).abs() < 1e-5);
        assert!((row.floor_mass - phi(-0.005 / s)).abs() < 1e-12);
        assert!((row.floor_mass - 0.4972).abs() < 1e-4);
    }

    #[test]
    fn kernel_matches_transition_rows() {
        let state = NormalArmState::new(0.2, 1.5, 2.0).unwrap();
        let cfg = NmabDpConfig::new(4, 3.0, 0.05, false).unwrap();
        let grid = build_omega(0.2, 1.5, 3.0, 0.05).unwrap();
        let prog = NmabProgramme::new(state, g(0.9), cfg, grid).unwrap();
        for k in 0..4 {
            let n = 1.5 + 2.0 * k as f64;
            for i in [0, 7, grid.len() - 1] {
                let row = transition_row(grid.point(i), n, 2.0, &grid);
                for (j, p) in row.probabilities.iter().enumerate() {
                    let d = j.abs_diff(i);
                    let q = prog.kernels[k].get(d).copied().unwrap_or(0.0);
                    assert!((p - q).abs() < 1e-12, "k={k} i={i} j={j}: {p} vs {q}");
                }
            }
        }
    }

    #[test]
    fn value_below_mean_charge() {
        let state = NormalArmState::new(0.0, 1.0, 1.0).unwrap();
        let cfg = NmabDpConfig::new(20, 3.0, 0.05, false).unwrap();
        for lambda in [-0.5, -0.1, -0.01] {
            let v = nmab_value(state, g(0.9), lambda, cfg)
                .unwrap()
                .root
                .value()
                .unwrap();
            assert!(v >= -lambda, "{v}");
        }
    }

    #[test]
    fn value_at_upper_bound_is_zero() {
        for &(n, gm) in &[(1.0, 0.9), (0.5, 0.99), (4.0, 0.95)] {
            let state = NormalArmState::new(0.0, n, 1.0).unwrap();
            let b = default_bounds_nmab(state, g(gm)).unwrap();
            let cfg = NmabDpConfig::new(40, 3.0, 0.02, false).unwrap();
            let v = nmab_value(state, g(gm), b.upper, cfg).unwrap();
            assert_eq!(v.root, RootValue::Value(0.0));
        }
    }

    #[test]
    fn myopic_index_is_mean() {
        let state = NormalArmState::new(0.7, 2.0, 3.0).unwrap();
        let r = nmab_gi(state, g(0.0), 1e-4, NmabDpConfig::default()).unwrap();
        assert_eq!(r.midpoint, 0.7);
    }

    #[test]
    fn canonical_epsilon_tightens_only_for_low_precision() {
        assert_eq!(canonical_epsilon(1e-4, 4.0), 1e-4);
        assert!((canonical_epsilon(1e-4, 0.25) - 5e-5).abs() < 1e-18);
    }

    #[test]
    fn non_finite_lambda_rejected() {
        let state = NormalArmState::new(0.0, 1.0, 1.0).unwrap();
        let cfg = NmabDpConfig::new(5, 3.0, 0.1, true).unwrap();
        assert!(nmab_value(state, g(0.9), f64::INFINITY, cfg).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(NmabDpConfig::new(0, 3.0, 0.01, true).is_err());
        assert!(NmabDpConfig::new(10, 0.0, 0.01, true).is_err());
        assert!(NmabDpConfig::new(10, 3.0, -0.01, true).is_err());
        assert_eq!(NmabDpConfig::default().state_count(1.0), 141 * 301);
    }
}
