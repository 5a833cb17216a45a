//! Monte Carlo comparison of bandit policies by discounted Bayes return.
//!
//! Every policy in a replication faces the same arm parameters and the same
//! outcome sequence per arm: the m-th pull of arm a yields the same reward
//! whichever policy makes it.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use rayon::prelude::*;

use crate::bmab::BmabDpConfig;
use crate::error::{Error, Result};
use crate::nmab::NmabDpConfig;
use crate::state::{BernoulliArmState, DiscountFactor, NormalArmState};
use crate::table::{
    bmab_prior_grid_table, fmt6, nmab_sequence_detailed, Family, IndexTable, Key, NmabSequenceSpec,
    TableEntry, TableMeta,
};

/// Largest discounted reward mass allowed beyond the simulation horizon,
/// per unit of single-step reward.
pub const DEFAULT_TRUNCATION_BOUND: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArmPrior {
    Bernoulli(BernoulliArmState),
    Normal(NormalArmState),
}

impl ArmPrior {
    fn family(&self) -> Family {
        match self {
            ArmPrior::Bernoulli(_) => Family::Bernoulli,
            ArmPrior::Normal(_) => Family::NormalCanonical,
        }
    }

    fn mean(&self) -> f64 {
        match self {
            ArmPrior::Bernoulli(s) => s.mean(),
            ArmPrior::Normal(s) => s.mu(),
        }
    }
}

/// Smallest T with gamma^T / (1 - gamma) < `bound`.
pub fn default_sim_horizon(gamma: DiscountFactor, bound: f64) -> usize {
    let g = gamma.value();
    let mut t = 1usize;
    let mut tail = g / (1.0 - g);
    while tail >= bound {
        t += 1;
        tail *= g;
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct MabInstance {
    arms: Vec<ArmPrior>,
    gamma: DiscountFactor,
    sim_horizon: usize,
}

impl MabInstance {
    /// All arms must share a family. `sim_horizon = None` truncates where
    /// the discounted tail drops below [`DEFAULT_TRUNCATION_BOUND`].
    pub fn new(
        arms: Vec<ArmPrior>,
        gamma: DiscountFactor,
        sim_horizon: Option<usize>,
    ) -> Result<Self> {
        let Some(first) = arms.first() else {
            return Err(Error::InvalidConfig(
                "an instance needs at least one arm".into(),
            ));
        };
        if arms.iter().any(|a| a.family() != first.family()) {
            return Err(Error::InvalidConfig("arms must share one family".into()));
        }
        let sim_horizon =
            sim_horizon.unwrap_or_else(|| default_sim_horizon(gamma, DEFAULT_TRUNCATION_BOUND));
        if sim_horizon == 0 {
            return Err(Error::InvalidConfig(
                "simulation horizon must be positive".into(),
            ));
        }
        Ok(Self {
            arms,
            gamma,
            sim_horizon,
        })
    }

    pub fn arms(&self) -> &[ArmPrior] {
        &self.arms
    }

    pub fn k(&self) -> usize {
        self.arms.len()
    }

    pub fn gamma(&self) -> DiscountFactor {
        self.gamma
    }

    pub fn sim_horizon(&self) -> usize {
        self.sim_horizon
    }

    pub fn family(&self) -> Family {
        self.arms[0].family()
    }

    /// gamma^T / (1 - gamma): the discounted weight ignored by truncation,
    /// per unit of single-step reward.
    pub fn truncation_bias_bound(&self) -> f64 {
        let g = self.gamma.value();
        g.powi(self.sim_horizon as i32) / (1.0 - g)
    }
}

#[derive(Debug, Clone)]
pub enum Policy {
    /// Largest index, read from or interpolated in a covering table.
    Gittins(Arc<IndexTable>),
    /// Largest posterior mean.
    Greedy,
    UniformRandom,
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::Gittins(_) => "gittins",
            Policy::Greedy => "greedy",
            Policy::UniformRandom => "uniform",
        }
    }
}

/// Builds a table covering every state the instance can reach.
pub fn covering_table(
    instance: &MabInstance,
    epsilon: f64,
    bmab_dp: BmabDpConfig,
    nmab_dp: NmabDpConfig,
    workers: usize,
) -> Result<IndexTable> {
    let t = instance.sim_horizon;
    let mut priors: Vec<ArmPrior> = Vec::new();
    for arm in &instance.arms {
        if !priors.contains(arm) {
            priors.push(*arm);
        }
    }
    match instance.family() {
        Family::Bernoulli => {
            let grid: Vec<(f64, f64)> = priors
                .iter()
                .filter_map(|p| match p {
                    ArmPrior::Bernoulli(s) => Some((s.sigma(), s.n())),
                    ArmPrior::Normal(_) => None,
                })
                .collect();
            bmab_prior_grid_table(&grid, t, instance.gamma, epsilon, bmab_dp, workers)
        }
        Family::NormalCanonical => {
            let mut entries: Vec<TableEntry> = Vec::new();
            let mut eps = epsilon;
            for p in &priors {
                let ArmPrior::Normal(s) = p else { continue };
                let spec = NmabSequenceSpec::new(s.n(), s.tau(), t, instance.gamma)?;
                for (n, _, r) in nmab_sequence_detailed(spec, epsilon, nmab_dp)? {
                    eps = eps.min(r.width().max(f64::MIN_POSITIVE));
                    if !entries.iter().any(|e| (e.key.n - n).abs() < 1e-9) {
                        entries.push(TableEntry {
                            key: Key { sigma: 0.0, n },
                            gi: r.midpoint,
                        });
                    }
                }
            }
            let meta = TableMeta {
                family: Family::NormalCanonical,
                gamma: instance.gamma.value(),
                epsilon: eps,
                horizon: nmab_dp.horizon,
                t,
                sigma0: None,
                n0: None,
                tau: None,
                xi: Some(nmab_dp.xi),
                delta: Some(nmab_dp.delta),
            };
            Ok(IndexTable::new(meta, entries))
        }
    }
}

/// Pre-drawn randomness for one replication.
#[derive(Debug, Clone)]
struct Scenario {
    theta: Vec<f64>,
    /// Per arm, one draw per possible pull: a uniform for Bernoulli arms, a
    /// standard normal for Gaussian arms.
    pulls: Vec<Vec<f64>>,
    /// One uniform per step for randomised policies.
    choices: Vec<f64>,
}

fn replication_rng(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

fn draw_scenario(instance: &MabInstance, rng: &mut ChaCha8Rng) -> Result<Scenario> {
    let t = instance.sim_horizon;
    let mut theta = Vec::with_capacity(instance.k());
    for arm in &instance.arms {
        theta.push(match arm {
            ArmPrior::Bernoulli(s) => Beta::new(s.sigma(), s.n() - s.sigma())
                .map_err(|e| Error::InvalidConfig(e.to_string()))?
                .sample(rng),
            ArmPrior::Normal(s) => {
                let z: f64 = StandardNormal.sample(rng);
                s.mu() + z * s.posterior_sd()
            }
        });
    }
    let mut pulls = Vec::with_capacity(instance.k());
    for arm in &instance.arms {
        pulls.push(match arm {
            ArmPrior::Bernoulli(_) => (0..t).map(|_| rng.random::<f64>()).collect(),
            ArmPrior::Normal(_) => (0..t).map(|_| StandardNormal.sample(rng)).collect(),
        });
    }
    let choices = (0..t).map(|_| rng.random::<f64>()).collect();
    Ok(Scenario {
        theta,
        pulls,
        choices,
    })
}

/// Arms pulled and rewards received in one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub arms: Vec<usize>,
    pub rewards: Vec<f64>,
    pub discounted_return: f64,
}

fn index_of(policy: &Policy, arm: &ArmPrior) -> Result<f64> {
    match policy {
        Policy::Gittins(table) => {
            let found = match arm {
                ArmPrior::Bernoulli(s) => table.interpolate_bernoulli(*s),
                ArmPrior::Normal(s) => table.interpolate_normal(*s),
            };
            found.map(|i| i.estimate).map_err(|e| match e {
                Error::OutOfRange(state) => {
                    Error::InvalidConfig(format!("index table does not cover state {state}"))
                }
                other => other,
            })
        }
        Policy::Greedy | Policy::UniformRandom => Ok(arm.mean()),
    }
}

fn run_scenario(
    instance: &MabInstance,
    policy: &Policy,
    scenario: &Scenario,
) -> Result<Trajectory> {
    let k = instance.k();
    let g = instance.gamma.value();
    let mut arms = instance.arms.clone();
    let mut scores = arms
        .iter()
        .map(|a| index_of(policy, a))
        .collect::<Result<Vec<f64>>>()?;
    let mut pulled = vec![0usize; k];
    let mut out = Trajectory {
        arms: Vec::with_capacity(instance.sim_horizon),
        rewards: Vec::with_capacity(instance.sim_horizon),
        discounted_return: 0.0,
    };
    let mut weight = 1.0;
    for t in 0..instance.sim_horizon {
        let a = match policy {
            Policy::UniformRandom => ((scenario.choices[t] * k as f64) as usize).min(k - 1),
            _ => {
                let mut best = 0;
                for i in 1..k {
                    if scores[i] > scores[best] {
                        best = i;
                    }
                }
                best
            }
        };
        let draw = scenario.pulls[a][pulled[a]];
        pulled[a] += 1;
        let (reward, next) = match arms[a] {
            ArmPrior::Bernoulli(s) => {
                let success = draw < scenario.theta[a];
                (
                    if success { 1.0 } else { 0.0 },
                    ArmPrior::Bernoulli(s.observe(success)),
                )
            }
            ArmPrior::Normal(s) => {
                let y = scenario.theta[a] + draw / s.tau().sqrt();
                (y, ArmPrior::Normal(s.observe(y)))
            }
        };
        arms[a] = next;
        if !matches!(policy, Policy::UniformRandom) {
            scores[a] = index_of(policy, &next)?;
        }
        out.discounted_return += weight * reward;
        weight *= g;
        out.arms.push(a);
        out.rewards.push(reward);
    }
    Ok(out)
}

/// One replication of one policy, as seen inside [`run_policy_comparison`].
pub fn simulate_replication(
    instance: &MabInstance,
    policy: &Policy,
    seed: u64,
    replication: u64,
) -> Result<Trajectory> {
    let scenario = draw_scenario(instance, &mut replication_rng(seed, replication))?;
    run_scenario(instance, policy, &scenario)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicySummary {
    pub policy: String,
    pub mean_return: f64,
    /// Sample standard deviation over sqrt(replications).
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub summaries: Vec<PolicySummary>,
    pub replications: usize,
    pub seed: u64,
    pub sim_horizon: usize,
    pub truncation_bias_bound: f64,
    /// `returns[p][r]`: discounted return of policy p in replication r.
    pub returns: Vec<Vec<f64>>,
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

impl SimulationReport {
    pub fn summary(&self, policy: &str) -> Option<&PolicySummary> {
        self.summaries.iter().find(|s| s.policy == policy)
    }

    /// Mean and standard error of the per-replication difference a - b.
    pub fn paired_difference(&self, a: &str, b: &str) -> Option<(f64, f64)> {
        let ia = self.summaries.iter().position(|s| s.policy == a)?;
        let ib = self.summaries.iter().position(|s| s.policy == b)?;
        let diff: Vec<f64> = self.returns[ia]
            .iter()
            .zip(&self.returns[ib])
            .map(|(x, y)| x - y)
            .collect();
        Some(mean_and_se(&diff))
    }

    /// `policy,mean_return,std_error,replications,seed`
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("policy,mean_return,std_error,replications,seed\n");
        for s in &self.summaries {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                s.policy,
                fmt6(s.mean_return),
                fmt6(s.std_error),
                self.replications,
                self.seed
            );
        }
        out
    }
}

/// Runs every policy on the same `replications` scenarios. Replication r
/// draws from a ChaCha8 stream keyed by (seed, r), so the report does not
/// depend on `workers` (0 = all cores).
pub fn run_policy_comparison(
    instance: &MabInstance,
    policies: &[Policy],
    replications: usize,
    seed: u64,
    workers: usize,
) -> Result<SimulationReport> {
    if replications == 0 {
        return Err(Error::InvalidConfig(
            "replications must be at least 1".into(),
        ));
    }
    for p in policies {
        if let Policy::Gittins(table) = p {
            if table.meta().family != instance.family() {
                return Err(Error::InvalidConfig(
                    "index table family does not match the arms".into(),
                ));
            }
        }
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if workers > 0 {
        builder = builder.num_threads(workers);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let per_rep: Vec<Result<Vec<f64>>> = pool.install(|| {
        (0..replications as u64)
            .into_par_iter()
            .map(|r| {
                let scenario = draw_scenario(instance, &mut replication_rng(seed, r))?;
                policies
                    .iter()
                    .map(|p| run_scenario(instance, p, &scenario).map(|t| t.discounted_return))
                    .collect()
            })
            .collect()
    });
    let mut returns = vec![Vec::with_capacity(replications); policies.len()];
    for rep in per_rep {
        for (p, v) in rep?.into_iter().enumerate() {
            returns[p].push(v);
        }
    }
    let summaries = policies
        .iter()
        .zip(&returns)
        .map(|(p, xs)| {
            let (mean_return, std_error) = mean_and_se(xs);
            PolicySummary {
                policy: p.name().to_string(),
                mean_return,
                std_error,
            }
        })
        .collect();
    Ok(SimulationReport {
        summaries,
        replications,
        seed,
        sim_horizon: instance.sim_horizon,
        truncation_bias_bound: instance.truncation_bias_bound(),
        returns,
    })
}
