//! `gittins`: Gittins and finite-horizon Whittle indices, index tables,
//! convergence reports and policy simulations from the command line.

mod convergence;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gittins_core::nmab::{self, DEFAULT_EPSILON};
use gittins_core::table::{self, fmt6, BmabGridSpec, NmabSequenceSpec};
use gittins_core::{
    bmab_gi, covering_table, run_policy_comparison, whittle_fh_index, ArmPrior, BernoulliArmState,
    BmabDpConfig, DiscountFactor, Error, IndexResult, MabInstance, NmabDpConfig, NormalArmState,
    Policy, Result,
};

#[derive(Parser, Debug)]
#[command(
    name = "gittins",
    version,
    about = "Gittins indices for Bernoulli and Gaussian bandits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gittins index of a Bernoulli arm (Beta posterior).
    Bmab(BmabArgs),
    /// Gittins index of a Gaussian arm with known observation precision.
    Nmab(NmabArgs),
    /// Finite-horizon Whittle index of a Bernoulli arm.
    Whittle(WhittleArgs),
    /// Bulk index tables as CSV plus a `.meta` sidecar.
    Table {
        #[command(subcommand)]
        family: TableCommand,
    },
    /// Error of truncated computations against a high-accuracy benchmark.
    Convergence {
        #[command(subcommand)]
        family: ConvergenceCommand,
    },
    /// Monte Carlo comparison of Gittins, greedy and uniform-random policies.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Discount factor gamma, in [0, 1).
    #[arg(long, default_value_t = 0.9)]
    gamma: f64,
    /// Write output here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BmabArgs {
    /// Bayesian number of successes Sigma (Beta parameter alpha).
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Bayesian number of trials n (alpha + beta); must exceed sigma.
    #[arg(long, default_value_t = 2.0)]
    n: f64,
    /// Width of the final calibration interval (reward units).
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    /// DP horizon N in stages [default: 200 for gamma <= 0.9, 800 for gamma <= 0.99, else 2000].
    #[arg(long)]
    horizon: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct NmabDp {
    /// DP horizon N in stages.
    #[arg(long, default_value_t = 140)]
    horizon: usize,
    /// Grid half-width xi, in posterior standard deviations.
    #[arg(long, default_value_t = 3.0)]
    xi: f64,
    /// Grid spacing delta for the posterior mean (reward units).
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Evaluate every state instead of pruning provably retired ones.
    #[arg(long)]
    no_prune: bool,
}

impl NmabDp {
    fn config(&self) -> Result<NmabDpConfig> {
        NmabDpConfig::new(self.horizon, self.xi, self.delta, !self.no_prune)
    }
}

#[derive(Args, Debug)]
struct NmabArgs {
    /// Posterior mean mu (reward units).
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// Posterior precision n of the mean (1 / reward variance).
    #[arg(long, default_value_t = 1.0)]
    n: f64,
    /// Observation precision tau (1 / reward variance).
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Width of the final calibration interval (reward units).
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[command(flatten)]
    dp: NmabDp,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct WhittleArgs {
    /// Bayesian number of successes Sigma.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Bayesian number of trials n; must exceed sigma.
    #[arg(long, default_value_t = 2.0)]
    n: f64,
    /// Decisions remaining s (stages), at least 1.
    #[arg(long, default_value_t = 1)]
    s: usize,
    /// Width of the final calibration interval (reward units).
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Debug)]
enum TableCommand {
    /// Every state reachable within T observations of a Beta prior.
    Bmab {
        /// Prior Sigma0.
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Prior n0; must exceed sigma.
        #[arg(long, default_value_t = 2.0)]
        n: f64,
        /// Number of observations T covered (table has (T+1)(T+2)/2 rows).
        #[arg(long = "T", default_value_t = 100)]
        t: usize,
        /// Width of each calibration interval (reward units).
        #[arg(long, default_value_t = 1e-4)]
        epsilon: f64,
        /// DP horizon N in stages [default: 200 for gamma <= 0.9, 800 for gamma <= 0.99, else 2000].
        #[arg(long)]
        horizon: Option<usize>,
        /// Worker threads; 0 uses every available core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Canonical Gaussian indices for n0/tau, n0/tau + 1, ..., n0/tau + T.
    Nmab {
        /// Prior precision n0.
        #[arg(long, default_value_t = 1.0)]
        n: f64,
        /// Observation precision tau.
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        /// Number of observations T covered.
        #[arg(long = "T", default_value_t = 10)]
        t: usize,
        /// Width of each calibration interval (reward units, before the 1/sqrt(tau) map).
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        #[command(flatten)]
        dp: NmabDp,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand, Debug)]
enum ConvergenceCommand {
    /// Error in the Bernoulli index from a finite DP horizon N.
    Bmab {
        /// Sigma of the test state.
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// n of the test state.
        #[arg(long, default_value_t = 2.0)]
        n: f64,
        #[arg(long, default_value_t = 5e-6)]
        /// Calibration accuracy (reward units).
        epsilon: f64,
        /// Benchmark DP horizon (stages).
        #[arg(long, default_value_t = 2000)]
        benchmark_horizon: usize,
        /// Horizons N to compare, comma separated (stages).
        #[arg(long, value_delimiter = ',', num_args = 0.., default_values_t = [20usize, 60, 100, 200, 400, 800])]
        horizons: Vec<usize>,
        /// Discount factors, comma separated.
        #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [0.9, 0.99])]
        gammas: Vec<f64>,
        #[arg(long)]
        /// Write output here instead of standard output.
        output: Option<PathBuf>,
    },
    /// Error in nu(0, 1, gamma, 1) when one of N, delta or xi is relaxed from
    /// the benchmark (N=200, xi=6, delta=0.005).
    Nmab {
        /// Parameter to relax.
        #[arg(long, value_enum, default_value_t = Sweep::N)]
        sweep: Sweep,
        /// Values of the swept parameter, comma separated [default: N 20,40,...,140; delta 0.08,0.04,0.02,0.01; xi 2,2.5,3].
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Option<Vec<f64>>,
        /// Calibration accuracy (reward units).
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// Discount factors, comma separated.
        #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [0.9, 0.99])]
        gammas: Vec<f64>,
        #[arg(long)]
        /// Write output here instead of standard output.
        output: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Sweep {
    #[value(name = "N")]
    N,
    Delta,
    Xi,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FamilyArg {
    Bmab,
    Nmab,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Reward family of the arms.
    #[arg(long, value_enum, default_value_t = FamilyArg::Bmab)]
    family: FamilyArg,
    /// Number of arms k, all sharing the prior given by --sigma/--n or --mu/--n/--tau.
    #[arg(long, default_value_t = 2)]
    arms: usize,
    /// Prior Sigma0 (Bernoulli arms).
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Prior mean mu0 (Gaussian arms, reward units).
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// Prior n0 (trials for Bernoulli, precision for Gaussian arms).
    #[arg(long, default_value_t = 2.0)]
    n: f64,
    /// Observation precision tau (Gaussian arms).
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Simulated decision times [default: smallest T with gamma^T/(1-gamma) < 1e-3].
    #[arg(long = "T")]
    t: Option<usize>,
    /// Monte Carlo replications.
    #[arg(long, default_value_t = 500)]
    replications: usize,
    /// Seed of the per-replication random streams.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Accuracy of the Gittins index table (reward units).
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    /// Worker threads; 0 uses every available core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[command(flatten)]
    common: Common,
}

fn discount(g: f64) -> Result<DiscountFactor> {
    DiscountFactor::new(g)
}

fn index_report(r: &IndexResult) -> String {
    format!(
        "{}\ninterval=[{}, {}]\nevaluations={}\n",
        fmt6(r.midpoint),
        fmt6(r.lower),
        fmt6(r.upper),
        r.evaluations
    )
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn bmab_dp(horizon: Option<usize>, gamma: DiscountFactor) -> Result<BmabDpConfig> {
    match horizon {
        Some(h) => BmabDpConfig::new(h),
        None => Ok(BmabDpConfig::default_for(gamma)),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bmab(a) => {
            let gamma = discount(a.common.gamma)?;
            let state = BernoulliArmState::new(a.sigma, a.n)?;
            let r = bmab_gi(state, gamma, a.epsilon, bmab_dp(a.horizon, gamma)?, None)?;
            emit(&a.common.output, &index_report(&r))
        }
        Command::Nmab(a) => {
            let gamma = discount(a.common.gamma)?;
            let state = NormalArmState::new(a.mu, a.n, a.tau)?;
            let r = nmab::nmab_gi(state, gamma, a.epsilon, a.dp.config()?)?;
            emit(&a.common.output, &index_report(&r))
        }
        Command::Whittle(a) => {
            let gamma = discount(a.common.gamma)?;
            let state = BernoulliArmState::new(a.sigma, a.n)?;
            let r = whittle_fh_index(state, gamma, a.s, a.epsilon)?;
            emit(&a.common.output, &index_report(&r))
        }
        Command::Table { family } => run_table(family),
        Command::Convergence { family } => convergence::run(family),
        Command::Simulate(a) => run_simulate(a),
    }
}

fn write_table(t: &table::IndexTable, output: &Option<PathBuf>) -> Result<()> {
    match output {
        Some(path) => t.write(path),
        None => emit(&None, &t.to_csv_string()?),
    }
}

fn run_table(cmd: TableCommand) -> Result<()> {
    match cmd {
        TableCommand::Bmab {
            sigma,
            n,
            t,
            epsilon,
            horizon,
            workers,
            common,
        } => {
            let gamma = discount(common.gamma)?;
            let spec = BmabGridSpec::new(sigma, n, t)?;
            let table = table::bmab_table(spec, gamma, epsilon, bmab_dp(horizon, gamma)?, workers)?;
            write_table(&table, &common.output)
        }
        TableCommand::Nmab {
            n,
            tau,
            t,
            epsilon,
            dp,
            common,
        } => {
            let gamma = discount(common.gamma)?;
            let spec = NmabSequenceSpec::new(n, tau, t, gamma)?;
            let table = table::nmab_sequence(spec, epsilon, dp.config()?)?;
            write_table(&table, &common.output)
        }
    }
}

fn run_simulate(a: SimulateArgs) -> Result<()> {
    let gamma = discount(a.common.gamma)?;
    let prior = match a.family {
        FamilyArg::Bmab => ArmPrior::Bernoulli(BernoulliArmState::new(a.sigma, a.n)?),
        FamilyArg::Nmab => ArmPrior::Normal(NormalArmState::new(a.mu, a.n, a.tau)?),
    };
    let instance = MabInstance::new(vec![prior; a.arms], gamma, a.t)?;
    let table = covering_table(
        &instance,
        a.epsilon,
        BmabDpConfig::default_for(gamma),
        NmabDpConfig::default(),
        a.workers,
    )?;
    let policies = [
        Policy::Gittins(Arc::new(table)),
        Policy::Greedy,
        Policy::UniformRandom,
    ];
    let report = run_policy_comparison(&instance, &policies, a.replications, a.seed, a.workers)?;
    let meta = format!(
        "k={}\ngamma={}\nsim_horizon={}\ntruncation_bias_bound={:e}\nreplications={}\nseed={}\n",
        instance.k(),
        gamma.value(),
        report.sim_horizon,
        report.truncation_bias_bound,
        report.replications,
        report.seed
    );
    match &a.common.output {
        Some(path) => {
            fs::write(path, report.to_csv_string())?;
            fs::write(table::meta_path(path), meta)?;
        }
        None => {
            print!("{}", report.to_csv_string());
            eprint!("{meta}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::FAILURE
        }
    }
}

fn describe(e: &Error) -> String {
    let mut msg = e.to_string();
    let mut source = std::error::Error::source(e);
    while let Some(s) = source {
        msg.push_str(": ");
        msg.push_str(&s.to_string());
        source = s.source();
    }
    msg
}
