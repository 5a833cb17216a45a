//! Convergence reports: error of a truncated computation against a
//! benchmark, one row per value of the relaxed parameter.

use std::fmt::Write as _;
use std::time::Instant;

use gittins_core::nmab::{nmab_gi_direct, Floor};
use gittins_core::table::fmt6;
use gittins_core::{
    bmab_gi, max_remaining_reward, BernoulliArmState, BmabDpConfig, DiscountFactor, NmabDpConfig,
    NormalArmState, Result,
};

use crate::{emit, ConvergenceCommand, Sweep};

const NMAB_BENCHMARK: (usize, f64, f64) = (200, 6.0, 0.005);

fn gammas(values: &[f64]) -> Result<Vec<DiscountFactor>> {
    values.iter().map(|&g| DiscountFactor::new(g)).collect()
}

/// Columns `N,time_s`, then `error_gamma_<g>,rrn_gamma_<g>` per discount
/// factor. Errors are benchmark minus approximation.
pub fn bmab_report(
    state: BernoulliArmState,
    epsilon: f64,
    benchmark: usize,
    horizons: &[usize],
    gs: &[f64],
) -> Result<String> {
    let gs = gammas(gs)?;
    let mut out = String::from("N,time_s");
    for g in &gs {
        let _ = write!(out, ",error_gamma_{g},rrn_gamma_{g}", g = g.value());
    }
    out.push('\n');
    if horizons.is_empty() {
        return Ok(out);
    }
    let bench: Vec<f64> = gs
        .iter()
        .map(|&g| {
            bmab_gi(state, g, epsilon, BmabDpConfig::new(benchmark)?, None).map(|r| r.midpoint)
        })
        .collect::<Result<_>>()?;
    for &h in horizons {
        let start = Instant::now();
        let mut cols = String::new();
        for (g, b) in gs.iter().zip(&bench) {
            let v = bmab_gi(state, *g, epsilon, BmabDpConfig::new(h)?, None)?.midpoint;
            let _ = write!(
                cols,
                ",{},{}",
                fmt6(b - v),
                fmt6(max_remaining_reward(*g, h))
            );
        }
        let _ = writeln!(out, "{h},{}{cols}", fmt6(start.elapsed().as_secs_f64()));
    }
    Ok(out)
}

fn nmab_index(gamma: DiscountFactor, epsilon: f64, cfg: NmabDpConfig) -> Result<f64> {
    let state = NormalArmState::new(0.0, 1.0, 1.0)?;
    Ok(
        nmab_gi_direct(state, gamma, epsilon, cfg, None, Floor::AtRoot)?
            .result
            .midpoint,
    )
}

fn default_values(sweep: Sweep) -> Vec<f64> {
    match sweep {
        Sweep::N => vec![20.0, 40.0, 60.0, 80.0, 100.0, 120.0, 140.0],
        Sweep::Delta => vec![0.08, 0.04, 0.02, 0.01],
        Sweep::Xi => vec![2.0, 2.5, 3.0],
    }
}

/// Columns `<param>,time_s`, then `error_gamma_<g>` per discount factor.
pub fn nmab_report(sweep: Sweep, values: &[f64], epsilon: f64, gs: &[f64]) -> Result<String> {
    let gs = gammas(gs)?;
    let name = match sweep {
        Sweep::N => "N",
        Sweep::Delta => "delta",
        Sweep::Xi => "xi",
    };
    let mut out = format!("{name},time_s");
    for g in &gs {
        let _ = write!(out, ",error_gamma_{}", g.value());
    }
    out.push('\n');
    if values.is_empty() {
        return Ok(out);
    }
    let (n, xi, delta) = NMAB_BENCHMARK;
    let bench_cfg = NmabDpConfig::new(n, xi, delta, true)?;
    let bench: Vec<f64> = gs
        .iter()
        .map(|&g| nmab_index(g, epsilon, bench_cfg))
        .collect::<Result<_>>()?;
    for &v in values {
        let cfg = match sweep {
            Sweep::N => NmabDpConfig::new(v as usize, xi, delta, true)?,
            Sweep::Delta => NmabDpConfig::new(n, xi, v, true)?,
            Sweep::Xi => NmabDpConfig::new(n, v, delta, true)?,
        };
        let start = Instant::now();
        let mut cols = String::new();
        for (g, b) in gs.iter().zip(&bench) {
            let _ = write!(cols, ",{}", fmt6(b - nmab_index(*g, epsilon, cfg)?));
        }
        let _ = writeln!(out, "{v},{}{cols}", fmt6(start.elapsed().as_secs_f64()));
    }
    Ok(out)
}

pub fn run(cmd: ConvergenceCommand) -> Result<()> {
    match cmd {
        ConvergenceCommand::Bmab {
            sigma,
            n,
            epsilon,
            benchmark_horizon,
            horizons,
            gammas,
            output,
        } => {
            let state = BernoulliArmState::new(sigma, n)?;
            emit(
                &output,
                &bmab_report(state, epsilon, benchmark_horizon, &horizons, &gammas)?,
            )
        }
        ConvergenceCommand::Nmab {
            sweep,
            values,
            epsilon,
            gammas,
            output,
        } => {
            let values = values.unwrap_or_else(|| default_values(sweep));
            emit(&output, &nmab_report(sweep, &values, epsilon, &gammas)?)
        }
    }
}
