//! Acceptance checks. Each test prints one `criterion N: PASS|FAIL` line
//! with the measured quantities, then asserts.

use std::sync::Arc;
use std::time::{Duration, Instant};

use gittins_core::nmab::{nmab_canonical_gi, nmab_gi_direct, Floor};
use gittins_core::table::{bmab_table, BmabGridSpec};
use gittins_core::{
    bmab_gi, covering_table, max_remaining_reward, run_policy_comparison, whittle_fh_index,
    ArmPrior, BernoulliArmState, BmabDpConfig, DiscountFactor, MabInstance, NmabDpConfig,
    NormalArmState, Policy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn g(x: f64) -> DiscountFactor {
    DiscountFactor::new(x).unwrap()
}

fn bern(s: f64, n: f64) -> BernoulliArmState {
    BernoulliArmState::new(s, n).unwrap()
}

fn verdict(id: u32, pass: bool, detail: &str) {
    println!(
        "criterion {id}: {} | {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn bmab_mid(state: BernoulliArmState, gamma: f64, eps: f64, horizon: usize) -> f64 {
    bmab_gi(
        state,
        g(gamma),
        eps,
        BmabDpConfig::new(horizon).unwrap(),
        None,
    )
    .unwrap()
    .midpoint
}

#[test]
fn criterion_01_bmab_horizon_errors() {
    let eps = 5e-6;
    let state = bern(1.0, 2.0);
    // (gamma, N, expected error); None marks entries printed as 0
    let checks: [(f64, usize, Option<f64>); 10] = [
        (0.9, 20, Some(0.00827)),
        (0.9, 60, Some(0.00010)),
        (0.9, 100, None),
        (0.9, 200, None),
        (0.9, 400, None),
        (0.9, 800, None),
        (0.99, 20, Some(0.03738)),
        (0.99, 200, Some(0.00557)),
        (0.99, 400, Some(0.00066)),
        (0.99, 800, Some(0.00001)),
    ];
    let bench = [0.9, 0.99].map(|gm| bmab_mid(state, gm, eps, 2000));
    let mut pass = true;
    let mut detail = format!(
        "benchmark nu(0.9)={:.6} nu(0.99)={:.6};",
        bench[0], bench[1]
    );
    for (gamma, n, expected) in checks {
        let b = if gamma == 0.9 { bench[0] } else { bench[1] };
        let err = b - bmab_mid(state, gamma, eps, n);
        let ok = match expected {
            Some(e) => (err - e).abs() <= 2e-5,
            None => err.abs() < 1e-5,
        };
        pass &= ok;
        let want = expected.map_or("0".to_string(), |e| format!("{e:.5}"));
        detail.push_str(&format!(
            " g={gamma} N={n}: {err:.5} (want {want}){}",
            if ok { "" } else { " x" }
        ));
    }
    verdict(1, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_02_nmab_convergence_errors() {
    let eps = 5e-5;
    let state = NormalArmState::new(0.0, 1.0, 1.0).unwrap();
    let nu = |gamma: f64, n: usize, xi: f64, delta: f64| {
        let cfg = NmabDpConfig::new(n, xi, delta, true).unwrap();
        nmab_gi_direct(state, g(gamma), eps, cfg, None, Floor::AtRoot)
            .unwrap()
            .result
            .midpoint
    };
    let checks: [(&str, f64, _, f64); 6] = [
        ("N=20", 0.9, (20, 6.0, 0.005), 0.0001),
        ("N=20", 0.99, (20, 6.0, 0.005), 0.0084),
        ("delta=0.08", 0.9, (200, 6.0, 0.08), -0.0011),
        ("delta=0.08", 0.99, (200, 6.0, 0.08), -0.0059),
        ("xi=2", 0.9, (200, 2.0, 0.005), 0.0),
        ("xi=2", 0.99, (200, 2.0, 0.005), 0.0109),
    ];
    let bench = [0.9, 0.99].map(|gm| nu(gm, 200, 6.0, 0.005));
    let mut pass = true;
    let mut detail = format!(
        "benchmark nu(0.9)={:.6} nu(0.99)={:.6};",
        bench[0], bench[1]
    );
    for (label, gamma, (n, xi, delta), expected) in checks {
        let b = if gamma == 0.9 { bench[0] } else { bench[1] };
        let err = b - nu(gamma, n, xi, delta);
        let ok = (err - expected).abs() <= 2e-4;
        pass &= ok;
        detail.push_str(&format!(
            " {label} g={gamma}: {err:.4} (want {expected}){}",
            if ok { "" } else { " x" }
        ));
    }
    verdict(2, pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_03_remaining_reward_column() {
    let expected = [
        (
            0.9,
            [
                "1.21577", "0.01797", "0.00027", "0.00000", "0.00000", "0.00000",
            ],
        ),
        (
            0.99,
            [
                "81.79069", "54.71566", "36.60323", "13.39797", "1.79506", "0.03222",
            ],
        ),
    ];
    let horizons = [20, 60, 100, 200, 400, 800];
    let mut mismatches = Vec::new();
    for (gamma, column) in expected {
        for (n, want) in horizons.iter().zip(column) {
            let got = format!("{:.5}", max_remaining_reward(g(gamma), *n));
            if got != want {
                mismatches.push(format!("g={gamma} N={n}: {got} vs {want}"));
            }
        }
    }
    let pass = mismatches.is_empty();
    verdict(3, pass, &format!("12 entries, mismatches: {mismatches:?}"));
    assert!(pass);
}

#[test]
fn criterion_04_transform_consistency() {
    let eps = 5e-5;
    let cfg = NmabDpConfig::default();
    let state = NormalArmState::new(0.0, 2.0, 4.0).unwrap();
    let direct = nmab_gi_direct(state, g(0.9), eps, cfg, None, Floor::AtRoot)
        .unwrap()
        .result
        .midpoint;
    let canonical = nmab_canonical_gi(0.5, g(0.9), eps, cfg, None)
        .unwrap()
        .result
        .midpoint;
    let diff = (direct - 0.5 * canonical).abs();
    let pass = diff <= 2.0 * eps + 5e-4;
    verdict(
        4,
        pass,
        &format!(
            "direct={direct:.6} half canonical={:.6} diff={diff:.2e}",
            0.5 * canonical
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_05_pruning_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let eps = 1e-4;
    let (mut identical, mut fewer) = (0, 0);
    for _ in 0..50 {
        let state = NormalArmState::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(0.5..5.0),
            rng.random_range(0.5..2.0),
        )
        .unwrap();
        let gamma = g(rng.random_range(0.8..0.98));
        let run = |prune| {
            let cfg = NmabDpConfig::new(60, 3.0, 0.02, prune).unwrap();
            nmab_gi_direct(state, gamma, eps, cfg, None, Floor::AtRoot).unwrap()
        };
        let (on, off) = (run(true), run(false));
        identical += usize::from(on.result == off.result);
        fewer += usize::from(on.states_evaluated < off.states_evaluated);
    }
    let pass = identical == 50 && fewer >= 45;
    verdict(
        5,
        pass,
        &format!("identical results {identical}/50, fewer evaluations {fewer}/50"),
    );
    assert!(pass);
}

#[test]
fn criterion_06_extended_floor_equivalence() {
    let eps = 5e-5;
    let cfg = NmabDpConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let state = NormalArmState::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(0.5..4.0),
            rng.random_range(0.5..2.0),
        )
        .unwrap();
        let gamma = g(rng.random_range(0.8..0.95));
        let at = |floor| {
            nmab_gi_direct(state, gamma, eps, cfg, None, floor)
                .unwrap()
                .result
                .midpoint
        };
        worst = worst.max((at(Floor::AtRoot) - at(Floor::Extended)).abs());
    }
    let pass = worst <= 2.0 * eps + 5e-4;
    verdict(
        6,
        pass,
        &format!("largest difference over 10 states {worst:.2e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_07_monotonicity_suite() {
    let eps = 1e-4;
    let dp = BmabDpConfig::new(200).unwrap();
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut check = |ok: bool, what: String| {
        checked += 1;
        if !ok {
            failures.push(what);
        }
    };
    let nu = |s: f64, n: f64, gamma: f64| {
        bmab_gi(bern(s, n), g(gamma), eps, dp, None)
            .unwrap()
            .midpoint
    };
    for gamma in [0.5, 0.9, 0.95] {
        for n in 2..=8 {
            for s in 1..n {
                let (s, n) = (s as f64, n as f64);
                let v = nu(s, n, gamma);
                check(
                    v >= s / n - eps && v <= 1.0 + eps,
                    format!("bounds ({s},{n},{gamma})"),
                );
                if s + 1.0 < n {
                    check(
                        nu(s + 1.0, n, gamma) >= v - eps,
                        format!("sigma ({s},{n},{gamma})"),
                    );
                }
                check(
                    nu(s, n + 1.0, gamma) <= v + eps,
                    format!("n ({s},{n},{gamma})"),
                );
                let half = nu(0.5 * s, 0.5 * n, gamma);
                let double = nu(2.0 * s, 2.0 * n, gamma);
                check(
                    half >= v - eps && v >= double - eps,
                    format!("scaling ({s},{n},{gamma})"),
                );
            }
        }
    }
    for (s, n) in [(1.0, 2.0), (1.0, 5.0), (3.0, 4.0)] {
        let vs: Vec<f64> = [0.5, 0.7, 0.9, 0.95]
            .iter()
            .map(|&gm| nu(s, n, gm))
            .collect();
        check(
            vs.windows(2).all(|w| w[1] >= w[0] - eps),
            format!("gamma ({s},{n})"),
        );
    }
    // Gaussian: non-decreasing in mu and tau, non-increasing in n
    let neps = 5e-5;
    let cfg = NmabDpConfig::new(60, 3.0, 0.02, true).unwrap();
    let nnu = |mu: f64, n: f64, tau: f64| {
        let st = NormalArmState::new(mu, n, tau).unwrap();
        nmab_gi_direct(st, g(0.9), neps, cfg, None, Floor::AtRoot)
            .unwrap()
            .result
            .midpoint
    };
    let axis = [[-1.0, 0.0, 1.0], [0.5, 1.0, 2.0], [0.5, 1.0, 2.0]];
    let mut lattice = [[[0.0; 3]; 3]; 3];
    for (i, &mu) in axis[0].iter().enumerate() {
        for (j, &n) in axis[1].iter().enumerate() {
            for (k, &tau) in axis[2].iter().enumerate() {
                lattice[i][j][k] = nnu(mu, n, tau);
            }
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let v = lattice[i][j][k];
                if i < 2 {
                    check(
                        lattice[i + 1][j][k] >= v - neps,
                        format!("mu [{i}][{j}][{k}]"),
                    );
                }
                if j < 2 {
                    check(
                        lattice[i][j + 1][k] <= v + neps,
                        format!("n [{i}][{j}][{k}]"),
                    );
                }
                if k < 2 {
                    check(
                        lattice[i][j][k + 1] >= v - neps,
                        format!("tau [{i}][{j}][{k}]"),
                    );
                }
            }
        }
    }
    let pass = failures.is_empty();
    verdict(
        7,
        pass,
        &format!("{checked} relations checked, failures: {failures:?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_08_finite_horizon_index() {
    let eps = 1e-6;
    let state = bern(1.0, 2.0);
    let two = whittle_fh_index(state, g(0.9), 2, eps).unwrap().midpoint;
    let horizons = [1, 2, 5, 20, 100, 400];
    let values: Vec<f64> = horizons
        .iter()
        .map(|&s| whittle_fh_index(state, g(0.9), s, eps).unwrap().midpoint)
        .collect();
    let golden = bmab_mid(state, 0.9, 5e-6, 2000);
    let monotone = values.windows(2).all(|w| w[1] >= w[0] - eps);
    let last = values[values.len() - 1];
    let pass = (two - 0.551724).abs() <= 2e-6 && monotone && (last - golden).abs() <= 1e-4;
    verdict(
        8,
        pass,
        &format!("s=2: {two:.6}; by s {horizons:?}: {values:.6?}; golden {golden:.6}"),
    );
    assert!(pass);
}

#[test]
fn criterion_09_table_throughput() {
    let spec = BmabGridSpec::new(1.0, 2.0, 100).unwrap();
    let dp = BmabDpConfig::new(200).unwrap();
    let start = Instant::now();
    let single = bmab_table(spec, g(0.9), 1e-4, dp, 1).unwrap();
    let elapsed = start.elapsed();
    let parallel = bmab_table(spec, g(0.9), 1e-4, dp, 4).unwrap();
    let identical = single.to_csv_string().unwrap() == parallel.to_csv_string().unwrap();
    let pass = single.len() == 5151 && elapsed <= Duration::from_secs(15 * 60) && identical;
    verdict(
        9,
        pass,
        &format!(
            "{} states in {:.1}s on one worker; 1 vs 4 workers byte-identical: {identical}",
            single.len(),
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_10_gittins_beats_greedy() {
    let gamma = g(0.9);
    let arm = ArmPrior::Bernoulli(bern(1.0, 2.0));
    let instance = MabInstance::new(vec![arm, arm], gamma, None).unwrap();
    let table = covering_table(
        &instance,
        1e-4,
        BmabDpConfig::default_for(gamma),
        NmabDpConfig::default(),
        0,
    )
    .unwrap();
    let policies = [Policy::Gittins(Arc::new(table)), Policy::Greedy];
    let report = run_policy_comparison(&instance, &policies, 500, 2024, 0).unwrap();
    let gi = report.summary("gittins").unwrap().mean_return;
    let greedy = report.summary("greedy").unwrap().mean_return;
    let (diff, se) = report.paired_difference("gittins", "greedy").unwrap();
    let pass = gi >= greedy && diff >= se;
    verdict(
        10,
        pass,
        &format!("gittins {gi:.4}, greedy {greedy:.4}, paired difference {diff:.4} (se {se:.4}), T_sim {}", report.sim_horizon),
    );
    assert!(pass);
}
