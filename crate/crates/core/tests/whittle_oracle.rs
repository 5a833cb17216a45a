//! Finite-horizon indices against exhaustive search over stopping rules.
//!
//! With `s` decisions left, the index equals the largest ratio
//! E[discounted reward] / E[discounted plays] over rules that play now and
//! may stop after any outcome history.

use gittins_core::{bmab_gi, whittle_fh_index, BernoulliArmState, BmabDpConfig, DiscountFactor};

fn g(x: f64) -> DiscountFactor {
    DiscountFactor::new(x).unwrap()
}

/// (reward, plays) of every rule that plays at this node.
fn rules(sigma: f64, n: f64, gamma: f64, left: usize) -> Vec<(f64, f64)> {
    let p = sigma / n;
    let after = |s: f64, nn: f64| {
        let mut opts = vec![(0.0, 0.0)];
        if left > 1 {
            opts.extend(rules(s, nn, gamma, left - 1));
        }
        opts
    };
    let win = after(sigma + 1.0, n + 1.0);
    let lose = after(sigma, n + 1.0);
    let mut out = Vec::with_capacity(win.len() * lose.len());
    for &(aw, bw) in &win {
        for &(al, bl) in &lose {
            out.push((
                p + gamma * (p * aw + (1.0 - p) * al),
                1.0 + gamma * (p * bw + (1.0 - p) * bl),
            ));
        }
    }
    out
}

fn oracle(sigma: f64, n: f64, gamma: f64, s: usize) -> f64 {
    rules(sigma, n, gamma, s)
        .into_iter()
        .map(|(a, b)| a / b)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn matches_exhaustive_search_for_short_horizons() {
    let eps = 1e-6;
    for (sigma, n) in [(1.0, 2.0), (1.0, 3.0), (2.0, 3.0), (0.5, 1.0), (3.0, 7.0)] {
        for gamma in [0.5, 0.9, 0.99] {
            for s in 1..=3 {
                let state = BernoulliArmState::new(sigma, n).unwrap();
                let got = whittle_fh_index(state, g(gamma), s, eps).unwrap().midpoint;
                let want = oracle(sigma, n, gamma, s);
                assert!(
                    (got - want).abs() <= 2.0 * eps,
                    "({sigma},{n}) gamma={gamma} s={s}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn two_decisions_by_hand() {
    // playing twice whatever happens: (0.5 + 0.9 * 0.5) / 1.9; stopping after
    // a failure: (0.5 + 0.9 * 0.5 * 2/3) / (1 + 0.9 * 0.5) = 0.8 / 1.45
    assert!((oracle(1.0, 2.0, 0.9, 2) - 0.8 / 1.45).abs() < 1e-15);
    let state = BernoulliArmState::new(1.0, 2.0).unwrap();
    let got = whittle_fh_index(state, g(0.9), 2, 1e-7).unwrap().midpoint;
    assert!((got - 0.551724).abs() <= 2e-6);
}

#[test]
fn grows_with_horizon_towards_gittins_index() {
    let eps = 1e-5;
    for (sigma, n) in [(1.0, 2.0), (2.0, 5.0), (0.3, 1.0)] {
        let state = BernoulliArmState::new(sigma, n).unwrap();
        for gamma in [0.7, 0.9] {
            let gi = bmab_gi(state, g(gamma), eps, BmabDpConfig::new(400).unwrap(), None)
                .unwrap()
                .midpoint;
            let mut prev = f64::NEG_INFINITY;
            for s in [1, 2, 5, 20, 100] {
                let v = whittle_fh_index(state, g(gamma), s, eps).unwrap().midpoint;
                assert!(v >= sigma / n - eps / 2.0);
                assert!(v >= prev - eps, "not monotone at s={s}");
                assert!(v <= gi + eps, "s={s}: {v} above {gi}");
                prev = v;
            }
        }
    }
}

#[test]
fn long_horizon_meets_gittins_index() {
    let state = BernoulliArmState::new(1.0, 2.0).unwrap();
    for (gamma, golden) in [(0.9, 0.702890), (0.99, 0.869860)] {
        let h = if gamma > 0.95 { 1000 } else { 400 };
        let v = whittle_fh_index(state, g(gamma), h, 5e-6).unwrap().midpoint;
        assert!((v - golden).abs() <= 1e-4, "gamma={gamma}: {v}");
    }
}
