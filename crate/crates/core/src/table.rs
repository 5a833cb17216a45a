//! Bulk index tables: generation, storage and monotone interpolation.
//!
//! Bernoulli tables cover the states reachable within `T` observations of a
//! prior (sigma0, n0). Rows sharing the same sigma are computed by one worker
//! in ascending `n`; each state's index caps the next state's upper bound
//! because the index is non-increasing in `n` at fixed sigma.
//!
//! Gaussian tables hold canonical indices nu(0, n, gamma, 1) for
//! n = n0/tau, n0/tau + 1, ..., n0/tau + T.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::bmab::{bmab_gi, BmabDpConfig};
use crate::bounds::{default_bounds_bmab, default_bounds_nmab, Bracket};
use crate::calibration::IndexResult;
use crate::error::{Error, Result};
use crate::nmab::{canonical_epsilon, nmab_canonical_gi, NmabDpConfig};
use crate::state::{BernoulliArmState, DiscountFactor, NormalArmState};

/// Version written to every metadata sidecar.
pub const FORMAT_VERSION: u32 = 1;

const KEY_TOLERANCE: f64 = 1e-6;

/// Prior and extent of a Bernoulli state grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BmabGridSpec {
    pub sigma0: f64,
    pub n0: f64,
    pub t: usize,
}

impl BmabGridSpec {
    pub fn new(sigma0: f64, n0: f64, t: usize) -> Result<Self> {
        BernoulliArmState::new(sigma0, n0)?;
        Ok(Self { sigma0, n0, t })
    }

    /// (T+1)(T+2)/2
    pub fn state_count(&self) -> usize {
        (self.t + 1) * (self.t + 2) / 2
    }

    /// States {(sigma0 + i, n0 + j) : 0 <= i <= j <= T} of row `i`, in
    /// ascending `n`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = BernoulliArmState> + '_ {
        let sigma = self.sigma0 + i as f64;
        (i..=self.t).map(move |j| {
            BernoulliArmState::new(sigma, self.n0 + j as f64).expect("grid states are valid")
        })
    }
}

/// Canonical Gaussian sequence for one arm prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmabSequenceSpec {
    pub n0: f64,
    pub tau: f64,
    pub t: usize,
    pub gamma: DiscountFactor,
}

impl NmabSequenceSpec {
    pub fn new(n0: f64, tau: f64, t: usize, gamma: DiscountFactor) -> Result<Self> {
        NormalArmState::new(0.0, n0, tau)?;
        Ok(Self { n0, tau, t, gamma })
    }

    /// n0/tau, n0/tau + 1, ..., n0/tau + T.
    pub fn canonical_ns(&self) -> Vec<f64> {
        let start = self.n0 / self.tau;
        (0..=self.t).map(|k| start + k as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Bernoulli,
    /// Gaussian arms at mu = 0, tau = 1.
    NormalCanonical,
}

impl Family {
    fn as_str(self) -> &'static str {
        match self {
            Family::Bernoulli => "bmab",
            Family::NormalCanonical => "nmab",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "bmab" => Ok(Family::Bernoulli),
            "nmab" => Ok(Family::NormalCanonical),
            other => Err(Error::Format(format!("unknown family {other:?}"))),
        }
    }
}

/// Parameters a table was generated with.
#[derive(Debug, Clone, PartialEq)]
pub struct TableMeta {
    pub family: Family,
    pub gamma: f64,
    pub epsilon: f64,
    /// DP horizon `N`.
    pub horizon: usize,
    pub t: usize,
    pub sigma0: Option<f64>,
    pub n0: Option<f64>,
    pub tau: Option<f64>,
    pub xi: Option<f64>,
    pub delta: Option<f64>,
}

impl TableMeta {
    /// Plain-text `key=value` form, one entry per line.
    pub fn to_kv_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "format_version={FORMAT_VERSION}");
        let _ = writeln!(out, "family={}", self.family.as_str());
        let _ = writeln!(out, "gamma={}", self.gamma);
        let _ = writeln!(out, "epsilon={}", self.epsilon);
        let _ = writeln!(out, "N={}", self.horizon);
        let _ = writeln!(out, "T={}", self.t);
        let optional = [
            ("sigma0", self.sigma0),
            ("n0", self.n0),
            ("tau", self.tau),
            ("xi", self.xi),
            ("delta", self.delta),
        ];
        for (k, v) in optional {
            if let Some(v) = v {
                let _ = writeln!(out, "{k}={v}");
            }
        }
        out
    }

    pub fn parse_kv(text: &str) -> Result<Self> {
        let mut version = None;
        let mut family = None;
        let (mut gamma, mut epsilon, mut horizon, mut t) = (None, None, None, None);
        let mut meta_opt: [(&str, Option<f64>); 5] = [
            ("sigma0", None),
            ("n0", None),
            ("tau", None),
            ("xi", None),
            ("delta", None),
        ];
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("expected key=value, got {line:?}")))?;
            let num = || -> Result<f64> {
                value
                    .parse()
                    .map_err(|_| Error::Format(format!("bad number for {key}: {value:?}")))
            };
            let int = || -> Result<usize> {
                value
                    .parse()
                    .map_err(|_| Error::Format(format!("bad integer for {key}: {value:?}")))
            };
            match key {
                "format_version" => version = Some(int()?),
                "family" => family = Some(Family::parse(value)?),
                "gamma" => gamma = Some(num()?),
                "epsilon" => epsilon = Some(num()?),
                "N" => horizon = Some(int()?),
                "T" => t = Some(int()?),
                _ => match meta_opt.iter_mut().find(|(k, _)| *k == key) {
                    Some(slot) => slot.1 = Some(num()?),
                    None => return Err(Error::Format(format!("unknown metadata key {key:?}"))),
                },
            }
        }
        match version {
            Some(v) if v == FORMAT_VERSION as usize => {}
            Some(v) => return Err(Error::Format(format!("unsupported format version {v}"))),
            None => return Err(Error::Format("missing format_version".into())),
        }
        let missing = |k: &str| Error::Format(format!("missing {k}"));
        Ok(Self {
            family: family.ok_or_else(|| missing("family"))?,
            gamma: gamma.ok_or_else(|| missing("gamma"))?,
            epsilon: epsilon.ok_or_else(|| missing("epsilon"))?,
            horizon: horizon.ok_or_else(|| missing("N"))?,
            t: t.ok_or_else(|| missing("T"))?,
            sigma0: meta_opt[0].1,
            n0: meta_opt[1].1,
            tau: meta_opt[2].1,
            xi: meta_opt[3].1,
            delta: meta_opt[4].1,
        })
    }
}

/// Table key: a Bernoulli state or a canonical Gaussian count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Key {
    /// Bayesian sum of rewards; unused (zero) for canonical Gaussian keys.
    pub sigma: f64,
    pub n: f64,
}

impl Key {
    fn cmp(&self, other: &Key) -> Ordering {
        self.sigma
            .total_cmp(&other.sigma)
            .then(self.n.total_cmp(&other.n))
    }

    fn matches(&self, sigma: f64, n: f64) -> bool {
        (self.sigma - sigma).abs() < KEY_TOLERANCE && (self.n - n).abs() < KEY_TOLERANCE
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableEntry {
    pub key: Key,
    pub gi: f64,
}

/// Immutable table of index values sorted by key.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexTable {
    meta: TableMeta,
    entries: Vec<TableEntry>,
    lookup: HashMap<(i64, i64), usize>,
}

/// How an interpolated value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    /// The query is a table key.
    GridHit,
    /// Bounded by neighbouring table states.
    Bracketed,
    /// Beyond the table's largest `n`; the posterior mean stands in.
    PosteriorMean,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interpolated {
    pub low: f64,
    pub high: f64,
    pub estimate: f64,
    pub kind: EstimateKind,
}

impl IndexTable {
    pub fn new(meta: TableMeta, mut entries: Vec<TableEntry>) -> Self {
        entries.sort_by(|a, b| a.key.cmp(&b.key));
        let lookup = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (lattice(e.key.sigma, e.key.n), i))
            .collect();
        Self {
            meta,
            entries,
            lookup,
        }
    }

    pub fn meta(&self) -> &TableMeta {
        &self.meta
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, sigma: f64, n: f64) -> Option<f64> {
        let e = &self.entries[*self.lookup.get(&lattice(sigma, n))?];
        e.key.matches(sigma, n).then_some(e.gi)
    }

    fn max_n(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.key.n)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn require(&self, family: Family) -> Result<()> {
        if self.meta.family != family {
            return Err(Error::InvalidConfig(format!(
                "table holds {} indices",
                self.meta.family.as_str()
            )));
        }
        Ok(())
    }

    /// Bounds and estimates the index of a Bernoulli state from the table.
    ///
    /// A table state (s, m) bounds the query (sigma, n) from below when
    /// m >= n and s/m <= sigma/n, and from above when m <= n and
    /// s/m >= sigma/n: the index rises with sigma and falls when sigma and n
    /// are scaled up together.
    pub fn interpolate_bernoulli(&self, query: BernoulliArmState) -> Result<Interpolated> {
        self.require(Family::Bernoulli)?;
        let (sigma, n) = (query.sigma(), query.n());
        if let Some(gi) = self.get(sigma, n) {
            return Ok(Interpolated {
                low: gi,
                high: gi,
                estimate: gi,
                kind: EstimateKind::GridHit,
            });
        }
        if n > self.max_n() + KEY_TOLERANCE {
            let mean = query.mean();
            return Ok(Interpolated {
                low: mean,
                high: mean,
                estimate: mean,
                kind: EstimateKind::PosteriorMean,
            });
        }
        let mean = query.mean();
        let mut low = f64::NEG_INFINITY;
        let mut high = f64::INFINITY;
        for e in &self.entries {
            let m = e.key.sigma / e.key.n;
            if e.key.n >= n - KEY_TOLERANCE && m <= mean + KEY_TOLERANCE {
                low = low.max(e.gi);
            }
            if e.key.n <= n + KEY_TOLERANCE && m >= mean - KEY_TOLERANCE {
                high = high.min(e.gi);
            }
        }
        if !(low.is_finite() && high.is_finite()) {
            return Err(Error::OutOfRange(query.to_string()));
        }
        let estimate = self
            .bilinear(sigma, n)
            .unwrap_or(0.5 * (low + high))
            .clamp(low.min(high), high.max(low));
        Ok(Interpolated {
            low,
            high,
            estimate,
            kind: EstimateKind::Bracketed,
        })
    }

    /// Bilinear estimate on the regular (sigma0 + i, n0 + j) lattice.
    fn bilinear(&self, sigma: f64, n: f64) -> Option<f64> {
        let (s0, n0) = (self.meta.sigma0?, self.meta.n0?);
        let (x, y) = (sigma - s0, n - n0);
        let (x0, y0) = (x.floor(), y.floor());
        let (fx, fy) = (x - x0, y - y0);
        let at = |dx: f64, dy: f64| self.get(s0 + x0 + dx, n0 + y0 + dy);
        let v00 = at(0.0, 0.0)?;
        let v10 = if fx > 0.0 { at(1.0, 0.0)? } else { v00 };
        let v01 = if fy > 0.0 { at(0.0, 1.0)? } else { v00 };
        let v11 = if fx > 0.0 && fy > 0.0 {
            at(1.0, 1.0)?
        } else if fx > 0.0 {
            v10
        } else {
            v01
        };
        Some(
            v00 * (1.0 - fx) * (1.0 - fy)
                + v10 * fx * (1.0 - fy)
                + v01 * (1.0 - fx) * fy
                + v11 * fx * fy,
        )
    }

    /// Bounds and estimates a Gaussian arm's index from a canonical table.
    pub fn interpolate_normal(&self, query: NormalArmState) -> Result<Interpolated> {
        self.require(Family::NormalCanonical)?;
        let nc = query.n() / query.tau();
        let scale = 1.0 / query.tau().sqrt();
        let map = |v: f64| query.mu() + scale * v;
        if let Some(gi) = self.get(0.0, nc) {
            let v = map(gi);
            return Ok(Interpolated {
                low: v,
                high: v,
                estimate: v,
                kind: EstimateKind::GridHit,
            });
        }
        if nc > self.max_n() + KEY_TOLERANCE {
            let mu = query.mu();
            return Ok(Interpolated {
                low: mu,
                high: mu,
                estimate: mu,
                kind: EstimateKind::PosteriorMean,
            });
        }
        let below = self.entries.iter().rev().find(|e| e.key.n < nc);
        let above = self.entries.iter().find(|e| e.key.n > nc);
        let (Some(below), Some(above)) = (below, above) else {
            return Err(Error::OutOfRange(query.to_string()));
        };
        // non-increasing in n
        let (low, high) = (above.gi, below.gi);
        let w = (nc - below.key.n) / (above.key.n - below.key.n);
        let estimate = below.gi + w * (above.gi - below.gi);
        Ok(Interpolated {
            low: map(low),
            high: map(high),
            estimate: map(estimate),
            kind: EstimateKind::Bracketed,
        })
    }

    /// CSV with header `sigma,n,gi` (Bernoulli) or `n,gi` (Gaussian).
    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match self.meta.family {
            Family::Bernoulli => {
                w.write_record(["sigma", "n", "gi"])?;
                for e in &self.entries {
                    w.write_record([fmt6(e.key.sigma), fmt6(e.key.n), fmt6(e.gi)])?;
                }
            }
            Family::NormalCanonical => {
                w.write_record(["n", "gi"])?;
                for e in &self.entries {
                    w.write_record([fmt6(e.key.n), fmt6(e.gi)])?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_csv_str(meta: TableMeta, csv_text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(csv_text.as_bytes());
        let expected: &[&str] = match meta.family {
            Family::Bernoulli => &["sigma", "n", "gi"],
            Family::NormalCanonical => &["n", "gi"],
        };
        let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
        if header != expected {
            return Err(Error::Format(format!("unexpected header {header:?}")));
        }
        let mut entries = Vec::new();
        for record in r.records() {
            let record = record?;
            let nums: Vec<f64> = record
                .iter()
                .map(|f| {
                    f.parse()
                        .map_err(|_| Error::Format(format!("bad number {f:?}")))
                })
                .collect::<Result<_>>()?;
            let entry = match meta.family {
                Family::Bernoulli => TableEntry {
                    key: Key {
                        sigma: nums[0],
                        n: nums[1],
                    },
                    gi: nums[2],
                },
                Family::NormalCanonical => TableEntry {
                    key: Key {
                        sigma: 0.0,
                        n: nums[0],
                    },
                    gi: nums[1],
                },
            };
            entries.push(entry);
        }
        Ok(Self::new(meta, entries))
    }

    /// Writes the CSV to `path` and the metadata to `path` + `.meta`.
    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv_string()?)?;
        fs::write(meta_path(path), self.meta.to_kv_string())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let meta = TableMeta::parse_kv(&fs::read_to_string(meta_path(path))?)?;
        Self::from_csv_str(meta, &fs::read_to_string(path)?)
    }
}

/// Keys agree to the six decimals they are stored with.
fn lattice(sigma: f64, n: f64) -> (i64, i64) {
    ((sigma * 1e6).round() as i64, (n * 1e6).round() as i64)
}

/// Sidecar metadata path for a table file.
pub fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

pub fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

/// Initial bracket and final result for one table state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateIndex {
    pub state: BernoulliArmState,
    pub initial: Bracket,
    pub result: IndexResult,
}

fn run_in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if workers > 0 {
        builder = builder.num_threads(workers);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok(pool.install(job))
}

fn at_state(state: impl ToString) -> impl FnOnce(Error) -> Error {
    move |e| Error::AtState {
        state: state.to_string(),
        source: Box::new(e),
    }
}

fn bmab_row(
    spec: &BmabGridSpec,
    row: usize,
    gamma: DiscountFactor,
    epsilon: f64,
    dp: BmabDpConfig,
) -> Result<Vec<StateIndex>> {
    let mut out: Vec<StateIndex> = Vec::with_capacity(spec.t + 1 - row);
    for state in spec.row(row) {
        let cold = default_bounds_bmab(state, gamma).map_err(at_state(state))?;
        let initial = match out.last() {
            Some(prev) => cold.cap_upper(prev.result.upper),
            None => cold,
        };
        let result = match bmab_gi(state, gamma, epsilon, dp, Some(initial)) {
            Err(Error::BoundViolation { .. }) if initial != cold => {
                bmab_gi(state, gamma, epsilon, dp, Some(cold)).map(|r| (cold, r))
            }
            other => other.map(|r| (initial, r)),
        }
        .map_err(at_state(state))?;
        out.push(StateIndex {
            state,
            initial: result.0,
            result: result.1,
        });
    }
    Ok(out)
}

/// Indices with their starting brackets for every state of the grid, in
/// row order (ascending sigma, then ascending n).
///
/// `workers = 0` uses all available cores. Output does not depend on the
/// worker count.
pub fn bmab_table_detailed(
    spec: BmabGridSpec,
    gamma: DiscountFactor,
    epsilon: f64,
    dp: BmabDpConfig,
    workers: usize,
) -> Result<Vec<StateIndex>> {
    let rows: Vec<Result<Vec<StateIndex>>> = run_in_pool(workers, || {
        (0..=spec.t)
            .into_par_iter()
            .map(|row| bmab_row(&spec, row, gamma, epsilon, dp))
            .collect()
    })?;
    let mut out = Vec::with_capacity(spec.state_count());
    for row in rows {
        out.extend(row?);
    }
    Ok(out)
}

pub fn bmab_table(
    spec: BmabGridSpec,
    gamma: DiscountFactor,
    epsilon: f64,
    dp: BmabDpConfig,
    workers: usize,
) -> Result<IndexTable> {
    let states = bmab_table_detailed(spec, gamma, epsilon, dp, workers)?;
    let meta = TableMeta {
        family: Family::Bernoulli,
        gamma: gamma.value(),
        epsilon,
        horizon: dp.horizon,
        t: spec.t,
        sigma0: Some(spec.sigma0),
        n0: Some(spec.n0),
        tau: None,
        xi: None,
        delta: None,
    };
    Ok(IndexTable::new(meta, bernoulli_entries(&states)))
}

fn bernoulli_entries(states: &[StateIndex]) -> Vec<TableEntry> {
    states
        .iter()
        .map(|s| TableEntry {
            key: Key {
                sigma: s.state.sigma(),
                n: s.state.n(),
            },
            gi: s.result.midpoint,
        })
        .collect()
}

/// One table over several priors, e.g. a lattice of (sigma0, n0) with
/// sigma0 in (0, 1) and n0 in (0, 2]; arbitrary priors are then served by
/// [`IndexTable::interpolate_bernoulli`].
pub fn bmab_prior_grid_table(
    priors: &[(f64, f64)],
    t: usize,
    gamma: DiscountFactor,
    epsilon: f64,
    dp: BmabDpConfig,
    workers: usize,
) -> Result<IndexTable> {
    let mut entries = Vec::new();
    for &(sigma0, n0) in priors {
        let spec = BmabGridSpec::new(sigma0, n0, t)?;
        entries.extend(bernoulli_entries(&bmab_table_detailed(
            spec, gamma, epsilon, dp, workers,
        )?));
    }
    let meta = TableMeta {
        family: Family::Bernoulli,
        gamma: gamma.value(),
        epsilon,
        horizon: dp.horizon,
        t,
        sigma0: None,
        n0: None,
        tau: None,
        xi: None,
        delta: None,
    };
    Ok(IndexTable::new(meta, entries))
}

/// Canonical results for each n of the sequence, warm-started in order.
pub fn nmab_sequence_detailed(
    spec: NmabSequenceSpec,
    epsilon: f64,
    dp: NmabDpConfig,
) -> Result<Vec<(f64, Bracket, IndexResult)>> {
    let eps = canonical_epsilon(epsilon, spec.tau);
    let mut out: Vec<(f64, Bracket, IndexResult)> = Vec::with_capacity(spec.t + 1);
    for n in spec.canonical_ns() {
        let state = NormalArmState::new(0.0, n, 1.0)?;
        let cold = default_bounds_nmab(state, spec.gamma).map_err(at_state(state))?;
        let initial = match out.last() {
            Some((_, _, prev)) => cold.cap_upper(prev.upper),
            None => cold,
        };
        let result = match nmab_canonical_gi(n, spec.gamma, eps, dp, Some(initial)) {
            Err(Error::BoundViolation { .. }) if initial != cold => {
                nmab_canonical_gi(n, spec.gamma, eps, dp, Some(cold)).map(|r| (cold, r))
            }
            other => other.map(|r| (initial, r)),
        }
        .map_err(at_state(state))?;
        out.push((n, result.0, result.1.result));
    }
    Ok(out)
}

pub fn nmab_sequence(spec: NmabSequenceSpec, epsilon: f64, dp: NmabDpConfig) -> Result<IndexTable> {
    let rows = nmab_sequence_detailed(spec, epsilon, dp)?;
    let meta = TableMeta {
        family: Family::NormalCanonical,
        gamma: spec.gamma.value(),
        epsilon: canonical_epsilon(epsilon, spec.tau),
        horizon: dp.horizon,
        t: spec.t,
        sigma0: None,
        n0: Some(spec.n0),
        tau: Some(spec.tau),
        xi: Some(dp.xi),
        delta: Some(dp.delta),
    };
    let entries = rows
        .into_iter()
        .map(|(n, _, r)| TableEntry {
            key: Key { sigma: 0.0, n },
            gi: r.midpoint,
        })
        .collect();
    Ok(IndexTable::new(meta, entries))
}

/// Brackets the index at `gamma` between tables computed at a lower and a
/// higher discount factor over the same states.
pub fn gamma_bracket(
    lower: &IndexTable,
    upper: &IndexTable,
    gamma: f64,
    sigma: f64,
    n: f64,
) -> Result<(f64, f64)> {
    let (g1, g2) = (lower.meta.gamma, upper.meta.gamma);
    if lower.meta.family != upper.meta.family {
        return Err(Error::InvalidConfig(
            "tables hold different families".into(),
        ));
    }
    if !(g1 <= gamma && gamma <= g2) {
        return Err(Error::InvalidConfig(format!(
            "gamma {gamma} is not within [{g1}, {g2}]"
        )));
    }
    let same_keys = lower.len() == upper.len()
        && lower
            .entries
            .iter()
            .zip(&upper.entries)
            .all(|(a, b)| a.key.matches(b.key.sigma, b.key.n));
    if !same_keys {
        return Err(Error::InvalidConfig("tables cover different states".into()));
    }
    let lo = lower.get(sigma, n);
    let hi = upper.get(sigma, n);
    match (lo, hi) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        _ => Err(Error::OutOfRange(format!("(sigma={sigma}, n={n})"))),
    }
}
