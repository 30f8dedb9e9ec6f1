//! Monte Carlo campaigns: trials-to-threshold, coverage curves and
//! log-log gradients.
//!
//! Replicate `r` draws all of its trials from `SeedTree::new(seed).child(r)`,
//! so replicates can run on any number of workers and still reduce to the
//! same result.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coverage::{
    asymptotic_coverage, cell_count, conjectured_coverage, subspaces, trials_for_full_coverage_estimate,
    CoverageState,
};
use crate::error::{domain, Error, Result};
use crate::sampling::{generate_lhs, generate_os, OsParameters, SampleMatrix};
use crate::stream::{SeedTree, TrialStreams};

/// Replicate count used when none is given.
pub const DEFAULT_REPLICATES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Lhs,
    Os,
}

impl SamplerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SamplerKind::Lhs => "lhs",
            SamplerKind::Os => "os",
        }
    }
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lhs" => Ok(Self::Lhs),
            "os" => Ok(Self::Os),
            other => Err(Error::Parse(format!("unknown sampler '{other}'"))),
        }
    }
}

/// A trial generator of fixed shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialSampler {
    Lhs { n: usize, d: usize },
    Os(OsParameters),
}

impl TrialSampler {
    pub fn new(kind: SamplerKind, n: usize, d: usize) -> Result<Self> {
        match kind {
            SamplerKind::Lhs => {
                if n == 0 || d == 0 {
                    return Err(domain(format!("need n >= 1 and d >= 1, got n={n}, d={d}")));
                }
                Ok(Self::Lhs { n, d })
            }
            SamplerKind::Os => OsParameters::from_levels(n, d).map(Self::Os),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Self::Lhs { n, .. } => *n,
            Self::Os(p) => p.n(),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            Self::Lhs { d, .. } => *d,
            Self::Os(p) => p.d(),
        }
    }

    pub fn generate(&self, streams: &TrialStreams) -> SampleMatrix {
        match self {
            Self::Lhs { n, d } => generate_lhs(*n, *d, streams).expect("shape checked at construction"),
            Self::Os(params) => generate_os(params, streams),
        }
    }
}

/// How per-subspace coverage is reduced to one trial count per replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    /// Mean over subspaces of the trial at which each subspace first
    /// reaches the threshold.
    #[default]
    PerSubspace,
    /// First trial at which the coverage averaged over subspaces reaches
    /// the threshold.
    MeanCoverage,
}

impl Aggregation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Aggregation::PerSubspace => "per-subspace",
            Aggregation::MeanCoverage => "mean-coverage",
        }
    }
}

impl std::str::FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-subspace" | "subspace" => Ok(Self::PerSubspace),
            "mean-coverage" | "mean" => Ok(Self::MeanCoverage),
            other => Err(Error::Parse(format!("unknown aggregation '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub n: usize,
    pub d: usize,
    pub t: usize,
    pub thresholds: Vec<f64>,
    pub replicates: usize,
    pub max_trials: u64,
    pub sampler: SamplerKind,
    pub aggregation: Aggregation,
    pub master_seed: u64,
}

/// A cap well past the expected full-coverage time: twenty times
/// `max(1, (t-1) ln n) * n^(t-1)`, plus slack for tiny `n`.
pub fn default_max_trials(n: usize, t: usize) -> u64 {
    let scale = trials_for_full_coverage_estimate(n.max(2), t.max(2))
        .max((n as f64).powi(t.saturating_sub(1) as i32));
    (20.0 * scale).ceil() as u64 + 100
}

impl CampaignConfig {
    /// LHS campaign at thresholds 25/50/75/100% with default replicates and cap.
    pub fn new(n: usize, d: usize, t: usize, master_seed: u64) -> Self {
        Self {
            n,
            d,
            t,
            thresholds: vec![0.25, 0.5, 0.75, 1.0],
            replicates: DEFAULT_REPLICATES,
            max_trials: default_max_trials(n, t),
            sampler: SamplerKind::Lhs,
            aggregation: Aggregation::default(),
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<TrialSampler> {
        if self.t == 0 || self.t > self.d {
            return Err(domain(format!(
                "need 1 <= t <= d, got t={}, d={}",
                self.t, self.d
            )));
        }
        if self.thresholds.is_empty() {
            return Err(domain("at least one threshold is required"));
        }
        if let Some(x) = self.thresholds.iter().find(|&&x| !(x > 0.0 && x <= 1.0)) {
            return Err(domain(format!("threshold {x} outside (0, 1]")));
        }
        if self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(domain("thresholds must be strictly ascending"));
        }
        if self.replicates == 0 {
            return Err(domain("at least one replicate is required"));
        }
        cell_count(self.n, self.t)?;
        TrialSampler::new(self.sampler, self.n, self.d)
    }
}

/// Outcome of one replicate. `None` marks a threshold not reached within
/// `max_trials`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub replicate: u64,
    /// Per threshold, the replicate's trial count under the configured aggregation.
    pub trials: Vec<Option<f64>>,
    /// `[threshold][subspace]` first trial reaching the threshold in that subspace.
    pub subspace_trials: Vec<Vec<Option<u64>>>,
    /// Per threshold, first trial at which mean coverage reaches it.
    pub mean_coverage_trials: Vec<Option<u64>>,
    pub trials_run: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSummary {
    pub threshold: f64,
    /// Mean over uncensored replicates.
    pub mean_trials: Option<f64>,
    pub stderr: Option<f64>,
    pub completed: usize,
    pub censored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCampaignResult {
    pub config: CampaignConfig,
    pub subspaces: Vec<Vec<usize>>,
    pub replicates: Vec<ReplicateRecord>,
    pub summary: Vec<ThresholdSummary>,
}

impl CoverageCampaignResult {
    /// Per-replicate trial counts at threshold index `i`.
    pub fn trials_to_threshold(&self, i: usize) -> Vec<Option<f64>> {
        self.replicates.iter().map(|r| r.trials[i]).collect()
    }

    pub fn threshold_index(&self, threshold: f64) -> Option<usize> {
        self.config
            .thresholds
            .iter()
            .position(|&x| (x - threshold).abs() < 1e-12)
    }

    pub fn summary_at(&self, threshold: f64) -> Option<&ThresholdSummary> {
        self.threshold_index(threshold).map(|i| &self.summary[i])
    }

    pub fn mean_trials(&self, threshold: f64) -> Option<f64> {
        self.summary_at(threshold).and_then(|s| s.mean_trials)
    }

    /// True when some threshold was reached by no replicate.
    pub fn fully_censored(&self) -> bool {
        self.summary.iter().any(|s| s.completed == 0)
    }
}

/// Arithmetic mean and standard error (`sd / sqrt(m)`, sample sd with
/// `m - 1`); the standard error is `None` below two values.
pub fn mean_and_stderr(values: &[f64]) -> (Option<f64>, Option<f64>) {
    let m = values.len();
    if m == 0 {
        return (None, None);
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    if m < 2 {
        return (Some(mean), None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    (Some(mean), Some((var / m as f64).sqrt()))
}

fn run_replicate(
    config: &CampaignConfig,
    sampler: &TrialSampler,
    subs: &[Vec<usize>],
    replicate: u64,
) -> ReplicateRecord {
    let tree = SeedTree::new(config.master_seed).child(replicate);
    let thresholds = &config.thresholds;
    let mut states: Vec<CoverageState> = subs
        .iter()
        .map(|s| CoverageState::new(sampler.n(), s.clone()).expect("validated subspace"))
        .collect();
    let mut subspace_trials = vec![vec![None; subs.len()]; thresholds.len()];
    // next threshold index each subspace is waiting for
    let mut next = vec![0usize; subs.len()];
    let mut mean_trials = vec![None; thresholds.len()];
    let mut next_mean = 0usize;
    let mut k = 0u64;
    while k < config.max_trials && next.iter().any(|&i| i < thresholds.len()) {
        let sample = sampler.generate(&tree.trial(k));
        k += 1;
        let mut fraction_sum = 0.0;
        for (s, state) in states.iter_mut().enumerate() {
            state.add_unchecked(&sample);
            let f = state.fraction();
            fraction_sum += f;
            while next[s] < thresholds.len() && f >= thresholds[next[s]] {
                subspace_trials[next[s]][s] = Some(k);
                next[s] += 1;
            }
        }
        let mean = fraction_sum / states.len() as f64;
        while next_mean < thresholds.len() && mean >= thresholds[next_mean] {
            mean_trials[next_mean] = Some(k);
            next_mean += 1;
        }
    }
    let trials = match config.aggregation {
        Aggregation::PerSubspace => subspace_trials
            .iter()
            .map(|per_sub| {
                per_sub
                    .iter()
                    .map(|x| x.map(|v| v as f64))
                    .sum::<Option<f64>>()
                    .map(|total| total / per_sub.len() as f64)
            })
            .collect(),
        Aggregation::MeanCoverage => mean_trials.iter().map(|x| x.map(|v| v as f64)).collect(),
    };
    ReplicateRecord {
        replicate,
        trials,
        subspace_trials,
        mean_coverage_trials: mean_trials,
        trials_run: k,
    }
}

/// Runs every replicate (in parallel on the current rayon pool) and
/// summarizes trials-to-threshold.
pub fn run_campaign(config: &CampaignConfig) -> Result<CoverageCampaignResult> {
    let sampler = config.validate()?;
    let subs = subspaces(config.d, config.t);
    let replicates: Vec<ReplicateRecord> = (0..config.replicates as u64)
        .into_par_iter()
        .map(|r| run_replicate(config, &sampler, &subs, r))
        .collect();
    let summary = config
        .thresholds
        .iter()
        .enumerate()
        .map(|(i, &threshold)| {
            let done: Vec<f64> = replicates.iter().filter_map(|r| r.trials[i]).collect();
            let (mean_trials, stderr) = mean_and_stderr(&done);
            ThresholdSummary {
                threshold,
                mean_trials,
                stderr,
                completed: done.len(),
                censored: replicates.len() - done.len(),
            }
        })
        .collect();
    Ok(CoverageCampaignResult {
        config: config.clone(),
        subspaces: subs,
        replicates,
        summary,
    })
}

/// `(log10 n, log10 mean_trials)` for each result at `threshold`.
pub fn loglog_points(results: &[CoverageCampaignResult], threshold: f64) -> Result<Vec<(f64, f64)>> {
    results
        .iter()
        .map(|r| {
            let mean = r.mean_trials(threshold).ok_or_else(|| {
                Error::InsufficientData(format!(
                    "no uncensored mean at threshold {threshold} for n={}",
                    r.config.n
                ))
            })?;
            Ok(((r.config.n as f64).log10(), mean.log10()))
        })
        .collect()
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Slope of `log10(mean trials)` against `log10(n)` at `threshold`.
pub fn fit_loglog_gradient(results: &[CoverageCampaignResult], threshold: f64) -> Result<f64> {
    let Some(first) = results.first() else {
        return Err(Error::InsufficientData("no campaign results".into()));
    };
    if results
        .iter()
        .any(|r| (r.config.d, r.config.t) != (first.config.d, first.config.t))
    {
        return Err(domain("campaign results mix different (d, t)"));
    }
    let mut ns: Vec<usize> = results.iter().map(|r| r.config.n).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 distinct n values, got {}",
            ns.len()
        )));
    }
    if results.iter().any(|r| r.threshold_index(threshold).is_none()) {
        return Err(domain(format!("threshold {threshold} missing from some results")));
    }
    Ok(least_squares_slope(&loglog_points(results, threshold)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveConfig {
    pub n: usize,
    pub d: usize,
    pub t: usize,
    pub replicates: usize,
    pub sampler: SamplerKind,
    pub master_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: u64,
    /// Mean over replicates of the subspace-averaged covered fraction.
    pub empirical: f64,
    /// `None` with fewer than two replicates.
    pub stderr: Option<f64>,
    pub conjectured: f64,
    pub asymptotic: f64,
}

/// Empirical coverage after `k = 1..=k_max` trials next to the closed forms.
pub fn coverage_curve(config: &CurveConfig, k_max: u64) -> Result<Vec<CurvePoint>> {
    if k_max < 1 {
        return Err(domain("k_max must be at least 1"));
    }
    if config.t == 0 || config.t > config.d {
        return Err(domain(format!(
            "need 1 <= t <= d, got t={}, d={}",
            config.t, config.d
        )));
    }
    if config.replicates == 0 {
        return Err(domain("at least one replicate is required"));
    }
    let sampler = TrialSampler::new(config.sampler, config.n, config.d)?;
    let cells = cell_count(config.n, config.t)?;
    let subs = subspaces(config.d, config.t);
    // per replicate, per k: covered cells summed over subspaces
    let paths: Vec<Vec<u64>> = (0..config.replicates as u64)
        .into_par_iter()
        .map(|r| {
            let tree = SeedTree::new(config.master_seed).child(r);
            let mut states: Vec<CoverageState> = subs
                .iter()
                .map(|s| CoverageState::new(config.n, s.clone()).expect("validated subspace"))
                .collect();
            (0..k_max)
                .map(|k| {
                    let sample = sampler.generate(&tree.trial(k));
                    states
                        .iter_mut()
                        .map(|st| {
                            st.add_unchecked(&sample);
                            st.covered_count() as u64
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    let denom = (cells * subs.len()) as f64;
    let reps = config.replicates as f64;
    Ok((0..k_max as usize)
        .map(|i| {
            let total: u64 = paths.iter().map(|p| p[i]).sum();
            let empirical = total as f64 / (denom * reps);
            let stderr = (config.replicates >= 2).then(|| {
                let ss: f64 = paths
                    .iter()
                    .map(|p| (p[i] as f64 / denom - empirical).powi(2))
                    .sum();
                (ss / (reps - 1.0) / reps).sqrt()
            });
            let k = i as u64 + 1;
            CurvePoint {
                k,
                empirical,
                stderr,
                conjectured: conjectured_coverage(k, config.n, config.t),
                asymptotic: asymptotic_coverage(k as f64, config.n, config.t),
            }
        })
        .collect())
}
