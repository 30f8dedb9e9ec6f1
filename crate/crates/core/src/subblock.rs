//! Sub-block occupancy of 2-dimensional projections.
//!
//! With `n = p^d`, each axis splits into `p` blocks of `p^(d-1)` levels, so
//! a 2-dimensional projection has `p x p` sub-blocks. An Orthogonal Sample
//! places exactly `p^(d-2)` points in every sub-block; counts are
//! normalized by `k * p^(d-2)` so that `k` such trials read 1.0 everywhere.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::campaign::{SamplerKind, TrialSampler};
use crate::coverage::{subspaces, CoverageState};
use crate::error::{domain, Result};
use crate::sampling::{OsParameters, SampleMatrix};
use crate::stream::SeedTree;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubBlockHistogram {
    pub p: usize,
    pub pair: (usize, usize),
    /// Number of trials aggregated.
    pub trials: usize,
    /// `p^(d-2)`, the per-trial count of an exact Orthogonal Sample.
    pub per_trial: usize,
    /// Row-major `p x p`, first axis block major.
    pub counts: Vec<u64>,
    pub normalized: Vec<f64>,
}

impl SubBlockHistogram {
    fn from_counts(
        p: usize,
        pair: (usize, usize),
        trials: usize,
        per_trial: usize,
        counts: Vec<u64>,
    ) -> Self {
        let denom = (trials * per_trial) as f64;
        let normalized = counts.iter().map(|&c| c as f64 / denom).collect();
        Self {
            p,
            pair,
            trials,
            per_trial,
            counts,
            normalized,
        }
    }

    pub fn count(&self, b1: usize, b2: usize) -> u64 {
        self.counts[b1 * self.p + b2]
    }

    pub fn normalized_at(&self, b1: usize, b2: usize) -> f64 {
        self.normalized[b1 * self.p + b2]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.normalized.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.normalized.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Population variance of the normalized entries.
    pub fn variance(&self) -> f64 {
        let m = self.normalized.len() as f64;
        let mean = self.normalized.iter().sum::<f64>() / m;
        self.normalized.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m
    }

    /// Sums two histograms of the same pair and shape.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        if (self.p, self.pair, self.per_trial) != (other.p, other.pair, other.per_trial) {
            return Err(domain("cannot merge histograms of different shape"));
        }
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::from_counts(
            self.p,
            self.pair,
            self.trials + other.trials,
            self.per_trial,
            counts,
        ))
    }
}

/// Counts points of `samples` per `(block, block)` cell of the projection
/// onto `pair`.
pub fn subblock_histogram(
    samples: &[SampleMatrix],
    params: &OsParameters,
    pair: (usize, usize),
) -> Result<SubBlockHistogram> {
    if samples.is_empty() {
        return Err(domain("sub-block histogram needs at least one sample"));
    }
    let (a, b) = pair;
    if a == b || a >= params.d() || b >= params.d() {
        return Err(domain(format!(
            "invalid column pair ({a}, {b}) for d={}",
            params.d()
        )));
    }
    let p = params.p();
    let block = params.block_len();
    let mut counts = vec![0u64; p * p];
    for s in samples {
        if (s.n(), s.d()) != (params.n(), params.d()) {
            return Err(domain(format!(
                "sample is {} x {} but p={p}, d={} needs {} x {}",
                s.n(),
                s.d(),
                params.d(),
                params.n(),
                params.d()
            )));
        }
        for row in s.rows() {
            counts[(row[a] / block) * p + row[b] / block] += 1;
        }
    }
    let per_trial = params.n() / (p * p);
    Ok(SubBlockHistogram::from_counts(
        p,
        pair,
        samples.len(),
        per_trial,
        counts,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubBlockConfig {
    pub p: usize,
    pub d: usize,
    pub sampler: SamplerKind,
    /// Mean 2-dimensional coverage at which a replicate stops drawing trials.
    pub coverage_target: f64,
    pub replicates: usize,
    pub max_trials: u64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubBlockReplicate {
    pub replicate: u64,
    /// Trials drawn; `reached` tells whether the target was met.
    pub trials: u64,
    pub reached: bool,
    /// One histogram per column pair, in `pairs` order.
    pub histograms: Vec<SubBlockHistogram>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubBlockStudy {
    pub config: SubBlockConfig,
    pub pairs: Vec<(usize, usize)>,
    pub replicates: Vec<SubBlockReplicate>,
    /// Per pair, counts summed over all replicates.
    pub pooled: Vec<SubBlockHistogram>,
}

impl SubBlockStudy {
    pub fn all_reached(&self) -> bool {
        self.replicates.iter().all(|r| r.reached)
    }

    /// Fraction of replicates whose every pair shows positive variance.
    pub fn positive_variance_fraction(&self) -> f64 {
        let hits = self
            .replicates
            .iter()
            .filter(|r| r.histograms.iter().all(|h| h.variance() > 0.0))
            .count();
        hits as f64 / self.replicates.len() as f64
    }
}

/// Per replicate, draws trials until the mean coverage over all column
/// pairs reaches the target, then histograms every pair.
pub fn run_subblock_study(config: &SubBlockConfig) -> Result<SubBlockStudy> {
    let params = OsParameters::new(config.p, config.d)?;
    if !(config.coverage_target > 0.0 && config.coverage_target <= 1.0) {
        return Err(domain(format!(
            "coverage target {} outside (0, 1]",
            config.coverage_target
        )));
    }
    if config.replicates == 0 {
        return Err(domain("at least one replicate is required"));
    }
    if config.max_trials == 0 {
        return Err(domain("max_trials must be at least 1"));
    }
    let sampler = TrialSampler::new(config.sampler, params.n(), params.d())?;
    let pairs: Vec<(usize, usize)> = subspaces(config.d, 2).iter().map(|s| (s[0], s[1])).collect();
    // validates n^2 up front
    CoverageState::new(params.n(), vec![0, 1])?;

    let replicates: Vec<SubBlockReplicate> = (0..config.replicates as u64)
        .into_par_iter()
        .map(|r| {
            let tree = SeedTree::new(config.master_seed).child(r);
            let mut states: Vec<CoverageState> = pairs
                .iter()
                .map(|&(a, b)| CoverageState::new(params.n(), vec![a, b]).expect("validated"))
                .collect();
            let mut samples = Vec::new();
            let mut reached = false;
            while (samples.len() as u64) < config.max_trials {
                let s = sampler.generate(&tree.trial(samples.len() as u64));
                states.iter_mut().for_each(|st| st.add_unchecked(&s));
                samples.push(s);
                let mean = states.iter().map(CoverageState::fraction).sum::<f64>() / states.len() as f64;
                if mean >= config.coverage_target {
                    reached = true;
                    break;
                }
            }
            let histograms = pairs
                .iter()
                .map(|&pair| subblock_histogram(&samples, &params, pair).expect("shapes match"))
                .collect();
            SubBlockReplicate {
                replicate: r,
                trials: samples.len() as u64,
                reached,
                histograms,
            }
        })
        .collect();

    let pooled = (0..pairs.len())
        .map(|i| {
            replicates
                .iter()
                .map(|r| r.histograms[i].clone())
                .reduce(|acc, h| acc.merge(&h).expect("same shape"))
                .expect("at least one replicate")
        })
        .collect();
    Ok(SubBlockStudy {
        config: config.clone(),
        pairs,
        replicates,
        pooled,
    })
}
