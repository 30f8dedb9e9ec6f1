//! Latin Hypercube and Orthogonal sampling over discrete parameter grids,
//! with tools for measuring how well repeated trials cover low-dimensional
//! projections of the grid.
//!
//! * [`sampling`]: trial representation, Latin Hypercube and Orthogonal
//!   Sample generators and validators, block arithmetic.
//! * [`orthogonal`]: strength-2 orthogonal arrays and their expansion into
//!   Latin trials.
//! * [`coverage`]: per-subspace coverage state and the closed-form
//!   coverage law.
//! * [`campaign`]: Monte Carlo trials-to-threshold campaigns, coverage
//!   curves and log-log gradient fits.
//! * [`subblock`]: sub-block occupancy histograms.
//! * [`io`]: CSV/JSON formats.
//!
//! All randomness flows through [`stream::SeedTree`], so every result is a
//! pure function of its master seed.

pub mod campaign;
pub mod coverage;
mod error;
pub mod fixtures;
pub mod io;
pub mod orthogonal;
pub mod sampling;
pub mod stream;
pub mod subblock;

pub use campaign::{
    coverage_curve, fit_loglog_gradient, run_campaign, Aggregation, CampaignConfig, CoverageCampaignResult,
    CurveConfig, CurvePoint, SamplerKind, TrialSampler,
};
pub use coverage::{
    asymptotic_coverage, conjectured_coverage, covered_fraction, subspaces,
    trials_for_full_coverage_estimate, CoverageState,
};
pub use error::{Error, Result};
pub use orthogonal::{
    build_oa_strength2, is_pairwise_block_uniform, randomize_oa, tang_expand, verify_strength,
    OrthogonalArray,
};
pub use sampling::{
    decompose_level, generate_lhs, generate_os, is_latin, is_orthogonal_sample, recompose_level,
    BlockCoordinate, OsParameters, SampleMatrix,
};
pub use stream::{SeedTree, TrialStreams};
pub use subblock::{
    run_subblock_study, subblock_histogram, SubBlockConfig, SubBlockHistogram, SubBlockStudy,
};
