use std::path::{Path, PathBuf};

use hypercoverage::campaign::{default_max_trials, least_squares_slope};
use hypercoverage::io;
use hypercoverage::orthogonal::is_pairwise_block_uniform;
use hypercoverage::{
    build_oa_strength2, coverage_curve, fit_loglog_gradient, generate_lhs, generate_os, is_latin,
    is_orthogonal_sample, randomize_oa, run_campaign, run_subblock_study, tang_expand, Aggregation,
    CampaignConfig, CurveConfig, Error, OsParameters, SampleMatrix, SamplerKind, SeedTree, SubBlockConfig,
};

use crate::args::{
    AggregateArg, CampaignArgs, Command, CurveArgs, Format, GenSampler, GenerateArgs, OaArgs, PlotdataArgs,
    Sampler, SubblocksArgs, ValidateArgs,
};
use crate::config::RunConfig;
use crate::output::{emit, read_to_string, write_atomic};
use crate::{CliError, EXIT_CENSORED};

pub const SEED_ENV: &str = "HYPERCOVERAGE_SEED";

pub fn dispatch(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Generate(a) => generate(a),
        Command::Validate(a) => validate(a),
        Command::Oa(a) => oa(a),
        Command::Campaign(a) => campaign(a),
        Command::Curve(a) => curve(a),
        Command::Subblocks(a) => subblocks(a),
        Command::Plotdata(a) => plotdata(a),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Ok(v) = std::env::var(SEED_ENV) {
        let seed = v
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("{SEED_ENV}='{v}' is not an unsigned integer")))?;
        eprintln!("seed: {seed} (from {SEED_ENV})");
        return Ok(seed);
    }
    let seed: u64 = rand::random();
    eprintln!("seed: {seed} (generated; pass --seed {seed} to reproduce)");
    Ok(seed)
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    if workers == Some(0) {
        return Err(CliError::usage("--workers must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))
}

fn sampler_kind(s: Sampler) -> SamplerKind {
    match s {
        Sampler::Lhs => SamplerKind::Lhs,
        Sampler::Os => SamplerKind::Os,
    }
}

fn require(value: Option<usize>, flag: &str, sampler: &str) -> Result<usize, CliError> {
    value.ok_or_else(|| CliError::usage(format!("--sampler {sampler} requires --{flag}")))
}

fn forbid(present: bool, flag: &str, sampler: &str) -> Result<(), CliError> {
    if present {
        return Err(CliError::usage(format!(
            "--{flag} does not apply to --sampler {sampler}"
        )));
    }
    Ok(())
}

/// Sidecar path for an array CSV: same stem, `.json` extension.
fn sidecar_path(csv: &Path) -> Result<PathBuf, CliError> {
    let side = csv.with_extension("json");
    if side == csv {
        return Err(CliError::usage("array CSV path must not end in .json"));
    }
    Ok(side)
}

fn generate(a: GenerateArgs) -> Result<u8, CliError> {
    // flags first, computation after
    enum Plan {
        Lhs(usize, usize),
        Os(OsParameters),
        Tang(hypercoverage::OrthogonalArray),
    }
    let plan = match a.sampler {
        GenSampler::Lhs => {
            forbid(a.p.is_some(), "p", "lhs")?;
            forbid(a.s.is_some(), "s", "lhs")?;
            forbid(a.oa.is_some(), "oa", "lhs")?;
            let n = require(a.n, "n", "lhs")?;
            let d = require(a.d, "d", "lhs")?;
            if n == 0 || d == 0 {
                return Err(CliError::usage("latin hypercube needs n >= 1 and d >= 1"));
            }
            Plan::Lhs(n, d)
        }
        GenSampler::Os => {
            forbid(a.s.is_some(), "s", "os")?;
            forbid(a.oa.is_some(), "oa", "os")?;
            let d = require(a.d, "d", "os")?;
            let params = match (a.p, a.n) {
                (Some(p), None) => OsParameters::new(p, d)?,
                (None, Some(n)) => OsParameters::from_levels(n, d)?,
                (Some(p), Some(n)) => {
                    let params = OsParameters::new(p, d)?;
                    if params.n() != n {
                        return Err(CliError::usage(format!(
                            "--n {n} does not equal p^d = {}",
                            params.n()
                        )));
                    }
                    params
                }
                (None, None) => return Err(CliError::usage("--sampler os requires --p or --n")),
            };
            Plan::Os(params)
        }
        GenSampler::Tang => {
            forbid(a.p.is_some(), "p", "tang")?;
            forbid(a.n.is_some(), "n", "tang")?;
            let oa = match (&a.oa, a.s) {
                (Some(path), None) => {
                    forbid(a.d.is_some(), "d", "tang with --oa")?;
                    let csv = read_to_string(path)?;
                    let side = read_to_string(&sidecar_path(path)?)?;
                    io::oa_from_files(&csv, &side)?
                }
                (None, Some(s)) => build_oa_strength2(s, require(a.d, "d", "tang")?)?,
                (Some(_), Some(_)) => return Err(CliError::usage("give either --oa or --s, not both")),
                (None, None) => return Err(CliError::usage("--sampler tang requires --s or --oa")),
            };
            Plan::Tang(oa)
        }
    };
    let seed = resolve_seed(a.seed.seed)?;
    let tree = SeedTree::new(seed);
    let (sample, p, mut verdicts): (SampleMatrix, Option<usize>, Vec<String>) = match plan {
        Plan::Lhs(n, d) => (generate_lhs(n, d, &tree.trial(0))?, None, vec![]),
        Plan::Os(params) => (generate_os(&params, &tree.trial(0)), Some(params.p()), vec![]),
        Plan::Tang(oa) => {
            let randomized = randomize_oa(&oa, &mut tree.child(1).rng());
            let s = tang_expand(&randomized, &tree.trial(0))?;
            let uniform = is_pairwise_block_uniform(&s, oa.symbols());
            (s, None, vec![format!("pairwise-uniform: {uniform}")])
        }
    };
    verdicts.insert(0, format!("latin: {}", is_latin(&sample)));
    if let Some(params) = p
        .map(|p| OsParameters::new(p, sample.d()))
        .or_else(|| (sample.d() >= 2).then(|| OsParameters::from_levels(sample.n(), sample.d())))
        .and_then(Result::ok)
    {
        verdicts.insert(
            1,
            format!("orthogonal: {}", is_orthogonal_sample(&sample, &params)?),
        );
    }
    let text = match a.format {
        Format::Csv => io::sample_to_csv(&sample),
        Format::Json => io::sample_to_json(&sample, p),
    };
    emit(a.out.as_deref(), &text)?;
    for v in verdicts {
        // keep stdout clean when it carries the sample
        if a.out.is_some() {
            println!("{v}");
        } else {
            eprintln!("{v}");
        }
    }
    Ok(0)
}

fn validate(a: ValidateArgs) -> Result<u8, CliError> {
    let text = read_to_string(&a.input)?;
    let format = a.format.unwrap_or_else(|| {
        if a.input.extension().is_some_and(|e| e == "json") {
            Format::Json
        } else {
            Format::Csv
        }
    });
    let (sample, file_p) = match format {
        Format::Csv => (io::sample_from_csv(&text)?, None),
        Format::Json => io::sample_from_json(&text)?,
    };
    println!("n: {}, d: {}", sample.n(), sample.d());
    println!("latin: {}", is_latin(&sample));
    let params = match a.p.or(file_p) {
        Some(p) => Some(OsParameters::new(p, sample.d())?),
        None => OsParameters::from_levels(sample.n(), sample.d()).ok(),
    };
    match params {
        Some(params) => println!("orthogonal: {}", is_orthogonal_sample(&sample, &params)?),
        None => println!("orthogonal: n/a (n is not p^d)"),
    }
    Ok(0)
}

fn oa(a: OaArgs) -> Result<u8, CliError> {
    let side = sidecar_path(&a.out)?;
    let mut oa = build_oa_strength2(a.s, a.d)?;
    if let Some(seed) = a.randomize_seed {
        oa = randomize_oa(&oa, &mut SeedTree::new(seed).rng());
    }
    write_atomic(&a.out, &io::oa_to_csv(&oa))?;
    write_atomic(&side, &io::oa_sidecar(&oa))?;
    println!(
        "OA({}, {}, {}, {}) lambda={} -> {}",
        oa.runs(),
        oa.factors(),
        oa.symbols(),
        oa.strength(),
        oa.index(),
        a.out.display()
    );
    Ok(0)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn campaign(a: CampaignArgs) -> Result<u8, CliError> {
    let aggregation = match a.aggregate {
        AggregateArg::PerSubspace => Aggregation::PerSubspace,
        AggregateArg::MeanCoverage => Aggregation::MeanCoverage,
    };
    let build = |n: usize, seed: u64| CampaignConfig {
        n,
        d: a.d,
        t: a.t,
        thresholds: a.thresholds.clone(),
        replicates: a.replicates,
        max_trials: a.max_trials.unwrap_or_else(|| default_max_trials(n, a.t)),
        sampler: sampler_kind(a.sampler),
        aggregation,
        master_seed: seed,
    };
    let mut seen = std::collections::HashSet::new();
    if let Some(n) = a.n_list.iter().find(|&&n| !seen.insert(n)) {
        return Err(CliError::usage(format!("n={n} repeated in --n-list")));
    }
    for &n in &a.n_list {
        build(n, 0).validate()?;
    }
    let pool = pool(a.workers)?;
    let seed = resolve_seed(a.seed.seed)?;
    let configs: Vec<CampaignConfig> = a.n_list.iter().map(|&n| build(n, seed)).collect();
    let results = pool.install(|| {
        configs
            .iter()
            .map(run_campaign)
            .collect::<Result<Vec<_>, Error>>()
    })?;

    let dir = &a.out;
    let mut summary_csv = format!("{}\n", io::SUMMARY_HEADER);
    let mut summary_json = String::from("[\n");
    for (i, r) in results.iter().enumerate() {
        let n = r.config.n;
        write_atomic(&dir.join(format!("campaign_n{n}.csv")), &io::campaign_to_csv(r))?;
        write_atomic(
            &dir.join(format!("campaign_n{n}_subspaces.csv")),
            &io::campaign_subspaces_to_csv(r),
        )?;
        summary_csv.push_str(&io::campaign_summary_to_csv(r, false));
        summary_json.push_str(io::campaign_summary_to_json(r).trim_end());
        summary_json.push_str(if i + 1 < results.len() { ",\n" } else { "\n" });
    }
    summary_json.push_str("]\n");
    write_atomic(&dir.join("summary.csv"), &summary_csv)?;
    write_atomic(&dir.join("summary.json"), &summary_json)?;

    println!("seed: {seed}");
    for r in &results {
        for s in &r.summary {
            let mean = s.mean_trials.map_or("censored".into(), |m| format!("{m:.3}"));
            let se = s.stderr.map_or("n/a".into(), |e| format!("{e:.3}"));
            println!(
                "n={} d={} t={} threshold={} mean_trials={mean} stderr={se} censored={}/{}",
                r.config.n,
                r.config.d,
                r.config.t,
                s.threshold,
                s.censored,
                r.replicates.len()
            );
        }
    }
    let distinct_n = a.n_list.len();
    if distinct_n >= 3 {
        let mut gradient = String::from("threshold,slope\n");
        for &thr in &a.thresholds {
            match fit_loglog_gradient(&results, thr) {
                Ok(slope) => {
                    println!("gradient threshold={thr} slope={slope:.4}");
                    gradient.push_str(&format!("{},{}\n", io::fmt_f64(thr), io::fmt_f64(slope)));
                }
                Err(e) => {
                    println!("gradient threshold={thr} slope=n/a ({e})");
                    gradient.push_str(&format!("{},\n", io::fmt_f64(thr)));
                }
            }
        }
        write_atomic(&dir.join("gradient.csv"), &gradient)?;
    } else {
        eprintln!("gradient report skipped: needs at least 3 values in --n-list");
    }

    let mut manifest = RunConfig::new("campaign");
    manifest
        .set("n-list", join(&a.n_list))
        .set("d", a.d)
        .set("t", a.t)
        .set("thresholds", join(&a.thresholds))
        .set("replicates", a.replicates)
        .set("sampler", sampler_kind(a.sampler).as_str())
        .set("aggregate", aggregation.as_str())
        .set("seed", seed);
    if let Some(m) = a.max_trials {
        manifest.set("max-trials", m);
    }
    write_atomic(&dir.join("run.conf"), &manifest.to_text())?;

    if results.iter().any(|r| r.fully_censored()) {
        eprintln!("warning: some threshold was not reached by any replicate within max_trials");
        return Ok(EXIT_CENSORED);
    }
    Ok(0)
}

fn curve(a: CurveArgs) -> Result<u8, CliError> {
    if a.k_max < 1 {
        return Err(CliError::usage("--k-max must be at least 1"));
    }
    let pool = pool(a.workers)?;
    let seed = resolve_seed(a.seed.seed)?;
    let cfg = CurveConfig {
        n: a.n,
        d: a.d,
        t: a.t,
        replicates: a.replicates,
        sampler: sampler_kind(a.sampler),
        master_seed: seed,
    };
    let points = pool.install(|| coverage_curve(&cfg, a.k_max))?;
    emit(a.out.as_deref(), &io::curve_to_csv(&points))?;
    if a.out.is_some() {
        println!("seed: {seed}");
        if let Some(last) = points.last() {
            println!(
                "k={} empirical={:.6} conjectured={:.6} asymptotic={:.6}",
                last.k, last.empirical, last.conjectured, last.asymptotic
            );
        }
    }
    Ok(0)
}

fn subblocks(a: SubblocksArgs) -> Result<u8, CliError> {
    let params = OsParameters::new(a.p, a.d)?;
    let pool = pool(a.workers)?;
    let seed = resolve_seed(a.seed.seed)?;
    let cfg = SubBlockConfig {
        p: a.p,
        d: a.d,
        sampler: sampler_kind(a.sampler),
        coverage_target: a.coverage_target,
        replicates: a.replicates,
        max_trials: a.max_trials.unwrap_or_else(|| default_max_trials(params.n(), 2)),
        master_seed: seed,
    };
    let study = pool.install(|| run_subblock_study(&cfg))?;
    if !study.all_reached() {
        return Err(CliError::usage(format!(
            "coverage target {} not reached within {} trials",
            cfg.coverage_target, cfg.max_trials
        )));
    }

    let dir = &a.out;
    let label = |(x, y): (usize, usize)| format!("{}-{}", x + 1, y + 1);
    let mut per_rep = String::from("replicate,pair,trials,min,max,variance\n");
    for r in &study.replicates {
        for h in &r.histograms {
            per_rep.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.replicate,
                label(h.pair),
                r.trials,
                io::fmt_f64(h.min()),
                io::fmt_f64(h.max()),
                io::fmt_f64(h.variance())
            ));
        }
    }
    let mut pooled = String::from("pair,trials,min,max,variance\n");
    println!("seed: {seed}");
    for h in &study.pooled {
        write_atomic(
            &dir.join(format!("pair_{}_{}.csv", h.pair.0 + 1, h.pair.1 + 1)),
            &io::histogram_to_csv(h),
        )?;
        pooled.push_str(&format!(
            "{},{},{},{},{}\n",
            label(h.pair),
            h.trials,
            io::fmt_f64(h.min()),
            io::fmt_f64(h.max()),
            io::fmt_f64(h.variance())
        ));
        println!(
            "pair {}: trials={} min={} max={} variance={}",
            label(h.pair),
            h.trials,
            h.min(),
            h.max(),
            h.variance()
        );
    }
    write_atomic(&dir.join("replicates.csv"), &per_rep)?;
    write_atomic(&dir.join("summary.csv"), &pooled)?;
    println!(
        "replicates with positive variance in every pair: {:.4}",
        study.positive_variance_fraction()
    );

    let mut manifest = RunConfig::new("subblocks");
    manifest
        .set("p", a.p)
        .set("d", a.d)
        .set("sampler", cfg.sampler.as_str())
        .set("coverage-target", a.coverage_target)
        .set("replicates", a.replicates)
        .set("seed", seed);
    if let Some(m) = a.max_trials {
        manifest.set("max-trials", m);
    }
    write_atomic(&dir.join("run.conf"), &manifest.to_text())?;
    Ok(0)
}

fn plotdata(a: PlotdataArgs) -> Result<u8, CliError> {
    let mut rows = Vec::new();
    for input in &a.inputs {
        let path = if input.is_dir() {
            input.join("summary.csv")
        } else {
            input.clone()
        };
        rows.extend(io::summary_from_csv(&read_to_string(&path)?)?);
    }
    let mut out = String::from("n,d,t,sampler,threshold,log10_n,log10_mean_trials,mean_trials,stderr\n");
    let opt = |x: Option<f64>| x.map_or_else(String::new, io::fmt_f64);
    for r in &rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.d,
            r.t,
            r.sampler,
            io::fmt_f64(r.threshold),
            io::fmt_f64((r.n as f64).log10()),
            opt(r.mean_trials.map(f64::log10)),
            opt(r.mean_trials),
            opt(r.stderr)
        ));
    }
    emit(a.out.as_deref(), &out)?;
    if a.out.is_some() {
        // quick look at the slopes per (d, t, threshold)
        let mut keys: Vec<(usize, usize, String, u64)> = rows
            .iter()
            .map(|r| (r.d, r.t, r.sampler.clone(), r.threshold.to_bits()))
            .collect();
        keys.sort();
        keys.dedup();
        for (d, t, sampler, thr) in keys {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| (r.d, r.t, &r.sampler, r.threshold.to_bits()) == (d, t, &sampler, thr))
                .filter_map(|r| r.mean_trials.map(|m| ((r.n as f64).log10(), m.log10())))
                .collect();
            if pts.len() >= 3 {
                println!(
                    "d={d} t={t} sampler={sampler} threshold={} slope={:.4}",
                    f64::from_bits(thr),
                    least_squares_slope(&pts)
                );
            }
        }
    }
    Ok(0)
}
