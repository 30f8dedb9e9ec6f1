//! On-disk formats.
//!
//! Samples are written 1-based (CSV with an `x1,...,xd` header, or JSON);
//! orthogonal arrays are written 0-based with a JSON sidecar holding
//! `s`, `t` and `lambda`. Result tables print floats with 17 significant
//! digits so that every value round-trips exactly.

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::campaign::{CoverageCampaignResult, CurvePoint};
use crate::error::{Error, Result};
use crate::orthogonal::OrthogonalArray;
use crate::sampling::SampleMatrix;
use crate::subblock::SubBlockHistogram;

/// A float with 17 significant digits, `NaN` for missing values.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "NaN".to_string()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, fmt_f64)
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

/// Optional header plus integer rows.
type IntTable = (Option<Vec<String>>, Vec<Vec<usize>>);

fn read_int_rows(text: &str, has_header: bool) -> Result<IntTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = if has_header {
        Some(
            reader
                .headers()
                .map_err(parse_err)?
                .iter()
                .map(str::to_string)
                .collect(),
        )
    } else {
        None
    };
    let rows = reader
        .records()
        .map(|rec| {
            rec.map_err(parse_err)?
                .iter()
                .map(|f| {
                    f.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("not an integer: '{f}'")))
                })
                .collect()
        })
        .collect::<Result<Vec<Vec<usize>>>>()?;
    Ok((header, rows))
}

/// `x1,...,xd` header, then one 1-based row per point.
pub fn sample_to_csv(sample: &SampleMatrix) -> String {
    let mut out = (1..=sample.d())
        .map(|j| format!("x{j}"))
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    for row in sample.rows() {
        let line: Vec<String> = row.iter().map(|v| (v + 1).to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn sample_from_csv(text: &str) -> Result<SampleMatrix> {
    let (header, rows) = read_int_rows(text, true)?;
    let header = header.unwrap_or_default();
    let expected: Vec<String> = (1..=header.len()).map(|j| format!("x{j}")).collect();
    if header != expected {
        return Err(Error::Parse(format!(
            "expected header x1,...,xd, got {}",
            header.join(",")
        )));
    }
    to_zero_based(rows)
}

fn to_zero_based(rows: Vec<Vec<usize>>) -> Result<SampleMatrix> {
    let rows = rows
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|v| {
                    v.checked_sub(1)
                        .ok_or_else(|| Error::Parse("levels are 1-based".into()))
                })
                .collect()
        })
        .collect::<Result<Vec<Vec<usize>>>>()?;
    SampleMatrix::from_rows(&rows)
}

#[derive(Serialize, Deserialize)]
struct SampleJson {
    n: usize,
    d: usize,
    p: Option<usize>,
    levels: Vec<Vec<usize>>,
}

/// `{"n":..,"d":..,"p":..|null,"levels":[[...],...]}` with 1-based levels.
pub fn sample_to_json(sample: &SampleMatrix, p: Option<usize>) -> String {
    let doc = SampleJson {
        n: sample.n(),
        d: sample.d(),
        p,
        levels: sample.rows().map(|r| r.iter().map(|v| v + 1).collect()).collect(),
    };
    let mut s = serde_json::to_string(&doc).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn sample_from_json(text: &str) -> Result<(SampleMatrix, Option<usize>)> {
    let doc: SampleJson = serde_json::from_str(text).map_err(parse_err)?;
    let sample = to_zero_based(doc.levels)?;
    if (sample.n(), sample.d()) != (doc.n, doc.d) {
        return Err(Error::Parse(format!(
            "declared {} x {} but levels are {} x {}",
            doc.n,
            doc.d,
            sample.n(),
            sample.d()
        )));
    }
    Ok((sample, doc.p))
}

/// 0-based symbols, no header.
pub fn oa_to_csv(oa: &OrthogonalArray) -> String {
    let mut out = String::new();
    for row in oa.rows() {
        let line: Vec<String> = row.iter().map(usize::to_string).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OaSidecar {
    pub s: usize,
    pub t: usize,
    pub lambda: usize,
}

pub fn oa_sidecar(oa: &OrthogonalArray) -> String {
    let mut s = serde_json::to_string(&OaSidecar {
        s: oa.symbols(),
        t: oa.strength(),
        lambda: oa.index(),
    })
    .expect("plain data serializes");
    s.push('\n');
    s
}

/// Parses and strength-checks an array; fails with `InvalidInput` if the
/// declared strength does not hold.
pub fn oa_from_files(csv_text: &str, sidecar_text: &str) -> Result<OrthogonalArray> {
    let sidecar: OaSidecar = serde_json::from_str(sidecar_text).map_err(parse_err)?;
    let (_, rows) = read_int_rows(csv_text, false)?;
    OrthogonalArray::new_verified(sidecar.s, sidecar.t, sidecar.lambda, rows)
}

pub const CAMPAIGN_HEADER: &str = "n,d,t,sampler,threshold,replicate,trials,censored";

/// One line per (threshold, replicate); `trials` is empty when censored.
pub fn campaign_to_csv(result: &CoverageCampaignResult) -> String {
    let c = &result.config;
    let mut out = format!("{CAMPAIGN_HEADER}\n");
    for (i, &threshold) in c.thresholds.iter().enumerate() {
        for rep in &result.replicates {
            let trials = rep.trials[i];
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                c.n,
                c.d,
                c.t,
                c.sampler.as_str(),
                fmt_f64(threshold),
                rep.replicate,
                fmt_opt(trials),
                trials.is_none()
            ));
        }
    }
    out
}

/// Per-subspace first-hit trial counts, one line per (threshold, replicate, subspace).
pub fn campaign_subspaces_to_csv(result: &CoverageCampaignResult) -> String {
    let c = &result.config;
    let mut out = String::from("n,d,t,sampler,threshold,replicate,subspace,trials,censored\n");
    for (i, &threshold) in c.thresholds.iter().enumerate() {
        for rep in &result.replicates {
            for (sub, hit) in result.subspaces.iter().zip(&rep.subspace_trials[i]) {
                let label: Vec<String> = sub.iter().map(|j| (j + 1).to_string()).collect();
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    c.n,
                    c.d,
                    c.t,
                    c.sampler.as_str(),
                    fmt_f64(threshold),
                    rep.replicate,
                    label.join("-"),
                    hit.map_or_else(String::new, |k| k.to_string()),
                    hit.is_none()
                ));
            }
        }
    }
    out
}

pub const SUMMARY_HEADER: &str = "n,d,t,sampler,threshold,mean_trials,stderr,completed,censored";

/// One line per threshold.
pub fn campaign_summary_to_csv(result: &CoverageCampaignResult, with_header: bool) -> String {
    let c = &result.config;
    let mut out = if with_header {
        format!("{SUMMARY_HEADER}\n")
    } else {
        String::new()
    };
    for s in &result.summary {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            c.n,
            c.d,
            c.t,
            c.sampler.as_str(),
            fmt_f64(s.threshold),
            fmt_opt(s.mean_trials),
            fmt_opt(s.stderr),
            s.completed,
            s.censored
        ));
    }
    out
}

/// A row of a campaign summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub d: usize,
    pub t: usize,
    pub sampler: String,
    pub threshold: f64,
    pub mean_trials: Option<f64>,
    pub stderr: Option<f64>,
}

pub fn summary_from_csv(text: &str) -> Result<Vec<SummaryRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(parse_err)?
        .iter()
        .map(str::to_string)
        .collect();
    if header.join(",") != SUMMARY_HEADER {
        return Err(Error::Parse(format!("expected header {SUMMARY_HEADER}")));
    }
    let opt = |f: &str| -> Result<Option<f64>> {
        if f.is_empty() || f == "NaN" {
            Ok(None)
        } else {
            f.parse().map(Some).map_err(parse_err)
        }
    };
    reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(parse_err)?;
            Ok(SummaryRow {
                n: rec[0].parse().map_err(parse_err)?,
                d: rec[1].parse().map_err(parse_err)?,
                t: rec[2].parse().map_err(parse_err)?,
                sampler: rec[3].to_string(),
                threshold: rec[4].parse().map_err(parse_err)?,
                mean_trials: opt(&rec[5])?,
                stderr: opt(&rec[6])?,
            })
        })
        .collect()
}

/// Serializes as a JSON number with 17 significant digits.
struct F17(Option<f64>);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.filter(|x| x.is_finite()) {
            Some(x) => RawValue::from_string(fmt_f64(x))
                .map_err(serde::ser::Error::custom)?
                .serialize(serializer),
            None => serializer.serialize_none(),
        }
    }
}

#[derive(Serialize)]
struct ConfigJson<'a> {
    n: usize,
    d: usize,
    t: usize,
    thresholds: Vec<F17>,
    replicates: usize,
    max_trials: u64,
    sampler: &'a str,
    aggregation: &'a str,
    master_seed: u64,
}

#[derive(Serialize)]
struct ThresholdJson {
    threshold: F17,
    mean_trials: F17,
    stderr: F17,
    completed: usize,
    censored: usize,
}

#[derive(Serialize)]
struct SummaryJson<'a> {
    config: ConfigJson<'a>,
    subspaces: &'a [Vec<usize>],
    thresholds: Vec<ThresholdJson>,
}

/// `{config, subspaces, thresholds: [{threshold, mean_trials, stderr, ...}]}`.
pub fn campaign_summary_to_json(result: &CoverageCampaignResult) -> String {
    let c = &result.config;
    let doc = SummaryJson {
        config: ConfigJson {
            n: c.n,
            d: c.d,
            t: c.t,
            thresholds: c.thresholds.iter().map(|&x| F17(Some(x))).collect(),
            replicates: c.replicates,
            max_trials: c.max_trials,
            sampler: c.sampler.as_str(),
            aggregation: c.aggregation.as_str(),
            master_seed: c.master_seed,
        },
        subspaces: &result.subspaces,
        thresholds: result
            .summary
            .iter()
            .map(|s| ThresholdJson {
                threshold: F17(Some(s.threshold)),
                mean_trials: F17(s.mean_trials),
                stderr: F17(s.stderr),
                completed: s.completed,
                censored: s.censored,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    s.push('\n');
    s
}

pub const CURVE_HEADER: &str = "k,empirical,conjectured,asymptotic,stderr";

pub fn curve_to_csv(points: &[CurvePoint]) -> String {
    let mut out = format!("{CURVE_HEADER}\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.k,
            fmt_f64(p.empirical),
            fmt_f64(p.conjectured),
            fmt_f64(p.asymptotic),
            fmt_opt(p.stderr)
        ));
    }
    out
}

pub const SUBBLOCK_HEADER: &str = "b1,b2,count,normalized";

/// Blocks written 1-based.
pub fn histogram_to_csv(h: &SubBlockHistogram) -> String {
    let mut out = format!("{SUBBLOCK_HEADER}\n");
    for b1 in 0..h.p {
        for b2 in 0..h.p {
            out.push_str(&format!(
                "{},{},{},{}\n",
                b1 + 1,
                b2 + 1,
                h.count(b1, b2),
                fmt_f64(h.normalized_at(b1, b2))
            ));
        }
    }
    out
}
