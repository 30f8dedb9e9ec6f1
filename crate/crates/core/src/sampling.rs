//! Latin Hypercube trials, Orthogonal Samples and block arithmetic.
//!
//! Levels are stored 0-based: a trial over `n` levels uses `0..n`. When
//! `n = p^d`, a level `x` splits into a coarse block `x / p^(d-1)` and an
//! offset `x % p^(d-1)` inside that block; an Orthogonal Sample is a Latin
//! trial whose rows hit every one of the `p^d` block tuples.

use rand::seq::SliceRandom;

use crate::error::{checked_pow, domain, Error, Result};
use crate::stream::TrialStreams;

/// An `n x d` grid of levels in `0..n`, one row per point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SampleMatrix {
    n: usize,
    d: usize,
    levels: Vec<usize>,
}

impl SampleMatrix {
    /// Builds a matrix from row-major `levels`, checking shape and range.
    pub fn new(n: usize, d: usize, levels: Vec<usize>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(domain(format!(
                "sample needs n >= 1 and d >= 1, got n={n}, d={d}"
            )));
        }
        let expected = n
            .checked_mul(d)
            .ok_or_else(|| Error::Capacity(format!("{n} x {d} sample")))?;
        if levels.len() != expected {
            return Err(domain(format!(
                "expected {expected} levels for a {n} x {d} sample, got {}",
                levels.len()
            )));
        }
        if let Some(bad) = levels.iter().find(|&&v| v >= n) {
            return Err(domain(format!("level {bad} outside 0..{n}")));
        }
        Ok(Self { n, d, levels })
    }

    /// Builds a matrix from explicit rows; `n` is the number of rows.
    pub fn from_rows<R: AsRef<[usize]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(r) = rows.iter().find(|r| r.as_ref().len() != d) {
            return Err(domain(format!(
                "ragged rows: expected {d} columns, found {}",
                r.as_ref().len()
            )));
        }
        let levels = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(n, d, levels)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, row: usize, column: usize) -> usize {
        self.levels[row * self.d + column]
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.levels[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.levels.chunks_exact(self.d)
    }

    pub fn column(&self, j: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.levels.iter().skip(j).step_by(self.d).copied()
    }

    /// Row-major levels.
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }
}

/// Parameters of an Orthogonal Sample: `p` blocks per axis in `d` dimensions,
/// hence `n = p^d` levels and blocks of `p^(d-1)` levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OsParameters {
    p: usize,
    d: usize,
    n: usize,
    block_len: usize,
}

impl OsParameters {
    pub fn new(p: usize, d: usize) -> Result<Self> {
        if p < 2 {
            return Err(domain(format!("orthogonal sampling needs p >= 2, got p={p}")));
        }
        if d < 2 {
            return Err(domain(format!("orthogonal sampling needs d >= 2, got d={d}")));
        }
        let n = checked_pow(p, d, "p^d")?;
        Ok(Self {
            p,
            d,
            n,
            block_len: n / p,
        })
    }

    /// Recovers `p` from `n = p^d`; fails unless `n` is an exact `d`-th power.
    pub fn from_levels(n: usize, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(domain(format!("orthogonal sampling needs d >= 2, got d={d}")));
        }
        let guess = (n as f64).powf(1.0 / d as f64).round() as usize;
        for p in guess.saturating_sub(1).max(2)..=guess + 1 {
            if let Ok(params) = Self::new(p, d) {
                if params.n == n {
                    return Ok(params);
                }
            }
        }
        Err(domain(format!("n={n} is not p^{d} for any integer p >= 2")))
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Levels per block, `p^(d-1)`.
    pub fn block_len(&self) -> usize {
        self.block_len
    }
}

/// The `(block, offset)` form of a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockCoordinate {
    block: usize,
    offset: usize,
}

impl BlockCoordinate {
    pub fn new(block: usize, offset: usize, params: &OsParameters) -> Result<Self> {
        if block >= params.p || offset >= params.block_len {
            return Err(domain(format!(
                "block coordinate ({block}, {offset}) outside {} x {}",
                params.p, params.block_len
            )));
        }
        Ok(Self { block, offset })
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn offset(&self) -> usize {
        self.offset
    }
}

pub fn decompose_level(x: usize, params: &OsParameters) -> Result<BlockCoordinate> {
    if x >= params.n {
        return Err(domain(format!("level {x} outside 0..{}", params.n)));
    }
    Ok(BlockCoordinate {
        block: x / params.block_len,
        offset: x % params.block_len,
    })
}

pub fn recompose_level(c: &BlockCoordinate, params: &OsParameters) -> usize {
    c.block * params.block_len + c.offset
}

/// Random Latin Hypercube trial: column `j` is a uniform permutation of
/// `0..n` drawn from `streams.column(j)`.
pub fn generate_lhs(n: usize, d: usize, streams: &TrialStreams) -> Result<SampleMatrix> {
    if n == 0 || d == 0 {
        return Err(domain(format!(
            "latin hypercube needs n >= 1 and d >= 1, got n={n}, d={d}"
        )));
    }
    let total = n
        .checked_mul(d)
        .ok_or_else(|| Error::Capacity(format!("{n} x {d} sample")))?;
    let mut levels = vec![0usize; total];
    let mut perm: Vec<usize> = (0..n).collect();
    for j in 0..d {
        let mut rng = streams.column(j);
        perm.shuffle(&mut rng);
        for (i, &v) in perm.iter().enumerate() {
            levels[i * d + j] = v;
        }
    }
    Ok(SampleMatrix { n, d, levels })
}

/// True iff every column is a permutation of `0..n`.
pub fn is_latin(sample: &SampleMatrix) -> bool {
    let mut seen = vec![false; sample.n];
    (0..sample.d).all(|j| {
        seen.iter_mut().for_each(|s| *s = false);
        sample.column(j).all(|v| !std::mem::replace(&mut seen[v], true))
    })
}

/// Index of the block tuple of `row`, read as a base-`p` number.
fn block_tuple_index(row: &[usize], params: &OsParameters) -> usize {
    row.iter()
        .fold(0, |acc, &v| acc * params.p + v / params.block_len)
}

/// True iff `sample` is Latin and its rows cover all `p^d` block tuples.
pub fn is_orthogonal_sample(sample: &SampleMatrix, params: &OsParameters) -> Result<bool> {
    if sample.n != params.n || sample.d != params.d {
        return Err(domain(format!(
            "sample is {} x {} but parameters require {} x {}",
            sample.n, sample.d, params.n, params.d
        )));
    }
    if !is_latin(sample) {
        return Ok(false);
    }
    let mut hit = vec![false; params.n];
    Ok(sample
        .rows()
        .all(|row| !std::mem::replace(&mut hit[block_tuple_index(row, params)], true)))
}

/// Random Orthogonal Sample.
///
/// Row `i` is assigned the `i`-th block tuple in lexicographic order. In
/// each column, the `p^(d-1)` rows sharing block `x` receive a fresh
/// uniform permutation of the offsets, and the level is
/// `x * p^(d-1) + offset`.
pub fn generate_os(params: &OsParameters, streams: &TrialStreams) -> SampleMatrix {
    let OsParameters { p, d, n, block_len } = *params;
    let mut levels = vec![0usize; n * d];
    let mut offsets: Vec<usize> = (0..block_len).collect();
    // stride of column j's digit in the lexicographic enumeration
    let mut stride = block_len;
    for j in 0..d {
        let mut rng = streams.column(j);
        for block in 0..p {
            offsets.shuffle(&mut rng);
            let rows = (0..n).filter(|&i| (i / stride) % p == block);
            for (i, &offset) in rows.zip(&offsets) {
                levels[i * d + j] = block * block_len + offset;
            }
        }
        stride /= p;
    }
    SampleMatrix { n, d, levels }
}
