//! Orthogonal arrays and the OA-to-Latin-Hypercube expansion.
//!
//! An `OrthogonalArray` of strength `t` and index `lambda` over `s`
//! symbols has `N = lambda * s^t` rows, and every choice of `t` columns
//! sees each `t`-tuple exactly `lambda` times. The expansion replaces the
//! `lambda * s^(t-1)` occurrences of symbol `x` in a column with a random
//! arrangement of the stratum `x * lambda * s^(t-1) ..`, producing an
//! `N`-level Latin trial whose `t`-dimensional margins stay stratified.
//!
//! Unlike [`generate_os`](crate::sampling::generate_os), which covers every
//! `d`-dimensional block tuple, a strength-2 expansion only guarantees
//! uniformity over pairs of dimensions.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::coverage::subspaces;
use crate::error::{checked_pow, domain, Error, Result};
use crate::sampling::SampleMatrix;
use crate::stream::TrialStreams;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrthogonalArray {
    runs: usize,
    factors: usize,
    symbols: usize,
    strength: usize,
    index: usize,
    rows: Vec<usize>,
}

impl OrthogonalArray {
    /// Checks shape, symbol range and `N = lambda * s^t`; strength itself is
    /// checked by [`verify_strength`] (see [`OrthogonalArray::new_verified`]).
    pub fn new(symbols: usize, strength: usize, index: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        if symbols == 0 || strength == 0 || index == 0 {
            return Err(domain("orthogonal array needs s, t, lambda >= 1"));
        }
        let runs = rows.len();
        let factors = rows.first().map_or(0, Vec::len);
        if factors == 0 {
            return Err(domain("orthogonal array needs at least one row and column"));
        }
        if strength > factors {
            return Err(domain(format!("strength {strength} exceeds {factors} factors")));
        }
        if rows.iter().any(|r| r.len() != factors) {
            return Err(domain("ragged orthogonal array rows"));
        }
        let expected = checked_pow(symbols, strength, "s^t")?
            .checked_mul(index)
            .ok_or_else(|| Error::Capacity("lambda * s^t".into()))?;
        if runs != expected {
            return Err(domain(format!(
                "{runs} rows but lambda * s^t = {index} * {symbols}^{strength} = {expected}"
            )));
        }
        let rows: Vec<usize> = rows.into_iter().flatten().collect();
        if let Some(v) = rows.iter().find(|&&v| v >= symbols) {
            return Err(domain(format!("symbol {v} outside 0..{symbols}")));
        }
        Ok(Self {
            runs,
            factors,
            symbols,
            strength,
            index,
            rows,
        })
    }

    /// Like [`OrthogonalArray::new`], then rejects arrays failing their declared strength.
    pub fn new_verified(
        symbols: usize,
        strength: usize,
        index: usize,
        rows: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let oa = Self::new(symbols, strength, index, rows)?;
        if !verify_strength(&oa, strength) {
            return Err(Error::InvalidInput(format!(
                "array does not have strength {strength} with index {index}"
            )));
        }
        Ok(oa)
    }

    /// Number of rows, `N`.
    pub fn runs(&self) -> usize {
        self.runs
    }

    /// Number of columns, `d`.
    pub fn factors(&self) -> usize {
        self.factors
    }

    /// Symbols per column, `s`.
    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn strength(&self) -> usize {
        self.strength
    }

    /// `lambda`.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn get(&self, row: usize, column: usize) -> usize {
        self.rows[row * self.factors + column]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.rows.chunks_exact(self.factors)
    }
}

fn is_prime(s: usize) -> bool {
    s >= 2 && (2..).take_while(|q| q * q <= s).all(|q| !s.is_multiple_of(q))
}

/// `OA(s^2, d, s, 2)` with index 1 from the linear construction over `Z_s`:
/// row `(a, b)` holds `a`, `b`, then `a + m*b mod s` for `m = 1..d-2`.
pub fn build_oa_strength2(s: usize, d: usize) -> Result<OrthogonalArray> {
    if !is_prime(s) {
        return Err(Error::Unsupported(format!("symbol count {s} is not prime")));
    }
    if d < 2 || d > s + 1 {
        return Err(Error::Unsupported(format!(
            "need 2 <= d <= s + 1 = {}, got d={d}",
            s + 1
        )));
    }
    let rows = (0..s)
        .flat_map(|a| (0..s).map(move |b| (a, b)))
        .map(|(a, b)| {
            let mut row = Vec::with_capacity(d);
            row.push(a);
            row.push(b);
            row.extend((1..d - 1).map(|m| (a + m * b) % s));
            row
        })
        .collect();
    OrthogonalArray::new_verified(s, 2, 1, rows)
}

/// True iff every `t`-column projection covers each `t`-tuple exactly
/// `N / s^t` times (and `s^t` divides `N`).
pub fn verify_strength(oa: &OrthogonalArray, t: usize) -> bool {
    if t > oa.factors {
        return false;
    }
    let Ok(cells) = checked_pow(oa.symbols, t, "s^t") else {
        return false;
    };
    if !oa.runs.is_multiple_of(cells) {
        return false;
    }
    let lambda = oa.runs / cells;
    let mut counts = vec![0usize; cells];
    subspaces(oa.factors, t).iter().all(|cols| {
        counts.iter_mut().for_each(|c| *c = 0);
        for row in oa.rows() {
            let cell = cols.iter().fold(0, |acc, &j| acc * oa.symbols + row[j]);
            counts[cell] += 1;
        }
        counts.iter().all(|&c| c == lambda)
    })
}

/// Explicit permutations applied by [`randomize_oa_with`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OaPermutation {
    /// Output row `i` is input row `rows[i]`.
    pub rows: Vec<usize>,
    /// Output column `j` is input column `columns[j]`.
    pub columns: Vec<usize>,
    /// `symbols[j][x]` relabels symbol `x` in output column `j`.
    pub symbols: Vec<Vec<usize>>,
}

impl OaPermutation {
    pub fn identity(oa: &OrthogonalArray) -> Self {
        Self {
            rows: (0..oa.runs).collect(),
            columns: (0..oa.factors).collect(),
            symbols: vec![(0..oa.symbols).collect(); oa.factors],
        }
    }

    pub fn random<R: Rng + ?Sized>(oa: &OrthogonalArray, rng: &mut R) -> Self {
        let mut perm = Self::identity(oa);
        perm.rows.shuffle(rng);
        perm.columns.shuffle(rng);
        for relabel in &mut perm.symbols {
            relabel.shuffle(rng);
        }
        perm
    }
}

fn is_permutation(p: &[usize], len: usize) -> bool {
    let mut seen = vec![false; len];
    p.len() == len
        && p.iter()
            .all(|&v| v < len && !std::mem::replace(&mut seen[v], true))
}

pub fn randomize_oa_with(oa: &OrthogonalArray, perm: &OaPermutation) -> Result<OrthogonalArray> {
    if !is_permutation(&perm.rows, oa.runs)
        || !is_permutation(&perm.columns, oa.factors)
        || perm.symbols.len() != oa.factors
        || !perm.symbols.iter().all(|p| is_permutation(p, oa.symbols))
    {
        return Err(domain("permutation shapes do not match the array"));
    }
    let mut rows = Vec::with_capacity(oa.rows.len());
    for &src_row in &perm.rows {
        for (j, &src_col) in perm.columns.iter().enumerate() {
            rows.push(perm.symbols[j][oa.get(src_row, src_col)]);
        }
    }
    Ok(OrthogonalArray { rows, ..oa.clone() })
}

/// Uniform random row order, column order and per-column symbol labels.
pub fn randomize_oa<R: Rng + ?Sized>(oa: &OrthogonalArray, rng: &mut R) -> OrthogonalArray {
    randomize_oa_with(oa, &OaPermutation::random(oa, rng)).expect("generated permutations fit")
}

/// Expands `oa` into an `N`-level Latin trial, column `j` drawing its
/// stratum permutations from `streams.column(j)`.
pub fn tang_expand(oa: &OrthogonalArray, streams: &TrialStreams) -> Result<SampleMatrix> {
    if !verify_strength(oa, oa.strength) {
        return Err(Error::InvalidInput(format!(
            "array does not have its declared strength {}",
            oa.strength
        )));
    }
    let stratum = oa.runs / oa.symbols;
    let mut levels = vec![0usize; oa.rows.len()];
    let mut order: Vec<usize> = (0..stratum).collect();
    for j in 0..oa.factors {
        let mut rng = streams.column(j);
        for x in 0..oa.symbols {
            order.shuffle(&mut rng);
            let rows = (0..oa.runs).filter(|&i| oa.get(i, j) == x);
            for (i, &o) in rows.zip(&order) {
                levels[i * oa.factors + j] = x * stratum + o;
            }
        }
    }
    SampleMatrix::new(oa.runs, oa.factors, levels)
}

/// True iff, splitting the `n` levels of every axis into `blocks` equal
/// strata, each column pair puts exactly `n / blocks^2` points in every
/// stratum pair. Tang expansions of strength-2 arrays pass with
/// `blocks = s`; Orthogonal Samples pass with `blocks = p`.
pub fn is_pairwise_block_uniform(sample: &SampleMatrix, blocks: usize) -> bool {
    let n = sample.n();
    if blocks == 0 || !n.is_multiple_of(blocks) || !n.is_multiple_of(blocks * blocks) {
        return false;
    }
    let width = n / blocks;
    let expected = n / (blocks * blocks);
    let mut counts = vec![0usize; blocks * blocks];
    subspaces(sample.d(), 2).iter().all(|pair| {
        counts.iter_mut().for_each(|c| *c = 0);
        for row in sample.rows() {
            counts[(row[pair[0]] / width) * blocks + row[pair[1]] / width] += 1;
        }
        counts.iter().all(|&c| c == expected)
    })
}
