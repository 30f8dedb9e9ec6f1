//! Coverage of `t`-dimensional projections and the closed-form coverage law.
//!
//! A `t`-subspace of an `n`-level, `d`-dimensional design has `n^t` cells.
//! Projecting every row of every trial onto the subspace marks cells as
//! covered; [`CoverageState`] folds trials in one at a time.
//!
//! For independent Latin trials each cell is hit by a given trial with
//! probability `1 / n^(t-1)` (the unique row matching the first coordinate
//! must match the remaining `t - 1` uniformly random ones), so the expected
//! covered fraction after `k` trials is `1 - (1 - 1/n^(t-1))^k`, whatever `d` is.

use std::collections::HashSet;

use crate::error::{checked_pow, domain, Result};
use crate::sampling::SampleMatrix;

/// Largest cell count stored as a dense bitset; beyond it a hash set is used.
pub const DENSE_CELL_LIMIT: usize = 1 << 26;

/// All `t`-subsets of `0..d` in lexicographic order.
pub fn subspaces(d: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if t > d {
        return out;
    }
    let mut current: Vec<usize> = (0..t).collect();
    loop {
        out.push(current.clone());
        // rightmost index that can still advance
        let Some(i) = (0..t).rev().find(|&i| current[i] < d - t + i) else {
            return out;
        };
        current[i] += 1;
        for k in i + 1..t {
            current[k] = current[k - 1] + 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Dense,
    Sparse,
}

#[derive(Debug, Clone)]
enum Occupancy {
    Dense(Vec<u64>),
    Sparse(HashSet<usize>),
}

impl Occupancy {
    /// Marks `cell`; returns true if it was newly covered.
    fn insert(&mut self, cell: usize) -> bool {
        match self {
            Occupancy::Dense(words) => {
                let (w, bit) = (cell / 64, 1u64 << (cell % 64));
                let fresh = words[w] & bit == 0;
                words[w] |= bit;
                fresh
            }
            Occupancy::Sparse(set) => set.insert(cell),
        }
    }

    fn contains(&self, cell: usize) -> bool {
        match self {
            Occupancy::Dense(words) => words[cell / 64] & (1u64 << (cell % 64)) != 0,
            Occupancy::Sparse(set) => set.contains(&cell),
        }
    }
}

/// Covered cells of one `t`-subspace.
#[derive(Debug, Clone)]
pub struct CoverageState {
    n: usize,
    subspace: Vec<usize>,
    cells: usize,
    occupancy: Occupancy,
    covered: usize,
}

impl CoverageState {
    pub fn new(n: usize, subspace: Vec<usize>) -> Result<Self> {
        let cells = Self::cell_count(n, &subspace)?;
        let repr = if cells <= DENSE_CELL_LIMIT {
            Representation::Dense
        } else {
            Representation::Sparse
        };
        Self::with_representation(n, subspace, repr)
    }

    pub fn with_representation(n: usize, subspace: Vec<usize>, repr: Representation) -> Result<Self> {
        let cells = Self::cell_count(n, &subspace)?;
        let occupancy = match repr {
            Representation::Dense => Occupancy::Dense(vec![0; cells.div_ceil(64)]),
            Representation::Sparse => Occupancy::Sparse(HashSet::new()),
        };
        Ok(Self {
            n,
            subspace,
            cells,
            occupancy,
            covered: 0,
        })
    }

    fn cell_count(n: usize, subspace: &[usize]) -> Result<usize> {
        if n == 0 || subspace.is_empty() {
            return Err(domain("coverage needs n >= 1 and a non-empty subspace"));
        }
        let mut sorted = subspace.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(domain(format!("repeated column in subspace {subspace:?}")));
        }
        checked_pow(n, subspace.len(), "n^t")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.subspace.len()
    }

    pub fn subspace(&self) -> &[usize] {
        &self.subspace
    }

    /// `n^t`.
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn covered_count(&self) -> usize {
        self.covered
    }

    pub fn fraction(&self) -> f64 {
        self.covered as f64 / self.cells as f64
    }

    pub fn representation(&self) -> Representation {
        match self.occupancy {
            Occupancy::Dense(_) => Representation::Dense,
            Occupancy::Sparse(_) => Representation::Sparse,
        }
    }

    /// Cell index of a row's projection, most significant coordinate first.
    fn cell_of(&self, row: &[usize]) -> usize {
        self.subspace.iter().fold(0, |acc, &j| acc * self.n + row[j])
    }

    pub fn is_covered(&self, tuple: &[usize]) -> bool {
        tuple.len() == self.t()
            && tuple.iter().all(|&v| v < self.n)
            && self
                .occupancy
                .contains(tuple.iter().fold(0, |acc, &v| acc * self.n + v))
    }

    /// Folds every row of `sample` into the state.
    pub fn add_sample(&mut self, sample: &SampleMatrix) -> Result<()> {
        if sample.n() != self.n {
            return Err(domain(format!(
                "sample has {} levels, coverage state expects {}",
                sample.n(),
                self.n
            )));
        }
        if let Some(&j) = self.subspace.iter().find(|&&j| j >= sample.d()) {
            return Err(domain(format!(
                "column {j} outside a {}-column sample",
                sample.d()
            )));
        }
        self.add_unchecked(sample);
        Ok(())
    }

    pub(crate) fn add_unchecked(&mut self, sample: &SampleMatrix) {
        for row in sample.rows() {
            let cell = self.cell_of(row);
            if self.occupancy.insert(cell) {
                self.covered += 1;
            }
        }
    }
}

/// Fraction of the `n^t` cells of `subspace` hit by any row of any sample.
pub fn covered_fraction(samples: &[SampleMatrix], subspace: &[usize]) -> Result<f64> {
    let Some(first) = samples.first() else {
        return Ok(0.0);
    };
    if let Some(s) = samples.iter().find(|s| (s.n(), s.d()) != (first.n(), first.d())) {
        return Err(domain(format!(
            "mixed sample shapes {}x{} and {}x{}",
            first.n(),
            first.d(),
            s.n(),
            s.d()
        )));
    }
    let mut state = CoverageState::new(first.n(), subspace.to_vec())?;
    for s in samples {
        state.add_sample(s)?;
    }
    Ok(state.fraction())
}

/// `n^(t-1)` as a float; its reciprocal is the per-trial hit probability of a cell.
fn cells_per_row(n: usize, t: usize) -> f64 {
    assert!(t >= 1, "subspace dimension must be at least 1");
    (n as f64).powi((t - 1) as i32)
}

/// `1 - (1 - 1/n^(t-1))^k`, evaluated as `-expm1(k * ln_1p(-1/n^(t-1)))`.
pub fn conjectured_coverage(k: u64, n: usize, t: usize) -> f64 {
    let p = 1.0 / cells_per_row(n, t);
    if k == 0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    -(k as f64 * (-p).ln_1p()).exp_m1()
}

/// `1 - exp(-k / n^(t-1))`.
pub fn asymptotic_coverage(k: f64, n: usize, t: usize) -> f64 {
    -(-k / cells_per_row(n, t)).exp_m1()
}

/// `(t - 1) * ln(n) * n^(t-1)`: the trial count at which the coverage law
/// leaves about `n` cells uncovered.
pub fn trials_for_full_coverage_estimate(n: usize, t: usize) -> f64 {
    (t as f64 - 1.0) * (n as f64).ln() * cells_per_row(n, t)
}

/// Cell count `n^t` with overflow reported.
pub fn cell_count(n: usize, t: usize) -> Result<usize> {
    checked_pow(n, t, "n^t")
}
