//! Worked examples with `n = 8`, `d = 3` (so `p = 2`, blocks of 4 levels).
//!
//! `lhs1` and `lhs2` are written in 1-based plain levels; `lhs3` and `lhs4`
//! are the same two trials written as 1-based `(block, offset)` pairs.
//! Only `lhs2`/`lhs4` is an Orthogonal Sample.

use crate::sampling::{recompose_level, BlockCoordinate, OsParameters, SampleMatrix};

const LHS1: [[usize; 3]; 8] = [
    [1, 2, 1],
    [2, 3, 3],
    [3, 1, 2],
    [4, 7, 8],
    [5, 8, 5],
    [6, 5, 4],
    [7, 4, 6],
    [8, 6, 7],
];

const LHS2: [[usize; 3]; 8] = [
    [1, 3, 2],
    [2, 4, 6],
    [3, 5, 3],
    [4, 7, 8],
    [5, 1, 1],
    [6, 2, 7],
    [7, 8, 4],
    [8, 6, 5],
];

/// 1-based `(block, offset)` rows.
pub const LHS3_PAIRS: [[(usize, usize); 3]; 8] = [
    [(1, 1), (1, 2), (1, 1)],
    [(1, 2), (1, 3), (1, 3)],
    [(1, 3), (1, 1), (1, 2)],
    [(1, 4), (2, 3), (2, 4)],
    [(2, 1), (2, 4), (2, 1)],
    [(2, 2), (2, 1), (1, 4)],
    [(2, 3), (1, 4), (2, 2)],
    [(2, 4), (2, 2), (2, 3)],
];

/// 1-based `(block, offset)` rows.
pub const LHS4_PAIRS: [[(usize, usize); 3]; 8] = [
    [(1, 1), (1, 3), (1, 2)],
    [(1, 2), (1, 4), (2, 2)],
    [(1, 3), (2, 1), (1, 3)],
    [(1, 4), (2, 3), (2, 4)],
    [(2, 1), (1, 1), (1, 1)],
    [(2, 2), (1, 2), (2, 3)],
    [(2, 3), (2, 4), (1, 4)],
    [(2, 4), (2, 2), (2, 1)],
];

fn from_one_based(rows: &[[usize; 3]; 8]) -> SampleMatrix {
    let rows: Vec<Vec<usize>> = rows.iter().map(|r| r.iter().map(|v| v - 1).collect()).collect();
    SampleMatrix::from_rows(&rows).expect("fixture is well formed")
}

fn from_pairs(rows: &[[(usize, usize); 3]; 8]) -> SampleMatrix {
    let params = params();
    let rows: Vec<Vec<usize>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&(b, o)| {
                    let c = BlockCoordinate::new(b - 1, o - 1, &params).expect("fixture pair");
                    recompose_level(&c, &params)
                })
                .collect()
        })
        .collect();
    SampleMatrix::from_rows(&rows).expect("fixture is well formed")
}

/// `p = 2`, `d = 3`.
pub fn params() -> OsParameters {
    OsParameters::new(2, 3).expect("valid parameters")
}

pub fn lhs1() -> SampleMatrix {
    from_one_based(&LHS1)
}

pub fn lhs2() -> SampleMatrix {
    from_one_based(&LHS2)
}

pub fn lhs3() -> SampleMatrix {
    from_pairs(&LHS3_PAIRS)
}

pub fn lhs4() -> SampleMatrix {
    from_pairs(&LHS4_PAIRS)
}
