#![allow(dead_code)]

use std::path::PathBuf;

use qcdist::permanent::IntMatrix;
use qcdist::qc::{parse_qcmat, CodeInfo, PolyMatrix, WeightMatrix};
use qcdist::ring::PolyResidue;
use rand::seq::index::sample;
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixture(name: &str) -> (PolyMatrix, CodeInfo) {
    let path = fixture_path(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_qcmat(&text).unwrap()
}

pub fn random_int_matrix<R: Rng>(rng: &mut R, order: usize, max_entry: u32, density: f64) -> IntMatrix {
    let mut m = IntMatrix::zeros(order, order);
    for r in 0..order {
        for c in 0..order {
            if rng.random_bool(density) {
                m.set(r, c, rng.random_range(1..=max_entry));
            }
        }
    }
    m
}

pub fn random_weight_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, max_entry: u32) -> WeightMatrix {
    let m: Vec<Vec<u32>> = (0..rows).map(|_| (0..cols).map(|_| rng.random_range(0..=max_entry)).collect()).collect();
    WeightMatrix::from_rows(&m).unwrap()
}

pub fn random_poly_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, order: usize, max_weight: usize) -> PolyMatrix {
    let entries = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    let w = rng.random_range(0..=max_weight.min(order));
                    let mut e = sample(rng, order, w).into_vec();
                    e.sort_unstable();
                    PolyResidue::from_exponents(order, &e).unwrap()
                })
                .collect()
        })
        .collect();
    PolyMatrix::new(order, entries).unwrap()
}

/// Rows of the expanded parity-check matrix as bitmasks over at most 64
/// code bits, built straight from the definition: block `(j, i)` has a one
/// at `(r, c)` iff `(r - c) mod N` is an exponent of entry `(j, i)`.
pub fn expand_to_masks(h: &PolyMatrix) -> Vec<u64> {
    let n = h.order();
    assert!(h.cols() * n <= 64);
    let mut rows = vec![0u64; h.rows() * n];
    for j in 0..h.rows() {
        for i in 0..h.cols() {
            let exps: Vec<usize> = h.get(j, i).exponents().collect();
            for r in 0..n {
                for c in 0..n {
                    if exps.contains(&((r + n - c) % n)) {
                        rows[j * n + r] |= 1 << (i * n + c);
                    }
                }
            }
        }
    }
    rows
}

/// Null-space basis of the GF(2) matrix whose rows are `rows`, as masks.
pub fn null_space(rows: &[u64], width: usize) -> Vec<u64> {
    let mut reduced: Vec<u64> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..width {
        let bit = 1u64 << col;
        let Some(p) = (rank..reduced.len()).find(|&r| reduced[r] & bit != 0) else {
            continue;
        };
        reduced.swap(rank, p);
        for r in 0..reduced.len() {
            if r != rank && reduced[r] & bit != 0 {
                reduced[r] ^= reduced[rank];
            }
        }
        pivots.push(col);
        rank += 1;
    }
    (0..width)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = 1u64 << free;
            for (r, &p) in pivots.iter().enumerate() {
                if reduced[r] >> free & 1 == 1 {
                    v |= 1 << p;
                }
            }
            v
        })
        .collect()
}

pub fn code_dimension(h: &PolyMatrix) -> usize {
    null_space(&expand_to_masks(h), h.cols() * h.order()).len()
}

/// Exact minimum distance by Gray-code enumeration of the code, or `None`
/// for the zero code. Panics above `max_dim` dimensions.
pub fn exhaustive_dmin(h: &PolyMatrix, max_dim: usize) -> Option<u32> {
    let width = h.cols() * h.order();
    let rows = expand_to_masks(h);
    let basis = null_space(&rows, width);
    for v in &basis {
        assert!(rows.iter().all(|r| (r & v).count_ones() % 2 == 0));
    }
    assert!(basis.len() <= max_dim, "dimension {} too large", basis.len());
    if basis.is_empty() {
        return None;
    }
    let mut word = 0u64;
    let mut best = u32::MAX;
    for k in 1u64..(1 << basis.len()) {
        word ^= basis[k.trailing_zeros() as usize];
        best = best.min(word.count_ones());
    }
    Some(best)
}

pub fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

/// Permanent straight from the definition via an explicit permutation walk.
pub fn definition_permanent(m: &IntMatrix) -> u128 {
    fn walk(m: &IntMatrix, row: usize, used: &mut Vec<bool>) -> u128 {
        if row == m.rows() {
            return 1;
        }
        let mut total = 0;
        for c in 0..m.cols() {
            if !used[c] && m.get(row, c) != 0 {
                used[c] = true;
                total += m.get(row, c) as u128 * walk(m, row + 1, used);
                used[c] = false;
            }
        }
        total
    }
    walk(m, 0, &mut vec![false; m.cols()])
}
