//! Exact permanents of nonnegative integer matrices, plus the permanent over
//! the polynomial ring.
//!
//! All engines operate on a [`MatrixView`]: an immutable [`IntMatrix`] with
//! row and column masks selecting a square submatrix. Results are exact
//! 128-bit values; anything larger is reported as [`Error::Overflow`].

mod bench;
mod brute;
mod poly;
mod recursive;
mod ryser;

use std::fmt;
use std::str::FromStr;

pub use bench::{benchmark, means, random_benchmark_matrix, write_bench_csv, BenchRecord};
pub use brute::perm_brute;
pub use poly::perm_poly;
pub use recursive::perm_recursive;
pub use ryser::{perm_ryser, RyserVariant};

use crate::qc::WeightMatrix;
use crate::{Error, Result};

/// Largest base dimension a [`MatrixView`] can address.
pub const MAX_DIM: usize = 64;

/// Dense nonnegative integer matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn filled(rows: usize, cols: usize, value: u32) -> Self {
        IntMatrix { rows, cols, entries: vec![value; rows * cols] }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order, order);
        for i in 0..order {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged integer matrix"));
        }
        Ok(IntMatrix { rows: rows.len(), cols, entries: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// New matrix with `out[r][c] = self[row_perm[r]][col_perm[c]]`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows, self.cols);
        for (r, &pr) in row_perm.iter().enumerate() {
            for (c, &pc) in col_perm.iter().enumerate() {
                out.set(r, c, self.get(pr, pc));
            }
        }
        out
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.cols.max(1)).map(<[u32]>::to_vec).collect()
    }

    pub fn view(&self) -> Result<MatrixView<'_>> {
        MatrixView::full(self)
    }
}

impl From<&WeightMatrix> for IntMatrix {
    fn from(a: &WeightMatrix) -> Self {
        IntMatrix { rows: a.rows(), cols: a.cols(), entries: a.entries().to_vec() }
    }
}

/// Square submatrix of an [`IntMatrix`] selected by row and column masks.
///
/// The recursive engine edits the masks while it runs and restores them
/// before returning, so a view must not be shared between concurrent calls.
#[derive(Clone, Debug)]
pub struct MatrixView<'a> {
    base: &'a IntMatrix,
    pub(crate) rows: u64,
    pub(crate) cols: u64,
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl<'a> MatrixView<'a> {
    pub fn full(base: &'a IntMatrix) -> Result<Self> {
        Self::new(base, full_mask(base.rows.min(64)), full_mask(base.cols.min(64)))
    }

    pub fn new(base: &'a IntMatrix, rows: u64, cols: u64) -> Result<Self> {
        if base.rows > MAX_DIM || base.cols > MAX_DIM {
            return Err(Error::invalid(format!(
                "{}x{} exceeds the {MAX_DIM}x{MAX_DIM} view limit",
                base.rows, base.cols
            )));
        }
        if rows & !full_mask(base.rows) != 0 || cols & !full_mask(base.cols) != 0 {
            return Err(Error::invalid("view mask selects indices outside the matrix"));
        }
        if rows.count_ones() != cols.count_ones() {
            return Err(Error::invalid(format!(
                "view is {}x{}, not square",
                rows.count_ones(),
                cols.count_ones()
            )));
        }
        Ok(MatrixView { base, rows, cols })
    }

    /// View with the given row and column index sets.
    pub fn select(base: &'a IntMatrix, rows: &[usize], cols: &[usize]) -> Result<Self> {
        let mask = |idx: &[usize], lim: usize| -> Result<u64> {
            idx.iter().try_fold(0u64, |m, &i| {
                if i >= lim || i >= MAX_DIM {
                    Err(Error::invalid(format!("index {i} out of range")))
                } else {
                    Ok(m | 1 << i)
                }
            })
        };
        Self::new(base, mask(rows, base.rows)?, mask(cols, base.cols)?)
    }

    pub fn base(&self) -> &'a IntMatrix {
        self.base
    }

    pub fn order(&self) -> usize {
        self.rows.count_ones() as usize
    }

    pub fn row_mask(&self) -> u64 {
        self.rows
    }

    pub fn col_mask(&self) -> u64 {
        self.cols
    }

    pub fn row_indices(&self) -> Vec<usize> {
        mask_indices(self.rows)
    }

    pub fn col_indices(&self) -> Vec<usize> {
        mask_indices(self.cols)
    }

    /// Copies the selected entries into a dense row-major buffer.
    pub fn dense(&self) -> Vec<u64> {
        let cols = self.col_indices();
        self.row_indices()
            .into_iter()
            .flat_map(|r| cols.iter().map(move |&c| self.base.get(r, c) as u64))
            .collect()
    }

    pub fn nonzeros(&self) -> usize {
        let cols = self.col_indices();
        self.row_indices()
            .into_iter()
            .map(|r| cols.iter().filter(|&&c| self.base.get(r, c) != 0).count())
            .sum()
    }
}

pub(crate) fn mask_indices(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    out
}

/// An exact permanent.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct PermanentValue(pub u128);

impl PermanentValue {
    pub const ZERO: PermanentValue = PermanentValue(0);
    pub const ONE: PermanentValue = PermanentValue(1);

    pub fn get(self) -> u128 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn checked_add(self, other: PermanentValue) -> Result<PermanentValue> {
        self.0
            .checked_add(other.0)
            .map(PermanentValue)
            .ok_or(Error::Overflow { subset_rank: None })
    }

    pub fn checked_mul(self, factor: u128) -> Result<PermanentValue> {
        self.0
            .checked_mul(factor)
            .map(PermanentValue)
            .ok_or(Error::Overflow { subset_rank: None })
    }
}

impl fmt::Display for PermanentValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The available permanent engines.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Engine {
    Brute,
    Recursive,
    Ryser,
    RyserGray,
    NijenhuisWilf,
    /// Reserved for Kallman's {0,1} algorithm; not implemented.
    Kallman,
}

impl Engine {
    pub const IMPLEMENTED: [Engine; 5] = [
        Engine::Brute,
        Engine::Recursive,
        Engine::Ryser,
        Engine::RyserGray,
        Engine::NijenhuisWilf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Brute => "brute",
            Engine::Recursive => "recursive",
            Engine::Ryser => "ryser",
            Engine::RyserGray => "ryser-gray",
            Engine::NijenhuisWilf => "nijenhuis-wilf",
            Engine::Kallman => "kallman",
        }
    }

    pub fn is_ryser_family(self) -> bool {
        matches!(self, Engine::Ryser | Engine::RyserGray | Engine::NijenhuisWilf)
    }

    pub fn compute(self, view: &mut MatrixView<'_>) -> Result<PermanentValue> {
        match self {
            Engine::Brute => perm_brute(view),
            Engine::Recursive => perm_recursive(view),
            Engine::Ryser => perm_ryser(view, RyserVariant::Standard),
            Engine::RyserGray => perm_ryser(view, RyserVariant::Gray),
            Engine::NijenhuisWilf => perm_ryser(view, RyserVariant::NijenhuisWilf),
            Engine::Kallman => Err(Error::Unsupported("the kallman engine is not implemented".into())),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [Engine::Brute, Engine::Recursive, Engine::Ryser, Engine::RyserGray, Engine::NijenhuisWilf, Engine::Kallman]
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown engine {s:?}"))
    }
}

/// Engine choice for [`perm_dispatch`]: the cofactor recursion for tiny or
/// very sparse views, Nijenhuis-Wilf otherwise.
pub fn select_engine(view: &MatrixView<'_>) -> Engine {
    let order = view.order();
    if order <= 3 {
        return Engine::Recursive;
    }
    // mean nonzeros per row; the recursion stays competitive up to about 3
    if view.nonzeros() <= 3 * order {
        Engine::Recursive
    } else {
        Engine::NijenhuisWilf
    }
}

/// Permanent by the engine [`select_engine`] picks. If Nijenhuis-Wilf
/// overflows on intermediate sums, a wrapping Gray-coded Ryser is exact
/// when a row or column product bounds the value below `2^128`; otherwise
/// an arbitrary-precision Ryser decides.
pub fn perm_dispatch(view: &mut MatrixView<'_>) -> Result<PermanentValue> {
    match select_engine(view) {
        Engine::NijenhuisWilf => match perm_ryser(view, RyserVariant::NijenhuisWilf) {
            Err(Error::Overflow { .. }) => match ryser::perm_ryser_wrapping(view) {
                Some(v) => Ok(v),
                None => ryser::perm_ryser_exact(view),
            },
            other => other,
        },
        e => e.compute(view),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn view_validation() {
        let m = IntMatrix::filled(3, 4, 1);
        assert!(MatrixView::full(&m).is_err());
        let v = MatrixView::select(&m, &[0, 2], &[1, 3]).unwrap();
        assert_eq!(v.order(), 2);
        assert_eq!(v.dense(), vec![1, 1, 1, 1]);
        assert!(MatrixView::select(&m, &[0, 5], &[1, 3]).is_err());
        assert!(MatrixView::new(&m, 0b1, 0b11).is_err());
        let big = IntMatrix::zeros(65, 65);
        assert!(MatrixView::full(&big).is_err());
    }

    #[test]
    fn dispatch_policy() {
        let dense = IntMatrix::filled(12, 12, 1);
        let v = dense.view().unwrap();
        assert!(select_engine(&v).is_ryser_family());
        let sparse = IntMatrix::identity(3);
        assert_eq!(select_engine(&sparse.view().unwrap()), Engine::Recursive);
        for n in 0..8 {
            let z = IntMatrix::zeros(n, n);
            let expected = if n == 0 { 1 } else { 0 };
            assert_eq!(perm_dispatch(&mut z.view().unwrap()).unwrap().get(), expected);
        }
        let mut v = dense.view().unwrap();
        assert_eq!(perm_dispatch(&mut v).unwrap().get(), 479_001_600);
    }

    #[test]
    fn kallman_slot_is_reserved() {
        let m = IntMatrix::identity(2);
        assert!(matches!(Engine::Kallman.compute(&mut m.view().unwrap()), Err(Error::Unsupported(_))));
        assert_eq!("kallman".parse::<Engine>().unwrap(), Engine::Kallman);
    }

    #[test]
    fn overflow_is_loud() {
        let m = IntMatrix::filled(40, 40, u32::MAX);
        let mut v = m.view().unwrap();
        assert!(matches!(perm_recursive(&mut v), Err(Error::Overflow { .. })));
    }
}
