//! Binary matrices over GF(2): a small dense type for circulant blocks and a
//! sparse row/column-list type for expanded parity-check matrices.

use std::fmt::Write as _;

use crate::{Error, Result};

/// Dense binary matrix with rows packed into `u64` words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        BinaryMatrix {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order, order);
        for i in 0..order {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from `0`/`1` rows, mostly for tests and examples.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.as_ref().len(), cols, "ragged rows");
            for (c, &v) in row.as_ref().iter().enumerate() {
                m.set(r, c, v != 0);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        self.data[r * self.words_per_row + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.words_per_row + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn col_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BinaryMatrix) -> Result<BinaryMatrix> {
        if self.cols != other.rows {
            return Err(Error::invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BinaryMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let src = other.row_words(k);
                    let base = r * out.words_per_row;
                    for (dst, s) in out.data[base..base + out.words_per_row].iter_mut().zip(src) {
                        *dst ^= s;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn to_sparse(&self) -> SparseBinaryMatrix {
        let rows = (0..self.rows)
            .map(|r| (0..self.cols).filter(|&c| self.get(r, c)).collect())
            .collect();
        SparseBinaryMatrix::from_row_lists(self.cols, rows).expect("indices in range")
    }
}

/// Sparse binary matrix stored as sorted per-row and per-column index lists.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseBinaryMatrix {
    cols: usize,
    row_support: Vec<Vec<usize>>,
    col_support: Vec<Vec<usize>>,
}

impl SparseBinaryMatrix {
    /// Builds the matrix from the column indices set in each row. Duplicate
    /// indices within a row are collapsed.
    pub fn from_row_lists(cols: usize, mut rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut col_support = vec![Vec::new(); cols];
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            row.dedup();
            for &c in row.iter() {
                if c >= cols {
                    return Err(Error::invalid(format!("column {c} out of range in row {r}")));
                }
                col_support[c].push(r);
            }
        }
        Ok(SparseBinaryMatrix {
            cols,
            row_support: rows,
            col_support,
        })
    }

    pub fn rows(&self) -> usize {
        self.row_support.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.row_support[r]
    }

    pub fn col(&self, c: usize) -> &[usize] {
        &self.col_support[c]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.row_support[r].binary_search(&c).is_ok()
    }

    pub fn count_ones(&self) -> usize {
        self.row_support.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> BinaryMatrix {
        let mut m = BinaryMatrix::zeros(self.rows(), self.cols);
        for (r, row) in self.row_support.iter().enumerate() {
            for &c in row {
                m.set(r, c, true);
            }
        }
        m
    }

    /// GF(2) product `H c^T`.
    pub fn syndrome(&self, word: &[bool]) -> Result<Vec<bool>> {
        if word.len() != self.cols {
            return Err(Error::invalid(format!(
                "word length {} does not match {} columns",
                word.len(),
                self.cols
            )));
        }
        Ok(self
            .row_support
            .iter()
            .map(|row| row.iter().filter(|&&c| word[c]).count() % 2 == 1)
            .collect())
    }

    pub fn is_codeword(&self, word: &[bool]) -> Result<bool> {
        Ok(self.syndrome(word)?.iter().all(|&s| !s))
    }

    /// MacKay's alist text, with zero padding for irregular weights.
    pub fn to_alist(&self) -> String {
        let mut out = String::new();
        let max_col = self.col_support.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = self.row_support.iter().map(Vec::len).max().unwrap_or(0);
        writeln!(out, "{} {}", self.cols, self.rows()).unwrap();
        writeln!(out, "{max_col} {max_row}").unwrap();
        for lists in [&self.col_support, &self.row_support] {
            let weights: Vec<String> = lists.iter().map(|l| l.len().to_string()).collect();
            writeln!(out, "{}", weights.join(" ")).unwrap();
        }
        for (lists, width) in [(&self.col_support, max_col), (&self.row_support, max_row)] {
            for l in lists.iter() {
                let mut fields: Vec<String> = l.iter().map(|i| (i + 1).to_string()).collect();
                fields.resize(width.max(1), "0".to_string());
                writeln!(out, "{}", fields.join(" ")).unwrap();
            }
        }
        out
    }

    /// Parses alist text, accepting both padded and unpadded variants. The
    /// row lists are authoritative; column lists must agree with them.
    pub fn from_alist(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next_ints = |what: &str| -> Result<(usize, Vec<usize>)> {
            let (no, line) = lines.next().ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("unexpected end of input reading {what}"),
            })?;
            let vals = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| Error::Parse {
                        line: no,
                        message: format!("bad integer {t:?} in {what}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((no, vals))
        };
        let (no, dims) = next_ints("dimensions")?;
        let [cols, rows] = dims[..] else {
            return Err(Error::Parse { line: no, message: "expected `cols rows`".into() });
        };
        next_ints("maximum weights")?;
        let (no, col_w) = next_ints("column weights")?;
        if col_w.len() != cols {
            return Err(Error::Parse { line: no, message: "column weight count".into() });
        }
        let (no, row_w) = next_ints("row weights")?;
        if row_w.len() != rows {
            return Err(Error::Parse { line: no, message: "row weight count".into() });
        }
        let mut col_lists = Vec::with_capacity(cols);
        for _ in 0..cols {
            let (_, v) = next_ints("column list")?;
            col_lists.push(v.into_iter().filter(|&i| i != 0).map(|i| i - 1).collect::<Vec<_>>());
        }
        let mut row_lists = Vec::with_capacity(rows);
        for (r, &w) in row_w.iter().enumerate() {
            let (no, v) = next_ints("row list")?;
            let list: Vec<usize> = v.into_iter().filter(|&i| i != 0).map(|i| i - 1).collect();
            if list.len() != w {
                return Err(Error::Parse {
                    line: no,
                    message: format!("row {r} lists {} entries, weight says {w}", list.len()),
                });
            }
            row_lists.push(list);
        }
        let m = SparseBinaryMatrix::from_row_lists(cols, row_lists)?;
        for (c, mut l) in col_lists.into_iter().enumerate() {
            l.sort_unstable();
            if l != m.col_support[c] || l.len() != col_w[c] {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("column {c} list disagrees with row lists"),
                });
            }
        }
        Ok(m)
    }
}
