//! Polynomial parity-check matrices, weight matrices and the `qcmat` text
//! format.
//!
//! ```text
//! N=42 J=3 L=16
//! #standard IEEE 802.11ad
//! #rate 13/16
//! 29 30 0 8 ...
//! ```
//!
//! Each cell is `-` (also `-1`) for the zero circulant, or a comma-separated
//! list of shift exponents.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::binary::SparseBinaryMatrix;
use crate::ring::{PolyResidue, PolyVector};
use crate::{Error, Result};

/// The `J x L` polynomial parity-check matrix `H(x)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    order: usize,
    entries: Vec<PolyResidue>,
}

impl PolyMatrix {
    pub fn new(order: usize, rows: Vec<Vec<PolyResidue>>) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("modulus order must be positive"));
        }
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(Error::invalid("polynomial matrix must be nonempty"));
        }
        let n_rows = rows.len();
        let mut entries = Vec::with_capacity(n_rows * cols);
        for (j, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::invalid(format!("row {j} has {} entries, expected {cols}", row.len())));
            }
            for e in row {
                if e.order() != order {
                    return Err(Error::ModulusMismatch { left: order, right: e.order() });
                }
                entries.push(e);
            }
        }
        Ok(PolyMatrix { rows: n_rows, cols, order, entries })
    }

    /// Builds a matrix of monomials from a shift table, with negative values
    /// marking zero entries.
    pub fn from_shifts(order: usize, shifts: &[Vec<i64>]) -> Result<Self> {
        let rows = shifts
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&s| {
                        if s < 0 {
                            Ok(PolyResidue::zero(order))
                        } else {
                            PolyResidue::from_exponents(order, &[s as usize])
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(order, rows)
    }

    /// Number of block rows `J`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of block columns `L`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Circulant size `N`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, j: usize, i: usize) -> &PolyResidue {
        &self.entries[j * self.cols + i]
    }

    /// Binary parity count `m = J N`.
    pub fn check_length(&self) -> usize {
        self.rows * self.order
    }

    /// Binary block length `n = L N`.
    pub fn block_length(&self) -> usize {
        self.cols * self.order
    }

    pub fn weight_matrix(&self) -> WeightMatrix {
        WeightMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.weight() as u32).collect(),
        }
    }

    /// The full `(J N) x (L N)` binary parity-check matrix.
    pub fn expand(&self) -> SparseBinaryMatrix {
        let n = self.order;
        let mut rows = vec![Vec::new(); self.rows * n];
        for j in 0..self.rows {
            for i in 0..self.cols {
                for s in self.get(j, i).exponents() {
                    for c in 0..n {
                        rows[j * n + (c + s) % n].push(i * n + c);
                    }
                }
            }
        }
        SparseBinaryMatrix::from_row_lists(self.block_length(), rows).expect("indices in range")
    }

    /// `H(x) c(x)^T`, one residue per block row.
    pub fn syndrome(&self, word: &PolyVector) -> Result<Vec<PolyResidue>> {
        if word.len() != self.cols {
            return Err(Error::invalid(format!(
                "word has {} components, matrix has {} columns",
                word.len(),
                self.cols
            )));
        }
        if word.order() != self.order {
            return Err(Error::ModulusMismatch { left: self.order, right: word.order() });
        }
        (0..self.rows)
            .map(|j| {
                let mut acc = PolyResidue::zero(self.order);
                for i in 0..self.cols {
                    let c = word.get(i);
                    if !c.is_zero() && !self.get(j, i).is_zero() {
                        acc.add_assign_unchecked(&self.get(j, i).mul(c)?);
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    pub fn is_codeword(&self, word: &PolyVector) -> Result<bool> {
        Ok(self.syndrome(word)?.iter().all(PolyResidue::is_zero))
    }

    /// Square view made of the given columns, in the order given.
    pub fn select_columns(&self, cols: &[usize]) -> Result<PolyMatrix> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(Error::invalid(format!("column {bad} out of range")));
        }
        let rows = (0..self.rows)
            .map(|j| cols.iter().map(|&i| self.get(j, i).clone()).collect())
            .collect();
        PolyMatrix::new(self.order, rows)
    }

    pub fn to_exponent_table(&self) -> ExponentTable {
        ExponentTable {
            rows: self.rows,
            cols: self.cols,
            order: self.order,
            cells: self.entries.iter().map(|e| e.exponents().collect()).collect(),
        }
    }
}

/// The integer weight matrix (protomatrix) `A = wt(H(x))`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WeightMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl WeightMatrix {
    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(Error::invalid("weight matrix must be nonempty"));
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged weight matrix"));
        }
        Ok(WeightMatrix {
            rows: rows.len(),
            cols,
            entries: rows.concat(),
        })
    }

    pub fn filled(rows: usize, cols: usize, value: u32) -> Self {
        WeightMatrix { rows, cols, entries: vec![value; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, j: usize, i: usize) -> u32 {
        self.entries[j * self.cols + i]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn column_sum(&self, i: usize) -> u64 {
        (0..self.rows).map(|j| self.get(j, i) as u64).sum()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|&e| e as u64).sum()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.cols).map(<[u32]>::to_vec).collect()
    }
}

impl fmt::Display for WeightMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.entries.chunks(self.cols) {
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// A code rate `k/n` kept as written (not reduced).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Rate {
    pub num: u64,
    pub den: u64,
}

impl Rate {
    pub fn same_value(&self, num: u64, den: u64) -> bool {
        self.num as u128 * den as u128 == num as u128 * self.den as u128
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Rate {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s.split_once('/').ok_or_else(|| format!("rate {s:?} is not `k/n`"))?;
        let num = a.trim().parse().map_err(|_| format!("bad rate numerator {a:?}"))?;
        let den: u64 = b.trim().parse().map_err(|_| format!("bad rate denominator {b:?}"))?;
        if den == 0 {
            return Err("rate denominator is zero".into());
        }
        Ok(Rate { num, den })
    }
}

/// Descriptive metadata carried alongside a matrix.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CodeInfo {
    pub standard: Option<String>,
    pub rate: Option<Rate>,
    pub info_length: Option<usize>,
    pub block_length: Option<usize>,
    /// Block columns whose symbols are never transmitted.
    pub punctured: BTreeSet<usize>,
    /// Any other `#key value` lines, kept for lossless round trips.
    pub extra: BTreeMap<String, String>,
}

/// A shift-exponent table: each cell lists the monomials of one entry.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExponentTable {
    rows: usize,
    cols: usize,
    order: usize,
    cells: Vec<Vec<usize>>,
}

/// How exponents are mapped onto a smaller circulant size.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ScaleMode {
    /// `s -> floor(s * N_target / N_base)`
    Proportional,
    /// `s -> s mod N_target`
    Modulo,
}

impl FromStr for ScaleMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "proportional" => Ok(ScaleMode::Proportional),
            "modulo" => Ok(ScaleMode::Modulo),
            _ => Err(format!("unknown scaling mode {s:?}")),
        }
    }
}

impl ExponentTable {
    pub fn new(order: usize, cells: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let cols = cells.first().map_or(0, Vec::len);
        if order == 0 || cells.is_empty() || cols == 0 {
            return Err(Error::invalid("exponent table must be nonempty with N > 0"));
        }
        let rows = cells.len();
        let mut flat = Vec::with_capacity(rows * cols);
        for row in cells {
            if row.len() != cols {
                return Err(Error::invalid("ragged exponent table"));
            }
            for mut cell in row {
                cell.sort_unstable();
                if cell.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::invalid("duplicate exponent in a cell"));
                }
                if cell.last().is_some_and(|&s| s >= order) {
                    return Err(Error::invalid(format!("exponent not below N={order}")));
                }
                flat.push(cell);
            }
        }
        Ok(ExponentTable { rows, cols, order, cells: flat })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cell(&self, j: usize, i: usize) -> &[usize] {
        &self.cells[j * self.cols + i]
    }

    /// Re-derives the table for circulant size `target`. Only empty and
    /// single-exponent cells can be scaled.
    pub fn scale(&self, target: usize, mode: ScaleMode) -> Result<ExponentTable> {
        if target == 0 {
            return Err(Error::invalid("target circulant size must be positive"));
        }
        if target > self.order {
            return Err(Error::invalid(format!(
                "target size {target} exceeds base size {}",
                self.order
            )));
        }
        let cells = self
            .cells
            .iter()
            .map(|cell| match cell.as_slice() {
                [] => Ok(Vec::new()),
                &[s] => Ok(vec![match mode {
                    ScaleMode::Modulo => s % target,
                    ScaleMode::Proportional => s * target / self.order,
                }]),
                _ => Err(Error::Unsupported(format!(
                    "cannot scale a weight-{} cell; scaling is defined on single shifts",
                    cell.len()
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExponentTable { rows: self.rows, cols: self.cols, order: target, cells })
    }

    pub fn to_poly_matrix(&self) -> PolyMatrix {
        let entries = self
            .cells
            .iter()
            .map(|c| PolyResidue::from_exponents(self.order, c).expect("validated cell"))
            .collect();
        PolyMatrix { rows: self.rows, cols: self.cols, order: self.order, entries }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_cell(token: &str, order: usize, line: usize) -> Result<Vec<usize>> {
    if token == "-" || token == "-1" {
        return Ok(Vec::new());
    }
    let mut cell = Vec::new();
    for part in token.split(',') {
        let s: usize = part
            .parse()
            .map_err(|_| parse_err(line, format!("bad exponent {part:?} in cell {token:?}")))?;
        if s >= order {
            return Err(parse_err(line, format!("exponent {s} is not below N={order}")));
        }
        if cell.contains(&s) {
            return Err(parse_err(line, format!("duplicate exponent {s} in cell {token:?}")));
        }
        cell.push(s);
    }
    cell.sort_unstable();
    Ok(cell)
}

fn parse_header(line: &str) -> Result<(usize, usize, usize)> {
    let mut fields: BTreeMap<&str, usize> = BTreeMap::new();
    for tok in line.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(1, format!("header token {tok:?} is not key=value")))?;
        let v: usize = v.parse().map_err(|_| parse_err(1, format!("header value {v:?} is not an integer")))?;
        if !matches!(k, "N" | "J" | "L") || fields.insert(k, v).is_some() {
            return Err(parse_err(1, format!("unexpected header key {k:?}")));
        }
    }
    match (fields.get("N"), fields.get("J"), fields.get("L")) {
        (Some(&n), Some(&j), Some(&l)) if n > 0 && j > 0 && l > 0 => Ok((n, j, l)),
        _ => Err(parse_err(1, "header must be `N=<int> J=<int> L=<int>` with positive values")),
    }
}

fn parse_index_list(value: &str, line: usize) -> Result<BTreeSet<usize>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| parse_err(line, format!("bad column index {s:?}"))))
        .collect()
}

/// Parses `qcmat` text. Errors carry 1-based line numbers.
pub fn parse_qcmat(text: &str) -> Result<(PolyMatrix, CodeInfo)> {
    let table_and_info = parse_qcmat_table(text)?;
    Ok((table_and_info.0.to_poly_matrix(), table_and_info.1))
}

/// Like [`parse_qcmat`] but stops at the exponent table, for scaling.
pub fn parse_qcmat_table(text: &str) -> Result<(ExponentTable, CodeInfo)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let (order, j_rows, l_cols) = parse_header(header)?;
    let mut info = CodeInfo::default();
    let mut cells = Vec::with_capacity(j_rows);
    for (no, line) in lines {
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let meta = meta.trim();
            let (key, value) = match meta.split_once(|c: char| c == '=' || c.is_whitespace()) {
                Some((k, v)) => (k.trim(), v.trim()),
                None => (meta, ""),
            };
            match key {
                "standard" => info.standard = Some(value.to_string()),
                "rate" => info.rate = Some(value.parse().map_err(|e| parse_err(no, e))?),
                "k" => {
                    info.info_length =
                        Some(value.parse().map_err(|_| parse_err(no, format!("bad k {value:?}")))?)
                }
                "n" => {
                    info.block_length =
                        Some(value.parse().map_err(|_| parse_err(no, format!("bad n {value:?}")))?)
                }
                "punctured" => {
                    info.punctured = parse_index_list(value, no)?;
                    if let Some(&bad) = info.punctured.iter().find(|&&c| c >= l_cols) {
                        return Err(parse_err(no, format!("punctured column {bad} is not below L={l_cols}")));
                    }
                }
                "" => return Err(parse_err(no, "empty metadata key")),
                _ => {
                    info.extra.insert(key.to_string(), value.to_string());
                }
            }
            continue;
        }
        if cells.len() == j_rows {
            return Err(parse_err(no, format!("more than J={j_rows} matrix rows")));
        }
        let row = line
            .split_whitespace()
            .map(|tok| parse_cell(tok, order, no))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != l_cols {
            return Err(parse_err(no, format!("row has {} cells, expected L={l_cols}", row.len())));
        }
        cells.push(row);
    }
    if cells.len() != j_rows {
        return Err(parse_err(
            text.lines().count().max(1),
            format!("found {} matrix rows, expected J={j_rows}", cells.len()),
        ));
    }
    if let (Some(r), Some(k), Some(n)) = (info.rate, info.info_length, info.block_length) {
        if !r.same_value(k as u64, n as u64) {
            return Err(parse_err(1, format!("rate {r} disagrees with k={k}, n={n}")));
        }
    }
    let table = ExponentTable::new(order, cells).map_err(|e| parse_err(1, e.to_string()))?;
    Ok((table, info))
}

/// Renders `qcmat` text; [`parse_qcmat`] inverts it exactly.
pub fn render_qcmat(matrix: &PolyMatrix, info: &CodeInfo) -> String {
    render_table(&matrix.to_exponent_table(), info)
}

pub fn render_table(table: &ExponentTable, info: &CodeInfo) -> String {
    let mut out = String::new();
    writeln!(out, "N={} J={} L={}", table.order, table.rows, table.cols).unwrap();
    if let Some(s) = &info.standard {
        writeln!(out, "#standard {s}").unwrap();
    }
    if let Some(r) = info.rate {
        writeln!(out, "#rate {r}").unwrap();
    }
    if let Some(k) = info.info_length {
        writeln!(out, "#k {k}").unwrap();
    }
    if let Some(n) = info.block_length {
        writeln!(out, "#n {n}").unwrap();
    }
    if !info.punctured.is_empty() {
        let cols: Vec<String> = info.punctured.iter().map(usize::to_string).collect();
        writeln!(out, "#punctured {}", cols.join(",")).unwrap();
    }
    for (k, v) in &info.extra {
        writeln!(out, "#{k} {v}").unwrap();
    }
    let rendered: Vec<String> = table
        .cells
        .iter()
        .map(|c| {
            if c.is_empty() {
                "-".to_string()
            } else {
                c.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
            }
        })
        .collect();
    let width = rendered.iter().map(String::len).max().unwrap_or(1);
    for row in rendered.chunks(table.cols) {
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}
