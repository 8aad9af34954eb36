use crate::qc::PolyMatrix;
use crate::ring::PolyResidue;
use crate::{Error, Result};

/// Permanent of a square polynomial matrix over `GF(2)[x]/(x^N - 1)`.
///
/// In characteristic 2 this is also the determinant. Computed by cofactor
/// expansion along the sparsest remaining row, tracking removed rows and
/// columns with masks.
pub fn perm_poly(matrix: &PolyMatrix) -> Result<PolyResidue> {
    let n = matrix.rows();
    if matrix.cols() != n {
        return Err(Error::invalid(format!("{}x{} polynomial matrix is not square", n, matrix.cols())));
    }
    if n > 64 {
        return Err(Error::OrderTooLarge { engine: "poly", order: n, limit: 64 });
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    expand(matrix, full, full)
}

fn expand(m: &PolyMatrix, rows: u64, cols: u64) -> Result<PolyResidue> {
    let order = m.order();
    if rows == 0 {
        return Ok(PolyResidue::one(order));
    }
    if rows.count_ones() == 1 {
        return Ok(m.get(rows.trailing_zeros() as usize, cols.trailing_zeros() as usize).clone());
    }
    let mut pivot = 0;
    let mut best = u32::MAX;
    for r in super::mask_indices(rows) {
        let count = super::mask_indices(cols).into_iter().filter(|&c| !m.get(r, c).is_zero()).count() as u32;
        if count < best {
            best = count;
            pivot = r;
        }
        if count == 0 {
            return Ok(PolyResidue::zero(order));
        }
    }
    let mut total = PolyResidue::zero(order);
    for c in super::mask_indices(cols) {
        let entry = m.get(pivot, c);
        if entry.is_zero() {
            continue;
        }
        let minor = expand(m, rows & !(1 << pivot), cols & !(1 << c))?;
        if !minor.is_zero() {
            total.add_assign_unchecked(&entry.mul(&minor)?);
        }
    }
    Ok(total)
}
