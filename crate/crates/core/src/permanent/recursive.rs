use super::{MatrixView, PermanentValue};
use crate::{Error, Result};

/// Cofactor (Laplace) expansion on a masked view.
///
/// Each level expands along the active row with the fewest nonzero entries
/// (lowest index on ties) and returns zero at once if that row is empty.
/// Removed rows and columns are tracked by clearing mask bits in `view`;
/// the masks are restored before returning, including on error.
pub fn perm_recursive(view: &mut MatrixView<'_>) -> Result<PermanentValue> {
    expand(view).map(PermanentValue)
}

fn expand(view: &mut MatrixView<'_>) -> Result<u128> {
    let base = view.base;
    match view.rows.count_ones() {
        0 => return Ok(1),
        1 => {
            let r = view.rows.trailing_zeros() as usize;
            let c = view.cols.trailing_zeros() as usize;
            return Ok(base.get(r, c) as u128);
        }
        _ => {}
    }

    let mut pivot = usize::MAX;
    let mut pivot_count = u32::MAX;
    let mut rows = view.rows;
    while rows != 0 {
        let r = rows.trailing_zeros() as usize;
        rows &= rows - 1;
        let mut count = 0;
        let mut cols = view.cols;
        while cols != 0 {
            let c = cols.trailing_zeros() as usize;
            cols &= cols - 1;
            count += (base.get(r, c) != 0) as u32;
        }
        if count < pivot_count {
            pivot = r;
            pivot_count = count;
            if count == 0 {
                return Ok(0);
            }
        }
    }

    let row_bit = 1u64 << pivot;
    view.rows &= !row_bit;
    let mut total = 0u128;
    let mut cols = view.cols;
    let mut outcome = Ok(());
    while cols != 0 {
        let c = cols.trailing_zeros() as usize;
        cols &= cols - 1;
        let a = base.get(pivot, c) as u128;
        if a == 0 {
            continue;
        }
        view.cols &= !(1u64 << c);
        let sub = expand(view);
        view.cols |= 1u64 << c;
        match sub.and_then(|s| {
            s.checked_mul(a)
                .and_then(|t| total.checked_add(t))
                .ok_or(Error::Overflow { subset_rank: None })
        }) {
            Ok(t) => total = t,
            Err(e) => {
                outcome = Err(e);
                break;
            }
        }
    }
    view.rows |= row_bit;
    outcome.map(|()| total)
}
