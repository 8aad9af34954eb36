use num_bigint::BigInt;

use super::{MatrixView, PermanentValue};
use crate::{Error, Result};

pub const RYSER_MAX_ORDER: usize = 63;

/// Inclusion-exclusion variants.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RyserVariant {
    /// Every column subset with row sums recomputed from scratch.
    Standard,
    /// Subsets in Gray-code order; each step adds or removes one column.
    Gray,
    /// Gray-coded over the first `n - 1` columns with the last column folded
    /// into shifted row sums, halving the number of subsets.
    NijenhuisWilf,
}

/// Ryser's formula
/// `perm(A) = (-1)^n sum_{S} (-1)^{|S|} prod_i sum_{j in S} a_ij`.
pub fn perm_ryser(view: &MatrixView<'_>, variant: RyserVariant) -> Result<PermanentValue> {
    let n = view.order();
    if n > RYSER_MAX_ORDER {
        return Err(Error::OrderTooLarge { engine: "ryser", order: n, limit: RYSER_MAX_ORDER });
    }
    if n == 0 {
        return Ok(PermanentValue::ONE);
    }
    let a: Vec<i128> = view.dense().into_iter().map(|v| v as i128).collect();
    let row_totals: Vec<i128> = a.chunks(n).map(|r| r.iter().sum()).collect();
    if row_totals.contains(&0) {
        return Ok(PermanentValue::ZERO);
    }
    // every intermediate row sum is bounded by its row total in magnitude
    let fast = row_totals
        .iter()
        .try_fold(1i128, |acc, &t| acc.checked_mul(t))
        .is_some_and(|b| b <= i64::MAX as i128);
    let signed = match (variant, fast) {
        (RyserVariant::Standard, true) => standard::<true>(&a, n),
        (RyserVariant::Standard, false) => standard::<false>(&a, n),
        (RyserVariant::Gray, true) => gray::<true>(&a, n),
        (RyserVariant::Gray, false) => gray::<false>(&a, n),
        (RyserVariant::NijenhuisWilf, true) => nijenhuis_wilf::<true>(&a, n, &row_totals),
        (RyserVariant::NijenhuisWilf, false) => nijenhuis_wilf::<false>(&a, n, &row_totals),
    }?;
    u128::try_from(signed)
        .map(PermanentValue)
        .map_err(|_| Error::Overflow { subset_rank: None })
}

#[inline]
fn overflow() -> Error {
    Error::Overflow { subset_rank: None }
}

#[inline]
fn row_product<const FAST: bool>(sums: &[i128]) -> Result<i128> {
    if FAST {
        let mut p: i64 = 1;
        for &s in sums {
            p *= s as i64;
            if p == 0 {
                break;
            }
        }
        Ok(p as i128)
    } else {
        let mut p: i128 = 1;
        for &s in sums {
            p = p.checked_mul(s).ok_or_else(overflow)?;
            if p == 0 {
                break;
            }
        }
        Ok(p)
    }
}

#[inline]
fn accumulate<const FAST: bool>(total: i128, term: i128, negative: bool) -> Result<i128> {
    if FAST {
        // at most 2^63 terms of magnitude below 2^63
        Ok(if negative { total - term } else { total + term })
    } else if negative {
        total.checked_sub(term).ok_or_else(overflow)
    } else {
        total.checked_add(term).ok_or_else(overflow)
    }
}

fn standard<const FAST: bool>(a: &[i128], n: usize) -> Result<i128> {
    let mut sums = vec![0i128; n];
    let mut total = 0i128;
    for subset in 1u64..(1u64 << n) {
        for (r, s) in sums.iter_mut().enumerate() {
            let row = &a[r * n..(r + 1) * n];
            let mut acc = 0i128;
            let mut m = subset;
            while m != 0 {
                acc += row[m.trailing_zeros() as usize];
                m &= m - 1;
            }
            *s = acc;
        }
        let negative = (n - subset.count_ones() as usize) % 2 == 1;
        total = accumulate::<FAST>(total, row_product::<FAST>(&sums)?, negative)?;
    }
    Ok(total)
}

fn gray<const FAST: bool>(a: &[i128], n: usize) -> Result<i128> {
    let mut sums = vec![0i128; n];
    let mut total = 0i128;
    let mut code = 0u64;
    for k in 1u64..(1u64 << n) {
        let j = k.trailing_zeros() as usize;
        code ^= 1 << j;
        let added = code >> j & 1 == 1;
        for (r, s) in sums.iter_mut().enumerate() {
            let v = a[r * n + j];
            if added {
                *s += v;
            } else {
                *s -= v;
            }
        }
        let negative = (n - code.count_ones() as usize) % 2 == 1;
        total = accumulate::<FAST>(total, row_product::<FAST>(&sums)?, negative)?;
    }
    Ok(total)
}

/// Works with doubled row sums `2 a_{i,n-1} - sum_j a_ij + 2 sum_{j in S} a_ij`
/// so everything stays integral; the result is divided by `2^(n-1)` at the end.
fn nijenhuis_wilf<const FAST: bool>(a: &[i128], n: usize, row_totals: &[i128]) -> Result<i128> {
    let last = n - 1;
    let mut sums: Vec<i128> = (0..n).map(|r| 2 * a[r * n + last] - row_totals[r]).collect();
    let mut total = row_product::<FAST>(&sums)?;
    let mut code = 0u64;
    for k in 1u64..(1u64 << last) {
        let j = k.trailing_zeros() as usize;
        code ^= 1 << j;
        let added = code >> j & 1 == 1;
        for (r, s) in sums.iter_mut().enumerate() {
            let v = 2 * a[r * n + j];
            if added {
                *s += v;
            } else {
                *s -= v;
            }
        }
        let negative = code.count_ones() % 2 == 1;
        total = accumulate::<FAST>(total, row_product::<FAST>(&sums)?, negative)?;
    }
    let scale = 1i128 << last;
    debug_assert_eq!(total % scale, 0);
    let value = total / scale;
    Ok(if last % 2 == 1 { -value } else { value })
}

/// Gray-coded Ryser in wrapping `u128` arithmetic, exact whenever the
/// permanent is below `2^128`. Returns `None` unless the bound
/// `min(prod row totals, prod column totals)` guarantees that.
pub(crate) fn perm_ryser_wrapping(view: &MatrixView<'_>) -> Option<PermanentValue> {
    let n = view.order();
    if n == 0 || n > RYSER_MAX_ORDER {
        return None;
    }
    let a: Vec<u128> = view.dense().into_iter().map(|v| v as u128).collect();
    let product = |totals: Vec<u128>| totals.into_iter().try_fold(1u128, |acc, t| acc.checked_mul(t));
    let rows = product(a.chunks(n).map(|r| r.iter().sum()).collect());
    let cols = product((0..n).map(|c| (0..n).map(|r| a[r * n + c]).sum()).collect());
    rows.or(cols)?;
    let mut sums = vec![0u128; n];
    let mut total = 0u128;
    let mut code = 0u64;
    for k in 1u64..(1u64 << n) {
        let j = k.trailing_zeros() as usize;
        code ^= 1 << j;
        let added = code >> j & 1 == 1;
        for (r, s) in sums.iter_mut().enumerate() {
            // partial row sums stay within the row total
            if added {
                *s += a[r * n + j];
            } else {
                *s -= a[r * n + j];
            }
        }
        let term = sums.iter().fold(1u128, |acc, &s| acc.wrapping_mul(s));
        if (n - code.count_ones() as usize) % 2 == 1 {
            total = total.wrapping_sub(term);
        } else {
            total = total.wrapping_add(term);
        }
    }
    Some(PermanentValue(total))
}

/// Every permutation term is nonnegative, so one greedy term, or
/// `n! * min^n` when all entries are positive, bounds the permanent below.
fn exceeds_u128_from_below(a: &[u128], n: usize) -> bool {
    let mut used = vec![false; n];
    let mut greedy = Some(1u128);
    for row in a.chunks(n) {
        let (c, &v) = row.iter().enumerate().filter(|(c, _)| !used[*c]).max_by_key(|(_, &v)| v).unwrap();
        used[c] = true;
        greedy = greedy.and_then(|g| g.checked_mul(v));
    }
    if greedy.is_none() {
        return true;
    }
    let min = a.iter().copied().min().unwrap_or(0);
    min > 0 && (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k)?.checked_mul(min)).is_none()
}

/// Gray-coded Ryser over arbitrary-precision integers. Exact for any
/// value; `Overflow` only when the permanent itself exceeds `u128`.
pub(crate) fn perm_ryser_exact(view: &MatrixView<'_>) -> Result<PermanentValue> {
    let n = view.order();
    if n == 0 {
        return Ok(PermanentValue(1));
    }
    if n > RYSER_MAX_ORDER {
        return Err(Error::Overflow { subset_rank: None });
    }
    let a: Vec<u128> = view.dense().into_iter().map(|v| v as u128).collect();
    if exceeds_u128_from_below(&a, n) {
        return Err(Error::Overflow { subset_rank: None });
    }
    let mut sums = vec![0u128; n];
    let mut total = BigInt::ZERO;
    let mut code = 0u64;
    for k in 1u64..(1u64 << n) {
        let j = k.trailing_zeros() as usize;
        code ^= 1 << j;
        let added = code >> j & 1 == 1;
        for (r, s) in sums.iter_mut().enumerate() {
            if added {
                *s += a[r * n + j];
            } else {
                *s -= a[r * n + j];
            }
        }
        if sums.contains(&0) {
            continue;
        }
        // multiply in u128 while it fits, then widen
        let mut small = 1u128;
        let mut big: Option<BigInt> = None;
        for &s in &sums {
            match &mut big {
                Some(b) => *b *= s,
                None => match small.checked_mul(s) {
                    Some(v) => small = v,
                    None => big = Some(BigInt::from(small) * s),
                },
            }
        }
        let term = big.unwrap_or_else(|| BigInt::from(small));
        if (n - code.count_ones() as usize) % 2 == 1 {
            total -= term;
        } else {
            total += term;
        }
    }
    u128::try_from(&total).map(PermanentValue).map_err(|_| Error::Overflow { subset_rank: None })
}
