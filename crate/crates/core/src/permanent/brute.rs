use super::{MatrixView, PermanentValue};
use crate::{Error, Result};

/// Largest order the definitional oracle accepts.
pub const BRUTE_MAX_ORDER: usize = 10;

/// Sum over all permutations of the products of selected entries. Meant as
/// a test oracle.
pub fn perm_brute(view: &MatrixView<'_>) -> Result<PermanentValue> {
    let order = view.order();
    if order > BRUTE_MAX_ORDER {
        return Err(Error::OrderTooLarge { engine: "brute", order, limit: BRUTE_MAX_ORDER });
    }
    let m = view.dense();
    let mut total = 0u128;
    let mut perm: Vec<usize> = (0..order).collect();
    // Heap's algorithm, iterative form
    let mut c = vec![0usize; order];
    let product = |p: &[usize]| -> Option<u128> {
        p.iter()
            .enumerate()
            .try_fold(1u128, |acc, (r, &col)| acc.checked_mul(m[r * order + col] as u128))
    };
    let overflow = || Error::Overflow { subset_rank: None };
    total = total.checked_add(product(&perm).ok_or_else(overflow)?).ok_or_else(overflow)?;
    let mut i = 0;
    while i < order {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            let p = product(&perm).ok_or_else(overflow)?;
            total = total.checked_add(p).ok_or_else(overflow)?;
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(PermanentValue(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permanent::IntMatrix;

    #[test]
    fn definition_examples() {
        let m = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(perm_brute(&m.view().unwrap()).unwrap().get(), 10);
        for k in 0..=6 {
            assert_eq!(perm_brute(&IntMatrix::identity(k).view().unwrap()).unwrap().get(), 1);
        }
        let ones = IntMatrix::filled(5, 5, 1);
        assert_eq!(perm_brute(&ones.view().unwrap()).unwrap().get(), 120);
    }

    #[test]
    fn refuses_large_orders() {
        let m = IntMatrix::identity(11);
        assert!(matches!(
            perm_brute(&m.view().unwrap()),
            Err(Error::OrderTooLarge { order: 11, .. })
        ));
    }
}
