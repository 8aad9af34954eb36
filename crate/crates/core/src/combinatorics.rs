//! Lexicographic combinatorial numbering of `k`-subsets of `[L]`.

use crate::{Error, Result};

/// `C(n, k)`, or `None` if it does not fit in a `u64`.
pub fn binomial(n: usize, k: usize) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // stays integral: acc is C(n, i) before the step
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

fn binomial_or_err(n: usize, k: usize) -> Result<u64> {
    binomial(n, k).ok_or_else(|| Error::invalid(format!("C({n}, {k}) exceeds 64 bits")))
}

fn check_subset(members: &[usize], universe: usize) -> Result<()> {
    if members.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(format!("{members:?} is not strictly ascending")));
    }
    if members.last().is_some_and(|&m| m >= universe) {
        return Err(Error::invalid(format!("{members:?} is not a subset of [{universe}]")));
    }
    Ok(())
}

/// Position of `members` among the `|members|`-subsets of `[universe]` in
/// lexicographic order.
pub fn rank(members: &[usize], universe: usize) -> Result<u64> {
    check_subset(members, universe)?;
    let k = members.len();
    binomial_or_err(universe, k)?;
    let mut r = 0u64;
    let mut next_free = 0;
    for (i, &m) in members.iter().enumerate() {
        for skipped in next_free..m {
            r += binomial_or_err(universe - skipped - 1, k - i - 1)?;
        }
        next_free = m + 1;
    }
    Ok(r)
}

/// The `k`-subset of `[universe]` with lexicographic position `r`, found
/// without enumerating its predecessors.
pub fn unrank(mut r: u64, universe: usize, k: usize) -> Result<Vec<usize>> {
    let total = binomial_or_err(universe, k)?;
    if r >= total {
        return Err(Error::invalid(format!("rank {r} is not below C({universe}, {k}) = {total}")));
    }
    let mut members = Vec::with_capacity(k);
    let mut candidate = 0;
    for i in 0..k {
        loop {
            let block = binomial_or_err(universe - candidate - 1, k - i - 1)?;
            if r < block {
                members.push(candidate);
                candidate += 1;
                break;
            }
            r -= block;
            candidate += 1;
        }
    }
    Ok(members)
}

/// A position in the lexicographic sequence of `k`-subsets of `[universe]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubsetCursor {
    universe: usize,
    rank: u64,
    members: Vec<usize>,
}

impl SubsetCursor {
    pub fn at(rank: u64, universe: usize, k: usize) -> Result<Self> {
        Ok(SubsetCursor { universe, rank, members: unrank(rank, universe, k)? })
    }

    pub fn from_members(members: Vec<usize>, universe: usize) -> Result<Self> {
        Ok(SubsetCursor { universe, rank: rank(&members, universe)?, members })
    }

    pub fn rank(&self) -> u64 {
        self.rank
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Steps to the lexicographic successor. Returns `false`, leaving the
    /// cursor unchanged, at the last subset.
    pub fn advance(&mut self) -> bool {
        let k = self.members.len();
        let Some(i) = (0..k).rev().find(|&i| self.members[i] < self.universe - k + i) else {
            return false;
        };
        self.members[i] += 1;
        for j in i + 1..k {
            self.members[j] = self.members[j - 1] + 1;
        }
        self.rank += 1;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 3), Some(10));
        assert_eq!(binomial(24, 13), Some(2_496_144));
        assert_eq!(binomial(24, 7), Some(346_104));
        assert_eq!(binomial(16, 9), Some(11_440));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(0, 0), Some(1));
        assert_eq!(binomial(68, 34), None);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&[0, 1, 2], 5).unwrap(), 0);
        assert_eq!(rank(&[2, 3, 4], 5).unwrap(), 9);
        // lexicographic list of 3-subsets of [5]:
        // 012 013 014 023 024 034 123 124 134 234
        assert_eq!(rank(&[0, 2, 4], 5).unwrap(), 4);
        assert!(rank(&[2, 1], 5).is_err());
        assert!(rank(&[1, 5], 5).is_err());
    }

    #[test]
    fn unrank_examples() {
        assert_eq!(unrank(0, 5, 3).unwrap(), vec![0, 1, 2]);
        assert_eq!(unrank(9, 5, 3).unwrap(), vec![2, 3, 4]);
        assert!(unrank(10, 5, 3).is_err());
        assert_eq!(unrank(0, 4, 0).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn cursor_walk() {
        let mut c = SubsetCursor::at(7, 5, 3).unwrap();
        assert_eq!(c.members(), &[1, 2, 4]);
        assert!(c.advance());
        assert_eq!((c.rank(), c.members()), (8, &[1, 3, 4][..]));
        assert!(c.advance());
        assert!(!c.advance());
        assert_eq!((c.rank(), c.members()), (9, &[2, 3, 4][..]));
    }
}
