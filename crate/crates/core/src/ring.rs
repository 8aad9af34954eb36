//! Arithmetic in `GF(2)[x]/(x^N - 1)` and its isomorphism with `N x N`
//! binary circulant matrices.
//!
//! A residue is identified with the circulant whose left-most column, read
//! top to bottom, gives the coefficients in order of increasing degree. Under
//! this map `1` is the identity and `x` is the identity shifted down by one
//! row.

use std::fmt;

use crate::binary::BinaryMatrix;
use crate::{Error, Result};

const WORD: usize = 64;

/// An element of `GF(2)[x]/(x^N - 1)`, coefficients packed into words.
///
/// Bits at positions `>= N` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyResidue {
    order: usize,
    words: Vec<u64>,
}

impl PolyResidue {
    pub fn zero(order: usize) -> Self {
        assert!(order > 0, "modulus order must be positive");
        PolyResidue {
            order,
            words: vec![0; order.div_ceil(WORD)],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(order, 0)
    }

    /// `x^s`, with `s` reduced modulo `N`.
    pub fn monomial(order: usize, s: usize) -> Self {
        let mut p = Self::zero(order);
        p.toggle(s % order);
        p
    }

    /// Sum of distinct monomials. Exponents must lie in `[0, N)` and must not
    /// repeat.
    pub fn from_exponents(order: usize, exponents: &[usize]) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("modulus order must be positive"));
        }
        let mut p = Self::zero(order);
        for &s in exponents {
            if s >= order {
                return Err(Error::invalid(format!("exponent {s} is not below N={order}")));
            }
            if p.coefficient(s) {
                return Err(Error::invalid(format!("exponent {s} repeated")));
            }
            p.toggle(s);
        }
        Ok(p)
    }

    /// The residue whose coefficient of `x^s` is `column[s]`; `column` is the
    /// left-most column of the corresponding circulant.
    pub fn from_column(column: &[bool]) -> Result<Self> {
        if column.is_empty() {
            return Err(Error::invalid("empty circulant column"));
        }
        let mut p = Self::zero(column.len());
        for (s, &bit) in column.iter().enumerate() {
            if bit {
                p.toggle(s);
            }
        }
        Ok(p)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coefficient(&self, s: usize) -> bool {
        assert!(s < self.order);
        self.words[s / WORD] >> (s % WORD) & 1 == 1
    }

    fn toggle(&mut self, s: usize) {
        self.words[s / WORD] ^= 1 << (s % WORD);
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Exponents with nonzero coefficient, ascending.
    pub fn exponents(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * WORD + bit)
            })
        })
    }

    pub fn to_column(&self) -> Vec<bool> {
        (0..self.order).map(|s| self.coefficient(s)).collect()
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::ModulusMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other);
        Ok(out)
    }

    pub(crate) fn add_assign_unchecked(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Product modulo `x^N - 1`, computed by XOR-ing rotations of the heavier
    /// operand over the support of the lighter one.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let (light, heavy) = if self.weight() <= other.weight() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = Self::zero(self.order);
        let mut scratch = Self::zero(self.order);
        for s in light.exponents() {
            heavy.rotate_into(s, &mut scratch);
            out.add_assign_unchecked(&scratch);
        }
        Ok(out)
    }

    /// Multiplication by `x^t`: a cyclic shift of the coefficient sequence.
    pub fn shift(&self, t: usize) -> Self {
        let mut out = Self::zero(self.order);
        self.rotate_into(t % self.order, &mut out);
        out
    }

    fn rotate_into(&self, t: usize, out: &mut Self) {
        debug_assert!(t < self.order);
        out.words.iter_mut().for_each(|w| *w = 0);
        if t == 0 {
            out.words.copy_from_slice(&self.words);
            return;
        }
        // x^t * a = (a << t) | (a >> (N - t)), truncated to N bits
        shl_or(&self.words, t, &mut out.words);
        shr_or(&self.words, self.order - t, &mut out.words);
        let tail = self.order % WORD;
        if tail != 0 {
            *out.words.last_mut().unwrap() &= (1u64 << tail) - 1;
        }
    }

    /// The `N x N` circulant: entry `(r, c)` is the coefficient of
    /// `x^((r - c) mod N)`.
    pub fn circulant(&self) -> BinaryMatrix {
        let n = self.order;
        let mut m = BinaryMatrix::zeros(n, n);
        for s in self.exponents() {
            for c in 0..n {
                m.set((c + s) % n, c, true);
            }
        }
        m
    }

    /// Sorted exponent list such as `0,2`, or `-` for zero.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "-".to_string();
        }
        self.exponents()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn shl_or(src: &[u64], t: usize, dst: &mut [u64]) {
    let (w, b) = (t / WORD, t % WORD);
    for i in (w..dst.len()).rev() {
        let mut v = src[i - w] << b;
        if b != 0 && i > w {
            v |= src[i - w - 1] >> (WORD - b);
        }
        dst[i] |= v;
    }
}

fn shr_or(src: &[u64], t: usize, dst: &mut [u64]) {
    let (w, b) = (t / WORD, t % WORD);
    for i in 0..dst.len().saturating_sub(w) {
        let mut v = src[i + w] >> b;
        if b != 0 && i + w + 1 < src.len() {
            v |= src[i + w + 1] << (WORD - b);
        }
        dst[i] |= v;
    }
}

impl fmt::Debug for PolyResidue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyResidue(N={}, {})", self.order, self.render())
    }
}

impl fmt::Display for PolyResidue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .exponents()
            .map(|s| match s {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{s}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// A length-`L` vector of residues sharing one modulus, e.g. a codeword split
/// into its `N`-bit subblocks.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyVector {
    order: usize,
    elements: Vec<PolyResidue>,
}

impl PolyVector {
    pub fn new(elements: Vec<PolyResidue>) -> Result<Self> {
        let order = elements
            .first()
            .map(PolyResidue::order)
            .ok_or_else(|| Error::invalid("empty polynomial vector"))?;
        if let Some(bad) = elements.iter().find(|e| e.order() != order) {
            return Err(Error::ModulusMismatch {
                left: order,
                right: bad.order(),
            });
        }
        Ok(PolyVector { order, elements })
    }

    pub fn zeros(order: usize, len: usize) -> Self {
        PolyVector {
            order,
            elements: vec![PolyResidue::zero(order); len],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PolyResidue] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &PolyResidue {
        &self.elements[i]
    }

    pub fn set(&mut self, i: usize, value: PolyResidue) -> Result<()> {
        if value.order() != self.order {
            return Err(Error::ModulusMismatch {
                left: self.order,
                right: value.order(),
            });
        }
        self.elements[i] = value;
        Ok(())
    }

    /// Sum of component weights.
    pub fn hamming_weight(&self) -> usize {
        self.elements.iter().map(PolyResidue::weight).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.elements.iter().all(PolyResidue::is_zero)
    }

    /// Every component multiplied by `x^t`.
    pub fn shift(&self, t: usize) -> Self {
        PolyVector {
            order: self.order,
            elements: self.elements.iter().map(|e| e.shift(t)).collect(),
        }
    }

    /// Concatenated coefficient sequences: the binary word of length `L*N`.
    pub fn to_bits(&self) -> Vec<bool> {
        self.elements.iter().flat_map(PolyResidue::to_column).collect()
    }

    pub fn from_bits(order: usize, bits: &[bool]) -> Result<Self> {
        if order == 0 || !bits.len().is_multiple_of(order) || bits.is_empty() {
            return Err(Error::invalid(format!(
                "{} bits do not split into subblocks of {order}",
                bits.len()
            )));
        }
        PolyVector::new(
            bits.chunks(order)
                .map(PolyResidue::from_column)
                .collect::<Result<_>>()?,
        )
    }
}
