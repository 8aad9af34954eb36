//! Explicit low-weight codewords from polynomial permanents.
//!
//! For a `(J+1)`-column subset `S`, setting component `i in S` to
//! `perm(H_{S \ i}(x))` and all others to zero gives a codeword: row `j` of
//! the syndrome is the cofactor expansion of a matrix with a repeated row,
//! which vanishes in characteristic 2. Its weight never exceeds the subset's
//! weight-matrix term, so the minimum over subsets refines the bound for the
//! concrete `H(x)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::binary::SparseBinaryMatrix;
use crate::bound::{run_chunked, BoundResult, Fingerprint, SearchOptions, SubsetKernel};
use crate::combinatorics::unrank;
use crate::permanent::perm_poly;
use crate::qc::{render_qcmat, CodeInfo, PolyMatrix};
use crate::ring::{PolyResidue, PolyVector};
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConstructedCodeword {
    pub subset: Vec<usize>,
    pub components: PolyVector,
    pub hamming_weight: usize,
    /// Syndrome checked zero against `H(x)`.
    pub verified: bool,
}

impl ConstructedCodeword {
    /// Checks the expanded binary word against the expanded matrix.
    pub fn verify_binary(&self, h: &SparseBinaryMatrix) -> Result<bool> {
        h.is_codeword(&self.components.to_bits())
    }

    pub fn to_witness(&self) -> Witness {
        Witness::from_vector(Some(self.subset.clone()), &self.components)
    }
}

/// Builds the codeword for `subset`, or `None` if every component vanishes.
pub fn cramer_codeword(h: &PolyMatrix, subset: &[usize]) -> Result<Option<ConstructedCodeword>> {
    if subset.len() != h.rows() + 1 {
        return Err(Error::invalid(format!(
            "subset has {} columns, expected J+1 = {}",
            subset.len(),
            h.rows() + 1
        )));
    }
    if subset.windows(2).any(|w| w[0] >= w[1]) || subset.last().is_some_and(|&c| c >= h.cols()) {
        return Err(Error::invalid(format!("{subset:?} is not an ascending subset of [{}]", h.cols())));
    }
    let mut components = PolyVector::zeros(h.order(), h.cols());
    for (pos, &col) in subset.iter().enumerate() {
        let rest: Vec<usize> = subset.iter().enumerate().filter(|&(p, _)| p != pos).map(|(_, &c)| c).collect();
        components.set(col, perm_poly(&h.select_columns(&rest)?)?)?;
    }
    if components.is_zero() {
        return Ok(None);
    }
    let verified = h.is_codeword(&components)?;
    Ok(Some(ConstructedCodeword {
        subset: subset.to_vec(),
        hamming_weight: components.hamming_weight(),
        components,
        verified,
    }))
}

/// Kernel scoring each subset by the weight of its constructed codeword.
pub struct CramerKernel<'a> {
    matrix: &'a PolyMatrix,
}

impl<'a> CramerKernel<'a> {
    pub fn new(matrix: &'a PolyMatrix) -> Result<Self> {
        if matrix.rows() >= matrix.cols() {
            return Err(Error::invalid(format!(
                "matrix is {}x{}; the construction needs J < L",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(CramerKernel { matrix })
    }
}

impl SubsetKernel for CramerKernel<'_> {
    type Scratch = ();

    fn universe(&self) -> usize {
        self.matrix.cols()
    }

    fn subset_size(&self) -> usize {
        self.matrix.rows() + 1
    }

    fn new_scratch(&self) {}

    fn evaluate(&self, _: &mut (), subset: &[usize]) -> Result<Option<u128>> {
        match cramer_codeword(self.matrix, subset)? {
            None => Ok(None),
            Some(c) if c.verified => Ok(Some(c.hamming_weight as u128)),
            Some(_) => Err(Error::invalid(format!("constructed word for {subset:?} fails the syndrome check"))),
        }
    }

    fn fingerprint(&self) -> Fingerprint {
        Fingerprint {
            kernel: "cramer".into(),
            form: None,
            punctured: Vec::new(),
            matrix: render_qcmat(self.matrix, &CodeInfo::default()),
        }
    }
}

/// Minimum constructed-codeword weight over the first `budget` subset ranks
/// (all of them when `None`), with the witness at the argmin.
pub fn refined_bound(
    h: &PolyMatrix,
    budget: Option<u64>,
    options: &SearchOptions<'_>,
) -> Result<(BoundResult, Option<ConstructedCodeword>)> {
    let kernel = CramerKernel::new(h)?;
    let opts = SearchOptions { budget, ..options.clone() };
    let result = run_chunked(&kernel, &opts)?;
    let witness = match result.argmin_rank {
        Some(r) => cramer_codeword(h, &unrank(r, h.cols(), h.rows() + 1)?)?,
        None => None,
    };
    Ok((result, witness))
}

/// JSON codeword record: per-column exponent lists plus enough context to
/// re-verify independently.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Witness {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<usize>>,
    #[serde(rename = "N")]
    pub order: usize,
    pub components: Vec<Vec<usize>>,
    pub weight: usize,
}

impl Witness {
    pub fn from_vector(subset: Option<Vec<usize>>, v: &PolyVector) -> Self {
        Witness {
            subset,
            order: v.order(),
            components: v.elements().iter().map(|e| e.exponents().collect()).collect(),
            weight: v.hamming_weight(),
        }
    }

    pub fn zero(order: usize, len: usize) -> Self {
        Witness::from_vector(None, &PolyVector::zeros(order, len))
    }

    pub fn to_vector(&self) -> Result<PolyVector> {
        let elements = self
            .components
            .iter()
            .map(|c| PolyResidue::from_exponents(self.order, c))
            .collect::<Result<Vec<_>>>()?;
        PolyVector::new(elements)
    }

    /// Parses witness JSON; `weight` must match the components.
    pub fn from_json(text: &str) -> Result<Self> {
        let w: Witness =
            serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
        let actual = w.to_vector()?.hamming_weight();
        if actual != w.weight {
            return Err(Error::invalid(format!("witness claims weight {} but has {actual}", w.weight)));
        }
        Ok(w)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Checks the word against `h` in both the polynomial and the expanded
    /// binary domain.
    pub fn check(&self, h: &PolyMatrix) -> Result<bool> {
        let v = self.to_vector()?;
        if v.len() != h.cols() || v.order() != h.order() {
            return Err(Error::invalid(format!(
                "witness has {} components over N={}, matrix has L={} over N={}",
                v.len(),
                v.order(),
                h.cols(),
                h.order()
            )));
        }
        let poly = h.is_codeword(&v)?;
        let binary = h.expand().is_codeword(&v.to_bits())?;
        if poly != binary {
            return Err(Error::invalid("polynomial and binary syndromes disagree"));
        }
        Ok(poly)
    }

    pub fn support_columns(&self) -> BTreeSet<usize> {
        self.components.iter().enumerate().filter(|(_, c)| !c.is_empty()).map(|(i, _)| i).collect()
    }
}
