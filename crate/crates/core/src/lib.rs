//! Upper bounds on the minimum Hamming distance of quasi-cyclic LDPC codes.
//!
//! A QC-LDPC code is described by a `J x L` polynomial parity-check matrix
//! `H(x)` over `GF(2)[x]/(x^N - 1)`. The minimum distance of any such code is
//! bounded above by
//!
//! ```text
//! d_min <= min*_{|S| = J+1}  sum_{i in S} perm(A_{S \ i})
//! ```
//!
//! where `A` is the integer weight matrix of `H(x)` and `min*` skips zero
//! terms. The crate provides the ring arithmetic, the matrix model and file
//! formats, several exact permanent engines, a resumable parallel search over
//! all `(J+1)`-column subsets, and an explicit codeword construction that
//! turns the bound into verified witnesses.

pub mod binary;
pub mod bound;
pub mod combinatorics;
pub mod construct;
mod error;
pub mod permanent;
pub mod qc;
pub mod ring;

pub use error::{Error, Result};
