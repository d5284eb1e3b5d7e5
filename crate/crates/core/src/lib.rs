//! Abelian multi-cycle (AMC) quantum CSS codes.
//!
//! The crate builds multi-block chain complexes from commuting circulant-like
//! blocks, extracts CSS codes from them, computes their parameters, generates
//! syndrome-measurement circuits, samples them under circuit noise and decodes
//! the resulting detector data.
//!
//! All arithmetic is over GF(2), so the alternating signs that appear in the
//! general tensor-product boundary maps vanish everywhere in this crate.

pub mod error;
pub mod complex;
pub mod css;
pub mod analysis;
pub mod gf2;
pub mod group;
pub mod search;
pub mod circuit;
pub mod sim;
pub mod decoder;

pub use error::{Error, Result};
