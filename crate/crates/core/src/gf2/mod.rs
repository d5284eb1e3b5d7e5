//! Linear algebra over GF(2): packed vectors and matrices, polynomials,
//! sparse text formats and exhaustive minimum-weight search.

mod bitvec;
mod codeword;
mod echelon;
pub mod io;
mod matrix;
mod poly;

pub use bitvec::BitVec;
pub use codeword::min_weight_codeword;
pub use echelon::EchelonBasis;
pub use matrix::BitMatrix;
pub use poly::{bezout, poly_gcd, poly_gcd_all, Gf2Poly};
