//! CSS codes read off a chain complex, and their logical operators.

use crate::complex::ChainComplex;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, EchelonBasis};

/// A CSS code with optional metacheck matrices.
///
/// Missing metachecks are stored as matrices with zero rows, so `mx · hx = 0`
/// and `mz · hz = 0` hold uniformly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssCode {
    pub hx: BitMatrix,
    pub hz: BitMatrix,
    pub mx: BitMatrix,
    pub mz: BitMatrix,
    pub n: usize,
    pub k: usize,
}

impl CssCode {
    /// Builds a code from check matrices, validating `hx · hzᵀ = 0`.
    pub fn new(hx: BitMatrix, hz: BitMatrix) -> Result<Self> {
        if hx.cols() != hz.cols() {
            return Err(Error::Shape(format!("hx has {} columns, hz has {}", hx.cols(), hz.cols())));
        }
        if !hx.mul(&hz.transpose()).is_zero() {
            return Err(Error::InvalidArgument("hx and hz do not commute".into()));
        }
        let n = hx.cols();
        let k = n - hx.rank() - hz.rank();
        Ok(Self { mx: BitMatrix::zeros(0, hx.rows()), mz: BitMatrix::zeros(0, hz.rows()), hx, hz, n, k })
    }

    pub fn has_metachecks(&self) -> bool {
        self.mx.rows() > 0 || self.mz.rows() > 0
    }
}

/// `H_X = Q_j`, `H_Z = Q_{j+1}ᵀ`, with `M_X = Q_{j-1}` and `M_Z = Q_{j+2}ᵀ` when
/// requested and present.
pub fn css_extract(c: &ChainComplex, j: usize, with_metachecks: bool) -> Result<CssCode> {
    let d = c.length();
    if j < 1 || j + 1 > d {
        return Err(Error::LevelOutOfRange { level: j, min: 1, max: d.saturating_sub(1) });
    }
    let hx = c.boundary(j)?.clone();
    let hz = c.boundary(j + 1)?.transpose();
    let k = c.homology_rank(j)?;
    let mut code = CssCode { mx: BitMatrix::zeros(0, hx.rows()), mz: BitMatrix::zeros(0, hz.rows()), n: hx.cols(), k, hx, hz };
    if with_metachecks {
        if j >= 2 {
            code.mx = c.boundary(j - 1)?.clone();
        }
        if j + 2 <= d {
            code.mz = c.boundary(j + 2)?.transpose();
        }
    }
    Ok(code)
}

/// Logical bases `(Lx, Lz)` with `Lx · Lzᵀ = I`.
///
/// Rows of `Lx` lie in `ker hz` and are independent modulo the row space of
/// `hx`; rows of `Lz` lie in `ker hx` and are independent modulo the row space
/// of `hz`.
pub fn logical_basis(code: &CssCode) -> Result<(BitMatrix, BitMatrix)> {
    if code.k == 0 {
        return Err(Error::TrivialCode);
    }
    let lx = complement_in_kernel(&code.hz, &code.hx);
    let lz = complement_in_kernel(&code.hx, &code.hz);
    if lx.rows() != code.k || lz.rows() != code.k {
        return Err(Error::Internal(format!("found {} / {} logicals, expected {}", lx.rows(), lz.rows(), code.k)));
    }
    let pairing = lx.mul(&lz.transpose());
    let inv = pairing.inverse().ok_or_else(|| Error::Internal("logical pairing is singular".into()))?;
    let lz = inv.transpose().mul(&lz);
    Ok((lx, lz))
}

/// Vectors of `ker(checks)` completing the row space of `stabilizers`.
fn complement_in_kernel(checks: &BitMatrix, stabilizers: &BitMatrix) -> BitMatrix {
    let n = checks.cols();
    let mut span = EchelonBasis::new(n);
    for r in 0..stabilizers.rows() {
        span.insert(&stabilizers.row(r));
    }
    let picked: Vec<_> = checks.kernel_basis().into_iter().filter(|v| span.insert(v)).collect();
    BitMatrix::from_rows(n, &picked)
}
