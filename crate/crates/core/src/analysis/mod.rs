//! Code parameters: closed-form rank and dimension formulas, distance bounds
//! and computed distances.

mod confine;
mod distance;

pub use confine::{confinement_profile, confinement_profile_matrix, MAX_CONFINEMENT_CHECKS};
pub use distance::{DistanceMethod, DistanceValue, LogicalSearch, MAX_LOGICALS};

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::complex::{amc_build, binomial, ChainComplex};
use crate::css::{css_extract, logical_basis, CssCode};
use crate::error::{Error, Result};
use crate::gf2::{min_weight_codeword, poly_gcd_all, BitMatrix, BitVec, Gf2Poly};
use crate::group::{AbelianGroup, GroupAlgebraElement};

/// `h = gcd(a_1, …, a_D, x^ℓ − 1)` and `κ = deg h`.
pub fn characteristic_poly(elements: &[Gf2Poly], l: usize) -> Result<(Gf2Poly, usize)> {
    if elements.is_empty() || elements.iter().all(Gf2Poly::is_zero) {
        return Err(Error::InvalidArgument("characteristic polynomial needs a nonzero element".into()));
    }
    let modulus = Gf2Poly::cyclic_modulus(l);
    let h = poly_gcd_all(elements.iter().chain(std::iter::once(&modulus)))?;
    let kappa = h.degree().expect("gcd of nonzero polynomials is nonzero");
    Ok((h, kappa))
}

/// Rank of `Q_j` in a cyclic D-complex: `C(D−1, j−1)(ℓ − κ)`.
pub fn predicted_rank(d: usize, j: usize, l: usize, kappa: usize) -> Result<usize> {
    if j < 1 || j > d {
        return Err(Error::LevelOutOfRange { level: j, min: 1, max: d });
    }
    Ok(binomial(d - 1, j - 1) * (l - kappa))
}

/// `κ = ℓ − rank Q_D` for a complex over a group of odd order, checking
/// `rank Q_j = C(D−1, j−1) rank Q_D` at every level.
pub fn semisimple_kappa(c: &ChainComplex, group: &AbelianGroup) -> Result<usize> {
    let l = group.order();
    if l % 2 == 0 {
        return Err(Error::InvalidArgument(format!("group order {l} is even: not semisimple; use characteristic_poly or direct ranks")));
    }
    let d = c.length();
    if c.dims()[0] != l {
        return Err(Error::Shape(format!("complex has n_0 = {}, group order {l}", c.dims()[0])));
    }
    let rank_d = c.boundary_rank(d);
    for j in 1..=d {
        let expected = binomial(d - 1, j - 1) * rank_d;
        let got = c.boundary_rank(j);
        if got != expected {
            return Err(Error::Internal(format!("rank Q_{j} = {got}, expected {expected}")));
        }
    }
    Ok(l - rank_d)
}

/// Parameters of the level-`j` code of the D-fold tensor power of a
/// classical `[n, k, d]` code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QhpParams {
    pub n: usize,
    pub k: usize,
    /// Homological distance `d^j`.
    pub d_homological: DistanceValue,
    /// Co-homological distance `d^{D−j}`.
    pub d_cohomological: DistanceValue,
    pub distance: DistanceValue,
}

pub fn qhp_params(dim: usize, j: usize, n: usize, k: usize, d: usize) -> Result<QhpParams> {
    if j > dim {
        return Err(Error::LevelOutOfRange { level: j, min: 0, max: dim });
    }
    let c = binomial(dim, j);
    let big_k = c * k.pow(dim as u32);
    let pow = |e: usize| {
        if big_k == 0 {
            DistanceValue::Infinite
        } else {
            DistanceValue::Exact { value: d.pow(e as u32) }
        }
    };
    let (dh, dc) = (pow(j), pow(dim - j));
    Ok(QhpParams { n: c * n.pow(dim as u32), k: big_k, d_homological: dh, d_cohomological: dc, distance: dh.min(dc) })
}

/// Minimum weight of the cyclic code with check polynomial `h`, i.e. the code
/// spanned by the shifts of `(x^ℓ − 1)/h`.
pub fn distance_upper_bound(h: &Gf2Poly, l: usize) -> Result<usize> {
    let modulus = Gf2Poly::cyclic_modulus(l);
    if h.is_zero() || !h.divides(&modulus) {
        return Err(Error::InvalidArgument(format!("{h} does not divide x^{l}-1")));
    }
    let (g, _) = modulus.divrem(h);
    let dim = h.degree().expect("nonzero");
    let rows: Vec<BitVec> = (0..dim).map(|i| BitVec::from_indices(l, g.shifted(i).exponents())).collect();
    let gen = BitMatrix::from_rows(l, &rows);
    let (w, _) = min_weight_codeword(&gen, l)?.expect("every codeword has weight at most l");
    Ok(w)
}

/// Distances of a CSS code: `dz` over `ker hx` modulo the row space of `hz`,
/// `dx` over `ker hz` modulo the row space of `hx`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CssDistance {
    pub dz: DistanceValue,
    pub dx: DistanceValue,
}

impl CssDistance {
    pub fn d(&self) -> DistanceValue {
        self.dz.min(self.dx)
    }
}

/// The two searches underlying [`min_distance`].
pub fn css_searches(code: &CssCode) -> Result<(LogicalSearch, LogicalSearch)> {
    let (lx, lz) = logical_basis(code)?;
    Ok((LogicalSearch::new(&code.hx, &lx)?, LogicalSearch::new(&code.hz, &lz)?))
}

pub fn min_distance(code: &CssCode, method: DistanceMethod) -> Result<CssDistance> {
    let (z, x) = css_searches(code)?;
    Ok(CssDistance { dz: z.distance(method), dx: x.distance(method) })
}

/// Minimum weight of a nonzero syndrome over both check matrices; `None` if
/// every nonzero syndrome is heavier than `cap` (or both matrices are zero).
pub fn syndrome_distance(hx: &BitMatrix, hz: &BitMatrix, cap: usize) -> Result<Option<usize>> {
    let mut best: Option<usize> = None;
    for h in [hx, hz] {
        if h.is_zero() {
            continue;
        }
        if let Some((w, _)) = min_weight_codeword(&h.transpose(), cap)? {
            best = Some(best.map_or(w, |b| b.min(w)));
        }
    }
    Ok(best)
}

/// One row of a parameter table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeParams {
    pub group: String,
    pub elements: Vec<String>,
    pub n: usize,
    pub k: usize,
    pub d: DistanceValue,
    pub d_upper: Option<usize>,
    pub d_syndrome: Option<usize>,
    pub kappa: Option<usize>,
    pub h: Option<String>,
    pub confinement: Vec<Option<usize>>,
}

impl CodeParams {
    pub const CSV_HEADER: &'static str = "ell,n,k,d,d_S,a_1,a_2,a_3,a_4,confin";

    /// CSV row: `ℓ, n, k, d, d_S, a_1..a_4, confinement`, confinement quoted
    /// and truncated after the last weight with an irreducible error.
    pub fn csv_row(&self) -> String {
        let mut out = String::new();
        let ell = self.group.trim_start_matches('C');
        let _ = write!(out, "{},{},{},{},{}", ell, self.n, self.k, self.d, self.d_syndrome.map_or("-".into(), |v| v.to_string()));
        for i in 0..4 {
            let _ = write!(out, ",{}", self.elements.get(i).map_or("", String::as_str));
        }
        let _ = write!(out, ",\"{}\"", confinement_string(&self.confinement));
        out
    }
}

/// `4,4,4,6`-style text, dropping trailing weights without irreducible errors.
pub fn confinement_string(profile: &[Option<usize>]) -> String {
    let last = profile.iter().rposition(Option::is_some).map_or(0, |i| i + 1);
    profile[..last].iter().map(|v| v.map_or("-".to_string(), |x| x.to_string())).collect::<Vec<_>>().join(",")
}

/// What [`code_params`] computes beyond `n` and `k`.
#[derive(Clone, Copy, Debug)]
pub struct ParamOptions {
    pub method: DistanceMethod,
    /// Cap for the syndrome-distance search.
    pub syndrome_cap: usize,
    /// Largest error weight in the confinement profile; 0 skips it.
    pub confinement_w: usize,
}

impl Default for ParamOptions {
    fn default() -> Self {
        Self { method: DistanceMethod::default(), syndrome_cap: 8, confinement_w: 0 }
    }
}

/// Parameters of the level-`j` code of `AMC(elements)`.
pub fn code_params(group: &AbelianGroup, elements: &[GroupAlgebraElement], level: usize, opts: &ParamOptions) -> Result<CodeParams> {
    let complex = amc_build(group, elements)?;
    let code = css_extract(&complex, level, false)?;
    let d = if code.k == 0 { DistanceValue::Infinite } else { min_distance(&code, opts.method)?.d() };
    let (h, kappa, d_upper) = match elements.iter().map(GroupAlgebraElement::to_poly).collect::<Option<Vec<_>>>() {
        Some(polys) => {
            let (h, kappa) = characteristic_poly(&polys, group.order())?;
            let bound = if kappa > 0 { Some(distance_upper_bound(&h, group.order())?) } else { None };
            (Some(h.to_string()), Some(kappa), bound)
        }
        None if group.order() % 2 == 1 => (None, Some(semisimple_kappa(&complex, group)?), None),
        None => (None, None, None),
    };
    let confinement = if opts.confinement_w > 0 { confinement_profile(&code, opts.confinement_w)? } else { Vec::new() };
    Ok(CodeParams {
        group: group.to_string(),
        elements: elements.iter().map(ToString::to_string).collect(),
        n: code.n,
        k: code.k,
        d,
        d_upper,
        d_syndrome: syndrome_distance(&code.hx, &code.hz, opts.syndrome_cap)?,
        kappa,
        h,
        confinement,
    })
}
