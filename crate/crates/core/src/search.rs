//! Search over weight-2 AMC codes `AMC(1+x^{e_1}, …, 1+x^{e_4})` on cyclic groups.
//!
//! Candidates are exponent tuples `1 ≤ e_1 < e_2 < e_3 < e_4 ≤ ℓ−1`, one per
//! orbit of the multiplier group `x ↦ x^m`, `gcd(m, ℓ) = 1`. Each candidate is
//! screened with a cheap random-information-set bound; candidates are then
//! refined with the full distance method in descending order of the screened
//! bound, skipping those that cannot beat the best refined value.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{characteristic_poly, code_params, css_searches, CodeParams, DistanceMethod, DistanceValue, ParamOptions};
use crate::complex::amc_build;
use crate::css::css_extract;
use crate::error::{Error, Result};
use crate::gf2::Gf2Poly;
use crate::group::{AbelianGroup, GroupAlgebraElement};

/// Number of elements per candidate.
pub const SEARCH_D: usize = 4;

pub type Exponents = [usize; SEARCH_D];

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Units of `Z_ℓ`.
pub fn multipliers(l: usize) -> Vec<usize> {
    (1..l).filter(|&m| gcd(m, l) == 1).collect()
}

/// Image of a sorted tuple under `x ↦ x^m`, sorted.
pub fn apply_multiplier(e: &Exponents, m: usize, l: usize) -> Exponents {
    let mut out = e.map(|x| x * m % l);
    out.sort_unstable();
    out
}

/// Lexicographically smallest tuple in the orbit of `e`.
pub fn orbit_representative(e: &Exponents, l: usize) -> Exponents {
    multipliers(l).into_iter().map(|m| apply_multiplier(e, m, l)).min().expect("1 is a unit")
}

/// The elements `1 + x^{e_i}` over `C_ℓ`.
pub fn candidate_elements(group: &AbelianGroup, e: &Exponents) -> Vec<GroupAlgebraElement> {
    e.iter().map(|&x| GroupAlgebraElement::from_indices(group, [0, x])).collect()
}

/// Orbit representatives in lexicographic order. Unless `all_h` is set, only
/// tuples with characteristic polynomial `h = 1 + x` are kept.
pub fn enumerate_candidates(l: usize, all_h: bool) -> Result<Vec<Exponents>> {
    if l < 7 {
        return Err(Error::InvalidArgument(format!("no valid tuple exists for ell = {l} (need ell >= 7)")));
    }
    let one_plus_x = Gf2Poly::from_exponents([0, 1]);
    let mut out = Vec::new();
    for e1 in 1..l {
        for e2 in e1 + 1..l {
            for e3 in e2 + 1..l {
                for e4 in e3 + 1..l {
                    let e = [e1, e2, e3, e4];
                    if orbit_representative(&e, l) != e {
                        continue;
                    }
                    if !all_h {
                        let polys: Vec<Gf2Poly> = e.iter().map(|&x| Gf2Poly::from_exponents([0, x])).collect();
                        let (h, _) = characteristic_poly(&polys, l)?;
                        if h != one_plus_x {
                            continue;
                        }
                    }
                    out.push(e);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Method used on candidates that survive screening.
    pub method: DistanceMethod,
    /// RIS trials per side when screening; 0 refines every candidate.
    pub screen_trials: usize,
    pub seed: u64,
    pub all_h: bool,
    /// Confinement profile weight for the winning code; 0 skips it.
    pub confinement_w: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { method: DistanceMethod::default(), screen_trials: 2000, seed: 0, all_h: false, confinement_w: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub ell: usize,
    pub exponents: Exponents,
    pub candidates: usize,
    pub refined: usize,
    pub params: CodeParams,
}

/// Ordering key for distances: larger is better.
fn rank_key(d: &DistanceValue) -> usize {
    match *d {
        DistanceValue::Infinite => usize::MAX,
        DistanceValue::AboveCap { cap } => cap + 1,
        DistanceValue::Exact { value } | DistanceValue::Upper { value, .. } => value,
    }
}

fn candidate_distance(group: &AbelianGroup, e: &Exponents, method: DistanceMethod) -> Result<DistanceValue> {
    let code = css_extract(&amc_build(group, &candidate_elements(group, e))?, 2, false)?;
    if code.k == 0 {
        return Ok(DistanceValue::Infinite);
    }
    let (z, x) = css_searches(&code)?;
    Ok(z.distance(method).min(x.distance(method)))
}

/// Best candidate for one `ℓ`: maximal distance, ties to the smallest tuple.
pub fn search_best(l: usize, opts: &SearchOptions) -> Result<SearchResult> {
    let group = AbelianGroup::cyclic(l);
    let candidates = enumerate_candidates(l, opts.all_h)?;
    if candidates.is_empty() {
        return Err(Error::InvalidArgument(format!("no candidates for ell = {l}")));
    }
    let mut screened: Vec<(usize, Exponents)> = if opts.screen_trials == 0 {
        candidates.iter().map(|&e| (usize::MAX, e)).collect()
    } else {
        let screen = DistanceMethod::Ris { trials: opts.screen_trials, seed: opts.seed };
        candidates
            .par_iter()
            .map(|e| candidate_distance(&group, e, screen).map(|d| (rank_key(&d), *e)))
            .collect::<Result<_>>()?
    };
    screened.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut best: Option<(usize, Exponents)> = None;
    let mut refined = 0;
    for &(bound, e) in &screened {
        if best.is_some_and(|(b, _)| bound < b) {
            break;
        }
        let key = rank_key(&candidate_distance(&group, &e, opts.method)?);
        refined += 1;
        log::debug!("ell={l} {e:?}: screened {bound}, refined {key}");
        if best.map_or(true, |(b, be)| key > b || (key == b && e < be)) {
            best = Some((key, e));
        }
    }
    let (_, exponents) = best.expect("at least one candidate");
    let params = code_params(
        &group,
        &candidate_elements(&group, &exponents),
        2,
        &ParamOptions { method: opts.method, confinement_w: opts.confinement_w, ..Default::default() },
    )?;
    Ok(SearchResult { ell: l, exponents, candidates: candidates.len(), refined, params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// Orbits by closure under repeated multiplication by each unit.
    fn brute_orbits(l: usize) -> usize {
        let mut seen = BTreeSet::new();
        let mut orbits = 0;
        for mask in 0u32..(1 << (l - 1)) {
            if mask.count_ones() != 4 {
                continue;
            }
            let e: Vec<usize> = (0..l - 1).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
            let e: Exponents = e.try_into().unwrap();
            if seen.contains(&e) {
                continue;
            }
            orbits += 1;
            let mut stack = vec![e];
            while let Some(t) = stack.pop() {
                if !seen.insert(t) {
                    continue;
                }
                for m in 2..l {
                    if (1..l).any(|k| k * m % l == 1) {
                        let mut u = t.map(|x| x * m % l);
                        u.sort_unstable();
                        stack.push(u);
                    }
                }
            }
        }
        orbits
    }

    #[test]
    fn representatives_match_brute_force_orbits() {
        for l in [7, 8, 9, 10, 12, 13] {
            assert_eq!(enumerate_candidates(l, true).unwrap().len(), brute_orbits(l), "ell={l}");
        }
    }

    #[test]
    fn smallest_ell_contains_table_tuple() {
        let c = enumerate_candidates(7, false).unwrap();
        assert!(c.contains(&[1, 2, 3, 4]));
        assert!(enumerate_candidates(6, true).is_err());
    }

    #[test]
    fn filter_keeps_only_unit_gcd_tuples() {
        // gcd(1+x^a, 1+x^b, x^ℓ−1) = 1+x^gcd(a, b, ℓ).
        let l = 12;
        let all = enumerate_candidates(l, true).unwrap();
        let kept = enumerate_candidates(l, false).unwrap();
        let expected: Vec<_> = all.into_iter().filter(|e| e.iter().fold(l, |g, &x| gcd(g, x)) == 1).collect();
        assert_eq!(kept, expected);
    }

    #[test]
    fn orbit_members_share_parameters() {
        let l = 11;
        let group = AbelianGroup::cyclic(l);
        for e in enumerate_candidates(l, false).unwrap().into_iter().take(4) {
            let m = 3;
            let image = apply_multiplier(&e, m, l);
            let d0 = candidate_distance(&group, &e, DistanceMethod::Exact { cap: 6 }).unwrap();
            let d1 = candidate_distance(&group, &image, DistanceMethod::Exact { cap: 6 }).unwrap();
            assert_eq!(d0, d1, "{e:?} vs {image:?}");
        }
    }

    #[test]
    fn best_code_for_smallest_ell() {
        let r = search_best(7, &SearchOptions { method: DistanceMethod::Exact { cap: 6 }, ..Default::default() }).unwrap();
        assert_eq!((r.params.n, r.params.k, r.params.d, r.params.d_syndrome), (42, 6, DistanceValue::Exact { value: 4 }, Some(4)));
        assert_eq!(r.params.h.as_deref(), Some("1+x"));
        let again = search_best(7, &SearchOptions { method: DistanceMethod::Exact { cap: 6 }, ..Default::default() }).unwrap();
        assert_eq!(r, again);
    }
}
