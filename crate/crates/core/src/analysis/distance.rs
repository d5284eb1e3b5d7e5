//! Minimum weight of a nontrivial logical for a parity-check problem.
//!
//! The problem is a check matrix `H` (checks × columns) and a logical label
//! per column. A set of columns is a nontrivial logical when its checks cancel
//! and its labels do not. CSS distances use `H = hx` with the labels given by
//! the pairing with the conjugate logical basis; circuit distances use the
//! detector and observable incidence of a detector error model.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};

/// Column labels are packed into a `u128`, so at most 128 logicals.
pub const MAX_LOGICALS: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DistanceValue {
    /// No nontrivial logical exists.
    Infinite,
    Exact { value: usize },
    /// Exact search found nothing up to `cap`.
    AboveCap { cap: usize },
    /// Smallest weight seen by random information sets; `lower` is a proven lower bound.
    Upper { value: usize, lower: usize, trials: usize, seed: u64 },
}

impl DistanceValue {
    /// Best known value: the exact value or the upper bound.
    pub fn value(&self) -> Option<usize> {
        match *self {
            DistanceValue::Exact { value } | DistanceValue::Upper { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, DistanceValue::Exact { .. } | DistanceValue::Infinite)
    }

    pub fn min(self, other: DistanceValue) -> DistanceValue {
        use DistanceValue::*;
        match (self, other) {
            (Infinite, x) | (x, Infinite) => x,
            (Exact { value: a }, Exact { value: b }) => Exact { value: a.min(b) },
            (Exact { value }, AboveCap { cap }) | (AboveCap { cap }, Exact { value }) => {
                if value <= cap {
                    Exact { value }
                } else {
                    AboveCap { cap }
                }
            }
            (AboveCap { cap: a }, AboveCap { cap: b }) => AboveCap { cap: a.min(b) },
            (Exact { value: a }, Upper { value: b, lower, trials, seed }) | (Upper { value: b, lower, trials, seed }, Exact { value: a }) => {
                if a <= lower {
                    Exact { value: a }
                } else {
                    Upper { value: a.min(b), lower, trials, seed }
                }
            }
            (AboveCap { cap }, Upper { value, lower, trials, seed }) | (Upper { value, lower, trials, seed }, AboveCap { cap }) => {
                Upper { value, lower: lower.min(cap + 1), trials, seed }
            }
            (a @ Upper { value: va, lower: la, .. }, b @ Upper { value: vb, lower: lb, .. }) => {
                let lower = la.min(lb);
                match if va <= vb { a } else { b } {
                    Upper { value, trials, seed, .. } => Upper { value, lower, trials, seed },
                    _ => unreachable!(),
                }
            }
        }
    }
}

impl fmt::Display for DistanceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceValue::Infinite => write!(f, "inf"),
            DistanceValue::Exact { value } => write!(f, "{value}"),
            DistanceValue::AboveCap { cap } => write!(f, ">{cap}"),
            DistanceValue::Upper { value, .. } => write!(f, "<={value}"),
        }
    }
}

/// How to compute a distance. Text form: `exact:6`, `ris:100000` or
/// `exact:6,ris:100000` (optionally `seed:S` as a further item).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceMethod {
    Exact { cap: usize },
    Ris { trials: usize, seed: u64 },
    Combined { cap: usize, trials: usize, seed: u64 },
}

impl DistanceMethod {
    pub const DEFAULT_CAP: usize = 6;
    pub const DEFAULT_TRIALS: usize = 100_000;

    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            DistanceMethod::Exact { cap } => DistanceMethod::Exact { cap },
            DistanceMethod::Ris { trials, .. } => DistanceMethod::Ris { trials, seed },
            DistanceMethod::Combined { cap, trials, .. } => DistanceMethod::Combined { cap, trials, seed },
        }
    }
}

impl Default for DistanceMethod {
    fn default() -> Self {
        DistanceMethod::Combined { cap: Self::DEFAULT_CAP, trials: Self::DEFAULT_TRIALS, seed: 0 }
    }
}

impl FromStr for DistanceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (mut cap, mut trials, mut seed) = (None, None, 0u64);
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, val) = item.split_once(':').ok_or_else(|| Error::Parse(format!("expected key:value in '{item}'")))?;
            let num: u64 = val.trim().parse().map_err(|_| Error::Parse(format!("bad number in '{item}'")))?;
            match key.trim() {
                "exact" => cap = Some(num as usize),
                "ris" => trials = Some(num as usize),
                "seed" => seed = num,
                other => return Err(Error::Parse(format!("unknown distance method '{other}'"))),
            }
        }
        match (cap, trials) {
            (Some(cap), None) => Ok(DistanceMethod::Exact { cap }),
            (None, Some(trials)) => Ok(DistanceMethod::Ris { trials, seed }),
            (Some(cap), Some(trials)) => Ok(DistanceMethod::Combined { cap, trials, seed }),
            (None, None) => Err(Error::Parse("empty distance method".into())),
        }
    }
}

impl fmt::Display for DistanceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceMethod::Exact { cap } => write!(f, "exact:{cap}"),
            DistanceMethod::Ris { trials, seed } => write!(f, "ris:{trials},seed:{seed}"),
            DistanceMethod::Combined { cap, trials, seed } => write!(f, "exact:{cap},ris:{trials},seed:{seed}"),
        }
    }
}

/// Sparse check/label incidence for the searches below.
#[derive(Clone, Debug)]
pub struct LogicalSearch {
    num_checks: usize,
    /// Checks touched by each column.
    cols: Vec<Vec<u32>>,
    /// Columns touching each check, ascending.
    rows: Vec<Vec<u32>>,
    labels: Vec<u128>,
    num_logicals: usize,
}

impl LogicalSearch {
    /// `h` is checks × columns, `l` is logicals × columns.
    pub fn new(h: &BitMatrix, l: &BitMatrix) -> Result<Self> {
        if h.cols() != l.cols() {
            return Err(Error::Shape(format!("H has {} columns, L has {}", h.cols(), l.cols())));
        }
        let mut cols = vec![Vec::new(); h.cols()];
        for r in 0..h.rows() {
            for c in h.row_support(r) {
                cols[c].push(r as u32);
            }
        }
        let mut labels = vec![0u128; l.cols()];
        if l.rows() > MAX_LOGICALS {
            return Err(Error::InvalidArgument(format!("at most {MAX_LOGICALS} logicals supported, got {}", l.rows())));
        }
        for r in 0..l.rows() {
            for c in l.row_support(r) {
                labels[c] |= 1u128 << r;
            }
        }
        Self::from_columns(h.rows(), cols, labels, l.rows())
    }

    /// Builds from per-column check lists and label masks.
    pub fn from_columns(num_checks: usize, cols: Vec<Vec<u32>>, labels: Vec<u128>, num_logicals: usize) -> Result<Self> {
        if cols.len() != labels.len() {
            return Err(Error::Shape("column and label counts differ".into()));
        }
        let mut rows = vec![Vec::new(); num_checks];
        for (c, checks) in cols.iter().enumerate() {
            for &r in checks {
                if r as usize >= num_checks {
                    return Err(Error::Shape(format!("check {r} out of range")));
                }
                rows[r as usize].push(c as u32);
            }
        }
        Ok(Self { num_checks, cols, rows, labels, num_logicals })
    }

    pub fn num_columns(&self) -> usize {
        self.cols.len()
    }

    pub fn num_checks(&self) -> usize {
        self.num_checks
    }

    pub fn has_logical(&self) -> bool {
        // A nontrivial logical exists iff some label combination is not
        // forced to vanish by the checks: rank [H; L] > rank H.
        if self.labels.iter().all(|&l| l == 0) {
            return false;
        }
        let h = self.check_matrix();
        let mut rows = h.row_vectors();
        for i in 0..self.num_logicals {
            rows.push(BitVec::from_indices(self.cols.len(), (0..self.cols.len()).filter(|&c| self.labels[c] >> i & 1 == 1)));
        }
        BitMatrix::from_rows(self.cols.len(), &rows).rank() > h.rank()
    }

    fn check_matrix(&self) -> BitMatrix {
        let supports: Vec<Vec<usize>> = self.rows.iter().map(|r| r.iter().map(|&c| c as usize).collect()).collect();
        BitMatrix::from_row_supports(self.num_checks, self.cols.len(), &supports)
    }

    /// Weight and columns of a minimum-weight nontrivial logical, searched
    /// exactly up to `cap`. `Ok(None)` means none of weight `≤ cap` exists.
    pub fn exact(&self, cap: usize) -> Option<(usize, Vec<usize>)> {
        let max_col = self.cols.iter().map(Vec::len).max().unwrap_or(0);
        for w in 1..=cap {
            let found = (0..self.cols.len()).into_par_iter().find_map_first(|f| {
                let mut st = DfsState::new(self, f, max_col);
                st.toggle(f);
                st.chosen.push(f as u32);
                if st.search(w - 1) {
                    let mut v: Vec<usize> = st.chosen.iter().map(|&c| c as usize).collect();
                    v.sort_unstable();
                    Some(v)
                } else {
                    None
                }
            });
            if let Some(v) = found {
                return Some((w, v));
            }
        }
        None
    }

    /// Random information sets: for each trial, permute columns, reduce `H`,
    /// and inspect the kernel vectors with a single free column.
    pub fn ris(&self, trials: usize, seed: u64) -> Option<(usize, Vec<usize>)> {
        let h = self.check_matrix();
        let n = self.cols.len();
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                self.ris_trial(&h, &perm)
            })
            .filter_map(|x| x)
            .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
    }

    /// `perm[c]` is the new position of column `c`.
    fn ris_trial(&self, h: &BitMatrix, perm: &[usize]) -> Option<(usize, Vec<usize>)> {
        let n = perm.len();
        let mut inv = vec![0usize; n];
        for (c, &p) in perm.iter().enumerate() {
            inv[p] = c;
        }
        let (r, pivots) = h.permute_columns(perm).rref();
        let is_pivot = {
            let mut v = vec![false; n];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let mut best: Option<(usize, Vec<usize>)> = None;
        for free in (0..n).filter(|&c| !is_pivot[c]) {
            let mut label = self.labels[inv[free]];
            let mut weight = 1;
            for (row, &p) in pivots.iter().enumerate() {
                if r.get(row, free) {
                    label ^= self.labels[inv[p]];
                    weight += 1;
                }
            }
            if label != 0 && best.as_ref().is_none_or(|(w, _)| weight < *w) {
                let mut support = vec![inv[free]];
                support.extend(pivots.iter().enumerate().filter(|(row, _)| r.get(*row, free)).map(|(_, &p)| inv[p]));
                support.sort_unstable();
                best = Some((weight, support));
            }
        }
        best
    }

    /// Runs a distance method.
    pub fn distance(&self, method: DistanceMethod) -> DistanceValue {
        if !self.has_logical() {
            return DistanceValue::Infinite;
        }
        match method {
            DistanceMethod::Exact { cap } => match self.exact(cap) {
                Some((w, _)) => DistanceValue::Exact { value: w },
                None => DistanceValue::AboveCap { cap },
            },
            DistanceMethod::Ris { trials, seed } => match self.ris(trials, seed) {
                Some((value, _)) => DistanceValue::Upper { value, lower: 1, trials, seed },
                None => DistanceValue::AboveCap { cap: 0 },
            },
            DistanceMethod::Combined { cap, trials, seed } => {
                let upper = self.ris(trials, seed).map(|(w, _)| w);
                let exact_cap = upper.map_or(cap, |u| u.min(cap));
                match (self.exact(exact_cap), upper) {
                    (Some((w, _)), _) => DistanceValue::Exact { value: w },
                    (None, Some(value)) if value > cap => DistanceValue::Upper { value, lower: cap + 1, trials, seed },
                    (None, _) => DistanceValue::AboveCap { cap },
                }
            }
        }
    }
}

struct DfsState<'a> {
    p: &'a LogicalSearch,
    start: usize,
    max_col: usize,
    syndrome: Vec<u64>,
    weight: usize,
    label: u128,
    chosen: Vec<u32>,
}

impl<'a> DfsState<'a> {
    fn new(p: &'a LogicalSearch, start: usize, max_col: usize) -> Self {
        Self { p, start, max_col, syndrome: vec![0; p.num_checks.div_ceil(64)], weight: 0, label: 0, chosen: Vec::new() }
    }

    fn toggle(&mut self, c: usize) {
        for &r in &self.p.cols[c] {
            let (w, b) = (r as usize / 64, r % 64);
            let was = self.syndrome[w] >> b & 1 == 1;
            self.syndrome[w] ^= 1 << b;
            if was {
                self.weight -= 1;
            } else {
                self.weight += 1;
            }
        }
        self.label ^= self.p.labels[c];
    }

    /// Candidates touching check `r` with index above the start column.
    fn candidates(&self, r: usize) -> &'a [u32] {
        let row = &self.p.rows[r];
        let from = row.partition_point(|&c| c as usize <= self.start);
        &row[from..]
    }

    fn search(&mut self, left: usize) -> bool {
        if self.weight == 0 {
            return self.label != 0;
        }
        if left == 0 || self.weight > left * self.max_col {
            return false;
        }
        // Branch on the unsatisfied check with the fewest candidates.
        let mut best: Option<&'a [u32]> = None;
        for (wi, &word) in self.syndrome.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let r = wi * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let cand = self.candidates(r);
                if best.is_none_or(|b| cand.len() < b.len()) {
                    best = Some(cand);
                }
            }
        }
        let Some(cand) = best else { return false };
        for &g in cand {
            if self.chosen.contains(&g) {
                continue;
            }
            self.toggle(g as usize);
            self.chosen.push(g);
            if self.search(left - 1) {
                return true;
            }
            self.chosen.pop();
            self.toggle(g as usize);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    /// Minimum nontrivial weight by enumerating all 2^n vectors.
    fn brute(h: &BitMatrix, l: &BitMatrix) -> Option<usize> {
        let n = h.cols();
        (1u64..1 << n)
            .filter_map(|mask| {
                let v = BitVec::from_indices(n, (0..n).filter(|i| mask >> i & 1 == 1));
                (h.mul_vec(&v).is_zero() && !l.mul_vec(&v).is_zero()).then(|| v.weight())
            })
            .min()
    }

    #[test]
    fn method_parsing() {
        assert_eq!("exact:6".parse::<DistanceMethod>().unwrap(), DistanceMethod::Exact { cap: 6 });
        assert_eq!(
            "exact:6,ris:100000".parse::<DistanceMethod>().unwrap(),
            DistanceMethod::Combined { cap: 6, trials: 100_000, seed: 0 }
        );
        assert_eq!("ris:10,seed:3".parse::<DistanceMethod>().unwrap(), DistanceMethod::Ris { trials: 10, seed: 3 });
        assert!("greedy:3".parse::<DistanceMethod>().is_err());
        let m = DistanceMethod::Combined { cap: 4, trials: 7, seed: 9 };
        assert_eq!(m.to_string().parse::<DistanceMethod>().unwrap(), m);
    }

    #[test]
    fn repetition_code() {
        // Checks x_i + x_{i+1}, logical = parity of bit 0.
        let h = BitMatrix::from_dense(&["11000", "01100", "00110", "00011"]);
        let l = BitMatrix::from_dense(&["10000"]);
        let p = LogicalSearch::new(&h, &l).unwrap();
        assert_eq!(p.exact(5), Some((5, vec![0, 1, 2, 3, 4])));
        assert_eq!(p.exact(4), None);
        assert_eq!(p.ris(10, 1).unwrap().0, 5);
        assert_eq!(p.distance(DistanceMethod::Exact { cap: 3 }), DistanceValue::AboveCap { cap: 3 });
        let no_logical = LogicalSearch::new(&h, &BitMatrix::zeros(1, 5)).unwrap();
        assert_eq!(no_logical.distance(DistanceMethod::default()), DistanceValue::Infinite);
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..80 {
            let n = rng.gen_range(3..=14);
            let m = rng.gen_range(1..n);
            let h = BitMatrix::from_fn(m, n, |_, _| rng.gen_bool(0.3));
            let l = BitMatrix::from_fn(rng.gen_range(1..=3), n, |_, _| rng.gen_bool(0.3));
            let p = LogicalSearch::new(&h, &l).unwrap();
            let expected = brute(&h, &l);
            let got = p.exact(n).map(|(w, v)| {
                let e = BitVec::from_indices(n, v.iter().copied());
                assert!(h.mul_vec(&e).is_zero() && !l.mul_vec(&e).is_zero());
                assert_eq!(e.weight(), w);
                w
            });
            assert_eq!(got, expected);
            assert_eq!(p.has_logical(), expected.is_some());
            if let Some(d) = expected {
                let (u, v) = p.ris(50, 3).unwrap();
                assert!(u >= d);
                let e = BitVec::from_indices(n, v.iter().copied());
                assert!(h.mul_vec(&e).is_zero() && !l.mul_vec(&e).is_zero());
            }
        }
    }

    #[test]
    fn ris_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = BitMatrix::from_fn(10, 30, |_, _| rng.gen_bool(0.2));
        let l = BitMatrix::from_fn(2, 30, |_, _| rng.gen_bool(0.2));
        let p = LogicalSearch::new(&h, &l).unwrap();
        assert_eq!(p.ris(200, 8), p.ris(200, 8));
    }

    #[test]
    fn value_min() {
        use DistanceValue::*;
        assert_eq!(Infinite.min(Exact { value: 3 }), Exact { value: 3 });
        assert_eq!(Exact { value: 3 }.min(Exact { value: 2 }), Exact { value: 2 });
        assert_eq!(AboveCap { cap: 6 }.min(Exact { value: 4 }), Exact { value: 4 });
        assert_eq!(Exact { value: 9 }.min(Upper { value: 8, lower: 7, trials: 1, seed: 0 }), Upper { value: 8, lower: 7, trials: 1, seed: 0 });
    }
}
