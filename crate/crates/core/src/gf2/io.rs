//! Text formats for sparse binary matrices: MacKay alist and Matrix Market
//! coordinate pattern. Both writers emit a canonical form that the readers
//! reproduce exactly.

use std::fmt::Write as _;

use super::matrix::BitMatrix;
use crate::error::{Error, Result};

/// Writes the alist form: `N M`, max degrees, column degrees, row degrees,
/// then 1-based row indices per column and column indices per row, zero-padded.
pub fn to_alist(m: &BitMatrix) -> String {
    let row_sets: Vec<Vec<usize>> = (0..m.rows()).map(|r| m.row_support(r)).collect();
    let mut col_sets = vec![Vec::new(); m.cols()];
    for (r, s) in row_sets.iter().enumerate() {
        for &c in s {
            col_sets[c].push(r);
        }
    }
    let max_col = col_sets.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = row_sets.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", m.cols(), m.rows());
    let _ = writeln!(out, "{max_col} {max_row}");
    let join = |v: Vec<String>| v.join(" ");
    let _ = writeln!(out, "{}", join(col_sets.iter().map(|s| s.len().to_string()).collect()));
    let _ = writeln!(out, "{}", join(row_sets.iter().map(|s| s.len().to_string()).collect()));
    for (sets, width) in [(&col_sets, max_col), (&row_sets, max_row)] {
        for s in sets.iter() {
            let mut items: Vec<String> = s.iter().map(|i| (i + 1).to_string()).collect();
            items.resize(width, "0".to_string());
            let _ = writeln!(out, "{}", join(items));
        }
    }
    out
}

pub fn from_alist(text: &str) -> Result<BitMatrix> {
    let mut tok = text.split_whitespace().map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad alist token '{t}'"))));
    let mut next = || tok.next().unwrap_or_else(|| Err(Error::Parse("truncated alist".into())));
    let (n, m) = (next()?, next()?);
    let (max_col, max_row) = (next()?, next()?);
    let col_deg: Vec<usize> = (0..n).map(|_| next()).collect::<Result<_>>()?;
    let row_deg: Vec<usize> = (0..m).map(|_| next()).collect::<Result<_>>()?;
    let mut mat = BitMatrix::zeros(m, n);
    for (c, &deg) in col_deg.iter().enumerate() {
        for k in 0..max_col {
            let r = next()?;
            match (k < deg, r) {
                (true, r) if (1..=m).contains(&r) => mat.set(r - 1, c, true),
                (false, 0) => {}
                _ => return Err(Error::Parse(format!("bad row index {r} in column {}", c + 1))),
            }
        }
    }
    for (r, &deg) in row_deg.iter().enumerate() {
        let mut count = 0;
        for k in 0..max_row {
            let c = next()?;
            match (k < deg, c) {
                (true, c) if (1..=n).contains(&c) => {
                    if !mat.get(r, c - 1) {
                        return Err(Error::Parse(format!("row/column lists disagree at ({}, {c})", r + 1)));
                    }
                    count += 1;
                }
                (false, 0) => {}
                _ => return Err(Error::Parse(format!("bad column index {c} in row {}", r + 1))),
            }
        }
        if count != mat.row_weight(r) {
            return Err(Error::Parse(format!("row {} degree mismatch", r + 1)));
        }
    }
    Ok(mat)
}

/// Matrix Market `coordinate pattern general`, entries sorted by (row, column).
pub fn to_mtx(m: &BitMatrix) -> String {
    let mut out = String::from("%%MatrixMarket matrix coordinate pattern general\n");
    let _ = writeln!(out, "{} {} {}", m.rows(), m.cols(), m.count_ones());
    for r in 0..m.rows() {
        for c in m.row_support(r) {
            let _ = writeln!(out, "{} {}", r + 1, c + 1);
        }
    }
    out
}

pub fn from_mtx(text: &str) -> Result<BitMatrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty mtx".into()))?;
    let h = header.to_ascii_lowercase();
    if !h.starts_with("%%matrixmarket matrix coordinate") {
        return Err(Error::Parse("not a MatrixMarket coordinate file".into()));
    }
    let mut lines = lines.filter(|l| !l.starts_with('%'));
    let size = lines.next().ok_or_else(|| Error::Parse("missing size line".into()))?;
    let dims: Vec<usize> = size.split_whitespace().map(|t| t.parse().map_err(|_| Error::Parse(format!("bad size '{t}'")))).collect::<Result<_>>()?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(Error::Parse("size line needs three integers".into()));
    };
    let mut m = BitMatrix::zeros(rows, cols);
    let mut count = 0;
    for line in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() < 2 {
            return Err(Error::Parse(format!("bad entry '{line}'")));
        }
        let r: usize = f[0].parse().map_err(|_| Error::Parse(format!("bad entry '{line}'")))?;
        let c: usize = f[1].parse().map_err(|_| Error::Parse(format!("bad entry '{line}'")))?;
        if !(1..=rows).contains(&r) || !(1..=cols).contains(&c) {
            return Err(Error::Parse(format!("entry out of range '{line}'")));
        }
        // Integer-valued files are reduced mod 2.
        let odd = f.get(2).map_or(true, |v| v.parse::<i64>().map_or(true, |x| x.rem_euclid(2) == 1));
        if odd {
            m.toggle(r - 1, c - 1);
        }
        count += 1;
    }
    if count != nnz {
        return Err(Error::Parse(format!("expected {nnz} entries, found {count}")));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn alist_known_text() {
        let m = BitMatrix::from_dense(&["110", "011"]);
        let text = to_alist(&m);
        assert_eq!(text, "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n");
        assert_eq!(from_alist(&text).unwrap(), m);
    }

    #[test]
    fn mtx_known_text() {
        let m = BitMatrix::from_dense(&["101", "010"]);
        let text = to_mtx(&m);
        assert_eq!(text, "%%MatrixMarket matrix coordinate pattern general\n2 3 3\n1 1\n1 3\n2 2\n");
        assert_eq!(from_mtx(&text).unwrap(), m);
        assert!(from_mtx("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n3 1\n").is_err());
    }

    proptest! {
        #[test]
        fn round_trips(seed in any::<u64>(), r in 0usize..20, c in 0usize..20) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = BitMatrix::from_fn(r, c, |_, _| rng.gen_bool(0.3));
            let a = to_alist(&m);
            prop_assert_eq!(&from_alist(&a).unwrap(), &m);
            prop_assert_eq!(to_alist(&from_alist(&a).unwrap()), a);
            let t = to_mtx(&m);
            prop_assert_eq!(&from_mtx(&t).unwrap(), &m);
            prop_assert_eq!(to_mtx(&from_mtx(&t).unwrap()), t);
        }
    }
}
