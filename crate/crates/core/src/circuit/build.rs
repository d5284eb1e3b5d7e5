//! Syndrome-measurement circuits for level-2 codes of four-element AMC complexes.
//!
//! Block rows of `H_X = Q_2` are labelled by single elements and block rows
//! of `H_Z = Q_3ᵀ` by three-element subsets. Each round measures three block
//! rows of each: dropping X row `{s}` and the Z row missing `s`. With the
//! dropped element in the role of `D` and the other three, in descending
//! order, as `C, B, A`, the remaining rows take the two-plus-four form
//!
//! ```text
//! H_X: [D | B A .]   H_Z: [B C . | D . .]
//!      [D | C . A]        [A . C | . D .]
//!      [D | . C B]        [. A B | . . D]
//! ```
//!
//! and are addressed in six moments, `D` monomials first and last in
//! opposite orders for the two check types.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::complex::{amc_build, mbc_block_layout};
use crate::css::{css_extract, logical_basis};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::group::{AbelianGroup, GroupAlgebraElement};

use super::{Circuit, Instruction, Op};

const D: usize = 4;
const FULL: u32 = (1 << D) - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Basis {
    X,
    Z,
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Basis::X),
            "Z" | "z" => Ok(Basis::Z),
            _ => Err(Error::Parse(format!("basis must be X or Z, got `{s}`"))),
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::X => "X",
            Basis::Z => "Z",
        })
    }
}

/// Dropped row block per round of a four-round cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cycle(pub [usize; 4]);

impl Cycle {
    pub const SUPPORTED: [&'static str; 3] = ["1111", "1212", "1234"];

    pub fn drop_at(&self, round: usize) -> usize {
        self.0[round % 4]
    }
}

impl FromStr for Cycle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if !Self::SUPPORTED.contains(&s) {
            return Err(Error::InvalidArgument(format!("unsupported cycle `{s}`; expected one of 1111, 1212, 1234")));
        }
        let d: Vec<usize> = s.bytes().map(|b| (b - b'0') as usize).collect();
        Ok(Cycle([d[0], d[1], d[2], d[3]]))
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Which detectors a memory circuit declares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DetectorSet {
    /// Both check types.
    Both,
    /// Only checks of the memory basis (Z checks in a Z-basis run).
    Basis,
}

impl FromStr for DetectorSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(DetectorSet::Both),
            "z" | "x" | "basis" => Ok(DetectorSet::Basis),
            _ => Err(Error::Parse(format!("detector set must be `both` or the basis letter, got `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MemoryOptions {
    pub cycle: Cycle,
    pub basis: Basis,
    /// Total rounds including the final data measurement.
    pub rounds: usize,
    pub detectors: DetectorSet,
}

impl Default for MemoryOptions {
    fn default() -> Self {
        Self { cycle: Cycle([1, 2, 1, 2]), basis: Basis::Z, rounds: 9, detectors: DetectorSet::Both }
    }
}

/// Moves the element `1 + g` for a generator `g` (`1+x` over `C_ℓ`) last,
/// keeping the order of the others. Unchanged if there is no such element.
pub fn circuit_element_order(elements: &[GroupAlgebraElement]) -> Vec<GroupAlgebraElement> {
    let is_one_plus_x = |e: &GroupAlgebraElement| {
        let g = e.group();
        e.support() == vec![0, g.index_of(&vec![0i64; g.rank() - 1].into_iter().chain([1]).collect::<Vec<_>>())]
    };
    let mut out: Vec<_> = elements.to_vec();
    if let Some(i) = out.iter().position(is_one_plus_x) {
        let e = out.remove(i);
        out.push(e);
    }
    out
}

/// Row-dropped check matrices for one round.
#[derive(Clone, Debug, PartialEq)]
pub struct DroppedChecks {
    pub drop: usize,
    /// Measured rows of `H_X` and `H_Z`, in the order of the block form above.
    pub x_rows: Vec<usize>,
    pub z_rows: Vec<usize>,
    pub hx: BitMatrix,
    pub hz: BitMatrix,
    /// Column `c` moves to `column_permutation[c]` to reach the block form.
    pub column_permutation: Vec<usize>,
}

/// One round: data qubit addressed by each measured row at each moment.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundSchedule {
    pub drop: usize,
    pub x_rows: Vec<usize>,
    pub z_rows: Vec<usize>,
    pub x_targets: Vec<[usize; 6]>,
    pub z_targets: Vec<[usize; 6]>,
}

/// A level-2 code of `AMC(a_1, …, a_4)` with weight-2 elements, ready for circuits.
#[derive(Clone, Debug)]
pub struct CircuitCode {
    pub group: AbelianGroup,
    pub elements: Vec<GroupAlgebraElement>,
    pub hx: BitMatrix,
    pub hz: BitMatrix,
    pub lx: BitMatrix,
    pub lz: BitMatrix,
    levels: Vec<Vec<u32>>,
    /// Position of each subset within its level.
    positions: HashMap<u32, usize>,
}

impl CircuitCode {
    pub fn new(group: &AbelianGroup, elements: &[GroupAlgebraElement]) -> Result<Self> {
        if elements.len() != D {
            return Err(Error::InvalidArgument(format!("circuits need four elements, got {}", elements.len())));
        }
        if let Some(e) = elements.iter().find(|e| e.weight() != 2) {
            return Err(Error::InvalidArgument(format!("circuits need weight-2 elements, got {e}")));
        }
        let complex = amc_build(group, elements)?;
        let code = css_extract(&complex, 2, false)?;
        let (lx, lz) = logical_basis(&code)?;
        let levels = mbc_block_layout(D);
        let positions = levels.iter().flat_map(|lv| lv.iter().enumerate().map(|(i, &m)| (m, i))).collect();
        Ok(Self { group: group.clone(), elements: elements.to_vec(), hx: code.hx, hz: code.hz, lx, lz, levels, positions })
    }

    pub fn n(&self) -> usize {
        self.hx.cols()
    }

    pub fn k(&self) -> usize {
        self.lx.rows()
    }

    fn ell(&self) -> usize {
        self.group.order()
    }

    /// Dropped element and the elements in roles `A, B, C`.
    fn roles(&self, drop: usize) -> Result<(usize, [usize; 3])> {
        if !(1..=D).contains(&drop) {
            return Err(Error::InvalidArgument(format!("dropped row block must be in 1..=4, got {drop}")));
        }
        let s = self.levels[1][drop - 1].trailing_zeros() as usize;
        let others: Vec<usize> = (0..D).rev().filter(|&b| b != s).collect();
        Ok((s, [others[2], others[1], others[0]]))
    }

    /// `H_X` and `H_Z` without the block rows of round type `drop`, and the
    /// column permutation taking them to the block form of the first type.
    pub fn dropped_matrices(&self, drop: usize) -> Result<DroppedChecks> {
        let sched = self.build_round(drop)?;
        let (s, roles) = self.roles(drop)?;
        let mut relabel = [0usize; D];
        relabel[s] = 3;
        for (r, &b) in roles.iter().enumerate() {
            relabel[b] = r;
        }
        let l = self.ell();
        let mut column_permutation = vec![0; self.n()];
        for (pos, &mask) in self.levels[2].iter().enumerate() {
            let image = (0..D).filter(|&b| mask >> b & 1 == 1).fold(0u32, |acc, b| acc | 1 << relabel[b]);
            for a in 0..l {
                column_permutation[pos * l + a] = self.positions[&image] * l + a;
            }
        }
        Ok(DroppedChecks {
            drop,
            hx: self.hx.select_rows(&sched.x_rows),
            hz: self.hz.select_rows(&sched.z_rows),
            x_rows: sched.x_rows,
            z_rows: sched.z_rows,
            column_permutation,
        })
    }

    /// Data qubits of the two monomials of `element` in the row `alpha` of its
    /// block (`transposed` for `H_Z` blocks), in the order free term, other.
    fn monomial_qubits(&self, element: usize, column_block: u32, alpha: usize, transposed: bool) -> [usize; 2] {
        let g = &self.group;
        let support = self.elements[element].support();
        let base = self.positions[&column_block] * self.ell();
        let q = |m: usize| base + if transposed { g.mul_index(m, alpha) } else { g.mul_index(g.inv_index(m), alpha) };
        [q(support[0]), q(support[1])]
    }

    /// The six-moment schedule for a round dropping block row `drop`.
    pub fn build_round(&self, drop: usize) -> Result<RoundSchedule> {
        let (s, roles) = self.roles(drop)?;
        let l = self.ell();
        let (mut x_rows, mut x_targets, mut z_rows, mut z_targets) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for rho in [2, 1, 0] {
            let e = roles[rho];
            let row_block = self.positions[&(1 << e)];
            let (first, second) = (roles[(rho + 2) % 3], roles[(rho + 1) % 3]);
            for a in 0..l {
                let dq = self.monomial_qubits(s, 1 << s | 1 << e, a, false);
                let f = self.monomial_qubits(first, 1 << e | 1 << first, a, false);
                let t = self.monomial_qubits(second, 1 << e | 1 << second, a, false);
                x_rows.push(row_block * l + a);
                x_targets.push([dq[0], f[0], f[1], t[0], t[1], dq[1]]);
            }
        }
        for m in 0..3 {
            let row_mask = FULL ^ 1 << roles[m];
            let row_block = self.positions[&row_mask];
            let (first, second) = (roles[(m + 1) % 3], roles[(m + 2) % 3]);
            for a in 0..l {
                let dq = self.monomial_qubits(s, row_mask ^ 1 << s, a, true);
                let f = self.monomial_qubits(first, row_mask ^ 1 << first, a, true);
                let t = self.monomial_qubits(second, row_mask ^ 1 << second, a, true);
                z_rows.push(row_block * l + a);
                z_targets.push([dq[1], f[0], f[1], t[0], t[1], dq[0]]);
            }
        }
        let sched = RoundSchedule { drop, x_rows, z_rows, x_targets, z_targets };
        self.check_round(&sched)?;
        Ok(sched)
    }

    /// Each row addresses exactly its support, and no data qubit is used
    /// twice in a moment.
    fn check_round(&self, sched: &RoundSchedule) -> Result<()> {
        for (h, rows, targets) in [(&self.hx, &sched.x_rows, &sched.x_targets), (&self.hz, &sched.z_rows, &sched.z_targets)] {
            for (&r, t) in rows.iter().zip(targets) {
                let mut got = t.to_vec();
                got.sort_unstable();
                if got != h.row_support(r) {
                    return Err(Error::Internal(format!("schedule of row {r} does not match its support")));
                }
            }
        }
        for moment in 0..6 {
            let mut seen = vec![false; self.n()];
            for t in sched.x_targets.iter().chain(&sched.z_targets) {
                if std::mem::replace(&mut seen[t[moment]], true) {
                    return Err(Error::Internal(format!("data qubit {} addressed twice in moment {}", t[moment], moment + 1)));
                }
            }
        }
        Ok(())
    }

    /// Ancilla of X row `r` is `n + r`, of Z row `r` is `n + 4ℓ + r`.
    pub fn num_qubits(&self) -> usize {
        self.n() + self.hx.rows() + self.hz.rows()
    }

    fn x_ancilla(&self, r: usize) -> u32 {
        (self.n() + r) as u32
    }

    fn z_ancilla(&self, r: usize) -> u32 {
        (self.n() + self.hx.rows() + r) as u32
    }

    /// Noiseless memory experiment. Detector coordinates are
    /// `(round, type, row)` with type 0 for X checks and 1 for Z checks;
    /// the final data measurement is round `rounds − 1`.
    pub fn memory_circuit(&self, opts: &MemoryOptions) -> Result<Circuit> {
        if opts.rounds < 2 {
            return Err(Error::InvalidArgument("a memory circuit needs at least one round before the final measurement".into()));
        }
        let n = self.n();
        let mut c = Circuit::new();
        let data: Vec<u32> = (0..n as u32).collect();
        let ancillas: Vec<u32> = (n as u32..self.num_qubits() as u32).collect();
        c.push(Instruction::gate(if opts.basis == Basis::Z { Op::R } else { Op::RX }, data.clone()));
        c.push(Instruction::gate(Op::R, ancillas));
        c.push(Instruction::tick());
        let want_x = opts.basis == Basis::X || opts.detectors == DetectorSet::Both;
        let want_z = opts.basis == Basis::Z || opts.detectors == DetectorSet::Both;
        let mut last_x: Vec<Option<usize>> = vec![None; self.hx.rows()];
        let mut last_z: Vec<Option<usize>> = vec![None; self.hz.rows()];
        let mut measured = 0usize;
        let schedules: Vec<RoundSchedule> = (1..=D).map(|d| self.build_round(d)).collect::<Result<_>>()?;
        for round in 0..opts.rounds - 1 {
            let sched = &schedules[opts.cycle.drop_at(round) - 1];
            for moment in 0..6 {
                let xcx: Vec<u32> = sched.x_rows.iter().zip(&sched.x_targets).flat_map(|(&r, t)| [t[moment] as u32, self.x_ancilla(r)]).collect();
                let cx: Vec<u32> = sched.z_rows.iter().zip(&sched.z_targets).flat_map(|(&r, t)| [t[moment] as u32, self.z_ancilla(r)]).collect();
                c.push(Instruction::gate(Op::XCX, xcx));
                c.push(Instruction::gate(Op::CX, cx));
                c.push(Instruction::tick());
            }
            let mr: Vec<u32> = sched.x_rows.iter().map(|&r| self.x_ancilla(r)).chain(sched.z_rows.iter().map(|&r| self.z_ancilla(r))).collect();
            c.push(Instruction::gate(Op::MR, mr));
            let total = measured + sched.x_rows.len() + sched.z_rows.len();
            let rows = sched.x_rows.iter().map(|&r| (0, r)).chain(sched.z_rows.iter().map(|&r| (1, r)));
            for (i, (kind, r)) in rows.enumerate() {
                let this = measured + i;
                let (last, wanted, compatible) = match kind {
                    0 => (&mut last_x[r], want_x, opts.basis == Basis::X),
                    _ => (&mut last_z[r], want_z, opts.basis == Basis::Z),
                };
                let prev = last.replace(this);
                if !wanted || (prev.is_none() && !compatible) {
                    continue;
                }
                let recs: Vec<u32> = std::iter::once(this).chain(prev).map(|m| (total - m) as u32).collect();
                c.push(Instruction::new(Op::Detector, vec![round as f64, kind as f64, r as f64], recs));
            }
            measured = total;
            c.push(Instruction::tick());
        }
        c.push(Instruction::gate(if opts.basis == Basis::Z { Op::M } else { Op::MX }, data));
        let total = measured + n;
        let (h, last, kind, logicals) = match opts.basis {
            Basis::Z => (&self.hz, &last_z, 1, &self.lz),
            Basis::X => (&self.hx, &last_x, 0, &self.lx),
        };
        let final_round = (opts.rounds - 1) as f64;
        for r in 0..h.rows() {
            let recs: Vec<u32> = h.row_support(r).into_iter().map(|q| (total - measured - q) as u32).chain(last[r].map(|m| (total - m) as u32)).collect();
            c.push(Instruction::new(Op::Detector, vec![final_round, kind as f64, r as f64], recs));
        }
        for i in 0..logicals.rows() {
            let recs: Vec<u32> = logicals.row_support(i).into_iter().map(|q| (total - measured - q) as u32).collect();
            c.push(Instruction::new(Op::ObservableInclude, vec![i as f64], recs));
        }
        Ok(c)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn code(group: &str, elems: &[&str]) -> CircuitCode {
        let g = AbelianGroup::parse(group).unwrap();
        let els: Vec<_> = elems.iter().map(|e| GroupAlgebraElement::parse(&g, e).unwrap()).collect();
        CircuitCode::new(&g, &circuit_element_order(&els)).unwrap()
    }

    fn block_pattern(m: &BitMatrix, l: usize) -> Vec<Vec<bool>> {
        (0..m.rows() / l).map(|br| (0..m.cols() / l).map(|bc| (0..l).any(|a| (0..l).any(|b| m.get(br * l + a, bc * l + b)))).collect()).collect()
    }

    #[test]
    fn element_order_puts_one_plus_x_last() {
        let g = AbelianGroup::cyclic(7);
        let els: Vec<_> = ["1+x", "1+x^2", "1+x^3", "1+x^4"].iter().map(|e| GroupAlgebraElement::parse(&g, e).unwrap()).collect();
        let names: Vec<String> = circuit_element_order(&els).iter().map(ToString::to_string).collect();
        assert_eq!(names, ["1+x^2", "1+x^3", "1+x^4", "1+x"]);
    }

    #[test]
    fn first_drop_has_two_plus_four_form() {
        let c = code("C7", &["1+x", "1+x^2", "1+x^3", "1+x^4"]);
        let d = c.dropped_matrices(1).unwrap();
        assert_eq!(d.hx.shape(), (21, 42));
        assert_eq!(d.hz.shape(), (21, 42));
        assert_eq!(d.column_permutation, (0..42).collect::<Vec<_>>());
        let t = true;
        let f = false;
        assert_eq!(block_pattern(&d.hx, 7), vec![vec![t, f, f, t, t, f], vec![f, t, f, t, f, t], vec![f, f, t, f, t, t]]);
        assert_eq!(block_pattern(&d.hz, 7), vec![vec![t, t, f, t, f, f], vec![t, f, t, f, t, f], vec![f, t, t, f, f, t]]);
        // Blocks carry the elements of the block form: D = M(1+x) on the diagonal.
        let m = |i: usize| c.elements[i].regular_rep();
        let blk = |h: &BitMatrix, r: usize, col: usize| BitMatrix::from_fn(7, 7, |a, b| h.get(r * 7 + a, col * 7 + b));
        assert_eq!(blk(&d.hx, 0, 0), m(3));
        assert_eq!(blk(&d.hx, 0, 3), m(1));
        assert_eq!(blk(&d.hx, 0, 4), m(0));
        assert_eq!(blk(&d.hx, 1, 3), m(2));
        assert_eq!(blk(&d.hz, 0, 0), m(1).transpose());
        assert_eq!(blk(&d.hz, 0, 1), m(2).transpose());
        assert_eq!(blk(&d.hz, 0, 3), m(3).transpose());
    }

    #[test]
    fn every_drop_permutes_to_the_same_block_form() {
        let c = code("C7", &["1+x", "1+x^2", "1+x^3", "1+x^4"]);
        let reference = c.dropped_matrices(1).unwrap();
        for drop in 1..=4 {
            let d = c.dropped_matrices(drop).unwrap();
            assert_eq!(block_pattern(&d.hx.permute_columns(&d.column_permutation), 7), block_pattern(&reference.hx, 7));
            assert_eq!(block_pattern(&d.hz.permute_columns(&d.column_permutation), 7), block_pattern(&reference.hz, 7));
        }
        assert!(c.dropped_matrices(0).is_err());
        assert!(c.dropped_matrices(5).is_err());
    }

    #[test]
    fn rank_is_kept_when_dropping_the_first_block() {
        for (group, elems) in [("C7", ["1+x", "1+x^2", "1+x^3", "1+x^4"]), ("C11", ["1+x", "1+x^2", "1+x^3", "1+x^4"]), ("C10", ["1+x", "1+x^2", "1+x^3", "1+x^4"]), ("C14", ["1+x", "1+x^2", "1+x^5", "1+x^6"])] {
            let c = code(group, &elems);
            let d = c.dropped_matrices(1).unwrap();
            assert_eq!(d.hx.rank(), c.hx.rank(), "{group}");
            assert_eq!(d.hz.rank(), c.hz.rank(), "{group}");
        }
    }

    #[test]
    fn round_gate_counts() {
        let c = code("C7", &["1+x", "1+x^2", "1+x^3", "1+x^4"]);
        for drop in 1..=4 {
            let r = c.build_round(drop).unwrap();
            assert_eq!((r.x_rows.len(), r.z_rows.len()), (21, 21));
            assert_eq!(r.x_targets.len() * 6 + r.z_targets.len() * 6, 252);
        }
    }

    #[test]
    fn memory_circuit_shape() {
        let c = code("C7", &["1+x", "1+x^2", "1+x^3", "1+x^4"]);
        let circ = c.memory_circuit(&MemoryOptions::default()).unwrap();
        circ.validate().unwrap();
        circ.check_moments().unwrap();
        assert_eq!(circ.num_qubits(), 42 + 56);
        assert_eq!(circ.num_observables(), 6);
        assert_eq!(circ.num_measurements(), 8 * 42 + 42);
        // Z detectors: 21 absolute in round 0, 21 per later round, 28 final;
        // X detectors from the second time each row is measured.
        let dets = circ.detectors();
        let z = dets.iter().filter(|d| d.coords[1] == 1.0).count();
        assert_eq!(z, 21 * 8 + 28);
        let x = dets.iter().filter(|d| d.coords[1] == 0.0).count();
        assert_eq!(x, 21 * 8 - 28);
        let only_z = c.memory_circuit(&MemoryOptions { detectors: DetectorSet::Basis, ..Default::default() }).unwrap();
        assert_eq!(only_z.num_detectors(), z);
        assert!("1313".parse::<Cycle>().is_err());
    }

    #[test]
    fn noise_site_count_per_round() {
        let c = code("C7", &["1+x", "1+x^2", "1+x^3", "1+x^4"]);
        let circ = c.memory_circuit(&MemoryOptions { rounds: 2, ..Default::default() }).unwrap().with_noise(0.001).unwrap();
        // One round: data depolarizing, 252 gates, flips around 42 measure-resets;
        // plus 42 flips before the final data measurement.
        assert_eq!(circ.noise_sites(), 42 + 252 + 2 * 42 + 42);
        let qubit_targets: usize = circ.instructions.iter().filter(|i| i.op.is_noise()).map(|i| i.targets.len()).sum();
        assert_eq!(qubit_targets, 42 + 504 + 2 * 42 + 42);
    }
}
