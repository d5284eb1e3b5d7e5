//! Aaronson–Gottesman stabilizer tableau, used to check that noiseless
//! circuits have deterministic detectors and observables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::{Circuit, Op};

/// Rows `0..n` are destabilizers, `n..2n` stabilizers, `2n` is scratch.
pub struct Tableau {
    n: usize,
    x: Vec<Vec<bool>>,
    z: Vec<Vec<bool>>,
    r: Vec<bool>,
}

impl Tableau {
    /// `|0…0⟩`.
    pub fn new(n: usize) -> Self {
        let rows = 2 * n + 1;
        let mut t = Self { n, x: vec![vec![false; n]; rows], z: vec![vec![false; n]; rows], r: vec![false; rows] };
        for i in 0..n {
            t.x[i][i] = true;
            t.z[n + i][i] = true;
        }
        t
    }

    pub fn h(&mut self, q: usize) {
        for i in 0..2 * self.n {
            self.r[i] ^= self.x[i][q] && self.z[i][q];
            let tmp = self.x[i][q];
            self.x[i][q] = self.z[i][q];
            self.z[i][q] = tmp;
        }
    }

    pub fn cx(&mut self, c: usize, t: usize) {
        for i in 0..2 * self.n {
            self.r[i] ^= self.x[i][c] && self.z[i][t] && (self.x[i][t] ^ self.z[i][c] ^ true);
            self.x[i][t] ^= self.x[i][c];
            self.z[i][c] ^= self.z[i][t];
        }
    }

    /// `X`-controlled `X`: `H_c · CX(c, t) · H_c`.
    pub fn xcx(&mut self, c: usize, t: usize) {
        self.h(c);
        self.cx(c, t);
        self.h(c);
    }

    pub fn x_gate(&mut self, q: usize) {
        for i in 0..2 * self.n {
            self.r[i] ^= self.z[i][q];
        }
    }

    fn g(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
        let (x2, z2) = (x2 as i32, z2 as i32);
        match (x1, z1) {
            (false, false) => 0,
            (true, true) => z2 - x2,
            (true, false) => z2 * (2 * x2 - 1),
            (false, true) => x2 * (1 - 2 * z2),
        }
    }

    fn rowsum(&mut self, h: usize, i: usize) {
        let mut sum = 2 * self.r[h] as i32 + 2 * self.r[i] as i32;
        for j in 0..self.n {
            sum += Self::g(self.x[i][j], self.z[i][j], self.x[h][j], self.z[h][j]);
        }
        self.r[h] = sum.rem_euclid(4) == 2;
        for j in 0..self.n {
            let (xi, zi) = (self.x[i][j], self.z[i][j]);
            self.x[h][j] ^= xi;
            self.z[h][j] ^= zi;
        }
    }

    /// Z-basis measurement; returns `(outcome, was_random)`.
    pub fn measure(&mut self, a: usize, rng: &mut impl Rng) -> (bool, bool) {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&p| self.x[p][a]) {
            for i in 0..2 * n {
                if i != p && self.x[i][a] {
                    self.rowsum(i, p);
                }
            }
            self.x[p - n] = self.x[p].clone();
            self.z[p - n] = self.z[p].clone();
            self.r[p - n] = self.r[p];
            self.x[p] = vec![false; n];
            self.z[p] = vec![false; n];
            self.z[p][a] = true;
            self.r[p] = rng.gen();
            (self.r[p], true)
        } else {
            let s = 2 * n;
            self.x[s] = vec![false; n];
            self.z[s] = vec![false; n];
            self.r[s] = false;
            for i in 0..n {
                if self.x[i][a] {
                    self.rowsum(s, i + n);
                }
            }
            (self.r[s], false)
        }
    }

    pub fn reset(&mut self, q: usize, rng: &mut impl Rng) {
        if self.measure(q, rng).0 {
            self.x_gate(q);
        }
    }
}

/// Noiseless measurement record of one run; random outcomes drawn from `rng`.
pub fn run_noiseless(circuit: &Circuit, rng: &mut impl Rng) -> Vec<bool> {
    let mut t = Tableau::new(circuit.num_qubits());
    let mut rec = Vec::with_capacity(circuit.num_measurements());
    for ins in &circuit.instructions {
        let qs = ins.targets.iter().map(|&q| q as usize);
        match ins.op {
            Op::R => qs.for_each(|q| t.reset(q, rng)),
            Op::RX => qs.for_each(|q| {
                t.reset(q, rng);
                t.h(q);
            }),
            Op::M => qs.for_each(|q| rec.push(t.measure(q, rng).0)),
            Op::MX => qs.for_each(|q| {
                t.h(q);
                rec.push(t.measure(q, rng).0);
                t.h(q);
            }),
            Op::MR => qs.for_each(|q| {
                let m = t.measure(q, rng).0;
                rec.push(m);
                if m {
                    t.x_gate(q);
                }
            }),
            Op::MRX => qs.for_each(|q| {
                t.h(q);
                let m = t.measure(q, rng).0;
                rec.push(m);
                if m {
                    t.x_gate(q);
                }
                t.h(q);
            }),
            Op::CX => ins.targets.chunks(2).for_each(|p| t.cx(p[0] as usize, p[1] as usize)),
            Op::XCX => ins.targets.chunks(2).for_each(|p| t.xcx(p[0] as usize, p[1] as usize)),
            _ => {}
        }
    }
    rec
}

/// Runs the noiseless circuit `runs` times with independent random outcomes
/// and checks that every detector and observable is zero each time. A
/// detector that depends on a random outcome survives one run with
/// probability 1/2.
pub fn check_deterministic(circuit: &Circuit, runs: usize, seed: u64) -> Result<()> {
    let dets = circuit.detectors();
    let obs = circuit.observables();
    for run in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run as u64);
        let rec = run_noiseless(circuit, &mut rng);
        let parity = |recs: &[usize]| recs.iter().fold(false, |acc, &m| acc ^ rec[m]);
        if let Some((i, _)) = dets.iter().enumerate().find(|(_, d)| parity(&d.records)) {
            return Err(Error::Internal(format!("detector {i} {:?} fired in a noiseless run", dets[i].coords)));
        }
        if let Some(i) = obs.iter().position(|o| parity(o)) {
            return Err(Error::Internal(format!("observable {i} flipped in a noiseless run")));
        }
    }
    Ok(())
}
