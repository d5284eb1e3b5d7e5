//! Pauli-frame sampling of noisy Clifford circuits, 64 shots per machine word.
//!
//! Each shot draws its faults from its own ChaCha8 stream (`seed`, stream =
//! shot index), so results do not depend on batching or thread count.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, DetectorErrorModel, Instruction, Op};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};

/// X and Z frame bits of every qubit, one lane per bit.
pub struct Frames {
    pub x: Vec<u64>,
    pub z: Vec<u64>,
}

impl Frames {
    pub fn new(num_qubits: usize) -> Self {
        Self { x: vec![0; num_qubits], z: vec![0; num_qubits] }
    }

    /// Pauli `pauli` (bit 0 = X, bit 1 = Z) on `q` for the lanes in `mask`.
    #[inline]
    pub fn apply_pauli(&mut self, q: usize, pauli: u8, mask: u64) {
        if pauli & 1 == 1 {
            self.x[q] ^= mask;
        }
        if pauli & 2 == 2 {
            self.z[q] ^= mask;
        }
    }
}

/// Propagates frames through `circuit`, calling `noise` at every noise
/// instruction. Returns the flip word of every measurement.
pub fn propagate(circuit: &Circuit, mut noise: impl FnMut(usize, &Instruction, &mut Frames)) -> Vec<u64> {
    let mut f = Frames::new(circuit.num_qubits());
    let mut rec = Vec::with_capacity(circuit.num_measurements());
    for (i, ins) in circuit.instructions.iter().enumerate() {
        let qs = ins.targets.iter().map(|&q| q as usize);
        match ins.op {
            Op::R | Op::RX => qs.for_each(|q| {
                f.x[q] = 0;
                f.z[q] = 0;
            }),
            Op::M => qs.for_each(|q| rec.push(f.x[q])),
            Op::MX => qs.for_each(|q| rec.push(f.z[q])),
            Op::MR => qs.for_each(|q| {
                rec.push(f.x[q]);
                f.x[q] = 0;
                f.z[q] = 0;
            }),
            Op::MRX => qs.for_each(|q| {
                rec.push(f.z[q]);
                f.x[q] = 0;
                f.z[q] = 0;
            }),
            Op::CX => {
                for p in ins.targets.chunks_exact(2) {
                    let (c, t) = (p[0] as usize, p[1] as usize);
                    f.x[t] ^= f.x[c];
                    f.z[c] ^= f.z[t];
                }
            }
            Op::XCX => {
                for p in ins.targets.chunks_exact(2) {
                    let (a, b) = (p[0] as usize, p[1] as usize);
                    let (za, zb) = (f.z[a], f.z[b]);
                    f.x[a] ^= zb;
                    f.x[b] ^= za;
                }
            }
            op if op.is_noise() => noise(i, ins, &mut f),
            _ => {}
        }
    }
    rec
}

/// Resolved detector and observable record sets of a circuit.
pub struct RecordSets {
    pub detectors: Vec<Vec<usize>>,
    pub observables: Vec<Vec<usize>>,
}

impl RecordSets {
    pub fn new(circuit: &Circuit) -> Self {
        Self { detectors: circuit.detectors().into_iter().map(|d| d.records).collect(), observables: circuit.observables() }
    }

    /// Detector and observable words from measurement flip words.
    pub fn words(&self, rec: &[u64]) -> (Vec<u64>, Vec<u64>) {
        let fold = |recs: &Vec<usize>| recs.iter().fold(0u64, |acc, &m| acc ^ rec[m]);
        (self.detectors.iter().map(fold).collect(), self.observables.iter().map(fold).collect())
    }
}

/// Number of sites of a noise instruction and the Paulis it can apply.
pub(crate) fn channel_paulis(op: Op) -> &'static [u8] {
    // Two-qubit Paulis pack the first qubit in bits 0-1 and the second in bits 2-3.
    const ONE: [u8; 3] = [1, 3, 2];
    const TWO: [u8; 15] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15];
    match op {
        Op::XError => &[1],
        Op::ZError => &[2],
        Op::Depolarize1 => &ONE,
        Op::Depolarize2 => &TWO,
        _ => &[],
    }
}

/// Gap to the next success of independent Bernoulli(p) trials.
#[inline]
fn geometric(rng: &mut ChaCha8Rng, p: f64) -> usize {
    if p >= 1.0 {
        return 0;
    }
    let u: f64 = 1.0 - rng.gen::<f64>();
    let g = (u.ln() / (1.0 - p).ln()).floor();
    if g >= usize::MAX as f64 {
        usize::MAX
    } else {
        g as usize
    }
}

pub(crate) fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// Shots × detectors and shots × observables bit tables.
#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    pub detectors: BitMatrix,
    pub observables: BitMatrix,
}

impl Samples {
    pub fn num_shots(&self) -> usize {
        self.detectors.rows()
    }

    fn from_batches(num_det: usize, num_obs: usize, shots: usize, batches: Vec<(Vec<u64>, Vec<u64>)>) -> Self {
        let mut detectors = BitMatrix::zeros(shots, num_det);
        let mut observables = BitMatrix::zeros(shots, num_obs);
        for (b, (dw, ow)) in batches.into_iter().enumerate() {
            for (table, words) in [(&mut detectors, dw), (&mut observables, ow)] {
                for (col, w) in words.into_iter().enumerate() {
                    let mut w = w;
                    while w != 0 {
                        let lane = w.trailing_zeros() as usize;
                        w &= w - 1;
                        let shot = b * 64 + lane;
                        if shot < shots {
                            table.set(shot, col, true);
                        }
                    }
                }
            }
        }
        Self { detectors, observables }
    }

    /// Shots in `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Samples {
        let rows: Vec<usize> = range.collect();
        Samples { detectors: self.detectors.select_rows(&rows), observables: self.observables.select_rows(&rows) }
    }
}

/// Samples `shots` runs of a noisy circuit.
pub fn sample(circuit: &Circuit, shots: usize, seed: u64) -> Result<Samples> {
    circuit.validate()?;
    let sets = RecordSets::new(circuit);
    let batches: Vec<(Vec<u64>, Vec<u64>)> = (0..shots.div_ceil(64))
        .into_par_iter()
        .map(|b| {
            let lanes = (shots - b * 64).min(64);
            let mut rngs: Vec<ChaCha8Rng> = (0..lanes).map(|j| shot_rng(seed, (b * 64 + j) as u64)).collect();
            let rec = propagate(circuit, |_, ins, f| {
                let p = ins.args[0];
                if p <= 0.0 {
                    return;
                }
                let paulis = channel_paulis(ins.op);
                let two = ins.op.is_two_qubit();
                let sites = if two { ins.targets.len() / 2 } else { ins.targets.len() };
                for (lane, rng) in rngs.iter_mut().enumerate() {
                    let mut s = geometric(rng, p);
                    while s < sites {
                        let pauli = paulis[rng.gen_range(0..paulis.len())];
                        if two {
                            f.apply_pauli(ins.targets[2 * s] as usize, pauli & 3, 1 << lane);
                            f.apply_pauli(ins.targets[2 * s + 1] as usize, pauli >> 2, 1 << lane);
                        } else {
                            f.apply_pauli(ins.targets[s] as usize, pauli, 1 << lane);
                        }
                        s = s.saturating_add(1).saturating_add(geometric(rng, p));
                    }
                }
            });
            sets.words(&rec)
        })
        .collect();
    Ok(Samples::from_batches(sets.detectors.len(), sets.observables.len(), shots, batches))
}

/// Samples `shots` runs by firing each fault of the model independently.
pub fn sample_from_dem(dem: &DetectorErrorModel, shots: usize, seed: u64) -> Samples {
    let p_max = dem.faults.iter().map(|f| f.p).fold(0.0f64, f64::max);
    let rows: Vec<(BitVec, BitVec)> = (0..shots)
        .into_par_iter()
        .map(|shot| {
            let mut det = BitVec::zeros(dem.num_detectors);
            let mut obs = BitVec::zeros(dem.num_observables);
            if p_max > 0.0 {
                let mut rng = shot_rng(seed, shot as u64);
                let mut i = geometric(&mut rng, p_max);
                while i < dem.faults.len() {
                    let f = &dem.faults[i];
                    if f.p >= p_max || rng.gen::<f64>() * p_max < f.p {
                        f.detectors.iter().for_each(|&d| det.toggle(d as usize));
                        f.observables.iter().for_each(|&o| obs.toggle(o as usize));
                    }
                    i = i.saturating_add(1).saturating_add(geometric(&mut rng, p_max));
                }
            }
            (det, obs)
        })
        .collect();
    let (d, o): (Vec<BitVec>, Vec<BitVec>) = rows.into_iter().unzip();
    Samples { detectors: BitMatrix::from_rows(dem.num_detectors, &d), observables: BitMatrix::from_rows(dem.num_observables, &o) }
}

/// Header written next to packed sample files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleHeader {
    pub shots: usize,
    pub num_detectors: usize,
    pub num_observables: usize,
    pub seed: u64,
    pub p: Option<f64>,
    pub source: String,
}

/// Writes one row per shot: detector bits then observable bits, packed
/// little-endian eight to a byte, each row padded to a whole byte.
pub fn write_packed(samples: &Samples, mut out: impl Write) -> Result<()> {
    let (nd, no) = (samples.detectors.cols(), samples.observables.cols());
    let mut row = vec![0u8; (nd + no).div_ceil(8)];
    for s in 0..samples.num_shots() {
        row.iter_mut().for_each(|b| *b = 0);
        for c in samples.detectors.row_support(s) {
            row[c / 8] |= 1 << (c % 8);
        }
        for c in samples.observables.row_support(s) {
            row[(nd + c) / 8] |= 1 << ((nd + c) % 8);
        }
        out.write_all(&row)?;
    }
    Ok(())
}

pub fn read_packed(header: &SampleHeader, mut input: impl Read) -> Result<Samples> {
    let (nd, no) = (header.num_detectors, header.num_observables);
    let width = (nd + no).div_ceil(8);
    let mut buf = Vec::new();
    input.read_to_end(&mut buf)?;
    if buf.len() != width * header.shots {
        return Err(Error::Parse(format!("packed samples have {} bytes, expected {}", buf.len(), width * header.shots)));
    }
    let mut detectors = BitMatrix::zeros(header.shots, nd);
    let mut observables = BitMatrix::zeros(header.shots, no);
    for (s, row) in buf.chunks_exact(width).enumerate() {
        for c in 0..nd + no {
            if row[c / 8] >> (c % 8) & 1 == 1 {
                if c < nd {
                    detectors.set(s, c, true);
                } else {
                    observables.set(s, c - nd, true);
                }
            }
        }
    }
    Ok(Samples { detectors, observables })
}
