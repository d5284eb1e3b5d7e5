//! Syndrome decoding against a detector error model: a cluster pre-decoder,
//! serial belief propagation, OSD-1 and a one-step sliding window.

mod bp;
mod cluster;
mod osd;
mod window;

pub use bp::{bp_decode, BpOutput, BpScratch};
pub use cluster::ClusterTable;
pub use osd::{osd1, OsdScratch};
pub use window::{count_failures, DecodeStats, WindowDecoder};

use crate::circuit::{extract_dem, CircuitCode, DetectorErrorModel, MemoryOptions};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Tanner graph of a DEM: detectors are checks, faults are variables.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoderGraph {
    num_detectors: usize,
    num_observables: usize,
    fault_detectors: Vec<Vec<u32>>,
    fault_observables: Vec<Vec<u32>>,
    detector_faults: Vec<Vec<u32>>,
    priors: Vec<f64>,
    prior_ratios: Vec<f64>,
}

impl DecoderGraph {
    /// Columns follow the DEM fault order.
    pub fn from_dem(dem: &DetectorErrorModel) -> Result<Self> {
        Self::from_faults(dem.num_detectors, dem.num_observables, dem.faults.iter().map(|f| (f.p, f.detectors.clone(), f.observables.clone())))
    }

    pub fn from_faults(num_detectors: usize, num_observables: usize, faults: impl IntoIterator<Item = (f64, Vec<u32>, Vec<u32>)>) -> Result<Self> {
        let mut g = Self { num_detectors, num_observables, fault_detectors: Vec::new(), fault_observables: Vec::new(), detector_faults: vec![Vec::new(); num_detectors], priors: Vec::new(), prior_ratios: Vec::new() };
        for (p, dets, obs) in faults {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidArgument(format!("fault probability {p} outside (0, 1)")));
            }
            if let Some(&d) = dets.iter().find(|&&d| d as usize >= num_detectors) {
                return Err(Error::InvalidArgument(format!("detector {d} out of range")));
            }
            if let Some(&o) = obs.iter().find(|&&o| o as usize >= num_observables) {
                return Err(Error::InvalidArgument(format!("observable {o} out of range")));
            }
            let f = g.priors.len() as u32;
            for &d in &dets {
                g.detector_faults[d as usize].push(f);
            }
            g.fault_detectors.push(dets);
            g.fault_observables.push(obs);
            g.priors.push(((1.0 - p) / p).ln());
            g.prior_ratios.push(p / (1.0 - p));
        }
        Ok(g)
    }

    pub fn num_detectors(&self) -> usize {
        self.num_detectors
    }

    pub fn num_faults(&self) -> usize {
        self.priors.len()
    }

    pub fn num_observables(&self) -> usize {
        self.num_observables
    }

    /// `log((1 − p)/p)` per fault.
    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// `p/(1 − p)` per fault, the prior as a likelihood ratio.
    pub fn prior_ratios(&self) -> &[f64] {
        &self.prior_ratios
    }

    pub fn fault_detectors(&self, f: usize) -> &[u32] {
        &self.fault_detectors[f]
    }

    pub fn fault_observables(&self, f: usize) -> &[u32] {
        &self.fault_observables[f]
    }

    pub fn detector_faults(&self, d: usize) -> &[u32] {
        &self.detector_faults[d]
    }

    /// Detector × fault incidence.
    pub fn h_matrix(&self) -> BitMatrix {
        let rows: Vec<Vec<usize>> = self.detector_faults.iter().map(|fs| fs.iter().map(|&f| f as usize).collect()).collect();
        BitMatrix::from_row_supports(self.num_detectors, self.num_faults(), &rows)
    }

    /// Observable × fault incidence.
    pub fn l_matrix(&self) -> BitMatrix {
        let mut rows = vec![Vec::new(); self.num_observables];
        for (f, obs) in self.fault_observables.iter().enumerate() {
            for &o in obs {
                rows[o as usize].push(f);
            }
        }
        BitMatrix::from_row_supports(self.num_observables, self.num_faults(), &rows)
    }

    pub fn syndrome_of(&self, correction: &[usize]) -> Vec<bool> {
        let mut s = vec![false; self.num_detectors];
        for &f in correction {
            for &d in &self.fault_detectors[f] {
                s[d as usize] ^= true;
            }
        }
        s
    }

    pub fn observables_of(&self, correction: &[usize]) -> Vec<bool> {
        let mut o = vec![false; self.num_observables];
        for &f in correction {
            for &k in &self.fault_observables[f] {
                o[k as usize] ^= true;
            }
        }
        o
    }

    /// Sum of prior LLRs, the negative log-likelihood ratio of a correction.
    pub fn weight_of(&self, correction: &[usize]) -> f64 {
        correction.iter().map(|&f| self.priors[f]).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoderConfig {
    /// Largest cluster the pre-decoder matches; 0 disables it.
    pub cluster_weight: usize,
    pub max_iter: usize,
    /// Number of information-set columns flipped by OSD-1; `None` is all.
    pub osd_sweep: Option<usize>,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self { cluster_weight: 2, max_iter: 50, osd_sweep: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage {
    Cluster,
    Bp,
    Osd,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    /// Sorted fault indices.
    pub correction: Vec<usize>,
    pub flips: Vec<bool>,
    pub stage: Stage,
}

/// Per-thread buffers.
#[derive(Default)]
pub struct Scratch {
    pub bp: BpScratch,
    pub osd: OsdScratch,
}

/// Cluster → BP → OSD-1 cascade over one graph. Immutable once built.
pub struct Decoder {
    graph: DecoderGraph,
    clusters: ClusterTable,
    config: DecoderConfig,
}

impl Decoder {
    pub fn new(graph: DecoderGraph, config: DecoderConfig) -> Self {
        let clusters = ClusterTable::new(&graph, config.cluster_weight);
        Self { graph, clusters, config }
    }

    pub fn graph(&self) -> &DecoderGraph {
        &self.graph
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    pub fn decode(&self, syndrome: &[bool], scratch: &mut Scratch) -> Result<Decoded> {
        if syndrome.len() != self.graph.num_detectors {
            return Err(Error::Shape(format!("syndrome length {} vs {} detectors", syndrome.len(), self.graph.num_detectors)));
        }
        let (correction, stage) = if let Some(c) = self.clusters.lookup(&self.graph, syndrome) {
            (c, Stage::Cluster)
        } else {
            let out = bp_decode(&self.graph, syndrome, self.config.max_iter, &mut scratch.bp);
            if out.converged {
                (out.correction, Stage::Bp)
            } else {
                (osd1(&self.graph, &out.llrs, syndrome, self.config.osd_sweep, &mut scratch.osd)?, Stage::Osd)
            }
        };
        let flips = self.graph.observables_of(&correction);
        Ok(Decoded { correction, flips, stage })
    }
}

/// Builds the noisy memory circuit of `code`, samples it and decodes every
/// shot with a sliding window of `window` rounds (`None` for the full block).
pub fn run_memory(code: &CircuitCode, opts: &MemoryOptions, p: f64, shots: usize, seed: u64, window: Option<usize>, config: DecoderConfig) -> Result<DecodeStats> {
    let circuit = code.memory_circuit(opts)?.with_noise(p)?;
    let dem = extract_dem(&circuit)?;
    let samples = crate::sim::sample(&circuit, shots, seed)?;
    let decoder = WindowDecoder::new(&dem, window.unwrap_or(usize::MAX).min(opts.rounds), config)?;
    count_failures(&decoder, &samples)
}

/// Where two curves sampled on the same increasing grid cross: the first
/// sign change of `a − b`, linearly interpolated.
pub fn crossing_point(xs: &[f64], a: &[f64], b: &[f64]) -> Option<f64> {
    let diff: Vec<f64> = a.iter().zip(b).map(|(a, b)| a - b).collect();
    for i in 0..xs.len().min(diff.len()) {
        if diff[i] == 0.0 {
            return Some(xs[i]);
        }
        if i + 1 < diff.len().min(xs.len()) && diff[i] * diff[i + 1] < 0.0 {
            return Some(xs[i] + (xs[i + 1] - xs[i]) * diff[i] / (diff[i] - diff[i + 1]));
        }
    }
    None
}

#[cfg(test)]
mod tests;
