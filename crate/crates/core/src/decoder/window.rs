use std::collections::HashMap;

use rayon::prelude::*;

use crate::circuit::DetectorErrorModel;
use crate::error::{Error, Result};
use crate::sim::Samples;

use super::{Decoder, DecoderConfig, DecoderGraph, Scratch, Stage};

struct Window {
    decoder: Decoder,
    /// Global index of each local detector.
    detectors: Vec<u32>,
    /// Global index of each local fault.
    faults: Vec<u32>,
    commit: Vec<bool>,
}

/// One-step sliding-window decoder over detector rounds.
///
/// A fault belongs to the earliest round among its detectors. The window
/// starting at round `t` holds the detectors of rounds `t..t+T` and the
/// faults that belong to those rounds; detectors past the trailing edge are
/// dropped from their signatures. Only faults of round `t` are committed,
/// except in the last window, which commits everything it holds. Committed
/// faults flip their full signatures in the running syndrome, so later
/// windows see the updated data. With `T` equal to the number of rounds
/// there is a single window identical to the full model.
pub struct WindowDecoder {
    rounds: usize,
    size: usize,
    num_detectors: usize,
    num_observables: usize,
    fault_detectors: Vec<Vec<u32>>,
    fault_observables: Vec<Vec<u32>>,
    windows: Vec<Window>,
}

impl WindowDecoder {
    /// Detector rounds come from the first detector coordinate. A window
    /// longer than the experiment is clamped to it with a warning.
    pub fn new(dem: &DetectorErrorModel, size: usize, config: DecoderConfig) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidArgument("window size must be at least 1".into()));
        }
        let det_round = dem.detector_rounds().ok_or_else(|| Error::InvalidArgument("detector error model has no round coordinates".into()))?;
        let rounds = det_round.iter().max().map_or(1, |&r| r + 1);
        let size = if size > rounds {
            log::warn!("window of {size} rounds exceeds the {rounds} available; decoding the full block");
            rounds
        } else {
            size
        };
        let fault_round: Vec<Option<usize>> = dem.faults.iter().map(|f| f.detectors.iter().map(|&d| det_round[d as usize]).min()).collect();
        let mut windows = Vec::new();
        for t in 0..=rounds - size {
            let last = t == rounds - size;
            let inside = |r: usize| r >= t && r < t + size;
            let mut local = vec![u32::MAX; dem.num_detectors];
            let mut detectors = Vec::new();
            for (d, &r) in det_round.iter().enumerate() {
                if inside(r) {
                    local[d] = detectors.len() as u32;
                    detectors.push(d as u32);
                }
            }
            // Truncation can make signatures coincide; such faults share one
            // column carrying their combined probability, represented by the
            // most likely member.
            let mut merged: HashMap<Vec<u32>, usize> = HashMap::new();
            let mut faults: Vec<u32> = Vec::new();
            let mut commit = Vec::new();
            let mut cols: Vec<(f64, Vec<u32>, Vec<u32>)> = Vec::new();
            for (f, fault) in dem.faults.iter().enumerate() {
                let Some(r) = fault_round[f].filter(|&r| inside(r)) else { continue };
                let dets: Vec<u32> = fault.detectors.iter().filter(|&&d| inside(det_round[d as usize])).map(|&d| local[d as usize]).collect();
                if let Some(&c) = merged.get(&dets) {
                    let q = cols[c].0;
                    cols[c].0 = q * (1.0 - fault.p) + (1.0 - q) * fault.p;
                    if fault.p > dem.faults[faults[c] as usize].p {
                        faults[c] = f as u32;
                        commit[c] = last || r == t;
                        cols[c].2 = fault.observables.clone();
                    }
                    continue;
                }
                merged.insert(dets.clone(), cols.len());
                faults.push(f as u32);
                commit.push(last || r == t);
                cols.push((fault.p, dets, fault.observables.clone()));
            }
            let graph = DecoderGraph::from_faults(detectors.len(), dem.num_observables, cols)?;
            windows.push(Window { decoder: Decoder::new(graph, config), detectors, faults, commit });
        }
        Ok(Self {
            rounds,
            size,
            num_detectors: dem.num_detectors,
            num_observables: dem.num_observables,
            fault_detectors: dem.faults.iter().map(|f| f.detectors.clone()).collect(),
            fault_observables: dem.faults.iter().map(|f| f.observables.clone()).collect(),
            windows,
        })
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Window length after clamping.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_windows(&self) -> usize {
        self.windows.len()
    }

    pub fn num_detectors(&self) -> usize {
        self.num_detectors
    }

    pub fn num_observables(&self) -> usize {
        self.num_observables
    }

    /// Graph of window `i`.
    pub fn window_graph(&self, i: usize) -> &DecoderGraph {
        self.windows[i].decoder.graph()
    }

    /// Predicted observable flips and the number of window decodes finished
    /// by each stage (cluster, BP, OSD).
    pub fn decode(&self, syndrome: &[bool], scratch: &mut Scratch) -> Result<(Vec<bool>, [usize; 3])> {
        if syndrome.len() != self.num_detectors {
            return Err(Error::Shape(format!("syndrome length {} vs {} detectors", syndrome.len(), self.num_detectors)));
        }
        let mut s = syndrome.to_vec();
        let mut flips = vec![false; self.num_observables];
        let mut stages = [0usize; 3];
        for w in &self.windows {
            let local: Vec<bool> = w.detectors.iter().map(|&d| s[d as usize]).collect();
            let out = w.decoder.decode(&local, scratch)?;
            stages[match out.stage {
                Stage::Cluster => 0,
                Stage::Bp => 1,
                Stage::Osd => 2,
            }] += 1;
            for &c in &out.correction {
                if !w.commit[c] {
                    continue;
                }
                let f = w.faults[c] as usize;
                for &d in &self.fault_detectors[f] {
                    s[d as usize] ^= true;
                }
                for &o in &self.fault_observables[f] {
                    flips[o as usize] ^= true;
                }
            }
        }
        if s.iter().any(|&b| b) {
            return Err(Error::Internal("sliding window left a nonzero residual syndrome".into()));
        }
        Ok((flips, stages))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecodeStats {
    pub shots: usize,
    pub failures: usize,
    /// Window decodes finished by the pre-decoder, BP and OSD.
    pub stages: [usize; 3],
}

impl DecodeStats {
    pub fn logical_error_rate(&self) -> f64 {
        self.failures as f64 / self.shots as f64
    }

    /// Binomial standard error of the logical error rate.
    pub fn std_error(&self) -> f64 {
        let p = self.logical_error_rate();
        (p * (1.0 - p) / self.shots as f64).sqrt()
    }
}

/// Decodes every shot in parallel. A shot fails when any predicted
/// observable differs from the sampled one.
pub fn count_failures(decoder: &WindowDecoder, samples: &Samples) -> Result<DecodeStats> {
    if samples.detectors.cols() != decoder.num_detectors || samples.observables.cols() != decoder.num_observables {
        return Err(Error::Shape("samples do not match the decoder's detector error model".into()));
    }
    let per_shot = (0..samples.num_shots())
        .into_par_iter()
        .map_init(Scratch::default, |scratch, shot| {
            let syndrome: Vec<bool> = (0..decoder.num_detectors).map(|d| samples.detectors.get(shot, d)).collect();
            let (flips, stages) = decoder.decode(&syndrome, scratch)?;
            let fail = flips.iter().enumerate().any(|(o, &b)| b != samples.observables.get(shot, o));
            Ok((fail, stages))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut stats = DecodeStats { shots: per_shot.len(), ..Default::default() };
    for (fail, st) in per_shot {
        stats.failures += fail as usize;
        for i in 0..3 {
            stats.stages[i] += st[i];
        }
    }
    Ok(stats)
}
