//! Detector error models: every elementary fault of a noisy circuit reduced
//! to the detectors and observables it flips.
//!
//! Channels are split into independent Pauli faults: `X_ERROR(p)` and
//! `Z_ERROR(p)` give one fault of probability `p`, `DEPOLARIZE1(p)` three of
//! `p/3`, `DEPOLARIZE2(p)` fifteen of `p/15`. Faults with the same signature
//! are merged with `p₁(1−p₂) + p₂(1−p₁)`.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;

use crate::analysis::{DistanceMethod, DistanceValue, LogicalSearch, MAX_LOGICALS};
use crate::error::{Error, Result};
use crate::sim::{channel_paulis, propagate, RecordSets};

use super::Circuit;

/// Merged probabilities below this are dropped.
pub const DEM_PRUNE: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub struct DemFault {
    pub p: f64,
    pub detectors: Vec<u32>,
    pub observables: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DetectorErrorModel {
    pub num_detectors: usize,
    pub num_observables: usize,
    pub faults: Vec<DemFault>,
    /// Coordinates of every detector, possibly empty.
    pub detector_coords: Vec<Vec<f64>>,
}

/// One elementary fault: instruction, site and Pauli.
#[derive(Clone, Copy)]
struct Site {
    instruction: usize,
    site: usize,
    pauli: u8,
    p: f64,
}

/// `p₁(1−p₂) + p₂(1−p₁)` folded over ascending probabilities.
fn combine(mut ps: Vec<f64>) -> f64 {
    ps.sort_by(f64::total_cmp);
    ps.into_iter().fold(0.0, |acc, p| acc * (1.0 - p) + p * (1.0 - acc))
}

impl DetectorErrorModel {
    /// Builds a model from unmerged faults: merges equal signatures, drops
    /// empty signatures and probabilities below [`DEM_PRUNE`], and sorts.
    pub fn from_faults(num_detectors: usize, num_observables: usize, faults: impl IntoIterator<Item = DemFault>, detector_coords: Vec<Vec<f64>>) -> Self {
        let mut groups: HashMap<(Vec<u32>, Vec<u32>), Vec<f64>> = HashMap::new();
        for mut f in faults {
            f.detectors.sort_unstable();
            f.observables.sort_unstable();
            if f.detectors.is_empty() && f.observables.is_empty() {
                continue;
            }
            groups.entry((f.detectors, f.observables)).or_default().push(f.p);
        }
        let mut faults: Vec<DemFault> = groups
            .into_iter()
            .map(|((detectors, observables), ps)| DemFault { p: combine(ps), detectors, observables })
            .filter(|f| f.p >= DEM_PRUNE)
            .collect();
        faults.sort_by(|a, b| a.detectors.cmp(&b.detectors).then_with(|| a.observables.cmp(&b.observables)));
        Self { num_detectors, num_observables, faults, detector_coords }
    }

    /// Faults that flip an observable but no detector.
    pub fn undetectable_logicals(&self) -> Vec<usize> {
        self.faults.iter().enumerate().filter(|(_, f)| f.detectors.is_empty() && !f.observables.is_empty()).map(|(i, _)| i).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.faults {
            let _ = write!(out, "error({})", f.p);
            for d in &f.detectors {
                let _ = write!(out, " D{d}");
            }
            for o in &f.observables {
                let _ = write!(out, " L{o}");
            }
            out.push('\n');
        }
        for d in 0..self.num_detectors {
            let coords = self.detector_coords.get(d).filter(|c| !c.is_empty());
            match coords {
                Some(c) => {
                    let c: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                    let _ = writeln!(out, "detector({}) D{d}", c.join(", "));
                }
                None => {
                    let _ = writeln!(out, "detector D{d}");
                }
            }
        }
        for o in 0..self.num_observables {
            let _ = writeln!(out, "logical_observable L{o}");
        }
        out
    }

    /// Parses the text written by [`to_text`](Self::to_text); `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dem = DetectorErrorModel::default();
        let mut coords: Vec<(usize, Vec<f64>)> = Vec::new();
        let mut faults = Vec::new();
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Parse(format!("bad DEM line `{line}`"));
            let split = match (line.find('('), line.find(char::is_whitespace)) {
                (Some(open), Some(ws)) if open < ws => line.find(')').map_or(line.len(), |c| c + 1),
                (_, Some(ws)) => ws,
                (_, None) => line.len(),
            };
            let (head, rest) = line.split_at(split);
            let (name, args) = match head.split_once('(') {
                Some((n, a)) => (n, a.strip_suffix(')').ok_or_else(bad)?),
                None => (head, ""),
            };
            let args: Vec<f64> = if args.is_empty() { Vec::new() } else { args.split(',').map(|a| a.trim().parse().map_err(|_| bad())).collect::<Result<_>>()? };
            let mut dets = Vec::new();
            let mut obs = Vec::new();
            for t in rest.split_whitespace() {
                if let Some(d) = t.strip_prefix('D') {
                    dets.push(d.parse::<u32>().map_err(|_| bad())?);
                } else if let Some(o) = t.strip_prefix('L') {
                    obs.push(o.parse::<u32>().map_err(|_| bad())?);
                } else {
                    return Err(bad());
                }
            }
            if let Some(&d) = dets.iter().max() {
                dem.num_detectors = dem.num_detectors.max(d as usize + 1);
            }
            if let Some(&o) = obs.iter().max() {
                dem.num_observables = dem.num_observables.max(o as usize + 1);
            }
            match name {
                "error" => {
                    let p = *args.first().ok_or_else(bad)?;
                    if !(0.0..=1.0).contains(&p) {
                        return Err(bad());
                    }
                    faults.push(DemFault { p, detectors: dets, observables: obs });
                }
                "detector" => {
                    if dets.len() != 1 {
                        return Err(bad());
                    }
                    coords.push((dets[0] as usize, args));
                }
                "logical_observable" => {}
                _ => return Err(bad()),
            }
        }
        dem.faults = faults;
        if !coords.is_empty() {
            dem.detector_coords = vec![Vec::new(); dem.num_detectors];
            for (d, c) in coords {
                dem.detector_coords[d] = c;
            }
        }
        Ok(dem)
    }

    /// Round of each detector (first coordinate), if every detector has one.
    pub fn detector_rounds(&self) -> Option<Vec<usize>> {
        if self.detector_coords.len() != self.num_detectors {
            return None;
        }
        self.detector_coords.iter().map(|c| c.first().map(|&r| r as usize)).collect()
    }

    /// The model restricted to a subset of detectors, renumbered in order;
    /// faults left without detectors or observables disappear.
    pub fn restrict_detectors(&self, keep: &[bool]) -> DetectorErrorModel {
        let mut map = vec![u32::MAX; self.num_detectors];
        let mut next = 0;
        for (d, &k) in keep.iter().enumerate() {
            if k {
                map[d] = next;
                next += 1;
            }
        }
        let faults = self.faults.iter().map(|f| DemFault {
            p: f.p,
            detectors: f.detectors.iter().filter(|&&d| keep[d as usize]).map(|&d| map[d as usize]).collect(),
            observables: f.observables.clone(),
        });
        let coords = if self.detector_coords.len() == self.num_detectors {
            self.detector_coords.iter().zip(keep).filter(|(_, &k)| k).map(|(c, _)| c.clone()).collect()
        } else {
            Vec::new()
        };
        DetectorErrorModel::from_faults(next as usize, self.num_observables, faults, coords)
    }
}

impl fmt::Display for DetectorErrorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for DetectorErrorModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// The detector error model of a noisy circuit, by propagating every
/// elementary fault, 64 at a time, through the rest of the circuit.
pub fn extract_dem(circuit: &Circuit) -> Result<DetectorErrorModel> {
    circuit.validate()?;
    let mut sites = Vec::new();
    for (i, ins) in circuit.instructions.iter().enumerate() {
        if !ins.op.is_noise() || ins.args[0] <= 0.0 {
            continue;
        }
        let paulis = channel_paulis(ins.op);
        let p = ins.args[0] / paulis.len() as f64;
        let count = if ins.op.is_two_qubit() { ins.targets.len() / 2 } else { ins.targets.len() };
        for site in 0..count {
            for &pauli in paulis {
                sites.push(Site { instruction: i, site, pauli, p });
            }
        }
    }
    let sets = RecordSets::new(circuit);
    let faults: Vec<DemFault> = sites
        .par_chunks(64)
        .flat_map_iter(|batch| {
            let mut by_instruction: HashMap<usize, Vec<(usize, Site)>> = HashMap::new();
            for (lane, s) in batch.iter().enumerate() {
                by_instruction.entry(s.instruction).or_default().push((lane, *s));
            }
            let rec = propagate(circuit, |i, ins, f| {
                for (lane, s) in by_instruction.get(&i).into_iter().flatten() {
                    if ins.op.is_two_qubit() {
                        f.apply_pauli(ins.targets[2 * s.site] as usize, s.pauli & 3, 1 << lane);
                        f.apply_pauli(ins.targets[2 * s.site + 1] as usize, s.pauli >> 2, 1 << lane);
                    } else {
                        f.apply_pauli(ins.targets[s.site] as usize, s.pauli, 1 << lane);
                    }
                }
            });
            let (dw, ow) = sets.words(&rec);
            batch
                .iter()
                .enumerate()
                .map(|(lane, s)| DemFault {
                    p: s.p,
                    detectors: dw.iter().enumerate().filter(|(_, &w)| w >> lane & 1 == 1).map(|(d, _)| d as u32).collect(),
                    observables: ow.iter().enumerate().filter(|(_, &w)| w >> lane & 1 == 1).map(|(o, _)| o as u32).collect(),
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let coords = circuit.detectors().into_iter().map(|d| d.coords).collect();
    Ok(DetectorErrorModel::from_faults(sets.detectors.len(), sets.observables.len(), faults, coords))
}

/// Fewest faults whose detector flips cancel while some observable flips.
pub fn circuit_distance(dem: &DetectorErrorModel, method: DistanceMethod) -> Result<DistanceValue> {
    if dem.num_observables > MAX_LOGICALS {
        return Err(Error::InvalidArgument(format!("at most {MAX_LOGICALS} observables supported")));
    }
    let cols = dem.faults.iter().map(|f| f.detectors.clone()).collect();
    let labels = dem.faults.iter().map(|f| f.observables.iter().fold(0u128, |acc, &o| acc | 1 << o)).collect();
    let search = LogicalSearch::from_columns(dem.num_detectors, cols, labels, dem.num_observables)?;
    Ok(search.distance(method))
}
