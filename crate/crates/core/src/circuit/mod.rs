//! Stabilizer circuits for memory experiments, their detector error models,
//! and a small stabilizer-tableau checker.
//!
//! Circuits use a subset of the Stim text format: `R RX M MX MR MRX CX XCX`,
//! the noise channels `X_ERROR Z_ERROR DEPOLARIZE1 DEPOLARIZE2`, `TICK`,
//! `DETECTOR` and `OBSERVABLE_INCLUDE` with `rec[-k]` targets.

pub(crate) mod build;
mod dem;
pub mod tableau;

pub use build::{circuit_element_order, Basis, CircuitCode, Cycle, DetectorSet, DroppedChecks, MemoryOptions, RoundSchedule};
pub use dem::{circuit_distance, extract_dem, DemFault, DetectorErrorModel, DEM_PRUNE};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    R,
    RX,
    M,
    MX,
    MR,
    MRX,
    CX,
    XCX,
    XError,
    ZError,
    Depolarize1,
    Depolarize2,
    Tick,
    Detector,
    ObservableInclude,
}

impl Op {
    const ALL: [Op; 15] = [
        Op::R,
        Op::RX,
        Op::M,
        Op::MX,
        Op::MR,
        Op::MRX,
        Op::CX,
        Op::XCX,
        Op::XError,
        Op::ZError,
        Op::Depolarize1,
        Op::Depolarize2,
        Op::Tick,
        Op::Detector,
        Op::ObservableInclude,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Op::R => "R",
            Op::RX => "RX",
            Op::M => "M",
            Op::MX => "MX",
            Op::MR => "MR",
            Op::MRX => "MRX",
            Op::CX => "CX",
            Op::XCX => "XCX",
            Op::XError => "X_ERROR",
            Op::ZError => "Z_ERROR",
            Op::Depolarize1 => "DEPOLARIZE1",
            Op::Depolarize2 => "DEPOLARIZE2",
            Op::Tick => "TICK",
            Op::Detector => "DETECTOR",
            Op::ObservableInclude => "OBSERVABLE_INCLUDE",
        }
    }

    pub fn is_noise(self) -> bool {
        matches!(self, Op::XError | Op::ZError | Op::Depolarize1 | Op::Depolarize2)
    }

    pub fn is_two_qubit(self) -> bool {
        matches!(self, Op::CX | Op::XCX | Op::Depolarize2)
    }

    pub fn is_measurement(self) -> bool {
        matches!(self, Op::M | Op::MX | Op::MR | Op::MRX)
    }

    /// Operations whose targets are measurement-record lookbacks.
    pub fn targets_records(self) -> bool {
        matches!(self, Op::Detector | Op::ObservableInclude)
    }

    /// Operations acting on qubits that occupy a time slot.
    pub fn is_gate(self) -> bool {
        !self.is_noise() && !self.targets_records() && self != Op::Tick
    }
}

/// One instruction. Record targets hold the lookback `k` of `rec[-k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instruction {
    pub op: Op,
    pub args: Vec<f64>,
    pub targets: Vec<u32>,
}

impl Instruction {
    pub fn new(op: Op, args: Vec<f64>, targets: Vec<u32>) -> Self {
        Self { op, args, targets }
    }

    pub fn gate(op: Op, targets: Vec<u32>) -> Self {
        Self::new(op, Vec::new(), targets)
    }

    pub fn noise(op: Op, p: f64, targets: Vec<u32>) -> Self {
        Self::new(op, vec![p], targets)
    }

    pub fn tick() -> Self {
        Self::new(Op::Tick, Vec::new(), Vec::new())
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.op.name())?;
        if !self.args.is_empty() {
            let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
            write!(f, "({})", args.join(", "))?;
        }
        for t in &self.targets {
            if self.op.targets_records() {
                write!(f, " rec[-{t}]")?;
            } else {
                write!(f, " {t}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Instruction {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let line = line.trim();
        let bad = |msg: &str| Error::Parse(format!("{msg}: `{line}`"));
        let (head, rest) = match line.find(|c: char| c.is_whitespace() || c == '(') {
            Some(i) => line.split_at(i),
            None => (line, ""),
        };
        let op = Op::ALL.into_iter().find(|o| o.name() == head).ok_or_else(|| bad("unknown instruction"))?;
        let mut rest = rest.trim_start();
        let mut args = Vec::new();
        if let Some(stripped) = rest.strip_prefix('(') {
            let close = stripped.find(')').ok_or_else(|| bad("unclosed argument list"))?;
            for a in stripped[..close].split(',') {
                args.push(a.trim().parse::<f64>().map_err(|_| bad("bad argument"))?);
            }
            rest = &stripped[close + 1..];
        }
        let mut targets = Vec::new();
        for t in rest.split_whitespace() {
            let value = if op.targets_records() {
                t.strip_prefix("rec[-").and_then(|s| s.strip_suffix(']')).ok_or_else(|| bad("expected rec[-k] target"))?
            } else {
                t
            };
            targets.push(value.parse::<u32>().map_err(|_| bad("bad target"))?);
        }
        Ok(Instruction { op, args, targets })
    }
}

/// A detector or observable resolved to absolute measurement indices.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectorDef {
    pub coords: Vec<f64>,
    pub records: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    pub instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, ins: Instruction) {
        self.instructions.push(ins);
    }

    pub fn num_qubits(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| !i.op.targets_records())
            .flat_map(|i| i.targets.iter())
            .map(|&q| q as usize + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn num_measurements(&self) -> usize {
        self.instructions.iter().filter(|i| i.op.is_measurement()).map(|i| i.targets.len()).sum()
    }

    pub fn num_detectors(&self) -> usize {
        self.instructions.iter().filter(|i| i.op == Op::Detector).count()
    }

    pub fn num_observables(&self) -> usize {
        self.instructions.iter().filter(|i| i.op == Op::ObservableInclude).map(|i| i.args[0] as usize + 1).max().unwrap_or(0)
    }

    /// Detectors in order, with absolute record indices.
    pub fn detectors(&self) -> Vec<DetectorDef> {
        let mut out = Vec::new();
        let mut measured = 0usize;
        for ins in &self.instructions {
            if ins.op.is_measurement() {
                measured += ins.targets.len();
            } else if ins.op == Op::Detector {
                out.push(DetectorDef { coords: ins.args.clone(), records: ins.targets.iter().map(|&k| measured - k as usize).collect() });
            }
        }
        out
    }

    /// Observables as sets of absolute record indices; repeated records cancel.
    pub fn observables(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.num_observables()];
        let mut measured = 0usize;
        for ins in &self.instructions {
            if ins.op.is_measurement() {
                measured += ins.targets.len();
            } else if ins.op == Op::ObservableInclude {
                let obs = &mut out[ins.args[0] as usize];
                for &k in &ins.targets {
                    let r = measured - k as usize;
                    match obs.iter().position(|&x| x == r) {
                        Some(i) => {
                            obs.swap_remove(i);
                        }
                        None => obs.push(r),
                    }
                }
            }
        }
        for o in &mut out {
            o.sort_unstable();
        }
        out
    }

    /// Checks target arity, probabilities and record lookbacks.
    pub fn validate(&self) -> Result<()> {
        let mut measured = 0usize;
        for (line, ins) in self.instructions.iter().enumerate() {
            let bad = |msg: String| Error::InvalidArgument(format!("instruction {line} `{ins}`: {msg}"));
            if ins.op.is_two_qubit() && ins.targets.len() % 2 != 0 {
                return Err(bad("odd number of targets".into()));
            }
            if ins.op.is_noise() {
                if ins.args.len() != 1 || !(0.0..=1.0).contains(&ins.args[0]) {
                    return Err(bad("expected one probability in [0, 1]".into()));
                }
            }
            match ins.op {
                Op::Detector | Op::ObservableInclude => {
                    if ins.op == Op::ObservableInclude && (ins.args.len() != 1 || ins.args[0] < 0.0 || ins.args[0].fract() != 0.0) {
                        return Err(bad("expected one observable index".into()));
                    }
                    if let Some(&k) = ins.targets.iter().find(|&&k| k == 0 || k as usize > measured) {
                        return Err(bad(format!("record rec[-{k}] does not exist")));
                    }
                }
                op if op.is_measurement() => measured += ins.targets.len(),
                _ => {}
            }
        }
        Ok(())
    }

    /// Checks that no qubit is acted on twice between consecutive `TICK`s.
    pub fn check_moments(&self) -> Result<()> {
        let mut busy = std::collections::HashSet::new();
        for (line, ins) in self.instructions.iter().enumerate() {
            if ins.op == Op::Tick {
                busy.clear();
            } else if ins.op.is_gate() {
                if let Some(q) = ins.targets.iter().find(|&&q| !busy.insert(q)) {
                    return Err(Error::InvalidArgument(format!("instruction {line} `{ins}`: qubit {q} used twice in one moment")));
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for ins in &self.instructions {
            out.push_str(&ins.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the text format; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Circuit::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                c.push(line.parse()?);
            }
        }
        Ok(c)
    }

    /// The circuit with the standard circuit-level noise model at rate `p`:
    /// single-qubit depolarizing on the data qubits at the start of each
    /// round, two-qubit depolarizing after every two-qubit gate, and a flip in
    /// the measured basis before and after every measure-reset and before
    /// every final measurement. Data qubits are those measured but never
    /// measure-reset (all non-measure-reset qubits if nothing else is measured); a
    /// round starts at the first two-qubit gate after a reset or measure-reset.
    pub fn with_noise(&self, p: f64) -> Result<Circuit> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("noise rate {p} outside [0, 1)")));
        }
        if p == 0.0 {
            return Ok(self.clone());
        }
        let targets_of = |ops: &[Op]| -> std::collections::BTreeSet<u32> {
            self.instructions.iter().filter(|i| ops.contains(&i.op)).flat_map(|i| i.targets.iter().copied()).collect()
        };
        let ancillas = targets_of(&[Op::MR, Op::MRX]);
        let measured = targets_of(&[Op::M, Op::MX]);
        let data: Vec<u32> =
            (0..self.num_qubits() as u32).filter(|q| !ancillas.contains(q) && (measured.is_empty() || measured.contains(q))).collect();
        let mut out = Circuit::new();
        let mut round_start = true;
        for ins in &self.instructions {
            let flip = |op: Op| if matches!(op, Op::MX | Op::MRX) { Op::ZError } else { Op::XError };
            match ins.op {
                Op::CX | Op::XCX => {
                    if round_start && !data.is_empty() {
                        out.push(Instruction::noise(Op::Depolarize1, p, data.clone()));
                    }
                    round_start = false;
                    out.push(ins.clone());
                    out.push(Instruction::noise(Op::Depolarize2, p, ins.targets.clone()));
                }
                Op::MR | Op::MRX => {
                    out.push(Instruction::noise(flip(ins.op), p, ins.targets.clone()));
                    out.push(ins.clone());
                    out.push(Instruction::noise(flip(ins.op), p, ins.targets.clone()));
                    round_start = true;
                }
                Op::M | Op::MX => {
                    out.push(Instruction::noise(flip(ins.op), p, ins.targets.clone()));
                    out.push(ins.clone());
                }
                Op::R | Op::RX => {
                    out.push(ins.clone());
                    round_start = true;
                }
                _ => out.push(ins.clone()),
            }
        }
        Ok(out)
    }

    /// Number of elementary noise locations: qubits for single-qubit channels,
    /// pairs for two-qubit channels.
    pub fn noise_sites(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| i.op.is_noise())
            .map(|i| if i.op.is_two_qubit() { i.targets.len() / 2 } else { i.targets.len() })
            .sum()
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let text = "R 0 1 2\nRX 3\nTICK\nCX 0 2 1 2\nDEPOLARIZE2(0.001) 0 2 1 2\nXCX 3 2\nX_ERROR(1e-7) 2\nMR 2\nDETECTOR(0, 1, 5) rec[-1]\nM 0 1\nOBSERVABLE_INCLUDE(0) rec[-1] rec[-2]\n";
        let c = Circuit::parse(text).unwrap();
        let printed = c.to_text();
        assert_eq!(Circuit::parse(&printed).unwrap(), c);
        assert_eq!(c.instructions[6].args, vec![1e-7]);
        assert_eq!(c.num_qubits(), 4);
        assert_eq!(c.num_measurements(), 3);
        assert_eq!(c.detectors(), vec![DetectorDef { coords: vec![0.0, 1.0, 5.0], records: vec![0] }]);
        assert_eq!(c.observables(), vec![vec![1, 2]]);
        c.validate().unwrap();
    }

    #[test]
    fn validation_errors() {
        assert!(Circuit::parse("CX 0 1 1 2").unwrap().check_moments().is_err());
        assert!(Circuit::parse("CX 0 1\nTICK\nCX 1 2").unwrap().check_moments().is_ok());
        assert!(Circuit::parse("CX 0 1 2").unwrap().validate().is_err());
        assert!(Circuit::parse("M 0\nDETECTOR rec[-2]").unwrap().validate().is_err());
        assert!(Circuit::parse("X_ERROR(1.5) 0").unwrap().validate().is_err());
        assert!(Circuit::parse("FOO 1").is_err());
        assert!(Circuit::parse("DETECTOR 1").is_err());
    }

    #[test]
    fn noise_insertion() {
        let c = Circuit::parse("R 0 1 2\nTICK\nCX 0 2\nTICK\nCX 1 2\nTICK\nMR 2\nM 0 1").unwrap();
        let noisy = c.with_noise(0.01).unwrap();
        let ops: Vec<Op> = noisy.instructions.iter().map(|i| i.op).collect();
        use Op::*;
        assert_eq!(ops, vec![R, Tick, Depolarize1, CX, Depolarize2, Tick, CX, Depolarize2, Tick, XError, MR, XError, XError, M]);
        assert_eq!(noisy.instructions[2].targets, vec![0, 1]);
        assert_eq!(c.with_noise(0.0).unwrap(), c);
        assert!(c.with_noise(1.0).is_err());
    }
}
