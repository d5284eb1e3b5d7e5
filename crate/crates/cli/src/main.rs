//! `amc`: build, analyse, search, simulate and decode AMC codes.

mod config;
mod descriptor;
mod table1;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use amc::analysis::{code_params, confinement_profile, confinement_string, min_distance, CodeParams, DistanceMethod, ParamOptions};
use amc::circuit::{circuit_distance, circuit_element_order, extract_dem, Basis, Circuit, CircuitCode, Cycle, DetectorErrorModel, DetectorSet, MemoryOptions};
use amc::decoder::{count_failures, crossing_point, run_memory, DecoderConfig, WindowDecoder};
use amc::search::{search_best, SearchOptions};
use amc::sim::{read_packed, sample, sample_from_dem, write_packed, SampleHeader};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use descriptor::{CodeDescriptor, Provenance};

#[derive(Parser)]
#[command(name = "amc", version, about = "Abelian multi-cycle quantum CSS codes")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "THREADS")]
    threads: Option<usize>,
    /// `key = value` file supplying flags not given on the command line.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CircuitArgs {
    #[arg(long, default_value = "1212")]
    cycle: Cycle,
    #[arg(long, default_value = "z")]
    basis: Basis,
    /// Rounds including the final data readout.
    #[arg(long, default_value_t = 9)]
    rounds: usize,
    /// `both` or the memory basis letter.
    #[arg(long, default_value = "both")]
    detectors: DetectorSet,
}

impl CircuitArgs {
    fn options(&self) -> MemoryOptions {
        MemoryOptions { cycle: self.cycle, basis: self.basis, rounds: self.rounds, detectors: self.detectors }
    }
}

#[derive(Args, Clone)]
struct DecoderArgs {
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    /// Largest fault cluster matched by the pre-decoder; 0 disables it.
    #[arg(long, default_value_t = 2)]
    cluster_weight: usize,
    /// OSD-1 flips only the first S information-set columns.
    #[arg(long)]
    osd_sweep: Option<usize>,
}

impl DecoderArgs {
    fn config(&self) -> DecoderConfig {
        DecoderConfig { cluster_weight: self.cluster_weight, max_iter: self.max_iter, osd_sweep: self.osd_sweep }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build an AMC code and write its JSON descriptor.
    Build {
        /// `C7`, `C3xC5`, `C2^4`.
        #[arg(long)]
        group: String,
        /// Comma-separated elements, e.g. `1+x,1+x^2,1+x^3,1+x^4`.
        #[arg(long)]
        elems: String,
        #[arg(long, default_value_t = 2)]
        level: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print n, k, d, the distance bound, syndrome distance and κ.
    Params {
        code: PathBuf,
        #[arg(long, default_value = "exact:6,ris:100000")]
        distance: DistanceMethod,
        #[arg(long, default_value_t = 8)]
        syndrome_cap: usize,
        /// Confinement profile up to this weight; 0 skips it.
        #[arg(long, default_value_t = 0)]
        confine: usize,
    },
    /// Print the Z and X distances.
    Distance {
        code: PathBuf,
        #[arg(long, default_value = "exact:6,ris:100000")]
        method: DistanceMethod,
    },
    /// Print the confinement profile.
    Confine {
        code: PathBuf,
        #[arg(long, default_value_t = 5)]
        max_w: usize,
    },
    /// Best weight-2 cyclic code per ℓ.
    Search {
        /// `11`, `7-11` or `7,10,11`.
        #[arg(long)]
        ell: String,
        #[arg(long, default_value = "exact:6,ris:100000")]
        method: DistanceMethod,
        #[arg(long, default_value_t = 2000)]
        screen_trials: usize,
        #[arg(long, default_value_t = 0)]
        confine: usize,
        /// Keep tuples with any characteristic polynomial.
        #[arg(long)]
        all_h: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a memory circuit.
    Circuit {
        code: PathBuf,
        #[command(flatten)]
        circuit: CircuitArgs,
        /// Circuit noise strength; 0 writes the noiseless circuit.
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the detector error model of a noisy circuit.
    Dem {
        /// Code descriptor; the circuit is built from the flags below.
        code: Option<PathBuf>,
        /// Noisy circuit file instead of a code.
        #[arg(long, conflicts_with = "code")]
        circuit_file: Option<PathBuf>,
        #[command(flatten)]
        circuit: CircuitArgs,
        /// Noise added to the circuit.
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        /// Also print the circuit distance found by this method.
        #[arg(long)]
        circuit_distance: Option<DistanceMethod>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample detector and observable bits; writes FILE and FILE.json.
    Sample {
        code: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["code", "dem"])]
        circuit_file: Option<PathBuf>,
        /// Sample faults of a DEM independently instead of a circuit.
        #[arg(long, conflicts_with = "code")]
        dem: Option<PathBuf>,
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        #[arg(long)]
        shots: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode sampled shots against a DEM.
    Decode {
        #[arg(long)]
        dem: PathBuf,
        /// Packed samples written by `sample`.
        #[arg(long)]
        shots: PathBuf,
        /// Sliding-window length in rounds; the full block by default.
        #[arg(long)]
        window: Option<usize>,
        #[command(flatten)]
        decoder: DecoderArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rerun the smallest-code table and diff it against the bundled copy.
    Table1 {
        #[arg(long, default_value_t = 11)]
        max_ell: usize,
        #[arg(long, default_value = "exact:6,ris:100000")]
        method: DistanceMethod,
        /// Compare against this CSV instead of the bundled one.
        #[arg(long)]
        expected: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Logical error rate over a grid of p for a list of codes.
    Threshold {
        /// Comma-separated code descriptors.
        #[arg(long, value_delimiter = ',', required = true)]
        codes: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "0.006,0.008,0.01,0.012,0.014")]
        p_list: Vec<f64>,
        #[arg(long, default_value_t = 30000)]
        shots: usize,
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long)]
        window: Option<usize>,
        #[command(flatten)]
        decoder: DecoderArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Errors reported with exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Sidecar of a packed sample file.
#[derive(Serialize, Deserialize)]
struct SampleSidecar {
    provenance: Provenance,
    header: SampleHeader,
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_ells(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || usage(format!("bad ell `{part}`"));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(usage("empty ell list"));
    }
    Ok(out)
}

fn circuit_code(path: &Path) -> Result<(CodeDescriptor, CircuitCode)> {
    let (desc, loaded) = CodeDescriptor::load(path)?;
    if loaded.level != 2 || loaded.elements.len() != 4 {
        bail!("circuits need a level-2 code with four elements");
    }
    let cc = CircuitCode::new(&loaded.group, &circuit_element_order(&loaded.elements))?;
    Ok((desc, cc))
}

fn noisy(circuit: Circuit, p: f64) -> Result<Circuit> {
    Ok(if p > 0.0 { circuit.with_noise(p)? } else { circuit })
}

fn load_circuit(code: Option<&Path>, file: Option<&Path>, args: &CircuitArgs, p: f64) -> Result<Circuit> {
    match (code, file) {
        (Some(c), None) => noisy(circuit_code(c)?.1.memory_circuit(&args.options())?, p),
        (None, Some(f)) => {
            let text = std::fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
            noisy(Circuit::parse(&text)?, p)
        }
        _ => Err(usage("give either a code descriptor or --circuit-file")),
    }
}

fn load_dem(path: &Path) -> Result<DetectorErrorModel> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(DetectorErrorModel::parse(&text)?)
}

fn full_rounds(dem: &DetectorErrorModel) -> Result<usize> {
    let rounds = dem.detector_rounds().context("detector error model has no round coordinates")?;
    Ok(rounds.iter().max().map_or(1, |&r| r + 1))
}

fn run(cli: Cli, prov: Provenance) -> Result<ExitCode> {
    let seed = cli.seed;
    match cli.command {
        Command::Build { group, elems, level, out } => {
            let elements: Vec<String> = elems.split(',').map(|e| e.trim().to_string()).filter(|e| !e.is_empty()).collect();
            let (mut desc, _) = CodeDescriptor::build(&group, &elements, level)?;
            desc.provenance = Some(prov);
            eprintln!("{}: n={} k={}", desc.label(), desc.n, desc.k);
            emit(out.as_deref(), &(serde_json::to_string_pretty(&desc)? + "\n"))?;
        }
        Command::Params { code, distance, syndrome_cap, confine } => {
            let (_, loaded) = CodeDescriptor::load(&code)?;
            let opts = ParamOptions { method: distance.with_seed(seed), syndrome_cap, confinement_w: confine };
            let p = code_params(&loaded.group, &loaded.elements, loaded.level, &opts)?;
            print!("{}", params_text(&p));
        }
        Command::Distance { code, method } => {
            let (_, loaded) = CodeDescriptor::load(&code)?;
            let d = min_distance(&loaded.code, method.with_seed(seed))?;
            println!("dz={}\ndx={}\nd={}", d.dz, d.dx, d.d());
        }
        Command::Confine { code, max_w } => {
            let (_, loaded) = CodeDescriptor::load(&code)?;
            let profile = confinement_profile(&loaded.code, max_w)?;
            println!("w,min_syndrome_weight");
            for (w, v) in profile.iter().enumerate() {
                println!("{},{}", w + 1, v.map_or("-".into(), |x| x.to_string()));
            }
            println!("# confin \"{}\"", confinement_string(&profile));
        }
        Command::Search { ell, method, screen_trials, confine, all_h, out } => {
            let mut text = prov.header();
            text.push_str(CodeParams::CSV_HEADER);
            text.push('\n');
            for l in parse_ells(&ell)? {
                let opts = SearchOptions { method: method.with_seed(seed), screen_trials, seed, all_h, confinement_w: confine };
                let res = search_best(l, &opts)?;
                eprintln!("ell={l}: {:?} d={} ({} candidates, {} refined)", res.exponents, res.params.d, res.candidates, res.refined);
                let _ = writeln!(text, "{}", res.params.csv_row());
            }
            emit(out.as_deref(), &text)?;
        }
        Command::Circuit { code, circuit, p, out } => {
            let c = noisy(circuit_code(&code)?.1.memory_circuit(&circuit.options())?, p)?;
            emit(out.as_deref(), &(prov.header() + &c.to_text()))?;
        }
        Command::Dem { code, circuit_file, circuit, p, circuit_distance: method, out } => {
            let c = load_circuit(code.as_deref(), circuit_file.as_deref(), &circuit, p)?;
            let dem = extract_dem(&c)?;
            eprintln!("{} detectors, {} observables, {} faults", dem.num_detectors, dem.num_observables, dem.faults.len());
            if let Some(m) = method {
                eprintln!("circuit distance {}", circuit_distance(&dem, m.with_seed(seed))?);
            }
            emit(out.as_deref(), &(prov.header() + &dem.to_text()))?;
        }
        Command::Sample { code, circuit_file, dem, circuit, p, shots, out } => {
            let (samples, source) = match dem {
                Some(d) => (sample_from_dem(&load_dem(&d)?, shots, seed), format!("dem {}", d.display())),
                None => {
                    let c = load_circuit(code.as_deref(), circuit_file.as_deref(), &circuit, p)?;
                    (sample(&c, shots, seed)?, "circuit".to_string())
                }
            };
            let header = SampleHeader {
                shots,
                num_detectors: samples.detectors.cols(),
                num_observables: samples.observables.cols(),
                seed,
                p: (p > 0.0).then_some(p),
                source,
            };
            let mut file = std::io::BufWriter::new(std::fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?);
            write_packed(&samples, &mut file)?;
            std::io::Write::flush(&mut file)?;
            std::fs::write(sidecar_path(&out), serde_json::to_string_pretty(&SampleSidecar { provenance: prov, header })? + "\n")?;
        }
        Command::Decode { dem, shots, window, decoder, out } => {
            let dem = load_dem(&dem)?;
            let side: SampleSidecar = serde_json::from_str(&std::fs::read_to_string(sidecar_path(&shots)).with_context(|| format!("reading the sidecar of {}", shots.display()))?)?;
            let samples = read_packed(&side.header, std::fs::File::open(&shots)?)?;
            let t = window.unwrap_or(full_rounds(&dem)?);
            let start = Instant::now();
            let wd = WindowDecoder::new(&dem, t, decoder.config())?;
            let stats = count_failures(&wd, &samples)?;
            let wall = start.elapsed().as_secs_f64();
            eprintln!("window {} ({} windows); stages cluster/bp/osd {:?}", wd.size(), wd.num_windows(), stats.stages);
            let p = side.header.p.map_or(String::new(), |p| p.to_string());
            let text = format!("{}p,shots,fails,p_L,wall_s\n{p},{},{},{},{wall:.3}\n", prov.header(), stats.shots, stats.failures, stats.logical_error_rate());
            emit(out.as_deref(), &text)?;
        }
        Command::Table1 { max_ell, method, expected, out } => {
            let text = match &expected {
                Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
                None => table1::EXPECTED.to_string(),
            };
            let rows = table1::expected_rows(&text)?;
            let (reports, extra) = table1::check(&rows, max_ell, method, seed)?;
            let mut csv = prov.header() + "ell,status,mismatches\n";
            for r in &reports {
                let status = if r.pass() { "PASS" } else { "FAIL" };
                let mut line = format!("ell={} {status}", r.ell);
                if !r.pass() {
                    let _ = write!(line, ": {}", r.mismatches.join("; "));
                }
                if !r.notes.is_empty() {
                    let _ = write!(line, " [note: {}]", r.notes.join("; "));
                }
                if !r.unchecked.is_empty() {
                    let _ = write!(line, " (not recomputed: {})", r.unchecked.join(", "));
                }
                println!("{line}");
                let _ = writeln!(csv, "{},{status},\"{}\"", r.ell, r.mismatches.join("; "));
            }
            for note in &extra {
                println!("note: {note}");
                let _ = writeln!(csv, "# note: {note}");
            }
            if let Some(o) = out {
                emit(Some(&o), &csv)?;
            }
            if reports.iter().any(|r| !r.pass()) {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Threshold { codes, p_list, shots, circuit, window, decoder, out } => {
            let loaded: Vec<(CodeDescriptor, CircuitCode)> = codes.iter().map(|c| circuit_code(c)).collect::<Result<_>>()?;
            let mut text = prov.header() + "p,code,shots,fails,p_L\n";
            let mut curves = vec![Vec::new(); loaded.len()];
            for (i, &p) in p_list.iter().enumerate() {
                for (j, (desc, cc)) in loaded.iter().enumerate() {
                    let stats = run_memory(cc, &circuit.options(), p, shots, seed.wrapping_add(i as u64), window, decoder.config())?;
                    eprintln!("p={p} {}: {}/{} p_L={:.4}", desc.label(), stats.failures, stats.shots, stats.logical_error_rate());
                    let _ = writeln!(text, "{p},{},{},{},{}", desc.label(), stats.shots, stats.failures, stats.logical_error_rate());
                    curves[j].push(stats.logical_error_rate());
                }
            }
            if curves.len() >= 2 {
                match crossing_point(&p_list, &curves[0], &curves[1]) {
                    Some(x) => eprintln!("crossing of the first two codes at p = {x:.5}"),
                    None => eprintln!("the first two curves do not cross on this grid"),
                }
            }
            emit(out.as_deref(), &text)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn params_text(p: &CodeParams) -> String {
    let opt = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
    let mut s = format!("group={}\nelements={}\nn={}\nk={}\nd={}\n", p.group, p.elements.join(","), p.n, p.k, p.d);
    let _ = writeln!(s, "d_upper={}\nd_S={}\nkappa={}\nh={}", opt(p.d_upper), opt(p.d_syndrome), opt(p.kappa), p.h.as_deref().unwrap_or("-"));
    if !p.confinement.is_empty() {
        let _ = writeln!(s, "confin={}", confinement_string(&p.confinement));
    }
    s
}

fn main() -> ExitCode {
    let raw: Vec<OsString> = std::env::args_os().collect();
    let args = match config::merge(raw) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let words: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let prov = Provenance::new(&words, cli.seed);
    match run(cli, prov) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.downcast_ref::<UsageError>().is_some() { 2 } else { 1 })
        }
    }
}
