use super::DecoderGraph;

/// Largest `|tanh(r/2)|` of a check-to-fault message, about `|r| = 28`.
const MAX_PRODUCT: f64 = 1.0 - 1e-12;
/// Bounds on a fault's total likelihood ratio, `|LLR| ≤ 690`.
const MAX_RATIO: f64 = 1e300;
const MIN_RATIO: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq)]
pub struct BpOutput {
    /// Sorted fault indices of the hard decision.
    pub correction: Vec<usize>,
    pub converged: bool,
    /// Sweeps run; 0 when the prior hard decision already matches.
    pub iterations: usize,
    /// LLRs behind the returned decision; the running average when BP did
    /// not converge.
    pub llrs: Vec<f64>,
}

#[derive(Default)]
pub struct BpScratch {
    messages: Vec<f64>,
    total: Vec<f64>,
    /// Running product of `total` over sweeps as `mantissa · 2^exponent`,
    /// so the LLR sum is `−ln(product)` without a log per sweep.
    mantissa: Vec<f64>,
    exponent: Vec<i64>,
    ratio: Vec<f64>,
    t: Vec<f64>,
    suffix: Vec<f64>,
}

fn satisfies(graph: &DecoderGraph, syndrome: &[bool], flipped: impl Fn(usize) -> bool) -> bool {
    (0..graph.num_detectors()).all(|d| graph.detector_faults(d).iter().fold(false, |acc, &f| acc ^ flipped(f as usize)) == syndrome[d])
}

/// Splits `x > 0` into `(m, e)` with `m ∈ [1, 2)` and `x = m · 2^e`.
fn normalize(x: f64) -> (f64, i64) {
    let bits = x.to_bits();
    let e = ((bits >> 52) & 0x7ff) as i64 - 1023;
    (f64::from_bits((bits & !(0x7ff << 52)) | (1023 << 52)), e)
}

fn support(n: usize, flipped: impl Fn(usize) -> bool) -> Vec<usize> {
    (0..n).filter(|&f| flipped(f)).collect()
}

/// Sum-product belief propagation with a serial schedule over detectors in
/// index order. After every sweep the instantaneous and the averaged LLRs
/// are both tried as hard decisions, instantaneous first.
///
/// Messages are kept as likelihood ratios `λ = e^{−LLR}`, so a check update
/// `r = 2·atanh(Π tanh(q/2))` becomes `λ_r = (1 − P)/(1 + P)` with
/// `P = Π (1 − λ_q)/(1 + λ_q)` and needs no transcendental functions.
pub fn bp_decode(graph: &DecoderGraph, syndrome: &[bool], max_iter: usize, s: &mut BpScratch) -> BpOutput {
    let n = graph.num_faults();
    let m = graph.num_detectors();
    let priors = graph.priors();
    if satisfies(graph, syndrome, |f| priors[f] < 0.0) {
        return BpOutput { correction: support(n, |f| priors[f] < 0.0), converged: true, iterations: 0, llrs: priors.to_vec() };
    }
    s.total.clear();
    s.total.extend_from_slice(graph.prior_ratios());
    let edges: usize = (0..m).map(|d| graph.detector_faults(d).len()).sum();
    s.messages.clear();
    s.messages.resize(edges, 1.0);
    s.mantissa.clear();
    s.mantissa.resize(n, 1.0);
    s.exponent.clear();
    s.exponent.resize(n, 0);
    let max_deg = (0..m).map(|d| graph.detector_faults(d).len()).max().unwrap_or(0);
    s.ratio.resize(max_deg, 0.0);
    s.t.resize(max_deg, 0.0);
    s.suffix.resize(max_deg + 1, 1.0);
    for it in 1..=max_iter {
        let mut offset = 0;
        for (d, &fired) in syndrome.iter().enumerate() {
            let faults = graph.detector_faults(d);
            let deg = faults.len();
            let msgs = &mut s.messages[offset..offset + deg];
            offset += deg;
            let ratio = &mut s.ratio[..deg];
            let t = &mut s.t[..deg];
            for ((q, t), (&f, &msg)) in ratio.iter_mut().zip(t.iter_mut()).zip(faults.iter().zip(msgs.iter())) {
                *q = s.total[f as usize] / msg;
                *t = (1.0 - *q) / (1.0 + *q);
            }
            let suffix = &mut s.suffix[..deg + 1];
            suffix[deg] = 1.0;
            for e in (0..deg).rev() {
                suffix[e] = suffix[e + 1] * t[e];
            }
            let mut prefix = 1.0;
            for ((msg, &f), ((&q, &te), &suf)) in msgs.iter_mut().zip(faults).zip(ratio.iter().zip(t.iter()).zip(&suffix[1..])) {
                let mut prod = (prefix * suf).clamp(-MAX_PRODUCT, MAX_PRODUCT);
                if fired {
                    prod = -prod;
                }
                let r = (1.0 - prod) / (1.0 + prod);
                *msg = r;
                s.total[f as usize] = (q * r).clamp(MIN_RATIO, MAX_RATIO);
                prefix *= te;
            }
        }
        for ((m, e), &l) in s.mantissa.iter_mut().zip(s.exponent.iter_mut()).zip(&s.total) {
            let (nm, ne) = normalize(*m * l);
            *m = nm;
            *e += ne;
        }
        if satisfies(graph, syndrome, |f| s.total[f] > 1.0) {
            return BpOutput { correction: support(n, |f| s.total[f] > 1.0), converged: true, iterations: it, llrs: s.total.iter().map(|&l| -l.ln()).collect() };
        }
        // The averaged LLR is negative iff the product exceeds 1.
        let avg_flipped = |f: usize| s.exponent[f] > 0 || (s.exponent[f] == 0 && s.mantissa[f] > 1.0);
        if satisfies(graph, syndrome, avg_flipped) {
            return BpOutput { correction: support(n, avg_flipped), converged: true, iterations: it, llrs: averaged(s, it) };
        }
    }
    let llrs: Vec<f64> = if max_iter == 0 { priors.to_vec() } else { averaged(s, max_iter) };
    BpOutput { correction: support(n, |f| llrs[f] < 0.0), converged: false, iterations: max_iter, llrs }
}

fn averaged(s: &BpScratch, sweeps: usize) -> Vec<f64> {
    s.mantissa.iter().zip(&s.exponent).map(|(&m, &e)| -(m.ln() + e as f64 * std::f64::consts::LN_2) / sweeps as f64).collect()
}
