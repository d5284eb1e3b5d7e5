use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::circuit::build::tests::code;
use crate::circuit::{extract_dem, Cycle, DetectorSet, MemoryOptions};
use crate::sim::sample_from_dem;

fn dem(rounds: usize, cycle: &str, detectors: DetectorSet, p: f64) -> DetectorErrorModel {
    let c = code("C7", &["1+x", "1+x^2", "1+x^3", "1+x^4"]);
    let opts = MemoryOptions { rounds, cycle: cycle.parse::<Cycle>().unwrap(), detectors, ..Default::default() };
    extract_dem(&c.memory_circuit(&opts).unwrap().with_noise(p).unwrap()).unwrap()
}

fn hand_graph(faults: &[(f64, &[u32], &[u32])], dets: usize) -> DecoderGraph {
    DecoderGraph::from_faults(dets, 1, faults.iter().map(|&(p, d, o)| (p, d.to_vec(), o.to_vec()))).unwrap()
}

fn random_syndrome(g: &DecoderGraph, faults: usize, rng: &mut impl Rng) -> (Vec<usize>, Vec<bool>) {
    let set: Vec<usize> = (0..faults).map(|_| rng.gen_range(0..g.num_faults())).collect();
    let s = g.syndrome_of(&set);
    (set, s)
}

#[test]
fn graph_matches_dem() {
    let d = dem(2, "1111", DetectorSet::Basis, 0.01);
    let g = DecoderGraph::from_dem(&d).unwrap();
    assert_eq!((g.num_detectors(), g.num_faults(), g.num_observables()), (d.num_detectors, d.faults.len(), 6));
    let h = g.h_matrix();
    let l = g.l_matrix();
    for (f, fault) in d.faults.iter().enumerate() {
        assert_eq!(h.column(f).support().map(|x| x as u32).collect::<Vec<_>>(), fault.detectors);
        assert_eq!(l.column(f).support().map(|x| x as u32).collect::<Vec<_>>(), fault.observables);
        assert!(g.priors()[f].is_finite() && g.priors()[f] > 0.0);
    }
    assert!(DecoderGraph::from_faults(2, 1, [(0.0, vec![0], vec![])]).is_err());
    assert!(DecoderGraph::from_faults(2, 1, [(0.1, vec![2], vec![])]).is_err());
}

#[test]
fn zero_syndrome_everywhere() {
    let g = DecoderGraph::from_dem(&dem(2, "1212", DetectorSet::Basis, 0.01)).unwrap();
    let zero = vec![false; g.num_detectors()];
    let mut s = Scratch::default();
    assert_eq!(ClusterTable::new(&g, 2).lookup(&g, &zero), Some(vec![]));
    let bp = bp_decode(&g, &zero, 50, &mut s.bp);
    assert!(bp.converged && bp.iterations == 0 && bp.correction.is_empty());
    assert!(osd1(&g, g.priors(), &zero, None, &mut s.osd).unwrap().is_empty());
    let out = Decoder::new(g.clone(), DecoderConfig::default()).decode(&zero, &mut s).unwrap();
    assert!(out.correction.is_empty() && out.flips.iter().all(|&b| !b));
}

#[test]
fn cluster_table_single_faults() {
    let g = DecoderGraph::from_dem(&dem(2, "1212", DetectorSet::Both, 0.01)).unwrap();
    let t = ClusterTable::new(&g, 2);
    for f in 0..g.num_faults() {
        let s = g.syndrome_of(&[f]);
        let c = t.lookup(&g, &s).unwrap_or_else(|| panic!("fault {f} missed"));
        assert_eq!(g.syndrome_of(&c), s);
        assert!(g.weight_of(&c) <= g.priors()[f] + 1e-12);
    }
}

#[test]
fn cluster_weight_three_only_misses() {
    // {0,3} is reachable only as the sum of all three faults.
    let g = hand_graph(&[(0.01, &[0, 1], &[]), (0.01, &[1, 2], &[]), (0.01, &[2, 3], &[0])], 4);
    let s = g.syndrome_of(&[0, 1, 2]);
    assert_eq!(ClusterTable::new(&g, 2).lookup(&g, &s), None);
    assert_eq!(ClusterTable::new(&g, 3).lookup(&g, &s), Some(vec![0, 1, 2]));
    assert_eq!(ClusterTable::new(&g, 0).lookup(&g, &g.syndrome_of(&[0])), None);
}

#[test]
fn cluster_prefers_lighter_pairs() {
    // The single fault {0,2} is rarer than the pair through detector 1.
    let g = hand_graph(&[(1e-6, &[0, 2], &[0]), (0.01, &[0, 1], &[]), (0.01, &[1, 2], &[])], 3);
    let t = ClusterTable::new(&g, 2);
    assert_eq!(t.lookup(&g, &g.syndrome_of(&[0])), Some(vec![1, 2]));
    assert_eq!(ClusterTable::new(&g, 1).lookup(&g, &g.syndrome_of(&[0])), Some(vec![0]));
}

#[test]
fn bp_single_faults_converge() {
    let g = DecoderGraph::from_dem(&dem(2, "1212", DetectorSet::Both, 0.001)).unwrap();
    let mut s = BpScratch::default();
    for f in 0..g.num_faults() {
        let syn = g.syndrome_of(&[f]);
        let out = bp_decode(&g, &syn, 50, &mut s);
        assert!(out.converged, "fault {f}");
        assert_eq!(g.syndrome_of(&out.correction), syn);
    }
}

#[test]
fn bp_failure_hands_over_averaged_llrs() {
    let g = DecoderGraph::from_dem(&dem(3, "1212", DetectorSet::Basis, 0.01)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut s = BpScratch::default();
    let mut found = false;
    for _ in 0..400 {
        let (_, syn) = random_syndrome(&g, 12, &mut rng);
        let out = bp_decode(&g, &syn, 50, &mut s);
        assert_eq!(out.llrs.len(), g.num_faults());
        if out.converged {
            assert_eq!(g.syndrome_of(&out.correction), syn);
        } else {
            assert_eq!(out.iterations, 50);
            assert!(out.llrs.iter().all(|l| l.is_finite()));
            found = true;
            break;
        }
    }
    assert!(found, "no BP failure found");
}

#[test]
fn bp_is_column_permutation_invariant() {
    let g = DecoderGraph::from_dem(&dem(2, "1234", DetectorSet::Basis, 0.01)).unwrap();
    let n = g.num_faults();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    // Column j of the permuted graph is column perm[j] of the original.
    let p = |f: usize| 1.0 / (1.0 + g.priors()[f].exp());
    let h = DecoderGraph::from_faults(g.num_detectors(), 6, perm.iter().map(|&f| (p(f), g.fault_detectors(f).to_vec(), g.fault_observables(f).to_vec()))).unwrap();
    let mut s = BpScratch::default();
    for _ in 0..20 {
        let (_, syn) = random_syndrome(&g, 6, &mut rng);
        let a = bp_decode(&g, &syn, 50, &mut s);
        let b = bp_decode(&h, &syn, 50, &mut s);
        assert_eq!(a.converged, b.converged);
        assert_eq!(a.iterations, b.iterations);
        for j in 0..n {
            assert!((a.llrs[perm[j]] - b.llrs[j]).abs() < 1e-6 * (1.0 + a.llrs[perm[j]].abs()));
        }
        let mut mapped: Vec<usize> = b.correction.iter().map(|&j| perm[j]).collect();
        mapped.sort_unstable();
        assert_eq!(mapped, a.correction);
    }
}

#[test]
fn osd_recovers_dominant_single_faults() {
    let base = DecoderGraph::from_dem(&dem(2, "1212", DetectorSet::Basis, 0.001)).unwrap();
    let mut s = OsdScratch::default();
    for f in (0..base.num_faults()).step_by(7) {
        let g = DecoderGraph::from_faults(base.num_detectors(), 6, (0..base.num_faults()).map(|i| (if i == f { 0.3 } else { 1e-3 }, base.fault_detectors(i).to_vec(), base.fault_observables(i).to_vec()))).unwrap();
        let syn = g.syndrome_of(&[f]);
        let llrs: Vec<f64> = g.priors().to_vec();
        assert_eq!(osd1(&g, &llrs, &syn, None, &mut s).unwrap(), vec![f]);
    }
}

#[test]
fn osd_order_one_is_never_heavier() {
    let g = DecoderGraph::from_dem(&dem(3, "1212", DetectorSet::Both, 0.01)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut s = Scratch::default();
    let mut improved = 0;
    for _ in 0..40 {
        let (_, syn) = random_syndrome(&g, 15, &mut rng);
        let llrs = bp_decode(&g, &syn, 10, &mut s.bp).llrs;
        let c0 = osd1(&g, &llrs, &syn, Some(0), &mut s.osd).unwrap();
        let c1 = osd1(&g, &llrs, &syn, None, &mut s.osd).unwrap();
        assert_eq!(g.syndrome_of(&c0), syn);
        assert_eq!(g.syndrome_of(&c1), syn);
        assert!(g.weight_of(&c1) <= g.weight_of(&c0) + 1e-9);
        improved += (g.weight_of(&c1) < g.weight_of(&c0) - 1e-9) as usize;
    }
    assert!(improved > 0);
}

#[test]
fn osd_rejects_unmatchable_syndromes() {
    let g = hand_graph(&[(0.1, &[0], &[]), (0.1, &[0, 1], &[0])], 3);
    let mut s = OsdScratch::default();
    assert!(matches!(osd1(&g, g.priors(), &[false, false, true], None, &mut s), Err(Error::UnmatchableSyndrome)));
    assert_eq!(osd1(&g, g.priors(), &[false, true, false], None, &mut s).unwrap(), vec![0, 1]);
}

#[test]
fn cascade_is_valid_and_deterministic() {
    let d = dem(4, "1212", DetectorSet::Both, 0.005);
    let dec = Decoder::new(DecoderGraph::from_dem(&d).unwrap(), DecoderConfig::default());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut s = Scratch::default();
    let mut stages = std::collections::HashSet::new();
    for k in 0..60 {
        let (_, syn) = random_syndrome(dec.graph(), 1 + k % 12, &mut rng);
        let a = dec.decode(&syn, &mut s).unwrap();
        let b = dec.decode(&syn, &mut Scratch::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(dec.graph().syndrome_of(&a.correction), syn);
        assert_eq!(dec.graph().observables_of(&a.correction), a.flips);
        stages.insert(a.stage);
    }
    assert!(stages.contains(&Stage::Cluster) && stages.contains(&Stage::Osd));
}

#[test]
fn full_window_matches_full_decoding() {
    let d = dem(9, "1212", DetectorSet::Both, 0.003);
    let full = Decoder::new(DecoderGraph::from_dem(&d).unwrap(), DecoderConfig::default());
    let win = WindowDecoder::new(&d, 9, DecoderConfig::default()).unwrap();
    assert_eq!((win.rounds(), win.num_windows()), (9, 1));
    assert_eq!(win.window_graph(0), full.graph());
    let clamped = WindowDecoder::new(&d, 20, DecoderConfig::default()).unwrap();
    assert_eq!(clamped.size(), 9);
    let samples = sample_from_dem(&d, 300, 17);
    let mut s = Scratch::default();
    for shot in 0..samples.num_shots() {
        let syn: Vec<bool> = (0..d.num_detectors).map(|k| samples.detectors.get(shot, k)).collect();
        assert_eq!(win.decode(&syn, &mut s).unwrap().0, full.decode(&syn, &mut s).unwrap().flips);
    }
}

#[test]
fn short_windows_clear_the_syndrome() {
    let d = dem(5, "1234", DetectorSet::Both, 0.003);
    let samples = sample_from_dem(&d, 100, 3);
    for t in 1..=5 {
        let win = WindowDecoder::new(&d, t, DecoderConfig::default()).unwrap();
        assert_eq!(win.num_windows(), 6 - t);
        // decode() fails on a nonzero residual, so success means every
        // committed correction matched.
        let stats = count_failures(&win, &samples).unwrap();
        assert_eq!(stats.shots, 100);
        assert_eq!(stats.stages.iter().sum::<usize>(), 100 * (6 - t));
    }
    assert!(WindowDecoder::new(&d, 0, DecoderConfig::default()).is_err());
}

#[test]
fn crossing_interpolates_the_first_sign_change() {
    let xs = [1.0, 2.0, 3.0];
    assert_eq!(crossing_point(&xs, &[0.1, 0.4, 0.9], &[0.2, 0.3, 0.5]), Some(1.5));
    assert_eq!(crossing_point(&xs, &[0.1, 0.2, 0.3], &[0.2, 0.3, 0.4]), None);
    assert_eq!(crossing_point(&xs, &[0.1, 0.3, 0.9], &[0.2, 0.3, 0.5]), Some(2.0));
}

#[test]
fn memory_run_counts_every_shot() {
    let c = code("C7", &["1+x", "1+x^2", "1+x^3", "1+x^4"]);
    let opts = MemoryOptions { rounds: 3, ..Default::default() };
    let stats = run_memory(&c, &opts, 0.001, 64, 1, None, DecoderConfig::default()).unwrap();
    assert_eq!(stats.shots, 64);
    assert!(stats.failures <= 64 && stats.stages.iter().sum::<usize>() == 64);
    let windowed = run_memory(&c, &opts, 0.001, 64, 1, Some(1), DecoderConfig::default()).unwrap();
    assert_eq!(windowed.stages.iter().sum::<usize>(), 64 * 3);
}
