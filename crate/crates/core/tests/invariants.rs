//! Property tests for structural invariants, through the public API only.

use amc::analysis::{characteristic_poly, min_distance, predicted_rank, DistanceMethod};
use amc::circuit::{circuit_element_order, extract_dem, CircuitCode, MemoryOptions};
use amc::complex::{amc_build, binomial, tensor_product, ChainComplex};
use amc::css::CssCode;
use amc::decoder::{Decoder, DecoderConfig, DecoderGraph, Scratch};
use amc::gf2::BitMatrix;
use amc::group::{AbelianGroup, GroupAlgebraElement};
use amc::sim::sample;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_elements(g: &AbelianGroup, d: usize, rng: &mut impl Rng) -> Vec<GroupAlgebraElement> {
    (0..d)
        .map(|_| loop {
            let e = GroupAlgebraElement::from_indices(g, (0..g.order()).filter(|_| rng.gen_bool(0.5)));
            if !e.is_zero() {
                break e;
            }
        })
        .collect()
}

fn block_nonzero(m: &BitMatrix, l: usize, br: usize, bc: usize) -> bool {
    (0..l).any(|r| (0..l).any(|c| m.get(br * l + r, bc * l + c)))
}

fn rank_vector(c: &ChainComplex) -> Vec<usize> {
    (1..=c.length()).map(|j| c.boundary_rank(j)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn amc_complexes_have_the_multi_block_shape(seed in any::<u64>(), l in 2usize..=9, d in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = AbelianGroup::cyclic(l);
        let c = amc_build(&g, &random_elements(&g, d, &mut rng)).unwrap();
        prop_assert_eq!(c.dims().to_vec(), (0..=d).map(|j| binomial(d, j) * l).collect::<Vec<_>>());
        for j in 1..=d {
            let q = c.boundary(j).unwrap();
            if j < d {
                prop_assert!(q.mul(c.boundary(j + 1).unwrap()).is_zero());
            }
            for bc in 0..binomial(d, j) {
                prop_assert_eq!((0..binomial(d, j - 1)).filter(|&br| block_nonzero(q, l, br, bc)).count(), j);
            }
            for br in 0..binomial(d, j - 1) {
                prop_assert_eq!((0..binomial(d, j)).filter(|&bc| block_nonzero(q, l, br, bc)).count(), d + 1 - j);
            }
        }
    }

    #[test]
    fn block_order_and_hat_symmetries(seed in any::<u64>(), l in 2usize..=9, d in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = AbelianGroup::cyclic(l);
        let mut els = random_elements(&g, d, &mut rng);
        let c = amc_build(&g, &els).unwrap();
        let ranks = rank_vector(&c);
        let hats: Vec<_> = els.iter().map(GroupAlgebraElement::hat).collect();
        let mut reversed = rank_vector(&amc_build(&g, &hats).unwrap());
        reversed.reverse();
        prop_assert_eq!(&reversed, &ranks);
        els.shuffle(&mut rng);
        let shuffled = amc_build(&g, &els).unwrap();
        prop_assert_eq!(rank_vector(&shuffled), ranks);
        prop_assert_eq!(shuffled.homology_ranks(), c.homology_ranks());
    }

    #[test]
    fn cyclic_ranks_follow_kappa(seed in any::<u64>(), l in 2usize..=20, d in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = AbelianGroup::cyclic(l);
        let els = random_elements(&g, d, &mut rng);
        let polys: Vec<_> = els.iter().map(|e| e.to_poly().unwrap()).collect();
        let (_, kappa) = characteristic_poly(&polys, l).unwrap();
        let c = amc_build(&g, &els).unwrap();
        for j in 1..=d {
            prop_assert_eq!(c.boundary_rank(j), predicted_rank(d, j, l, kappa).unwrap());
        }
    }

    #[test]
    fn tensor_homology_is_kunneth(seed in any::<u64>(), la in 2usize..=9, lb in 2usize..=9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (ga, gb) = (AbelianGroup::cyclic(la), AbelianGroup::cyclic(lb));
        let a = amc_build(&ga, &random_elements(&ga, 2, &mut rng)).unwrap();
        let b = ChainComplex::one_complex(random_elements(&gb, 1, &mut rng)[0].regular_rep());
        let (ha, hb) = (a.homology_ranks(), b.homology_ranks());
        let t = tensor_product(&a, &b);
        for (j, &k) in t.homology_ranks().iter().enumerate() {
            let want: usize = (0..=j).filter(|&i| i < ha.len() && j - i < hb.len()).map(|i| ha[i] * hb[j - i]).sum();
            prop_assert_eq!(k, want, "level {}", j);
        }
    }

    #[test]
    fn ris_never_undercuts_exact(seed in any::<u64>(), n in 6usize..=16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hx = BitMatrix::from_fn(n / 3, n, |_, _| rng.gen_bool(0.4));
        let kernel = hx.kernel_basis();
        let hz = BitMatrix::from_rows(n, &kernel[..kernel.len() / 2]);
        let code = CssCode::new(hx, hz).unwrap();
        prop_assume!(code.k > 0);
        let exact = min_distance(&code, DistanceMethod::Exact { cap: n }).unwrap().d();
        let ris = min_distance(&code, DistanceMethod::Ris { trials: 200, seed }).unwrap().d();
        prop_assert!(ris.value().unwrap() >= exact.value().unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn decoder_corrections_reproduce_the_syndrome(seed in any::<u64>(), faults in 1usize..=6) {
        let g = AbelianGroup::cyclic(7);
        let els: Vec<_> = (1..=4).map(|e| GroupAlgebraElement::from_indices(&g, [0, e])).collect();
        let code = CircuitCode::new(&g, &circuit_element_order(&els)).unwrap();
        let circuit = code.memory_circuit(&MemoryOptions { rounds: 2, ..Default::default() }).unwrap().with_noise(0.002).unwrap();
        let graph = DecoderGraph::from_dem(&extract_dem(&circuit).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chosen: Vec<usize> = (0..faults).map(|_| rng.gen_range(0..graph.num_faults())).collect();
        let syndrome = graph.syndrome_of(&chosen);
        let decoder = Decoder::new(graph, DecoderConfig::default());
        let out = decoder.decode(&syndrome, &mut Scratch::default()).unwrap();
        prop_assert_eq!(decoder.graph().syndrome_of(&out.correction), syndrome);
        prop_assert_eq!(decoder.graph().observables_of(&out.correction), out.flips);
    }

    #[test]
    fn sampling_depends_only_on_the_seed(seed in any::<u64>()) {
        let g = AbelianGroup::cyclic(7);
        let els: Vec<_> = (1..=4).map(|e| GroupAlgebraElement::from_indices(&g, [0, e])).collect();
        let code = CircuitCode::new(&g, &circuit_element_order(&els)).unwrap();
        let circuit = code.memory_circuit(&MemoryOptions { rounds: 2, ..Default::default() }).unwrap().with_noise(0.01).unwrap();
        let a = sample(&circuit, 130, seed).unwrap();
        let b = sample(&circuit, 130, seed).unwrap();
        prop_assert_eq!(a.detectors, b.detectors);
        prop_assert_eq!(a.observables, b.observables);
    }
}
