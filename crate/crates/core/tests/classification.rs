use entdex_core::classify::{
    classify, embed_product, entanglement_index, extract_factors, finest_factorization,
    finest_factorization_exhaustive, minimal_pure_subset,
};
use entdex_core::construct::{
    ghz, ghz_product, random_local_unitary, seeded_rng, DressedProductSpec,
};
use entdex_core::partitions::{enumerate_partitions, IntegerPartition};
use entdex_core::statecore::{
    apply_local_unitary, marginal_purity, permute_qubits, tensor, QubitSet,
};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

const TOL: f64 = 1e-9;

fn dressed(shape: &IntegerPartition, seed: u64) -> entdex_core::GhzProduct {
    let mut rng = seeded_rng(seed);
    let mut perm: Vec<usize> = (0..shape.total()).collect();
    perm.shuffle(&mut rng);
    ghz_product(
        &DressedProductSpec::new(shape.clone())
            .with_perm(perm)
            .with_lu_seed(rng.random()),
    )
    .unwrap()
}

fn all_subsets(n: usize) -> impl Iterator<Item = QubitSet> {
    (1u32..(1 << n)).map(move |m| QubitSet::new((0..n).filter(|q| m >> q & 1 == 1)).unwrap())
}

#[test]
fn ghz_marginals_are_half_pure() {
    for n in 2..=7 {
        let g = ghz(n).unwrap();
        for s in all_subsets(n).filter(|s| s.len() < n) {
            let p = marginal_purity(&g, &s).unwrap();
            assert!((p - 0.5).abs() < 1e-9, "n={n} {s}: {p}");
        }
    }
}

#[test]
fn dressed_blocks_stay_pure() {
    for shape in enumerate_partitions(6).unwrap() {
        for seed in 0..5 {
            let p = dressed(&shape, seed);
            for b in p.blocks.blocks() {
                assert!((marginal_purity(&p.state, b).unwrap() - 1.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn minimal_blocks_match_ground_truth() {
    for n in 1..=6 {
        for shape in enumerate_partitions(n).unwrap() {
            let p = dressed(&shape, n as u64 * 31);
            for q in 0..n {
                assert_eq!(
                    &minimal_pure_subset(&p.state, q, TOL).unwrap(),
                    p.blocks.block_of(q).unwrap()
                );
            }
        }
    }
}

#[test]
fn pruned_scan_agrees_with_exhaustive_scan() {
    for n in 1..=7 {
        for shape in enumerate_partitions(n).unwrap() {
            for seed in 0..3 {
                let p = dressed(&shape, seed + 1000);
                let pruned = finest_factorization(&p.state, TOL).unwrap();
                let full = finest_factorization_exhaustive(&p.state, TOL).unwrap();
                assert_eq!(pruned, full);
                assert_eq!(pruned, p.blocks);
            }
        }
    }
}

#[test]
fn local_unitary_invariance() {
    let mut rng = seeded_rng(77);
    for n in 2..=6 {
        for shape in enumerate_partitions(n).unwrap() {
            let p = dressed(&shape, rng.random());
            let u = random_local_unitary(n, &mut rng);
            let a = classify(&p.state, TOL).unwrap();
            let b = classify(&apply_local_unitary(&p.state, &u).unwrap(), TOL).unwrap();
            assert_eq!(a.blocks, b.blocks);
            assert_eq!(a.shape, b.shape);
            assert_eq!(a.index, b.index);
        }
    }
}

#[test]
fn additivity_on_pairs() {
    let mut rng = seeded_rng(4);
    for _ in 0..40 {
        let n1 = rng.random_range(1..=4);
        let n2 = rng.random_range(1..=4);
        let s1 = enumerate_partitions(n1).unwrap();
        let s2 = enumerate_partitions(n2).unwrap();
        let a = dressed(s1.choose(&mut rng).unwrap(), rng.random());
        let b = dressed(s2.choose(&mut rng).unwrap(), rng.random());
        let ea = entanglement_index(&a.state, TOL).unwrap().get();
        let eb = entanglement_index(&b.state, TOL).unwrap().get();
        let eab = entanglement_index(&tensor(&a.state, &b.state).unwrap(), TOL)
            .unwrap()
            .get();
        assert_eq!(eab, ea + eb);
    }
}

#[test]
fn permutation_covariance() {
    let mut rng = seeded_rng(12);
    for n in 2..=6 {
        for shape in enumerate_partitions(n).unwrap() {
            let p = dressed(&shape, rng.random());
            let mut sigma: Vec<usize> = (0..n).collect();
            sigma.shuffle(&mut rng);
            let before = classify(&p.state, TOL).unwrap();
            let after = classify(&permute_qubits(&p.state, &sigma).unwrap(), TOL).unwrap();
            assert_eq!(after.blocks, before.blocks.permuted(&sigma).unwrap());
            assert_eq!(after.shape, before.shape);
            assert_eq!(after.index, before.index);
        }
    }
}

#[test]
fn factor_test_soundness() {
    // Every subset passing the purity test is a genuine tensor factor.
    for n in 2..=6 {
        for shape in enumerate_partitions(n).unwrap() {
            let p = dressed(&shape, 500 + n as u64);
            for s in all_subsets(n).filter(|s| s.len() < n) {
                if marginal_purity(&p.state, &s).unwrap() < 1.0 - TOL {
                    continue;
                }
                let (a, b) = extract_factors(&p.state, &s).unwrap();
                let back = embed_product(&a, &b, &s).unwrap();
                let d = back.distance(&p.state).unwrap();
                assert!(d <= 1e-4, "{shape} {s}: {d}");
                // and it is a union of ground-truth blocks
                for blk in p.blocks.blocks() {
                    assert!(blk.is_subset(&s) || blk.is_disjoint(&s));
                }
            }
        }
    }
}

#[test]
fn largest_register_is_tractable() {
    // ghz(12): the scan from qubit 0 must exhaust every proper subset.
    let g = ghz(12).unwrap();
    let r = classify(&g, TOL).unwrap();
    assert_eq!(r.index.get(), 11);
    let p = ghz_product(
        &DressedProductSpec::new(IntegerPartition::new(vec![5, 4, 3, 2]).unwrap()).with_lu_seed(1),
    )
    .unwrap();
    assert_eq!(
        classify(&p.state, TOL).unwrap().shape.parts(),
        &[5, 4, 3, 2]
    );
}

#[test]
fn w_states_are_one_block() {
    // Not LOCC-equivalent to GHZ, but no proper subset factors out.
    use entdex_core::statecore::PureState;
    use num_complex::Complex64;
    for n in 3..=6 {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        for q in 0..n {
            amps[1 << q] = Complex64::new(1.0, 0.0);
        }
        let w = PureState::normalized(n, amps).unwrap();
        let r = classify(&w, TOL).unwrap();
        assert_eq!(r.shape.parts(), &[n]);
        assert_eq!(r.index.get(), n - 1);
    }
}
