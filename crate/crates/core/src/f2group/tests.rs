use std::collections::HashSet;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::f2linalg::BitVec;

fn even_vectors(g: usize) -> Vec<BitVec> {
    (1u64..1 << g)
        .filter(|b| b.count_ones() % 2 == 0)
        .map(|b| BitVec::from_bits(g, b).unwrap())
        .collect()
}

fn all_transvections(g: usize) -> GenSet {
    let gens = even_vectors(g)
        .iter()
        .map(|v| BitMat::transvection(v).unwrap())
        .collect();
    GenSet::new(g, gens).unwrap()
}

fn cfg() -> BsgsConfig {
    BsgsConfig::default()
}

fn random_element(rng: &mut ChaCha8Rng, g: usize) -> BitMat {
    let evens = even_vectors(g);
    let mut m = BitMat::identity(g).unwrap();
    for _ in 0..rng.gen_range(1..6) {
        let t = BitMat::transvection(&evens[rng.gen_range(0..evens.len())]).unwrap();
        m = m.mul(&t).unwrap();
    }
    m
}

#[test]
fn identity_group() {
    let gs = GenSet::new(5, vec![BitMat::identity(5).unwrap()]).unwrap();
    assert_eq!(bsgs_order(&gs, &cfg()).unwrap().0, BigUint::from(1u32));
    assert_eq!(brute_closure(&gs, 10).unwrap(), 1);
    let empty = GenSet::new(5, vec![]).unwrap();
    assert_eq!(bsgs_order(&empty, &cfg()).unwrap().0, BigUint::from(1u32));
}

#[test]
fn small_full_images() {
    for (g, want) in [(3, 6usize), (4, 48), (5, 720)] {
        let gs = all_transvections(g);
        assert_eq!(brute_closure(&gs, 100_000).unwrap(), want, "g={g}");
        assert_eq!(bsgs_order(&gs, &cfg()).unwrap().0, BigUint::from(want), "g={g}");
        assert_eq!(target_order(g), BigUint::from(want));
    }
}

#[test]
fn two_meeting_transvections_give_s3() {
    let a = BitVec::from_indices(6, &[1, 2]).unwrap();
    let b = BitVec::from_indices(6, &[2, 3]).unwrap();
    let gs = GenSet::new(
        6,
        vec![BitMat::transvection(&a).unwrap(), BitMat::transvection(&b).unwrap()],
    )
    .unwrap();
    assert_eq!(brute_closure(&gs, 100).unwrap(), 6);
    assert_eq!(bsgs_order(&gs, &cfg()).unwrap().0, BigUint::from(6u32));
}

#[test]
fn random_subsets_match_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for g in [5, 6] {
        for _ in 0..20 {
            let gens = vec![random_element(&mut rng, g), random_element(&mut rng, g)];
            let gs = GenSet::new(g, gens.clone()).unwrap();
            let brute = brute_closure(&gs, 100_000).unwrap();
            let (order, chain) = bsgs_order(&gs, &cfg()).unwrap();
            assert_eq!(order, BigUint::from(brute));
            assert!(gens.iter().all(|m| chain.contains(m)));
            // Lagrange against the first generator alone
            let sub = GenSet::new(g, gens[..1].to_vec()).unwrap();
            let (o1, _) = bsgs_order(&sub, &cfg()).unwrap();
            assert_eq!(&order % &o1, BigUint::from(0u32));
        }
    }
}

#[test]
fn membership_outside_proper_subgroup() {
    let g = 5;
    let sub_gens: Vec<BitMat> = [[1, 2], [2, 3], [3, 4]]
        .iter()
        .map(|ix| BitMat::transvection(&BitVec::from_indices(g, ix).unwrap()).unwrap())
        .collect();
    let sub = GenSet::new(g, sub_gens.clone()).unwrap();
    let (order, chain) = bsgs_order(&sub, &cfg()).unwrap();
    assert_eq!(order, BigUint::from(24u32));

    // enumerate both groups and pick an element of the big one outside the small one
    let enumerate = |gens: &[BitMat]| -> HashSet<BitMat> {
        let mut seen = HashSet::new();
        let mut stack = vec![BitMat::identity(g).unwrap()];
        while let Some(m) = stack.pop() {
            if seen.insert(m.clone()) {
                for s in gens {
                    stack.push(s.mul(&m).unwrap());
                }
            }
        }
        seen
    };
    let small = enumerate(&sub_gens);
    let big = enumerate(all_transvections(g).gens());
    assert_eq!(small.len(), 24);
    assert!(small.iter().all(|m| membership(m, &chain)));
    let outside = big.iter().find(|m| !small.contains(*m)).unwrap();
    assert!(outside.preserves_form());
    assert!(!membership(outside, &chain));
}

#[test]
fn same_group_decisions() {
    let full = all_transvections(5);
    assert!(same_group(&full, &full, &cfg()).unwrap());
    let chain_gens: Vec<BitMat> = [&[1, 2][..], &[2, 3], &[3, 4], &[4, 5], &[1, 2, 3, 4]]
        .iter()
        .map(|ix| BitMat::transvection(&BitVec::from_indices(5, ix).unwrap()).unwrap())
        .collect();
    let cg = GenSet::new(5, chain_gens.clone()).unwrap();
    assert!(same_group(&cg, &full, &cfg()).unwrap());
    let fewer = GenSet::new(5, chain_gens[..4].to_vec()).unwrap();
    let cmp = compare_groups(&fewer, &full, &cfg(), false).unwrap();
    assert!(!cmp.same && cmp.a_in_b && !cmp.b_in_a);
}

#[test]
fn target_orders() {
    assert_eq!(target_order(9), "47377612800".parse::<BigUint>().unwrap());
    // 2^9 * 3 * 15 * 63 * 2^7
    assert_eq!(target_order(8), BigUint::from(185_794_560u64));
}

#[test]
fn cap_is_enforced() {
    let gs = GenSet::new(22, vec![BitMat::identity(22).unwrap()]).unwrap();
    let err = bsgs_order(&gs, &BsgsConfig::default()).unwrap_err();
    assert!(matches!(err, GroupError::CapExceeded { dim: 22, cap: 21, .. }));
    assert!(err.to_string().contains("MiB"));
    assert!(bsgs_order(&gs, &BsgsConfig::default().forced(true)).is_ok());
    let raised = BsgsConfig { cap: Some(22), ..BsgsConfig::default() };
    assert!(bsgs_order(&gs, &raised).is_ok());
}

#[test]
fn rejects_bad_generators() {
    let mut imgs: Vec<BitVec> = (1..=4).map(|i| BitVec::basis(4, i).unwrap()).collect();
    imgs[0] = BitVec::from_indices(4, &[1, 2]).unwrap();
    let shear = BitMat::from_images(&imgs).unwrap();
    assert!(matches!(
        GenSet::new(4, vec![shear]),
        Err(GroupError::NotFormPreserving(0))
    ));
}
