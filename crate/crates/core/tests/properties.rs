use std::f64::consts::{PI, TAU};

use orthoflow::action_engine::{act_from_slice, act_product, decompose, standard_k_act, ProductSpherePoint};
use orthoflow::circleflow::{make_flow, FlowFunctionPair, FlowKind, ProjectivePoint};
use orthoflow::ledger::root_partition;
use orthoflow::numkit::{DenseMatrix, Tolerances};
use orthoflow::sampling::{random_group, random_rotation, random_unit, rng};
use orthoflow::sopq::{embed_k, involution, GroupElement, Signature};
use proptest::prelude::*;

fn sig33() -> Signature {
    Signature::new(3, 3).unwrap()
}

fn pair(a: f64) -> FlowFunctionPair {
    FlowFunctionPair::new(make_flow(FlowKind::BasicJ1, 1, a).unwrap())
}

/// block-diag(1, R) with R a random rotation of the remaining coordinates.
fn fixing_first(seed: u64, n: usize) -> DenseMatrix {
    let r = random_rotation(&mut rng(seed), n - 1);
    let mut m = DenseMatrix::identity(n);
    for i in 1..n {
        for j in 1..n {
            m[(i, j)] = r[(i - 1, j - 1)];
        }
    }
    m
}

fn random_point(seed: u64, sig: Signature) -> ProductSpherePoint {
    let mut r = rng(seed);
    let v = random_unit(&mut r, sig.p() + 1);
    let w = random_unit(&mut r, sig.q());
    ProductSpherePoint::new(v, w).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn representative_choice_does_not_matter(seed in any::<u64>(), phi in 0.05f64..(PI - 0.05), a in -0.6f64..0.6) {
        let (sig, tol, pair) = (sig33(), Tolerances::default(), pair(a));
        let g = random_group(sig, &mut rng(seed), 1.5);
        let mut r = rng(seed ^ 1);
        let k0 = embed_k(sig, &random_rotation(&mut r, 3), &random_rotation(&mut r, 3), &tol).unwrap();
        let base = act_from_slice(&g, &k0, phi, &pair, &tol).unwrap();
        let flipped = act_from_slice(&g, &k0.compose(&involution(sig, 1)), PI - phi, &pair, &tol).unwrap();
        prop_assert!(base.distance(&flipped) <= 1e-8);
        let s = embed_k(sig, &fixing_first(seed ^ 2, 3), &fixing_first(seed ^ 3, 3), &tol).unwrap();
        let stab = act_from_slice(&g, &k0.compose(&s), phi, &pair, &tol).unwrap();
        prop_assert!(base.distance(&stab) <= 1e-8);
    }

    #[test]
    fn involutions_are_equivariant(seed in any::<u64>(), which in 1u8..=2, a in -0.6f64..0.6) {
        let (sig, tol, pair) = (sig33(), Tolerances::default(), pair(a));
        let g = random_group(sig, &mut rng(seed), 1.5);
        let x = random_point(seed ^ 7, sig);
        let j = involution(sig, which);
        let (j1, j2) = j.k_blocks();
        let jx = standard_k_act(sig, &j1, &j2, &x, &tol).unwrap();
        let lhs = act_product(&j.compose(&g).compose(&j), &jx, &pair, &tol).unwrap();
        let gx = act_product(&g, &x, &pair, &tol).unwrap();
        let rhs = standard_k_act(sig, &j1, &j2, &gx, &tol).unwrap();
        prop_assert!(lhs.distance(&rhs) <= 1e-6);
    }

    #[test]
    fn decomposition_reconstructs(seed in any::<u64>(), f in -0.95f64..0.95) {
        let (sig, tol) = (sig33(), Tolerances::default());
        let g = random_group(sig, &mut rng(seed), 1.5);
        if let Ok(d) = decompose(&g, f, &tol) {
            prop_assert!(d.reconstruction_residual(&g) <= 1e-9);
            prop_assert!(d.k.off_k_residual() <= 1e-12);
            let datum = [f, 0.0, 0.0, 1.0, 0.0, 0.0];
            let moved = d.u.apply(&datum);
            prop_assert!(moved.iter().zip(datum).all(|(x, y)| (x - y).abs() <= 1e-6));
        }
    }

    #[test]
    fn projective_transport_is_a_flow(psi in 0.0f64..PI, t1 in -2.0f64..2.0, t2 in -2.0f64..2.0) {
        let x = ProjectivePoint::from_angle(psi);
        let composed = x.transported(t2).transported(t1);
        prop_assert!(composed.distance(&x.transported(t1 + t2)) <= 1e-9);
    }

    #[test]
    fn root_count_partitions_the_algebra(p in 3u32..=12, q in 3u32..=12) {
        let (lhs, rhs) = root_partition(p, q);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn k_elements_act_linearly(seed in any::<u64>(), phi in 0.0f64..TAU) {
        let (sig, tol, pair) = (sig33(), Tolerances::default(), pair(0.3));
        let mut r = rng(seed);
        let (k1, k2) = (random_rotation(&mut r, 3), random_rotation(&mut r, 3));
        let k: GroupElement = embed_k(sig, &k1, &k2, &tol).unwrap();
        let x = ProductSpherePoint::slice(sig, phi);
        let got = act_product(&k, &x, &pair, &tol).unwrap();
        prop_assert!(got.distance(&standard_k_act(sig, &k1, &k2, &x, &tol).unwrap()) <= 1e-10);
    }
}
