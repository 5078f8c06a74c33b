//! End-to-end exercises of the decomposition ladder on the exact backend.

use mhd_tartar::hull::{
    decompose_five, decompose_general, decompose_rank_one, decompose_sym23, hull_constants,
    membership_u_rs, verify_laminate, LaminateTree, RankOneMode, UMembership,
};
use mhd_tartar::linalg::{M3, V3};
use mhd_tartar::sampling::{random_rat_sym, random_rational_frame};
use mhd_tartar::scalar::Rat;
use mhd_tartar::state::{Frame, State3, Sym3};
use mhd_tartar::Scalar;
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn exact_verify(tree: &LaminateTree<Rat>, r: &Rat, s: &Rat) -> f64 {
    let rep = verify_laminate(tree, r, s, &Rat::zero());
    assert_eq!(
        tree.weighted_leaf_sum(),
        *tree.state(),
        "leaf reconstruction mismatch"
    );
    rep.max_defect()
}

#[test]
fn origin_membership_for_unit_radii() {
    let tree = match membership_u_rs(&State3::<Rat>::zero(), &Rat::one(), &Rat::one(), &Rat::zero())
        .unwrap()
    {
        UMembership::InRelativeInterior(t) => t,
        UMembership::Outside { reason } => panic!("origin outside: {reason}"),
    };
    assert!(tree.depth() <= 12);
    assert_eq!(exact_verify(&tree, &Rat::one(), &Rat::one()), 0.0);
}

#[test]
fn rank_one_all_modes_exact() {
    let consts = hull_constants(Rat::zero(), Rat::one(), Rat::one()).unwrap();
    let a = consts.cprime.clone() / Rat::from_int(2);
    let alpha = V3::<Rat>::zero();
    let beta = V3::<Rat>::new(Rat::ratio(1, 100), Rat::zero(), Rat::zero());
    for mode in [RankOneMode::EE, RankOneMode::F1E, RankOneMode::EF1] {
        let tree =
            decompose_rank_one(&alpha, &beta, &Rat::zero(), &a, mode, &V3::axis(1), &consts)
                .unwrap();
        assert!(tree.depth() <= 3, "{mode:?}: depth {}", tree.depth());
        assert_eq!(
            exact_verify(&tree, &Rat::one(), &Rat::one()),
            0.0,
            "{mode:?}"
        );
    }
}

#[test]
fn five_directions_full_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let consts = hull_constants(Rat::zero(), Rat::one(), Rat::one()).unwrap();
    for trial in 0..5 {
        let frame = random_rational_frame(&mut rng);
        // alpha - beta parallel to a rational unit with rational norm
        let lam = consts.cdprime.clone() * Rat::ratio(1, 2);
        let alpha = frame.f1.scale(&lam);
        let beta = V3::<Rat>::zero();
        let d: [Rat; 5] = std::array::from_fn(|_| {
            consts.cdprime.clone() * random_rat_sym(&mut rng)
        });
        let g: [V3<Rat>; 5] = [
            frame.f1.clone(),
            frame.f2.clone(),
            frame.f3.clone(),
            frame.f2.clone(),
            frame.f3.clone(),
        ];
        let pi = Rat::ratio(1, 3) * random_rat_sym(&mut rng);
        let tree = decompose_five(&alpha, &beta, &pi, &d, &g, &consts).unwrap();
        assert!(tree.depth() <= 7, "trial {trial}: depth {}", tree.depth());
        assert_eq!(
            exact_verify(&tree, &Rat::one(), &Rat::one()),
            0.0,
            "trial {trial}"
        );
    }
}

#[test]
fn sym23_with_coupling_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let consts = hull_constants(Rat::zero(), Rat::one(), Rat::one()).unwrap();
    let ct = &consts.ctprime;
    for (off_i, off_j) in [(0usize, 1usize), (0, 2), (1, 0), (2, 0)] {
        let frame = random_rational_frame(&mut rng);
        let lam = ct.clone() * Rat::ratio(1, 2);
        let alpha = frame.f1.scale(&lam);
        let beta = V3::<Rat>::zero();
        let mut coeffs = M3::<Rat>::zero();
        for i in 0..3 {
            coeffs.0[i][i] = ct.clone() * random_rat_sym(&mut rng);
        }
        let c23 = ct.clone() * random_rat_sym(&mut rng);
        coeffs.0[1][2] = c23.clone();
        coeffs.0[2][1] = c23;
        coeffs.0[off_i][off_j] = ct.clone() * Rat::ratio(1, 2);
        let pi = ct.clone() * random_rat_sym(&mut rng);
        let tree = decompose_sym23(&alpha, &beta, &pi, &frame, &coeffs, &consts).unwrap();
        assert!(
            tree.depth() <= 9,
            "off ({off_i},{off_j}): depth {}",
            tree.depth()
        );
        assert_eq!(
            exact_verify(&tree, &Rat::one(), &Rat::one()),
            0.0,
            "off ({off_i},{off_j})"
        );
        assert_eq!(tree.state().zp, alpha);
        assert_eq!(tree.state().zm, beta);
    }
}

#[test]
fn general_all_coefficients_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let consts = hull_constants(Rat::zero(), Rat::one(), Rat::one()).unwrap();
    let cb = consts.c.clone() * Rat::ratio(1, 4); // comfortably inside |N| < c
    let frame = random_rational_frame(&mut rng);
    let lam = consts.c.clone() * Rat::ratio(1, 2);
    let alpha = frame.f1.scale(&lam);
    let beta = V3::<Rat>::zero();
    let mut coeffs = M3::<Rat>::zero();
    for i in 0..3 {
        for j in 0..3 {
            coeffs.0[i][j] = cb.clone() * random_rat_sym(&mut rng);
        }
    }
    let c23 = coeffs.0[1][2].clone();
    coeffs.0[2][1] = c23;
    // make sure every off entry is genuinely nonzero
    for (i, j) in [(0, 1), (0, 2), (1, 0), (2, 0)] {
        if coeffs.0[i][j].is_zero() {
            coeffs.0[i][j] = cb.clone() * Rat::ratio(1, 3);
        }
    }
    let pi = consts.c.clone() * Rat::ratio(1, 8);
    let tree = decompose_general(&alpha, &beta, &pi, &frame, &coeffs, &consts).unwrap();
    assert!(tree.depth() <= 12, "depth {}", tree.depth());
    let expected_m = M3::outer(&alpha, &beta)
        .add(&M3::identity_times(&pi))
        .add(&frame.assemble(&coeffs));
    assert_eq!(tree.state().m, expected_m);
    assert_eq!(exact_verify(&tree, &Rat::one(), &Rat::one()), 0.0);
}

#[test]
fn tiny_ohm_state_membership() {
    // A state with a, b both nonzero but a . b = 0 exactly, well inside the
    // smallness box.
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let consts = hull_constants(Rat::zero(), Rat::one(), Rat::one()).unwrap();
    let eps = consts.c.clone() * Rat::ratio(1, 10);
    let frame = random_rational_frame(&mut rng);
    let b = frame.f1.scale(&eps);
    let u = frame.f2.scale(&(eps.clone() * Rat::ratio(1, 2)));
    let a = b.cross(&u); // ideal Ohm: a . b = 0
    let mut st = State3 {
        u,
        b,
        s: Sym3::zero(),
        a,
    };
    // small symmetric stress consistent with nothing in particular
    st.s.0[0] = eps.clone() * Rat::ratio(1, 7);
    st.s.0[3] = eps.clone() * Rat::ratio(-1, 9);
    assert!(st.a.dot(&st.b).is_zero());
    let tree = match membership_u_rs(&st, &Rat::one(), &Rat::one(), &Rat::zero()).unwrap() {
        UMembership::InRelativeInterior(t) => t,
        UMembership::Outside { reason } => panic!("outside: {reason}"),
    };
    assert!(tree.depth() <= 12);
    assert_eq!(exact_verify(&tree, &Rat::one(), &Rat::one()), 0.0);
}

#[test]
fn float_backend_large_epsilon_didactic() {
    // The float backend handles didactically large inputs with verification
    // at a tolerance (no soundness claim).
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    let consts = hull_constants(0.0f64, 1.0, 1.0).unwrap();
    let frame = Frame::<f64>::standard();
    let mut coeffs = M3::<f64>::zero();
    for i in 0..3 {
        for j in 0..3 {
            coeffs.0[i][j] = 1e-3 * rng.random_range(-1.0..1.0f64);
        }
    }
    coeffs.0[2][1] = coeffs.0[1][2];
    let alpha = V3::new(2e-3, 0.0, 0.0);
    let beta = V3::<f64>::zero();
    // didactic run: bypass the paper constants by lying about them
    let mut fake = consts;
    fake.c = 1.0;
    fake.ctprime = 8.0;
    fake.cdprime = 16.0 * 4.0f64.sqrt();
    fake.cprime = 4.0 * fake.cdprime.sqrt();
    let tree = decompose_general(&alpha, &beta, &0.0, &frame, &coeffs, &fake).unwrap();
    let rep = verify_laminate(&tree, &1.0, &1.0, &1e-9);
    assert!(
        rep.max_defect() < 1e-10,
        "float ladder defect {:.3e} {rep:?}",
        rep.max_defect()
    );
}
