use mhd_tartar::cone::{cone_membership_structural_3d, Cone3Verdict};
use mhd_tartar::hull::*;
use mhd_tartar::linalg::{M3, V3};
use mhd_tartar::sampling::*;
use mhd_tartar::scalar::Rat;
use mhd_tartar::state::{k_membership, Elsasser3};
use mhd_tartar::Scalar;
use num::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn collect_parts<'a>(t: &'a LaminateTree<Rat>, leaves: &mut Vec<&'a Elsasser3<Rat>>, edges: &mut Vec<Elsasser3<Rat>>, convs: &mut Vec<(&'a Elsasser3<Rat>, &'a Rat, &'a LaminateTree<Rat>, &'a LaminateTree<Rat>)>) {
    match t {
        LaminateTree::Leaf { state, .. } => leaves.push(state),
        LaminateTree::Branch { state, lambda, left, right, .. } => {
            edges.push(left.state().sub(right.state()));
            convs.push((state, lambda, left, right));
            collect_parts(left, leaves, edges, convs);
            collect_parts(right, leaves, edges, convs);
        }
    }
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let consts = hull_constants(Rat::zero(), Rat::one(), Rat::one()).unwrap();
    let cb = consts.c.clone() * Rat::ratio(1, 4);
    let frame = random_rational_frame(&mut rng);
    let lam = consts.c.clone() * Rat::ratio(1, 2);
    let alpha = frame.f1.scale(&lam);
    let beta = V3::<Rat>::zero();
    let mut coeffs = M3::<Rat>::zero();
    for i in 0..3 { for j in 0..3 { coeffs.0[i][j] = cb.clone() * random_rat_sym(&mut rng); } }
    coeffs.0[2][1] = coeffs.0[1][2].clone();
    for (i, j) in [(0, 1), (0, 2), (1, 0), (2, 0)] {
        if coeffs.0[i][j].is_zero() { coeffs.0[i][j] = cb.clone() * Rat::ratio(1, 3); }
    }
    let pi = consts.c.clone() * Rat::ratio(1, 8);
    let t0 = Instant::now();
    let tree = decompose_general(&alpha, &beta, &pi, &frame, &coeffs, &consts).unwrap();
    println!("build: {:?}  nodes {}", t0.elapsed(), tree.node_count());

    let mut leaves = vec![]; let mut edges = vec![]; let mut convs = vec![];
    let t0 = Instant::now();
    collect_parts(&tree, &mut leaves, &mut edges, &mut convs);
    println!("collect (incl edge subtraction): {:?}", t0.elapsed());

    let t0 = Instant::now();
    for (st, lam, l, r) in &convs {
        let combo = l.state().scale(lam).add(&r.state().scale(&(Rat::one() - (*lam).clone())));
        assert_eq!(&combo, *st);
    }
    println!("convexity x{}: {:?}", convs.len(), t0.elapsed());

    let t0 = Instant::now();
    for st in &leaves {
        assert!(k_membership(st, &Rat::one(), &Rat::one(), &Rat::zero()).is_in_krs());
    }
    println!("leaves x{}: {:?}", leaves.len(), t0.elapsed());

    let t0 = Instant::now();
    let mut member = 0;
    for e in &edges {
        if let Cone3Verdict::Member { .. } = cone_membership_structural_3d(e, &Rat::zero()) { member += 1; }
    }
    println!("edges x{} ({} members): {:?}", edges.len(), member, t0.elapsed());

    let t0 = Instant::now();
    let rep = verify_laminate(&tree, &Rat::one(), &Rat::one(), &Rat::zero());
    println!("verify_laminate (witness path): {:?}  defect {}", t0.elapsed(), rep.max_defect());
}
