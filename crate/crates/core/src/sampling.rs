//! Randomized state generators for property tests and audits.
//!
//! Members of the wave cone are built from the structural parametrizations
//! (one generator per case of the 3D analysis, one for 2D); non-members are
//! built so that membership is provably impossible, not merely unlikely —
//! e.g. by forcing the in-plane restriction of `M` to be injective, which
//! no admissible direction survives.
//!
//! The rational generators produce exactly orthonormal frames (columns of
//! rotation matrices of integer quaternions) and exactly representable
//! band-constrained states, which is what the exact hull backend requires.

use crate::linalg::{M2, M3, V2, V3};
use crate::scalar::{Rat, Scalar};
use crate::state::{Elsasser3, Frame, State2};
use rand::Rng;

/// Structural case selector for the 3D generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen3Case {
    CrossNonzero,
    ParallelPair,
    AlphaZero,
    BothZero,
}

pub const GEN3_CASES: [Gen3Case; 4] = [
    Gen3Case::CrossNonzero,
    Gen3Case::ParallelPair,
    Gen3Case::AlphaZero,
    Gen3Case::BothZero,
];

fn coef<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(-1.0..1.0)
}

/// Coefficient bounded away from zero (used where vanishing would change
/// the structural case).
fn coef_nz<R: Rng>(rng: &mut R) -> f64 {
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    sign * rng.random_range(0.3..1.0)
}

pub fn random_unit3<R: Rng>(rng: &mut R) -> V3<f64> {
    loop {
        let v = V3::new(coef(rng), coef(rng), coef(rng));
        let n = v.norm_sq();
        if n > 1e-3 {
            return v.scale(&(1.0 / n.sqrt()));
        }
    }
}

pub fn random_unit2<R: Rng>(rng: &mut R) -> V2<f64> {
    loop {
        let v = V2::new(coef(rng), coef(rng));
        let n = v.norm_sq();
        if n > 1e-3 {
            return v.scale(&(1.0 / n.sqrt()));
        }
    }
}

fn unit_perp_to<R: Rng>(rng: &mut R, v: &V3<f64>) -> V3<f64> {
    loop {
        let w = v.cross(&random_unit3(rng));
        let n = w.norm_sq();
        if n > 1e-3 {
            return w.scale(&(1.0 / n.sqrt()));
        }
    }
}

/// A wave-cone member built from the parametrization of the given case.
pub fn random_lambda_member_3d<R: Rng>(rng: &mut R, case: Gen3Case) -> Elsasser3<f64> {
    match case {
        Gen3Case::CrossNonzero => loop {
            let alpha = random_unit3(rng).scale(&rng.random_range(0.5..1.5));
            let beta = random_unit3(rng).scale(&rng.random_range(0.5..1.5));
            let w = alpha.cross(&beta);
            if w.norm_sq() < 0.05 {
                continue;
            }
            let c13 = coef(rng);
            let m = M3::outer(&alpha, &alpha)
                .scale(&coef(rng))
                .add(&M3::outer(&alpha, &beta).scale(&coef(rng)))
                .add(&M3::outer(&beta, &alpha).scale(&coef(rng)))
                .add(&M3::outer(&beta, &beta).scale(&coef(rng)))
                .add(&M3::outer(&alpha, &w).scale(&c13))
                .add(&M3::outer(&w, &beta).scale(&c13));
            return Elsasser3::new(alpha, beta, m);
        },
        Gen3Case::ParallelPair => {
            let alpha = random_unit3(rng).scale(&rng.random_range(0.5..1.5));
            let k = rng.random_range(-2.0..2.0);
            let beta = alpha.scale(&k);
            let gamma = unit_perp_to(rng, &alpha);
            let sigma = alpha.cross(&gamma);
            let c12 = coef(rng);
            let m = M3::outer(&alpha, &alpha)
                .scale(&coef(rng))
                .add(&M3::outer(&alpha, &gamma).scale(&c12))
                .add(&M3::outer(&gamma, &alpha).scale(&(k * c12)))
                .add(&M3::outer(&alpha, &sigma).scale(&coef(rng)))
                .add(&M3::outer(&sigma, &alpha).scale(&coef(rng)))
                .add(&M3::outer(&sigma, &sigma).scale(&coef(rng)));
            Elsasser3::new(alpha, beta, m)
        }
        Gen3Case::AlphaZero => {
            let beta = random_unit3(rng).scale(&rng.random_range(0.5..1.5));
            let gamma = unit_perp_to(rng, &beta);
            let sigma = gamma.cross(&beta);
            let m = M3::outer(&gamma, &beta)
                .scale(&coef(rng))
                .add(&M3::outer(&beta, &beta).scale(&coef(rng)))
                .add(&M3::outer(&beta, &sigma).scale(&coef(rng)))
                .add(&M3::outer(&sigma, &beta).scale(&coef(rng)))
                .add(&M3::outer(&sigma, &sigma).scale(&coef(rng)));
            Elsasser3::new(V3::zero(), beta, m)
        }
        Gen3Case::BothZero => {
            let f1 = random_unit3(rng);
            let f2 = unit_perp_to(rng, &f1);
            let m = M3::outer(&f1, &f1)
                .scale(&coef(rng))
                .add(&M3::outer(&f1, &f2).scale(&coef(rng)))
                .add(&M3::outer(&f2, &f1).scale(&coef(rng)))
                .add(&M3::outer(&f2, &f2).scale(&coef(rng)));
            Elsasser3::new(V3::zero(), V3::zero(), m)
        }
    }
}

/// A state of the given case that provably lies outside the wave cone.
pub fn random_lambda_nonmember_3d<R: Rng>(rng: &mut R, case: Gen3Case) -> Elsasser3<f64> {
    match case {
        Gen3Case::CrossNonzero => loop {
            let mut st = random_lambda_member_3d(rng, Gen3Case::CrossNonzero);
            let w = st.zp.cross(&st.zm);
            if w.norm_sq() < 0.05 {
                continue;
            }
            // The coefficient expansion in {alpha, beta, w} is unique, so
            // injecting any forbidden coefficient is conclusive.
            let forbidden = match rng.random_range(0..4) {
                0 => M3::outer(&st.zm, &w),                 // c23
                1 => M3::outer(&w, &st.zp),                 // c31
                2 => M3::outer(&w, &w),                     // c33
                _ => M3::outer(&st.zp, &w),                 // breaks c13 = c32
            };
            st.m = st.m.add(&forbidden.scale(&coef_nz(rng)));
            return st;
        },
        Gen3Case::ParallelPair => {
            // Make the in-plane restriction of M injective: no direction in
            // alpha^perp can then satisfy the kernel conditions.
            let alpha = random_unit3(rng).scale(&rng.random_range(0.5..1.5));
            let k = rng.random_range(-2.0..2.0);
            let beta = alpha.scale(&k);
            let gamma = unit_perp_to(rng, &alpha);
            let sigma_raw = alpha.cross(&gamma);
            let sigma = sigma_raw.scale(&(1.0 / sigma_raw.norm_sq().sqrt()));
            let m = M3::outer(&alpha, &alpha)
                .scale(&coef(rng))
                .add(&M3::outer(&alpha, &gamma).scale(&coef(rng)))
                .add(&M3::outer(&gamma, &gamma).scale(&coef_nz(rng)))
                .add(&M3::outer(&sigma, &sigma).scale(&coef_nz(rng)));
            Elsasser3::new(alpha, beta, m)
        }
        Gen3Case::AlphaZero => {
            let beta = random_unit3(rng).scale(&rng.random_range(0.5..1.5));
            let gamma = unit_perp_to(rng, &beta);
            let sigma_raw = gamma.cross(&beta);
            let sigma = sigma_raw.scale(&(1.0 / sigma_raw.norm_sq().sqrt()));
            let m = M3::outer(&beta, &beta)
                .scale(&coef(rng))
                .add(&M3::outer(&gamma, &gamma).scale(&coef_nz(rng)))
                .add(&M3::outer(&sigma, &sigma).scale(&coef_nz(rng)))
                .add(&M3::outer(&gamma, &beta).scale(&coef(rng)));
            Elsasser3::new(V3::zero(), beta, m)
        }
        Gen3Case::BothZero => loop {
            // Full-rank M has no kernel at all.
            let f1 = random_unit3(rng);
            let f2 = unit_perp_to(rng, &f1);
            let f3 = f1.cross(&f2);
            let block = M2([[coef(rng), coef(rng)], [coef(rng), coef(rng)]]);
            if block.det().abs() < 0.1 {
                continue;
            }
            let m = M3::outer(&f1, &f1)
                .scale(&block.0[0][0])
                .add(&M3::outer(&f1, &f2).scale(&block.0[0][1]))
                .add(&M3::outer(&f2, &f1).scale(&block.0[1][0]))
                .add(&M3::outer(&f2, &f2).scale(&block.0[1][1]))
                .add(&M3::outer(&f3, &f3).scale(&coef_nz(rng)));
            return Elsasser3::new(V3::zero(), V3::zero(), m);
        },
    }
}

/// 2D wave-cone member (case chosen at random).
pub fn random_lambda_member_2d<R: Rng>(rng: &mut R) -> State2<f64> {
    match rng.random_range(0..3) {
        0 => {
            let alpha = random_unit2(rng).scale(&rng.random_range(0.5..1.5));
            let k = rng.random_range(-2.0..2.0);
            let beta = alpha.scale(&k);
            let ap = alpha.perp();
            let c12 = coef(rng);
            let m = M2::outer(&alpha, &alpha)
                .scale(&coef(rng))
                .add(&M2::outer(&alpha, &ap).scale(&c12))
                .add(&M2::outer(&ap, &alpha).scale(&(k * c12)));
            State2::new(alpha, beta, m)
        }
        1 => {
            let beta = random_unit2(rng).scale(&rng.random_range(0.5..1.5));
            let bp = beta.perp();
            let m = M2::outer(&beta, &beta)
                .scale(&coef(rng))
                .add(&M2::outer(&bp, &beta).scale(&coef(rng)));
            State2::new(V2::zero(), beta, m)
        }
        _ => {
            let gamma = random_unit2(rng).scale(&rng.random_range(0.2..1.5));
            State2::new(V2::zero(), V2::zero(), M2::outer(&gamma, &gamma))
        }
    }
}

pub fn random_lambda_nonmember_2d<R: Rng>(rng: &mut R) -> State2<f64> {
    match rng.random_range(0..3) {
        0 => {
            // beta = k alpha but a forbidden alpha^perp ⊗ alpha^perp block.
            let alpha = random_unit2(rng).scale(&rng.random_range(0.5..1.5));
            let k = rng.random_range(-2.0..2.0);
            let beta = alpha.scale(&k);
            let ap = alpha.perp();
            let m = M2::outer(&alpha, &alpha)
                .scale(&coef(rng))
                .add(&M2::outer(&alpha, &ap).scale(&coef(rng)))
                .add(&M2::outer(&ap, &ap).scale(&coef_nz(rng)));
            State2::new(alpha, beta, m)
        }
        1 => {
            // alpha = 0 but M does not annihilate beta^perp.
            let beta = random_unit2(rng).scale(&rng.random_range(0.5..1.5));
            let bp = beta.perp();
            let m = M2::outer(&beta, &beta)
                .scale(&coef(rng))
                .add(&M2::outer(&beta, &bp).scale(&coef_nz(rng)));
            State2::new(V2::zero(), beta, m)
        }
        _ => {
            // alpha = beta = 0 with an antisymmetric defect.
            let gamma = random_unit2(rng).scale(&rng.random_range(0.2..1.5));
            let mut m = M2::outer(&gamma, &gamma);
            m.0[0][1] += coef_nz(rng);
            State2::new(V2::zero(), V2::zero(), m)
        }
    }
}

/// Random point of `K_{r,s}`.
pub fn random_krs<R: Rng>(rng: &mut R, r: f64, s: f64) -> Elsasser3<f64> {
    let zp = random_unit3(rng).scale(&r);
    let zm = random_unit3(rng).scale(&s);
    let pi = rng.random_range(-1.0..1.0) * r * s;
    Elsasser3::product(&zp, &zm, &pi)
}

// --- exact-backend generators ------------------------------------------

/// Random rational with numerator in `[-2^mag, 2^mag]` and a power-of-two
/// denominator; keeps certificate arithmetic small.
pub fn random_rat<R: Rng>(rng: &mut R, mag: u32, den_pow: u32) -> Rat {
    let hi = 1i64 << mag;
    let num = rng.random_range(-hi..=hi);
    Rat::ratio(num, 1i64 << den_pow)
}

/// Uniformly spaced random rational in `[-1, 1]`.
pub fn random_rat_sym<R: Rng>(rng: &mut R) -> Rat {
    random_rat(rng, 10, 10)
}

/// Exactly orthonormal right-handed rational frame: the rotation matrix of
/// a random integer quaternion.
pub fn random_rational_frame<R: Rng>(rng: &mut R) -> Frame<Rat> {
    loop {
        let q: [i64; 4] = [
            rng.random_range(-9..=9),
            rng.random_range(-9..=9),
            rng.random_range(-9..=9),
            rng.random_range(-9..=9),
        ];
        let n: i64 = q.iter().map(|x| x * x).sum();
        if n == 0 {
            continue;
        }
        let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
        let col = |a: i64, b: i64, c: i64| {
            V3::new(Rat::ratio(a, n), Rat::ratio(b, n), Rat::ratio(c, n))
        };
        let f1 = col(
            w * w + x * x - y * y - z * z,
            2 * (x * y + w * z),
            2 * (x * z - w * y),
        );
        let f2 = col(
            2 * (x * y - w * z),
            w * w - x * x + y * y - z * z,
            2 * (y * z + w * x),
        );
        let f3 = col(
            2 * (x * z + w * y),
            2 * (y * z - w * x),
            w * w - x * x - y * y + z * z,
        );
        return Frame { f1, f2, f3 };
    }
}

/// Random exact rational unit vector.
pub fn random_rational_unit<R: Rng>(rng: &mut R) -> V3<Rat> {
    let f = random_rational_frame(rng);
    match rng.random_range(0..3) {
        0 => f.f1,
        1 => f.f2,
        _ => f.f3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{One, Zero};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rational_frames_are_exactly_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let f = random_rational_frame(&mut rng);
            assert!(f.gram_defect().is_zero());
            assert_eq!(f.det(), Rat::one());
        }
    }

    #[test]
    fn krs_points_satisfy_membership() {
        use crate::state::{k_membership, KMembership};
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let st = random_krs(&mut rng, 1.0, 2.0);
            match k_membership(&st, &1.0, &2.0, &1e-12) {
                KMembership::InKrs { .. } => {}
                other => panic!("generated K point failed membership: {other:?}"),
            }
        }
    }
}
