//! Independent certificate verification.
//!
//! The verifier recomputes, for every node of a laminate, the three defining
//! properties: branch states are the stated convex combinations of their
//! children, every edge (difference of the two children) lies in the wave
//! cone, and every leaf lies in `K_{r,s}`. It shares no code with the
//! decomposition ladder beyond the state algebra: edges go through the
//! structural cone decision (falling back to the numeric oracle for
//! quantification), leaves through the `K` membership predicate.
//!
//! On the exact backend a sound certificate reports all defects exactly
//! zero; a tampered one reports the magnitude and the path of the worst
//! offending node.

use super::{Laminate2, LaminateTree};
use crate::cone::{
    cone_membership_2d, cone_membership_structural_3d, cone_witness_numeric3, witness_residual2,
    witness_residual3, Cone2Verdict, Cone3Verdict, ConeVariant, NUMERIC_TOL,
};
use crate::linalg::{M3, V3};
use crate::scalar::Scalar;
use crate::state::{k_membership_2d, Elsasser3, KMembership, State2};

/// Outcome of verifying one laminate certificate.
#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    /// Worst distance of a leaf from `K_{r,s}`, relative to the leaf scale.
    pub max_leaf_defect: f64,
    /// Worst wave-cone residual of a branch edge, relative to the edge scale.
    pub max_edge_defect: f64,
    /// Worst violation of `state = lambda left + (1-lambda) right`.
    pub max_convexity_defect: f64,
    pub depth: usize,
    pub nodes: usize,
    pub leaves: usize,
    /// Root-to-node paths (`L`/`R`) of the worst defects, when nonzero.
    pub worst_leaf: Option<String>,
    pub worst_edge: Option<String>,
    pub worst_convexity: Option<String>,
}

impl VerifyReport {
    pub fn max_defect(&self) -> f64 {
        self.max_leaf_defect
            .max(self.max_edge_defect)
            .max(self.max_convexity_defect)
    }
    pub fn passes(&self, tol: f64) -> bool {
        self.max_defect() <= tol
    }
    fn absorb(&mut self, other: VerifyReport) {
        if other.max_leaf_defect > self.max_leaf_defect {
            self.max_leaf_defect = other.max_leaf_defect;
            self.worst_leaf = other.worst_leaf;
        }
        if other.max_edge_defect > self.max_edge_defect {
            self.max_edge_defect = other.max_edge_defect;
            self.worst_edge = other.worst_edge;
        }
        if other.max_convexity_defect > self.max_convexity_defect {
            self.max_convexity_defect = other.max_convexity_defect;
            self.worst_convexity = other.worst_convexity;
        }
        self.depth = self.depth.max(other.depth);
        self.nodes += other.nodes;
        self.leaves += other.leaves;
    }
}

fn elsasser_f64<T: Scalar>(e: &Elsasser3<T>) -> Elsasser3<f64> {
    Elsasser3::new(
        V3(e.zp.to_f64()),
        V3(e.zm.to_f64()),
        M3(e.m.to_f64()),
    )
}

/// Leaf distance from `K_{r,s}`: off-identity residual, Elsasser norm
/// mismatches and pressure excess, relative to the leaf scale.
fn leaf_defect<T: Scalar>(e: &Elsasser3<T>, r: &T, s: &T) -> f64 {
    let scale = e.tolerance_scale();
    let resid = e.m.sub(&M3::outer(&e.zp, &e.zm));
    let pi = resid.trace() / T::from_int(3);
    let off = resid.sub(&M3::identity_times(&pi)).inf_norm();
    let norm_dev = |nsq: T, target: &T| -> T {
        let num = (nsq.clone() - target.clone() * target.clone()).abs();
        num / (nsq.sqrt_approx() + target.clone())
    };
    let mut d = off;
    d = d.max_with(&norm_dev(e.zp.norm_sq(), r));
    d = d.max_with(&norm_dev(e.zm.norm_sq(), s));
    let excess = pi.abs() - r.clone() * s.clone();
    if excess > T::zero() {
        d = d.max_with(&excess);
    }
    (d / scale).to_f64()
}

/// Wave-cone residual of an edge.
///
/// A witness carried by the certificate is checked first: the four cone
/// conditions against it are a complete membership proof, so a vanishing
/// residual settles the edge without re-deciding membership. Edges without
/// (or with failing) witnesses go through the structural decision, and
/// non-members are quantified by the best numeric residual.
fn edge_defect<T: Scalar>(
    edge: &Elsasser3<T>,
    witness: Option<&crate::cone::Witness3<T>>,
    tol: &T,
) -> f64 {
    if edge.is_zero() {
        return 0.0;
    }
    let scale = edge.tolerance_scale();
    if let Some(w) = witness {
        if !w.xi.is_zero() {
            let resid = (witness_residual3(edge, w) / scale.clone()).to_f64();
            let pass = if T::EXACT { resid == 0.0 } else { resid <= tol.to_f64() };
            if pass {
                return resid;
            }
            // fall through: stored witness is stale, re-decide from scratch
        }
    }
    match cone_membership_structural_3d(edge, tol) {
        Cone3Verdict::Member { witness, .. } => {
            (witness_residual3(edge, &witness) / scale).to_f64()
        }
        Cone3Verdict::NonMember { .. } => {
            let ef = elsasser_f64(edge);
            let sf = scale.to_f64();
            let w = cone_witness_numeric3(&ef, ConeVariant::Lambda, NUMERIC_TOL)
                .or_else(|| cone_witness_numeric3(&ef, ConeVariant::Lambda, 0.999_999));
            match w {
                Some(w) => (witness_residual3(&ef, &w) / sf).max(f64::MIN_POSITIVE),
                None => 1.0,
            }
        }
    }
}

struct VerifyCtx<'a, T> {
    r: &'a T,
    s: &'a T,
    tol: &'a T,
}

fn verify_node<T: Scalar>(
    tree: &LaminateTree<T>,
    ctx: &VerifyCtx<'_, T>,
    path: &str,
    par_depth: usize,
) -> VerifyReport {
    match tree {
        LaminateTree::Leaf { state, .. } => {
            let d = leaf_defect(state, ctx.r, ctx.s);
            VerifyReport {
                max_leaf_defect: d,
                depth: 0,
                nodes: 1,
                leaves: 1,
                worst_leaf: (d > 0.0).then(|| path.to_string()),
                ..Default::default()
            }
        }
        LaminateTree::Branch {
            state,
            lambda,
            witness,
            left,
            right,
        } => {
            let scale = state.tolerance_scale();
            let edge = left.state().sub(right.state());
            // state = lambda L + (1 - lambda) R  <=>  state - R = lambda (L - R)
            let combo_resid = state
                .sub(right.state())
                .sub(&edge.scale(lambda))
                .inf_norm();
            let mut conv = (combo_resid / scale).to_f64();
            if *lambda < T::zero() || *lambda > T::one() {
                conv = conv.max(1.0);
            }
            let ed = edge_defect(&edge, witness.as_ref(), ctx.tol);

            let lp = format!("{path}L");
            let rp = format!("{path}R");
            let (lrep, rrep) = if par_depth > 0 {
                rayon::join(
                    || verify_node(left, ctx, &lp, par_depth - 1),
                    || verify_node(right, ctx, &rp, par_depth - 1),
                )
            } else {
                (
                    verify_node(left, ctx, &lp, 0),
                    verify_node(right, ctx, &rp, 0),
                )
            };
            let mut rep = VerifyReport {
                max_edge_defect: ed,
                max_convexity_defect: conv,
                depth: 0,
                nodes: 1,
                leaves: 0,
                worst_edge: (ed > 0.0).then(|| path.to_string()),
                worst_convexity: (conv > 0.0).then(|| path.to_string()),
                ..Default::default()
            };
            rep.absorb(lrep);
            rep.absorb(rrep);
            rep.depth += 1;
            rep
        }
    }
}

/// Verify every branch identity, every edge and every leaf of a laminate
/// against `K_{r,s}`. Defects are reported, never thrown.
pub fn verify_laminate<T: Scalar>(
    tree: &LaminateTree<T>,
    r: &T,
    s: &T,
    tol: &T,
) -> VerifyReport {
    let ctx = VerifyCtx { r, s, tol };
    verify_node(tree, &ctx, "", 4)
}

fn leaf_defect_2d<T: Scalar>(st: &State2<T>) -> f64 {
    // Planar leaves are checked against K (no normalization layer).
    match k_membership_2d(st, &T::zero()) {
        KMembership::NotInK { defect } => (defect / st.tolerance_scale()).to_f64(),
        _ => 0.0,
    }
}

fn edge_defect_2d<T: Scalar>(edge: &State2<T>, tol: &T) -> f64 {
    if edge.alpha.is_zero() && edge.beta.is_zero() && edge.m.inf_norm().is_zero() {
        return 0.0;
    }
    let scale = edge.tolerance_scale();
    match cone_membership_2d(edge, tol) {
        Cone2Verdict::Member { witness } => (witness_residual2(edge, &witness) / scale).to_f64(),
        Cone2Verdict::NonMember { .. } => 1.0,
    }
}

/// 2D analogue of [`verify_laminate`]; leaves are checked against `K`.
pub fn verify_laminate_2d<T: Scalar>(tree: &Laminate2<T>, tol: &T) -> VerifyReport {
    fn go<T: Scalar>(t: &Laminate2<T>, tol: &T, path: &str) -> VerifyReport {
        match t {
            Laminate2::Leaf { state, .. } => {
                let d = leaf_defect_2d(state);
                VerifyReport {
                    max_leaf_defect: d,
                    nodes: 1,
                    leaves: 1,
                    worst_leaf: (d > 0.0).then(|| path.to_string()),
                    ..Default::default()
                }
            }
            Laminate2::Branch {
                state,
                lambda,
                left,
                right,
            } => {
                let scale = state.tolerance_scale();
                let combo = left
                    .state()
                    .scale(lambda)
                    .add(&right.state().scale(&(T::one() - lambda.clone())));
                let conv = (combo.sub(state).inf_norm() / scale).to_f64();
                let edge = left.state().sub(right.state());
                let ed = edge_defect_2d(&edge, tol);
                let mut rep = VerifyReport {
                    max_edge_defect: ed,
                    max_convexity_defect: conv,
                    nodes: 1,
                    worst_edge: (ed > 0.0).then(|| path.to_string()),
                    worst_convexity: (conv > 0.0).then(|| path.to_string()),
                    ..Default::default()
                };
                rep.absorb(go(left, tol, &format!("{path}L")));
                rep.absorb(go(right, tol, &format!("{path}R")));
                rep.depth += 1;
                rep
            }
        }
    }
    go(tree, tol, "")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::decompose_ball;
    use crate::scalar::Rat;
    use num::{One, Zero};
    use crate::state::Elsasser3;

    #[test]
    fn ball_certificate_verifies_cleanly() {
        let alpha = V3::new(0.5, 0.0, 0.0);
        let beta = V3::new(0.0, 0.3, 0.0);
        let tree = decompose_ball(&alpha, &beta, &0.1, &1.0, &1.0).unwrap();
        let rep = verify_laminate(&tree, &1.0, &1.0, &1e-9);
        assert!(rep.passes(1e-12), "{rep:?}");
        assert_eq!(rep.depth, 2);
        assert_eq!(rep.leaves, 4);
    }

    #[test]
    fn exact_ball_certificate_has_zero_defect() {
        let alpha = V3::<Rat>::from_f64([1.0 / 3.0, 1.0 / 3.0, 0.0]);
        let beta = V3::<Rat>::from_f64([0.0, 0.25, 0.25]);
        let tree =
            decompose_ball(&alpha, &beta, &Rat::ratio(1, 7), &Rat::one(), &Rat::one()).unwrap();
        let rep = verify_laminate(&tree, &Rat::one(), &Rat::one(), &Rat::zero());
        assert_eq!(rep.max_defect(), 0.0, "{rep:?}");
    }

    #[test]
    fn tampered_leaf_is_detected_with_location() {
        let alpha = V3::new(0.5, 0.0, 0.0);
        let beta = V3::new(0.0, 0.3, 0.0);
        let mut tree = decompose_ball(&alpha, &beta, &0.1, &1.0, &1.0).unwrap();
        // perturb one leaf by 1e-6
        if let LaminateTree::Branch { left, .. } = &mut tree {
            if let LaminateTree::Branch { left, .. } = left.as_mut() {
                if let LaminateTree::Leaf { state, .. } = left.as_mut() {
                    state.m.0[0][0] += 1e-6;
                }
            }
        }
        let rep = verify_laminate(&tree, &1.0, &1.0, &1e-9);
        assert!(rep.max_leaf_defect > 5e-7, "{rep:?}");
        assert!(rep.max_convexity_defect > 5e-7);
        assert_eq!(rep.worst_leaf.as_deref(), Some("LL"));
    }
}
