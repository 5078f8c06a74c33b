//! Constructive lamination-hull certificates.
//!
//! A [`LaminateTree`] is a binary certificate of hull membership: every
//! branch is a convex split whose two children differ by a wave-cone
//! direction, every leaf lies in the normalized constraint set `K_{r,s}`.
//! The decomposition ladder (`ball` -> `rank_one` -> `five` -> `sym23` ->
//! `general`) follows the explicit construction behind the nonempty
//! relative interior of the hull, with the smallness constants
//!
//! ```text
//! c'   = (1-tau)^2 r s / (4 (r+s+1)^2)
//! c''  = c'^2 / 16
//! c''' = c''^4 / (1000 (r+s+1)^8)
//! c    = c''' / 8
//! ```
//!
//! At `tau = 0, r = s = 1` the last constant is about `1.03e-25`, nine
//! orders of magnitude below what double precision can resolve relative to
//! O(1) states. Certificates are therefore built and verified on the exact
//! rational backend; floats remain available for didactic large-scale runs
//! where verification happens at a tolerance and no soundness is claimed.

mod decompose;
mod verify;

pub use decompose::{
    decompose_ball, decompose_five, decompose_general, decompose_rank_one, decompose_sym23,
    membership_u_rs, RankOneMode, UMembership,
};
pub use verify::{verify_laminate, verify_laminate_2d, VerifyReport};

use crate::cone::Witness3;
use crate::linalg::{M3, V3};
use crate::scalar::Scalar;
use crate::state::{scalar_from_json, scalar_to_json, Elsasser3, State2};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HullError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("constraint a.b = 0 violated (|a.b| = {0:.3e})")]
    ConstraintViolated(f64),
    #[error("degenerate frame: {0}")]
    FrameDegenerate(String),
    #[error("exact backend cannot represent {0}; use rational inputs with exactly representable norms or the float backend")]
    NotRepresentable(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

/// The ladder of smallness constants `tau, r, s -> c', c'', c''', c`.
#[derive(Clone, Debug, PartialEq)]
pub struct HullConstants<T> {
    pub tau: T,
    pub r: T,
    pub s: T,
    pub cprime: T,
    pub cdprime: T,
    pub ctprime: T,
    pub c: T,
}

/// Evaluate the four constant formulas. Requires `0 <= tau < 1`, `r, s > 0`.
pub fn hull_constants<T: Scalar>(tau: T, r: T, s: T) -> Result<HullConstants<T>, HullError> {
    if tau < T::zero() || tau >= T::one() {
        return Err(HullError::InvalidParameters("tau must be in [0,1)".into()));
    }
    if r <= T::zero() || s <= T::zero() {
        return Err(HullError::InvalidParameters("r and s must be positive".into()));
    }
    let one = T::one();
    let omt = one.clone() - tau.clone();
    let rs1 = r.clone() + s.clone() + one;
    let cprime = omt.clone() * omt * r.clone() * s.clone()
        / (T::from_int(4) * rs1.clone() * rs1.clone());
    let cdprime = cprime.clone() * cprime.clone() / T::from_int(16);
    let ctprime = cdprime.powi(4) / (T::from_int(1000) * rs1.powi(8));
    let c = ctprime.clone() / T::from_int(8);
    Ok(HullConstants {
        tau,
        r,
        s,
        cprime,
        cdprime,
        ctprime,
        c,
    })
}

/// Binary laminate certificate over 3D Elsasser states.
///
/// Branches may carry the wave-cone witness of their edge; the verifier
/// checks a carried witness against the cone conditions exactly (a complete
/// proof of edge membership) and only falls back to the structural decision
/// procedure when the witness is absent or fails.
#[derive(Clone, Debug, PartialEq)]
pub enum LaminateTree<T> {
    Leaf {
        state: Elsasser3<T>,
        pi: T,
    },
    Branch {
        state: Elsasser3<T>,
        lambda: T,
        witness: Option<Witness3<T>>,
        left: Box<LaminateTree<T>>,
        right: Box<LaminateTree<T>>,
    },
}

impl<T: Scalar> LaminateTree<T> {
    pub fn state(&self) -> &Elsasser3<T> {
        match self {
            LaminateTree::Leaf { state, .. } => state,
            LaminateTree::Branch { state, .. } => state,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            LaminateTree::Leaf { .. } => 0,
            LaminateTree::Branch { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            LaminateTree::Leaf { .. } => 1,
            LaminateTree::Branch { left, right, .. } => 1 + left.node_count() + right.node_count(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            LaminateTree::Leaf { .. } => 1,
            LaminateTree::Branch { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    /// Sum of leaf states weighted by the products of branch weights along
    /// each root-to-leaf path; equals the root state for a valid laminate
    /// (bit-exactly on the rational backend).
    pub fn weighted_leaf_sum(&self) -> Elsasser3<T> {
        fn go<T: Scalar>(t: &LaminateTree<T>, w: T, acc: &mut Elsasser3<T>) {
            match t {
                LaminateTree::Leaf { state, .. } => {
                    *acc = acc.add(&state.scale(&w));
                }
                LaminateTree::Branch {
                    lambda, left, right, ..
                } => {
                    go(left, w.clone() * lambda.clone(), acc);
                    go(right, w * (T::one() - lambda.clone()), acc);
                }
            }
        }
        let mut acc = Elsasser3::zero();
        go(self, T::one(), &mut acc);
        acc
    }

    /// Transposed certificate `(z+, z-, M) -> (z-, z+, M^T)`; exchanges the
    /// roles of r and s and preserves all edges.
    pub fn transposed(&self) -> Self {
        match self {
            LaminateTree::Leaf { state, pi } => LaminateTree::Leaf {
                state: state.transposed(),
                pi: pi.clone(),
            },
            LaminateTree::Branch {
                state,
                lambda,
                witness,
                left,
                right,
            } => LaminateTree::Branch {
                state: state.transposed(),
                lambda: lambda.clone(),
                // the cone conditions of the transposed edge hold with the
                // same frequency pair
                witness: witness.clone(),
                left: Box::new(left.transposed()),
                right: Box::new(right.transposed()),
            },
        }
    }
}

fn elsasser_to_json<T: Scalar>(e: &Elsasser3<T>) -> Value {
    let mut m = Vec::with_capacity(9);
    for row in &e.m.0 {
        for x in row {
            m.push(scalar_to_json(x));
        }
    }
    json!({
        "zp": e.zp.0.iter().map(scalar_to_json).collect::<Vec<_>>(),
        "zm": e.zm.0.iter().map(scalar_to_json).collect::<Vec<_>>(),
        "M": m,
    })
}

fn elsasser_from_json<T: Scalar>(v: &Value) -> Option<Elsasser3<T>> {
    let parse3 = |v: &Value| -> Option<V3<T>> {
        let arr = v.as_array()?;
        if arr.len() != 3 {
            return None;
        }
        Some(V3([
            scalar_from_json(&arr[0])?,
            scalar_from_json(&arr[1])?,
            scalar_from_json(&arr[2])?,
        ]))
    };
    let zp = parse3(v.get("zp")?)?;
    let zm = parse3(v.get("zm")?)?;
    let marr = v.get("M")?.as_array()?;
    if marr.len() != 9 {
        return None;
    }
    let mut m = M3::zero();
    for i in 0..3 {
        for j in 0..3 {
            m.0[i][j] = scalar_from_json(&marr[3 * i + j])?;
        }
    }
    Some(Elsasser3::new(zp, zm, m))
}

/// Serialize a laminate to the interchange schema
/// `{state, pi?}` / `{state, lambda, left, right}`.
pub fn tree_to_json<T: Scalar>(tree: &LaminateTree<T>) -> Value {
    match tree {
        LaminateTree::Leaf { state, pi } => json!({
            "state": elsasser_to_json(state),
            "pi": scalar_to_json(pi),
        }),
        LaminateTree::Branch {
            state,
            lambda,
            witness,
            left,
            right,
        } => {
            let mut v = json!({
                "state": elsasser_to_json(state),
                "lambda": scalar_to_json(lambda),
                "left": tree_to_json(left),
                "right": tree_to_json(right),
            });
            if let Some(w) = witness {
                v["witness"] = json!({
                    "xi": w.xi.0.iter().map(scalar_to_json).collect::<Vec<_>>(),
                    "c": scalar_to_json(&w.c),
                });
            }
            v
        }
    }
}

pub fn tree_from_json<T: Scalar>(v: &Value) -> Option<LaminateTree<T>> {
    let state = elsasser_from_json(v.get("state")?)?;
    if let Some(lambda) = v.get("lambda") {
        let witness = v.get("witness").and_then(|w| {
            let arr = w.get("xi")?.as_array()?;
            if arr.len() != 3 {
                return None;
            }
            Some(Witness3 {
                xi: V3([
                    scalar_from_json(&arr[0])?,
                    scalar_from_json(&arr[1])?,
                    scalar_from_json(&arr[2])?,
                ]),
                c: scalar_from_json(w.get("c")?)?,
            })
        });
        Some(LaminateTree::Branch {
            state,
            lambda: scalar_from_json(lambda)?,
            witness,
            left: Box::new(tree_from_json(v.get("left")?)?),
            right: Box::new(tree_from_json(v.get("right")?)?),
        })
    } else {
        Some(LaminateTree::Leaf {
            state,
            pi: scalar_from_json(v.get("pi")?)?,
        })
    }
}

/// 2D laminate certificate (used for the planar `K^Lambda \ K` example;
/// the construction ladder itself is three-dimensional).
#[derive(Clone, Debug, PartialEq)]
pub enum Laminate2<T> {
    Leaf {
        state: State2<T>,
        pi: T,
    },
    Branch {
        state: State2<T>,
        lambda: T,
        left: Box<Laminate2<T>>,
        right: Box<Laminate2<T>>,
    },
}

impl<T: Scalar> Laminate2<T> {
    pub fn state(&self) -> &State2<T> {
        match self {
            Laminate2::Leaf { state, .. } => state,
            Laminate2::Branch { state, .. } => state,
        }
    }
    pub fn depth(&self) -> usize {
        match self {
            Laminate2::Leaf { .. } => 0,
            Laminate2::Branch { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use num::{One, Zero};

    #[test]
    fn constants_at_unit_parameters() {
        let hc = hull_constants(Rat::zero(), Rat::one(), Rat::one()).unwrap();
        assert_eq!(hc.cprime, Rat::ratio(1, 36));
        assert_eq!(hc.cdprime, Rat::ratio(1, 20736));
        // c''' = (1/20736)^4 / (1000 * 3^8), c = c'''/8; check the ladder is
        // strictly decreasing and matches the float magnitudes.
        assert!(hc.ctprime < hc.cdprime && hc.cdprime < hc.cprime);
        assert!(hc.c < hc.ctprime);
        assert!((hc.ctprime.to_f64() - 8.2445e-25).abs() < 1e-28);
        assert!((hc.c.to_f64() - 1.0306e-25).abs() < 1e-28);
    }

    #[test]
    fn constants_reject_bad_parameters() {
        assert!(hull_constants(1.0f64, 1.0, 1.0).is_err());
        assert!(hull_constants(0.0f64, 0.0, 1.0).is_err());
        assert!(hull_constants(0.5f64, 1.0, 2.0).is_ok());
    }

    #[test]
    fn tree_json_roundtrip_exact() {
        let a = V3::<Rat>::from_f64([0.25, 0.0, 0.0]);
        let b = V3::<Rat>::from_f64([0.0, 0.5, 0.0]);
        let pi = Rat::ratio(1, 3);
        let leaf = LaminateTree::Leaf {
            state: Elsasser3::product(&a, &b, &pi),
            pi: pi.clone(),
        };
        let tree = LaminateTree::Branch {
            state: Elsasser3::product(&a, &b, &pi),
            lambda: Rat::ratio(2, 3),
            witness: Some(Witness3 {
                xi: V3::axis(2),
                c: Rat::ratio(-1, 6),
            }),
            left: Box::new(leaf.clone()),
            right: Box::new(leaf),
        };
        let v = tree_to_json(&tree);
        let back: LaminateTree<Rat> = tree_from_json(&v).unwrap();
        assert_eq!(back, tree);
    }
}
