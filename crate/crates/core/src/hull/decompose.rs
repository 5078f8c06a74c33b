//! The decomposition ladder producing laminate certificates.
//!
//! Each stage realizes one construction step and delegates downward:
//!
//! * `ball`    — any `(alpha, beta, alpha⊗beta + Pi I)` with `|alpha| <= r`,
//!   `|beta| <= s`, `|Pi| <= rs` splits through sphere chords into four
//!   `K_{r,s}` leaves (depth <= 2).
//! * `rank_one` — one extra rank-one term `a e⊗e`, `a f1⊗e` or `a e⊗f1`
//!   bounded by `c'` splits into two ball states (depth <= 3).
//! * `five`    — three diagonal terms plus `d4 f1⊗g4 + d5 g5⊗f1` bounded by
//!   `c''`; an auxiliary shift along `f1` separates the two `f1`-aligned
//!   terms, then terms are peeled one at a time (depth <= 7).
//! * `sym23`   — frame coefficients with `c23 = c32` and at most one of
//!   `c12, c13, c21, c31` nonzero, bounded by `c'''` (depth <= 9).
//! * `general` — all seven admissible coefficients bounded by `c = c'''/8`,
//!   reduced by a cascade of halving splits (depth <= 12).
//!
//! On the exact backend every weight, state and edge is rational, so the
//! verifier reports identically zero defects. Square roots are avoided
//! throughout: leaf points on the spheres come from rational chords (the
//! second intersection of a line through a rational sphere point is
//! rational), and wherever the construction only needs a balanced
//! factorization `b*c = target` the factors are rational approximations of
//! the square root.
//!
//! Every branch records the wave-cone witness of its edge, so verification
//! reduces to checking the four cone conditions per edge instead of
//! re-deciding membership from scratch.

use super::{hull_constants, HullConstants, HullError, LaminateTree, UMembership::*};
use crate::cone::Witness3;
use crate::linalg::{M3, V3};
use crate::scalar::Scalar;
use crate::state::{build_frame, to_elsasser, Elsasser3, Frame, State3};

type Tree<T> = LaminateTree<T>;
type HResult<T> = Result<Tree<T>, HullError>;

/// Outcome of the relative-interior membership test.
#[derive(Clone, Debug)]
pub enum UMembership<T> {
    /// Certified inside the relative interior; the certificate verifies
    /// against `K_{r,s}`.
    InRelativeInterior(LaminateTree<T>),
    /// Not certified by the interior criterion (the state violates one of
    /// its smallness bounds); carries the violated bound.
    Outside { reason: String },
}

/// Placement of the rank-one perturbation in the `rank_one` stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankOneMode {
    /// `a e ⊗ e`
    EE,
    /// `a f1 ⊗ e`
    F1E,
    /// `a e ⊗ f1`
    EF1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TermKind {
    Diag,
    F1Left,
    F1Right,
}

/// A pending rank-one term `left ⊗ right` awaiting a peel split.
#[derive(Clone, Debug)]
struct Term<T> {
    left: V3<T>,
    right: V3<T>,
    kind: TermKind,
}

impl<T: Scalar> Term<T> {
    fn diag(direction: &V3<T>, coef: &T) -> Self {
        Term {
            left: direction.scale(coef),
            right: direction.clone(),
            kind: TermKind::Diag,
        }
    }
    fn matrix(&self) -> M3<T> {
        M3::outer(&self.left, &self.right)
    }
    fn is_zero(&self) -> bool {
        self.left.is_zero() || self.right.is_zero()
    }
    fn doubled(&self) -> Self {
        Term {
            left: self.left.scale(&T::from_int(2)),
            right: self.right.clone(),
            kind: self.kind,
        }
    }
}

/// Some nonzero vector perpendicular to `v` (cross with the least-aligned
/// coordinate axis).
fn perp_of<T: Scalar>(v: &V3<T>) -> V3<T> {
    let mut idx = 0;
    let mut best = v.0[0].abs();
    for i in 1..3 {
        let m = v.0[i].abs();
        if m < best {
            best = m;
            idx = i;
        }
    }
    v.cross(&V3::axis(idx))
}

/// Nearest power of two (as a backend scalar) to the square root of a
/// positive value; one-bit mantissas keep certificate entries short.
fn pow2_sqrt_approx<T: Scalar>(x: &T) -> T {
    let f = x.to_f64().sqrt();
    if !(f.is_finite() && f > 0.0) {
        return x.sqrt_approx();
    }
    let k = f.log2().round() as i32;
    if k >= 0 {
        T::from_int(1i64 << k.min(62))
    } else {
        T::ratio(1, 1i64 << (-k).min(62))
    }
}

fn branch<T: Scalar>(
    state: Elsasser3<T>,
    lambda: T,
    witness: Option<Witness3<T>>,
    left: Tree<T>,
    right: Tree<T>,
) -> Tree<T> {
    Tree::Branch {
        state,
        lambda,
        witness,
        left: Box::new(left),
        right: Box::new(right),
    }
}

/// `(alpha, beta, alpha⊗beta + Pi I + sum of terms)` awaiting decomposition.
struct Pending<T> {
    alpha: V3<T>,
    beta: V3<T>,
    pi: T,
    terms: Vec<Term<T>>,
}

impl<T: Scalar> Pending<T> {
    fn state(&self) -> Elsasser3<T> {
        let mut m = M3::outer(&self.alpha, &self.beta).add(&M3::identity_times(&self.pi));
        for t in &self.terms {
            m = m.add(&t.matrix());
        }
        Elsasser3::new(self.alpha.clone(), self.beta.clone(), m)
    }

    /// Peel terms one at a time. Any `f1`-aligned term goes first, while the
    /// pair difference is still parallel to it; diagonal splits afterwards
    /// may drift the pair without harm (their edges stay in the cone for any
    /// base points, with frequency perpendicular to both the split direction
    /// and the pair difference).
    fn build(mut self, r: &T, s: &T) -> HResult<T> {
        self.terms.retain(|t| !t.is_zero());
        let Some(idx) = self
            .terms
            .iter()
            .position(|t| t.kind != TermKind::Diag)
            .or_else(|| self.terms.len().checked_sub(1))
        else {
            return decompose_ball(&self.alpha, &self.beta, &self.pi, r, s);
        };
        debug_assert!(
            self.terms
                .iter()
                .filter(|t| t.kind != TermKind::Diag)
                .count()
                <= 1
        );
        let state = self.state();
        let term = self.terms.remove(idx);
        // Balanced rational factorization v ⊗ w = left ⊗ right with
        // |v| ~ |w|: keeps all later ball bounds comfortably slack.
        let ratio = term.left.norm_sq() / term.right.norm_sq();
        let t = pow2_sqrt_approx(&pow2_sqrt_approx(&ratio));
        let v = term.left.scale(&(T::one() / t.clone()));
        let w = term.right.scale(&t);

        // Edge = (2v, 2w, 2v⊗beta + 2alpha⊗w). The frequency must be
        // perpendicular to w and to alpha - beta; for the f1-aligned terms
        // v x w already is (one of v, w is parallel to alpha - beta).
        let xi = {
            let raw = match term.kind {
                TermKind::Diag => term.right.cross(&self.alpha.sub(&self.beta)),
                _ => v.cross(&w),
            };
            if raw.is_zero() {
                perp_of(&term.right)
            } else {
                raw
            }
        };
        let witness = Witness3 {
            c: -self.beta.dot(&xi),
            xi,
        };

        let plus = Pending {
            alpha: self.alpha.add(&v),
            beta: self.beta.add(&w),
            pi: self.pi.clone(),
            terms: self.terms.clone(),
        };
        let minus = Pending {
            alpha: self.alpha.sub(&v),
            beta: self.beta.sub(&w),
            pi: self.pi,
            terms: self.terms,
        };
        let (lt, rt) = rayon::join(|| plus.build(r, s), || minus.build(r, s));
        Ok(branch(state, T::ratio(1, 2), Some(witness), lt?, rt?))
    }
}

/// Two points on the sphere of the given radius whose chord passes through
/// `x`, with the convex weight of the first point; `None` when `x` already
/// lies on the sphere.
///
/// When `|x|` is representable the chord is the antipodal diameter through
/// `x`. Otherwise (exact backend, irrational norm) the chord is the secant
/// from the rational sphere point `radius * e1`: the second intersection of
/// a line through a rational point of a rational sphere is rational.
fn sphere_chord<T: Scalar>(
    x: &V3<T>,
    radius: &T,
    what: &str,
) -> Result<Option<(V3<T>, V3<T>, T, V3<T>)>, HullError> {
    let xsq = x.norm_sq();
    let rsq = radius.clone() * radius.clone();
    if xsq > rsq {
        return Err(HullError::PreconditionViolated(format!(
            "|{what}| exceeds its radius bound"
        )));
    }
    if xsq == rsq {
        return Ok(None);
    }
    if x.is_zero() {
        let p = V3::axis(0).scale(radius);
        return Ok(Some((p.clone(), p.neg(), T::ratio(1, 2), V3::axis(0))));
    }
    if let Some(n) = xsq.sqrt_exact() {
        let dir = x.scale(&(T::one() / n.clone()));
        let p = dir.scale(radius);
        let weight = (T::one() + n / radius.clone()).half();
        return Ok(Some((p.clone(), p.neg(), weight, x.clone())));
    }
    let qp = V3::axis(0).scale(radius);
    let d = x.sub(&qp);
    let t1 = -(T::from_int(2) * qp.dot(&d)) / d.norm_sq();
    let qm = qp.add(&d.scale(&t1));
    let weight = T::one() - T::one() / t1;
    Ok(Some((qp, qm, weight, d)))
}

fn inner_ball<T: Scalar>(p: &V3<T>, beta: &V3<T>, pi: &T, s: &T) -> HResult<T> {
    match sphere_chord(beta, s, "beta")? {
        None => Ok(Tree::Leaf {
            state: Elsasser3::product(p, beta, pi),
            pi: pi.clone(),
        }),
        Some((qp, qm, w, dir)) => {
            // Edge (0, q+ - q-, p ⊗ (q+ - q-)): any frequency perpendicular
            // to the chord works; the pre-secant direction is the shortest
            // representative of the chord.
            let xi = perp_of(&dir);
            let witness = Witness3 {
                c: -p.dot(&xi),
                xi,
            };
            Ok(branch(
                Elsasser3::product(p, beta, pi),
                w,
                Some(witness),
                Tree::Leaf {
                    state: Elsasser3::product(p, &qp, pi),
                    pi: pi.clone(),
                },
                Tree::Leaf {
                    state: Elsasser3::product(p, &qm, pi),
                    pi: pi.clone(),
                },
            ))
        }
    }
}

/// Depth-<=2 laminate for `(alpha, beta, alpha⊗beta + Pi I)` with
/// `|alpha| <= r`, `|beta| <= s`, `|Pi| <= rs`.
pub fn decompose_ball<T: Scalar>(
    alpha: &V3<T>,
    beta: &V3<T>,
    pi: &T,
    r: &T,
    s: &T,
) -> HResult<T> {
    if pi.abs() > r.clone() * s.clone() {
        return Err(HullError::PreconditionViolated("|Pi| exceeds r*s".into()));
    }
    match sphere_chord(alpha, r, "alpha")? {
        None => inner_ball(alpha, beta, pi, s),
        Some((pp, pm, w, dir)) => {
            // Edge (p+ - p-, 0, (p+ - p-) ⊗ beta).
            let xi = perp_of(&dir);
            let witness = Witness3 {
                c: -beta.dot(&xi),
                xi,
            };
            Ok(branch(
                Elsasser3::product(alpha, beta, pi),
                w,
                Some(witness),
                inner_ball(&pp, beta, pi, s)?,
                inner_ball(&pm, beta, pi, s)?,
            ))
        }
    }
}

/// `center - w <= |x| <= center + w`, tested on squares so the exact
/// backend never needs a root.
fn in_band<T: Scalar>(norm_sq: &T, center: &T, w: &T, strict: bool) -> bool {
    let hi = center.clone() + w.clone();
    let hisq = hi.clone() * hi;
    let upper = if strict {
        *norm_sq < hisq
    } else {
        *norm_sq <= hisq
    };
    if !upper {
        return false;
    }
    let lo = center.clone() - w.clone();
    if lo <= T::zero() {
        return true;
    }
    let losq = lo.clone() * lo;
    if strict {
        losq < *norm_sq
    } else {
        losq <= *norm_sq
    }
}

fn require_unit<T: Scalar>(v: &V3<T>, name: &str) -> Result<(), HullError> {
    let d = (v.norm_sq() - T::one()).abs();
    let ok = if T::EXACT {
        d.is_zero()
    } else {
        d <= T::from_f64(1e-9)
    };
    if ok {
        Ok(())
    } else {
        Err(HullError::PreconditionViolated(format!(
            "{name} is not a unit vector"
        )))
    }
}

/// Unit vector along `alpha - beta`, or from the default frame when the
/// pair is degenerate. Exactness demands a representable norm.
fn pair_f1<T: Scalar>(alpha: &V3<T>, beta: &V3<T>) -> Result<V3<T>, HullError> {
    let diff = alpha.sub(beta);
    if diff.is_zero() {
        return Ok(build_frame(alpha, beta, None).f1);
    }
    let nsq = diff.norm_sq();
    match nsq.sqrt_exact() {
        Some(n) => Ok(diff.scale(&(T::one() / n))),
        None => {
            if T::EXACT {
                Err(HullError::NotRepresentable(
                    "|alpha - beta| (not a rational square)".into(),
                ))
            } else {
                Ok(diff.scale(&(T::one() / nsq.sqrt_approx())))
            }
        }
    }
}

/// Depth-<=3 laminate for one rank-one perturbation bounded by `c'`,
/// split with the proof's asymmetric factorization
/// `b = k (1-tau) r / 2(r+s+1)`, `c = a/b` (both rational).
pub fn decompose_rank_one<T: Scalar>(
    alpha: &V3<T>,
    beta: &V3<T>,
    pi: &T,
    a_coef: &T,
    mode: RankOneMode,
    e: &V3<T>,
    consts: &HullConstants<T>,
) -> HResult<T> {
    require_unit(e, "e")?;
    if pi.abs() > consts.r.clone() * consts.s.clone() {
        return Err(HullError::PreconditionViolated("|Pi| exceeds r*s".into()));
    }
    let taur = consts.tau.clone() * consts.r.clone();
    let taus = consts.tau.clone() * consts.s.clone();
    if !in_band(&alpha.norm_sq(), &taur, &consts.cprime, false)
        || !in_band(&beta.norm_sq(), &taus, &consts.cprime, false)
    {
        return Err(HullError::PreconditionViolated(
            "||alpha| - tau r| or ||beta| - tau s| exceeds c'".into(),
        ));
    }
    if a_coef.abs() > consts.cprime {
        return Err(HullError::PreconditionViolated("|a| exceeds c'".into()));
    }
    if a_coef.is_zero() {
        return decompose_ball(alpha, beta, pi, &consts.r, &consts.s);
    }
    let k = a_coef.clone() / consts.cprime.clone();
    let omt = T::one() - consts.tau.clone();
    let rs1 = consts.r.clone() + consts.s.clone() + T::one();
    let b = k * omt * consts.r.clone() / (T::from_int(2) * rs1);
    let c = a_coef.clone() / b.clone();
    let (v, w) = match mode {
        RankOneMode::EE => (e.scale(&b), e.scale(&c)),
        RankOneMode::F1E => (pair_f1(alpha, beta)?.scale(&b), e.scale(&c)),
        RankOneMode::EF1 => (e.scale(&b), pair_f1(alpha, beta)?.scale(&c)),
    };
    let state = Elsasser3::new(
        alpha.clone(),
        beta.clone(),
        M3::outer(alpha, beta)
            .add(&M3::identity_times(pi))
            .add(&M3::outer(&v, &w)),
    );
    let xi = {
        let raw = match mode {
            RankOneMode::EE => e.cross(&alpha.sub(beta)),
            _ => v.cross(&w),
        };
        if raw.is_zero() {
            perp_of(e)
        } else {
            raw
        }
    };
    let witness = Witness3 {
        c: -beta.dot(&xi),
        xi,
    };
    Ok(branch(
        state,
        T::ratio(1, 2),
        Some(witness),
        decompose_ball(&alpha.add(&v), &beta.add(&w), pi, &consts.r, &consts.s)?,
        decompose_ball(&alpha.sub(&v), &beta.sub(&w), pi, &consts.r, &consts.s)?,
    ))
}

/// Core of the `five` stage on raw terms. `f1dir` must be parallel to
/// `alpha - beta` (any nonzero representative). When both `f1`-aligned
/// terms are present they are separated by the auxiliary `± d6 f1` shift of
/// `beta`, whose edge is an `(0, beta, f⊗beta + beta⊗g)` cone direction.
fn five_raw<T: Scalar>(
    alpha: &V3<T>,
    beta: &V3<T>,
    pi: &T,
    diag: Vec<Term<T>>,
    t4: Option<Term<T>>,
    t5: Option<Term<T>>,
    f1dir: &V3<T>,
    consts: &HullConstants<T>,
) -> HResult<T> {
    let r = &consts.r;
    let s = &consts.s;
    let t4 = t4.filter(|t| !t.is_zero());
    let t5 = t5.filter(|t| !t.is_zero());
    match (t4, t5) {
        (None, None) => Pending {
            alpha: alpha.clone(),
            beta: beta.clone(),
            pi: pi.clone(),
            terms: diag,
        }
        .build(r, s),
        (Some(t), None) | (None, Some(t)) => {
            let mut terms = diag;
            terms.push(t);
            Pending {
                alpha: alpha.clone(),
                beta: beta.clone(),
                pi: pi.clone(),
                terms,
            }
            .build(r, s)
        }
        (Some(t4), Some(t5)) => {
            // shift magnitude d6 = c''/2 along f1
            let target = consts.cdprime.half();
            let mut h = f1dir.scale(&(target.clone() / pow2_sqrt_approx(&f1dir.norm_sq())));
            while h.norm_sq() > target.clone() * target.clone() {
                h = h.scale(&T::ratio(1, 2));
            }
            let mut m = M3::outer(alpha, beta).add(&M3::identity_times(pi));
            for t in &diag {
                m = m.add(&t.matrix());
            }
            m = m.add(&t4.matrix()).add(&t5.matrix());
            let state = Elsasser3::new(alpha.clone(), beta.clone(), m);

            // Edge (0, 2h, alpha⊗2h + 2 t4 - 2 t5): the frequency must kill
            // the t4 right factor and stay perpendicular to h; the t5 term
            // contributes parallel to h and fixes c.
            let xi = {
                let raw = h.cross(&t4.right);
                if raw.is_zero() {
                    perp_of(&h)
                } else {
                    raw
                }
            };
            let lam5 = t5.right.dot(&h) / h.norm_sq();
            let witness = Witness3 {
                c: -alpha.dot(&xi) + t5.left.dot(&xi) * lam5,
                xi,
            };

            let mut terms_v = diag.clone();
            terms_v.push(t4.doubled());
            let v = Pending {
                alpha: alpha.clone(),
                beta: beta.add(&h),
                pi: pi.clone(),
                terms: terms_v,
            };
            let mut terms_w = diag;
            terms_w.push(t5.doubled());
            let w = Pending {
                alpha: alpha.clone(),
                beta: beta.sub(&h),
                pi: pi.clone(),
                terms: terms_w,
            };
            let (lt, rt) = rayon::join(|| v.build(r, s), || w.build(r, s));
            Ok(branch(state, T::ratio(1, 2), Some(witness), lt?, rt?))
        }
    }
}

/// Depth-<=7 laminate for
/// `alpha⊗beta + d1 g1⊗g1 + d2 g2⊗g2 + d3 g3⊗g3 + d4 f1⊗g4 + d5 g5⊗f1 + Pi I`
/// with all `|d_i| <= c''`.
pub fn decompose_five<T: Scalar>(
    alpha: &V3<T>,
    beta: &V3<T>,
    pi: &T,
    d: &[T; 5],
    g: &[V3<T>; 5],
    consts: &HullConstants<T>,
) -> HResult<T> {
    for (i, gi) in g.iter().enumerate() {
        require_unit(gi, &format!("g{}", i + 1))?;
    }
    if pi.abs() > consts.r.clone() * consts.s.clone() {
        return Err(HullError::PreconditionViolated("|Pi| exceeds r*s".into()));
    }
    let taur = consts.tau.clone() * consts.r.clone();
    let taus = consts.tau.clone() * consts.s.clone();
    if !in_band(&alpha.norm_sq(), &taur, &consts.cdprime, false)
        || !in_band(&beta.norm_sq(), &taus, &consts.cdprime, false)
    {
        return Err(HullError::PreconditionViolated(
            "||alpha| - tau r| or ||beta| - tau s| exceeds c''".into(),
        ));
    }
    for (i, di) in d.iter().enumerate() {
        if di.abs() > consts.cdprime {
            return Err(HullError::PreconditionViolated(format!(
                "|d{}| exceeds c''",
                i + 1
            )));
        }
    }
    let f1 = pair_f1(alpha, beta)?;
    let diag: Vec<Term<T>> = (0..3)
        .filter(|&i| !d[i].is_zero())
        .map(|i| Term::diag(&g[i], &d[i]))
        .collect();
    let t4 = (!d[3].is_zero()).then(|| Term {
        left: f1.scale(&d[3]),
        right: g[3].clone(),
        kind: TermKind::F1Left,
    });
    let t5 = (!d[4].is_zero()).then(|| Term {
        left: g[4].scale(&d[4]),
        right: f1.clone(),
        kind: TermKind::F1Right,
    });
    five_raw(alpha, beta, pi, diag, t4, t5, &f1, consts)
}

fn validate_frame<T: Scalar>(
    frame: &Frame<T>,
    alpha: &V3<T>,
    beta: &V3<T>,
) -> Result<(), HullError> {
    let gram = frame.gram_defect();
    let ortho_ok = if T::EXACT {
        gram.is_zero()
    } else {
        gram <= T::from_f64(1e-9)
    };
    if !ortho_ok {
        return Err(if T::EXACT {
            HullError::NotRepresentable("an exactly orthonormal frame".into())
        } else {
            HullError::PreconditionViolated("frame is not orthonormal".into())
        });
    }
    // f1 must span alpha - beta.
    let diff = alpha.sub(beta);
    let resid = diff.sub(&frame.f1.scale(&diff.dot(&frame.f1)));
    let adapted = if T::EXACT {
        resid.is_zero()
    } else {
        resid.inf_norm() <= T::from_f64(1e-9) * T::one().max_with(&diff.inf_norm())
    };
    if !adapted {
        return Err(HullError::PreconditionViolated(
            "frame is not adapted: f1 is not parallel to alpha - beta".into(),
        ));
    }
    Ok(())
}

struct Sym23Params<T> {
    c: T,
    d: T,
    p: T,
    q: T,
}

/// One `(V + W)/2` pair realizing
/// `N' = c11 f1f1 + CQ f1f2 - DQ f1f3 + c22 f2f2 + 2PCD (f2f3 + f3f2) + c33 f3f3`.
#[allow(clippy::too_many_arguments)]
fn sym23_pair<T: Scalar>(
    alpha: &V3<T>,
    beta: &V3<T>,
    pi: &T,
    frame: &Frame<T>,
    diag_c: &[T; 3],
    lam: &T,
    par: &Sym23Params<T>,
    consts: &HullConstants<T>,
) -> HResult<T> {
    let (f1, f2, f3) = (&frame.f1, &frame.f2, &frame.f3);
    let (c, d, p, q) = (&par.c, &par.d, &par.p, &par.q);
    let two = T::from_int(2);

    let n_prime_coefs = {
        let mut m = M3::zero();
        m.0[0][0] = diag_c[0].clone();
        m.0[0][1] = c.clone() * q.clone();
        m.0[0][2] = -(d.clone() * q.clone());
        m.0[1][1] = diag_c[1].clone();
        m.0[1][2] = two.clone() * p.clone() * c.clone() * d.clone();
        m.0[2][1] = m.0[1][2].clone();
        m.0[2][2] = diag_c[2].clone();
        m
    };
    let state = Elsasser3::new(
        alpha.clone(),
        beta.clone(),
        M3::outer(alpha, beta)
            .add(&M3::identity_times(pi))
            .add(&frame.assemble(&n_prime_coefs)),
    );
    // Edge (2C f2, 2D f3, dM): frequency f1 works, with
    // c = lam (1/2 - p) - <alpha + beta, f1>/2.
    let witness = Witness3 {
        xi: f1.clone(),
        c: lam.clone() * (T::ratio(1, 2) - p.clone()) - alpha.add(beta).dot(f1).half(),
    };

    // V: pair (alpha + C f2, beta + D f3), diagonal coefficients and two
    // rank-one terms aligned with the shifted pair difference.
    let build_side = |sign: &T| -> HResult<T> {
        let cc = c.clone() * sign.clone();
        let dd = d.clone() * sign.clone();
        let av = alpha.add(&f2.scale(&cc));
        let bv = beta.add(&f3.scale(&dd));
        let dv = av.sub(&bv); // = lam f1 + C f2 - D f3 (sign-adjusted)
        let qq = q.clone() * sign.clone(); // f1f1 coefficient flips with the side
        let diag = vec![
            Term::diag(
                f1,
                &(diag_c[0].clone()
                    - qq.clone() * lam.clone()
                    - two.clone() * p.clone() * lam.clone() * lam.clone()),
            ),
            Term::diag(
                f2,
                &(diag_c[1].clone() + cc.clone() * cc.clone() * p.clone()),
            ),
            Term::diag(
                f3,
                &(diag_c[2].clone()
                    + (T::from_int(3) * p.clone() - T::one()) * dd.clone() * dd.clone()),
            ),
        ];
        let t4 = Term {
            left: dv.clone(),
            right: f1
                .scale(&(p.clone() * lam.clone()))
                .sub(&f2.scale(&(cc.clone() * p.clone())))
                .add(&f3.scale(&(dd.clone() * (two.clone() * p.clone() - T::one())))),
            kind: TermKind::F1Left,
        };
        let t5 = Term {
            left: f1
                .scale(&(p.clone() * lam.clone() + qq.clone()))
                .add(&f3.scale(&(dd.clone() * p.clone()))),
            right: dv.clone(),
            kind: TermKind::F1Right,
        };
        five_raw(&av, &bv, pi, diag, Some(t4), Some(t5), &dv, consts)
    };

    let (v_tree, w_tree) = rayon::join(|| build_side(&T::one()), || build_side(&(-T::one())));
    Ok(branch(
        state,
        T::ratio(1, 2),
        Some(witness),
        v_tree?,
        w_tree?,
    ))
}

/// Depth-<=9 laminate for frame coefficients with `c23 = c32` and at most
/// one of `c12, c13, c21, c31` nonzero, all bounded by `c'''`.
pub fn decompose_sym23<T: Scalar>(
    alpha: &V3<T>,
    beta: &V3<T>,
    pi: &T,
    frame: &Frame<T>,
    coeffs: &M3<T>,
    consts: &HullConstants<T>,
) -> HResult<T> {
    validate_frame(frame, alpha, beta)?;
    if coeffs.0[1][2] != coeffs.0[2][1] {
        return Err(HullError::PreconditionViolated("c23 != c32".into()));
    }
    let off = [
        coeffs.0[0][1].clone(),
        coeffs.0[0][2].clone(),
        coeffs.0[1][0].clone(),
        coeffs.0[2][0].clone(),
    ];
    if off.iter().filter(|x| !x.is_zero()).count() > 1 {
        return Err(HullError::PreconditionViolated(
            "more than one of c12, c13, c21, c31 is nonzero".into(),
        ));
    }
    let ct = &consts.ctprime;
    let taur = consts.tau.clone() * consts.r.clone();
    let taus = consts.tau.clone() * consts.s.clone();
    if !in_band(&alpha.norm_sq(), &taur, ct, false) || !in_band(&beta.norm_sq(), &taus, ct, false)
    {
        return Err(HullError::PreconditionViolated(
            "||alpha| - tau r| or ||beta| - tau s| exceeds c'''".into(),
        ));
    }
    for i in 0..3 {
        for j in 0..3 {
            if coeffs.0[i][j].abs() > *ct {
                return Err(HullError::PreconditionViolated(format!(
                    "|c{}{}| exceeds c'''",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let tau2rs = consts.tau.clone() * consts.tau.clone() * consts.r.clone() * consts.s.clone();
    if pi.abs() > tau2rs + ct.clone() || pi.abs() > consts.r.clone() * consts.s.clone() {
        return Err(HullError::PreconditionViolated(
            "|Pi| exceeds tau^2 r s + c'''".into(),
        ));
    }

    // c21 / c31 reduce to c12 / c13 through transposition, which swaps the
    // Elsasser components (and the roles of r and s) and reverses f1, f3.
    if !off[2].is_zero() || !off[3].is_zero() {
        let tframe = Frame {
            f1: frame.f1.neg(),
            f2: frame.f2.clone(),
            f3: frame.f3.neg(),
        };
        let sg = [-T::one(), T::one(), -T::one()];
        let mut tcoeffs = M3::zero();
        for i in 0..3 {
            for j in 0..3 {
                tcoeffs.0[i][j] = coeffs.0[j][i].clone() * sg[i].clone() * sg[j].clone();
            }
        }
        let tconsts = hull_constants(consts.tau.clone(), consts.s.clone(), consts.r.clone())?;
        let tree = decompose_sym23(beta, alpha, pi, &tframe, &tcoeffs, &tconsts)?;
        return Ok(tree.transposed());
    }

    let diag_c = [
        coeffs.0[0][0].clone(),
        coeffs.0[1][1].clone(),
        coeffs.0[2][2].clone(),
    ];
    let c23 = coeffs.0[1][2].clone();
    let lam = alpha.sub(beta).dot(&frame.f1);

    if c23.is_zero() {
        // No symmetric f2/f3 coupling: the remaining terms fit the five
        // stage directly.
        let diag: Vec<Term<T>> = (0..3)
            .filter(|&i| !diag_c[i].is_zero())
            .map(|i| Term::diag(frame.basis(i), &diag_c[i]))
            .collect();
        let t4 = (!off[0].is_zero())
            .then(|| Term {
                left: frame.f1.scale(&off[0]),
                right: frame.f2.clone(),
                kind: TermKind::F1Left,
            })
            .or_else(|| {
                (!off[1].is_zero()).then(|| Term {
                    left: frame.f1.scale(&off[1]),
                    right: frame.f3.clone(),
                    kind: TermKind::F1Left,
                })
            });
        return five_raw(alpha, beta, pi, diag, t4, None, &frame.f1, consts);
    }

    // Full construction: N = 2/3 N' + 1/3 N'' where each of N', N'' is an
    // averaged (V, W) pair; the parameters follow the proof with rational
    // stand-ins for (c''')^(1/2) and (c''')^(1/4).
    let c_par = pow2_sqrt_approx(ct);
    let d_par = pow2_sqrt_approx(&c_par);
    let (q, second_params) = if !off[1].is_zero() {
        // c13 case: q = -2 c13 / d, second pair uses (-2c, -d/2).
        (
            -(T::from_int(2) * off[1].clone()) / d_par.clone(),
            (
                -(T::from_int(2) * c_par.clone()),
                -(d_par.clone() / T::from_int(2)),
            ),
        )
    } else {
        // c12 (possibly zero) case: q = 2 c12 / c, second pair (-c/2, -2d).
        (
            T::from_int(2) * off[0].clone() / c_par.clone(),
            (
                -(c_par.clone() / T::from_int(2)),
                -(T::from_int(2) * d_par.clone()),
            ),
        )
    };
    let p = c23 / (T::from_int(2) * c_par.clone() * d_par.clone());

    let first = sym23_pair(
        alpha,
        beta,
        pi,
        frame,
        &diag_c,
        &lam,
        &Sym23Params {
            c: c_par.clone(),
            d: d_par.clone(),
            p: p.clone(),
            q: q.clone(),
        },
        consts,
    )?;
    if q.is_zero() {
        // N' already equals N; no second pair needed.
        return Ok(first);
    }
    let second = sym23_pair(
        alpha,
        beta,
        pi,
        frame,
        &diag_c,
        &lam,
        &Sym23Params {
            c: second_params.0.clone(),
            d: second_params.1.clone(),
            p,
            q: q.clone(),
        },
        consts,
    )?;
    let state = Elsasser3::new(
        alpha.clone(),
        beta.clone(),
        M3::outer(alpha, beta)
            .add(&M3::identity_times(pi))
            .add(&frame.assemble(coeffs)),
    );
    // Edge (0, 0, N' - N'') = f1 ⊗ (a f2 + b f3): frequency
    // f1 x (a f2 + b f3) = a f3 - b f2, with a = (C' - C'') q and
    // b = (D'' - D') q.
    let a = (c_par - second_params.0) * q.clone();
    let b = (second_params.1 - d_par) * q;
    let xi = frame.f3.scale(&a).sub(&frame.f2.scale(&b));
    let witness = Witness3 { xi, c: T::zero() };
    Ok(branch(
        state,
        T::ratio(2, 3),
        Some(witness),
        first,
        second,
    ))
}

/// Off-diagonal coefficient tuple `(o12, o13, o21, o31)` during the
/// completion cascade.
type OffCoefs<T> = [T; 4];

fn off_into_coeffs<T: Scalar>(n0: &M3<T>, off: &OffCoefs<T>) -> M3<T> {
    let mut c = n0.clone();
    c.0[0][1] = off[0].clone();
    c.0[0][2] = off[1].clone();
    c.0[1][0] = off[2].clone();
    c.0[2][0] = off[3].clone();
    c
}

#[allow(clippy::too_many_arguments)]
fn cascade<T: Scalar>(
    alpha: &V3<T>,
    beta: &V3<T>,
    pi: &T,
    frame: &Frame<T>,
    n0: &M3<T>,
    off: OffCoefs<T>,
    consts: &HullConstants<T>,
) -> HResult<T> {
    let nz = off.iter().filter(|x| !x.is_zero()).count();
    if nz <= 1 {
        return decompose_sym23(alpha, beta, pi, frame, &off_into_coeffs(n0, &off), consts);
    }
    let state = Elsasser3::new(
        alpha.clone(),
        beta.clone(),
        M3::outer(alpha, beta)
            .add(&M3::identity_times(pi))
            .add(&frame.assemble(&off_into_coeffs(n0, &off))),
    );
    let two = T::from_int(2);
    let zero = T::zero;
    let [o12, o13, o21, o31] = off;
    let half_split = |l: OffCoefs<T>, r: OffCoefs<T>, xi: V3<T>| -> HResult<T> {
        let witness = Witness3 { xi, c: T::zero() };
        let (lt, rt) = rayon::join(
            || cascade(alpha, beta, pi, frame, n0, l, consts),
            || cascade(alpha, beta, pi, frame, n0, r, consts),
        );
        Ok(branch(
            state.clone(),
            T::ratio(1, 2),
            Some(witness),
            lt?,
            rt?,
        ))
    };
    // Halving splits along (0, 0, N) cone directions pair the coefficients
    // that admit a rank-one or 2x2-block edge; the two mixed pairs
    // (o12, o31) and (o13, o21) need the auxiliary beta-shift instead.
    if !o12.is_zero() && !o13.is_zero() {
        // edge f1 ⊗ (2 o12 f2 - 2 o13 f3); frequency f1 x (...) (rescaled)
        let xi = frame.f3.scale(&o12).add(&frame.f2.scale(&o13));
        return half_split(
            [two.clone() * o12, zero(), o21.clone(), o31.clone()],
            [zero(), two.clone() * o13, o21, o31],
            xi,
        );
    }
    if !o12.is_zero() && !o21.is_zero() {
        // 2x2 block in span{f1, f2}: frequency f3
        return half_split(
            [two.clone() * o12, zero(), zero(), o31.clone()],
            [zero(), zero(), two.clone() * o21, o31],
            frame.f3.clone(),
        );
    }
    if !o13.is_zero() && !o31.is_zero() {
        // 2x2 block in span{f1, f3}: frequency f2
        return half_split(
            [zero(), two.clone() * o13, o21.clone(), zero()],
            [zero(), zero(), o21, two.clone() * o31],
            frame.f2.clone(),
        );
    }
    if !o21.is_zero() && !o31.is_zero() {
        // edge (2 o21 f2 - 2 o31 f3) ⊗ f1: frequency (...) x f1 (rescaled)
        let xi = frame.f3.scale(&o21).add(&frame.f2.scale(&o31));
        return half_split(
            [zero(), zero(), two.clone() * o21, zero()],
            [zero(), zero(), zero(), two.clone() * o31],
            xi,
        );
    }
    // Mixed pair: separate through beta ± (c'''/2) f1; each side carries one
    // doubled coefficient and lands in the sym23 scope (2 * 4c = c''').
    let h = frame.f1.scale(&consts.ctprime.half());
    let bp = beta.add(&h);
    let bm = beta.sub(&h);
    let (loff, roff, xi) = if !o12.is_zero() && !o31.is_zero() {
        (
            [two.clone() * o12, zero(), zero(), zero()],
            [zero(), zero(), zero(), two * o31],
            frame.f3.clone(),
        )
    } else {
        (
            [zero(), two.clone() * o13, zero(), zero()],
            [zero(), zero(), two * o21, zero()],
            frame.f2.clone(),
        )
    };
    let (lt, rt) = rayon::join(
        || decompose_sym23(alpha, &bp, pi, frame, &off_into_coeffs(n0, &loff), consts),
        || decompose_sym23(alpha, &bm, pi, frame, &off_into_coeffs(n0, &roff), consts),
    );
    let (left, right) = (lt?, rt?);
    // c from the beta-side completion: the edge's M^T xi is parallel to h.
    let edge = left.state().sub(right.state());
    let mtxi = edge.m.tr_matvec(&xi);
    let c = -(mtxi.dot(&edge.zm) / edge.zm.norm_sq());
    Ok(branch(
        state,
        T::ratio(1, 2),
        Some(Witness3 { xi, c }),
        left,
        right,
    ))
}

/// Depth-<=12 laminate for general admissible frame coefficients
/// (`c23 = c32`, everything strictly inside the `c = c'''/8` box).
pub fn decompose_general<T: Scalar>(
    alpha: &V3<T>,
    beta: &V3<T>,
    pi: &T,
    frame: &Frame<T>,
    coeffs: &M3<T>,
    consts: &HullConstants<T>,
) -> HResult<T> {
    validate_frame(frame, alpha, beta)?;
    if coeffs.0[1][2] != coeffs.0[2][1] {
        return Err(HullError::PreconditionViolated("c23 != c32".into()));
    }
    let c = &consts.c;
    let taur = consts.tau.clone() * consts.r.clone();
    let taus = consts.tau.clone() * consts.s.clone();
    if !in_band(&alpha.norm_sq(), &taur, c, true) || !in_band(&beta.norm_sq(), &taus, c, true) {
        return Err(HullError::PreconditionViolated(
            "||alpha| - tau r| or ||beta| - tau s| is not < c".into(),
        ));
    }
    if coeffs.frobenius_sq() >= c.clone() * c.clone() {
        return Err(HullError::PreconditionViolated("|N| is not < c".into()));
    }
    let tau2rs = consts.tau.clone() * consts.tau.clone() * consts.r.clone() * consts.s.clone();
    if pi.abs() >= tau2rs + c.clone() || pi.abs() > consts.r.clone() * consts.s.clone() {
        return Err(HullError::PreconditionViolated(
            "|Pi| - tau^2 r s is not < c".into(),
        ));
    }
    let mut n0 = M3::zero();
    for i in 0..3 {
        n0.0[i][i] = coeffs.0[i][i].clone();
    }
    n0.0[1][2] = coeffs.0[1][2].clone();
    n0.0[2][1] = coeffs.0[2][1].clone();
    let off = [
        coeffs.0[0][1].clone(),
        coeffs.0[0][2].clone(),
        coeffs.0[1][0].clone(),
        coeffs.0[2][0].clone(),
    ];
    cascade(alpha, beta, pi, frame, &n0, off, consts)
}

/// Certify membership of a state in the relative interior of the
/// lamination hull over `K_{r,s}` (the `tau = 0` criterion).
///
/// Checks `a . b = 0`, extracts `Pi` as the diagonal mean of
/// `M - alpha ⊗ beta` (minimizing `|N|`), builds the adapted frame
/// (degenerate rule: `f3` along the antisymmetric defect when
/// `alpha = beta`), checks the hull bounds and returns the certificate.
pub fn membership_u_rs<T: Scalar>(
    state: &State3<T>,
    r: &T,
    s: &T,
    tol: &T,
) -> Result<UMembership<T>, HullError> {
    let scale = state.tolerance_scale();
    let q = state.a.dot(&state.b);
    let q_tol = tol.clone() * scale.clone() * scale;
    let q_ok = if tol.is_zero() {
        q.is_zero()
    } else {
        q.abs() <= q_tol
    };
    if !q_ok {
        return Err(HullError::ConstraintViolated(q.to_f64()));
    }
    let e = to_elsasser(state);
    let alpha = &e.zp;
    let beta = &e.zm;
    let resid = e.m.sub(&M3::outer(alpha, beta));
    let pi = resid.trace() / T::from_int(3);
    let n = resid.sub(&M3::identity_times(&pi));

    let frame = if alpha == beta {
        build_frame(alpha, beta, Some(&n.axial()))
    } else {
        build_frame(alpha, beta, None)
    };
    if T::EXACT && !frame.gram_defect().is_zero() {
        return Err(HullError::NotRepresentable(
            "an exactly orthonormal adapted frame for this state".into(),
        ));
    }
    let mut coeffs = frame.coefficients(&n);
    // a.b = 0 makes c23 = c32 up to the tolerance already granted above;
    // symmetrize so the ladder's exact precondition holds.
    if coeffs.0[1][2] != coeffs.0[2][1] {
        let mean = (coeffs.0[1][2].clone() + coeffs.0[2][1].clone()).half();
        let dev = (coeffs.0[1][2].clone() - coeffs.0[2][1].clone()).abs();
        if tol.is_zero() || dev > q_tol {
            return Err(HullError::ConstraintViolated(dev.to_f64()));
        }
        coeffs.0[1][2] = mean.clone();
        coeffs.0[2][1] = mean;
    }
    let consts = hull_constants(T::zero(), r.clone(), s.clone())?;
    let c = &consts.c;
    let csq = c.clone() * c.clone();
    if alpha.norm_sq() >= csq {
        return Ok(Outside {
            reason: "|alpha| is not < c_{0,r,s}".into(),
        });
    }
    if beta.norm_sq() >= csq {
        return Ok(Outside {
            reason: "|beta| is not < c_{0,r,s}".into(),
        });
    }
    if coeffs.frobenius_sq() >= csq {
        return Ok(Outside {
            reason: "|N| is not < c_{0,r,s}".into(),
        });
    }
    if pi.abs() >= *c {
        return Ok(Outside {
            reason: "|Pi| is not < c_{0,r,s}".into(),
        });
    }
    let tree = decompose_general(alpha, beta, &pi, &frame, &coeffs, &consts)?;
    Ok(InRelativeInterior(tree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use num::One;

    #[test]
    fn ball_example_weights_and_leaves() {
        let alpha = V3::new(0.5, 0.0, 0.0);
        let beta = V3::new(0.0, 0.3, 0.0);
        let tree = decompose_ball(&alpha, &beta, &0.1, &1.0, &1.0).unwrap();
        assert_eq!(tree.depth(), 2);
        assert_eq!(tree.leaf_count(), 4);
        match &tree {
            LaminateTree::Branch { lambda, left, .. } => {
                assert!((lambda - 0.75).abs() < 1e-15);
                match left.as_ref() {
                    LaminateTree::Branch { lambda, left, .. } => {
                        assert!((lambda - 0.65).abs() < 1e-15);
                        // innermost leaf at (+e1, +e2, e1⊗e2 + 0.1 I)
                        let leaf = left.state();
                        assert_eq!(leaf.zp.0, [1.0, 0.0, 0.0]);
                        assert_eq!(leaf.zm.0, [0.0, 1.0, 0.0]);
                    }
                    _ => panic!("expected inner branch"),
                }
            }
            _ => panic!("expected branch"),
        }
        // weighted leaf sum reconstructs the root
        let sum = tree.weighted_leaf_sum();
        assert!(sum.sub(tree.state()).inf_norm() < 1e-15);
    }

    #[test]
    fn ball_boundary_and_degenerate_cases() {
        // already in K_{r,s}: depth 0
        let tree = decompose_ball(&V3::axis(0), &V3::axis(1), &0.3, &1.0, &1.0).unwrap();
        assert_eq!(tree.depth(), 0);
        // |Pi| = rs exactly is admissible
        assert!(decompose_ball(&V3::zero(), &V3::zero(), &1.0, &1.0, &1.0).is_ok());
        // preconditions
        assert!(decompose_ball(&V3::new(1.5, 0.0, 0.0), &V3::zero(), &0.0, &1.0, &1.0).is_err());
        assert!(decompose_ball(&V3::zero(), &V3::zero(), &1.1, &1.0, &1.0).is_err());
    }

    #[test]
    fn ball_is_exact_for_irrational_norms() {
        // |alpha|^2 = 2/9 is not a rational square: the secant chord keeps
        // every leaf exactly on the sphere.
        let alpha = V3::<Rat>::from_f64([1.0 / 3.0, 1.0 / 3.0, 0.0]);
        let beta = V3::<Rat>::from_f64([0.0, 0.25, 0.25]);
        let tree =
            decompose_ball(&alpha, &beta, &Rat::ratio(1, 7), &Rat::one(), &Rat::one()).unwrap();
        let sum = tree.weighted_leaf_sum();
        assert_eq!(&sum, tree.state());
        fn leaves_on_sphere(t: &LaminateTree<Rat>) {
            match t {
                LaminateTree::Leaf { state, .. } => {
                    assert_eq!(state.zp.norm_sq(), Rat::one());
                    assert_eq!(state.zm.norm_sq(), Rat::one());
                }
                LaminateTree::Branch { left, right, .. } => {
                    leaves_on_sphere(left);
                    leaves_on_sphere(right);
                }
            }
        }
        leaves_on_sphere(&tree);
    }

    #[test]
    fn rank_one_depth_and_reconstruction() {
        let consts = hull_constants(0.0f64, 1.0, 1.0).unwrap();
        let a = consts.cprime / 2.0;
        let tree = decompose_rank_one(
            &V3::zero(),
            &V3::zero(),
            &0.0,
            &a,
            RankOneMode::EE,
            &V3::axis(1),
            &consts,
        )
        .unwrap();
        assert!(tree.depth() <= 3);
        let sum = tree.weighted_leaf_sum();
        assert!(sum.sub(tree.state()).inf_norm() < 1e-15);
        // above the bound: rejected
        let too_big = consts.cprime * 1.01;
        assert!(decompose_rank_one(
            &V3::zero(),
            &V3::zero(),
            &0.0,
            &too_big,
            RankOneMode::EE,
            &V3::axis(1),
            &consts
        )
        .is_err());
    }

    #[test]
    fn membership_rejects_ohm_violation() {
        let mut st = State3::<f64>::zero();
        st.a = V3::new(0.0, 0.0, 1.0);
        st.b = V3::new(0.0, 0.0, 0.1);
        match membership_u_rs(&st, &1.0, &1.0, &1e-12) {
            Err(HullError::ConstraintViolated(q)) => assert!((q - 0.1).abs() < 1e-15),
            other => panic!("expected ConstraintViolated, got {other:?}"),
        }
    }
}
