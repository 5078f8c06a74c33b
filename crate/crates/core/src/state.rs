//! Pointwise MHD states, the Elsasser change of variables, constraint-set
//! predicates and the separating functions living on them.
//!
//! A 3D state carries velocity `u`, magnetic field `b`, the symmetric
//! Reynolds-stress slot `s` and the electric field `a` (the axial form of
//! the antisymmetric slot, `A xi = xi x a`). In Elsasser variables the same
//! point reads `(z+, z-, M)` with `z± = u ± b` and `M = S + A`. The
//! constraint set is
//!
//! `K = {(z+, z-, M) : M = z+ ⊗ z- + Pi I}`,
//!
//! with the normalized layers `K_{r,s}` additionally pinning `|z+| = r`,
//! `|z-| = s` and `|Pi| <= rs`.

use crate::linalg::{axial_matrix, M2, M3, V2, V3};
use crate::scalar::Scalar;
use serde_json::{json, Value};

/// Symmetric 3x3 matrix stored as its six independent entries
/// (upper triangle, row-major: `s11 s12 s13 s22 s23 s33`).
#[derive(Clone, Debug, PartialEq)]
pub struct Sym3<T>(pub [T; 6]);

impl<T: Scalar> Sym3<T> {
    pub fn zero() -> Self {
        Sym3([
            T::zero(),
            T::zero(),
            T::zero(),
            T::zero(),
            T::zero(),
            T::zero(),
        ])
    }
    pub fn to_matrix(&self) -> M3<T> {
        let s = &self.0;
        M3([
            [s[0].clone(), s[1].clone(), s[2].clone()],
            [s[1].clone(), s[3].clone(), s[4].clone()],
            [s[2].clone(), s[4].clone(), s[5].clone()],
        ])
    }
    /// Symmetric part of an arbitrary matrix.
    pub fn from_matrix(m: &M3<T>) -> Self {
        let h = T::ratio(1, 2);
        let sym = |i: usize, j: usize| (m.0[i][j].clone() + m.0[j][i].clone()) * h.clone();
        Sym3([
            m.0[0][0].clone(),
            sym(0, 1),
            sym(0, 2),
            m.0[1][1].clone(),
            sym(1, 2),
            m.0[2][2].clone(),
        ])
    }
    pub fn inf_norm(&self) -> T {
        let mut acc = T::zero();
        for x in &self.0 {
            acc = acc.max_with(&x.abs());
        }
        acc
    }
}

/// A pointwise 3D MHD state `(u, b, S, a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct State3<T> {
    pub u: V3<T>,
    pub b: V3<T>,
    pub s: Sym3<T>,
    pub a: V3<T>,
}

/// The same point in Elsasser variables `(z+, z-, M)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Elsasser3<T> {
    pub zp: V3<T>,
    pub zm: V3<T>,
    pub m: M3<T>,
}

/// A pointwise 2D state in Elsasser form `(alpha, beta, M)`.
#[derive(Clone, Debug, PartialEq)]
pub struct State2<T> {
    pub alpha: V2<T>,
    pub beta: V2<T>,
    pub m: M2<T>,
}

impl<T: Scalar> State3<T> {
    pub fn zero() -> Self {
        State3 {
            u: V3::zero(),
            b: V3::zero(),
            s: Sym3::zero(),
            a: V3::zero(),
        }
    }
    pub fn scale(&self, k: &T) -> Self {
        State3 {
            u: self.u.scale(k),
            b: self.b.scale(k),
            s: Sym3(self.s.0.clone().map(|x| x * k.clone())),
            a: self.a.scale(k),
        }
    }
    pub fn inf_norm(&self) -> T {
        self.u
            .inf_norm()
            .max_with(&self.b.inf_norm())
            .max_with(&self.s.inf_norm())
            .max_with(&self.a.inf_norm())
    }
    /// `max(1, |inputs|_inf)`; all relative tolerances are taken against it.
    pub fn tolerance_scale(&self) -> T {
        T::one().max_with(&self.inf_norm())
    }
}

impl<T: Scalar> Elsasser3<T> {
    pub fn new(zp: V3<T>, zm: V3<T>, m: M3<T>) -> Self {
        Elsasser3 { zp, zm, m }
    }
    pub fn zero() -> Self {
        Elsasser3::new(V3::zero(), V3::zero(), M3::zero())
    }
    /// Exact product state `(alpha, beta, alpha ⊗ beta + Pi I)`.
    pub fn product(alpha: &V3<T>, beta: &V3<T>, pi: &T) -> Self {
        Elsasser3::new(
            alpha.clone(),
            beta.clone(),
            M3::outer(alpha, beta).add(&M3::identity_times(pi)),
        )
    }
    pub fn add(&self, o: &Self) -> Self {
        Elsasser3::new(self.zp.add(&o.zp), self.zm.add(&o.zm), self.m.add(&o.m))
    }
    pub fn sub(&self, o: &Self) -> Self {
        Elsasser3::new(self.zp.sub(&o.zp), self.zm.sub(&o.zm), self.m.sub(&o.m))
    }
    pub fn scale(&self, k: &T) -> Self {
        Elsasser3::new(self.zp.scale(k), self.zm.scale(k), self.m.scale(k))
    }
    /// Transposed state `(z-, z+, M^T)`; maps `K_{r,s}` onto `K_{s,r}` and
    /// preserves the wave cone.
    pub fn transposed(&self) -> Self {
        Elsasser3::new(self.zm.clone(), self.zp.clone(), self.m.transpose())
    }
    pub fn inf_norm(&self) -> T {
        self.zp
            .inf_norm()
            .max_with(&self.zm.inf_norm())
            .max_with(&self.m.inf_norm())
    }
    pub fn tolerance_scale(&self) -> T {
        T::one().max_with(&self.inf_norm())
    }
    pub fn is_zero(&self) -> bool {
        self.zp.is_zero() && self.zm.is_zero() && self.m.is_zero()
    }
}

impl<T: Scalar> State2<T> {
    pub fn new(alpha: V2<T>, beta: V2<T>, m: M2<T>) -> Self {
        State2 { alpha, beta, m }
    }
    pub fn product(alpha: &V2<T>, beta: &V2<T>, pi: &T) -> Self {
        State2::new(
            alpha.clone(),
            beta.clone(),
            M2::outer(alpha, beta).add(&M2::identity_times(pi)),
        )
    }
    pub fn add(&self, o: &Self) -> Self {
        State2::new(
            self.alpha.add(&o.alpha),
            self.beta.add(&o.beta),
            self.m.add(&o.m),
        )
    }
    pub fn sub(&self, o: &Self) -> Self {
        State2::new(
            self.alpha.sub(&o.alpha),
            self.beta.sub(&o.beta),
            self.m.sub(&o.m),
        )
    }
    pub fn scale(&self, k: &T) -> Self {
        State2::new(self.alpha.scale(k), self.beta.scale(k), self.m.scale(k))
    }
    pub fn inf_norm(&self) -> T {
        self.alpha
            .inf_norm()
            .max_with(&self.beta.inf_norm())
            .max_with(&self.m.inf_norm())
    }
    pub fn tolerance_scale(&self) -> T {
        T::one().max_with(&self.inf_norm())
    }
}

/// `z± = u ± b`, `M = S + A` with `A` the antisymmetric matrix of `a`.
pub fn to_elsasser<T: Scalar>(s: &State3<T>) -> Elsasser3<T> {
    Elsasser3 {
        zp: s.u.add(&s.b),
        zm: s.u.sub(&s.b),
        m: s.s.to_matrix().add(&axial_matrix(&s.a)),
    }
}

/// Inverse change of variables; splits `M` into symmetric and antisymmetric
/// parts and converts the latter to its axial vector.
pub fn from_elsasser<T: Scalar>(e: &Elsasser3<T>) -> State3<T> {
    let h = T::ratio(1, 2);
    State3 {
        u: e.zp.add(&e.zm).scale(&h),
        b: e.zp.sub(&e.zm).scale(&h),
        s: Sym3::from_matrix(&e.m),
        a: e.m.axial(),
    }
}

/// The Lambda-affine separating function `Q(u,b,S,a) = a . b`.
///
/// Vanishes identically on the constraint set (ideal Ohm's law `a = b x u`)
/// and on the whole Lambda-convex hull, which is why its zero set pins the
/// hull inside `{a . b = 0}`.
pub fn q_helicity<T: Scalar>(s: &State3<T>) -> T {
    s.a.dot(&s.b)
}

/// The 2D Lambda-convex separating function
/// `f = |(m12 - a1 b2) - (m21 - a2 b1)|^2`,
/// i.e. the squared antisymmetric defect of `M - alpha ⊗ beta`.
pub fn lambda_convex_f2d<T: Scalar>(s: &State2<T>) -> T {
    let d = (s.m.0[0][1].clone() - s.alpha.0[0].clone() * s.beta.0[1].clone())
        - (s.m.0[1][0].clone() - s.alpha.0[1].clone() * s.beta.0[0].clone());
    d.clone() * d
}

/// Outcome of testing a state against `K` and `K_{r,s}`.
#[derive(Clone, Debug, PartialEq)]
pub enum KMembership<T> {
    /// `M - z+ ⊗ z-` is a multiple of the identity, but the Elsasser norms
    /// or the pressure bound rule out `K_{r,s}`.
    InK { pi: T },
    /// In `K` with `|z+| = r`, `|z-| = s` and `|Pi| <= rs`.
    InKrs { pi: T },
    /// Off-identity residual; `defect` is the largest violated entry.
    NotInK { defect: T },
}

impl<T: Scalar> KMembership<T> {
    pub fn is_in_k(&self) -> bool {
        !matches!(self, KMembership::NotInK { .. })
    }
    pub fn is_in_krs(&self) -> bool {
        matches!(self, KMembership::InKrs { .. })
    }
}

/// Decide membership in `K` / `K_{r,s}`.
///
/// `Pi` is extracted as the diagonal mean of `M - z+ ⊗ z-` (the
/// least-squares optimal multiple of the identity). All comparisons are
/// relative to `max(1, |inputs|_inf)`; with `tol = 0` on the exact backend
/// the predicate is exact.
pub fn k_membership<T: Scalar>(e: &Elsasser3<T>, r: &T, s: &T, tol: &T) -> KMembership<T> {
    let scale = e.tolerance_scale();
    let eps = tol.clone() * scale.clone();
    let resid = e.m.sub(&M3::outer(&e.zp, &e.zm));
    let pi = resid.trace() / T::from_int(3);
    let off = resid.sub(&M3::identity_times(&pi));
    let defect = off.inf_norm();
    if defect > eps {
        return KMembership::NotInK { defect };
    }
    // Norm conditions via squares: | |z|^2 - r^2 | <= eps * (sqrt(|z|^2) + r)
    // is equivalent to | |z| - r | <= eps without leaving the backend.
    let norm_ok = |nsq: T, target: &T| -> bool {
        let lhs = (nsq.clone() - target.clone() * target.clone()).abs();
        let rhs = eps.clone() * (nsq.sqrt_approx() + target.clone());
        if eps.is_zero() {
            lhs.is_zero()
        } else {
            lhs <= rhs
        }
    };
    let norms_ok = norm_ok(e.zp.norm_sq(), r) && norm_ok(e.zm.norm_sq(), s);
    let pi_ok = pi.abs() <= r.clone() * s.clone() + eps;
    if norms_ok && pi_ok {
        KMembership::InKrs { pi }
    } else {
        KMembership::InK { pi }
    }
}

/// 2D analogue of [`k_membership`] (used by the planar hull example).
pub fn k_membership_2d<T: Scalar>(st: &State2<T>, tol: &T) -> KMembership<T> {
    let scale = st.tolerance_scale();
    let eps = tol.clone() * scale;
    let resid = st.m.sub(&M2::outer(&st.alpha, &st.beta));
    let pi = resid.trace().half();
    let off = resid.sub(&M2::identity_times(&pi));
    let defect = off.inf_norm();
    if defect > eps {
        KMembership::NotInK { defect }
    } else {
        KMembership::InKrs { pi }
    }
}

/// Orthonormal right-handed basis `{f1, f2, f3}` with `f1 x f2 = f3`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame<T> {
    pub f1: V3<T>,
    pub f2: V3<T>,
    pub f3: V3<T>,
}

impl<T: Scalar> Frame<T> {
    pub fn standard() -> Self {
        Frame {
            f1: V3::axis(0),
            f2: V3::axis(1),
            f3: V3::axis(2),
        }
    }
    pub fn basis(&self, i: usize) -> &V3<T> {
        match i {
            0 => &self.f1,
            1 => &self.f2,
            _ => &self.f3,
        }
    }
    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_defect(&self) -> T {
        let mut d = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                let g = self.basis(i).dot(self.basis(j));
                let target = if i == j { T::one() } else { T::zero() };
                d = d.max_with(&(g - target).abs());
            }
        }
        d
    }
    pub fn det(&self) -> T {
        M3::from_cols(&self.f1, &self.f2, &self.f3).det()
    }
    /// Coefficients `c_ij = f_i . (N f_j)` of a matrix in this frame.
    pub fn coefficients(&self, n: &M3<T>) -> M3<T> {
        let mut c = M3::zero();
        for i in 0..3 {
            for j in 0..3 {
                c.0[i][j] = self.basis(i).dot(&n.matvec(self.basis(j)));
            }
        }
        c
    }
    /// Reassemble `sum c_ij f_i ⊗ f_j`.
    pub fn assemble(&self, c: &M3<T>) -> M3<T> {
        let mut n = M3::zero();
        for i in 0..3 {
            for j in 0..3 {
                n = n.add(&M3::outer(self.basis(i), self.basis(j)).scale(&c.0[i][j]));
            }
        }
        n
    }
}

/// Reflection taking `e_axis` to the unit vector `v` (identity when they
/// coincide), applied to `e_k`. Exactly orthogonal, and rational whenever
/// `v` is rational — which is what keeps exact-backend frames exact.
fn reflect_axis_image<T: Scalar>(v: &V3<T>, axis: usize, k: usize) -> V3<T> {
    let e_axis = V3::axis(axis);
    let w = v.sub(&e_axis);
    let wsq = w.norm_sq();
    if wsq.is_zero() {
        return V3::axis(k);
    }
    let e_k = V3::<T>::axis(k);
    let coef = T::from_int(2) * e_k.dot(&w) / wsq;
    e_k.sub(&w.scale(&coef))
}

/// Complete a unit vector placed at `axis` (0 for `f1`, 2 for `f3`) to a
/// right-handed orthonormal frame, deterministically. The reflection has
/// determinant -1, so one of the completed vectors is negated; the trivial
/// case (unit vector already on the axis) needs no correction.
fn complete_frame<T: Scalar>(unit: &V3<T>, axis: usize) -> Frame<T> {
    if unit.sub(&V3::axis(axis)).is_zero() {
        return Frame::standard();
    }
    match axis {
        0 => {
            let f2 = reflect_axis_image(unit, 0, 1);
            let f3 = reflect_axis_image(unit, 0, 2).neg();
            Frame {
                f1: unit.clone(),
                f2,
                f3,
            }
        }
        _ => {
            let f1 = reflect_axis_image(unit, 2, 0);
            let f2 = reflect_axis_image(unit, 2, 1).neg();
            Frame {
                f1,
                f2,
                f3: unit.clone(),
            }
        }
    }
}

fn normalize<T: Scalar>(v: &V3<T>) -> V3<T> {
    let n = v.norm_sq();
    let root = n.sqrt_exact().unwrap_or_else(|| n.sqrt_approx());
    v.scale(&(T::one() / root))
}

/// Build the adapted frame of a state pair.
///
/// With `alpha != beta` the first vector is `(alpha - beta)/|alpha - beta|`
/// and the rest of the frame is completed by the deterministic reflection
/// rule above. With `alpha = beta` the third vector is taken from the axial
/// hint `z` (the antisymmetric defect direction), falling back to `(1,0,0)`
/// when no hint is available; this is the choice that annihilates the
/// `c23 - c32` obstruction in the degenerate case.
pub fn build_frame<T: Scalar>(alpha: &V3<T>, beta: &V3<T>, z: Option<&V3<T>>) -> Frame<T> {
    let diff = alpha.sub(beta);
    if !diff.is_zero() {
        return complete_frame(&normalize(&diff), 0);
    }
    match z {
        Some(zv) if !zv.is_zero() => complete_frame(&normalize(zv), 2),
        _ => complete_frame(&V3::axis(0), 2),
    }
}

// --- JSON state schema ------------------------------------------------
//
// 3D: {"u":[3], "b":[3], "S":[6 upper-triangular row-major], "a":[3]}
// 2D: {"alpha":[2], "beta":[2], "M":[4 row-major]}
//
// Values are JSON numbers; the exact backend also accepts "p/q" strings
// and emits them so certificates round-trip without loss.

pub fn scalar_to_json<T: Scalar>(x: &T) -> Value {
    if T::EXACT {
        Value::String(format!("{x}"))
    } else {
        json!(x.to_f64())
    }
}

pub fn scalar_from_json<T: Scalar>(v: &Value) -> Option<T> {
    match v {
        Value::Number(n) => Some(T::from_f64(n.as_f64()?)),
        Value::String(s) => T::parse(s),
        _ => None,
    }
}

fn vec_from_json<T: Scalar, const N: usize>(v: &Value) -> Option<[T; N]> {
    let arr = v.as_array()?;
    if arr.len() != N {
        return None;
    }
    let mut out: Vec<T> = Vec::with_capacity(N);
    for x in arr {
        out.push(scalar_from_json(x)?);
    }
    out.try_into().ok()
}

pub fn state3_to_json<T: Scalar>(s: &State3<T>) -> Value {
    json!({
        "u": s.u.0.iter().map(scalar_to_json).collect::<Vec<_>>(),
        "b": s.b.0.iter().map(scalar_to_json).collect::<Vec<_>>(),
        "S": s.s.0.iter().map(scalar_to_json).collect::<Vec<_>>(),
        "a": s.a.0.iter().map(scalar_to_json).collect::<Vec<_>>(),
    })
}

pub fn state3_from_json<T: Scalar>(v: &Value) -> Option<State3<T>> {
    Some(State3 {
        u: V3(vec_from_json::<T, 3>(v.get("u")?)?),
        b: V3(vec_from_json::<T, 3>(v.get("b")?)?),
        s: Sym3(vec_from_json::<T, 6>(v.get("S")?)?),
        a: V3(vec_from_json::<T, 3>(v.get("a")?)?),
    })
}

pub fn state2_to_json<T: Scalar>(s: &State2<T>) -> Value {
    let m = &s.m.0;
    json!({
        "alpha": s.alpha.0.iter().map(scalar_to_json).collect::<Vec<_>>(),
        "beta": s.beta.0.iter().map(scalar_to_json).collect::<Vec<_>>(),
        "M": [scalar_to_json(&m[0][0]), scalar_to_json(&m[0][1]),
              scalar_to_json(&m[1][0]), scalar_to_json(&m[1][1])],
    })
}

pub fn state2_from_json<T: Scalar>(v: &Value) -> Option<State2<T>> {
    let m: [T; 4] = vec_from_json(v.get("M")?)?;
    let [m00, m01, m10, m11] = m;
    Some(State2 {
        alpha: V2(vec_from_json::<T, 2>(v.get("alpha")?)?),
        beta: V2(vec_from_json::<T, 2>(v.get("beta")?)?),
        m: M2([[m00, m01], [m10, m11]]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use num::{One, Zero};

    fn st(u: [f64; 3], b: [f64; 3], a: [f64; 3]) -> State3<f64> {
        State3 {
            u: V3(u),
            b: V3(b),
            s: Sym3::zero(),
            a: V3(a),
        }
    }

    #[test]
    fn elsasser_of_simple_state() {
        let s = st([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]);
        let e = to_elsasser(&s);
        assert_eq!(e.zp.0, [1.0, 1.0, 0.0]);
        assert_eq!(e.zm.0, [1.0, -1.0, 0.0]);
        assert_eq!(e.m, M3::zero());
        assert_eq!(from_elsasser(&e), s);
    }

    #[test]
    fn euler_reduction_has_no_magnetic_part() {
        // zp = zm = v with symmetric M comes back with b = 0, a = 0.
        let v = V3::new(0.3, -1.0, 2.0);
        let m = M3([[1.0, 0.5, 0.0], [0.5, 2.0, -1.0], [0.0, -1.0, 0.25]]);
        let s = from_elsasser(&Elsasser3::new(v.clone(), v.clone(), m));
        assert!(s.b.is_zero());
        assert!(s.a.is_zero());
        assert_eq!(s.u, v);
    }

    #[test]
    fn q_vanishes_under_ideal_ohm() {
        let u = V3::new(1.0, 0.0, 0.0);
        let b = V3::new(0.0, 1.0, 0.0);
        let a = b.cross(&u);
        assert_eq!(a.0, [0.0, 0.0, -1.0]);
        let s = State3 {
            u,
            b,
            s: Sym3::zero(),
            a,
        };
        assert_eq!(q_helicity(&s), 0.0);
        let s2 = st([0.0; 3], [0.0, 0.0, 2.0], [0.0, 0.0, 1.0]);
        assert_eq!(q_helicity(&s2), 2.0);
    }

    #[test]
    fn f2d_examples() {
        let alpha = V2::new(1.0, 0.0);
        let beta = V2::new(0.0, 1.0);
        let k_point = State2::product(&alpha, &beta, &0.0);
        assert_eq!(lambda_convex_f2d(&k_point), 0.0);

        let s = State2::new(
            alpha.clone(),
            beta.clone(),
            M2([[0.0, 1.0], [1.0, 0.0]]),
        );
        assert_eq!(lambda_convex_f2d(&s), 1.0);

        // Diagonal shift invariance.
        let shifted = State2::new(alpha, beta, s.m.add(&M2::identity_times(&7.5)));
        assert_eq!(lambda_convex_f2d(&shifted), lambda_convex_f2d(&s));
    }

    #[test]
    fn k_membership_examples() {
        let zp = V3::new(1.0, 0.0, 0.0);
        let zm = V3::new(0.0, 1.0, 0.0);
        let m = M3::outer(&zp, &zm).add(&M3::identity_times(&0.5));
        let e = Elsasser3::new(zp.clone(), zm.clone(), m.clone());
        match k_membership(&e, &1.0, &1.0, &1e-12) {
            KMembership::InKrs { pi } => assert!((pi - 0.5).abs() < 1e-15),
            other => panic!("expected InKrs, got {other:?}"),
        }

        // Adding diag(1,0,0) leaves a traceless defect with largest entry 2/3.
        let mut m2 = m;
        m2.0[0][0] += 1.0;
        match k_membership(&Elsasser3::new(zp, zm, m2), &1.0, &1.0, &1e-12) {
            KMembership::NotInK { defect } => assert!((defect - 2.0 / 3.0).abs() < 1e-15),
            other => panic!("expected NotInK, got {other:?}"),
        }

        // Pure pressure point: in K but with the wrong norms for K_{r,s}.
        let e = Elsasser3::new(V3::zero(), V3::zero(), M3::identity_times(&0.5));
        match k_membership(&e, &1.0, &1.0, &1e-12) {
            KMembership::InK { pi } => assert!((pi - 0.5).abs() < 1e-15),
            other => panic!("expected InK, got {other:?}"),
        }
    }

    #[test]
    fn frame_examples() {
        // alpha = e1, beta = 0 completes to the standard frame.
        let f = build_frame::<f64>(&V3::axis(0), &V3::zero(), None);
        assert_eq!(f, Frame::standard());

        // Degenerate pair with an axial hint pins f3 = z/|z|.
        let f = build_frame::<f64>(&V3::axis(1), &V3::axis(1), Some(&V3::new(0.0, 0.0, 5.0)));
        assert_eq!(f.f3.0, [0.0, 0.0, 1.0]);
        assert!(f.gram_defect() < 1e-14);
        assert!((f.det() - 1.0).abs() < 1e-14);

        // Degenerate pair without a hint falls back to f3 = (1,0,0).
        let f = build_frame::<f64>(&V3::zero(), &V3::zero(), None);
        assert_eq!(f.f3.0, [1.0, 0.0, 0.0]);
        assert!((f.det() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_frame_from_rational_unit_is_exact() {
        let f1 = V3::<Rat>::new(Rat::ratio(1, 3), Rat::ratio(2, 3), Rat::ratio(2, 3));
        let beta = V3::zero();
        let f = build_frame(&f1, &beta, None);
        assert!(f.gram_defect().is_zero());
        assert_eq!(f.det(), Rat::one());
        assert_eq!(f.f1, f1);
        // Frame coefficients reassemble exactly.
        let n = M3::from_f64([[0.25, 1.0, 0.0], [0.0, -2.0, 3.0], [1.0, 0.0, 0.5]]);
        let c = f.coefficients(&n);
        assert_eq!(f.assemble(&c), n);
    }

    #[test]
    fn state_json_roundtrip() {
        let s = st([1.0, 2.0, 3.0], [0.5, 0.0, -1.0], [0.0, 1.0, 0.0]);
        let v = state3_to_json(&s);
        let back: State3<f64> = state3_from_json(&v).unwrap();
        assert_eq!(back, s);

        let sr: State3<Rat> = state3_from_json(&v).unwrap();
        let vr = state3_to_json(&sr);
        let back: State3<Rat> = state3_from_json(&vr).unwrap();
        assert_eq!(back, sr);
    }
}
