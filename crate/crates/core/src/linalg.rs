//! Fixed-size vectors and matrices generic over the scalar backend.
//!
//! Hand-rolled on purpose: the hull certificates need exact rational
//! arithmetic on 3x3 blocks, which rules out the usual float-oriented
//! linear-algebra crates.

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct V2<T>(pub [T; 2]);

#[derive(Clone, Debug, PartialEq)]
pub struct V3<T>(pub [T; 3]);

/// Row-major 2x2 matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct M2<T>(pub [[T; 2]; 2]);

/// Row-major 3x3 matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct M3<T>(pub [[T; 3]; 3]);

impl<T: Scalar> V2<T> {
    pub fn new(x: T, y: T) -> Self {
        V2([x, y])
    }
    pub fn zero() -> Self {
        V2([T::zero(), T::zero()])
    }
    pub fn from_f64(v: [f64; 2]) -> Self {
        V2([T::from_f64(v[0]), T::from_f64(v[1])])
    }
    pub fn add(&self, o: &Self) -> Self {
        V2([
            self.0[0].clone() + o.0[0].clone(),
            self.0[1].clone() + o.0[1].clone(),
        ])
    }
    pub fn sub(&self, o: &Self) -> Self {
        V2([
            self.0[0].clone() - o.0[0].clone(),
            self.0[1].clone() - o.0[1].clone(),
        ])
    }
    pub fn scale(&self, k: &T) -> Self {
        V2([self.0[0].clone() * k.clone(), self.0[1].clone() * k.clone()])
    }
    pub fn dot(&self, o: &Self) -> T {
        self.0[0].clone() * o.0[0].clone() + self.0[1].clone() * o.0[1].clone()
    }
    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }
    /// Counterclockwise rotation by a quarter turn: `(-y, x)`.
    pub fn perp(&self) -> Self {
        V2([-self.0[1].clone(), self.0[0].clone()])
    }
    /// 2D cross product `self x o = x1*y2 - x2*y1`.
    pub fn cross(&self, o: &Self) -> T {
        self.0[0].clone() * o.0[1].clone() - self.0[1].clone() * o.0[0].clone()
    }
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }
    pub fn inf_norm(&self) -> T {
        self.0[0].abs().max_with(&self.0[1].abs())
    }
    pub fn to_f64(&self) -> [f64; 2] {
        [self.0[0].to_f64(), self.0[1].to_f64()]
    }
}

impl<T: Scalar> V3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        V3([x, y, z])
    }
    pub fn zero() -> Self {
        V3([T::zero(), T::zero(), T::zero()])
    }
    pub fn axis(i: usize) -> Self {
        let mut v = Self::zero();
        v.0[i] = T::one();
        v
    }
    pub fn from_f64(v: [f64; 3]) -> Self {
        V3([T::from_f64(v[0]), T::from_f64(v[1]), T::from_f64(v[2])])
    }
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> V3<U> {
        V3([f(&self.0[0]), f(&self.0[1]), f(&self.0[2])])
    }
    pub fn add(&self, o: &Self) -> Self {
        V3([
            self.0[0].clone() + o.0[0].clone(),
            self.0[1].clone() + o.0[1].clone(),
            self.0[2].clone() + o.0[2].clone(),
        ])
    }
    pub fn sub(&self, o: &Self) -> Self {
        V3([
            self.0[0].clone() - o.0[0].clone(),
            self.0[1].clone() - o.0[1].clone(),
            self.0[2].clone() - o.0[2].clone(),
        ])
    }
    pub fn neg(&self) -> Self {
        V3([
            -self.0[0].clone(),
            -self.0[1].clone(),
            -self.0[2].clone(),
        ])
    }
    pub fn scale(&self, k: &T) -> Self {
        V3([
            self.0[0].clone() * k.clone(),
            self.0[1].clone() * k.clone(),
            self.0[2].clone() * k.clone(),
        ])
    }
    pub fn dot(&self, o: &Self) -> T {
        self.0[0].clone() * o.0[0].clone()
            + self.0[1].clone() * o.0[1].clone()
            + self.0[2].clone() * o.0[2].clone()
    }
    pub fn cross(&self, o: &Self) -> Self {
        V3([
            self.0[1].clone() * o.0[2].clone() - self.0[2].clone() * o.0[1].clone(),
            self.0[2].clone() * o.0[0].clone() - self.0[0].clone() * o.0[2].clone(),
            self.0[0].clone() * o.0[1].clone() - self.0[1].clone() * o.0[0].clone(),
        ])
    }
    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }
    pub fn inf_norm(&self) -> T {
        self.0[0]
            .abs()
            .max_with(&self.0[1].abs())
            .max_with(&self.0[2].abs())
    }
    pub fn to_f64(&self) -> [f64; 3] {
        [self.0[0].to_f64(), self.0[1].to_f64(), self.0[2].to_f64()]
    }
}

impl<T: Scalar> M2<T> {
    pub fn zero() -> Self {
        M2([[T::zero(), T::zero()], [T::zero(), T::zero()]])
    }
    pub fn identity_times(k: &T) -> Self {
        M2([[k.clone(), T::zero()], [T::zero(), k.clone()]])
    }
    pub fn from_f64(m: [[f64; 2]; 2]) -> Self {
        M2([
            [T::from_f64(m[0][0]), T::from_f64(m[0][1])],
            [T::from_f64(m[1][0]), T::from_f64(m[1][1])],
        ])
    }
    pub fn outer(u: &V2<T>, v: &V2<T>) -> Self {
        M2([
            [u.0[0].clone() * v.0[0].clone(), u.0[0].clone() * v.0[1].clone()],
            [u.0[1].clone() * v.0[0].clone(), u.0[1].clone() * v.0[1].clone()],
        ])
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut m = self.clone();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = m.0[i][j].clone() + o.0[i][j].clone();
            }
        }
        m
    }
    pub fn sub(&self, o: &Self) -> Self {
        let mut m = self.clone();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = m.0[i][j].clone() - o.0[i][j].clone();
            }
        }
        m
    }
    pub fn scale(&self, k: &T) -> Self {
        let mut m = self.clone();
        for row in m.0.iter_mut() {
            for x in row.iter_mut() {
                *x = x.clone() * k.clone();
            }
        }
        m
    }
    pub fn matvec(&self, v: &V2<T>) -> V2<T> {
        V2([
            self.0[0][0].clone() * v.0[0].clone() + self.0[0][1].clone() * v.0[1].clone(),
            self.0[1][0].clone() * v.0[0].clone() + self.0[1][1].clone() * v.0[1].clone(),
        ])
    }
    pub fn transpose(&self) -> Self {
        M2([
            [self.0[0][0].clone(), self.0[1][0].clone()],
            [self.0[0][1].clone(), self.0[1][1].clone()],
        ])
    }
    pub fn trace(&self) -> T {
        self.0[0][0].clone() + self.0[1][1].clone()
    }
    pub fn det(&self) -> T {
        self.0[0][0].clone() * self.0[1][1].clone() - self.0[0][1].clone() * self.0[1][0].clone()
    }
    pub fn inf_norm(&self) -> T {
        let mut m = T::zero();
        for row in &self.0 {
            for x in row {
                m = m.max_with(&x.abs());
            }
        }
        m
    }
    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        [
            [self.0[0][0].to_f64(), self.0[0][1].to_f64()],
            [self.0[1][0].to_f64(), self.0[1][1].to_f64()],
        ]
    }
}

impl<T: Scalar> M3<T> {
    pub fn zero() -> Self {
        M3([
            [T::zero(), T::zero(), T::zero()],
            [T::zero(), T::zero(), T::zero()],
            [T::zero(), T::zero(), T::zero()],
        ])
    }
    pub fn identity_times(k: &T) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            m.0[i][i] = k.clone();
        }
        m
    }
    pub fn from_f64(m: [[f64; 3]; 3]) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = T::from_f64(m[i][j]);
            }
        }
        out
    }
    pub fn outer(u: &V3<T>, v: &V3<T>) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = u.0[i].clone() * v.0[j].clone();
            }
        }
        m
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut m = self.clone();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = m.0[i][j].clone() + o.0[i][j].clone();
            }
        }
        m
    }
    pub fn sub(&self, o: &Self) -> Self {
        let mut m = self.clone();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = m.0[i][j].clone() - o.0[i][j].clone();
            }
        }
        m
    }
    pub fn scale(&self, k: &T) -> Self {
        let mut m = self.clone();
        for row in m.0.iter_mut() {
            for x in row.iter_mut() {
                *x = x.clone() * k.clone();
            }
        }
        m
    }
    pub fn matvec(&self, v: &V3<T>) -> V3<T> {
        V3([
            self.0[0][0].clone() * v.0[0].clone()
                + self.0[0][1].clone() * v.0[1].clone()
                + self.0[0][2].clone() * v.0[2].clone(),
            self.0[1][0].clone() * v.0[0].clone()
                + self.0[1][1].clone() * v.0[1].clone()
                + self.0[1][2].clone() * v.0[2].clone(),
            self.0[2][0].clone() * v.0[0].clone()
                + self.0[2][1].clone() * v.0[1].clone()
                + self.0[2][2].clone() * v.0[2].clone(),
        ])
    }
    pub fn tr_matvec(&self, v: &V3<T>) -> V3<T> {
        self.transpose().matvec(v)
    }
    pub fn transpose(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i].clone();
            }
        }
        m
    }
    pub fn trace(&self) -> T {
        self.0[0][0].clone() + self.0[1][1].clone() + self.0[2][2].clone()
    }
    pub fn det(&self) -> T {
        let m = &self.0;
        m[0][0].clone()
            * (m[1][1].clone() * m[2][2].clone() - m[1][2].clone() * m[2][1].clone())
            - m[0][1].clone()
                * (m[1][0].clone() * m[2][2].clone() - m[1][2].clone() * m[2][0].clone())
            + m[0][2].clone()
                * (m[1][0].clone() * m[2][1].clone() - m[1][1].clone() * m[2][0].clone())
    }
    pub fn frobenius_sq(&self) -> T {
        let mut s = T::zero();
        for row in &self.0 {
            for x in row {
                s = s + x.clone() * x.clone();
            }
        }
        s
    }
    pub fn inf_norm(&self) -> T {
        let mut m = T::zero();
        for row in &self.0 {
            for x in row {
                m = m.max_with(&x.abs());
            }
        }
        m
    }
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|r| r.iter().all(|x| x.is_zero()))
    }
    pub fn col(&self, j: usize) -> V3<T> {
        V3([self.0[0][j].clone(), self.0[1][j].clone(), self.0[2][j].clone()])
    }
    pub fn from_cols(c0: &V3<T>, c1: &V3<T>, c2: &V3<T>) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            m.0[i][0] = c0.0[i].clone();
            m.0[i][1] = c1.0[i].clone();
            m.0[i][2] = c2.0[i].clone();
        }
        m
    }
    /// Inverse via the adjugate; `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.is_zero() {
            return None;
        }
        let m = &self.0;
        let cof = |a: usize, b: usize, c: usize, e: usize| {
            m[a][b].clone() * m[c][e].clone() - m[a][e].clone() * m[c][b].clone()
        };
        let adj = M3([
            [cof(1, 1, 2, 2), cof(0, 2, 2, 1), cof(0, 1, 1, 2)],
            [cof(1, 2, 2, 0), cof(0, 0, 2, 2), cof(0, 2, 1, 0)],
            [cof(1, 0, 2, 1), cof(0, 1, 2, 0), cof(0, 0, 1, 1)],
        ]);
        Some(adj.scale(&(T::one() / d)))
    }
    /// Axial vector of the antisymmetric part: `w` with `skew(M) xi = xi x w`.
    pub fn axial(&self) -> V3<T> {
        let h = T::ratio(1, 2);
        V3([
            (self.0[1][2].clone() - self.0[2][1].clone()) * h.clone(),
            (self.0[2][0].clone() - self.0[0][2].clone()) * h.clone(),
            (self.0[0][1].clone() - self.0[1][0].clone()) * h,
        ])
    }
    pub fn to_f64(&self) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = self.0[i][j].to_f64();
            }
        }
        out
    }
}

/// Antisymmetric matrix of an axial vector: `A xi = xi x a`.
pub fn axial_matrix<T: Scalar>(a: &V3<T>) -> M3<T> {
    M3([
        [T::zero(), a.0[2].clone(), -a.0[1].clone()],
        [-a.0[2].clone(), T::zero(), a.0[0].clone()],
        [a.0[1].clone(), -a.0[0].clone(), T::zero()],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use num::{One, Zero};

    #[test]
    fn axial_matrix_matches_cross_product() {
        // a = (0,0,1): A e1 = e1 x a = (0,-1,0), expanded componentwise.
        let a = V3::<f64>::new(0.0, 0.0, 1.0);
        let m = axial_matrix(&a);
        assert_eq!(m.0, [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        for i in 0..3 {
            let e = V3::<f64>::axis(i);
            assert_eq!(m.matvec(&e), e.cross(&a));
        }
        assert_eq!(m.axial(), a);
    }

    #[test]
    fn exact_inverse_roundtrip() {
        let m = M3::<Rat>::from_f64([[2.0, 1.0, 0.0], [0.5, 3.0, 1.0], [0.0, 1.0, 4.0]]);
        let inv = m.inverse().unwrap();
        let mut prod = M3::<Rat>::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = Rat::zero();
                for (k, mk) in m.0[i].iter().enumerate() {
                    s = s + mk.clone() * inv.0[k][j].clone();
                }
                prod.0[i][j] = s;
            }
        }
        assert_eq!(prod, M3::identity_times(&Rat::one()));
    }
}
