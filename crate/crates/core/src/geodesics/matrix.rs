use std::f64::consts::PI;
use std::sync::Arc;

use crate::laurent::{LaurentPoly, Monomial, PolyRing};
use crate::ring::CyclotomicField;

use super::WordError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Mat2 {
        Mat2([[1.0, 0.0], [0.0, 1.0]])
    }

    /// `X_Z = [[0, -e^{Z/2}], [e^{-Z/2}, 0]]`.
    pub fn x(z: f64) -> Mat2 {
        let a = (z / 2.0).exp();
        Mat2([[0.0, -a], [1.0 / a, 0.0]])
    }

    pub fn r() -> Mat2 {
        Mat2([[1.0, 1.0], [-1.0, 0.0]])
    }

    pub fn l() -> Mat2 {
        Mat2([[0.0, 1.0], [-1.0, -1.0]])
    }

    /// `F_p = [[0, 1], [-1, -w_p]]` with `w_p = 2 cos(pi / p)`.
    pub fn f(p: u32) -> Mat2 {
        Mat2([[0.0, 1.0], [-1.0, -2.0 * (PI / p as f64).cos()]])
    }

    /// `(-1)^{k+1} F_p^k`.
    pub fn rotate(p: u32, k: u32) -> Mat2 {
        let m = Mat2::f(p).pow(k);
        if k % 2 == 0 {
            m.scale(-1.0)
        } else {
            m
        }
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }

    pub fn pow(&self, k: u32) -> Mat2 {
        (0..k).fold(Mat2::identity(), |acc, _| acc.mul(self))
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2(self.0.map(|row| row.map(|x| s * x)))
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn max_abs_diff(&self, o: &Mat2) -> f64 {
        (0..4).map(|i| (self.0[i / 2][i % 2] - o.0[i / 2][i % 2]).abs()).fold(0.0, f64::max)
    }

    pub fn product(ms: &[Mat2]) -> Mat2 {
        ms.iter().fold(Mat2::identity(), |acc, m| acc.mul(m))
    }
}

/// 2x2 matrix of Laurent polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat2(pub [[LaurentPoly; 2]; 2]);

impl SymMat2 {
    fn ints(ring: &Arc<PolyRing>, m: [[i64; 2]; 2]) -> SymMat2 {
        SymMat2(m.map(|row| row.map(|x| LaurentPoly::int(ring, x))))
    }

    pub fn identity(ring: &Arc<PolyRing>) -> SymMat2 {
        SymMat2::ints(ring, [[1, 0], [0, 1]])
    }

    /// `X` with `e^{Z/2}` the ring variable `var`.
    pub fn x(ring: &Arc<PolyRing>, var: usize) -> SymMat2 {
        let lam = LaurentPoly::var(ring, var);
        let mut inv = vec![0; ring.nvars()];
        inv[var] = -1;
        let inv = LaurentPoly::monomial(ring, ring.field().one(), Monomial(inv));
        SymMat2([[LaurentPoly::zero(ring), -&lam], [inv, LaurentPoly::zero(ring)]])
    }

    pub fn r(ring: &Arc<PolyRing>) -> SymMat2 {
        SymMat2::ints(ring, [[1, 1], [-1, 0]])
    }

    pub fn l(ring: &Arc<PolyRing>) -> SymMat2 {
        SymMat2::ints(ring, [[0, 1], [-1, -1]])
    }

    pub fn f(ring: &Arc<PolyRing>, p: u32) -> Result<SymMat2, WordError> {
        let w = ring.field().omega(p).map_err(|_| WordError::FieldLacksOrder(p))?;
        let mut m = SymMat2::ints(ring, [[0, 1], [-1, 0]]);
        m.0[1][1] = LaurentPoly::constant(ring, -&w);
        Ok(m)
    }

    pub fn rotate(ring: &Arc<PolyRing>, p: u32, k: u32) -> Result<SymMat2, WordError> {
        let f = SymMat2::f(ring, p)?;
        let mut m = (0..k).fold(SymMat2::identity(ring), |acc, _| acc.mul(&f));
        if k % 2 == 0 {
            m = m.neg();
        }
        Ok(m)
    }

    pub fn mul(&self, o: &SymMat2) -> SymMat2 {
        let (a, b) = (&self.0, &o.0);
        let e = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
        SymMat2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn neg(&self) -> SymMat2 {
        SymMat2(self.0.clone().map(|row| row.map(|x| -&x)))
    }

    pub fn trace(&self) -> LaurentPoly {
        &self.0[0][0] + &self.0[1][1]
    }

    pub fn det(&self) -> LaurentPoly {
        &(&self.0[0][0] * &self.0[1][1]) - &(&self.0[0][1] * &self.0[1][0])
    }
}

/// `F_p^p == (-1)^{p-1} E`, computed exactly in the cyclotomic field.
pub fn fp_power_is_scalar(p: u32) -> bool {
    let field = CyclotomicField::for_orders(&[p]).expect("p >= 2");
    let ring = PolyRing::new(field, Vec::<String>::new());
    let f = SymMat2::f(&ring, p).expect("field contains w_p");
    let power = (0..p).fold(SymMat2::identity(&ring), |acc, _| acc.mul(&f));
    let expected = if p % 2 == 1 {
        SymMat2::identity(&ring)
    } else {
        SymMat2::identity(&ring).neg()
    };
    power == expected
}
