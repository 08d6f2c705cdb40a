//! Lambda lengths of decorated ideal polygons in the chord model.
//!
//! Points live on the unit circle; a horocycle at angle `theta` is described
//! by a positive parameter `h`, and the lambda length of the arc joining two
//! decorated points is `|chord| / sqrt(h h')`.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::laurent::{LaurentError, LaurentPoly};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LambdaError {
    #[error("points coincide on the absolute")]
    CoincidentPoints,
    #[error("diagonal is zero")]
    ZeroDiagonal,
    #[error("expected a positive value, got {0}")]
    NonPositive(f64),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoratedPoint {
    pub angle: f64,
    pub h: f64,
}

impl DecoratedPoint {
    pub fn new(angle: f64, h: f64) -> Result<Self, LambdaError> {
        if !(h > 0.0) {
            return Err(LambdaError::NonPositive(h));
        }
        Ok(DecoratedPoint {
            angle: angle.rem_euclid(2.0 * PI),
            h,
        })
    }
}

pub fn lambda_length(p: &DecoratedPoint, q: &DecoratedPoint) -> Result<f64, LambdaError> {
    let chord = 2.0 * ((p.angle - q.angle) / 2.0).sin().abs();
    if chord < 1e-15 {
        return Err(LambdaError::CoincidentPoints);
    }
    Ok(chord / (p.h * q.h).sqrt())
}

/// The other diagonal of a quadrilateral with sides `a1..a4` (in cyclic
/// order) and diagonal `d`.
pub fn ptolemy_flip(a1: f64, a2: f64, a3: f64, a4: f64, d: f64) -> Result<f64, LambdaError> {
    if d == 0.0 {
        return Err(LambdaError::ZeroDiagonal);
    }
    Ok((a1 * a3 + a2 * a4) / d)
}

pub fn ptolemy_flip_poly(
    a1: &LaurentPoly,
    a2: &LaurentPoly,
    a3: &LaurentPoly,
    a4: &LaurentPoly,
    d: &LaurentPoly,
) -> Result<LaurentPoly, LambdaError> {
    if d.is_zero() {
        return Err(LambdaError::ZeroDiagonal);
    }
    let num = &(a1 * a3) + &(a2 * a4);
    Ok(num.exact_divide(d)?)
}

/// `c_k` for `k = 1..p-1`, the lambda lengths of the `k`-diagonals of a
/// regular decorated `p`-gon with side `c`.
pub fn pgon_diagonals(p: u32, c: f64) -> Result<Vec<f64>, LambdaError> {
    if p < 2 {
        return Err(LambdaError::OutOfRange(format!("p = {p}")));
    }
    if !(c > 0.0) {
        return Err(LambdaError::NonPositive(c));
    }
    let s = (PI / p as f64).sin();
    let mut out: Vec<f64> = (1..p).map(|k| c * (PI * k as f64 / p as f64).sin() / s).collect();
    out[0] = c;
    // sin is only symmetric up to rounding
    for k in 0..out.len() / 2 {
        let j = out.len() - 1 - k;
        out[j] = out[k];
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CcPrimeReport {
    pub p: u32,
    pub phi: f64,
    pub h: f64,
    pub h_apex: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub c_prime: f64,
    pub residual: f64,
    pub pass: bool,
}

/// Checks `c c' = a^2 + w_p a b + b^2` in the `p`-fold symmetric model: a
/// regular `p`-gon with horocycle parameter `h` and apexes rotated by `phi`
/// with parameter `h_apex`.
pub fn verify_cc_prime(p: u32, phi: f64, h: f64, h_apex: f64, tol: f64) -> Result<CcPrimeReport, LambdaError> {
    if p < 2 {
        return Err(LambdaError::OutOfRange(format!("p = {p}")));
    }
    let step = 2.0 * PI / p as f64;
    if !(phi > 0.0 && phi < step) {
        return Err(LambdaError::OutOfRange(format!("phi = {phi} not in (0, 2pi/{p})")));
    }
    let vertex = |k: u32| DecoratedPoint::new(step * k as f64, h);
    let apex = |k: u32| DecoratedPoint::new(step * k as f64 + phi, h_apex);
    let (v0, v1, a0, a1) = (vertex(0)?, vertex(1)?, apex(0)?, apex(1)?);
    let a = lambda_length(&a0, &v1)?;
    let b = lambda_length(&v0, &a0)?;
    let c = lambda_length(&v0, &v1)?;
    let c_prime = lambda_length(&a0, &a1)?;
    let w = 2.0 * (PI / p as f64).cos();
    let lhs = c * c_prime;
    let residual = (lhs - (a * a + w * a * b + b * b)).abs() / lhs;
    Ok(CcPrimeReport {
        p,
        phi,
        h,
        h_apex,
        a,
        b,
        c,
        c_prime,
        residual,
        pass: residual < tol,
    })
}

/// `verify_cc_prime` at `samples` random points: `phi` uniform in the open
/// range, horocycle parameters log-uniform in `[0.2, 5]`.
pub fn cc_prime_sweep<R: Rng + ?Sized>(rng: &mut R, p: u32, samples: usize, tol: f64) -> Result<Vec<CcPrimeReport>, LambdaError> {
    let step = 2.0 * PI / p.max(1) as f64;
    let param = |rng: &mut R| (rng.gen_range(-1.0f64..1.0) * 5f64.ln()).exp();
    (0..samples)
        .map(|_| {
            let (h, h_apex) = (param(rng), param(rng));
            let phi = step * rng.gen_range(1e-6..1.0 - 1e-6);
            verify_cc_prime(p, phi, h, h_apex, tol)
        })
        .collect()
}

/// Shear coordinate of the diagonal of a quadrilateral with sides `a1..a4`.
pub fn shear_from_lambda(a1: f64, a2: f64, a3: f64, a4: f64) -> Result<f64, LambdaError> {
    for a in [a1, a2, a3, a4] {
        if !(a > 0.0) {
            return Err(LambdaError::NonPositive(a));
        }
    }
    Ok((a1 * a3 / (a2 * a4)).ln())
}
