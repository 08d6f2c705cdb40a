//! Shear coordinates of the `p`-fold covering polygon and the matrix
//! identities that trade a rotation `F_p^k` for a chain of turns.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use super::{Mat2, WordError};

#[derive(Debug, Clone, Serialize)]
pub struct PgonShears {
    pub p: u32,
    pub phi: f64,
    pub z: f64,
    /// `Z_1 .. Z_p`.
    pub zs: Vec<f64>,
    /// `Y_2 .. Y_{p-2}`.
    pub ys: Vec<f64>,
}

impl PgonShears {
    /// `Z_k` for `k` in `1..=p`.
    pub fn z_k(&self, k: u32) -> f64 {
        self.zs[k as usize - 1]
    }

    /// `Y_k` for `k` in `2..=p-2`.
    pub fn y_k(&self, k: u32) -> f64 {
        self.ys[k as usize - 2]
    }
}

fn check_range(p: u32, phi: f64) -> Result<(), WordError> {
    if p < 2 || !(phi > 0.0 && phi < 2.0 * PI / p as f64) {
        return Err(WordError::Malformed(format!("need p >= 2 and 0 < phi < 2pi/p, got p = {p}, phi = {phi}")));
    }
    Ok(())
}

pub fn pgon_shear_data(p: u32, phi: f64) -> Result<PgonShears, WordError> {
    check_range(p, phi)?;
    let s = |k: f64| (k * PI / p as f64).sin();
    let ez = (PI / p as f64 - phi / 2.0).sin() / (phi / 2.0).sin();
    let z = ez.ln();
    let mut zs: Vec<f64> = (1..=p)
        .map(|k| match k {
            1 => (ez * s(2.0) / s(1.0)).ln(),
            k if k == p => (ez * s(1.0) / s(2.0)).ln(),
            k => (ez * s(k as f64 - 1.0) / s(k as f64)).ln(),
        })
        .collect();
    if p == 2 {
        // sin(2 pi / p) vanishes: Z_1 = -inf and Z_2 = +inf.
        zs = vec![f64::NEG_INFINITY, f64::INFINITY];
    }
    let ys = (2..p.saturating_sub(1))
        .map(|k| (s(k as f64 + 1.0) / s(k as f64 - 1.0)).ln())
        .collect();
    Ok(PgonShears { p, phi, z, zs, ys })
}

#[derive(Debug, Clone, Serialize)]
pub struct PgonIdentity {
    pub k: u32,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PgonReport {
    pub p: u32,
    pub phi: f64,
    pub identities: Vec<PgonIdentity>,
    pub max_residual: f64,
}

/// Entrywise residuals of
/// `X_Z (-1)^{k-1} F_p^k X_Z = X_{Z_1} R X_{Y_2} R .. R X_{Y_k} L X_{Z_{k+1}}`
/// for `k = 1..p-2`, and of the closing identity with `F_p^{p-1}` and a final
/// right turn into `X_{Z_p}`.
pub fn verify_pgon_identities(p: u32, phi: f64) -> Result<PgonReport, WordError> {
    let sh = pgon_shear_data(p, phi)?;
    let x = Mat2::x;
    let xz = x(sh.z);
    let lhs = |k: u32| {
        let sign = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
        Mat2::product(&[xz, Mat2::f(p).pow(k).scale(sign), xz])
    };
    let chain = |k: u32| {
        let mut ms = vec![x(sh.z_k(1))];
        for j in 2..=k {
            ms.push(Mat2::r());
            ms.push(x(sh.y_k(j)));
        }
        ms
    };
    let mut identities = Vec::new();
    if p == 2 {
        // X_{Z_1} L X_{Z_2} in the limit Z_1 -> -inf, Z_2 -> +inf with
        // Z_1 + Z_2 = 2Z and Z_1 - Z_2 = 2 log w_p.
        let w = 2.0 * (PI / 2.0).cos();
        let rhs = Mat2([[w, -sh.z.exp()], [(-sh.z).exp(), 0.0]]);
        identities.push(PgonIdentity {
            k: 1,
            residual: lhs(1).max_abs_diff(&rhs),
        });
    } else {
        for k in 1..=p - 2 {
            let mut ms = chain(k);
            ms.push(Mat2::l());
            ms.push(x(sh.z_k(k + 1)));
            identities.push(PgonIdentity {
                k,
                residual: lhs(k).max_abs_diff(&Mat2::product(&ms)),
            });
        }
        let mut ms = chain(p - 2);
        ms.push(Mat2::r());
        ms.push(x(sh.z_k(p)));
        identities.push(PgonIdentity {
            k: p - 1,
            residual: lhs(p - 1).max_abs_diff(&Mat2::product(&ms)),
        });
    }
    let max_residual = identities.iter().map(|i| i.residual).fold(0.0, f64::max);
    Ok(PgonReport {
        p,
        phi,
        identities,
        max_residual,
    })
}

/// The `phi` at which the central shear of the covering polygon is `z`.
pub fn phi_for_shear(p: u32, z: f64) -> f64 {
    let a = PI / p as f64;
    2.0 * a.sin().atan2(z.exp() + a.cos())
}

/// Right-hand side of the identity for `X_Z (-1)^{k-1} F_p^k X_Z`: a
/// rotation-free product with the same value.
pub fn unrolled_rotation(p: u32, k: u32, z: f64) -> Mat2 {
    let sh = pgon_shear_data(p, phi_for_shear(p, z)).expect("phi in range");
    if p == 2 {
        return Mat2([[2.0 * (PI / 2.0).cos(), -z.exp()], [(-z).exp(), 0.0]]);
    }
    let mut ms = vec![Mat2::x(sh.z_k(1))];
    for j in 2..=k.min(p - 2) {
        ms.push(Mat2::r());
        ms.push(Mat2::x(sh.y_k(j)));
    }
    if k == p - 1 {
        ms.push(Mat2::r());
        ms.push(Mat2::x(sh.z_k(p)));
    } else {
        ms.push(Mat2::l());
        ms.push(Mat2::x(sh.z_k(k + 1)));
    }
    Mat2::product(&ms)
}

/// `verify_pgon_identities` at `samples` uniform `phi` in the open range.
pub fn pgon_sweep<R: Rng + ?Sized>(rng: &mut R, p: u32, samples: usize) -> Result<Vec<PgonReport>, WordError> {
    let top = 2.0 * PI / p.max(1) as f64;
    (0..samples)
        .map(|_| verify_pgon_identities(p, top * rng.gen_range(1e-3..1.0 - 1e-3)))
        .collect()
}
