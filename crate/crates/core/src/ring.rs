//! Exact arithmetic in cyclotomic fields `Q[x]/Phi_N`.
//!
//! A single field of conductor `N = lcm(2p_i)` houses every `w_p = 2cos(pi/p)`
//! needed by a computation. Elements are residues modulo `Phi_N`, stored as
//! integer coordinates in the power basis of `zeta_N` over one common
//! denominator.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum RingError {
    #[error("2*{p} does not divide the field conductor {conductor}")]
    ConductorMismatch { p: u32, conductor: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not real: imaginary part {imag:e}")]
    NonReal { imag: f64 },
    #[error("elements live in different fields (conductors {0} and {1})")]
    FieldMismatch(u32, u32),
    #[error("orbifold order must be at least 2, got {0}")]
    BadOrder(u32),
}

/// Integer polynomial coefficients, lowest degree first.
pub type IntPoly = Vec<BigInt>;

/// Returns `Phi_n` (lowest degree first), obtained by dividing `x^n - 1`
/// by `Phi_d` for every proper divisor `d` of `n`.
pub fn cyclotomic_polynomial(n: u32) -> IntPoly {
    assert!(n >= 1, "cyclotomic_polynomial needs n >= 1");
    let mut cache: Vec<Option<IntPoly>> = vec![None; n as usize + 1];
    cyclotomic_cached(n, &mut cache)
}

fn cyclotomic_cached(n: u32, cache: &mut Vec<Option<IntPoly>>) -> IntPoly {
    if let Some(p) = &cache[n as usize] {
        return p.clone();
    }
    let mut num: IntPoly = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_cached(d, cache);
            num = div_monic_exact(&num, &phi_d);
        }
    }
    cache[n as usize] = Some(num.clone());
    num
}

fn div_monic_exact(num: &IntPoly, den: &IntPoly) -> IntPoly {
    let mut rem = num.clone();
    let dd = den.len() - 1;
    let nd = num.len() - 1;
    let mut q = vec![BigInt::zero(); nd - dd + 1];
    for i in (0..=nd - dd).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    q
}

pub fn euler_phi(n: u32) -> u32 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u32
}

pub(crate) fn lcm_u32(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

#[derive(Debug)]
struct FieldData {
    conductor: u32,
    modulus: IntPoly,
    degree: usize,
    /// Orbifold orders whose `w_p` name the printing basis.
    orders: Vec<u32>,
    omega_basis: OnceLock<OmegaBasis>,
}

#[derive(Debug)]
struct OmegaBasis {
    /// Exponent tuples over `orders`, one per basis element.
    monomials: Vec<Vec<u32>>,
    /// Basis elements in zeta coordinates.
    vectors: Vec<Vec<BigRational>>,
}

/// The field `Q(zeta_N)`; cheap to clone, compared by conductor.
#[derive(Clone)]
pub struct CyclotomicField(Arc<FieldData>);

impl fmt::Debug for CyclotomicField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(zeta_{})", self.0.conductor)
    }
}

impl PartialEq for CyclotomicField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.conductor == other.0.conductor
    }
}
impl Eq for CyclotomicField {}

impl CyclotomicField {
    pub fn new(conductor: u32) -> Self {
        Self::with_orders(conductor, Vec::new())
    }

    /// The smallest field containing `w_p` for every listed order.
    pub fn for_orders(orders: &[u32]) -> Result<Self, RingError> {
        let mut n = 1;
        let mut kept = Vec::new();
        for &p in orders {
            if p < 2 {
                return Err(RingError::BadOrder(p));
            }
            n = lcm_u32(n, 2 * p);
            if !kept.contains(&p) {
                kept.push(p);
            }
        }
        kept.sort_unstable();
        Ok(Self::with_orders(n, kept))
    }

    fn with_orders(conductor: u32, orders: Vec<u32>) -> Self {
        assert!(conductor >= 1);
        let modulus = cyclotomic_polynomial(conductor);
        let degree = modulus.len() - 1;
        CyclotomicField(Arc::new(FieldData {
            conductor,
            modulus,
            degree,
            orders,
            omega_basis: OnceLock::new(),
        }))
    }

    pub fn conductor(&self) -> u32 {
        self.0.conductor
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.0.modulus
    }

    pub fn orders(&self) -> &[u32] {
        &self.0.orders
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem {
            field: self.clone(),
            num: vec![BigInt::zero(); self.degree()],
            den: BigInt::one(),
        }
    }

    pub fn one(&self) -> FieldElem {
        self.rational(BigRational::one())
    }

    pub fn int(&self, n: i64) -> FieldElem {
        self.rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(&self, r: BigRational) -> FieldElem {
        let mut e = self.zero();
        let (n, d) = r.into();
        e.num[0] = n;
        e.den = d;
        e
    }

    /// `zeta^j` for any integer `j`.
    pub fn zeta_pow(&self, j: i64) -> FieldElem {
        let n = self.conductor() as i64;
        let j = j.rem_euclid(n) as usize;
        let mut raw = vec![BigInt::zero(); j.max(self.degree()) + 1];
        raw[j] = BigInt::one();
        self.reduce(raw, BigInt::one())
    }

    /// `w_p = zeta^{N/2p} + zeta^{-N/2p}`.
    pub fn omega(&self, p: u32) -> Result<FieldElem, RingError> {
        if p < 2 {
            return Err(RingError::BadOrder(p));
        }
        let n = self.conductor();
        if n % (2 * p) != 0 {
            return Err(RingError::ConductorMismatch { p, conductor: n });
        }
        let m = (n / (2 * p)) as i64;
        Ok(&self.zeta_pow(m) + &self.zeta_pow(-m))
    }

    /// Reduces `raw / den` modulo the (monic) `Phi_N`.
    fn reduce(&self, mut raw: Vec<BigInt>, den: BigInt) -> FieldElem {
        let d = self.degree();
        let modulus = &self.0.modulus;
        if raw.len() > d {
            for i in (d..raw.len()).rev() {
                let t = std::mem::take(&mut raw[i]);
                if t.is_zero() {
                    continue;
                }
                for (j, mj) in modulus.iter().enumerate().take(d) {
                    if !mj.is_zero() {
                        raw[i - d + j] -= &t * mj;
                    }
                }
            }
            raw.truncate(d);
        }
        raw.resize(d, BigInt::zero());
        FieldElem::normalized(self, raw, den)
    }

    fn omega_basis(&self) -> &OmegaBasis {
        self.0.omega_basis.get_or_init(|| {
            let omegas: Vec<FieldElem> = self
                .orders()
                .iter()
                .map(|&p| self.omega(p).expect("orders divide the conductor"))
                .collect();
            let degrees: Vec<u32> = omegas.iter().map(|w| power_rank(self, w)).collect();
            let mut tuples: Vec<Vec<u32>> = vec![Vec::new()];
            for &m in &degrees {
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        (0..m).map(move |e| {
                            let mut t = t.clone();
                            t.push(e);
                            t
                        })
                    })
                    .collect();
            }
            tuples.sort_by_key(|t| (t.iter().sum::<u32>(), t.clone()));
            let mut monomials = Vec::new();
            let mut vectors: Vec<Vec<BigRational>> = Vec::new();
            for t in tuples {
                let mut v = self.one();
                for (w, &e) in omegas.iter().zip(&t) {
                    v = &v * &w.pow(e);
                }
                let mut trial = vectors.clone();
                trial.push(v.coefficients());
                if rank(&trial) == trial.len() {
                    vectors = trial;
                    monomials.push(t);
                }
            }
            OmegaBasis { monomials, vectors }
        })
    }
}

/// Degree of the minimal polynomial of `w` over `Q`.
fn power_rank(field: &CyclotomicField, w: &FieldElem) -> u32 {
    let mut rows = Vec::new();
    let mut pw = field.one();
    loop {
        rows.push(pw.coefficients());
        if rank(&rows) < rows.len() {
            return rows.len() as u32 - 1;
        }
        pw = &pw * w;
    }
}

/// Rank of a list of rational row vectors.
pub(crate) fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = m[r][col].recip();
        let pivot_row: Vec<BigRational> = m[r].iter().map(|x| x * &inv).collect();
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for (x, p) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        m[r] = pivot_row;
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Solves `sum_j coef_j * columns[j] = target`; `None` if inconsistent.
/// The columns are assumed linearly independent.
pub(crate) fn solve_columns(
    columns: &[Vec<BigRational>],
    target: &[BigRational],
) -> Option<Vec<BigRational>> {
    let nrows = target.len();
    let ncols = columns.len();
    let mut m: Vec<Vec<BigRational>> = (0..nrows)
        .map(|i| {
            let mut row: Vec<BigRational> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..nrows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = m[r][col].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); ncols];
    for (i, &col) in pivots.iter().enumerate() {
        sol[col] = m[i][ncols].clone();
    }
    Some(sol)
}

/// An element of a cyclotomic field: `num / den` in the `zeta` power basis,
/// with `den > 0` coprime to the content of `num`.
#[derive(Clone)]
pub struct FieldElem {
    field: CyclotomicField,
    num: Vec<BigInt>,
    den: BigInt,
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.den == other.den && self.num == other.num
    }
}
impl Eq for FieldElem {}

impl std::hash::Hash for FieldElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.field.conductor().hash(state);
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FieldElem {
    fn normalized(field: &CyclotomicField, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        if num.iter().all(Zero::is_zero) {
            den = BigInt::one();
        } else if !den.is_one() {
            let mut g = den.clone();
            for a in &num {
                if g.is_one() {
                    break;
                }
                g = g.gcd(a);
            }
            if den.is_negative() {
                g = -g;
            }
            if !g.is_one() {
                for a in &mut num {
                    *a /= &g;
                }
                den /= &g;
            }
        }
        FieldElem {
            field: field.clone(),
            num,
            den,
        }
    }

    pub fn field(&self) -> &CyclotomicField {
        &self.field
    }

    /// Coordinates in the basis `1, zeta, ..., zeta^{phi(N)-1}`.
    pub fn coefficients(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|a| BigRational::new(a.clone(), self.den.clone()))
            .collect()
    }

    pub fn from_coefficients(field: &CyclotomicField, c: Vec<BigRational>) -> Self {
        assert_eq!(c.len(), field.degree());
        let den = c.iter().fold(BigInt::one(), |l, a| l.lcm(a.denom()));
        let num = c.iter().map(|a| a.numer() * (&den / a.denom())).collect();
        Self::normalized(field, num, den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn check_field(&self, other: &Self) -> Result<(), RingError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(RingError::FieldMismatch(
                self.field.conductor(),
                other.field.conductor(),
            ))
        }
    }

    fn combine(&self, other: &Self, sign: i32) -> Self {
        let add = |a: &BigInt, b: &BigInt| if sign > 0 { a + b } else { a - b };
        if self.den == other.den {
            let num = self.num.iter().zip(&other.num).map(|(a, b)| add(a, b)).collect();
            return Self::normalized(&self.field, num, self.den.clone());
        }
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| add(&(a * &other.den), &(b * &self.den)))
            .collect();
        Self::normalized(&self.field, num, &self.den * &other.den)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, RingError> {
        self.check_field(other)?;
        Ok(self.combine(other, 1))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, RingError> {
        self.check_field(other)?;
        Ok(self.combine(other, -1))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, RingError> {
        self.check_field(other)?;
        let d = self.field.degree();
        let mut raw = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    raw[i + j] += a * b;
                }
            }
        }
        Ok(self.field.reduce(raw, &self.den * &other.den))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, RingError> {
        self.check_field(other)?;
        self.try_mul(&other.inverse()?)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let num = self.num.iter().map(|a| a * r.numer()).collect();
        Self::normalized(&self.field, num, &self.den * r.denom())
    }

    /// Multiplicative inverse, by solving `a * v = 1` in the zeta basis.
    pub fn inverse(&self) -> Result<Self, RingError> {
        if self.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(self.field.rational(r.recip()));
        }
        let d = self.field.degree();
        let columns: Vec<Vec<BigRational>> = (0..d)
            .map(|j| {
                let basis = self.field.zeta_pow(j as i64);
                self.try_mul(&basis).expect("same field").coefficients()
            })
            .collect();
        let mut target = vec![BigRational::zero(); d];
        target[0] = BigRational::one();
        let sol = solve_columns(&columns, &target).expect("nonzero elements are invertible");
        Ok(FieldElem::from_coefficients(&self.field, sol))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = self.field.one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Integer power; negative exponents invert.
    pub fn powi(&self, e: i64) -> Result<Self, RingError> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.inverse()?.pow((-e) as u32))
        }
    }

    /// Complex value under `zeta -> exp(2 pi i / N)`.
    pub fn embed_complex(&self) -> (f64, f64) {
        let n = self.field.conductor() as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, a) in self.coefficients().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let v = a.to_f64().unwrap_or(f64::NAN);
            let t = 2.0 * std::f64::consts::PI * j as f64 / n;
            re += v * t.cos();
            im += v * t.sin();
        }
        (re, im)
    }

    /// Real value; errors when the imaginary part exceeds `1e-9` (scaled by
    /// the coefficient magnitude for large elements).
    pub fn embed_real(&self) -> Result<f64, RingError> {
        let (re, im) = self.embed_complex();
        let scale: f64 = self
            .coefficients()
            .iter()
            .map(|a| a.to_f64().unwrap_or(0.0).abs())
            .sum::<f64>()
            .max(1.0);
        if im.abs() > 1e-9 * scale {
            return Err(RingError::NonReal { imag: im });
        }
        Ok(re)
    }

    /// Coordinates in the monomial basis of the `w_p` of the field's orders,
    /// or `None` when the element is outside their span.
    pub fn omega_coordinates(&self) -> Option<Vec<(Vec<u32>, BigRational)>> {
        let basis = self.field.omega_basis();
        let sol = solve_columns(&basis.vectors, &self.coefficients())?;
        Some(basis.monomials.iter().cloned().zip(sol).collect())
    }

    /// True when every `w`-basis coordinate is a nonnegative integer.
    pub fn in_nonnegative_integer_cone(&self) -> Option<bool> {
        self.omega_coordinates().map(|coords| {
            coords
                .iter()
                .all(|(_, c)| c.is_integer() && !c.is_negative())
        })
    }

    /// Largest absolute integer coordinate or the common denominator.
    pub fn height(&self) -> BigInt {
        self.num
            .iter()
            .map(Signed::abs)
            .chain([self.den.clone()])
            .max()
            .expect("nonempty")
    }
}

pub(crate) fn omega_symbol(field: &CyclotomicField, index: usize) -> String {
    if field.orders().len() == 1 {
        "w".to_string()
    } else {
        format!("w{}", field.orders()[index])
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_terms(terms: Vec<(BigRational, String)>) -> String {
    let mut out = String::new();
    for (i, (c, mono)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mono.is_empty() {
            out.push_str(&fmt_rational(&a));
        } else if a.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&fmt_rational(&a));
            out.push('*');
            out.push_str(&mono);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl FieldElem {
    /// Number of nonzero terms in the printed form; 1 means no parentheses
    /// are needed when used as a factor.
    pub(crate) fn printed_terms(&self) -> usize {
        match self.omega_coordinates() {
            Some(coords) => coords.iter().filter(|(_, c)| !c.is_zero()).count(),
            None => self.num.iter().filter(|c| !c.is_zero()).count(),
        }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        if let Some(coords) = self.omega_coordinates() {
            for (mono, c) in coords {
                if c.is_zero() {
                    continue;
                }
                let name: Vec<String> = mono
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        let s = omega_symbol(&self.field, i);
                        if e == 1 {
                            s
                        } else {
                            format!("{s}^{e}")
                        }
                    })
                    .collect();
                terms.push((c, name.join("*")));
            }
        } else {
            for (j, c) in self.coefficients().into_iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let name = match j {
                    0 => String::new(),
                    1 => "z".to_string(),
                    _ => format!("z^{j}"),
                };
                terms.push((c, name));
            }
        }
        f.write_str(&fmt_terms(terms))
    }
}

impl Add for &FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        self.try_add(rhs).expect("field mismatch")
    }
}

impl Sub for &FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        self.try_sub(rhs).expect("field mismatch")
    }
}

impl Mul for &FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        self.try_mul(rhs).expect("field mismatch")
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem {
            field: self.field.clone(),
            num: self.num.iter().map(|a| -a).collect(),
            den: self.den.clone(),
        }
    }
}
