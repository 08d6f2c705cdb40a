//! Sparse multivariate Laurent polynomials over a cyclotomic field.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::ring::{CyclotomicField, FieldElem, RingError};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum LaurentError {
    #[error("polynomials belong to different rings")]
    RingMismatch,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("inexact division: remainder has leading term {leading} ({dividend_terms} / {divisor_terms} terms)")]
    InexactDivision {
        leading: String,
        dividend_terms: usize,
        divisor_terms: usize,
    },
    #[error("substitution would invert the non-unit image of {variable}")]
    NonInvertibleSubstitution { variable: String },
    #[error("negative power of a non-monomial")]
    NegativePower,
    #[error("expected {expected} substitution values, got {got}")]
    AssignmentLength { expected: usize, got: usize },
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<i32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    fn add(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn sub(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    fn divisible_by(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Names that denote field elements in the text format.
pub fn is_reserved_name(name: &str) -> bool {
    name == "z" || name == "w" || name.strip_prefix('w').is_some_and(|r| r.parse::<u32>().is_ok())
}

/// Coefficient field plus variable names.
#[derive(Debug, PartialEq, Eq)]
pub struct PolyRing {
    field: CyclotomicField,
    names: Vec<String>,
}

impl PolyRing {
    /// Panics when a name is reserved for field elements (`z`, `w`, `w<p>`).
    pub fn new<S: Into<String>>(field: CyclotomicField, names: impl IntoIterator<Item = S>) -> Arc<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for n in &names {
            assert!(!is_reserved_name(n), "variable name {n:?} is reserved for field elements");
        }
        Arc::new(PolyRing { field, names })
    }

    pub fn field(&self) -> &CyclotomicField {
        &self.field
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn same(a: &Arc<PolyRing>, b: &Arc<PolyRing>) -> bool {
        Arc::ptr_eq(a, b) || (a.field == b.field && a.names == b.names)
    }
}

#[derive(Clone)]
pub struct LaurentPoly {
    ring: Arc<PolyRing>,
    terms: BTreeMap<Monomial, FieldElem>,
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        PolyRing::same(&self.ring, &other.ring) && self.terms == other.terms
    }
}
impl Eq for LaurentPoly {}

impl LaurentPoly {
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        LaurentPoly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Arc<PolyRing>, c: FieldElem) -> Self {
        Self::monomial(ring, c, Monomial::one(ring.nvars()))
    }

    pub fn one(ring: &Arc<PolyRing>) -> Self {
        Self::constant(ring, ring.field.one())
    }

    pub fn int(ring: &Arc<PolyRing>, n: i64) -> Self {
        Self::constant(ring, ring.field.int(n))
    }

    pub fn var(ring: &Arc<PolyRing>, i: usize) -> Self {
        let mut e = vec![0; ring.nvars()];
        e[i] = 1;
        Self::monomial(ring, ring.field.one(), Monomial(e))
    }

    pub fn monomial(ring: &Arc<PolyRing>, c: FieldElem, m: Monomial) -> Self {
        assert_eq!(m.0.len(), ring.nvars());
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn from_terms(ring: &Arc<PolyRing>, terms: impl IntoIterator<Item = (Monomial, FieldElem)>) -> Self {
        let mut p = Self::zero(ring);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn field(&self) -> &CyclotomicField {
        &self.ring.field
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElem)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&FieldElem> {
        self.terms.get(m)
    }

    /// The single term, when the polynomial is a nonzero monomial.
    pub fn as_monomial(&self) -> Option<(&Monomial, &FieldElem)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<FieldElem> {
        if self.is_zero() {
            return Some(self.field().zero());
        }
        match self.as_monomial() {
            Some((m, c)) if m.0.iter().all(|&e| e == 0) => Some(c.clone()),
            _ => None,
        }
    }

    fn add_term(&mut self, m: Monomial, c: &FieldElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = &*v + c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    fn check_ring(&self, other: &Self) -> Result<(), LaurentError> {
        if PolyRing::same(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(LaurentError::RingMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &-c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_ring(other)?;
        let mut acc: HashMap<Monomial, FieldElem> = HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.add(mb);
                let prod = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v = &*v + &prod,
                    None => {
                        acc.insert(m, prod);
                    }
                }
            }
        }
        Ok(LaurentPoly {
            ring: self.ring.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ring);
        }
        LaurentPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Multiplies by `x^m`.
    pub fn shift(&self, m: &Monomial) -> Self {
        LaurentPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(k, c)| (k.add(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(&self.ring);
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

    /// Integer power; negative exponents are allowed for monomials only.
    pub fn powi(&self, e: i64) -> Result<Self, LaurentError> {
        if e >= 0 {
            return Ok(self.pow(e as u32));
        }
        let (m, c) = self.as_monomial().ok_or(LaurentError::NegativePower)?;
        let inv = c.inverse()?.pow((-e) as u32);
        let exps = Monomial(m.0.iter().map(|&x| x * e as i32).collect());
        Ok(Self::monomial(&self.ring, inv, exps))
    }

    /// Componentwise minimum exponent over all terms.
    pub fn min_exponents(&self) -> Monomial {
        let n = self.ring.nvars();
        let mut out = vec![i32::MAX; n];
        for m in self.terms.keys() {
            for (o, &e) in out.iter_mut().zip(&m.0) {
                *o = (*o).min(e);
            }
        }
        if self.terms.is_empty() {
            out = vec![0; n];
        }
        Monomial(out)
    }

    /// Componentwise maximum exponent over all terms.
    pub fn max_exponents(&self) -> Monomial {
        let n = self.ring.nvars();
        let mut out = vec![i32::MIN; n];
        for m in self.terms.keys() {
            for (o, &e) in out.iter_mut().zip(&m.0) {
                *o = (*o).max(e);
            }
        }
        if self.terms.is_empty() {
            out = vec![0; n];
        }
        Monomial(out)
    }

    /// Splits `self = x^m * rest` with `rest` having all minimum exponents zero.
    pub fn split_monomial_content(&self) -> (Monomial, LaurentPoly) {
        let m = self.min_exponents();
        let neg = Monomial(m.0.iter().map(|e| -e).collect());
        (m, self.shift(&neg))
    }

    /// Exact quotient `self / g`: strips monomial content from both sides and
    /// runs grlex division of the polynomial parts, failing on any remainder.
    pub fn exact_divide(&self, g: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check_ring(g)?;
        if g.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        if let Some((gm, gc)) = g.as_monomial() {
            let inv = gc.inverse()?;
            let neg = Monomial(gm.0.iter().map(|e| -e).collect());
            return Ok(self.shift(&neg).scale(&inv));
        }
        let (mg, g1) = g.split_monomial_content();
        let (mf, f1) = self.split_monomial_content();
        let (lm, lc) = g1.terms.iter().next_back().expect("nonzero divisor");
        let lc_inv = lc.inverse()?;
        let mut rem = f1.terms;
        let mut quotient = BTreeMap::new();
        while let Some((m, c)) = rem.iter().next_back() {
            if !m.divisible_by(lm) {
                let lead = LaurentPoly::monomial(&self.ring, c.clone(), m.clone());
                return Err(LaurentError::InexactDivision {
                    leading: lead.to_string(),
                    dividend_terms: self.nterms(),
                    divisor_terms: g.nterms(),
                });
            }
            let qm = m.sub(lm);
            let qc = c * &lc_inv;
            for (gm, gc) in &g1.terms {
                let key = qm.add(gm);
                let delta = &qc * gc;
                let remove = match rem.get_mut(&key) {
                    Some(v) => {
                        *v = &*v - &delta;
                        v.is_zero()
                    }
                    None => {
                        rem.insert(key.clone(), -&delta);
                        false
                    }
                };
                if remove {
                    rem.remove(&key);
                }
            }
            quotient.insert(qm, qc);
        }
        let q = LaurentPoly {
            ring: self.ring.clone(),
            terms: quotient,
        };
        Ok(q.shift(&mf.sub(&mg)))
    }

    /// Substitutes `values[i]` (in `target`) for variable `i`. Negative
    /// powers of non-unit images are handled by clearing them with a monomial
    /// and dividing out its image afterwards.
    pub fn substitute(&self, target: &Arc<PolyRing>, values: &[LaurentPoly]) -> Result<LaurentPoly, LaurentError> {
        let n = self.ring.nvars();
        if values.len() != n {
            return Err(LaurentError::AssignmentLength {
                expected: n,
                got: values.len(),
            });
        }
        if self.field() != target.field() {
            return Err(LaurentError::RingMismatch);
        }
        for v in values {
            if !PolyRing::same(v.ring(), target) {
                return Err(LaurentError::RingMismatch);
            }
        }
        let mins = self.min_exponents();
        let mut clear = vec![0i32; n];
        for i in 0..n {
            if mins.0[i] < 0 && values[i].as_monomial().is_none() {
                clear[i] = -mins.0[i];
            }
        }
        let clear = Monomial(clear);
        let cleared = self.shift(&clear);
        let mut cache: HashMap<(usize, i32), LaurentPoly> = HashMap::new();
        let mut power = |i: usize, e: i32| -> Result<LaurentPoly, LaurentError> {
            if let Some(p) = cache.get(&(i, e)) {
                return Ok(p.clone());
            }
            let p = values[i].powi(e as i64)?;
            cache.insert((i, e), p.clone());
            Ok(p)
        };
        let mut acc = LaurentPoly::zero(target);
        for (m, c) in &cleared.terms {
            let mut t = LaurentPoly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e != 0 {
                    t = &t * &power(i, e)?;
                }
            }
            acc = &acc + &t;
        }
        if clear.0.iter().all(|&e| e == 0) {
            return Ok(acc);
        }
        let mut image = LaurentPoly::one(target);
        for (i, &e) in clear.0.iter().enumerate() {
            if e != 0 {
                image = &image * &power(i, e)?;
            }
        }
        acc.exact_divide(&image).map_err(|err| match err {
            LaurentError::InexactDivision { .. } => {
                let i = clear.0.iter().position(|&e| e != 0).unwrap_or(0);
                LaurentError::NonInvertibleSubstitution {
                    variable: self.ring.names[i].clone(),
                }
            }
            other => other,
        })
    }

    /// Substitutes the listed variables, keeping the others.
    pub fn substitute_partial(&self, assignment: &[(usize, LaurentPoly)]) -> Result<LaurentPoly, LaurentError> {
        let mut values: Vec<LaurentPoly> = (0..self.ring.nvars())
            .map(|i| LaurentPoly::var(&self.ring, i))
            .collect();
        for (i, v) in assignment {
            values[*i] = v.clone();
        }
        self.substitute(&self.ring.clone(), &values)
    }

    /// Re-expresses the polynomial in a ring with the same field whose
    /// variable list contains every variable used here.
    pub fn rename_into(&self, target: &Arc<PolyRing>) -> Option<LaurentPoly> {
        let map: Vec<Option<usize>> = self.ring.names.iter().map(|n| target.index_of(n)).collect();
        let mut out = LaurentPoly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.nvars()];
            for (i, &x) in m.0.iter().enumerate() {
                if x != 0 {
                    e[map[i]?] = x;
                }
            }
            out.terms.insert(Monomial(e), c.clone());
        }
        Some(out)
    }

    /// Real value with coefficients embedded via `zeta -> exp(2 pi i/N)`.
    pub fn eval_real(&self, xs: &[f64]) -> Result<f64, LaurentError> {
        let mut s = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.embed_real()?;
            for (x, &e) in xs.iter().zip(&m.0) {
                if e != 0 {
                    t *= x.powi(e);
                }
            }
            s += t;
        }
        Ok(s)
    }

    /// Largest coefficient height (see [`FieldElem::height`]).
    pub fn height(&self) -> BigInt {
        self.terms.values().map(FieldElem::height).max().unwrap_or_else(BigInt::zero)
    }

    pub fn positivity_report(&self) -> PositivityReport {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let value = c.embed_real().unwrap_or(f64::NAN);
            terms.push(TermPositivity {
                monomial: fmt_monomial(&self.ring, m),
                coefficient: c.to_string(),
                value,
                embed_positive: value > 0.0,
                integer_cone: c.in_nonnegative_integer_cone(),
            });
        }
        PositivityReport {
            all_embed_positive: terms.iter().all(|t| t.embed_positive),
            all_integer_cone: terms.iter().all(|t| t.integer_cone == Some(true)),
            terms,
        }
    }

    pub fn parse(ring: &Arc<PolyRing>, text: &str) -> Result<LaurentPoly, ParseError> {
        Parser::new(ring, text)?.parse_all()
    }
}

/// Positivity of one coefficient, in both senses.
#[derive(Debug, Clone, Serialize)]
pub struct TermPositivity {
    pub monomial: String,
    pub coefficient: String,
    pub value: f64,
    pub embed_positive: bool,
    /// `None` when the coefficient is outside the span of the `w` monomials.
    pub integer_cone: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityReport {
    pub terms: Vec<TermPositivity>,
    pub all_embed_positive: bool,
    pub all_integer_cone: bool,
}

fn fmt_monomial(ring: &PolyRing, m: &Monomial) -> String {
    let parts: Vec<String> = m
        .0
        .iter()
        .enumerate()
        .filter(|(_, &e)| e != 0)
        .map(|(i, &e)| {
            if e == 1 {
                ring.names[i].clone()
            } else {
                format!("{}^{}", ring.names[i], e)
            }
        })
        .collect();
    parts.join(" ")
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let mono = fmt_monomial(&self.ring, m);
            let single = c.printed_terms() == 1;
            let text = c.to_string();
            let (neg, body) = match text.strip_prefix('-') {
                Some(rest) if single => (true, rest.to_string()),
                _ => (false, text),
            };
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let coef = if single { body } else { format!("({body})") };
            if mono.is_empty() {
                f.write_str(&coef)?;
            } else if coef == "1" {
                f.write_str(&mono)?;
            } else {
                write!(f, "{coef} * {mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr for &LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &LaurentPoly) -> LaurentPoly {
                self.$f(rhs).expect("ring mismatch")
            }
        }
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$f(&rhs).expect("ring mismatch")
            }
        }
    };
}
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

struct Parser<'a> {
    ring: &'a Arc<PolyRing>,
    toks: Vec<(usize, Tok)>,
    i: usize,
    len: usize,
}

impl<'a> Parser<'a> {
    fn new(ring: &'a Arc<PolyRing>, text: &str) -> Result<Self, ParseError> {
        let mut toks = Vec::new();
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut k = 0;
        while k < chars.len() {
            let (pos, ch) = chars[k];
            if ch.is_whitespace() {
                k += 1;
            } else if ch.is_ascii_digit() {
                let start = k;
                while k < chars.len() && chars[k].1.is_ascii_digit() {
                    k += 1;
                }
                let s: String = chars[start..k].iter().map(|c| c.1).collect();
                toks.push((pos, Tok::Num(s.parse().expect("digits"))));
            } else if ch.is_alphabetic() || ch == '_' {
                let start = k;
                while k < chars.len() && (chars[k].1.is_alphanumeric() || chars[k].1 == '_') {
                    k += 1;
                }
                toks.push((pos, Tok::Ident(chars[start..k].iter().map(|c| c.1).collect())));
            } else if "+-*/^()".contains(ch) {
                toks.push((pos, Tok::Sym(ch)));
                k += 1;
            } else {
                return Err(ParseError {
                    pos,
                    msg: format!("unexpected character {ch:?}"),
                });
            }
        }
        Ok(Parser {
            ring,
            toks,
            i: 0,
            len: text.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.len, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn parse_all(mut self) -> Result<LaurentPoly, ParseError> {
        let p = self.expr()?;
        if self.i != self.toks.len() {
            return self.err("trailing input");
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<LaurentPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Sym('+')) => {
                    self.i += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Sym('-')) => {
                    self.i += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LaurentPoly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Sym('*')) => {
                    self.i += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Sym('/')) => {
                    self.i += 1;
                    let pos = self.pos();
                    let d = self.unary()?;
                    acc = acc.exact_divide(&d).map_err(|e| ParseError {
                        pos,
                        msg: e.to_string(),
                    })?;
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Sym('(')) => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<LaurentPoly, ParseError> {
        if self.peek() == Some(&Tok::Sym('-')) {
            self.i += 1;
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<LaurentPoly, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Sym('^')) {
            return Ok(base);
        }
        self.i += 1;
        let neg = if self.peek() == Some(&Tok::Sym('-')) {
            self.i += 1;
            true
        } else {
            false
        };
        let Some(Tok::Num(n)) = self.peek().cloned() else {
            return self.err("expected integer exponent");
        };
        let pos = self.pos();
        self.i += 1;
        let e: i64 = i64::try_from(&n).map_err(|_| ParseError {
            pos,
            msg: "exponent too large".into(),
        })?;
        let e = if neg { -e } else { e };
        if e < 0 && base.as_monomial().is_none() {
            let inv = LaurentPoly::one(self.ring).exact_divide(&base).map_err(|err| ParseError {
                pos,
                msg: err.to_string(),
            })?;
            return Ok(inv.pow((-e) as u32));
        }
        base.powi(e).map_err(|err| ParseError {
            pos,
            msg: err.to_string(),
        })
    }

    fn atom(&mut self) -> Result<LaurentPoly, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.i += 1;
                Ok(LaurentPoly::constant(
                    self.ring,
                    self.ring.field.rational(BigRational::from_integer(n)),
                ))
            }
            Some(Tok::Sym('(')) => {
                self.i += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::Sym(')')) {
                    return self.err("expected ')'");
                }
                self.i += 1;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if let Some(i) = self.ring.index_of(&name) {
                    self.i += 1;
                    return Ok(LaurentPoly::var(self.ring, i));
                }
                let field = &self.ring.field;
                let value = if name == "z" {
                    Some(field.zeta_pow(1))
                } else if name == "w" && field.orders().len() == 1 {
                    field.omega(field.orders()[0]).ok()
                } else if let Some(p) = name.strip_prefix('w').and_then(|s| s.parse::<u32>().ok()) {
                    field.omega(p).ok()
                } else {
                    None
                };
                match value {
                    Some(v) => {
                        self.i += 1;
                        Ok(LaurentPoly::constant(self.ring, v))
                    }
                    None => self.err(format!("unknown symbol {name:?}")),
                }
            }
            _ => self.err("expected a number, symbol or '('"),
        }
    }
}

/// Parses a single field element such as `1 + 2*w`.
pub fn parse_field_elem(field: &CyclotomicField, text: &str) -> Result<FieldElem, ParseError> {
    let ring = PolyRing::new(field.clone(), Vec::<String>::new());
    let p = LaurentPoly::parse(&ring, text)?;
    Ok(p.as_constant().expect("no variables"))
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn check<T: Send + Sync>() {}
    check::<LaurentPoly>();
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(orders: &[u32], names: &[&str]) -> Arc<PolyRing> {
        PolyRing::new(CyclotomicField::for_orders(orders).unwrap(), names.iter().copied())
    }

    fn p(r: &Arc<PolyRing>, s: &str) -> LaurentPoly {
        LaurentPoly::parse(r, s).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let r = ring(&[5], &["x", "y"]);
        assert_eq!(p(&r, "(x + y)*(x - y)"), p(&r, "x^2 - y^2"));
        assert_eq!(p(&r, "x^-1 * x"), LaurentPoly::one(&r));
        assert_eq!(p(&r, "(1 + w*y + y^2) + (-w*y)"), p(&r, "1 + y^2"));
    }

    #[test]
    fn division_examples() {
        let r = ring(&[5], &["x", "y", "a", "b", "c"]);
        assert_eq!(p(&r, "x^2 - y^2").exact_divide(&p(&r, "x - y")).unwrap(), p(&r, "x + y"));
        assert_eq!(
            p(&r, "1 + w*y + y^2").exact_divide(&p(&r, "y")).unwrap(),
            p(&r, "y^-1 + w + y")
        );
        let q = p(&r, "a + b*y + c*y^2");
        assert_eq!((&q * &p(&r, "x")).exact_divide(&p(&r, "x")).unwrap(), q);
        assert!(matches!(
            p(&r, "x^2 + 1").exact_divide(&p(&r, "x + 1")),
            Err(LaurentError::InexactDivision { .. })
        ));
    }

    #[test]
    fn substitution_examples() {
        let r = ring(&[], &["x", "y"]);
        let y = p(&r, "y");
        assert_eq!(p(&r, "x^-1").substitute_partial(&[(0, y.pow(2))]).unwrap(), p(&r, "y^-2"));
        assert_eq!(p(&r, "x + y").substitute_partial(&[(0, p(&r, "1 + y"))]).unwrap(), p(&r, "1 + 2*y"));
        let err = p(&r, "x^-1").substitute_partial(&[(0, p(&r, "1 + y"))]);
        assert!(matches!(err, Err(LaurentError::NonInvertibleSubstitution { .. })));
        // clearing works when the negative power cancels
        let f = p(&r, "(x^2 + x*y)/x");
        assert_eq!(f.substitute_partial(&[(0, p(&r, "1 + y"))]).unwrap(), p(&r, "1 + 2*y"));
    }

    #[test]
    fn text_format() {
        let r = ring(&[5], &["x", "y"]);
        let f = p(&r, "(1 + 2*w) * x^-1 y^2");
        assert_eq!(f.to_string(), "(1 + 2*w) * x^-1 y^2");
        let g = p(&r, "3 - w*y + 1/2*x - x*y");
        let s = g.to_string();
        assert_eq!(s, "3 - w * y + 1/2 * x - x y");
        assert_eq!(p(&r, &s), g);
        assert_eq!(p(&r, "0").to_string(), "0");
    }

    #[test]
    fn positivity() {
        let r = ring(&[5], &["y"]);
        assert!(p(&r, "1 + w*y + y^2").positivity_report().all_embed_positive);
        assert!(p(&r, "1 + w*y + y^2").positivity_report().all_integer_cone);
        assert!(!p(&r, "1 - y").positivity_report().all_embed_positive);
        let rep = p(&r, "(w - 1)*y").positivity_report();
        assert!(rep.all_embed_positive);
        assert!(!rep.all_integer_cone);
    }

    #[test]
    fn parse_errors() {
        let r = ring(&[], &["x"]);
        assert!(LaurentPoly::parse(&r, "x +").is_err());
        assert!(LaurentPoly::parse(&r, "q").is_err());
        assert!(LaurentPoly::parse(&r, "x $ 2").is_err());
    }
}
