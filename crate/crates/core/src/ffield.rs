//! Arithmetic in prime fields `Z_p` and extension fields `F_{p^k}`.
//!
//! An element of `F_{p^k}` is a polynomial over `Z_p` of degree `< k`, reduced
//! modulo a monic irreducible modulus. Inside matrices and lookup tables an
//! element travels as its integer *code* `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`;
//! [`FieldElement`] is the checked coefficient-level view of the same value.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("NotPrime({0})")]
    NotPrime(u64),
    #[error("Reducible({0:?})")]
    Reducible(Vec<u64>),
    #[error("DegreeMismatch: expected degree {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("modulus is not monic")]
    NotMonic,
    #[error("field of order {p}^{k} does not fit in 64 bits")]
    TooLarge { p: u64, k: usize },
    #[error("SpecMismatch")]
    SpecMismatch,
    #[error("DivisionByZero")]
    DivisionByZero,
    #[error("NotASubfield")]
    NotASubfield,
    #[error("SingularBasis")]
    SingularBasis,
    #[error("coefficient {value} out of range for characteristic {p}")]
    BadCoefficient { value: u64, p: u64 },
}

pub type Result<T> = std::result::Result<T, FieldError>;

/// Polynomial and scalar helpers over `Z_p`. Polynomials are little-endian
/// coefficient vectors with no trailing zeros (the zero polynomial is empty).
pub(crate) mod poly {
    #[inline]
    pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
        ((a as u128 * b as u128) % p as u128) as u64
    }

    #[inline]
    pub fn addmod(a: u64, b: u64, p: u64) -> u64 {
        ((a as u128 + b as u128) % p as u128) as u64
    }

    #[inline]
    pub fn submod(a: u64, b: u64, p: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            p - (b - a)
        }
    }

    pub fn powmod(mut base: u64, mut exp: u64, p: u64) -> u64 {
        let mut acc = 1 % p;
        base %= p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mulmod(acc, base, p);
            }
            base = mulmod(base, base, p);
            exp >>= 1;
        }
        acc
    }

    pub fn invmod(a: u64, p: u64) -> Option<u64> {
        if a.is_multiple_of(p) {
            None
        } else {
            Some(powmod(a, p - 2, p))
        }
    }

    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn trimmed(v: &[u64]) -> Vec<u64> {
        let mut out = v.to_vec();
        trim(&mut out);
        out
    }

    pub fn add(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let len = a.len().max(b.len());
        let mut out: Vec<u64> = (0..len)
            .map(|i| {
                addmod(
                    a.get(i).copied().unwrap_or(0),
                    b.get(i).copied().unwrap_or(0),
                    p,
                )
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let len = a.len().max(b.len());
        let mut out: Vec<u64> = (0..len)
            .map(|i| {
                submod(
                    a.get(i).copied().unwrap_or(0),
                    b.get(i).copied().unwrap_or(0),
                    p,
                )
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = addmod(out[i + j], mulmod(x, y, p), p);
            }
        }
        trim(&mut out);
        out
    }

    pub fn scale(a: &[u64], c: u64, p: u64) -> Vec<u64> {
        let mut out: Vec<u64> = a.iter().map(|&x| mulmod(x, c, p)).collect();
        trim(&mut out);
        out
    }

    /// Quotient and remainder of `a` by a nonzero `b`.
    pub fn divmod(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let b = trimmed(b);
        assert!(!b.is_empty(), "polynomial division by zero");
        let mut r = trimmed(a);
        let db = b.len() - 1;
        let lead_inv = invmod(*b.last().unwrap(), p).expect("leading coefficient is a unit");
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![0u64; r.len() - db];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = mulmod(*r.last().unwrap(), lead_inv, p);
            q[shift] = c;
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = submod(r[shift + i], mulmod(c, bi, p), p);
            }
            trim(&mut r);
        }
        trim(&mut q);
        (q, r)
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        divmod(a, m, p).1
    }

    pub fn mulmod_poly(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn powmod_poly(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = rem(&[1], m, p);
        let mut b = rem(base, m, p);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mulmod_poly(&acc, &b, m, p);
            }
            b = mulmod_poly(&b, &b, m, p);
            exp >>= 1;
        }
        acc
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = trimmed(a);
        let mut y = trimmed(b);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        if let Some(&lead) = x.last() {
            let inv = invmod(lead, p).unwrap();
            x = scale(&x, inv, p);
        }
        x
    }

    /// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
    pub fn inverse_mod(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
        let mut r0 = trimmed(m);
        let mut r1 = rem(a, m, p);
        let mut s0: Vec<u64> = Vec::new();
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            let (q, r) = divmod(&r0, &r1, p);
            let s2 = sub(&s0, &mul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        if r0.len() != 1 {
            return None;
        }
        let c = invmod(r0[0], p)?;
        Some(rem(&scale(&s0, c, p), m, p))
    }

    /// Ben-Or test: `f` is irreducible iff `gcd(f, x^{p^i} - x) = 1` for
    /// every `1 <= i <= deg f / 2`. The `i = 1` step is the root test.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let f = trimmed(f);
        if f.len() < 2 {
            return false;
        }
        let deg = f.len() - 1;
        if deg == 1 {
            return true;
        }
        let x = vec![0, 1];
        let mut h = x.clone();
        for _ in 1..=deg / 2 {
            h = powmod_poly(&h, p, &f, p);
            let g = gcd(&f, &sub(&h, &x, p), p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }

    /// Inverse of a square matrix over `Z_p` by Gauss-Jordan elimination.
    pub fn invert_matrix(m: &[Vec<u64>], p: u64) -> Option<Vec<Vec<u64>>> {
        let n = m.len();
        let mut a: Vec<Vec<u64>> = m.to_vec();
        let mut inv: Vec<Vec<u64>> = (0..n)
            .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[r][col] != 0)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let c = invmod(a[col][col], p)?;
            for j in 0..n {
                a[col][j] = mulmod(a[col][j], c, p);
                inv[col][j] = mulmod(inv[col][j], c, p);
            }
            for r in 0..n {
                if r == col || a[r][col] == 0 {
                    continue;
                }
                let f = a[r][col];
                for j in 0..n {
                    a[r][j] = submod(a[r][j], mulmod(f, a[col][j], p), p);
                    inv[r][j] = submod(inv[r][j], mulmod(f, inv[col][j], p), p);
                }
            }
        }
        Some(inv)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while (d as u128) * (d as u128) <= n as u128 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn checked_order(p: u64, k: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

/// Monic irreducible polynomials of degree `k` over `Z_p` in lexicographic
/// order of their coefficient tuples `(c_0, c_1, ..., c_{k-1})`, constant term
/// most significant. Each item is the full monic coefficient vector.
pub fn irreducible_polys(p: u64, k: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = checked_order(p, k).unwrap_or(u64::MAX);
    (0..total).filter_map(move |idx| {
        // idx enumerates tuples with c_0 as the most significant digit
        let mut coeffs = vec![0u64; k + 1];
        let mut rest = idx;
        for i in (0..k).rev() {
            coeffs[i] = rest % p;
            rest /= p;
        }
        coeffs[k] = 1;
        poly::is_irreducible(&coeffs, p).then_some(coeffs)
    })
}

/// Description of `F_{p^k}`: characteristic, degree, and the monic modulus
/// (little-endian, leading 1 included; empty for prime fields).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFieldSpec")]
pub struct FieldSpec {
    p: u64,
    k: usize,
    modulus: Vec<u64>,
}

#[derive(Deserialize)]
struct RawFieldSpec {
    p: u64,
    k: usize,
    #[serde(default)]
    modulus: Vec<u64>,
}

impl TryFrom<RawFieldSpec> for FieldSpec {
    type Error = FieldError;

    fn try_from(raw: RawFieldSpec) -> Result<Self> {
        let modulus = if raw.modulus.is_empty() {
            None
        } else {
            Some(raw.modulus)
        };
        make_field(raw.p, raw.k, modulus)
    }
}

/// Builds a validated field description. Without an explicit modulus the
/// lexicographically smallest monic irreducible of degree `k` is used.
pub fn make_field(p: u64, k: usize, modulus: Option<Vec<u64>>) -> Result<FieldSpec> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if k == 0 {
        return Err(FieldError::DegreeMismatch {
            expected: 1,
            found: 0,
        });
    }
    if checked_order(p, k).is_none() {
        return Err(FieldError::TooLarge { p, k });
    }
    let modulus = match modulus {
        Some(m) => {
            if let Some(&bad) = m.iter().find(|&&c| c >= p) {
                return Err(FieldError::BadCoefficient { value: bad, p });
            }
            let m = poly::trimmed(&m);
            if m.len() != k + 1 {
                return Err(FieldError::DegreeMismatch {
                    expected: k,
                    found: m.len().saturating_sub(1),
                });
            }
            if m[k] != 1 {
                return Err(FieldError::NotMonic);
            }
            if !poly::is_irreducible(&m, p) {
                return Err(FieldError::Reducible(m));
            }
            m
        }
        None if k == 1 => Vec::new(),
        None => irreducible_polys(p, k)
            .next()
            .expect("irreducible polynomials exist in every degree"),
    };
    // a degree-one modulus still describes the prime field
    let modulus = if k == 1 { Vec::new() } else { modulus };
    Ok(FieldSpec { p, k, modulus })
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self> {
        make_field(p, 1, None)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn order(&self) -> u64 {
        checked_order(self.p, self.k).expect("validated at construction")
    }

    pub fn is_prime_field(&self) -> bool {
        self.k == 1
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{}", self.p, self.k)
        }
    }
}

const TABLE_LIMIT: u64 = 256;

struct Tables {
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

struct FieldInner {
    spec: FieldSpec,
    order: u64,
    tables: Option<Tables>,
}

/// Shared runtime handle for a field. Cheap to clone; element codes are
/// interpreted relative to it.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.0.spec)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Field {}

impl From<FieldSpec> for Field {
    fn from(spec: FieldSpec) -> Self {
        Field::new(spec)
    }
}

impl Field {
    pub fn new(spec: FieldSpec) -> Self {
        let order = spec.order();
        let mut field = Field(Arc::new(FieldInner {
            spec,
            order,
            tables: None,
        }));
        if order <= TABLE_LIMIT {
            let q = order as usize;
            let mut add = vec![0u8; q * q];
            let mut mul = vec![0u8; q * q];
            let mut neg = vec![0u8; q];
            let mut inv = vec![0u8; q];
            for a in 0..q {
                neg[a] = field.neg_slow(a as u64) as u8;
                if a > 0 {
                    inv[a] = field.inv_slow(a as u64).expect("nonzero") as u8;
                }
                for b in 0..q {
                    add[a * q + b] = field.add_slow(a as u64, b as u64) as u8;
                    mul[a * q + b] = field.mul_slow(a as u64, b as u64) as u8;
                }
            }
            let inner = Arc::get_mut(&mut field.0).expect("fresh Arc");
            inner.tables = Some(Tables { add, mul, neg, inv });
        }
        field
    }

    pub fn prime(p: u64) -> Result<Self> {
        Ok(Field::new(FieldSpec::prime(p)?))
    }

    pub fn with_degree(p: u64, k: usize) -> Result<Self> {
        Ok(Field::new(make_field(p, k, None)?))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    pub fn p(&self) -> u64 {
        self.0.spec.p
    }

    pub fn k(&self) -> usize {
        self.0.spec.k
    }

    pub fn order(&self) -> u64 {
        self.0.order
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.spec.k == 1
    }

    /// Code of the polynomial generator `t` (the residue of `x`).
    pub fn generator(&self) -> u64 {
        if self.k() == 1 {
            // prime fields are spanned by 1
            1
        } else {
            self.p()
        }
    }

    pub fn coeffs(&self, code: u64) -> Vec<u64> {
        let p = self.p();
        let mut rest = code;
        (0..self.k())
            .map(|_| {
                let c = rest % p;
                rest /= p;
                c
            })
            .collect()
    }

    pub fn code(&self, coeffs: &[u64]) -> u64 {
        let p = self.p();
        coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * p + (c % p))
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> u64 {
        let p = self.p() as i128;
        (((v as i128) % p + p) % p) as u64
    }

    pub fn element(&self, code: u64) -> FieldElement {
        FieldElement {
            field: self.clone(),
            coeffs: self.coeffs(code),
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        match &self.0.tables {
            Some(t) => t.add[a as usize * self.0.order as usize + b as usize] as u64,
            None => self.add_slow(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        match &self.0.tables {
            Some(t) => t.neg[a as usize] as u64,
            None => self.neg_slow(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        match &self.0.tables {
            Some(t) => t.mul[a as usize * self.0.order as usize + b as usize] as u64,
            None => self.mul_slow(a, b),
        }
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        match &self.0.tables {
            Some(t) => Some(t.inv[a as usize] as u64),
            None => self.inv_slow(a),
        }
    }

    pub fn div(&self, a: u64, b: u64) -> Option<u64> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        let mut base = a;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    fn add_slow(&self, a: u64, b: u64) -> u64 {
        let p = self.p();
        if self.k() == 1 {
            return poly::addmod(a, b, p);
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut place = 1u64;
        for i in 0..self.k() {
            out += poly::addmod(a % p, b % p, p) * place;
            a /= p;
            b /= p;
            if i + 1 < self.k() {
                place *= p;
            }
        }
        out
    }

    fn neg_slow(&self, a: u64) -> u64 {
        let p = self.p();
        if self.k() == 1 {
            return poly::submod(0, a, p);
        }
        let c: Vec<u64> = self
            .coeffs(a)
            .into_iter()
            .map(|x| poly::submod(0, x, p))
            .collect();
        self.code(&c)
    }

    fn mul_slow(&self, a: u64, b: u64) -> u64 {
        let p = self.p();
        if self.k() == 1 {
            return poly::mulmod(a, b, p);
        }
        let prod = poly::mulmod_poly(
            &poly::trimmed(&self.coeffs(a)),
            &poly::trimmed(&self.coeffs(b)),
            self.spec().modulus(),
            p,
        );
        self.code(&prod)
    }

    fn inv_slow(&self, a: u64) -> Option<u64> {
        let p = self.p();
        if self.k() == 1 {
            return poly::invmod(a, p);
        }
        let inv = poly::inverse_mod(
            &poly::trimmed(&self.coeffs(a)),
            self.spec().modulus(),
            p,
        )?;
        Some(self.code(&inv))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// An element of a field, carried as its coefficient vector together with
/// the field it belongs to. Arithmetic here runs on polynomials directly and
/// is independent of the lookup tables behind [`Field::mul`].
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    coeffs: Vec<u64>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".to_string(),
                (1, c) => format!("{c}t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}t^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

impl FieldElement {
    pub fn new(field: &Field, coeffs: &[u64]) -> Result<Self> {
        let p = field.p();
        if let Some(&bad) = coeffs.iter().find(|&&c| c >= p) {
            return Err(FieldError::BadCoefficient { value: bad, p });
        }
        if coeffs.len() > field.k() {
            return Err(FieldError::DegreeMismatch {
                expected: field.k(),
                found: coeffs.len(),
            });
        }
        let mut c = coeffs.to_vec();
        c.resize(field.k(), 0);
        Ok(FieldElement {
            field: field.clone(),
            coeffs: c,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn code(&self) -> u64 {
        self.field.code(&self.coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn from_poly(field: &Field, mut v: Vec<u64>) -> Self {
        v.resize(field.k(), 0);
        FieldElement {
            field: field.clone(),
            coeffs: v,
        }
    }

    fn poly(&self) -> Vec<u64> {
        poly::trimmed(&self.coeffs)
    }

    fn reduce(&self, v: &[u64]) -> Vec<u64> {
        if self.field.k() == 1 {
            poly::trimmed(&v.iter().map(|&c| c % self.field.p()).collect::<Vec<_>>())
        } else {
            poly::rem(v, self.field.spec().modulus(), self.field.p())
        }
    }

    pub fn arith(&self, other: &FieldElement, op: ArithOp) -> Result<FieldElement> {
        if self.field != other.field {
            return Err(FieldError::SpecMismatch);
        }
        let p = self.field.p();
        let out = match op {
            ArithOp::Add => poly::add(&self.poly(), &other.poly(), p),
            ArithOp::Sub => poly::sub(&self.poly(), &other.poly(), p),
            ArithOp::Mul => self.reduce(&poly::mul(&self.poly(), &other.poly(), p)),
            ArithOp::Div => {
                let inv = other.inverse()?;
                self.reduce(&poly::mul(&self.poly(), &inv.poly(), p))
            }
        };
        Ok(FieldElement::from_poly(&self.field, out))
    }

    pub fn inverse(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let p = self.field.p();
        let inv = if self.field.k() == 1 {
            vec![poly::invmod(self.coeffs[0], p).expect("nonzero")]
        } else {
            poly::inverse_mod(&self.poly(), self.field.spec().modulus(), p)
                .expect("modulus is irreducible")
        };
        Ok(FieldElement::from_poly(&self.field, poly::trimmed(&inv)))
    }

    pub fn pow(&self, mut exp: u64) -> FieldElement {
        let mut acc = FieldElement::from_poly(&self.field, vec![1]);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.arith(&base, ArithOp::Mul).expect("same field");
            }
            base = base.arith(&base, ArithOp::Mul).expect("same field");
            exp >>= 1;
        }
        acc
    }
}

/// The inclusion of `F_{p^j}` into `F_{p^k}` (`j | k`). For a prime base this
/// is the inclusion of constants; otherwise the base generator is sent to the
/// smallest-code root of the base modulus in the extension.
#[derive(Debug, Clone)]
pub struct SubfieldEmbedding {
    base: Field,
    ext: Field,
    /// Codes in `ext` of `theta^a` for `a < j`.
    theta_powers: Vec<u64>,
}

/// Exhaustive root search is only done in extensions up to this order.
const ROOT_SCAN_LIMIT: u64 = 1 << 24;

impl SubfieldEmbedding {
    pub fn new(base: &Field, ext: &Field) -> Result<Self> {
        if base.p() != ext.p() || !ext.k().is_multiple_of(base.k()) {
            return Err(FieldError::NotASubfield);
        }
        let theta = if base.k() == 1 {
            1
        } else {
            if ext.order() > ROOT_SCAN_LIMIT {
                return Err(FieldError::TooLarge {
                    p: ext.p(),
                    k: ext.k(),
                });
            }
            let m = base.spec().modulus();
            (0..ext.order())
                .find(|&x| {
                    let val = m
                        .iter()
                        .rev()
                        .fold(0u64, |acc, &c| ext.add(ext.mul(acc, x), ext.from_int(c as i64)));
                    val == 0
                })
                .ok_or(FieldError::NotASubfield)?
        };
        let mut theta_powers = Vec::with_capacity(base.k());
        let mut acc = 1u64;
        for _ in 0..base.k() {
            theta_powers.push(acc);
            acc = ext.mul(acc, theta);
        }
        Ok(SubfieldEmbedding {
            base: base.clone(),
            ext: ext.clone(),
            theta_powers,
        })
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn ext(&self) -> &Field {
        &self.ext
    }

    /// Degree of the extension over the base.
    pub fn degree(&self) -> usize {
        self.ext.k() / self.base.k()
    }

    pub fn embed(&self, code: u64) -> u64 {
        self.base
            .coeffs(code)
            .into_iter()
            .zip(&self.theta_powers)
            .fold(0u64, |acc, (c, &tp)| {
                self.ext.add(acc, self.ext.mul(self.ext.from_int(c as i64), tp))
            })
    }

    /// Inverse of [`embed`](Self::embed) on its image; `None` outside it.
    pub fn restrict(&self, code: u64) -> Option<u64> {
        if self.base.k() == 1 {
            return (code < self.ext.p()).then_some(code);
        }
        // solve sum_a y_a theta^a = code over Z_p
        let p = self.ext.p();
        let k = self.ext.k();
        let j = self.base.k();
        let cols: Vec<Vec<u64>> = self
            .theta_powers
            .iter()
            .map(|&c| self.ext.coeffs(c))
            .collect();
        let rhs = self.ext.coeffs(code);
        // augmented k x (j+1) system
        let mut rows: Vec<Vec<u64>> = (0..k)
            .map(|r| {
                let mut row: Vec<u64> = cols.iter().map(|c| c[r]).collect();
                row.push(rhs[r]);
                row
            })
            .collect();
        let mut pivot_row = 0;
        let mut pivots = Vec::with_capacity(j);
        for col in 0..j {
            let Some(pr) = (pivot_row..k).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(pivot_row, pr);
            let inv = poly::invmod(rows[pivot_row][col], p)?;
            for x in rows[pivot_row].iter_mut() {
                *x = poly::mulmod(*x, inv, p);
            }
            for r in 0..k {
                if r != pivot_row && rows[r][col] != 0 {
                    let f = rows[r][col];
                    for c in 0..=j {
                        let v = poly::mulmod(f, rows[pivot_row][c], p);
                        rows[r][c] = poly::submod(rows[r][c], v, p);
                    }
                }
            }
            pivots.push((pivot_row, col));
            pivot_row += 1;
        }
        if rows[pivot_row..].iter().any(|row| row[j] != 0) {
            return None;
        }
        let mut y = vec![0u64; j];
        for (r, c) in pivots {
            y[c] = rows[r][j];
        }
        Some(self.base.code(&y))
    }
}

/// `Norm_{E/F}(x) = x^{(q^d-1)/(q-1)}` for `E = F_{q^d}` over `F = F_q`,
/// returned as an element of `base`.
pub fn norm(x: &FieldElement, base: &Field) -> Result<FieldElement> {
    let emb = SubfieldEmbedding::new(base, x.field())?;
    let ext_order = x.field().order();
    let base_order = base.order();
    let exp = (ext_order - 1) / (base_order - 1);
    let y = x.pow(exp);
    let code = emb.restrict(y.code()).ok_or(FieldError::NotASubfield)?;
    Ok(base.element(code))
}

/// Power basis `1, t, ..., t^{d-1}` of the extension over `base`.
pub fn power_basis(ext: &Field, base: &Field) -> Result<Vec<FieldElement>> {
    if base.p() != ext.p() || !ext.k().is_multiple_of(base.k()) {
        return Err(FieldError::NotASubfield);
    }
    let d = ext.k() / base.k();
    let t = ext.generator();
    let mut out = Vec::with_capacity(d);
    let mut acc = 1u64;
    for _ in 0..d {
        out.push(ext.element(acc));
        acc = ext.mul(acc, t);
    }
    Ok(out)
}

/// Matrix over `base` of multiplication by `x` on the extension, in the
/// given basis (power basis by default). Column `c` holds the coordinates of
/// `x * basis[c]`, so products of elements map to products of matrices.
pub fn regular_matrix(
    x: &FieldElement,
    base: &Field,
    basis: Option<&[FieldElement]>,
) -> Result<Matrix> {
    let ext = x.field().clone();
    let emb = SubfieldEmbedding::new(base, &ext)?;
    regular_matrix_with(x, &emb, basis)
}

/// [`regular_matrix`] with a precomputed embedding.
pub fn regular_matrix_with(
    x: &FieldElement,
    emb: &SubfieldEmbedding,
    basis: Option<&[FieldElement]>,
) -> Result<Matrix> {
    let ext = emb.ext();
    let base = emb.base();
    if x.field() != ext {
        return Err(FieldError::SpecMismatch);
    }
    let d = emb.degree();
    let j = base.k();
    let k = ext.k();
    let p = ext.p();
    let default_basis;
    let basis = match basis {
        Some(b) => b,
        None => {
            default_basis = power_basis(ext, base)?;
            &default_basis
        }
    };
    if basis.len() != d || basis.iter().any(|b| b.field() != ext) {
        return Err(FieldError::SingularBasis);
    }
    // F_p-basis theta^a * b_i, column index i*j + a
    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(k);
    for b in basis {
        for a in 0..j {
            cols.push(ext.coeffs(ext.mul(emb.theta_powers[a], b.code())));
        }
    }
    let m: Vec<Vec<u64>> = (0..k).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    let inv = poly::invert_matrix(&m, p).ok_or(FieldError::SingularBasis)?;
    let xc = x.code();
    let mut entries = vec![0u64; d * d];
    for (c, b) in basis.iter().enumerate() {
        let v = ext.coeffs(ext.mul(xc, b.code()));
        let coords: Vec<u64> = inv
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&v)
                    .fold(0u64, |acc, (&r, &vv)| poly::addmod(acc, poly::mulmod(r, vv, p), p))
            })
            .collect();
        for i in 0..d {
            let digits: Vec<u64> = (0..j).map(|a| coords[i * j + a]).collect();
            entries[i * d + c] = base.code(&digits);
        }
    }
    Ok(Matrix::from_codes(base, d, entries).expect("codes are in range"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_elements(f: &Field) -> Vec<FieldElement> {
        (0..f.order()).map(|c| f.element(c)).collect()
    }

    #[test]
    fn prime_field_has_empty_modulus() {
        let f = make_field(2, 1, None).unwrap();
        assert!(f.modulus().is_empty());
        assert_eq!(f.order(), 2);
    }

    #[test]
    fn f4_modulus_is_x2_x_1() {
        assert_eq!(make_field(2, 2, None).unwrap().modulus(), &[1, 1, 1]);
    }

    #[test]
    fn f9_modulus_is_lex_smallest() {
        // oracle: scan all 9 monic quadratics over Z_3 for one without roots
        let mut first = None;
        'scan: for c0 in 0..3u64 {
            for c1 in 0..3u64 {
                let has_root = (0..3u64).any(|x| (x * x + c1 * x + c0) % 3 == 0);
                if !has_root {
                    first = Some(vec![c0, c1, 1]);
                    break 'scan;
                }
            }
        }
        assert_eq!(first.as_deref(), Some(&[1, 0, 1][..]));
        assert_eq!(make_field(3, 2, None).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(make_field(9, 1, None), Err(FieldError::NotPrime(9)));
        assert_eq!(make_field(1, 1, None), Err(FieldError::NotPrime(1)));
        assert_eq!(
            make_field(2, 2, Some(vec![1, 0, 1])),
            Err(FieldError::Reducible(vec![1, 0, 1]))
        );
        assert!(matches!(
            make_field(2, 3, Some(vec![1, 1, 1])),
            Err(FieldError::DegreeMismatch { expected: 3, found: 2 })
        ));
        assert_eq!(make_field(3, 2, Some(vec![1, 0, 2])), Err(FieldError::NotMonic));
    }

    #[test]
    fn explicit_modulus_accepted() {
        let f = make_field(2, 3, Some(vec![1, 1, 0, 1])).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = make_field(3, 2, None).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"p":3,"k":2,"modulus":[1,0,1]}"#);
        let back: FieldSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert!(serde_json::from_str::<FieldSpec>(r#"{"p":4,"k":1,"modulus":[]}"#).is_err());
    }

    #[test]
    fn small_examples() {
        let f4 = Field::with_degree(2, 2).unwrap();
        let t = FieldElement::new(&f4, &[0, 1]).unwrap();
        let tt = t.arith(&t, ArithOp::Mul).unwrap();
        assert_eq!(tt.coeffs(), &[1, 1]);
        assert_eq!(t.inverse().unwrap().coeffs(), &[1, 1]);

        let f3 = Field::prime(3).unwrap();
        let two = FieldElement::new(&f3, &[2]).unwrap();
        assert_eq!(two.arith(&two, ArithOp::Mul).unwrap().coeffs(), &[1]);
    }

    #[test]
    fn mixed_fields_and_zero_division_fail() {
        let f3 = Field::prime(3).unwrap();
        let f5 = Field::prime(5).unwrap();
        let a = f3.element(1);
        let b = f5.element(1);
        assert_eq!(a.arith(&b, ArithOp::Add), Err(FieldError::SpecMismatch));
        assert_eq!(
            a.arith(&f3.element(0), ArithOp::Div),
            Err(FieldError::DivisionByZero)
        );
    }

    #[test]
    fn table_and_polynomial_routes_agree() {
        for (p, k) in [(2, 1), (2, 3), (3, 2), (5, 1), (2, 4), (7, 2), (2, 6)] {
            let f = Field::with_degree(p, k).unwrap();
            for a in all_elements(&f) {
                for b in all_elements(&f) {
                    let (ac, bc) = (a.code(), b.code());
                    assert_eq!(a.arith(&b, ArithOp::Add).unwrap().code(), f.add(ac, bc));
                    assert_eq!(a.arith(&b, ArithOp::Mul).unwrap().code(), f.mul(ac, bc));
                    assert_eq!(a.arith(&b, ArithOp::Sub).unwrap().code(), f.sub(ac, bc));
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, k) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
            let f = Field::with_degree(p, k).unwrap();
            let els = all_elements(&f);
            for a in &els {
                if !a.is_zero() {
                    let inv = a.inverse().unwrap();
                    assert_eq!(a.arith(&inv, ArithOp::Mul).unwrap().code(), 1);
                }
                for b in &els {
                    for c in &els {
                        let ab_c = a
                            .arith(b, ArithOp::Mul)
                            .unwrap()
                            .arith(c, ArithOp::Mul)
                            .unwrap();
                        let a_bc = a
                            .arith(&b.arith(c, ArithOp::Mul).unwrap(), ArithOp::Mul)
                            .unwrap();
                        assert_eq!(ab_c, a_bc);
                        let lhs = a
                            .arith(&b.arith(c, ArithOp::Add).unwrap(), ArithOp::Mul)
                            .unwrap();
                        let rhs = a
                            .arith(b, ArithOp::Mul)
                            .unwrap()
                            .arith(&a.arith(c, ArithOp::Mul).unwrap(), ArithOp::Add)
                            .unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn field_axioms_random_larger() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for (p, k) in [(2, 4), (2, 5), (2, 6), (5, 2), (7, 2), (3, 3)] {
            let f = Field::with_degree(p, k).unwrap();
            for _ in 0..10_000 {
                let [a, b, c] = [0; 3].map(|_| f.element(rng.gen_range(0..f.order())));
                let lhs = a
                    .arith(&b.arith(&c, ArithOp::Add).unwrap(), ArithOp::Mul)
                    .unwrap();
                let rhs = a
                    .arith(&b, ArithOp::Mul)
                    .unwrap()
                    .arith(&a.arith(&c, ArithOp::Mul).unwrap(), ArithOp::Add)
                    .unwrap();
                assert_eq!(lhs, rhs);
                let assoc_l = a.arith(&b, ArithOp::Mul).unwrap().arith(&c, ArithOp::Mul).unwrap();
                let assoc_r = a.arith(&b.arith(&c, ArithOp::Mul).unwrap(), ArithOp::Mul).unwrap();
                assert_eq!(assoc_l, assoc_r);
                if !a.is_zero() {
                    let q = b.arith(&a, ArithOp::Div).unwrap();
                    assert_eq!(q.arith(&a, ArithOp::Mul).unwrap(), b);
                }
            }
        }
    }

    #[test]
    fn large_prime_field_uses_modular_route() {
        let p = 1_000_000_007;
        let f = Field::prime(p).unwrap();
        let a = 123_456_789;
        let inv = f.inv(a).unwrap();
        assert_eq!(f.mul(a, inv), 1);
        assert_eq!(f.add(p - 1, 5), 4);
    }

    #[test]
    fn norm_examples() {
        let f2 = Field::prime(2).unwrap();
        let f4 = Field::with_degree(2, 2).unwrap();
        for c in 1..4 {
            assert_eq!(norm(&f4.element(c), &f2).unwrap().code(), 1);
        }
        assert_eq!(norm(&f4.element(0), &f2).unwrap().code(), 0);

        let f3 = Field::prime(3).unwrap();
        let f9 = Field::with_degree(3, 2).unwrap();
        let ones = (0..9)
            .filter(|&c| norm(&f9.element(c), &f3).unwrap().code() == 1)
            .count();
        assert_eq!(ones, 4);
    }

    #[test]
    fn norm_rejects_non_subfield() {
        let f8 = Field::with_degree(2, 3).unwrap();
        let f4 = Field::with_degree(2, 2).unwrap();
        assert_eq!(norm(&f8.element(3), &f4), Err(FieldError::NotASubfield));
        let f3 = Field::prime(3).unwrap();
        assert_eq!(norm(&f8.element(3), &f3), Err(FieldError::NotASubfield));
    }

    #[test]
    fn norm_is_multiplicative() {
        let cases = [(2, 1, 6), (2, 2, 6), (2, 3, 6), (3, 1, 2), (2, 1, 4), (2, 2, 4), (7, 1, 2)];
        for (p, j, k) in cases {
            let base = Field::with_degree(p, j).unwrap();
            let ext = Field::with_degree(p, k).unwrap();
            for a in all_elements(&ext) {
                let na = norm(&a, &base).unwrap();
                for b in all_elements(&ext) {
                    let nb = norm(&b, &base).unwrap();
                    let nab = norm(&a.arith(&b, ArithOp::Mul).unwrap(), &base).unwrap();
                    assert_eq!(nab, na.arith(&nb, ArithOp::Mul).unwrap());
                }
            }
        }
    }

    #[test]
    fn subfield_embedding_is_a_ring_map() {
        let f4 = Field::with_degree(2, 2).unwrap();
        let f16 = Field::with_degree(2, 4).unwrap();
        let emb = SubfieldEmbedding::new(&f4, &f16).unwrap();
        for a in 0..4 {
            assert_eq!(emb.restrict(emb.embed(a)), Some(a));
            for b in 0..4 {
                assert_eq!(emb.embed(f4.mul(a, b)), f16.mul(emb.embed(a), emb.embed(b)));
                assert_eq!(emb.embed(f4.add(a, b)), f16.add(emb.embed(a), emb.embed(b)));
            }
        }
        let image: Vec<u64> = (0..4).map(|a| emb.embed(a)).collect();
        let outside = (0..16).find(|c| !image.contains(c)).unwrap();
        assert_eq!(emb.restrict(outside), None);
    }

    #[test]
    fn regular_matrix_examples() {
        let f2 = Field::prime(2).unwrap();
        let f4 = Field::with_degree(2, 2).unwrap();
        let one = regular_matrix(&f4.element(1), &f2, None).unwrap();
        assert!(one.is_identity());
        let t = regular_matrix(&f4.element(f4.generator()), &f2, None).unwrap();
        assert_eq!(t.entries(), &[0, 1, 1, 1]);
    }

    #[test]
    fn regular_matrix_det_is_norm_f16() {
        let f2 = Field::prime(2).unwrap();
        let f16 = Field::with_degree(2, 4).unwrap();
        for c in 1..16 {
            let x = f16.element(c);
            let m = regular_matrix(&x, &f2, None).unwrap();
            assert_eq!(m.det(), norm(&x, &f2).unwrap().code());
        }
    }

    #[test]
    fn regular_matrix_is_ring_homomorphism() {
        for (p, j, k) in [(2, 1, 4), (2, 2, 4), (3, 1, 2), (2, 1, 3)] {
            let base = Field::with_degree(p, j).unwrap();
            let ext = Field::with_degree(p, k).unwrap();
            let emb = SubfieldEmbedding::new(&base, &ext).unwrap();
            let mats: Vec<Matrix> = all_elements(&ext)
                .iter()
                .map(|x| regular_matrix_with(x, &emb, None).unwrap())
                .collect();
            for a in 0..ext.order() {
                let ma = &mats[a as usize];
                assert_eq!(ma.det(), norm(&ext.element(a), &base).unwrap().code());
                for b in 0..ext.order() {
                    let mb = &mats[b as usize];
                    assert_eq!(&mats[ext.mul(a, b) as usize], &ma.mul(mb));
                    assert_eq!(&mats[ext.add(a, b) as usize], &ma.add(mb));
                }
            }
        }
    }

    #[test]
    fn singular_basis_rejected() {
        let f2 = Field::prime(2).unwrap();
        let f4 = Field::with_degree(2, 2).unwrap();
        let basis = [f4.element(1), f4.element(1)];
        assert_eq!(
            regular_matrix(&f4.element(2), &f2, Some(&basis)),
            Err(FieldError::SingularBasis)
        );
        // a non-power basis is fine and still gives det = norm
        let basis = [f4.element(2), f4.element(3)];
        let m = regular_matrix(&f4.element(2), &f2, Some(&basis)).unwrap();
        assert_eq!(m.det(), 1);
    }
}
