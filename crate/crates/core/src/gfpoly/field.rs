//! Table-driven arithmetic in F_q for q = p^e <= 256.
//!
//! Elements are indexed by the integer `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`
//! of their residue polynomial `c_0 + c_1 g + ...` modulo the defining
//! polynomial. The index order is the canonical enumeration order; every
//! "smallest element" choice in the crate refers to it.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::Ring;

/// Default upper bound on q accepted by [`Field::new`].
pub const DEFAULT_FIELD_BOUND: u32 = 64;
/// Hard limit imposed by the `u8` element encoding.
pub const MAX_FIELD_SIZE: u32 = 256;

/// An element of F_q, stored as its canonical index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe(pub(crate) u8);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

/// The finite field F_q. Cheap to clone.
#[derive(Clone)]
pub struct Field {
    t: Arc<Tables>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.t, &other.t)
            || (self.t.p == other.t.p && self.t.modulus == other.t.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q())?;
        if self.e() > 1 {
            write!(f, " (modulus {:?})", self.t.modulus)?;
        }
        Ok(())
    }
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn digits(mut idx: u32, p: u32, e: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(e as usize);
    for _ in 0..e {
        out.push(idx % p);
        idx /= p;
    }
    out
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Multiply residue polynomials over F_p and reduce by a monic modulus.
fn mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let e = modulus.len() - 1;
    let mut prod = vec![0u32; 2 * e];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (e..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &m) in modulus[..e].iter().enumerate() {
            let idx = k - e + i;
            prod[idx] = (prod[idx] + p - (c * m) % p) % p;
        }
    }
    prod.truncate(e);
    prod
}

impl Field {
    /// Builds F_{p^e} with the default size bound.
    pub fn new(p: u32, e: u32) -> Result<Field> {
        Field::with_bound(p, e, DEFAULT_FIELD_BOUND)
    }

    /// Builds F_{p^e}, whose modulus is the lexicographically smallest monic
    /// irreducible polynomial of degree `e` over F_p.
    pub fn with_bound(p: u32, e: u32, bound: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::Precondition("extension degree must be at least 1".into()));
        }
        let size = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        let bound = bound.min(MAX_FIELD_SIZE);
        if size > bound as u64 {
            return Err(Error::FieldTooLarge { size, bound });
        }
        if e == 1 {
            return Ok(Field::from_modulus(p, vec![0, 1]));
        }
        let prime = Field::from_modulus(p, vec![0, 1]);
        let modulus = super::factor::smallest_monic_irreducible(&prime, e as usize)
            .into_iter()
            .map(|c| c.0 as u32)
            .collect();
        Ok(Field::from_modulus(p, modulus))
    }

    /// Parses "q=9" or "p=3,e=2".
    pub fn parse_spec(spec: &str) -> Result<Field> {
        let mut p = None;
        let mut e = None;
        let mut q = None;
        for part in spec.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad field spec {spec:?}")))?;
            let v: u32 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number in field spec {spec:?}")))?;
            match k.trim() {
                "q" => q = Some(v),
                "p" => p = Some(v),
                "e" => e = Some(v),
                other => return Err(Error::Parse(format!("unknown field key {other:?}"))),
            }
        }
        match (q, p, e) {
            (Some(q), None, None) => Field::from_order(q),
            (None, Some(p), e) => Field::new(p, e.unwrap_or(1)),
            _ => Err(Error::Parse(format!("bad field spec {spec:?}"))),
        }
    }

    /// Builds the field with `q` elements.
    pub fn from_order(q: u32) -> Result<Field> {
        if q < 2 {
            return Err(Error::NotPrime(q));
        }
        let mut p = 2;
        while q % p != 0 {
            p += 1;
        }
        let mut e = 0;
        let mut r = q;
        while r % p == 0 {
            r /= p;
            e += 1;
        }
        if r != 1 {
            return Err(Error::NotPrime(q));
        }
        Field::new(p, e)
    }

    fn from_modulus(p: u32, modulus: Vec<u32>) -> Field {
        let e = (modulus.len() - 1) as u32;
        let q = p.pow(e);
        let qs = q as usize;
        let elems: Vec<Vec<u32>> = (0..q).map(|i| digits(i, p, e)).collect();
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..qs {
            for b in 0..qs {
                let s: Vec<u32> = elems[a]
                    .iter()
                    .zip(&elems[b])
                    .map(|(x, y)| (x + y) % p)
                    .collect();
                add[a * qs + b] = undigits(&s, p) as u8;
                let m = if e == 1 {
                    vec![(elems[a][0] * elems[b][0]) % p]
                } else {
                    mulmod(&elems[a], &elems[b], &modulus, p)
                };
                mul[a * qs + b] = undigits(&m, p) as u8;
            }
        }
        let mut neg = vec![0u8; qs];
        let mut inv = vec![0u8; qs];
        for a in 0..qs {
            for b in 0..qs {
                if add[a * qs + b] == 0 {
                    neg[a] = b as u8;
                }
                if mul[a * qs + b] == 1 {
                    inv[a] = b as u8;
                }
            }
        }
        Field {
            t: Arc::new(Tables { p, e, q, modulus, add, mul, neg, inv }),
        }
    }

    pub fn p(&self) -> u32 {
        self.t.p
    }

    pub fn e(&self) -> u32 {
        self.t.e
    }

    pub fn q(&self) -> u32 {
        self.t.q
    }

    pub fn is_odd(&self) -> bool {
        self.t.p != 2
    }

    /// Defining polynomial over F_p, low degree first (monic).
    pub fn modulus(&self) -> &[u32] {
        &self.t.modulus
    }

    /// All elements in canonical enumeration order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + Clone {
        (0..self.t.q).map(|i| Fe(i as u8))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Fe> + Clone {
        (1..self.t.q).map(|i| Fe(i as u8))
    }

    pub fn elem(&self, index: u32) -> Fe {
        assert!(index < self.t.q, "element index out of range");
        Fe(index as u8)
    }

    /// The class of the generator `g` of F_q over F_p (requires e > 1).
    pub fn generator(&self) -> Option<Fe> {
        (self.t.e > 1).then_some(Fe(self.t.p as u8))
    }

    /// Residue-polynomial coefficients of an element over F_p.
    pub fn coords(&self, a: Fe) -> Vec<u32> {
        digits(a.0 as u32, self.t.p, self.t.e)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.t.add[a.index() * self.t.q as usize + b.index()])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.t.neg[a.index()])
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.t.mul[a.index() * self.t.q as usize + b.index()])
    }

    /// Inverse of a nonzero element.
    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(Fe(self.t.inv[a.index()]))
        }
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, mut n: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// Reduction of an integer into the prime field.
    pub fn from_int(&self, n: i64) -> Fe {
        let p = self.t.p as i64;
        Fe(n.rem_euclid(p) as u8)
    }

    pub fn is_square(&self, a: Fe) -> bool {
        if a.is_zero() || !self.is_odd() {
            return true;
        }
        self.pow(a, (self.t.q as u64 - 1) / 2) == Fe::ONE
    }

    /// The smallest square root in enumeration order, if one exists.
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        self.elements().find(|&x| self.mul(x, x) == a)
    }

    /// Absolute trace F_q -> F_p, returned as an element of the prime field.
    pub fn absolute_trace(&self, a: Fe) -> Fe {
        let mut acc = Fe::ZERO;
        let mut x = a;
        for _ in 0..self.t.e {
            acc = self.add(acc, x);
            x = self.pow(x, self.t.p as u64);
        }
        acc
    }

    /// Inverse of Frobenius: the unique `x` with `x^p = a`.
    pub fn pth_root(&self, a: Fe) -> Fe {
        self.pow(a, (self.t.p as u64).pow(self.t.e - 1))
    }

    /// The distinguished constant: smallest non-square for odd q, smallest
    /// element of absolute trace 1 for even q.
    pub fn choose_xi(&self) -> Fe {
        if self.is_odd() {
            self.nonzero_elements()
                .find(|&x| !self.is_square(x))
                .expect("odd finite fields have non-squares")
        } else {
            self.elements()
                .find(|&x| self.absolute_trace(x) == Fe::ONE)
                .expect("trace is surjective")
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Fe) -> Option<u32> {
        if a.is_zero() {
            return None;
        }
        let mut x = a;
        let mut k = 1;
        while x != Fe::ONE {
            x = self.mul(x, a);
            k += 1;
        }
        Some(k)
    }

    /// Formats an element as an integer (prime fields) or a polynomial in `g`.
    pub fn fmt_elem(&self, a: Fe) -> String {
        if self.t.e == 1 {
            return a.0.to_string();
        }
        let d = self.coords(a);
        let mut terms = Vec::new();
        for (k, &c) in d.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let var = match k {
                0 => String::new(),
                1 => "g".to_string(),
                _ => format!("g^{k}"),
            };
            terms.push(match (c, k) {
                (_, 0) => c.to_string(),
                (1, _) => var,
                _ => format!("{c}*{var}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }

    /// True when `fmt_elem` produces a sum that needs parentheses as a factor.
    pub(crate) fn elem_is_compound(&self, a: Fe) -> bool {
        self.coords(a).iter().filter(|&&c| c != 0).count() > 1
    }
}

impl Ring for Field {
    type Elem = Fe;

    fn zero(&self) -> Fe {
        Fe::ZERO
    }
    fn one(&self) -> Fe {
        Fe::ONE
    }
    fn add(&self, a: &Fe, b: &Fe) -> Fe {
        Field::add(self, *a, *b)
    }
    fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        Field::sub(self, *a, *b)
    }
    fn neg(&self, a: &Fe) -> Fe {
        Field::neg(self, *a)
    }
    fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        Field::mul(self, *a, *b)
    }
    fn is_zero(&self, a: &Fe) -> bool {
        a.is_zero()
    }
    fn equal(&self, a: &Fe, b: &Fe) -> bool {
        a == b
    }
    fn constant(&self, c: Fe) -> Fe {
        c
    }
    fn from_int(&self, n: i64) -> Fe {
        Field::from_int(self, n)
    }
}
