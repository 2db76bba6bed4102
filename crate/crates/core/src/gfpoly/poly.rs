use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use super::field::{Fe, Field};
use crate::error::{Error, Result};
use crate::ring::Ring;

/// Degree of a polynomial; the zero polynomial has degree `NegInf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Degree {
    NegInf,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInf => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInf => f.write_str("-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// A polynomial in T over F_q, coefficients stored low degree first with no
/// trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    c: Vec<Fe>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly { c: vec![Fe::ONE] }
    }

    /// The variable T.
    pub fn t() -> Poly {
        Poly { c: vec![Fe::ZERO, Fe::ONE] }
    }

    pub fn constant(a: Fe) -> Poly {
        Poly::from_coeffs(vec![a])
    }

    /// `a * T^k`.
    pub fn monomial(a: Fe, k: usize) -> Poly {
        let mut c = vec![Fe::ZERO; k + 1];
        c[k] = a;
        Poly::from_coeffs(c)
    }

    pub fn from_coeffs(mut c: Vec<Fe>) -> Poly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> Fe {
        self.c.get(k).copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == Fe::ONE
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn degree(&self) -> Degree {
        match self.c.len() {
            0 => Degree::NegInf,
            n => Degree::Finite(n - 1),
        }
    }

    /// Degree as a signed integer with -1 for zero; only for bookkeeping
    /// where the sentinel cannot leak into arithmetic.
    pub fn deg_or_neg(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn leading(&self) -> Fe {
        self.c.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Fe::ONE
    }

    pub fn display<'a>(&'a self, field: &'a Field) -> PolyDisplay<'a> {
        PolyDisplay { p: self, field, var: "T" }
    }

    pub fn display_var<'a>(&'a self, field: &'a Field, var: &'static str) -> PolyDisplay<'a> {
        PolyDisplay { p: self, field, var }
    }
}

/// Polynomials compare by degree first, then coefficient-wise from the top
/// in enumeration order.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.c.iter().rev().cmp(other.c.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct PolyDisplay<'a> {
    p: &'a Poly,
    field: &'a Field,
    var: &'static str,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, &a) in self.p.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            let coeff = self.field.fmt_elem(a);
            let var = match k {
                0 => String::new(),
                1 => self.var.to_string(),
                _ => format!("{}^{k}", self.var),
            };
            if k == 0 {
                f.write_str(&coeff)?;
            } else if a == Fe::ONE {
                f.write_str(&var)?;
            } else if self.field.elem_is_compound(a) {
                write!(f, "({coeff})*{var}")?;
            } else {
                write!(f, "{coeff}*{var}")?;
            }
        }
        Ok(())
    }
}

/// Serializes as the raw coefficient indices, low degree first.
impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<u8> = self.c.iter().map(|x| x.0).collect();
        v.serialize(s)
    }
}

/// The ring A = F_q[T].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRing {
    pub field: Field,
}

impl PolyRing {
    pub fn new(field: Field) -> PolyRing {
        PolyRing { field }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn scale(&self, a: &Poly, s: Fe) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(a.c.iter().map(|&x| self.field.mul(x, s)).collect())
    }

    /// Multiply by T^k.
    pub fn shift(&self, a: &Poly, k: usize) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Fe::ZERO; k];
        c.extend_from_slice(&a.c);
        Poly { c }
    }

    pub fn monic(&self, a: &Poly) -> Result<Poly> {
        let lc = a.leading();
        if lc.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.scale(a, self.field.inv(lc)?))
    }

    pub fn divrem(&self, a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = &self.field;
        let db = b.c.len() - 1;
        if a.c.len() <= db {
            return Ok((Poly::zero(), a.clone()));
        }
        let inv_lc = f.inv(b.leading())?;
        let mut r = a.c.clone();
        let mut quo = vec![Fe::ZERO; a.c.len() - db];
        for k in (0..quo.len()).rev() {
            let c = f.mul(r[k + db], inv_lc);
            if c.is_zero() {
                continue;
            }
            quo[k] = c;
            for (i, &bi) in b.c.iter().enumerate() {
                r[k + i] = f.sub(r[k + i], f.mul(c, bi));
            }
        }
        r.truncate(db);
        Ok((Poly::from_coeffs(quo), Poly::from_coeffs(r)))
    }

    pub fn rem(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        Ok(self.divrem(a, b)?.1)
    }

    /// Exact division; errors if `b` does not divide `a`.
    pub fn div_exact(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(a, b)?;
        if !r.is_zero() {
            return Err(Error::Invariant("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn divides(&self, d: &Poly, a: &Poly) -> bool {
        !d.is_zero() && self.rem(a, d).map(|r| r.is_zero()).unwrap_or(false)
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Poly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let r = self.rem(&x, &y).expect("nonzero divisor");
            x = y;
            y = r;
        }
        if x.is_zero() {
            x
        } else {
            self.monic(&x).expect("nonzero")
        }
    }

    /// Extended gcd: returns (g, s, t) with s*a + t*b = g, g monic.
    pub fn xgcd(&self, a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = self.divrem(&r0, &r1).expect("nonzero divisor");
            r0 = std::mem::replace(&mut r1, r);
            let s = self.sub(&s0, &self.mul(&q, &s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = self.sub(&t0, &self.mul(&q, &t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = self.field.inv(r0.leading()).expect("nonzero");
        (self.scale(&r0, inv), self.scale(&s0, inv), self.scale(&t0, inv))
    }

    pub fn pow(&self, a: &Poly, mut n: u64) -> Poly {
        let mut base = a.clone();
        let mut acc = Poly::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    pub fn pow_mod(&self, a: &Poly, mut n: u64, m: &Poly) -> Result<Poly> {
        let mut base = self.rem(a, m)?;
        let mut acc = self.rem(&Poly::one(), m)?;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.rem(&self.mul(&acc, &base), m)?;
            }
            base = self.rem(&self.mul(&base, &base), m)?;
            n >>= 1;
        }
        Ok(acc)
    }

    pub fn eval(&self, a: &Poly, x: Fe) -> Fe {
        a.c.iter()
            .rev()
            .fold(Fe::ZERO, |acc, &c| self.field.add(self.field.mul(acc, x), c))
    }

    pub fn derivative(&self, a: &Poly) -> Poly {
        Poly::from_coeffs(
            a.c.iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| self.field.mul(self.field.from_int(k as i64), c))
                .collect(),
        )
    }

    /// Composition `a(b(T))`.
    pub fn compose(&self, a: &Poly, b: &Poly) -> Poly {
        a.c.iter()
            .rev()
            .fold(Poly::zero(), |acc, &c| self.add(&self.mul(&acc, b), &Poly::constant(c)))
    }

    /// Square root of a perfect square; `None` if `a` is not a square in A.
    pub fn sqrt(&self, a: &Poly) -> Option<Poly> {
        if a.is_zero() {
            return Some(Poly::zero());
        }
        let d = a.c.len() - 1;
        if d % 2 == 1 {
            return None;
        }
        let f = &self.field;
        let lead = f.sqrt(a.leading())?;
        let n = d / 2;
        if !f.is_odd() {
            // Frobenius is bijective: a is a square iff odd coefficients vanish.
            if a.c.iter().skip(1).step_by(2).any(|c| !c.is_zero()) {
                return None;
            }
            let r = Poly::from_coeffs(a.c.iter().step_by(2).map(|&c| f.pth_root(c)).collect());
            return Some(r);
        }
        // Determine coefficients of r top-down from r^2 = a.
        let two_lead_inv = f.inv(f.add(lead, lead)).ok()?;
        let mut r = vec![Fe::ZERO; n + 1];
        r[n] = lead;
        for k in 1..=n {
            // coefficient of T^{2n-k} in r^2: sum over i+j = 2n-k
            let mut s = Fe::ZERO;
            for i in (n - k + 1)..n {
                let j = 2 * n - k - i;
                if j <= n && j > n - k {
                    s = f.add(s, f.mul(r[i], r[j]));
                }
            }
            let target = a.coeff(2 * n - k);
            r[n - k] = f.mul(f.sub(target, s), two_lead_inv);
        }
        let root = Poly::from_coeffs(r);
        (self.mul(&root, &root) == *a).then_some(root)
    }

    /// Valuation at the prime `p` (ord of zero is `None`).
    pub fn valuation(&self, a: &Poly, p: &Poly) -> Option<u32> {
        if a.is_zero() {
            return None;
        }
        let mut x = a.clone();
        let mut k = 0;
        loop {
            let (q, r) = self.divrem(&x, p).expect("nonzero prime");
            if !r.is_zero() {
                return Some(k);
            }
            x = q;
            k += 1;
        }
    }

    /// All monic polynomials of exact degree `d`, in canonical order.
    pub fn monics_of_degree(&self, d: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = self.field.q() as u64;
        let count = q.pow(d as u32);
        (0..count).map(move |mut idx| {
            let mut c = Vec::with_capacity(d + 1);
            for _ in 0..d {
                c.push(Fe((idx % q) as u8));
                idx /= q;
            }
            c.push(Fe::ONE);
            Poly { c }
        })
    }

    /// All polynomials of degree <= d (including zero), in canonical order.
    pub fn all_up_to_degree(&self, d: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = self.field.q() as u64;
        let count = q.pow(d as u32 + 1);
        (0..count).map(move |mut idx| {
            let mut c = Vec::with_capacity(d + 1);
            for _ in 0..=d {
                c.push(Fe((idx % q) as u8));
                idx /= q;
            }
            Poly::from_coeffs(c)
        })
    }
}

impl Ring for PolyRing {
    type Elem = Poly;

    fn zero(&self) -> Poly {
        Poly::zero()
    }

    fn one(&self) -> Poly {
        Poly::one()
    }

    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.c.len().max(b.c.len());
        Poly::from_coeffs(
            (0..n)
                .map(|k| self.field.add(a.coeff(k), b.coeff(k)))
                .collect(),
        )
    }

    fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.c.len().max(b.c.len());
        Poly::from_coeffs(
            (0..n)
                .map(|k| self.field.sub(a.coeff(k), b.coeff(k)))
                .collect(),
        )
    }

    fn neg(&self, a: &Poly) -> Poly {
        Poly::from_coeffs(a.c.iter().map(|&x| self.field.neg(x)).collect())
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let f = &self.field;
        let mut c = vec![Fe::ZERO; a.c.len() + b.c.len() - 1];
        for (i, &x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.c.iter().enumerate() {
                c[i + j] = f.add(c[i + j], f.mul(x, y));
            }
        }
        Poly::from_coeffs(c)
    }

    fn is_zero(&self, a: &Poly) -> bool {
        a.is_zero()
    }

    fn equal(&self, a: &Poly, b: &Poly) -> bool {
        a == b
    }

    fn constant(&self, c: Fe) -> Poly {
        Poly::constant(c)
    }

    fn from_int(&self, n: i64) -> Poly {
        Poly::constant(self.field.from_int(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> PolyRing {
        PolyRing::new(Field::new(3, 1).unwrap())
    }

    fn p(r: &PolyRing, c: &[u32]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&x| r.field.elem(x)).collect())
    }

    #[test]
    fn degree_sentinel() {
        assert_eq!(Poly::zero().degree(), Degree::NegInf);
        assert!(Degree::NegInf < Degree::Finite(0));
        assert_eq!(Poly::t().degree(), Degree::Finite(1));
    }

    #[test]
    fn divrem_reconstructs() {
        let r = f3();
        let a = p(&r, &[1, 2, 0, 1, 2]);
        let b = p(&r, &[2, 1, 1]);
        let (q, rem) = r.divrem(&a, &b).unwrap();
        assert!(rem.degree() < b.degree());
        assert_eq!(r.add(&r.mul(&q, &b), &rem), a);
    }

    #[test]
    fn gcd_and_xgcd() {
        let r = f3();
        let t = Poly::t();
        let t1 = p(&r, &[2, 1]); // T - 1
        let a = r.mul(&t, &t1);
        let b = r.mul(&t1, &p(&r, &[1, 1])); // (T-1)(T+1)
        assert_eq!(r.gcd(&a, &b), t1);
        let (g, s, u) = r.xgcd(&a, &b);
        assert_eq!(g, t1);
        assert_eq!(r.add(&r.mul(&s, &a), &r.mul(&u, &b)), g);
    }

    #[test]
    fn display_format() {
        let r = f3();
        assert_eq!(p(&r, &[1, 2, 1]).display(&r.field).to_string(), "T^2+2*T+1");
        assert_eq!(Poly::zero().display(&r.field).to_string(), "0");
        let f9 = Field::new(3, 2).unwrap();
        let g = f9.generator().unwrap();
        let gp1 = f9.add(g, Fe::ONE);
        let poly = Poly::from_coeffs(vec![g, gp1]);
        assert_eq!(poly.display(&f9).to_string(), "(g+1)*T+g");
    }

    #[test]
    fn sqrt_of_squares() {
        for field in [Field::new(3, 1).unwrap(), Field::new(2, 2).unwrap(), Field::new(5, 1).unwrap()] {
            let r = PolyRing::new(field);
            for a in r.all_up_to_degree(2) {
                let sq = r.mul(&a, &a);
                let root = r.sqrt(&sq).expect("square");
                assert_eq!(r.mul(&root, &root), sq);
            }
        }
        let r = f3();
        assert!(r.sqrt(&Poly::t()).is_none());
        assert!(r.sqrt(&p(&r, &[1, 0, 2])).is_none()); // 2T^2 + 1, leading non-square
    }

    #[test]
    fn ordering_is_degree_then_top_coefficients() {
        let r = f3();
        let mut v = vec![p(&r, &[0, 1]), p(&r, &[2]), Poly::zero(), p(&r, &[1, 1]), p(&r, &[0, 2])];
        v.sort();
        assert_eq!(
            v,
            vec![Poly::zero(), p(&r, &[2]), p(&r, &[0, 1]), p(&r, &[1, 1]), p(&r, &[0, 2])]
        );
    }
}
