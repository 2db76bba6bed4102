//! Irreducibility testing and factorization over F_q: squarefree
//! decomposition followed by Berlekamp splitting. Everything is
//! deterministic (Berlekamp tries constants in enumeration order).

use super::field::{Fe, Field};
use super::linalg::nullspace;
use super::poly::{Poly, PolyRing};
use crate::error::{Error, Result};
use crate::ring::Ring;

/// `unit * prod(factor^mult)`, factors monic irreducible and sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Fe,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn expand(&self, ring: &PolyRing) -> Poly {
        let mut acc = Poly::constant(self.unit);
        for (f, m) in &self.factors {
            acc = ring.mul(&acc, &ring.pow(f, *m as u64));
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, m)| *m == 1)
    }
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `x^(q^k) mod f`.
fn frobenius_power(ring: &PolyRing, f: &Poly, k: usize) -> Poly {
    let q = ring.field.q() as u64;
    let mut x = ring.rem(&Poly::t(), f).expect("nonzero modulus");
    for _ in 0..k {
        x = ring.pow_mod(&x, q, f).expect("nonzero modulus");
    }
    x
}

/// Rabin's irreducibility test.
pub fn is_irreducible(ring: &PolyRing, f: &Poly) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let n = match f.degree().finite() {
        Some(0) | None => return Ok(false),
        Some(n) => n,
    };
    let x = Poly::t();
    if ring.sub(&frobenius_power(ring, f, n), &ring.rem(&x, f)?) != Poly::zero() {
        return Ok(false);
    }
    for r in prime_divisors(n) {
        let h = ring.sub(&frobenius_power(ring, f, n / r), &x);
        if !ring.gcd(&h, f).is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The lexicographically smallest monic irreducible of degree `d`.
pub(crate) fn smallest_monic_irreducible(field: &Field, d: usize) -> Vec<Fe> {
    let ring = PolyRing::new(field.clone());
    let f = ring
        .monics_of_degree(d)
        .find(|f| is_irreducible(&ring, f).unwrap_or(false))
        .expect("irreducible polynomials exist in every degree");
    f.coeffs().to_vec()
}

/// Monic irreducible polynomials of degree `d` in canonical order.
pub fn monic_irreducibles(ring: &PolyRing, d: usize) -> Vec<Poly> {
    ring.monics_of_degree(d)
        .filter(|f| is_irreducible(ring, f).unwrap_or(false))
        .collect()
}

fn pth_root_poly(ring: &PolyRing, f: &Poly) -> Poly {
    let p = ring.field.p() as usize;
    Poly::from_coeffs(
        f.coeffs()
            .iter()
            .step_by(p)
            .map(|&c| ring.field.pth_root(c))
            .collect(),
    )
}

/// Squarefree decomposition of a monic polynomial: pairs (g, i) with g
/// squarefree, pairwise coprime, and f = prod g^i.
fn squarefree_decomposition(ring: &PolyRing, f: &Poly) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    if f.degree().finite().unwrap_or(0) == 0 {
        return out;
    }
    let p = ring.field.p();
    let df = ring.derivative(f);
    let mut c = ring.gcd(f, &df);
    let mut w = ring.div_exact(f, &c).expect("gcd divides");
    let mut i = 1;
    while !w.is_one() {
        let y = ring.gcd(&w, &c);
        let fac = ring.div_exact(&w, &y).expect("gcd divides");
        if !fac.is_constant() {
            out.push((fac, i));
        }
        w = y;
        c = ring.div_exact(&c, &w).expect("gcd divides");
        i += 1;
    }
    if !c.is_one() {
        let root = pth_root_poly(ring, &c);
        for (g, m) in squarefree_decomposition(ring, &root) {
            out.push((g, m * p));
        }
    }
    out
}

/// Berlekamp splitting of a monic squarefree polynomial.
fn berlekamp(ring: &PolyRing, f: &Poly) -> Vec<Poly> {
    let n = f.degree().finite().expect("nonzero");
    if n <= 1 {
        return vec![f.clone()];
    }
    let field = &ring.field;
    let q = field.q() as u64;
    // Rows: x^{q i} mod f minus the identity.
    let xq = ring.pow_mod(&Poly::t(), q, f).expect("nonzero");
    let mut rows: Vec<Vec<Fe>> = Vec::with_capacity(n);
    let mut cur = Poly::one();
    for i in 0..n {
        let mut row: Vec<Fe> = (0..n).map(|k| cur.coeff(k)).collect();
        row[i] = field.sub(row[i], Fe::ONE);
        rows.push(row);
        cur = ring.rem(&ring.mul(&cur, &xq), f).expect("nonzero");
    }
    // Kernel of (Q - I)^T acting on coefficient vectors: v with v (Q - I) = 0.
    let transposed: Vec<Vec<Fe>> = (0..n).map(|c| (0..n).map(|r| rows[r][c]).collect()).collect();
    let kernel = nullspace(field, &transposed, n);
    let k = kernel.len();
    let mut factors = vec![f.clone()];
    if k == 1 {
        return factors;
    }
    'outer: for v in kernel.iter() {
        let vp = Poly::from_coeffs(v.clone());
        for c in field.elements() {
            let mut next = Vec::with_capacity(factors.len() + 1);
            for h in &factors {
                if h.degree() == super::poly::Degree::Finite(1) {
                    next.push(h.clone());
                    continue;
                }
                let d = ring.gcd(h, &ring.sub(&vp, &Poly::constant(c)));
                if !d.is_one() && d.degree() < h.degree() {
                    next.push(ring.div_exact(h, &d).expect("gcd divides"));
                    next.push(d);
                } else {
                    next.push(h.clone());
                }
            }
            factors = next;
            if factors.len() == k {
                break 'outer;
            }
        }
    }
    factors
        .into_iter()
        .map(|g| ring.monic(&g).expect("nonzero"))
        .collect()
}

/// Complete factorization into monic irreducibles, sorted in canonical order.
pub fn factor(ring: &PolyRing, f: &Poly) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let unit = f.leading();
    let monic = ring.monic(f)?;
    let mut factors: Vec<(Poly, u32)> = Vec::new();
    for (g, m) in squarefree_decomposition(ring, &monic) {
        for h in berlekamp(ring, &g) {
            factors.push((h, m));
        }
    }
    factors.sort();
    let mut merged: Vec<(Poly, u32)> = Vec::new();
    for (g, m) in factors {
        match merged.last_mut() {
            Some((h, mm)) if *h == g => *mm += m,
            _ => merged.push((g, m)),
        }
    }
    Ok(Factorization { unit, factors: merged })
}

/// Number of monic irreducibles of degree `d` over F_q (Gauss's formula).
pub fn count_irreducibles(q: u64, d: u32) -> u64 {
    fn mobius(mut n: u32) -> i64 {
        let mut result = 1;
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return 0;
                }
                result = -result;
            }
            p += 1;
        }
        if n > 1 {
            result = -result;
        }
        result
    }
    let mut total: i128 = 0;
    for k in 1..=d {
        if d % k == 0 {
            total += mobius(d / k) as i128 * (q as i128).pow(k);
        }
    }
    (total / d as i128) as u64
}
