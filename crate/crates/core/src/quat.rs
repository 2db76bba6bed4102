//! Quaternion algebras H(a, b) over F = F_q(T) and its completions.
//!
//! Odd q: i^2 = a, j^2 = b, ij = -ji. Even q: i^2 + i = a, j^2 = b,
//! ij = j(i + 1). Elements are written x + y*i + z*j + w*ij.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gfpoly::{
    factor, parse_ratfunc, split_algebra_spec, sqr_test_residue, Fe, Field, Place, Poly, PolyRing,
    RatFunc, RatFuncField,
};
use crate::laurent::LaurentRing;
use crate::ring::Ring;

/// Coordinates (x, y, z, w) in the basis 1, i, j, ij.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuatElem<E> {
    pub c: [E; 4],
}

impl<E> QuatElem<E> {
    pub fn new(x: E, y: E, z: E, w: E) -> Self {
        QuatElem { c: [x, y, z, w] }
    }

    pub fn map<F, G: FnMut(&E) -> F>(&self, mut g: G) -> QuatElem<F> {
        QuatElem { c: [g(&self.c[0]), g(&self.c[1]), g(&self.c[2]), g(&self.c[3])] }
    }
}

impl QuatElem<Poly> {
    /// Maximum coefficient degree, or -1 for zero.
    pub fn degree(&self) -> i64 {
        self.c.iter().map(|p| p.deg_or_neg()).max().unwrap_or(-1)
    }

    /// Ordering key: lexicographic on the (w, z, y, x) coefficient vectors.
    pub fn sort_key(&self) -> [Poly; 4] {
        [self.c[3].clone(), self.c[2].clone(), self.c[1].clone(), self.c[0].clone()]
    }

    pub fn display<'a>(&'a self, field: &'a Field) -> QuatDisplay<'a> {
        QuatDisplay { e: self, field }
    }
}

pub struct QuatDisplay<'a> {
    e: &'a QuatElem<Poly>,
    field: &'a Field,
}

/// Prints as `T+i+j` or `(2*T+2)*i+2*ij`.
impl fmt::Display for QuatDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "i", "j", "ij"];
        let mut out = String::new();
        for (k, p) in self.e.c.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if !out.is_empty() {
                out.push('+');
            }
            let s = p.display(self.field).to_string();
            if k == 0 {
                out.push_str(&s);
            } else if p.is_one() {
                out.push_str(names[k]);
            } else if s.contains('+') {
                out.push_str(&format!("({s})*{}", names[k]));
            } else {
                out.push_str(&format!("{s}*{}", names[k]));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// Serializes as four polynomial strings in the canonical printing.
#[derive(Serialize)]
pub struct QuatJson {
    pub x: String,
    pub y: String,
    pub z: String,
    pub w: String,
    pub text: String,
}

impl QuatJson {
    pub fn new(field: &Field, e: &QuatElem<Poly>) -> QuatJson {
        let s = |p: &Poly| p.display(field).to_string();
        QuatJson {
            x: s(&e.c[0]),
            y: s(&e.c[1]),
            z: s(&e.c[2]),
            w: s(&e.c[3]),
            text: e.display(field).to_string(),
        }
    }
}

/// Quaternion arithmetic over a coefficient ring, from structure constants.
#[derive(Clone, Debug)]
pub struct Quat<R: Ring> {
    pub ring: R,
    pub a: R::Elem,
    pub b: R::Elem,
    pub odd: bool,
    table: Vec<Vec<Vec<(usize, R::Elem)>>>,
}

impl<R: Ring> Quat<R> {
    pub fn new(ring: R, a: R::Elem, b: R::Elem, odd: bool) -> Self {
        let one = ring.one();
        let ab = ring.mul(&a, &b);
        let neg = |x: &R::Elem| ring.neg(x);
        let mut t: Vec<Vec<Vec<(usize, R::Elem)>>> = vec![vec![Vec::new(); 4]; 4];
        for s in 0..4 {
            t[0][s] = vec![(s, one.clone())];
            t[s][0] = vec![(s, one.clone())];
        }
        if odd {
            t[1][1] = vec![(0, a.clone())];
            t[1][2] = vec![(3, one.clone())];
            t[1][3] = vec![(2, a.clone())];
            t[2][1] = vec![(3, neg(&one))];
            t[2][2] = vec![(0, b.clone())];
            t[2][3] = vec![(1, neg(&b))];
            t[3][1] = vec![(2, neg(&a))];
            t[3][2] = vec![(1, b.clone())];
            t[3][3] = vec![(0, neg(&ab))];
        } else {
            t[1][1] = vec![(0, a.clone()), (1, one.clone())];
            t[1][2] = vec![(3, one.clone())];
            t[1][3] = vec![(2, a.clone()), (3, one.clone())];
            t[2][1] = vec![(2, one.clone()), (3, one.clone())];
            t[2][2] = vec![(0, b.clone())];
            t[2][3] = vec![(0, b.clone()), (1, b.clone())];
            t[3][1] = vec![(2, a.clone())];
            t[3][2] = vec![(1, b.clone())];
            t[3][3] = vec![(0, ab)];
        }
        Quat { ring, a, b, odd, table: t }
    }

    pub fn elem(&self, x: R::Elem, y: R::Elem, z: R::Elem, w: R::Elem) -> QuatElem<R::Elem> {
        QuatElem::new(x, y, z, w)
    }

    pub fn scalar(&self, x: R::Elem) -> QuatElem<R::Elem> {
        let z = self.ring.zero();
        QuatElem::new(x, z.clone(), z.clone(), z)
    }

    pub fn zero(&self) -> QuatElem<R::Elem> {
        self.scalar(self.ring.zero())
    }

    pub fn one(&self) -> QuatElem<R::Elem> {
        self.scalar(self.ring.one())
    }

    /// The basis element of index 0..4 (1, i, j, ij).
    pub fn basis(&self, k: usize) -> QuatElem<R::Elem> {
        let mut e = self.zero();
        e.c[k] = self.ring.one();
        e
    }

    pub fn add(&self, p: &QuatElem<R::Elem>, q: &QuatElem<R::Elem>) -> QuatElem<R::Elem> {
        let r = &self.ring;
        QuatElem { c: std::array::from_fn(|k| r.add(&p.c[k], &q.c[k])) }
    }

    pub fn sub(&self, p: &QuatElem<R::Elem>, q: &QuatElem<R::Elem>) -> QuatElem<R::Elem> {
        let r = &self.ring;
        QuatElem { c: std::array::from_fn(|k| r.sub(&p.c[k], &q.c[k])) }
    }

    pub fn neg(&self, p: &QuatElem<R::Elem>) -> QuatElem<R::Elem> {
        p.map(|x| self.ring.neg(x))
    }

    pub fn scale(&self, s: &R::Elem, p: &QuatElem<R::Elem>) -> QuatElem<R::Elem> {
        p.map(|x| self.ring.mul(s, x))
    }

    pub fn mul(&self, p: &QuatElem<R::Elem>, q: &QuatElem<R::Elem>) -> QuatElem<R::Elem> {
        let r = &self.ring;
        let mut out: [R::Elem; 4] = std::array::from_fn(|_| r.zero());
        for (u, pu) in p.c.iter().enumerate() {
            if r.is_zero(pu) {
                continue;
            }
            for (v, qv) in q.c.iter().enumerate() {
                if r.is_zero(qv) {
                    continue;
                }
                let prod = r.mul(pu, qv);
                for (t, coef) in &self.table[u][v] {
                    out[*t] = r.add(&out[*t], &r.mul(&prod, coef));
                }
            }
        }
        QuatElem { c: out }
    }

    pub fn pow(&self, p: &QuatElem<R::Elem>, mut n: u64) -> QuatElem<R::Elem> {
        let mut acc = self.one();
        let mut base = p.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// Canonical involution.
    pub fn conj(&self, p: &QuatElem<R::Elem>) -> QuatElem<R::Elem> {
        let r = &self.ring;
        if self.odd {
            QuatElem::new(p.c[0].clone(), r.neg(&p.c[1]), r.neg(&p.c[2]), r.neg(&p.c[3]))
        } else {
            QuatElem::new(
                r.add(&p.c[0], &p.c[1]),
                p.c[1].clone(),
                p.c[2].clone(),
                p.c[3].clone(),
            )
        }
    }

    pub fn trace(&self, p: &QuatElem<R::Elem>) -> R::Elem {
        if self.odd {
            self.ring.add(&p.c[0], &p.c[0])
        } else {
            p.c[1].clone()
        }
    }

    /// Reduced norm, by the closed quadratic form.
    pub fn norm(&self, p: &QuatElem<R::Elem>) -> R::Elem {
        let r = &self.ring;
        let [x, y, z, w] = &p.c;
        let (a, b) = (&self.a, &self.b);
        if self.odd {
            let t1 = r.sub(&r.square(x), &r.mul(a, &r.square(y)));
            let t2 = r.sub(&r.mul(&r.mul(a, b), &r.square(w)), &r.mul(b, &r.square(z)));
            r.add(&t1, &t2)
        } else {
            let t1 = r.add(&r.add(&r.square(x), &r.mul(x, y)), &r.mul(a, &r.square(y)));
            let inner = r.add(&r.add(&r.square(z), &r.mul(z, w)), &r.mul(a, &r.square(w)));
            r.add(&t1, &r.mul(b, &inner))
        }
    }

    /// (trace, norm) of the reduced characteristic polynomial x^2 - t x + n.
    pub fn charpoly(&self, p: &QuatElem<R::Elem>) -> (R::Elem, R::Elem) {
        (self.trace(p), self.norm(p))
    }

    pub fn equal(&self, p: &QuatElem<R::Elem>, q: &QuatElem<R::Elem>) -> bool {
        (0..4).all(|k| self.ring.equal(&p.c[k], &q.c[k]))
    }

    pub fn is_zero(&self, p: &QuatElem<R::Elem>) -> bool {
        p.c.iter().all(|x| self.ring.is_zero(x))
    }
}

/// The set R of finite ramified places, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamSet {
    pub places: Vec<Place>,
}

impl RamSet {
    pub fn new(mut places: Vec<Place>) -> Result<RamSet> {
        places.sort();
        places.dedup();
        if places.iter().any(Place::is_infinite) {
            return Err(Error::RamifiedAtInfinity);
        }
        if places.len() % 2 != 0 {
            return Err(Error::Precondition(format!(
                "a ramification set has even cardinality, got {}",
                places.len()
            )));
        }
        Ok(RamSet { places })
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.places.iter().map(Place::degree).collect();
        d.sort_unstable();
        d
    }

    /// The product of the primes in R.
    pub fn product(&self, ring: &PolyRing) -> Poly {
        self.places
            .iter()
            .filter_map(Place::poly)
            .fold(Poly::one(), |acc, p| ring.mul(&acc, p))
    }

    pub fn labels(&self, field: &Field) -> Vec<String> {
        self.places.iter().map(|p| p.label(field)).collect()
    }
}

/// A quaternion algebra H(a, b) over F_q(T).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuatAlgebra {
    pub field: Field,
    pub a: RatFunc,
    pub b: RatFunc,
}

impl QuatAlgebra {
    pub fn new(field: Field, a: RatFunc, b: RatFunc) -> Result<QuatAlgebra> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::Precondition("H(a, b) needs a, b nonzero".into()));
        }
        Ok(QuatAlgebra { field, a, b })
    }

    pub fn from_polys(field: Field, a: Poly, b: Poly) -> Result<QuatAlgebra> {
        QuatAlgebra::new(field, RatFunc::from_poly(a), RatFunc::from_poly(b))
    }

    /// Parses `H(a, b)`, e.g. `H(xi, T*(T-1))`.
    pub fn parse(field: &Field, spec: &str) -> Result<QuatAlgebra> {
        let (a, b) = split_algebra_spec(spec)?;
        QuatAlgebra::new(field.clone(), parse_ratfunc(field, &a)?, parse_ratfunc(field, &b)?)
    }

    /// The shape H(xi, r) used for torsion and explicit examples.
    pub fn xi_shape(field: &Field, r: Poly) -> Result<QuatAlgebra> {
        QuatAlgebra::from_polys(field.clone(), Poly::constant(field.choose_xi()), r)
    }

    pub fn is_odd(&self) -> bool {
        self.field.is_odd()
    }

    pub fn label(&self) -> String {
        format!("H({}, {})", self.a.display(&self.field), self.b.display(&self.field))
    }

    pub fn poly_ab(&self) -> Result<(Poly, Poly)> {
        match (self.a.as_poly(), self.b.as_poly()) {
            (Some(a), Some(b)) => Ok((a.clone(), b.clone())),
            _ => Err(Error::Precondition("a and b must be polynomials".into())),
        }
    }

    pub fn over_ratfunc(&self) -> Quat<RatFuncField> {
        Quat::new(RatFuncField::new(self.field.clone()), self.a.clone(), self.b.clone(), self.is_odd())
    }

    pub fn over_poly(&self) -> Result<Quat<PolyRing>> {
        let (a, b) = self.poly_ab()?;
        Ok(Quat::new(PolyRing::new(self.field.clone()), a, b, self.is_odd()))
    }

    pub fn over_constants(&self) -> Result<Quat<Field>> {
        let (a, b) = self.poly_ab()?;
        if !a.is_constant() || !b.is_constant() {
            return Err(Error::Precondition("a and b must be constants".into()));
        }
        Ok(Quat::new(self.field.clone(), a.coeff(0), b.coeff(0), self.is_odd()))
    }

    pub fn over_laurent(&self, prec: usize) -> Result<Quat<LaurentRing>> {
        let k = LaurentRing::new(self.field.clone(), prec);
        let a = k.embed_auto(&self.a)?;
        let b = k.embed_auto(&self.b)?;
        Ok(Quat::new(k, a, b, self.is_odd()))
    }

    /// Whether the algebra splits at `v`.
    pub fn is_split_at(&self, v: &Place) -> Result<bool> {
        if self.is_odd() {
            Ok(hilbert_symbol(&self.field, &self.a, &self.b, v)? == 1)
        } else {
            self.even_split_at(v)
        }
    }

    /// Even q, shape H(c, b) with c a constant and b a squarefree polynomial.
    fn even_split_at(&self, v: &Place) -> Result<bool> {
        let unsupported = || {
            Error::Unsupported(
                "even-q ramification is implemented for H(xi, b) with xi constant and b squarefree"
                    .into(),
            )
        };
        let c = match self.a.as_poly() {
            Some(p) if p.is_constant() => p.coeff(0),
            _ => return Err(unsupported()),
        };
        let b = self.b.as_poly().ok_or_else(unsupported)?;
        let ring = PolyRing::new(self.field.clone());
        if !factor(&ring, b)?.is_squarefree() {
            return Err(unsupported());
        }
        if self.field.absolute_trace(c).is_zero() {
            // x^2 + x + c has a root in F_q: the algebra is a matrix algebra.
            return Ok(true);
        }
        Ok(match v {
            Place::Infinity => b.deg_or_neg() % 2 == 0,
            Place::Finite(p) => !ring.divides(p, b) || v.degree() % 2 == 0,
        })
    }

    /// Finite ramified places and whether infinity ramifies. The total count
    /// is always even; an odd count is reported as an invariant violation.
    pub fn ramification(&self) -> Result<(Vec<Place>, bool)> {
        let ring = PolyRing::new(self.field.clone());
        let mut candidates: Vec<Place> = Vec::new();
        for p in [self.a.num(), self.a.den(), self.b.num(), self.b.den()] {
            if p.is_constant() {
                continue;
            }
            for (f, _) in factor(&ring, p)?.factors {
                candidates.push(Place::Finite(f));
            }
        }
        candidates.sort();
        candidates.dedup();
        let mut finite = Vec::new();
        for v in candidates {
            if !self.is_split_at(&v)? {
                finite.push(v);
            }
        }
        let inf = !self.is_split_at(&Place::Infinity)?;
        if (finite.len() + inf as usize) % 2 != 0 {
            return Err(Error::Invariant(format!(
                "odd number of ramified places for {}",
                self.label()
            )));
        }
        Ok((finite, inf))
    }

    /// R, requiring the algebra to split at infinity.
    pub fn ramified_set(&self) -> Result<RamSet> {
        let (finite, inf) = self.ramification()?;
        if inf {
            return Err(Error::RamifiedAtInfinity);
        }
        RamSet::new(finite)
    }
}

fn quad_char_const(field: &Field, c: Fe) -> i8 {
    if field.is_square(c) {
        1
    } else {
        -1
    }
}

/// Quadratic character of the residue of a `v`-unit given as `num/den`
/// after removing the powers of `p`.
fn residue_char(ring: &PolyRing, p: &Poly, r: &RatFunc) -> Result<i8> {
    let strip = |f: &Poly| -> Result<Poly> {
        let mut f = f.clone();
        while ring.divides(p, &f) {
            f = ring.div_exact(&f, p)?;
        }
        Ok(f)
    };
    let n = sqr_test_residue(ring, p, &strip(r.num())?)?;
    let d = sqr_test_residue(ring, p, &strip(r.den())?)?;
    Ok(n * d)
}

/// The Hilbert symbol (a, b)_v for odd q, via the tame symbol
/// (-1)^{ab} a^beta b^{-alpha} at v.
pub fn hilbert_symbol(field: &Field, a: &RatFunc, b: &RatFunc, v: &Place) -> Result<i8> {
    if !field.is_odd() {
        return Err(Error::Unsupported("the tame Hilbert symbol needs odd q".into()));
    }
    if a.is_zero() || b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let k = RatFuncField::new(field.clone());
    let ring = &k.ring;
    let minus_one = field.neg(Fe::ONE);
    let (alpha, beta, chi_a, chi_b, chi_m1) = match v {
        Place::Finite(p) => {
            let alpha = k.valuation(a, p).expect("nonzero");
            let beta = k.valuation(b, p).expect("nonzero");
            (
                alpha,
                beta,
                residue_char(ring, p, a)?,
                residue_char(ring, p, b)?,
                sqr_test_residue(ring, p, &Poly::constant(minus_one))?,
            )
        }
        Place::Infinity => {
            let lead = |r: &RatFunc| field.div(r.num().leading(), r.den().leading());
            (
                a.ord_inf().expect("nonzero"),
                b.ord_inf().expect("nonzero"),
                quad_char_const(field, lead(a)?),
                quad_char_const(field, lead(b)?),
                quad_char_const(field, minus_one),
            )
        }
    };
    let pw = |c: i8, e: i64| if e.rem_euclid(2) == 1 { c } else { 1 };
    Ok(pw(chi_m1, alpha * beta) * pw(chi_a, beta) * pw(chi_b, alpha))
}

/// Splitting behaviour of a finite place in the constant extension
/// F_{q^2}F / F: +1 if it splits (even degree), -1 if inert.
pub fn artin_legendre(v: &Place) -> Result<i8> {
    match v {
        Place::Infinity => Err(Error::Precondition("finite place expected".into())),
        p => Ok(if p.degree() % 2 == 0 { 1 } else { -1 }),
    }
}

/// Default degree bound for [`find_algebra`].
pub const FIND_ALGEBRA_BOUND: usize = 4;

/// Searches for polynomials (a, b) such that H(a, b) ramifies exactly at R,
/// ab is a constant times the product of the primes in R (so the standard
/// order is maximal), and b has even degree and square leading coefficient.
/// Pairs are tried by increasing max(deg a, deg b), then lexicographically.
pub fn find_algebra(field: &Field, r: &RamSet, bound: usize) -> Result<(Poly, Poly)> {
    let ring = PolyRing::new(field.clone());
    let prod = r.product(&ring);
    search_algebra(field, r.places.len(), bound, |ab, ram| {
        Ok(ring.monic(ab)? == prod && ram == r)
    })
}

/// Like [`find_algebra`], but for the first R (in search order) whose
/// places have the given degrees.
pub fn find_algebra_with_degrees(field: &Field, degrees: &[usize], bound: usize) -> Result<(Poly, Poly)> {
    let mut want = degrees.to_vec();
    want.sort_unstable();
    if want.len() % 2 != 0 {
        return Err(Error::Precondition(format!(
            "a ramification set has even cardinality, got {}",
            want.len()
        )));
    }
    let ring = PolyRing::new(field.clone());
    search_algebra(field, want.len(), bound, |ab, ram| {
        Ok(ram.degrees() == want && ring.monic(ab)? == ram.product(&ring))
    })
}

fn search_algebra(
    field: &Field,
    count: usize,
    bound: usize,
    mut accept: impl FnMut(&Poly, &RamSet) -> Result<bool>,
) -> Result<(Poly, Poly)> {
    if !field.is_odd() {
        return Err(Error::Unsupported("algebra search needs odd q".into()));
    }
    if count == 0 || count % 2 != 0 {
        return Err(Error::Precondition("R must be nonempty of even cardinality".into()));
    }
    let ring = PolyRing::new(field.clone());
    for d in 0..=bound {
        let mut sorted: Vec<Poly> = ring.all_up_to_degree(d).filter(|p| !p.is_zero()).collect();
        sorted.sort();
        for a in &sorted {
            for b in &sorted {
                if a.deg_or_neg().max(b.deg_or_neg()) != d as i64 {
                    continue;
                }
                if b.deg_or_neg() % 2 != 0 || !field.is_square(b.leading()) {
                    continue;
                }
                let ab = ring.mul(a, b);
                let fac = factor(&ring, &ab)?;
                if fac.factors.len() != count || !fac.is_squarefree() {
                    continue;
                }
                let alg = QuatAlgebra::from_polys(field.clone(), a.clone(), b.clone())?;
                match alg.ramified_set() {
                    Ok(s) if accept(&ab, &s)? => return Ok((a.clone(), b.clone())),
                    Ok(_) | Err(Error::RamifiedAtInfinity) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Err(Error::SearchExhausted(bound))
}
