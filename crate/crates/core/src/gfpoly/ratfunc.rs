use std::fmt;

use super::field::{Fe, Field};
use super::poly::{Poly, PolyRing};
use crate::error::{Error, Result};
use crate::ring::Ring;

/// An element of F = F_q(T): `num / den` with gcd 1 and `den` monic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn from_poly(p: Poly) -> RatFunc {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The polynomial value, if the denominator is trivial.
    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_polynomial().then_some(&self.num)
    }

    /// ord at infinity: deg(den) - deg(num).
    pub fn ord_inf(&self) -> Option<i64> {
        if self.num.is_zero() {
            None
        } else {
            Some(self.den.deg_or_neg() - self.num.deg_or_neg())
        }
    }

    pub fn display<'a>(&'a self, field: &'a Field) -> RatFuncDisplay<'a> {
        RatFuncDisplay { r: self, field }
    }
}

pub struct RatFuncDisplay<'a> {
    r: &'a RatFunc,
    field: &'a Field,
}

impl fmt::Display for RatFuncDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r.den.is_one() {
            write!(f, "{}", self.r.num.display(self.field))
        } else {
            write!(
                f,
                "({})/({})",
                self.r.num.display(self.field),
                self.r.den.display(self.field)
            )
        }
    }
}

/// The rational function field F = F_q(T).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFuncField {
    pub ring: PolyRing,
}

impl RatFuncField {
    pub fn new(field: Field) -> RatFuncField {
        RatFuncField { ring: PolyRing::new(field) }
    }

    pub fn field(&self) -> &Field {
        &self.ring.field
    }

    /// Builds `num/den` in lowest terms.
    pub fn make(&self, num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc { num, den: Poly::one() });
        }
        let g = self.ring.gcd(&num, &den);
        let mut n = self.ring.div_exact(&num, &g)?;
        let mut d = self.ring.div_exact(&den, &g)?;
        let lc = self.field().inv(d.leading())?;
        n = self.ring.scale(&n, lc);
        d = self.ring.scale(&d, lc);
        Ok(RatFunc { num: n, den: d })
    }

    pub fn inv(&self, a: &RatFunc) -> Result<RatFunc> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.make(a.den.clone(), a.num.clone())
    }

    pub fn div(&self, a: &RatFunc, b: &RatFunc) -> Result<RatFunc> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &RatFunc, n: i64) -> Result<RatFunc> {
        let base = if n < 0 { self.inv(a)? } else { a.clone() };
        let k = n.unsigned_abs();
        Ok(RatFunc {
            num: self.ring.pow(&base.num, k),
            den: self.ring.pow(&base.den, k),
        })
    }

    /// Valuation at a finite place given by a monic irreducible polynomial.
    pub fn valuation(&self, a: &RatFunc, p: &Poly) -> Option<i64> {
        let vn = self.ring.valuation(&a.num, p)? as i64;
        let vd = self.ring.valuation(&a.den, p).expect("nonzero den") as i64;
        Some(vn - vd)
    }
}

impl Ring for RatFuncField {
    type Elem = RatFunc;

    fn zero(&self) -> RatFunc {
        RatFunc::from_poly(Poly::zero())
    }

    fn one(&self) -> RatFunc {
        RatFunc::from_poly(Poly::one())
    }

    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        if a.den == b.den {
            return self
                .make(self.ring.add(&a.num, &b.num), a.den.clone())
                .expect("nonzero den");
        }
        let n = self.ring.add(
            &self.ring.mul(&a.num, &b.den),
            &self.ring.mul(&b.num, &a.den),
        );
        self.make(n, self.ring.mul(&a.den, &b.den)).expect("nonzero den")
    }

    fn sub(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        self.add(a, &self.neg(b))
    }

    fn neg(&self, a: &RatFunc) -> RatFunc {
        RatFunc { num: self.ring.neg(&a.num), den: a.den.clone() }
    }

    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        self.make(self.ring.mul(&a.num, &b.num), self.ring.mul(&a.den, &b.den))
            .expect("nonzero den")
    }

    fn is_zero(&self, a: &RatFunc) -> bool {
        a.is_zero()
    }

    fn equal(&self, a: &RatFunc, b: &RatFunc) -> bool {
        a == b
    }

    fn constant(&self, c: Fe) -> RatFunc {
        RatFunc::from_poly(Poly::constant(c))
    }

    fn from_int(&self, n: i64) -> RatFunc {
        self.constant(self.field().from_int(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms() {
        let k = RatFuncField::new(Field::new(3, 1).unwrap());
        let r = &k.ring;
        let t = Poly::t();
        let t1 = r.sub(&t, &Poly::one());
        let num = r.mul(&t, &t1);
        let den = r.scale(&r.mul(&t1, &t1), Fe(2));
        let x = k.make(num, den).unwrap();
        assert_eq!(x.num(), &r.scale(&t, Fe(2)));
        assert_eq!(x.den(), &t1);
        assert_eq!(x.ord_inf(), Some(0));
        assert!(k.make(Poly::one(), Poly::zero()).is_err());
    }

    #[test]
    fn field_ops() {
        let k = RatFuncField::new(Field::new(5, 1).unwrap());
        let t = RatFunc::from_poly(Poly::t());
        let one = k.one();
        let a = k.div(&one, &k.sub(&t, &one)).unwrap();
        let back = k.mul(&a, &k.sub(&t, &one));
        assert_eq!(back, one);
        assert_eq!(k.pow(&t, -2).unwrap().ord_inf(), Some(2));
    }
}
