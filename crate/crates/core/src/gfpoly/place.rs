use std::cmp::Ordering;

use super::factor::is_irreducible;
use super::field::{Fe, Field};
use super::poly::{Poly, PolyRing};
use super::ratfunc::{RatFunc, RatFuncField};
use crate::error::{Error, Result};
use crate::ring::Ring;

/// A place of F_q(T): a finite place (monic irreducible polynomial) or the
/// place at infinity with uniformizer 1/T.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Finite(Poly),
    Infinity,
}

impl Place {
    /// Builds a finite place, checking that `p` is monic irreducible.
    pub fn finite(ring: &PolyRing, p: Poly) -> Result<Place> {
        if !p.is_monic() || !is_irreducible(ring, &p)? {
            return Err(Error::Precondition(format!(
                "{} is not monic irreducible",
                p.display(&ring.field)
            )));
        }
        Ok(Place::Finite(p))
    }

    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(p) => p.degree().finite().expect("nonzero"),
            Place::Infinity => 1,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinity)
    }

    pub fn poly(&self) -> Option<&Poly> {
        match self {
            Place::Finite(p) => Some(p),
            Place::Infinity => None,
        }
    }

    /// Size q_x of the residue field.
    pub fn residue_size(&self, q: u64) -> u64 {
        q.pow(self.degree() as u32)
    }

    pub fn label(&self, field: &Field) -> String {
        match self {
            Place::Finite(p) => p.display(field).to_string(),
            Place::Infinity => "inf".into(),
        }
    }

    /// Valuation of a rational function at this place.
    pub fn ord(&self, k: &RatFuncField, a: &RatFunc) -> Option<i64> {
        match self {
            Place::Finite(p) => k.valuation(a, p),
            Place::Infinity => a.ord_inf(),
        }
    }
}

/// Finite places first (by polynomial order), infinity last.
impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Place::Finite(a), Place::Finite(b)) => a.cmp(b),
            (Place::Finite(_), Place::Infinity) => Ordering::Less,
            (Place::Infinity, Place::Finite(_)) => Ordering::Greater,
            (Place::Infinity, Place::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Quadratic character of `g` modulo the irreducible `f`: +1, -1, or 0 when
/// `f | g`. Odd characteristic only.
pub fn sqr_test_residue(ring: &PolyRing, f: &Poly, g: &Poly) -> Result<i8> {
    let field = &ring.field;
    if !field.is_odd() {
        return Err(Error::Unsupported(
            "quadratic residue test needs odd q; use the trace criterion in characteristic 2".into(),
        ));
    }
    let d = f
        .degree()
        .finite()
        .filter(|&d| d > 0)
        .ok_or(Error::ZeroPolynomial)?;
    let r = ring.rem(g, f)?;
    if r.is_zero() {
        return Ok(0);
    }
    let exp = ((field.q() as u64).pow(d as u32) - 1) / 2;
    let v = ring.pow_mod(&r, exp, f)?;
    if v.is_one() {
        Ok(1)
    } else if v == Poly::constant(field.neg(Fe::ONE)) {
        Ok(-1)
    } else {
        Err(Error::Precondition(format!(
            "{} is not irreducible",
            f.display(field)
        )))
    }
}

/// The substitution T -> (xT + y)/(zT + w), acting on points of P^1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mobius {
    pub x: Fe,
    pub y: Fe,
    pub z: Fe,
    pub w: Fe,
}

impl Mobius {
    pub fn identity() -> Mobius {
        Mobius { x: Fe::ONE, y: Fe::ZERO, z: Fe::ZERO, w: Fe::ONE }
    }

    /// The affine map fixing infinity that sends the rational places
    /// `x1 = T - c` and `x2 = T - d` to 0 and 1: T -> (T - c)/(d - c).
    pub fn two_points(field: &Field, x1: &Place, x2: &Place) -> Result<Mobius> {
        let root = |pl: &Place| -> Result<Fe> {
            match pl {
                Place::Finite(p) if p.degree().finite() == Some(1) && p.is_monic() => {
                    Ok(field.neg(p.coeff(0)))
                }
                _ => Err(Error::Precondition("places must be finite of degree 1".into())),
            }
        };
        let c = root(x1)?;
        let d = root(x2)?;
        if c == d {
            return Err(Error::Precondition("places must be distinct".into()));
        }
        let s = field.inv(field.sub(d, c))?;
        Ok(Mobius { x: s, y: field.neg(field.mul(s, c)), z: Fe::ZERO, w: Fe::ONE })
    }

    pub fn fixes_infinity(&self) -> bool {
        self.z.is_zero()
    }

    pub fn det(&self, field: &Field) -> Fe {
        field.sub(field.mul(self.x, self.w), field.mul(self.y, self.z))
    }

    pub fn inverse(&self, field: &Field) -> Result<Mobius> {
        if self.det(field).is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Mobius {
            x: self.w,
            y: field.neg(self.y),
            z: field.neg(self.z),
            w: self.x,
        })
    }

    /// `self ∘ other` as point maps.
    pub fn compose(&self, field: &Field, other: &Mobius) -> Mobius {
        let m = |a, b| field.mul(a, b);
        Mobius {
            x: field.add(m(self.x, other.x), m(self.y, other.z)),
            y: field.add(m(self.x, other.y), m(self.y, other.w)),
            z: field.add(m(self.z, other.x), m(self.w, other.z)),
            w: field.add(m(self.z, other.y), m(self.w, other.w)),
        }
    }

    /// Projective equality (matrices up to a nonzero scalar).
    pub fn same_map(&self, field: &Field, other: &Mobius) -> bool {
        let a = [self.x, self.y, self.z, self.w];
        let b = [other.x, other.y, other.z, other.w];
        (0..4).all(|i| (0..4).all(|j| field.mul(a[i], b[j]) == field.mul(a[j], b[i])))
    }

    /// Image of a rational point; `None` stands for infinity.
    pub fn map_point(&self, field: &Field, t: Option<Fe>) -> Option<Fe> {
        match t {
            None => (!self.z.is_zero()).then(|| field.div(self.x, self.z).expect("nonzero")),
            Some(t) => {
                let num = field.add(field.mul(self.x, t), self.y);
                let den = field.add(field.mul(self.z, t), self.w);
                (!den.is_zero()).then(|| field.div(num, den).expect("nonzero"))
            }
        }
    }

    /// Literal substitution `r((xT + y)/(zT + w))`.
    pub fn substitute(&self, k: &RatFuncField, r: &RatFunc) -> Result<RatFunc> {
        let ring = &k.ring;
        let lin_num = Poly::from_coeffs(vec![self.y, self.x]);
        let lin_den = Poly::from_coeffs(vec![self.w, self.z]);
        let homog = |p: &Poly, n: usize| -> Poly {
            let mut acc = Poly::zero();
            for (i, &c) in p.coeffs().iter().enumerate() {
                let term = ring.mul(&ring.pow(&lin_num, i as u64), &ring.pow(&lin_den, (n - i) as u64));
                acc = ring.add(&acc, &ring.scale(&term, c));
            }
            acc
        };
        let dn = r.num().deg_or_neg().max(0) as usize;
        let dd = r.den().deg_or_neg().max(0) as usize;
        let n = dn.max(dd);
        k.make(homog(r.num(), n), homog(r.den(), n))
    }

    /// Transports a function along the point map: the result vanishes at
    /// `self(t)` exactly where `r` vanishes at `t`. Equals substitution of
    /// the inverse map.
    pub fn push_forward(&self, k: &RatFuncField, r: &RatFunc) -> Result<RatFunc> {
        self.inverse(k.field())?.substitute(k, r)
    }
}
