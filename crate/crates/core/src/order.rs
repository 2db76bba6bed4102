//! The standard order A<1, i, j, ij>, its discriminant, units, torsion
//! units and a bounded conjugacy search.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gfpoly::{nullspace, Fe, Field, Poly, PolyRing};
use crate::quat::{Quat, QuatAlgebra, QuatElem, QuatJson, RamSet};
use crate::ring::Ring;

pub type Elem = QuatElem<Poly>;

/// Class number of A = F_q[T]. It is 1, so the Eichler count of optimal
/// embeddings needs no class-number factor.
pub const CLASS_NUMBER_A: u64 = 1;

/// The order spanned by 1, i, j, ij over A = F_q[T].
#[derive(Clone, Debug)]
pub struct StandardOrder {
    pub algebra: QuatAlgebra,
    pub h: Quat<PolyRing>,
}

impl StandardOrder {
    pub fn new(algebra: &QuatAlgebra) -> Result<StandardOrder> {
        Ok(StandardOrder { algebra: algebra.clone(), h: algebra.over_poly()? })
    }

    pub fn field(&self) -> &Field {
        &self.h.ring.field
    }

    pub fn ring(&self) -> &PolyRing {
        &self.h.ring
    }

    /// det(Tr(x_i x_j)) for the basis 1, i, j, ij.
    pub fn gram_disc(&self) -> Poly {
        let r = self.ring();
        let basis: Vec<Elem> = (0..4).map(|k| self.h.basis(k)).collect();
        let m: Vec<Vec<Poly>> = basis
            .iter()
            .map(|x| basis.iter().map(|y| self.h.trace(&self.h.mul(x, y))).collect())
            .collect();
        det_poly(r, &m)
    }

    /// True iff gram_disc = c * (prod of primes in R)^2 for a constant c.
    pub fn certify_maximal(&self, ram: &RamSet) -> Result<bool> {
        let r = self.ring();
        let disc = self.gram_disc();
        if disc.is_zero() {
            return Ok(false);
        }
        let p = ram.product(r);
        let target = r.mul(&p, &p);
        Ok(r.monic(&disc)? == target)
    }

    /// Nr(x) is a nonzero constant.
    pub fn is_unit(&self, x: &Elem) -> bool {
        let n = self.h.norm(x);
        !n.is_zero() && n.is_constant()
    }

    /// The shape H(xi, r): returns (xi, r) if a is a constant.
    pub fn xi_shape(&self) -> Result<(Fe, Poly)> {
        let a = &self.h.a;
        if !a.is_constant() || a.is_zero() {
            return Err(Error::Unsupported("torsion search needs the shape H(xi, r) with xi constant".into()));
        }
        let xi = a.coeff(0);
        let f = self.field();
        let ok = if f.is_odd() { !f.is_square(xi) } else { !f.absolute_trace(xi).is_zero() };
        if !ok {
            return Err(Error::Unsupported("xi must be a non-square (odd q) or have trace 1 (even q)".into()));
        }
        Ok((xi, self.h.b.clone()))
    }

    /// Torsion units with reduced characteristic polynomial x^2 - xi (odd q)
    /// or x^2 + x + xi (even q) and all coefficient degrees at most `bound`.
    ///
    /// Scans (c, d) = (z, w) and solves for the remaining coordinate exactly.
    pub fn solve_torsion(&self, bound: usize) -> Result<Vec<TorsionUnit>> {
        let (xi, r) = self.xi_shape()?;
        let ring = self.ring().clone();
        let f = self.field().clone();
        let polys: Vec<Poly> = ring.all_up_to_degree(bound).collect();
        let found: Vec<Elem> = polys
            .par_iter()
            .flat_map_iter(|c| {
                let mut out = Vec::new();
                for d in &polys {
                    if f.is_odd() {
                        // y^2 = 1 - r (c^2 - xi d^2) / xi
                        let inner = ring.sub(&ring.square(c), &ring.scale(&ring.square(d), xi));
                        let rhs = ring.sub(
                            &Poly::one(),
                            &ring.scale(&ring.mul(&r, &inner), f.inv(xi).expect("nonzero")),
                        );
                        if rhs.deg_or_neg() > 2 * bound as i64 {
                            continue;
                        }
                        if let Some(y) = ring.sqrt(&rhs) {
                            for y in [y.clone(), ring.neg(&y)] {
                                out.push(QuatElem::new(Poly::zero(), y, c.clone(), d.clone()));
                            }
                        }
                    } else {
                        // x^2 + x = r (c^2 + cd + xi d^2)
                        let cc = ring.add(&ring.square(c), &ring.mul(c, d));
                        let inner = ring.add(&cc, &ring.scale(&ring.square(d), xi));
                        let rhs = ring.mul(&r, &inner);
                        for x in artin_schreier(&ring, &rhs) {
                            out.push(QuatElem::new(x, Poly::one(), c.clone(), d.clone()));
                        }
                    }
                }
                out
            })
            .collect();
        let mut units: Vec<Elem> = found.into_iter().filter(|e| e.degree() <= bound as i64).collect();
        units.sort_by_key(|a| a.sort_key());
        units.dedup();
        units.into_iter().map(|e| self.torsion_unit(e)).collect()
    }

    /// Wraps a torsion element with its characteristic polynomial and order.
    pub fn torsion_unit(&self, e: Elem) -> Result<TorsionUnit> {
        let (t, n) = self.h.charpoly(&e);
        if !t.is_constant() || !n.is_constant() || n.is_zero() {
            return Err(Error::Invariant("torsion element with non-constant charpoly".into()));
        }
        let (t, n) = (t.coeff(0), n.coeff(0));
        let order = quadratic_order(self.field(), t, n)
            .ok_or_else(|| Error::Invariant("element of infinite order".into()))?;
        Ok(TorsionUnit { element: e, trace: t, norm: n, order })
    }

    /// Looks for a unit gamma with gamma x = y gamma and coefficient degrees
    /// at most `bound`, trying degree bounds 0, 1, ..., `bound` in turn.
    pub fn conj_search(&self, x: &Elem, y: &Elem, bound: usize) -> ConjResult {
        for b in 0..=bound {
            if let Some(g) = self.conj_search_exact(x, y, b) {
                return ConjResult::Witness(g);
            }
        }
        ConjResult::NoneUpToBound(bound)
    }

    fn conj_search_exact(&self, x: &Elem, y: &Elem, b: usize) -> Option<Elem> {
        let basis = self.linear_kernel(b, |g| self.h.sub(&self.h.mul(g, x), &self.h.mul(y, g)));
        let mut found = None;
        for_each_combination(self.field(), &basis, ENUMERATION_CAP, |v| {
            let g = vec_to_elem(v, b);
            if self.is_unit(&g) {
                found = Some(g);
                true
            } else {
                false
            }
        });
        found
    }

    /// Basis of the F_q-space of elements of degree <= b annihilated by the
    /// A-linear map `f`, as coefficient vectors.
    fn linear_kernel(&self, b: usize, f: impl Fn(&Elem) -> Elem) -> Vec<Vec<Fe>> {
        let n = 4 * (b + 1);
        let cols: Vec<Elem> = (0..n).map(|idx| f(&unit_vector(idx, b))).collect();
        let maxdeg = cols.iter().map(|e| e.degree()).max().unwrap_or(-1).max(0) as usize;
        let mut rows = Vec::new();
        for k in 0..4 {
            for t in 0..=maxdeg {
                rows.push(cols.iter().map(|e| e.c[k].coeff(t)).collect::<Vec<Fe>>());
            }
        }
        nullspace(self.field(), &rows, n)
    }

    /// Groups torsion units with the designated characteristic polynomial
    /// into Gamma-conjugacy classes, using [`StandardOrder::conj_search`] up
    /// to `conj_bound`, and pairs each class with the class of its conjugate.
    pub fn torsion_classes(&self, units: &[TorsionUnit], conj_bound: usize) -> Result<Vec<TorsionClass>> {
        let mut classes: Vec<TorsionClass> = Vec::new();
        for u in units {
            let hit = classes.iter().position(|cl| {
                matches!(self.conj_search(&cl.rep.element, &u.element, conj_bound), ConjResult::Witness(_))
            });
            match hit {
                Some(k) => classes[k].size += 1,
                None => classes.push(TorsionClass { rep: u.clone(), size: 1, partner: usize::MAX }),
            }
        }
        // lambda and its conjugate generate the same subgroup F_q(lambda)^x
        for k in 0..classes.len() {
            let bar = self.h.conj(&classes[k].rep.element);
            let partner = classes.iter().position(|cl| {
                matches!(self.conj_search(&cl.rep.element, &bar, conj_bound), ConjResult::Witness(_))
            });
            match partner {
                Some(p) if p != k => classes[k].partner = p,
                _ => {
                    return Err(Error::Invariant(
                        "a torsion class is not paired with a distinct conjugate class".into(),
                    ))
                }
            }
        }
        Ok(classes)
    }
}

/// Enumeration cap for the F_q-span search inside the conjugacy test.
pub const ENUMERATION_CAP: u64 = 1 << 22;

fn unit_vector(idx: usize, b: usize) -> Elem {
    let (k, t) = (idx / (b + 1), idx % (b + 1));
    let mut c: [Poly; 4] = std::array::from_fn(|_| Poly::zero());
    c[k] = Poly::monomial(Fe::ONE, t);
    QuatElem { c }
}

pub(crate) fn vec_to_elem(v: &[Fe], b: usize) -> Elem {
    QuatElem { c: std::array::from_fn(|k| Poly::from_coeffs(v[k * (b + 1)..(k + 1) * (b + 1)].to_vec())) }
}

/// Calls `f` on every nonzero F_q-combination of `basis` in a fixed order,
/// stopping early when `f` returns true or after `cap` combinations.
pub(crate) fn for_each_combination(
    field: &Field,
    basis: &[Vec<Fe>],
    cap: u64,
    mut f: impl FnMut(&[Fe]) -> bool,
) {
    if basis.is_empty() {
        return;
    }
    let q = field.q() as u64;
    let n = basis[0].len();
    let total = (q as u128).saturating_pow(basis.len() as u32).min(cap as u128 + 1) as u64;
    let mut digits = vec![0u32; basis.len()];
    for _ in 1..total {
        // increment the counter
        for d in digits.iter_mut() {
            *d += 1;
            if *d < q as u32 {
                break;
            }
            *d = 0;
        }
        let mut v = vec![Fe::ZERO; n];
        for (d, row) in digits.iter().zip(basis) {
            if *d == 0 {
                continue;
            }
            let s = field.elem(*d);
            for (x, &r) in v.iter_mut().zip(row) {
                *x = field.add(*x, field.mul(s, r));
            }
        }
        if f(&v) {
            return;
        }
    }
}

/// All polynomial solutions of x^2 + x = rhs in characteristic 2.
pub fn artin_schreier(ring: &PolyRing, rhs: &Poly) -> Vec<Poly> {
    let f = &ring.field;
    let mut rem = rhs.clone();
    let mut x = Poly::zero();
    while let Some(d) = rem.degree().finite().filter(|&d| d >= 1) {
        if d % 2 == 1 {
            return Vec::new();
        }
        let s = f.sqrt(rem.leading()).expect("every element is a square in characteristic 2");
        let t = Poly::monomial(s, d / 2);
        x = ring.add(&x, &t);
        rem = ring.sub(&rem, &ring.add(&ring.square(&t), &t));
    }
    let c = rem.coeff(0);
    let mut out = Vec::new();
    for a in f.elements() {
        if f.add(f.mul(a, a), a) == c {
            out.push(ring.add(&x, &Poly::constant(a)));
        }
    }
    out
}

/// Multiplicative order of a root of x^2 - t x + n in the quadratic
/// F_q-algebra, by iterating the recurrence; `None` if not a unit.
pub fn quadratic_order(field: &Field, t: Fe, n: Fe) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let q = field.q() as u64;
    // theta^k = alpha theta + beta
    let (mut alpha, mut beta) = (Fe::ONE, Fe::ZERO);
    for k in 1..=(q * q) {
        if alpha.is_zero() && beta == Fe::ONE {
            return Some(k);
        }
        // theta^{k+1} = alpha theta^2 + beta theta = (alpha t + beta) theta - alpha n
        let na = field.add(field.mul(alpha, t), beta);
        let nb = field.neg(field.mul(alpha, n));
        alpha = na;
        beta = nb;
    }
    None
}

fn det_poly(r: &PolyRing, m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Poly::zero();
    for col in 0..n {
        if m[0][col].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = r.mul(&m[0][col], &det_poly(r, &minor));
        acc = if col % 2 == 0 { r.add(&acc, &term) } else { r.sub(&acc, &term) };
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionUnit {
    pub element: Elem,
    pub trace: Fe,
    pub norm: Fe,
    pub order: u64,
}

impl TorsionUnit {
    pub fn to_json(&self, field: &Field) -> TorsionJson {
        TorsionJson {
            element: QuatJson::new(field, &self.element),
            trace: field.fmt_elem(self.trace),
            norm: field.fmt_elem(self.norm),
            order: self.order,
        }
    }
}

#[derive(Serialize)]
pub struct TorsionJson {
    pub element: QuatJson,
    pub trace: String,
    pub norm: String,
    pub order: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConjResult {
    Witness(Elem),
    /// No unit conjugates the pair within this degree bound.
    NoneUpToBound(usize),
}

#[derive(Clone, Debug)]
pub struct TorsionClass {
    pub rep: TorsionUnit,
    /// Number of solutions found in this class.
    pub size: usize,
    /// Index of the class containing the conjugate of `rep`.
    pub partner: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfpoly::parse_poly;

    fn order(q: u32, r: &str) -> StandardOrder {
        let f = Field::from_order(q).unwrap();
        let alg = QuatAlgebra::xi_shape(&f, parse_poly(&f, r).unwrap()).unwrap();
        StandardOrder::new(&alg).unwrap()
    }

    #[test]
    fn discriminant_closed_forms() {
        let o = order(3, "T*(T-1)");
        let r = o.ring();
        let rr = parse_poly(o.field(), "T*(T-1)").unwrap();
        let xi = o.field().choose_xi();
        let expected = r.scale(&r.square(&rr), o.field().mul(o.field().from_int(-16), o.field().mul(xi, xi)));
        assert_eq!(o.gram_disc(), expected);
        let o = order(2, "T*(T+1)");
        let rr = parse_poly(o.field(), "T*(T+1)").unwrap();
        assert_eq!(o.gram_disc(), o.ring().square(&rr));
    }

    #[test]
    fn maximality() {
        let o = order(3, "T*(T-1)");
        assert!(o.certify_maximal(&o.algebra.ramified_set().unwrap()).unwrap());
        let f = Field::from_order(3).unwrap();
        let alg = QuatAlgebra::parse(&f, "H(T, T^2+T+2)").unwrap();
        let o = StandardOrder::new(&alg).unwrap();
        assert!(o.certify_maximal(&alg.ramified_set().unwrap()).unwrap());
        let o = order(3, "T^2");
        let ram = RamSet::new(Vec::new()).unwrap();
        assert!(!o.certify_maximal(&ram).unwrap());
    }

    #[test]
    fn units() {
        let o = order(3, "T*(T-1)");
        assert!(o.is_unit(&o.h.one()));
        assert!(o.is_unit(&o.h.basis(1)));
        assert!(!o.is_unit(&o.h.basis(2)));
    }

    #[test]
    fn artin_schreier_solutions() {
        let f = Field::from_order(4).unwrap();
        let ring = PolyRing::new(f.clone());
        let rhs = parse_poly(&f, "T^4+T").unwrap();
        let sols = artin_schreier(&ring, &rhs);
        assert_eq!(sols.len(), 2);
        for x in &sols {
            assert_eq!(ring.add(&ring.square(x), x), rhs);
        }
        assert!(artin_schreier(&ring, &parse_poly(&f, "T^3").unwrap()).is_empty());
    }

    #[test]
    fn orders_of_quadratic_elements() {
        let f = Field::from_order(3).unwrap();
        // x^2 - 2 = x^2 + 1: root of order 4
        assert_eq!(quadratic_order(&f, Fe::ZERO, Fe::ONE), Some(4));
        // x^2 - x - 1 over F_3 generates F_9^x
        let t = Fe::ONE;
        let n = f.neg(Fe::ONE);
        assert_eq!(quadratic_order(&f, t, n), Some(8));
    }

    #[test]
    fn conjugacy_trivial_and_negative() {
        let o = order(3, "T*(T-1)");
        let i = o.h.basis(1);
        assert!(matches!(o.conj_search(&i, &i, 2), ConjResult::Witness(_)));
        let mi = o.h.neg(&i);
        assert_eq!(o.conj_search(&i, &mi, 4), ConjResult::NoneUpToBound(4));
    }
}
