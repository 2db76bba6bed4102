//! The Bruhat-Tits tree of PGL_2(K), K = F_q((1/T)), with u = 1/T.
//!
//! A vertex is the homothety class of the O-lattice spanned by the columns
//! of a matrix in GL_2(K). Every class has a unique representative
//! `[[u^n, c], [0, 1]]` with `c` a finite u-expansion involving only
//! exponents below `n`; that pair `(n, c)` is the [`Vertex`]. Matrices act
//! on the left.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::gfpoly::{Fe, Field};
use crate::laurent::{LaurentRing, LaurentSeries};
use crate::ring::Ring;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub n: i64,
    /// Exact series whose exponents are all `< n`.
    pub c: LaurentSeries,
}

impl Vertex {
    pub fn base() -> Vertex {
        Vertex { n: 0, c: LaurentSeries::zero() }
    }

    /// Vertex type: the parity of ord det of any representative.
    pub fn parity(&self) -> i64 {
        self.n.rem_euclid(2)
    }

    pub fn display<'a>(&'a self, field: &'a Field) -> VertexDisplay<'a> {
        VertexDisplay { v: self, field }
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {:?})", self.n, self.c)
    }
}

pub struct VertexDisplay<'a> {
    v: &'a Vertex,
    field: &'a Field,
}

/// Prints as `(n; u-expansion)`.
impl fmt::Display for VertexDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {})", self.v.n, self.v.c.display(self.field))
    }
}

/// A 2x2 matrix over K, entries indexed `m[row][col]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat2 {
    pub m: [[LaurentSeries; 2]; 2],
}

impl Mat2 {
    pub fn new(a: LaurentSeries, b: LaurentSeries, c: LaurentSeries, d: LaurentSeries) -> Mat2 {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Mat2 {
        Mat2::diag(LaurentSeries::constant(Fe::ONE), LaurentSeries::constant(Fe::ONE))
    }

    pub fn diag(a: LaurentSeries, d: LaurentSeries) -> Mat2 {
        Mat2::new(a, LaurentSeries::zero(), LaurentSeries::zero(), d)
    }

    /// Minimum valuation over the entries (zero entries ignored).
    pub fn min_ord(&self) -> i64 {
        self.m.iter().flatten().map(|x| x.ord_lower_bound()).min().unwrap_or(i64::MAX)
    }
}

/// Arithmetic in GL_2(K) and the tree structure.
#[derive(Clone, Debug)]
pub struct Tree {
    pub k: LaurentRing,
}

impl Tree {
    pub fn new(k: LaurentRing) -> Tree {
        Tree { k }
    }

    pub fn field(&self) -> &Field {
        &self.k.field
    }

    pub fn q(&self) -> u64 {
        self.k.field.q() as u64
    }

    pub fn mul(&self, x: &Mat2, y: &Mat2) -> Mat2 {
        let k = &self.k;
        let e = |r: usize, c: usize| k.add(&k.mul(&x.m[r][0], &y.m[0][c]), &k.mul(&x.m[r][1], &y.m[1][c]));
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn det(&self, x: &Mat2) -> LaurentSeries {
        let k = &self.k;
        k.sub(&k.mul(&x.m[0][0], &x.m[1][1]), &k.mul(&x.m[0][1], &x.m[1][0]))
    }

    pub fn inv(&self, x: &Mat2) -> Result<Mat2> {
        let k = &self.k;
        let di = k.inv(&self.det(x))?;
        Ok(Mat2::new(
            k.mul(&x.m[1][1], &di),
            k.neg(&k.mul(&x.m[0][1], &di)),
            k.neg(&k.mul(&x.m[1][0], &di)),
            k.mul(&x.m[0][0], &di),
        ))
    }

    pub fn scale(&self, s: &LaurentSeries, x: &Mat2) -> Mat2 {
        let k = &self.k;
        Mat2 { m: [[k.mul(s, &x.m[0][0]), k.mul(s, &x.m[0][1])], [k.mul(s, &x.m[1][0]), k.mul(s, &x.m[1][1])]] }
    }

    pub fn pow(&self, x: &Mat2, mut n: u64) -> Mat2 {
        let mut acc = Mat2::identity();
        let mut base = x.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// Entrywise equality on the known terms.
    pub fn mat_equal(&self, x: &Mat2, y: &Mat2) -> bool {
        (0..2).all(|r| (0..2).all(|c| self.k.equal(&x.m[r][c], &y.m[r][c])))
    }

    /// The representative matrix `[[u^n, c], [0, 1]]`.
    pub fn matrix(&self, v: &Vertex) -> Mat2 {
        Mat2::new(
            LaurentSeries::monomial(Fe::ONE, v.n),
            v.c.clone(),
            LaurentSeries::zero(),
            LaurentSeries::constant(Fe::ONE),
        )
    }

    /// Exact inverse of the representative matrix.
    pub fn matrix_inv(&self, v: &Vertex) -> Mat2 {
        let k = &self.k;
        let un = LaurentSeries::monomial(Fe::ONE, -v.n);
        Mat2::new(
            un.clone(),
            k.neg(&k.mul(&v.c, &un)),
            LaurentSeries::zero(),
            LaurentSeries::constant(Fe::ONE),
        )
    }

    /// The vertex of the lattice spanned by the columns of `g`: column
    /// reduction with the minimal-valuation bottom entry as pivot (ties go
    /// to the first column).
    pub fn canonical_form(&self, g: &Mat2) -> Result<Vertex> {
        let det = self.det(g);
        let od = det
            .ord()
            .ok_or_else(|| Error::PrecisionLoss("determinant is zero to precision".into()))?;
        let (g0, g1) = (&g.m[1][0], &g.m[1][1]);
        let p = match (g0.ord(), g1.ord()) {
            (Some(a), Some(b)) => usize::from(b < a),
            (Some(a), None) if a <= g1.ord_lower_bound() => 0,
            (None, Some(b)) if b <= g0.ord_lower_bound() => 1,
            _ => return Err(Error::PrecisionLoss("bottom row pivot undetermined".into())),
        };
        let piv = &g.m[1][p];
        let n = od - 2 * piv.ord().expect("pivot is nonzero");
        let ratio = self.k.div(&g.m[0][p], piv)?;
        Ok(Vertex { n, c: reduce_mod(&ratio, n)? })
    }

    /// The action g . v.
    pub fn act(&self, g: &Mat2, v: &Vertex) -> Result<Vertex> {
        self.canonical_form(&self.mul(g, &self.matrix(v)))
    }

    /// The q + 1 neighbours: first the one at level n - 1, then level n + 1
    /// in the enumeration order of the new digit.
    pub fn neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(self.q() as usize + 1);
        out.push(Vertex { n: v.n - 1, c: reduce_mod(&v.c, v.n - 1).expect("exact") });
        for t in self.field().elements() {
            let c = self.k.add(&v.c, &LaurentSeries::monomial(t, v.n));
            out.push(Vertex { n: v.n + 1, c });
        }
        out
    }

    /// Tree distance, from the invariant factors of M_v^{-1} M_w:
    /// ord det - 2 * (minimal entry valuation).
    pub fn distance(&self, v: &Vertex, w: &Vertex) -> i64 {
        let diff = self.k.sub(&w.c, &v.c);
        let mut m = (w.n - v.n).min(0);
        if let Some(o) = diff.ord() {
            m = m.min(o - v.n);
        }
        (w.n - v.n) - 2 * m
    }

    /// All vertices within `radius` of `center`, in BFS order.
    pub fn ball(&self, center: &Vertex, radius: usize) -> Vec<Vertex> {
        let mut seen: HashMap<Vertex, usize> = HashMap::new();
        let mut order = vec![center.clone()];
        seen.insert(center.clone(), 0);
        let mut queue = VecDeque::from([center.clone()]);
        while let Some(v) = queue.pop_front() {
            let d = seen[&v];
            if d == radius {
                continue;
            }
            for w in self.neighbors(&v) {
                if !seen.contains_key(&w) {
                    seen.insert(w.clone(), d + 1);
                    order.push(w.clone());
                    queue.push_back(w);
                }
            }
        }
        order
    }

    /// The vertex at distance `steps` from `v` on the geodesic to `w`.
    pub fn walk_toward(&self, v: &Vertex, w: &Vertex, steps: usize) -> Vertex {
        let mut cur = v.clone();
        for _ in 0..steps {
            let d = self.distance(&cur, w);
            if d == 0 {
                break;
            }
            cur = self
                .neighbors(&cur)
                .into_iter()
                .find(|x| self.distance(x, w) == d - 1)
                .expect("some neighbour is closer");
        }
        cur
    }

    /// A vertex fixed by the elliptic element `g`: the midpoint of the
    /// geodesic from `v` to `g v`.
    pub fn fixed_vertex(&self, g: &Mat2, v: &Vertex) -> Result<Vertex> {
        let gv = self.act(g, v)?;
        let d = self.distance(v, &gv);
        if d % 2 != 0 {
            return Err(Error::Precondition("element inverts an edge".into()));
        }
        let mid = self.walk_toward(v, &gv, (d / 2) as usize);
        if self.act(g, &mid)? != mid {
            return Err(Error::Precondition("element is not elliptic".into()));
        }
        Ok(mid)
    }
}

/// The exact series of the terms of `x` with exponent below `n`.
fn reduce_mod(x: &LaurentSeries, n: i64) -> Result<LaurentSeries> {
    if x.is_zero() && x.abs_prec().is_some_and(|a| a < n) {
        return Err(Error::PrecisionLoss(format!("translation needs terms below u^{n}")));
    }
    match x.ord() {
        Some(v) if v < n => {
            let coeffs = (v..n).map(|e| x.coeff(e)).collect::<Result<Vec<Fe>>>()?;
            Ok(LaurentSeries::from_coeffs(v, coeffs, None))
        }
        _ => Ok(LaurentSeries::zero()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::DEFAULT_PRECISION;

    fn tree(q: u32) -> Tree {
        Tree::new(LaurentRing::new(Field::from_order(q).unwrap(), DEFAULT_PRECISION))
    }

    #[test]
    fn basic_vertices() {
        let t = tree(3);
        assert_eq!(t.canonical_form(&Mat2::identity()).unwrap(), Vertex::base());
        let d = Mat2::diag(LaurentSeries::monomial(Fe::ONE, 1), LaurentSeries::constant(Fe::ONE));
        let v = t.canonical_form(&d).unwrap();
        assert_eq!(v, Vertex { n: 1, c: LaurentSeries::zero() });
        assert_eq!(t.distance(&Vertex::base(), &v), 1);
        assert_eq!(t.act(&Mat2::identity(), &v).unwrap(), v);
        assert_eq!(v.display(t.field()).to_string(), "(1; 0)");
    }

    #[test]
    fn neighbors_are_distinct_and_symmetric() {
        let t = tree(3);
        let b = Vertex::base();
        let ns = t.neighbors(&b);
        assert_eq!(ns.len(), 4);
        for w in &ns {
            assert_eq!(t.distance(&b, w), 1);
            assert!(t.neighbors(w).contains(&b));
        }
        let ball = t.ball(&b, 3);
        assert_eq!(ball.len(), 1 + 4 + 12 + 36);
    }

    #[test]
    fn matrix_round_trip() {
        let t = tree(5);
        for v in t.ball(&Vertex::base(), 3) {
            assert_eq!(t.canonical_form(&t.matrix(&v)).unwrap(), v);
            let id = t.mul(&t.matrix(&v), &t.matrix_inv(&v));
            assert!(t.mat_equal(&id, &Mat2::identity()));
        }
    }
}
