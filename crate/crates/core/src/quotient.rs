//! The splitting embedding D -> M_2(K) for odd q, stabilizers and
//! Gamma-equivalence of tree vertices by lattice linear algebra, and the
//! construction of the quotient graph Gamma \ T.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use crate::bttree::{Mat2, Tree, Vertex};
use crate::error::{Error, Result};
use crate::gfpoly::{nullspace, Fe, Field, Poly};
use crate::laurent::{LaurentRing, LaurentSeries, DEFAULT_PRECISION};
use crate::order::{for_each_combination, vec_to_elem, Elem, StandardOrder};
use crate::quat::QuatAlgebra;
use crate::ring::Ring;

/// Degree-bound slack added to the valuation estimate in [`SplitEmbedding::completeness_bound`].
pub const BOUND_SLACK: usize = 2;

/// One `hom_units` query, kept for auditing negative answers.
#[derive(Clone, Debug, Serialize)]
pub struct HomLog {
    pub source: String,
    pub target: String,
    pub shift: i64,
    pub bound: usize,
    pub precision: usize,
    pub found: usize,
}

/// i -> [[0, 1], [a, 0]], j -> diag(s, -s) with s the canonical root of b.
pub struct SplitEmbedding {
    pub order: StandardOrder,
    pub prec: usize,
    /// Minimal entry valuations of the images of 1, i, j, ij.
    pub image_ords: [i64; 4],
    images: Mutex<HashMap<usize, Arc<[Mat2; 4]>>>,
    log: Mutex<Vec<HomLog>>,
}

impl SplitEmbedding {
    pub fn new(alg: &QuatAlgebra) -> Result<SplitEmbedding> {
        SplitEmbedding::with_precision(alg, DEFAULT_PRECISION)
    }

    pub fn with_precision(alg: &QuatAlgebra, prec: usize) -> Result<SplitEmbedding> {
        if !alg.is_odd() {
            return Err(Error::Unsupported(
                "no splitting embedding over K in characteristic 2: neither F(i) nor F(j) embeds \
                 into K, and the route through F_{q^2}K is not implemented"
                    .into(),
            ));
        }
        let order = StandardOrder::new(alg)?;
        let b = &order.h.b;
        if b.deg_or_neg() % 2 != 0 || !alg.field.is_square(b.leading()) {
            return Err(Error::NotASquare(format!(
                "b = {} has no square root in K (needs even degree and square leading coefficient)",
                b.display(&alg.field)
            )));
        }
        let ram = alg.ramified_set()?;
        if !order.certify_maximal(&ram)? {
            return Err(Error::Precondition(format!(
                "the standard order of {} is not maximal: ab must be a constant times the product of \
                 the ramified primes",
                alg.label()
            )));
        }
        let emb = SplitEmbedding {
            order,
            prec,
            image_ords: [0; 4],
            images: Mutex::new(HashMap::new()),
            log: Mutex::new(Vec::new()),
        };
        let imgs = emb.images_at(prec)?;
        let ords = std::array::from_fn(|k| imgs[k].min_ord());
        let emb = SplitEmbedding { image_ords: ords, ..emb };
        emb.check_relations()?;
        Ok(emb)
    }

    pub fn field(&self) -> &Field {
        self.order.field()
    }

    pub fn tree(&self) -> Tree {
        self.tree_at(self.prec)
    }

    fn tree_at(&self, prec: usize) -> Tree {
        Tree::new(LaurentRing::new(self.field().clone(), prec))
    }

    /// The canonical square root of b at the given precision.
    pub fn sqrt_b(&self, prec: usize) -> Result<LaurentSeries> {
        let k = LaurentRing::new(self.field().clone(), prec);
        k.sqrt(&LaurentSeries::from_poly(&self.order.h.b))
    }

    fn images_at(&self, prec: usize) -> Result<Arc<[Mat2; 4]>> {
        if let Some(m) = self.images.lock().expect("poisoned").get(&prec) {
            return Ok(m.clone());
        }
        let k = LaurentRing::new(self.field().clone(), prec);
        let s = self.sqrt_b(prec)?;
        let a = LaurentSeries::from_poly(&self.order.h.a);
        let one = LaurentSeries::constant(Fe::ONE);
        let zero = LaurentSeries::zero();
        let imgs = Arc::new([
            Mat2::identity(),
            Mat2::new(zero.clone(), one, a.clone(), zero.clone()),
            Mat2::diag(s.clone(), k.neg(&s)),
            Mat2::new(zero.clone(), k.neg(&s), k.mul(&a, &s), zero),
        ]);
        self.images.lock().expect("poisoned").insert(prec, imgs.clone());
        Ok(imgs)
    }

    fn check_relations(&self) -> Result<()> {
        let t = self.tree();
        let imgs = self.images_at(self.prec)?;
        let a = LaurentSeries::from_poly(&self.order.h.a);
        let b = LaurentSeries::from_poly(&self.order.h.b);
        let ok = t.mat_equal(&t.mul(&imgs[1], &imgs[1]), &t.scale(&a, &Mat2::identity()))
            && t.mat_equal(&t.mul(&imgs[2], &imgs[2]), &t.scale(&b, &Mat2::identity()))
            && t.mat_equal(&t.mul(&imgs[1], &imgs[2]), &imgs[3])
            && t.mat_equal(
                &t.mul(&imgs[2], &imgs[1]),
                &t.scale(&LaurentSeries::constant(t.field().neg(Fe::ONE)), &imgs[3]),
            );
        if ok {
            Ok(())
        } else {
            Err(Error::Invariant("embedding images violate the algebra relations".into()))
        }
    }

    /// iota(lambda) at the given precision.
    pub fn image_at(&self, x: &Elem, prec: usize) -> Result<Mat2> {
        let imgs = self.images_at(prec)?;
        let t = self.tree_at(prec);
        let mut acc = Mat2::new(
            LaurentSeries::zero(),
            LaurentSeries::zero(),
            LaurentSeries::zero(),
            LaurentSeries::zero(),
        );
        for k in 0..4 {
            if x.c[k].is_zero() {
                continue;
            }
            let term = t.scale(&LaurentSeries::from_poly(&x.c[k]), &imgs[k]);
            acc = Mat2 { m: std::array::from_fn(|r| std::array::from_fn(|c| t.k.add(&acc.m[r][c], &term.m[r][c]))) };
        }
        Ok(acc)
    }

    pub fn image(&self, x: &Elem) -> Result<Mat2> {
        self.image_at(x, self.prec)
    }

    /// Coordinates (x, y, z, w) in K of a matrix in the image of D tensor K.
    pub fn preimage(&self, m: &Mat2) -> Result<[LaurentSeries; 4]> {
        let k = LaurentRing::new(self.field().clone(), self.prec);
        let f = self.field();
        let half = LaurentSeries::constant(f.inv(f.from_int(2))?);
        let s = self.sqrt_b(self.prec)?;
        let inv2s = k.inv(&k.add(&s, &s))?;
        let a = LaurentSeries::from_poly(&self.order.h.a);
        let e21a = k.div(&m.m[1][0], &a)?;
        Ok([
            k.mul(&half, &k.add(&m.m[0][0], &m.m[1][1])),
            k.mul(&half, &k.add(&m.m[0][1], &e21a)),
            k.mul(&inv2s, &k.sub(&m.m[0][0], &m.m[1][1])),
            k.mul(&inv2s, &k.sub(&e21a, &m.m[0][1])),
        ])
    }

    /// Degree bound beyond which no solution of `hom_units(U, V)` can have
    /// coefficients: entries of iota(lambda) have valuation at least
    /// e0 = m + vmin(V) + vmin(U^{-1}), and the inverse transfer bounds the
    /// degrees of x, y by -e0 and of z, w by -e0 - deg(b)/2.
    pub fn completeness_bound(&self, u: &Mat2, v: &Mat2) -> Result<usize> {
        let t = self.tree();
        let m = self.shift(u, v)?.unwrap_or(0);
        let e0 = m + v.min_ord() + t.inv(u)?.min_ord();
        let half_b = self.order.h.b.deg_or_neg() / 2;
        let dx = (-e0).max(0);
        let dz = (-e0 - half_b).max(0);
        Ok(dx.max(dz) as usize + BOUND_SLACK)
    }

    /// m with ord det U - ord det V = 2m, or `None` when the difference is odd.
    fn shift(&self, u: &Mat2, v: &Mat2) -> Result<Option<i64>> {
        let t = self.tree();
        let du = t.det(u).ord().ok_or_else(|| Error::PrecisionLoss("det U".into()))?;
        let dv = t.det(v).ord().ok_or_else(|| Error::PrecisionLoss("det V".into()))?;
        Ok(((du - dv) % 2 == 0).then_some((du - dv) / 2))
    }

    /// All units lambda of the order with coefficient degrees at most
    /// `bound` such that iota(lambda) maps the lattice of `u` onto u^m times
    /// the lattice of `v`. Retries at doubled precision when needed.
    pub fn hom_units_bounded(&self, u: &Mat2, v: &Mat2, bound: usize, labels: (&str, &str)) -> Result<Vec<Elem>> {
        let Some(m) = self.shift(u, v)? else {
            self.record(labels, 0, bound, self.prec, 0);
            return Ok(Vec::new());
        };
        let mut used = self.prec;
        let res = LaurentRing::with_retry(self.prec, |p| {
            used = p;
            self.hom_units_at(u, v, m, bound, p)
        })?;
        self.record(labels, m, bound, used, res.len());
        Ok(res)
    }

    fn record(&self, labels: (&str, &str), shift: i64, bound: usize, precision: usize, found: usize) {
        self.log.lock().expect("poisoned").push(HomLog {
            source: labels.0.to_string(),
            target: labels.1.to_string(),
            shift,
            bound,
            precision,
            found,
        });
    }

    fn hom_units_at(&self, u: &Mat2, v: &Mat2, m: i64, bound: usize, prec: usize) -> Result<Vec<Elem>> {
        let t = self.tree_at(prec);
        let imgs = self.images_at(prec)?;
        let vinv = t.inv(v)?;
        // P_k = V^{-1} iota(e_k) U; the unknown x_{k,t} T^t contributes u^{-m-t} P_k.
        let p: Vec<Mat2> = (0..4).map(|k| t.mul(&t.mul(&vinv, &imgs[k]), u)).collect();
        let lo = p.iter().map(|x| x.min_ord()).min().unwrap_or(0) - m - bound as i64;
        let n = 4 * (bound + 1);
        let mut rows = Vec::new();
        for r in 0..2 {
            for c in 0..2 {
                for e in lo..0 {
                    let mut row = Vec::with_capacity(n);
                    for pk in &p {
                        for d in 0..=bound as i64 {
                            row.push(pk.m[r][c].coeff(e + m + d)?);
                        }
                    }
                    rows.push(row);
                }
            }
        }
        let basis = nullspace(self.field(), &rows, n);
        if basis.len() > 2 {
            return Err(Error::Invariant(format!(
                "solution space of dimension {} exceeds a quadratic field",
                basis.len()
            )));
        }
        let mut out = Vec::new();
        for_each_combination(self.field(), &basis, u64::MAX, |vec| {
            out.push(vec_to_elem(vec, bound));
            false
        });
        for x in &out {
            if !self.order.is_unit(x) {
                return Err(Error::Invariant("lattice map of nonconstant norm".into()));
            }
        }
        out.sort_by_key(|a| a.sort_key());
        Ok(out)
    }

    /// `hom_units` between two vertices at the completeness bound.
    pub fn hom_units(&self, v: &Vertex, w: &Vertex) -> Result<Vec<Elem>> {
        let t = self.tree();
        let (mv, mw) = (t.matrix(v), t.matrix(w));
        let bound = self.completeness_bound(&mv, &mw)?;
        let f = self.field();
        let (a, b) = (v.display(f).to_string(), w.display(f).to_string());
        self.hom_units_bounded(&mv, &mw, bound, (&a, &b))
    }

    /// Gamma_v, checked to be a group of order q - 1 or q^2 - 1.
    pub fn stabilizer(&self, v: &Vertex) -> Result<StabilizerGroup> {
        let elems = self.hom_units(v, v)?;
        let q = self.field().q() as usize;
        let order = elems.len();
        if order != q - 1 && order != q * q - 1 {
            return Err(Error::StabilizerAnomalousOrder { vertex: v.display(self.field()).to_string(), order });
        }
        let h = &self.order.h;
        for x in &elems {
            for y in &elems {
                if !elems.contains(&h.mul(x, y)) {
                    return Err(Error::Invariant("stabilizer is not closed under products".into()));
                }
            }
        }
        Ok(StabilizerGroup { elements: elems, order })
    }

    /// g . v for a unit g, with precision retries.
    pub fn act(&self, g: &Elem, v: &Vertex) -> Result<Vertex> {
        LaurentRing::with_retry(self.prec, |p| self.tree_at(p).act(&self.image_at(g, p)?, v))
    }

    /// A witness gamma with gamma . v = w, or `None`; the negative answer is
    /// definitive at the completeness bound (see the run log).
    pub fn are_equivalent(&self, v: &Vertex, w: &Vertex) -> Result<Option<Elem>> {
        if v.parity() != w.parity() {
            return Ok(None);
        }
        let found = self.hom_units(v, w)?;
        let Some(g) = found.into_iter().next() else { return Ok(None) };
        if !self.order.is_unit(&g) || self.act(&g, v)? != *w {
            return Err(Error::Invariant("equivalence witness fails verification".into()));
        }
        if self.tree().distance(v, w) % 2 != 0 {
            return Err(Error::Invariant("witness relates vertices at odd distance".into()));
        }
        Ok(Some(g))
    }

    pub fn run_log(&self) -> Vec<HomLog> {
        self.log.lock().expect("poisoned").clone()
    }

    /// A vertex fixed by a torsion unit.
    pub fn fixed_vertex(&self, g: &Elem) -> Result<Vertex> {
        LaurentRing::with_retry(self.prec, |p| self.tree_at(p).fixed_vertex(&self.image_at(g, p)?, &Vertex::base()))
    }
}

#[derive(Clone, Debug)]
pub struct StabilizerGroup {
    pub elements: Vec<Elem>,
    pub order: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct QVertex {
    /// First-discovered tree vertex of the class, printed.
    pub lift: String,
    #[serde(skip)]
    pub lift_vertex: Vertex,
    pub stabilizer_order: usize,
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QEdge {
    pub a: usize,
    pub b: usize,
    pub multiplicity: usize,
    pub stabilizer_order: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientGraph {
    pub q: u64,
    pub vertices: Vec<QVertex>,
    pub edges: Vec<QEdge>,
}

impl QuotientGraph {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Edge count with multiplicity.
    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(|e| e.multiplicity).sum()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| if e.a == v || e.b == v { e.multiplicity } else { 0 })
            .sum()
    }

    pub fn terminal(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.degree(v) == 1).collect()
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(|e| e.a == e.b)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                for (x, y) in [(e.a, e.b), (e.b, e.a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Lift-independent shape: sorted (stabilizer order, degree) pairs and
    /// sorted edge multiplicities with endpoint stabilizer orders.
    pub fn signature(&self) -> (Vec<(usize, usize)>, Vec<(usize, usize, usize)>) {
        let mut vs: Vec<(usize, usize)> = self.vertices.iter().map(|v| (v.stabilizer_order, v.degree)).collect();
        vs.sort_unstable();
        let mut es: Vec<(usize, usize, usize)> = self
            .edges
            .iter()
            .map(|e| {
                let (x, y) = (self.vertices[e.a].stabilizer_order, self.vertices[e.b].stabilizer_order);
                (x.min(y), x.max(y), e.multiplicity)
            })
            .collect();
        es.sort_unstable();
        (vs, es)
    }
}

/// Breadth-first construction of Gamma \ T from `start`. `limit` caps the
/// number of quotient vertices.
pub fn build_quotient(emb: &SplitEmbedding, start: &Vertex, limit: usize) -> Result<QuotientGraph> {
    let tree = emb.tree();
    let q = tree.q() as usize;
    let mut lifts: Vec<Vertex> = vec![start.clone()];
    let mut stabs: Vec<StabilizerGroup> = vec![emb.stabilizer(start)?];
    let mut degrees: Vec<usize> = vec![0];
    // (from, to) -> (orbit count, edge stabilizer order)
    let mut sides: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let v = lifts[i].clone();
        let stab = stabs[i].clone();
        let nbrs = tree.neighbors(&v);
        let mut orbit_of: Vec<Option<usize>> = vec![None; nbrs.len()];
        let mut reps: Vec<usize> = Vec::new();
        for j in 0..nbrs.len() {
            if orbit_of[j].is_some() {
                continue;
            }
            let r = reps.len();
            reps.push(j);
            let mut fixers = 0;
            for g in &stab.elements {
                let img = emb.act(g, &nbrs[j])?;
                let pos = nbrs
                    .iter()
                    .position(|x| *x == img)
                    .ok_or_else(|| Error::Invariant("stabilizer moves a neighbour off the star".into()))?;
                orbit_of[pos] = Some(r);
                if pos == j {
                    fixers += 1;
                }
            }
            if fixers != q - 1 {
                return Err(Error::Invariant(format!("edge stabilizer of order {fixers}, expected {}", q - 1)));
            }
            let size = orbit_of.iter().filter(|o| **o == Some(r)).count();
            if size * fixers != stab.order {
                return Err(Error::Invariant("orbit-stabilizer count mismatch".into()));
            }
        }
        degrees[i] = reps.len();
        if stab.order == q * q - 1 && reps.len() != 1 {
            return Err(Error::Invariant("stabilizer of order q^2-1 is not transitive on neighbours".into()));
        }
        for &j in &reps {
            let w = &nbrs[j];
            let candidates: Vec<usize> = (0..lifts.len()).filter(|&u| lifts[u].parity() == w.parity()).collect();
            let checks: Vec<Result<bool>> =
                candidates.par_iter().map(|&u| Ok(emb.are_equivalent(w, &lifts[u])?.is_some())).collect();
            let mut hit = None;
            for (u, r) in candidates.iter().zip(checks) {
                if r? {
                    hit = Some(*u);
                    break;
                }
            }
            let u = match hit {
                Some(u) if u == i => return Err(Error::Invariant("quotient loop".into())),
                Some(u) => u,
                None => {
                    if lifts.len() >= limit {
                        return Err(Error::NonterminationGuard { limit });
                    }
                    lifts.push(w.clone());
                    stabs.push(emb.stabilizer(w)?);
                    degrees.push(0);
                    queue.push_back(lifts.len() - 1);
                    lifts.len() - 1
                }
            };
            let entry = sides.entry((i, u)).or_insert((0, q - 1));
            entry.0 += 1;
        }
    }
    let mut edges = Vec::new();
    for (&(x, y), &(count, stab)) in &sides {
        let back = sides.get(&(y, x)).map(|e| e.0);
        if back != Some(count) {
            return Err(Error::Invariant(format!("edge multiplicity mismatch between {x} and {y}")));
        }
        if x < y {
            edges.push(QEdge { a: x, b: y, multiplicity: count, stabilizer_order: stab });
        }
    }
    let f = emb.field();
    let vertices = lifts
        .iter()
        .zip(&stabs)
        .zip(&degrees)
        .map(|((l, s), &d)| QVertex {
            lift: l.display(f).to_string(),
            lift_vertex: l.clone(),
            stabilizer_order: s.order,
            degree: d,
        })
        .collect();
    let g = QuotientGraph { q: q as u64, vertices, edges };
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(g)
}

/// Index of the quotient vertex equivalent to `v`.
pub fn locate(emb: &SplitEmbedding, g: &QuotientGraph, v: &Vertex) -> Result<Option<usize>> {
    for (i, qv) in g.vertices.iter().enumerate() {
        if emb.are_equivalent(v, &qv.lift_vertex)?.is_some() {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// The element pi = (2T - 1) + 2 sqrt(r) attached to H(xi, T(T-1)).
pub fn pi_element(emb: &SplitEmbedding) -> Result<LaurentSeries> {
    let f = emb.field();
    let k = LaurentRing::new(f.clone(), emb.prec);
    let two = f.from_int(2);
    let lin = LaurentSeries::from_poly(&Poly::from_coeffs(vec![f.neg(Fe::ONE), two]));
    let s = emb.sqrt_b(emb.prec)?;
    Ok(k.add(&lin, &k.mul(&LaurentSeries::constant(two), &s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfpoly::parse_poly;

    fn emb(q: u32, r: &str) -> SplitEmbedding {
        let f = Field::from_order(q).unwrap();
        let alg = QuatAlgebra::xi_shape(&f, parse_poly(&f, r).unwrap()).unwrap();
        SplitEmbedding::new(&alg).unwrap()
    }

    #[test]
    fn norm_is_determinant() {
        let e = emb(3, "T*(T-1)");
        let t = e.tree();
        let h = &e.order.h;
        let x = h.elem(Poly::t(), Poly::one(), parse_poly(e.field(), "T+2").unwrap(), Poly::constant(Fe(2)));
        let d = t.det(&e.image(&x).unwrap());
        assert!(t.k.equal(&d, &LaurentSeries::from_poly(&h.norm(&x))));
        let back = e.preimage(&e.image(&x).unwrap()).unwrap();
        for k in 0..4 {
            assert!(t.k.equal(&back[k], &LaurentSeries::from_poly(&x.c[k])));
        }
    }

    #[test]
    fn base_stabilizer_of_edge_case() {
        let e = emb(3, "T*(T-1)");
        let s = e.stabilizer(&Vertex::base()).unwrap();
        assert_eq!(s.order, 8);
        assert!(s.elements.contains(&e.order.h.basis(1)));
        assert!(!e.run_log().is_empty());
    }

    #[test]
    fn even_q_is_unsupported() {
        let f = Field::from_order(4).unwrap();
        let alg = QuatAlgebra::xi_shape(&f, parse_poly(&f, "T^4+T").unwrap()).unwrap();
        assert!(matches!(SplitEmbedding::new(&alg), Err(Error::Unsupported(_))));
        let f = Field::from_order(3).unwrap();
        let alg = QuatAlgebra::parse(&f, "H(xi, T)").unwrap();
        assert!(matches!(SplitEmbedding::new(&alg), Err(Error::NotASquare(_))));
    }
}
