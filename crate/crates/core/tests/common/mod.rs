//! Helpers and independent oracles shared by the integration tests and the
//! acceptance suite.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use rand::Rng;

use quatree::bttree::{Mat2, Tree, Vertex};
use quatree::gfpoly::{parse_poly, Fe, Field, Place, Poly, PolyRing, RatFunc, RatFuncField};
use quatree::laurent::{LaurentRing, LaurentSeries, DEFAULT_PRECISION};
use quatree::quat::QuatAlgebra;
use quatree::ring::Ring;

pub fn field(q: u32) -> Field {
    Field::from_order(q).unwrap()
}

pub fn poly(f: &Field, s: &str) -> Poly {
    parse_poly(f, s).unwrap()
}

pub fn tree(q: u32) -> Tree {
    Tree::new(LaurentRing::new(field(q), DEFAULT_PRECISION))
}

/// The algebra H(xi, r) with r given as text.
pub fn xi_algebra(q: u32, r: &str) -> QuatAlgebra {
    let f = field(q);
    QuatAlgebra::xi_shape(&f, poly(&f, r)).unwrap()
}

pub fn rand_fe<R: Rng>(rng: &mut R, f: &Field) -> Fe {
    f.elem(rng.gen_range(0..f.q()))
}

pub fn rand_nonzero<R: Rng>(rng: &mut R, f: &Field) -> Fe {
    f.elem(rng.gen_range(1..f.q()))
}

/// An exact finite series with terms in `[val, val + len)`.
pub fn rand_series<R: Rng>(rng: &mut R, f: &Field, val: i64, len: usize) -> LaurentSeries {
    let coeffs = (0..len).map(|_| rand_fe(rng, f)).collect();
    LaurentSeries::from_coeffs(val, coeffs, None)
}

pub fn rand_mat<R: Rng>(rng: &mut R, f: &Field) -> Mat2 {
    let mut e = || {
        let v = rng.gen_range(-3..=3);
        let len = rng.gen_range(1..=5);
        rand_series(rng, f, v, len)
    };
    Mat2::new(e(), e(), e(), e())
}

/// A random element of GL_2(K) whose determinant has even valuation.
pub fn rand_gl2_even<R: Rng>(rng: &mut R, t: &Tree) -> Mat2 {
    loop {
        let g = rand_mat(rng, t.field());
        if let Some(o) = t.det(&g).ord() {
            if o % 2 == 0 {
                return g;
            }
        }
    }
}

/// A random element of GL_2(O): integral entries and unit determinant.
pub fn rand_gl2_o<R: Rng>(rng: &mut R, t: &Tree) -> Mat2 {
    loop {
        let f = t.field();
        let mut e = || {
            let len = rng.gen_range(1..=4);
            rand_series(rng, f, 0, len)
        };
        let g = Mat2::new(e(), e(), e(), e());
        if t.det(&g).ord() == Some(0) {
            return g;
        }
    }
}

/// A random nonzero scalar of K.
pub fn rand_scalar<R: Rng>(rng: &mut R, f: &Field) -> LaurentSeries {
    let v = rng.gen_range(-4..=4);
    let mut s = rand_series(rng, f, v, 3);
    if s.is_zero() {
        s = LaurentSeries::monomial(rand_nonzero(rng, f), v);
    }
    s
}

/// Graph distances from every vertex of `ball` by breadth-first search over
/// `neighbors`, restricted to the ball (balls in a tree are convex).
pub fn bfs_distances(t: &Tree, ball: &[Vertex]) -> Vec<Vec<i64>> {
    let index: HashMap<&Vertex, usize> = ball.iter().enumerate().map(|(k, v)| (v, k)).collect();
    let adj: Vec<Vec<usize>> =
        ball.iter().map(|v| t.neighbors(v).iter().filter_map(|w| index.get(w).copied()).collect()).collect();
    (0..ball.len())
        .map(|s| {
            let mut d = vec![-1i64; ball.len()];
            d[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if d[y] < 0 {
                        d[y] = d[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
            d
        })
        .collect()
}

/// Distance from the invariant factors of M_v^{-1} M_w, computed with
/// plain matrix arithmetic.
pub fn invariant_factor_distance(t: &Tree, v: &Vertex, w: &Vertex) -> i64 {
    let m = t.mul(&t.matrix_inv(v), &t.matrix(w));
    let od = t.det(&m).ord().unwrap();
    od - 2 * m.min_ord()
}

/// Hilbert symbol at a finite place by brute-force isotropy: after scaling
/// a and b by even powers of p, a x^2 + b y^2 = z^2 has a nontrivial
/// solution over the completion iff it has a primitive solution modulo p^3
/// (Hensel, since every coefficient has valuation at most 1).
pub fn hilbert_oracle(f: &Field, a: &RatFunc, b: &RatFunc, v: &Place) -> i8 {
    let k = RatFuncField::new(f.clone());
    let ring = &k.ring;
    let p = v.poly().expect("finite place").clone();
    let m = ring.pow(&p, 3);
    let reduce = |x: &RatFunc| -> Poly {
        let val = k.valuation(x, &p).expect("nonzero");
        let even = val - val.rem_euclid(2);
        let pe = RatFunc::from_poly(ring.pow(&p, even.unsigned_abs()));
        let y = if even >= 0 { k.div(x, &pe).unwrap() } else { k.mul(x, &pe) };
        let inv = ring.xgcd(y.den(), &m).1;
        ring.rem(&ring.mul(y.num(), &inv), &m).unwrap()
    };
    let (ra, rb) = (reduce(a), reduce(b));
    let residues: Vec<Poly> = ring.all_up_to_degree(3 * p.deg_or_neg() as usize - 1).collect();
    let unit = |x: &Poly| !ring.divides(&p, x);
    // square value -> whether it is the square of a unit
    let mut squares: HashMap<Poly, bool> = HashMap::new();
    for z in &residues {
        let s = ring.rem(&ring.mul(z, z), &m).unwrap();
        *squares.entry(s).or_default() |= unit(z);
    }
    for x in &residues {
        let ax = ring.mul(&ra, &ring.mul(x, x));
        for y in &residues {
            let s = ring.rem(&ring.add(&ax, &ring.mul(&rb, &ring.mul(y, y))), &m).unwrap();
            if let Some(&z_unit) = squares.get(&s) {
                if unit(x) || unit(y) || z_unit {
                    return 1;
                }
            }
        }
    }
    -1
}

pub fn place(f: &Field, s: &str) -> Place {
    Place::finite(&PolyRing::new(f.clone()), poly(f, s)).unwrap()
}
