mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use quatree::bttree::{Mat2, Vertex};
use quatree::gfpoly::{Field, Poly};
use quatree::invariants::{RamProfile, Report};
use quatree::laurent::LaurentSeries;
use quatree::order::Elem;
use quatree::quat::{find_algebra_with_degrees, QuatAlgebra, QuatElem, FIND_ALGEBRA_BOUND};
use quatree::quotient::*;
use quatree::ring::Ring;
use quatree::Error;

fn edge_embedding(q: u32) -> SplitEmbedding {
    SplitEmbedding::new(&xi_algebra(q, "T*(T-1)")).unwrap()
}

fn banana_embedding() -> SplitEmbedding {
    let f = field(3);
    let (a, b) = find_algebra_with_degrees(&f, &[1, 2], FIND_ALGEBRA_BOUND).unwrap();
    SplitEmbedding::new(&QuatAlgebra::from_polys(f, a, b).unwrap()).unwrap()
}

fn theta2(f: &Field) -> Elem {
    QuatElem::new(Poly::zero(), poly(f, "2*T-1"), Poly::zero(), Poly::constant(f.from_int(2)))
}

fn rand_elem(rng: &mut ChaCha8Rng, f: &Field, deg: usize) -> Elem {
    let mut p = || Poly::from_coeffs((0..=deg).map(|_| rand_fe(rng, f)).collect());
    QuatElem::new(p(), p(), p(), p())
}

#[test]
fn embedding_respects_norms_and_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for emb in [edge_embedding(3), edge_embedding(5), banana_embedding()] {
        let t = emb.tree();
        let h = &emb.order.h;
        let f = emb.field().clone();
        for _ in 0..50 {
            let deg = rng.gen_range(0..3);
            let (x, y) = (rand_elem(&mut rng, &f, deg), rand_elem(&mut rng, &f, deg));
            let (ix, iy) = (emb.image(&x).unwrap(), emb.image(&y).unwrap());
            assert!(t.k.equal(&t.det(&ix), &LaurentSeries::from_poly(&h.norm(&x))));
            assert!(t.mat_equal(&t.mul(&ix, &iy), &emb.image(&h.mul(&x, &y)).unwrap()));
            let back = emb.preimage(&ix).unwrap();
            for k in 0..4 {
                assert!(t.k.equal(&back[k], &LaurentSeries::from_poly(&x.c[k])));
            }
        }
    }
}

#[test]
fn explicit_generators_of_the_edge_case() {
    let emb = edge_embedding(3);
    let t = emb.tree();
    let f = emb.field().clone();
    let h = &emb.order.h;
    let k = &t.k;
    let c = |n: i64| LaurentSeries::constant(f.from_int(n));
    let pi = pi_element(&emb).unwrap();
    let pinv = k.inv(&pi).unwrap();
    let xi = LaurentSeries::constant(f.choose_xi());

    let th2 = emb.image(&theta2(&f)).unwrap();
    let expected = Mat2::new(LaurentSeries::zero(), pinv, k.mul(&xi, &pi), LaurentSeries::zero());
    assert!(t.mat_equal(&th2, &expected));

    // theta_1 fixes the base vertex and theta_2 the lattice of diag(1, pi)
    assert_eq!(emb.act(&h.basis(1), &Vertex::base()).unwrap(), Vertex::base());
    let w = t.canonical_form(&Mat2::diag(c(1), pi.clone())).unwrap();
    assert_eq!(t.distance(&Vertex::base(), &w), 1);
    assert_eq!(emb.act(&theta2(&f), &w).unwrap(), w);

    // 1 - theta_1 = [[1, 2], [1, 1]] and 1 - theta_2 as printed, both of order 8
    let g1 = emb.image(&h.sub(&h.one(), &h.basis(1))).unwrap();
    assert!(t.mat_equal(&g1, &Mat2::new(c(1), c(2), c(1), c(1))));
    let s = emb.sqrt_b(emb.prec).unwrap();
    let tp1 = LaurentSeries::from_poly(&poly(&f, "T+1"));
    let two_s = k.mul(&c(2), &s);
    let g2_expected = Mat2::new(c(1), k.add(&tp1, &two_s), k.add(&k.mul(&c(2), &tp1), &two_s), c(1));
    let g2 = emb.image(&h.sub(&h.one(), &theta2(&f))).unwrap();
    assert!(t.mat_equal(&g2, &g2_expected));
    let minus_one = t.scale(&c(-1), &Mat2::identity());
    for g in [&g1, &g2] {
        assert!(t.mat_equal(&t.pow(g, 4), &minus_one));
        assert!(t.mat_equal(&t.pow(g, 8), &Mat2::identity()));
        for e in 1..8 {
            assert!(!t.mat_equal(&t.pow(g, e), &Mat2::identity()));
        }
    }
}

#[test]
fn stabilizers_are_groups_fixing_the_vertex() {
    let emb = edge_embedding(5);
    let t = emb.tree();
    for v in t.ball(&Vertex::base(), 1) {
        let s = emb.stabilizer(&v).unwrap();
        for g in &s.elements {
            assert_eq!(emb.act(g, &v).unwrap(), v);
            assert!(emb.order.is_unit(g));
        }
    }
    // every neighbour of the base vertex is a translate of a single one
    let ns = t.neighbors(&Vertex::base());
    for w in &ns[1..] {
        let g = emb.are_equivalent(w, &ns[0]).unwrap().expect("equivalent");
        assert_eq!(emb.act(&g, w).unwrap(), ns[0]);
    }
    assert!(emb.are_equivalent(&Vertex::base(), &ns[0]).unwrap().is_none());
    assert!(!emb.run_log().is_empty());
}

#[test]
fn edge_quotients() {
    for q in [3, 5, 7] {
        let emb = edge_embedding(q);
        let g = build_quotient(&emb, &Vertex::base(), 50).unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.num_edges(), 1);
        let qq = q as usize;
        assert!(g.vertices.iter().all(|v| v.stabilizer_order == qq * qq - 1));
        assert_eq!(g.edges[0].stabilizer_order, qq - 1);
        let rep = Report::with_graph(&RamProfile::new(q as u64, vec![1, 1]).unwrap(), &g).unwrap();
        assert!(rep.all_passed(), "{:?}", rep.checks);
    }
}

#[test]
fn quotient_does_not_depend_on_the_start_vertex() {
    let emb = edge_embedding(3);
    let t = emb.tree();
    let base = build_quotient(&emb, &Vertex::base(), 50).unwrap();
    for start in t.ball(&Vertex::base(), 2).into_iter().skip(3).step_by(4) {
        let g = build_quotient(&emb, &start, 50).unwrap();
        assert_eq!(g.signature(), base.signature());
    }
    let emb = banana_embedding();
    let base = build_quotient(&emb, &Vertex::base(), 50).unwrap();
    let start = emb.tree().ball(&Vertex::base(), 2).pop().unwrap();
    assert_eq!(build_quotient(&emb, &start, 50).unwrap().signature(), base.signature());
}

#[test]
fn banana_quotient() {
    let emb = banana_embedding();
    let g = build_quotient(&emb, &Vertex::base(), 50).unwrap();
    assert_eq!(g.num_vertices(), 2);
    assert_eq!(g.edges.len(), 1);
    assert_eq!(g.edges[0].multiplicity, 4);
    assert!(g.vertices.iter().all(|v| v.stabilizer_order == 2 && v.degree == 4));
    assert!(!g.has_loops());
    let rep = Report::with_graph(&RamProfile::new(3, vec![1, 2]).unwrap(), &g).unwrap();
    assert!(rep.all_passed(), "{:?}", rep.checks);
    assert_eq!(rep.graph.unwrap().critical_group, vec![4]);
}

#[test]
fn torsion_classes_cover_terminal_vertices_twice() {
    let emb = edge_embedding(3);
    let g = build_quotient(&emb, &Vertex::base(), 50).unwrap();
    let o = &emb.order;
    let units = o.solve_torsion(2).unwrap();
    let classes = o.torsion_classes(&units, 2).unwrap();
    let mut hits = vec![0; g.num_vertices()];
    for c in &classes {
        let v = emb.fixed_vertex(&c.rep.element).unwrap();
        let k = locate(&emb, &g, &v).unwrap().expect("located");
        hits[k] += 1;
        let vp = emb.fixed_vertex(&classes[c.partner].rep.element).unwrap();
        assert_eq!(locate(&emb, &g, &vp).unwrap(), Some(k));
    }
    assert_eq!(g.terminal().len(), 2);
    for v in g.terminal() {
        assert_eq!(hits[v], 2);
    }
}

#[test]
fn unsupported_and_invalid_inputs() {
    let f = field(4);
    let alg = QuatAlgebra::xi_shape(&f, poly(&f, "T^4+T")).unwrap();
    assert!(matches!(SplitEmbedding::new(&alg), Err(Error::Unsupported(_))));
    let f = field(3);
    // b with non-square leading coefficient has no square root in K
    let alg = QuatAlgebra::parse(&f, "H(T, 2*T^2+1)").unwrap();
    assert!(matches!(SplitEmbedding::new(&alg), Err(Error::NotASquare(_))));
    // ab carries an unramified prime: the standard order is not maximal
    let alg = QuatAlgebra::xi_shape(&f, poly(&f, "T^2*(T-1)^2")).unwrap();
    assert!(SplitEmbedding::new(&alg).is_err());
    let emb = edge_embedding(3);
    assert!(matches!(
        build_quotient(&emb, &Vertex::base(), 1),
        Err(Error::NonterminationGuard { limit: 1 })
    ));
}
