mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use quatree::gfpoly::*;
use quatree::quat::*;
use quatree::ring::Ring;
use quatree::Error;

fn arb_elem(q: u32, deg: usize) -> impl Strategy<Value = QuatElem<Poly>> {
    let f = field(q);
    let coeff = move || {
        let f = f.clone();
        prop::collection::vec(0..q, 0..=deg + 1)
            .prop_map(move |c| Poly::from_coeffs(c.into_iter().map(|i| f.elem(i)).collect()))
    };
    (coeff(), coeff(), coeff(), coeff()).prop_map(|(x, y, z, w)| QuatElem::new(x, y, z, w))
}

fn algebras() -> Vec<(u32, QuatAlgebra)> {
    vec![
        (3, xi_algebra(3, "T*(T-1)")),
        (5, QuatAlgebra::parse(&field(5), "H(2, T^2+4*T)").unwrap()),
        (2, xi_algebra(2, "T*(T+1)")),
        (4, xi_algebra(4, "T^4+T")),
    ]
}

fn check_structure(h: &Quat<PolyRing>, x: &QuatElem<Poly>, y: &QuatElem<Poly>) -> Result<(), TestCaseError> {
    let r = &h.ring;
    // reduced norm is multiplicative
    prop_assert_eq!(h.norm(&h.mul(x, y)), r.mul(&h.norm(x), &h.norm(y)));
    // the involution reverses products
    prop_assert!(h.equal(&h.conj(&h.mul(x, y)), &h.mul(&h.conj(y), &h.conj(x))));
    // x x' = Nr(x), x + x' = Tr(x)
    prop_assert!(h.equal(&h.mul(x, &h.conj(x)), &h.scalar(h.norm(x))));
    prop_assert!(h.equal(&h.add(x, &h.conj(x)), &h.scalar(h.trace(x))));
    // x^2 - Tr(x) x + Nr(x) = 0
    let (t, n) = h.charpoly(x);
    let lhs = h.add(&h.sub(&h.mul(x, x), &h.scale(&t, x)), &h.scalar(n));
    prop_assert!(h.is_zero(&lhs));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn structure_q3(x in arb_elem(3, 3), y in arb_elem(3, 3)) {
        check_structure(&algebras()[0].1.over_poly().unwrap(), &x, &y)?;
    }

    #[test]
    fn structure_q5(x in arb_elem(5, 2), y in arb_elem(5, 2)) {
        check_structure(&algebras()[1].1.over_poly().unwrap(), &x, &y)?;
    }

    #[test]
    fn structure_q2(x in arb_elem(2, 4), y in arb_elem(2, 4)) {
        check_structure(&algebras()[2].1.over_poly().unwrap(), &x, &y)?;
    }

    #[test]
    fn structure_q4(x in arb_elem(4, 2), y in arb_elem(4, 2)) {
        check_structure(&algebras()[3].1.over_poly().unwrap(), &x, &y)?;
    }

    #[test]
    fn associativity(x in arb_elem(4, 2), y in arb_elem(4, 2), z in arb_elem(4, 2)) {
        for (_, alg) in algebras().into_iter().filter(|(q, _)| *q == 4) {
            let h = alg.over_poly().unwrap();
            prop_assert!(h.equal(&h.mul(&h.mul(&x, &y), &z), &h.mul(&x, &h.mul(&y, &z))));
        }
    }
}

#[test]
fn relations() {
    for (_, alg) in algebras() {
        let h = alg.over_poly().unwrap();
        let (i, j) = (h.basis(1), h.basis(2));
        let (a, b) = alg.poly_ab().unwrap();
        assert!(h.equal(&h.mul(&j, &j), &h.scalar(b)));
        if alg.is_odd() {
            assert!(h.equal(&h.mul(&i, &i), &h.scalar(a)));
            assert!(h.equal(&h.mul(&i, &j), &h.neg(&h.mul(&j, &i))));
        } else {
            assert!(h.equal(&h.add(&h.mul(&i, &i), &i), &h.scalar(a)));
            assert!(h.equal(&h.mul(&i, &j), &h.mul(&j, &h.add(&i, &h.one()))));
        }
        assert!(h.equal(&h.mul(&i, &j), &h.basis(3)));
    }
}

#[test]
fn hilbert_symbol_matches_isotropy() {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for q in [3, 5] {
        let f = field(q);
        let k = RatFuncField::new(f.clone());
        let ring = PolyRing::new(f.clone());
        let mut places: Vec<Place> = monic_irreducibles(&ring, 1).into_iter().map(Place::Finite).collect();
        if q == 3 {
            places.extend(monic_irreducibles(&ring, 2).into_iter().map(Place::Finite));
        }
        for _ in 0..40 {
            let mut pick = || loop {
                let d = rng.gen_range(0..=3);
                let c = (0..=d).map(|_| rand_fe(&mut rng, &f)).collect();
                let p = Poly::from_coeffs(c);
                if !p.is_zero() {
                    break RatFunc::from_poly(p);
                }
            };
            let (a, b) = (pick(), pick());
            for v in &places {
                let sym = hilbert_symbol(&f, &a, &b, v).unwrap();
                assert_eq!(sym, hilbert_oracle(&f, &a, &b, v), "q={q} a={} b={} v={}", a.display(&f), b.display(&f), v.label(&f));
            }
            // a non-polynomial argument
            let c = k.inv(&a).unwrap();
            for v in &places[..2] {
                assert_eq!(hilbert_symbol(&f, &c, &b, v).unwrap(), hilbert_oracle(&f, &c, &b, v));
            }
        }
    }
}

#[test]
fn ramification_count_is_even() {
    let f = field(5);
    let ring = PolyRing::new(f.clone());
    for a in ring.all_up_to_degree(1).filter(|p| !p.is_zero()) {
        for b in ring.all_up_to_degree(2).filter(|p| !p.is_zero()).step_by(3) {
            let alg = QuatAlgebra::from_polys(f.clone(), a.clone(), b.clone()).unwrap();
            let (fin, inf) = alg.ramification().unwrap();
            assert_eq!((fin.len() + inf as usize) % 2, 0);
        }
    }
}

#[test]
fn ramified_sets_of_examples() {
    let f3 = field(3);
    let alg = xi_algebra(3, "T*(T-1)");
    let r = alg.ramified_set().unwrap();
    assert_eq!(r.labels(&f3), vec!["T", "T+2"]);
    let f2 = field(2);
    let r = xi_algebra(2, "T*(T+1)").ramified_set().unwrap();
    assert_eq!(r.labels(&f2), vec!["T", "T+1"]);
    // an algebra ramified at infinity
    let alg = QuatAlgebra::parse(&f3, "H(2, T)").unwrap();
    assert_eq!(alg.ramified_set().unwrap_err(), Error::RamifiedAtInfinity);
    assert!(RamSet::new(vec![place(&f3, "T")]).is_err());
    assert_eq!(artin_legendre(&place(&f3, "T^2+1")).unwrap(), 1);
    assert_eq!(artin_legendre(&place(&f3, "T")).unwrap(), -1);
}

#[test]
fn algebra_search() {
    for q in [3, 5, 7, 9] {
        let f = field(q);
        let ring = PolyRing::new(f.clone());
        for degrees in [vec![1, 1], vec![1, 2], vec![1, 1, 1, 1]] {
            if degrees.len() > q as usize {
                assert!(find_algebra_with_degrees(&f, &degrees, 2).is_err());
                continue;
            }
            let (a, b) = find_algebra_with_degrees(&f, &degrees, FIND_ALGEBRA_BOUND).unwrap();
            let alg = QuatAlgebra::from_polys(f.clone(), a.clone(), b.clone()).unwrap();
            let r = alg.ramified_set().unwrap();
            assert_eq!(r.degrees(), degrees);
            assert_eq!(ring.monic(&ring.mul(&a, &b)).unwrap(), r.product(&ring));
            assert_eq!(find_algebra(&f, &r, FIND_ALGEBRA_BOUND).unwrap(), (a, b));
        }
    }
    assert!(matches!(find_algebra_with_degrees(&field(4), &[1, 1], 2), Err(Error::Unsupported(_))));
}
