mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use quatree::gfpoly::{parse_ratfunc, RatFuncField};
use quatree::laurent::{LaurentRing, LaurentSeries, DEFAULT_PRECISION, MAX_PRECISION};
use quatree::ring::Ring;

fn rand_unit_series(rng: &mut ChaCha8Rng, k: &LaurentRing) -> LaurentSeries {
    let f = &k.field;
    let val = rng.gen_range(-5..5);
    let mut s = rand_series(rng, f, val + 1, 10);
    s = k.add(&s, &LaurentSeries::monomial(rand_nonzero(rng, f), val));
    s.truncated(val + 40)
}

#[test]
fn inverse_and_division() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for q in [2, 3, 4, 5, 9] {
        let k = LaurentRing::new(field(q), DEFAULT_PRECISION);
        for _ in 0..100 {
            let x = rand_unit_series(&mut rng, &k);
            let i = k.inv(&x).unwrap();
            assert_eq!(i.ord(), x.ord().map(|o| -o));
            assert!(k.equal(&k.mul(&x, &i), &k.one()));
            let y = rand_unit_series(&mut rng, &k);
            assert!(k.equal(&k.mul(&k.div(&y, &x).unwrap(), &x), &y));
        }
    }
}

#[test]
fn square_roots_square_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for q in [3, 5, 7, 9] {
        let k = LaurentRing::new(field(q), DEFAULT_PRECISION);
        for _ in 0..100 {
            let x = rand_unit_series(&mut rng, &k);
            let sq = k.mul(&x, &x);
            let r = k.sqrt(&sq).unwrap();
            assert!(k.equal(&k.mul(&r, &r), &sq));
            assert!(k.equal(&r, &x) || k.equal(&r, &k.neg(&x)));
        }
        // odd valuation has no root
        let t = LaurentSeries::monomial(k.field.elem(1), -1);
        assert!(k.sqrt(&t).is_err());
    }
}

#[test]
fn embedding_is_a_ring_homomorphism() {
    let f = field(5);
    let kf = RatFuncField::new(f.clone());
    let k = LaurentRing::new(f.clone(), DEFAULT_PRECISION);
    let texts = ["T", "1/(T-1)", "(T^2+2)/(3*T^3+T)", "4", "T^5-T"];
    for a in texts {
        for b in texts {
            let (ra, rb) = (parse_ratfunc(&f, a).unwrap(), parse_ratfunc(&f, b).unwrap());
            let lhs = k.embed(&kf.mul(&ra, &rb), 80).unwrap();
            let rhs = k.mul(&k.embed(&ra, 80).unwrap(), &k.embed(&rb, 80).unwrap());
            assert!(k.equal(&lhs, &rhs), "{a} * {b}");
            let lhs = k.embed(&kf.add(&ra, &rb), 80).unwrap();
            let rhs = k.add(&k.embed(&ra, 80).unwrap(), &k.embed(&rb, 80).unwrap());
            assert!(k.equal(&lhs, &rhs), "{a} + {b}");
        }
    }
}

#[test]
fn precision_is_tracked_pessimistically() {
    let f = field(3);
    let k = LaurentRing::new(f.clone(), DEFAULT_PRECISION);
    let x = LaurentSeries::from_coeffs(-2, vec![f.elem(1), f.elem(2)], Some(10));
    let y = LaurentSeries::from_coeffs(0, vec![f.elem(1)], Some(20));
    assert_eq!(k.add(&x, &y).abs_prec(), Some(10));
    // (u^-2 + O(u^10)) (1 + O(u^20)) is known modulo u^10
    assert_eq!(k.mul(&x, &y).abs_prec(), Some(10));
    assert!(k.mul(&x, &LaurentSeries::zero()).is_zero());
    let exact = LaurentSeries::from_poly(&poly(&f, "T^2+1"));
    assert!(exact.is_exact());
    assert_eq!(k.mul(&exact, &exact).abs_prec(), None);
    const { assert!(MAX_PRECISION >= DEFAULT_PRECISION) };
}
