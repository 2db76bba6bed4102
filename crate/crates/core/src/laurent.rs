//! Truncated Laurent series in u = 1/T, i.e. elements of K = F_q((1/T)).
//!
//! A series is either exact (finitely many nonzero terms, as for the image of
//! a polynomial) or known modulo `u^abs`. Arithmetic tracks the absolute
//! precision pessimistically, so every coefficient that is reported is
//! correct.

use std::fmt;

use crate::error::{Error, Result};
use crate::gfpoly::{Fe, Field, Poly, RatFunc};
use crate::ring::Ring;

/// Default number of relative terms computed by inversion and square roots.
pub const DEFAULT_PRECISION: usize = 64;
/// Precision ceiling for the doubling retry loop.
pub const MAX_PRECISION: usize = 4096;
/// Inversions and square roots producing fewer correct terms fail.
pub const MIN_CORRECT_TERMS: i64 = 8;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentSeries {
    /// Exponent of `coeffs[0]`; equals `abs` for a zero known to precision.
    val: i64,
    coeffs: Vec<Fe>,
    /// Absolute precision: the value is known modulo `u^abs`. `None` = exact.
    abs: Option<i64>,
}

impl LaurentSeries {
    pub fn zero() -> LaurentSeries {
        LaurentSeries { val: 0, coeffs: Vec::new(), abs: None }
    }

    /// Zero known modulo `u^abs`.
    pub fn zero_mod(abs: i64) -> LaurentSeries {
        LaurentSeries { val: abs, coeffs: Vec::new(), abs: Some(abs) }
    }

    pub fn constant(c: Fe) -> LaurentSeries {
        LaurentSeries { val: 0, coeffs: vec![c], abs: None }.normalized()
    }

    /// `c * u^k`, exact.
    pub fn monomial(c: Fe, k: i64) -> LaurentSeries {
        LaurentSeries { val: k, coeffs: vec![c], abs: None }.normalized()
    }

    /// Exact image of a polynomial in T.
    pub fn from_poly(p: &Poly) -> LaurentSeries {
        let d = p.deg_or_neg();
        if d < 0 {
            return LaurentSeries::zero();
        }
        let coeffs = (0..=d as usize).rev().map(|k| p.coeff(k)).collect();
        LaurentSeries { val: -d, coeffs, abs: None }.normalized()
    }

    /// Builds a series from explicit coefficients starting at `val`.
    pub fn from_coeffs(val: i64, coeffs: Vec<Fe>, abs: Option<i64>) -> LaurentSeries {
        let s = LaurentSeries { val, coeffs, abs };
        match abs {
            Some(a) => s.truncated(a),
            None => s.normalized(),
        }
    }

    fn normalized(mut self) -> LaurentSeries {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.val += lead as i64;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.val = self.abs.unwrap_or(0);
        }
        self
    }

    /// Forgets every term of exponent `>= abs`.
    pub fn truncated(mut self, abs: i64) -> LaurentSeries {
        let abs = self.abs.map_or(abs, |a| a.min(abs));
        self.abs = Some(abs);
        let keep = (abs - self.val).max(0) as usize;
        self.coeffs.truncate(keep);
        self.normalized()
    }

    pub fn is_exact(&self) -> bool {
        self.abs.is_none()
    }

    /// Absolute precision, `None` when exact.
    pub fn abs_prec(&self) -> Option<i64> {
        self.abs
    }

    /// Number of correct terms counted from the valuation (`None` when exact).
    pub fn prec(&self) -> Option<i64> {
        self.abs.map(|a| a - self.val)
    }

    /// True for a value that is zero as far as it is known.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// ord at infinity; `None` for zero (to precision).
    pub fn ord(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    /// Lower bound on the valuation, valid also for zero-to-precision values.
    pub fn ord_lower_bound(&self) -> i64 {
        if self.is_zero() {
            self.abs.unwrap_or(i64::MAX)
        } else {
            self.val
        }
    }

    pub fn leading(&self) -> Option<Fe> {
        self.coeffs.first().copied()
    }

    /// Coefficient of `u^k`, failing if it is beyond the known precision.
    pub fn coeff(&self, k: i64) -> Result<Fe> {
        if let Some(a) = self.abs {
            if k >= a {
                return Err(Error::PrecisionLoss(format!(
                    "coefficient of u^{k} requested, series known mod u^{a}"
                )));
            }
        }
        if k < self.val {
            return Ok(Fe::ZERO);
        }
        Ok(self.coeffs.get((k - self.val) as usize).copied().unwrap_or(Fe::ZERO))
    }

    /// Known coefficients for exponents in `lo..hi`; `hi` must not exceed the
    /// absolute precision.
    fn window(&self, lo: i64, hi: i64) -> Vec<Fe> {
        (lo..hi).map(|k| self.coeff(k).expect("within precision")).collect()
    }

    /// Multiplication by `u^k`.
    pub fn shift(&self, k: i64) -> LaurentSeries {
        LaurentSeries {
            val: self.val + k,
            coeffs: self.coeffs.clone(),
            abs: self.abs.map(|a| a + k),
        }
    }

    /// Polynomial in T made of the terms with exponent `<= 0`, exactly.
    pub fn polynomial_part(&self) -> Result<Poly> {
        if self.is_zero() || self.val > 0 {
            return Ok(Poly::zero());
        }
        let d = (-self.val) as usize;
        let mut c = vec![Fe::ZERO; d + 1];
        for (k, slot) in c.iter_mut().enumerate() {
            *slot = self.coeff(-(k as i64))?;
        }
        Ok(Poly::from_coeffs(c))
    }

    pub fn display<'a>(&'a self, field: &'a Field) -> LaurentDisplay<'a> {
        LaurentDisplay { s: self, field }
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("[{}]u^{}", c.0, self.val + i as i64))
            .collect();
        if let Some(a) = self.abs {
            parts.push(format!("O(u^{a})"));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        f.write_str(&parts.join(" + "))
    }
}

pub struct LaurentDisplay<'a> {
    s: &'a LaurentSeries,
    field: &'a Field,
}

/// Prints as `2*u^-1 + 2 + O(u^63)`.
impl fmt::Display for LaurentDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &c) in self.s.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = self.s.val + i as i64;
            let cs = self.field.fmt_elem(c);
            let cs = if self.field.elem_is_compound(c) { format!("({cs})") } else { cs };
            parts.push(match (k, c == Fe::ONE) {
                (0, _) => cs,
                (1, true) => "u".into(),
                (1, false) => format!("{cs}*u"),
                (_, true) => format!("u^{k}"),
                (_, false) => format!("{cs}*u^{k}"),
            });
        }
        if let Some(a) = self.s.abs {
            parts.push(format!("O(u^{a})"));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        f.write_str(&parts.join(" + "))
    }
}

fn min_abs(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Arithmetic context for K at a working precision (relative terms produced
/// by inversion and square roots).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentRing {
    pub field: Field,
    pub prec: usize,
}

impl LaurentRing {
    pub fn new(field: Field, prec: usize) -> LaurentRing {
        LaurentRing { field, prec }
    }

    /// Expansion of a rational function with `prec` correct terms.
    pub fn embed(&self, r: &RatFunc, prec: usize) -> Result<LaurentSeries> {
        let num = LaurentSeries::from_poly(r.num());
        if num.is_zero() {
            return Ok(LaurentSeries::zero_mod(prec as i64));
        }
        let den = LaurentSeries::from_poly(r.den());
        let inv = LaurentRing::new(self.field.clone(), prec).inv(&den)?;
        let s = self.mul(&num, &inv);
        let v = s.val;
        Ok(s.truncated(v + prec as i64))
    }

    /// Exact image of a rational function whose expansion terminates
    /// (a polynomial); other inputs are expanded at the ring precision.
    pub fn embed_auto(&self, r: &RatFunc) -> Result<LaurentSeries> {
        match r.as_poly() {
            Some(p) => Ok(LaurentSeries::from_poly(p)),
            None => self.embed(r, self.prec),
        }
    }

    pub fn scale(&self, a: &LaurentSeries, c: Fe) -> LaurentSeries {
        LaurentSeries {
            val: a.val,
            coeffs: a.coeffs.iter().map(|&x| self.field.mul(x, c)).collect(),
            abs: a.abs,
        }
        .normalized()
    }

    fn relative_terms(&self, a: &LaurentSeries) -> i64 {
        let want = self.prec as i64;
        a.prec().map_or(want, |p| p.min(want))
    }

    pub fn inv(&self, a: &LaurentSeries) -> Result<LaurentSeries> {
        let Some(a0) = a.leading() else {
            return Err(if a.is_exact() {
                Error::DivisionByZero
            } else {
                Error::PrecisionLoss("inverting a value that is zero to precision".into())
            });
        };
        let n = self.relative_terms(a);
        if n < MIN_CORRECT_TERMS {
            return Err(Error::PrecisionLoss(format!("inverse would have only {n} correct terms")));
        }
        let f = &self.field;
        let ac = a.window(a.val, a.val + n);
        let i0 = f.inv(a0)?;
        let mut b = Vec::with_capacity(n as usize);
        b.push(i0);
        for k in 1..n as usize {
            let mut s = Fe::ZERO;
            for j in 1..=k {
                if !ac[j].is_zero() {
                    s = f.add(s, f.mul(ac[j], b[k - j]));
                }
            }
            b.push(f.neg(f.mul(i0, s)));
        }
        Ok(LaurentSeries::from_coeffs(-a.val, b, Some(-a.val + n)))
    }

    pub fn div(&self, a: &LaurentSeries, b: &LaurentSeries) -> Result<LaurentSeries> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Integer power; negative exponents go through [`LaurentRing::inv`].
    pub fn pow(&self, a: &LaurentSeries, n: i64) -> Result<LaurentSeries> {
        let mut base = if n < 0 { self.inv(a)? } else { a.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Square root with the canonical branch: the leading coefficient of the
    /// root is the smallest square root of the leading coefficient of `a`.
    pub fn sqrt(&self, a: &LaurentSeries) -> Result<LaurentSeries> {
        let f = &self.field;
        if !f.is_odd() {
            return Err(Error::Unsupported("square roots in K need odd q".into()));
        }
        let Some(a0) = a.leading() else {
            return Err(Error::NotASquare("zero has no canonical root".into()));
        };
        if a.val % 2 != 0 {
            return Err(Error::NotASquare(format!("odd valuation {}", a.val)));
        }
        let r0 = f
            .sqrt(a0)
            .ok_or_else(|| Error::NotASquare("leading coefficient is not a square".into()))?;
        let n = self.relative_terms(a);
        if n < MIN_CORRECT_TERMS {
            return Err(Error::PrecisionLoss(format!("square root would have only {n} correct terms")));
        }
        let ac = a.window(a.val, a.val + n);
        let inv2r0 = f.inv(f.add(r0, r0))?;
        let mut r = Vec::with_capacity(n as usize);
        r.push(r0);
        for k in 1..n as usize {
            let mut s = ac[k];
            for j in 1..k {
                s = f.sub(s, f.mul(r[j], r[k - j]));
            }
            r.push(f.mul(s, inv2r0));
        }
        let half = a.val / 2;
        let root = LaurentSeries::from_coeffs(half, r.clone(), Some(half + n));
        // A terminating root of an exact value is itself exact.
        if a.is_exact() {
            let candidate = LaurentSeries::from_coeffs(half, r, None);
            if self.mul(&candidate, &candidate) == *a {
                return Ok(candidate);
            }
        }
        Ok(root)
    }

    /// Runs `f` at increasing precision until it stops reporting
    /// [`Error::PrecisionLoss`], doubling from `start` up to [`MAX_PRECISION`].
    pub fn with_retry<T>(start: usize, mut f: impl FnMut(usize) -> Result<T>) -> Result<T> {
        let mut prec = start.max(MIN_CORRECT_TERMS as usize);
        loop {
            match f(prec) {
                Err(e) if e.is_precision_loss() && prec < MAX_PRECISION => {
                    prec = (prec * 2).min(MAX_PRECISION);
                }
                other => return other,
            }
        }
    }
}

impl Ring for LaurentRing {
    type Elem = LaurentSeries;

    fn zero(&self) -> LaurentSeries {
        LaurentSeries::zero()
    }

    fn one(&self) -> LaurentSeries {
        LaurentSeries::constant(Fe::ONE)
    }

    fn add(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        if a.is_zero() && a.is_exact() {
            return b.clone();
        }
        if b.is_zero() && b.is_exact() {
            return a.clone();
        }
        let abs = min_abs(a.abs, b.abs);
        let lo = a.val.min(b.val);
        let hi = match abs {
            Some(x) => x,
            None => (a.val + a.coeffs.len() as i64).max(b.val + b.coeffs.len() as i64),
        };
        if hi <= lo {
            return LaurentSeries::zero_mod(hi);
        }
        let f = &self.field;
        let coeffs = a
            .window(lo, hi)
            .into_iter()
            .zip(b.window(lo, hi))
            .map(|(x, y)| f.add(x, y))
            .collect();
        LaurentSeries { val: lo, coeffs, abs }.normalized()
    }

    fn sub(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        self.add(a, &self.neg(b))
    }

    fn neg(&self, a: &LaurentSeries) -> LaurentSeries {
        LaurentSeries {
            val: a.val,
            coeffs: a.coeffs.iter().map(|&x| self.field.neg(x)).collect(),
            abs: a.abs,
        }
    }

    fn mul(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        if (a.is_zero() && a.is_exact()) || (b.is_zero() && b.is_exact()) {
            return LaurentSeries::zero();
        }
        let val = a.val + b.val;
        let abs = min_abs(a.abs.map(|x| x + b.val), b.abs.map(|x| x + a.val));
        let len = match abs {
            Some(x) => (x - val).max(0) as usize,
            None => a.coeffs.len() + b.coeffs.len() - 1,
        };
        let f = &self.field;
        let mut c = vec![Fe::ZERO; len];
        for (i, &x) in a.coeffs.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate().take(len - i) {
                if !y.is_zero() {
                    c[i + j] = f.add(c[i + j], f.mul(x, y));
                }
            }
        }
        LaurentSeries { val, coeffs: c, abs }.normalized()
    }

    fn is_zero(&self, a: &LaurentSeries) -> bool {
        a.is_zero()
    }

    /// Equality on the commonly known terms.
    fn equal(&self, a: &LaurentSeries, b: &LaurentSeries) -> bool {
        self.sub(a, b).is_zero()
    }

    fn constant(&self, c: Fe) -> LaurentSeries {
        LaurentSeries::constant(c)
    }

    fn from_int(&self, n: i64) -> LaurentSeries {
        LaurentSeries::constant(self.field.from_int(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfpoly::{parse_ratfunc, RatFuncField};

    fn setup(q: u32) -> (Field, LaurentRing) {
        let f = Field::from_order(q).unwrap();
        (f.clone(), LaurentRing::new(f, DEFAULT_PRECISION))
    }

    #[test]
    fn embed_examples() {
        let (f, k) = setup(3);
        let t = k.embed(&parse_ratfunc(&f, "T").unwrap(), 64).unwrap();
        assert_eq!(t.ord(), Some(-1));
        let s = k.embed(&parse_ratfunc(&f, "2*T-1").unwrap(), 64).unwrap();
        assert_eq!(s.display(&f).to_string(), "2*u^-1 + 2 + O(u^63)");
        let g = k.embed(&parse_ratfunc(&f, "1/(T-1)").unwrap(), 20).unwrap();
        assert_eq!(g.ord(), Some(1));
        for e in 1..21 {
            assert_eq!(g.coeff(e).unwrap(), Fe::ONE);
        }
        assert!(g.coeff(21).is_err());
        assert_eq!(LaurentSeries::from_poly(&parse_ratfunc(&f, "T^2+2*T").unwrap().num().clone()).ord(), Some(-2));
    }

    #[test]
    fn inverse_of_t_is_u() {
        let (_, k) = setup(5);
        let t = LaurentSeries::from_poly(&Poly::t());
        let i = k.inv(&t).unwrap();
        assert_eq!(i.ord(), Some(1));
        assert!(k.equal(&i, &LaurentSeries::monomial(Fe::ONE, 1)));
        assert!(k.inv(&LaurentSeries::zero()).is_err());
        assert!(k.inv(&LaurentSeries::zero_mod(5)).unwrap_err().is_precision_loss());
    }

    #[test]
    fn precision_floor() {
        let (_, k) = setup(3);
        let short = LaurentSeries::from_coeffs(0, vec![Fe::ONE, Fe::ONE], Some(4));
        assert!(k.inv(&short).unwrap_err().is_precision_loss());
        let mut attempts = Vec::new();
        let r: Result<()> = LaurentRing::with_retry(64, |p| {
            attempts.push(p);
            Err(Error::PrecisionLoss("x".into()))
        });
        assert!(r.is_err());
        assert_eq!(attempts, vec![64, 128, 256, 512, 1024, 2048, 4096]);
    }

    #[test]
    fn square_roots() {
        let (f, k) = setup(3);
        let t2 = LaurentSeries::from_poly(&parse_ratfunc(&f, "T^2").unwrap().num().clone());
        let r = k.sqrt(&t2).unwrap();
        assert!(r.is_exact());
        assert_eq!(r, LaurentSeries::from_poly(&Poly::t()));
        let x = LaurentSeries::from_poly(&parse_ratfunc(&f, "T^2-T").unwrap().num().clone());
        let r = k.sqrt(&x).unwrap();
        assert_eq!(r.ord(), Some(-1));
        assert!(k.equal(&k.mul(&r, &r), &x));
        let t3 = LaurentSeries::from_poly(&parse_ratfunc(&f, "T^3").unwrap().num().clone());
        assert!(matches!(k.sqrt(&t3), Err(Error::NotASquare(_))));
        let two = LaurentSeries::constant(f.elem(2));
        assert!(matches!(k.sqrt(&two), Err(Error::NotASquare(_))));
        let (_, k2) = setup(4);
        assert!(matches!(k2.sqrt(&LaurentSeries::constant(Fe::ONE)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for q in [3u32, 4, 5, 9] {
            let (f, k) = setup(q);
            let kf = RatFuncField::new(f.clone());
            let rand_poly = |rng: &mut rand_chacha::ChaCha8Rng| {
                let d = rng.gen_range(0..5);
                let mut c: Vec<Fe> = (0..=d).map(|_| f.elem(rng.gen_range(0..q))).collect();
                c[d] = f.elem(rng.gen_range(1..q));
                Poly::from_coeffs(c)
            };
            for _ in 0..30 {
                let a = kf.make(rand_poly(&mut rng), rand_poly(&mut rng)).unwrap();
                let b = kf.make(rand_poly(&mut rng), rand_poly(&mut rng)).unwrap();
                let ea = k.embed(&a, 48).unwrap();
                let eb = k.embed(&b, 48).unwrap();
                let sum = k.embed(&kf.add(&a, &b), 48).unwrap();
                let prod = k.embed(&kf.mul(&a, &b), 48).unwrap();
                assert!(k.equal(&k.add(&ea, &eb), &sum));
                assert!(k.equal(&k.mul(&ea, &eb), &prod));
                assert_eq!(k.mul(&ea, &eb).ord(), Some(ea.ord().unwrap() + eb.ord().unwrap()));
                // ultrametric inequality
                let s = k.add(&ea, &eb);
                if let Some(o) = s.ord() {
                    assert!(o >= ea.ord().unwrap().min(eb.ord().unwrap()));
                }
                let one = k.mul(&ea, &k.inv(&ea).unwrap());
                assert!(k.equal(&one, &k.one()));
            }
        }
    }
}
