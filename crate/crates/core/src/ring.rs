//! Minimal commutative ring interface used to share quaternion arithmetic
//! between the coefficient domains (constants, polynomials, rational
//! functions, Laurent series).

use std::fmt::Debug;

use crate::gfpoly::Fe;

pub trait Ring {
    type Elem: Clone + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
    /// Image of a constant of F_q.
    fn constant(&self, c: Fe) -> Self::Elem;

    fn from_int(&self, n: i64) -> Self::Elem;

    fn square(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }
}
