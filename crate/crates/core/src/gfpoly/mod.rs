//! Exact arithmetic in F_q, A = F_q[T], F = F_q(T), and places of F.

mod factor;
mod field;
mod linalg;
mod parse;
mod place;
mod poly;
mod ratfunc;

pub use factor::{count_irreducibles, factor, is_irreducible, monic_irreducibles, Factorization};
pub use field::{Fe, Field, DEFAULT_FIELD_BOUND, MAX_FIELD_SIZE};
pub use linalg::{nullspace, rref};
pub use parse::{parse_poly, parse_ratfunc, split_algebra_spec};
pub use place::{sqr_test_residue, Mobius, Place};
pub use poly::{Degree, Poly, PolyRing};
pub use ratfunc::{RatFunc, RatFuncField};
