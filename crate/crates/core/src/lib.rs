//! Quotients of the Bruhat-Tits tree of PGL_2(F_q((1/T))) by unit groups of
//! maximal orders in quaternion algebras over F_q(T).

pub mod bttree;
pub mod error;
pub mod gfpoly;
pub mod invariants;
pub mod laurent;
pub mod order;
pub mod quat;
pub mod quotient;
pub mod ring;

pub use error::{Error, Result};
