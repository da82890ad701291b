//! Exact computations with connections and opers on the punctured formal disk:
//! slopes, Drinfeld-Sokolov canonical forms, Moy-Prasad lattices, and affine
//! Kac-Moody calculus for Segal-Sugawara annihilation checks.

#![allow(clippy::needless_range_loop)]

pub mod acceptance;
pub mod error;
pub mod gauge;
pub mod kac_moody;
pub mod lie;
pub mod linalg;
pub mod moy_prasad;
pub mod oper;
pub mod rational;
pub mod series;
pub mod sugawara;

pub use error::{Error, Result};
pub use lie::{LieElement, SimpleLieAlgebra};
pub use rational::Q;
pub use series::LaurentScalar;
