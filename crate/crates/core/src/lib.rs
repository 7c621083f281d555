//! Exact arithmetic and decision procedures for two-dimensional semi-tori
//! `C^2 / Γ` whose rank-three lattice `Γ` has algebraic coordinates.

pub mod classify;
pub mod conj;
pub mod cubic;
pub mod elliptic;
pub mod error;
pub mod field;
pub mod interval;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod roots;

pub use conj::ConjugateContext;
pub use error::{Error, Result};
pub use field::{FieldElement, Inverse, ModularField, NumberField};
pub use interval::IntervalRect;
pub use poly::RationalPolynomial;
pub use rational::Rat;
