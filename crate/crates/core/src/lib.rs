//! Newton polyhedra, toric fans and Łojasiewicz exponents of smooth germs.
//!
//! The pipeline takes a [`poly::TaylorModel`], builds its Newton polyhedron
//! ([`newton`]), refines the normal fan to a unimodular one ([`fan`]), checks
//! Kouchnirenko non-degeneracy ([`nondegen`]), derives the exponents θ, α and
//! ℒ ([`exponents`]) and audits the resulting inequalities by sampling near
//! the origin ([`verify`]).

pub mod error;
pub mod exponents;
pub mod fan;
pub mod lattice;
pub mod newton;
pub mod nondegen;
pub mod parse;
pub mod poly;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use poly::{Exponent, Remainder, TaylorModel, Term};
