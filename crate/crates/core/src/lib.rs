//! Decision procedure for the first-order theory of multiplication and
//! order over the positive rationals, extended with the n-th power
//! predicates `R[n]`, plus the sign-splitting reduction that decides
//! multiplication and order over all of ℚ.
//!
//! The pipeline is [`formula::parse`] → [`qe::eliminate_all`] →
//! [`semantics::eval_ground`]; [`semantics::decide`] strings these
//! together. [`semantics::zarith`] holds the bounded integer checks for
//! the definability of addition from multiplication and order.

pub mod cli;
pub mod error;
pub mod formula;
pub mod fuzz;
pub mod numtheory;
pub mod qe;
pub mod semantics;

pub use error::{Error, Result};
pub use formula::{Atom, Formula, Monomial};
pub use numtheory::Rational;
pub use semantics::Domain;
