//! Exact arithmetic for the iterated primitives
//!
//! ```text
//! f_{0,j}(x) = ln^j(1+x),    f_{n,j}(x) = ∫_0^x f_{n-1,j}(t) dt
//! ```
//!
//! together with the number theory of their coefficient denominators and an
//! exact certifier for infinite log-concavity of coefficient sequences.
//!
//! Everything is computed over arbitrary-precision rationals; no floating
//! point is used on any path that produces a verdict.

pub mod denoms;
pub mod error;
pub mod harmonic;
pub mod iterated;
pub mod logconcave;
pub mod logpoly;
pub mod numtheory;

pub use error::{Error, Result};
pub use logpoly::{LogPolyExpr, Polynomial, Rational};
