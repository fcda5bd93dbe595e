//! A finite-dimensional laboratory for the robust generalized S-procedure.
//!
//! A robust instance is a finite family of Rockafellians `F_u(x, y)`. The crate decides
//! the primal statement (sup over scenarios of `F_u(x, 0)` is nonnegative), searches
//! for multiplier certificates `F_u(x, y) + <λ, y> >= 0`, and evaluates the geometric
//! and conjugate characterizations that tie the two together. Polyhedral instances are
//! handled exactly over the rationals; quadratic instances numerically, with
//! three-valued verdicts.

pub mod config;
pub(crate) mod decimal;
pub mod error;
pub mod ext;
pub mod geometry;
pub mod influence;
pub mod linrat;
pub mod procedures;
pub mod rockafellian;
pub mod symeig;
pub mod verdict;

pub use error::{Error, Result};
pub use ext::ExtReal;
pub use config::Config;
pub use verdict::{Truth, Verdict};
