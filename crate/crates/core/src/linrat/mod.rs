//! Exact rational LP, Fourier–Motzkin projection and polyhedral cone membership.
//!
//! Everything here is exact: there are no tolerances anywhere in this module.

mod cone;
mod fm;
pub(crate) mod linalg;
mod polyhedron;
mod rational;
mod simplex;

pub use cone::{cone_member, cone_member_detailed, ConeModel, ConeSemantics, Membership};
pub use fm::fm_project;
pub use polyhedron::{Halfspace, Polyhedron};
pub use rational::{
    format_rational, from_f64, parse_rational, rat, ratio, serde_q, serde_qmat, serde_qvec,
    to_f64, vec_from_f64, vec_to_f64, Rational,
};
pub(crate) use rational::dot;
pub use simplex::{lp_solve, LpOutcome, Sense};
