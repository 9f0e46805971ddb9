//! Strengthening relaxations of 0/1 sets through Boolean formulas.
//!
//! Given a polytope `Q ⊆ [0,1]^n` and a formula `φ` defining a set
//! `S ⊆ {0,1}^n`, [`polytope::lift`] builds `φ(Q)` as an extended formulation:
//! literals map to faces of `Q`, `∧` to intersection and `∨` to the convex hull
//! of the union. Supporting modules provide exact rational LP, small-dimension
//! hull computations, pitch and notch measures, instance generators and
//! verification checks.

pub mod error;
pub mod formula;
pub mod hull;
pub mod instances;
pub mod lp;
pub mod measures;
pub mod points;
pub mod polytope;
pub mod rational;
pub mod verify;

pub use error::{Error, Result};
pub use formula::{Formula, Node};
pub use points::PointSet01;
pub use polytope::{ExtendedFormulation, LiftOptions, LiftReport};
pub use rational::Rational;
