//! Exact computations in relatively free associative algebras satisfying the
//! Lie-nilpotency identity `[x1, ..., xn] = 0`.
//!
//! The crate is organised bottom-up:
//!
//! * [`scalars`]: exact coefficients over `Q` and `F_p`.
//! * [`freealg`]: noncommutative polynomials in the free unital algebra.
//! * [`linalg`]: reduced row-echelon spans over either field.
//! * [`pbw`]: Lyndon basis of the free Lie algebra, correct words and weights.
//! * [`tgrade`]: graded components of T-ideals, T-spaces and centers.
//! * [`f23model`]: the closed-form model of the rank-2 algebra with `[x, y, z] = 0`.
//! * [`verify`]: named verification checks and their JSON/text reports.

pub mod f23model;
pub mod freealg;
pub mod linalg;
pub mod pbw;
pub mod scalars;
pub mod tgrade;
pub mod verify;
