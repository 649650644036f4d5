//! Design of materials with a prescribed refraction coefficient by embedding
//! many small balls, together with the numerical machinery that checks such a
//! design: volume-integral solvers for the background field and its Green's
//! function, the effective-field equation, and the many-ball (Foldy-type)
//! system whose solution approaches the effective field as the ball radius
//! shrinks.
//!
//! The crate is `no_std` with `alloc`. The default `std` feature enables
//! rayon-backed parallel assembly and operator application; the `serde`
//! feature derives (de)serialization for the configuration-facing types.

#![cfg_attr(not(feature = "std"), no_std)]

// `!(x > 0.0)` style checks reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod designer;
pub mod error;
pub mod field;
pub mod geometry;
pub mod kernel;
pub mod linalg;
pub mod particles;
pub mod profile;
pub mod solvers;
pub mod wave;

mod par;
#[cfg(feature = "serde")]
mod serde_complex;

pub use error::{Error, Result};
pub use field::GridField;
pub use geometry::{Cell, Domain, Grid, Vec3};
pub use num_complex::Complex64;
pub use profile::{DensityProfile, FieldExpr, RefractionProfile, Region};
pub use wave::IncidentWave;

/// Packing bound for the simple-cubic arrangement used by the placement: a
/// center density `N / V_a` with lattice pitch `2a` gives `N = π/6`.
pub const PACKING_BOUND: f64 = core::f64::consts::PI / 6.0;

/// Volume of a ball of radius `a`.
#[inline]
pub fn ball_volume(a: f64) -> f64 {
    4.0 * core::f64::consts::PI * a * a * a / 3.0
}
