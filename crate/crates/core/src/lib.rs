//! Bearing-only visual homing.
//!
//! A robot sees `k` static landmarks only through unit bearing vectors and
//! must return to a home location described by the bearings observed there,
//! while keeping every pair of landmarks inside a conic field of view.
//!
//! The navigation field is built from two orthogonal pieces:
//!
//! * a tangential field that slides along k-ellipsoids (level sets of the
//!   sum of distances to the landmarks) until the normalized bearing sum `v`
//!   matches its home value `v*`;
//! * a normal field that moves along `±v` to bring one pair of bearings to
//!   its home view angle.
//!
//! They are blended with smooth gains into a single field that drives a
//! damped double integrator or a unicycle.
//!
//! Modules:
//!
//! * [`geometry`]: bearings, the distance sum and its derivatives,
//!   geometric median, k-ellipsoids and isonormal curves.
//! * [`fields`]: home specification, tangential/normal/combined fields,
//!   gains and field-of-view predicates.
//! * [`dynamics`]: closed-loop double integrator and unicycle models.
//! * [`sim`]: scenario files, rollouts, monitoring and CSV logs.
//! * [`cli`]: the `homing` command line front end.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod sim;

pub use error::{HomingError, Result};

/// Column vector of runtime dimension (2 or 3).
pub type Vector = nalgebra::DVector<f64>;
/// Points share the vector representation; units are meters.
pub type Point = Vector;
pub type Matrix = nalgebra::DMatrix<f64>;

/// Convenience constructor for a [`Vector`] from a slice.
pub fn vector(coords: &[f64]) -> Vector {
    Vector::from_column_slice(coords)
}
