//! Numerical toolkit for the parameter space of cubic polynomials with
//! marked critical points.
//!
//! A cubic `f_{c,v}(z) = z^3 - 3c^2 z + 2c^3 + v` has critical points at
//! `+c` and `-c` with critical values `v` and `v + 4c^3`. This crate
//! computes the dynamical-plane and parameter-plane potentials attached to
//! that family (Green functions, Bottcher coordinates), the escape
//! invariant `phi_minus` and its wringing deformation, the `Per(n,k)`
//! curves and their degree/equidistribution properties, two-symbol
//! itineraries on transversal disks near infinity, Misiurewicz parameters,
//! and grid estimates of the bifurcation measure.
//!
//! All operations are pure functions; grids are evaluated in parallel with
//! deterministic output ordering.

pub mod bif;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod itinerary;
pub mod param;
pub mod percurves;
pub mod roots;
pub mod solve;
pub mod tol;
pub mod verify;
pub mod wring;

pub use dynamics::{CubicParam, Cycle, GreenResult};
pub use error::BifError;
pub use grid::{AxisMeaning, GridField};
pub use param::{LocusClass, LocusReport, PhiMinusValue};
pub use percurves::{PerSign, PerSpec, PerValue};
pub use wring::{LeafConstraint, LeafTrace, Transversal, WringU};

pub use num_complex::Complex64;
