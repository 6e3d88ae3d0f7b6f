//! Analytical mechanics of a massive particle in Newtonian space-time, in both
//! frame-dependent and frame-independent form.
//!
//! * [`galilean`]: chart algebra of space-time (time covector, spatial metric,
//!   frames, splittings, the frame cocycle `sigma`).
//! * [`dynamics`]: lagrangians, hamiltonians, Legendre maps, mass shells and
//!   RK4 trajectories in a fixed inertial frame.
//! * [`generating`]: families of functions over product fibrations, their
//!   critical sets, Hessians, Morse certification and reduction.
//! * [`affine`]: the frame-independent value space `W`, affine phase space `P`,
//!   affine lagrangian, pairing and the maps of the Tulczyjew triple.

pub mod affine;
pub mod dynamics;
pub mod error;
pub mod families;
pub mod galilean;
pub mod generating;
pub mod model;
pub mod numdiff;
pub mod potential;

pub use error::{Error, Result};
pub use galilean::{Covector4, Event, Frame, SpatialMetric, Vector4, TAU};
pub use model::NewtonModel;
