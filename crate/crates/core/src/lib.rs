//! Inverse flight-mechanics solver for fixed-wing, fixed-mass aircraft.
//!
//! Given a prescribed ground track `x_g(t), y_g(t), z_g(t)` and a bank-angle
//! history `phi(t)`, [`solver::solve`] recovers the thrust and control-surface
//! deflections that fly it, along with every other state of the 18-variable
//! differential-algebraic system. [`forward::simulate`] integrates the
//! body-axes equations of motion in the opposite direction and is used to
//! check the inverse results.

pub mod aero;
pub mod atmosphere;
pub mod dynamics;
pub mod forward;
pub mod kinematics;
pub mod model;
pub mod numerics;
pub mod solver;
pub mod trajectory;

pub use model::{AeroCoefficients, AircraftConfig, FlightEnvironment, FlightState, Inertia};
