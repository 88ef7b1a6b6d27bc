//! Grover's search algorithm simulated three ways, side by side:
//!
//! * [`quantum`]: the full `N`-dimensional real state vector, with the
//!   oracle sign flip and inversion about the average.
//! * [`analytic`]: the exact reduction to two shared amplitudes `(a, b)`,
//!   evolved by a 2×2 matrix, with its spectral form and closed-form
//!   trajectories.
//! * [`collision`]: two balls of masses `N1·m0` and `N2·m0` on a line; an
//!   obstacle bounce followed by an elastic two-ball collision is one
//!   iteration.
//!
//! [`correspondence`] maps between amplitudes and velocities and checks that
//! all engines agree; [`harness`] drives scenarios and writes CSV.

pub mod analytic;
pub mod collision;
pub mod correspondence;
mod dd;
mod error;
pub mod harness;
mod params;
pub mod quantum;
mod sum;

pub use error::{Error, Result};
pub use params::{Regime, SearchParams};
