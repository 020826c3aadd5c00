//! Energy-preserving integrators for separable Hamiltonian systems built on
//! the Average Vector Field (AVF) discrete gradient, plus its locally exact
//! modifications:
//!
//! * **AVF**: second order, conserves the energy exactly;
//! * **LEX**: modifier anchored at the start of the step, third order;
//! * **SLEX**: modifier anchored at the step midpoint, fourth order and
//!   time-symmetric.
//!
//! All three conserve the energy up to the nonlinear solver tolerance when
//! the discrete gradient is available in closed form (Kepler and the
//! `alpha r^2 - beta r^4` oscillator).

pub mod analysis;
pub mod dgrad;
pub mod error;
pub mod experiment;
pub mod integrate;
pub mod matfun;
pub mod model;
pub mod vecops;

pub use error::{Error, Result};
