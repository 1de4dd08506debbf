//! Quantum-state transport in (x, k) space.
//!
//! - [`grid_state`]: discretized wave-packets, transforms, moments.
//! - [`weyl_ops`]: Weyl translations, loop and open-path phases.
//! - [`trajectory`]: mass-shell trajectories with `dx·dk = 0` steps.
//! - [`mass_observables`]: rest and bare mass, bare-mass spread at high boost.
//!
//! Everything runs in natural units (ħ = c = 1) except the MeV-facing
//! surface of [`mass_observables`].

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid_state;
pub mod mass_observables;
pub mod metric;
pub mod trajectory;
pub mod weyl_ops;

pub use error::{Error, Result};
pub use grid_state::{Grid, Moments, Representation, WavePacket};
pub use metric::{wrap_phase, Metric};
pub use weyl_ops::{PhaseDisplacement, PhasePath, PhasePoint};
