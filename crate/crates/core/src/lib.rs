//! Variational staggered incompressible SPH for free-surface flows.
//!
//! The solver is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`) and the spatial dimension `D`. The aliases at the crate
//! root fix the common `f64` instantiations.

// Negated comparisons deliberately reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod classification;
pub mod error;
pub mod forces;
pub mod geometry;
pub mod io;
pub mod kernel;
pub mod neighborhood;
pub mod particles;
pub mod ppe;
pub mod runner;
pub mod scalar;
pub mod scenes;
pub mod shifting;
pub mod solver;
pub mod staggered;

pub use calibration::ReferenceConstants;
pub use classification::ParticleClass;
pub use error::{Error, Result};
pub use kernel::{KernelFamily, KernelSpec};
pub use particles::ParticleSystem;
pub use scalar::{Real, Vector};
pub use scenes::SceneConfig;
pub use solver::{Simulation, SolverConfig, StepReport};

pub type Vec2 = Vector<f64, 2>;
pub type Vec3 = Vector<f64, 3>;
pub type Simulation2d = Simulation<f64, 2>;
pub type Simulation3d = Simulation<f64, 3>;
pub type Kernel = KernelSpec<f64>;
pub type Constants = ReferenceConstants<f64>;
