//! Pseudo-spectral laboratory for the incompressible isotropic LANS-α
//! equation on the periodic box.

pub mod config;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod harness;
pub mod init;
pub mod io;
pub mod mild;
pub mod runner;
pub mod semigroup;
pub mod spectral;
pub mod timestep;

pub use error::{LansError, Result};
pub use field::{PhysicalField, SpectralField, TensorField};
pub use grid::Grid;
pub use spectral::{AlphaParam, Nonlinearity, SobolevIndex};
pub use semigroup::{LaNormSpec, TimeGrid, Trajectory, WeightedNormSpec};
pub use mild::{PicardConfig, PicardDiagnostics};
pub use timestep::StepConfig;
pub use config::ExperimentConfig;
pub use runner::{run_experiment, run_suite, Suite, VerifyOptions};
