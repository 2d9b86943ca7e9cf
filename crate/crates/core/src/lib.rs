//! Classical and nonclassical Feynman-path amplitudes behind Gaussian
//! multi-slit gratings, and the Bohmian velocities they imply.
//!
//! * [`propagators`]: closed-form and quadrature amplitudes for classical
//!   (`source -> slit -> detector`) and single-hop nonclassical
//!   (`source -> slit i -> slit j -> detector`) paths;
//! * [`bohmian`]: guiding-equation velocities, fields and trajectories;
//! * [`analysis`]: deviation profiles, spike/peak detection, density maps;
//! * [`config`], [`output`], [`cli`]: file formats and the `slitpath` binary.

pub mod analysis;
pub mod bohmian;
pub mod cli;
pub mod config;
pub mod error;
pub mod model;
pub mod output;
pub mod propagators;
pub mod quadrature;
pub mod selftest;

pub use error::{Error, Result, ValidationError};
pub use model::{
    hop_time, validate_config, validate_config_with, AmplitudeField, Config, DeviationReport, ExperimentGeometry,
    GridSpec, HopPrefactor, PairKinematics, PhysicalConstants, Point, Settings, SlitArray, Trajectory, VelocityField,
};
pub use propagators::Mode;
