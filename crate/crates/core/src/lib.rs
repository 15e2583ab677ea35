//! Immersed finite elements on Cartesian meshes for 3D elliptic interface
//! problems.

#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod assembly;
pub mod classify;
pub mod config;
pub mod error;
pub mod geometry;
pub mod ife;
pub mod levelset;
pub mod mesh;
pub mod problem;
pub mod quadrature;
pub mod runner;
pub mod scalar;
pub mod solver;
pub mod space;
pub mod sparse;
pub mod topology;

pub use error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;
