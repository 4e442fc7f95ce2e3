//! Hausdorff content on dyadic grids, Choquet integrals against it, and
//! maximal and Riesz-type operators measured in those integrals.

pub mod choquet;
pub mod content;
pub mod error;
pub mod geometry;
pub mod io;
pub mod operators;
pub mod render;
pub mod verify;
mod par;

pub use error::{Error, Result};
pub use geometry::{Ball, BallMode, DyadicCube, Grid, GridFunction, GridSet};
