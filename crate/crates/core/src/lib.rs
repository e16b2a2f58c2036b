//! Pseudo-spectral simulation of the 3D Boussinesq equations on a periodic box,
//! with Littlewood–Paley / Besov diagnostics and an empirical inequality lab.

pub mod cli;
pub mod error;
pub mod io;
pub mod lab;
pub mod littlewood_paley;
pub mod monitor;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
