//! Cumulative prospect theory (CPT) equilibrium geometry.
//!
//! * [`cpt`]: prospects, value and weighting functions, CPT values, regret.
//! * [`game`]: finite normal-form games, correlated and Nash equilibrium
//!   checks under CPT preferences.
//! * [`two_by_two`]: complete characterization of 2x2 games.
//! * [`region`]: rasterized deviation regions over probability simplices
//!   and their connected components.
//! * [`cli`]: file formats, presets and report writers used by the
//!   `cpt-eq` binary.

pub mod cli;
pub mod cpt;
pub mod error;
pub mod fmt;
pub mod game;
pub mod region;
pub mod two_by_two;

pub use error::{Error, Result};
